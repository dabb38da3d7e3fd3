use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};

use roofsim_core::cache::build_hierarchy;
use roofsim_core::hpcg::MgHierarchy;
use roofsim_core::kernels::{spmv_into, spmv_trace, stencil27_matrix, AccessCounter, AddressSpace, CrsAddrs, Grid};
use roofsim_core::machine::{clx, scale_caches};

fn spmv(c: &mut Criterion) {
    let m = stencil27_matrix(Grid::cube(32).unwrap());
    let x = vec![1.0; m.n_cols()];
    let mut y = vec![0.0; m.n_rows()];
    let mut space = AddressSpace::new();
    let addrs = CrsAddrs::alloc(&m, &mut space);
    let (xa, ya) = (space.alloc_f64(m.n_cols()), space.alloc_f64(m.n_rows()));
    let caches = scale_caches(&clx().per_core_caches(), 7);

    let mut group = c.benchmark_group("spmv_32cubed");
    group.throughput(Throughput::Elements(m.nnz() as u64));
    group.bench_function("execute", |b| b.iter(|| spmv_into(&m, black_box(&x), &mut y).unwrap()));
    group.bench_function("trace_count", |b| {
        b.iter(|| {
            let mut count = AccessCounter::default();
            spmv_trace(&m, &addrs, xa, ya, &mut count);
            black_box(count)
        })
    });
    group.bench_function("trace_simulate", |b| {
        b.iter(|| {
            let mut h = build_hierarchy(&caches).unwrap();
            black_box(h.measure(Some(m.n_rows() as u64), |h| spmv_trace(&m, &addrs, xa, ya, h)))
        })
    });
    group.finish();
}

fn multigrid(c: &mut Criterion) {
    let mg = MgHierarchy::new(Grid::cube(32).unwrap(), 3).unwrap();
    let r = vec![1.0; mg.finest().matrix.n_rows()];
    c.bench_function("mg_vcycle_32cubed", |b| b.iter(|| black_box(mg.apply(black_box(&r)).unwrap())));
}

criterion_group!(benches, spmv, multigrid);
criterion_main!(benches);
