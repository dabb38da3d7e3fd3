use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use roofsim_core::cache::{build_hierarchy, CacheConfig, Level, PolicyKind};
use roofsim_core::kernels::{gen_stream_trace, StreamBases, StreamKernelKind};
use roofsim_core::machine::clx;

fn caches(policy: PolicyKind) -> Vec<CacheConfig> {
    let mut levels = clx().per_core_caches();
    if let Some(last) = levels.last_mut() {
        last.policy = policy;
    }
    levels
}

fn replay(c: &mut Criterion) {
    let kind = StreamKernelKind::Triad { nt: false };
    let n = 1 << 18;
    let trace = gen_stream_trace(kind, n, &StreamBases::packed(kind, n)).unwrap();
    let mut group = c.benchmark_group("replay_triad");
    group.throughput(Throughput::Elements(trace.len() as u64));
    for policy in PolicyKind::ALL {
        let cfg = caches(policy);
        group.bench_with_input(BenchmarkId::from_parameter(policy), &cfg, |b, cfg| {
            b.iter(|| {
                let mut h = build_hierarchy(cfg).unwrap();
                black_box(h.run_trace(&trace.accesses, Some(trace.work_count)))
            })
        });
    }
    group.finish();
}

fn victim_vs_inclusive(c: &mut Criterion) {
    let kind = StreamKernelKind::LoadOnly;
    let n = 1 << 19;
    let trace = gen_stream_trace(kind, n, &StreamBases::packed(kind, n)).unwrap();
    let mut group = c.benchmark_group("replay_load");
    group.throughput(Throughput::Elements(trace.len() as u64));
    let victim = caches(PolicyKind::TreePlru);
    let mut inclusive = victim.clone();
    inclusive[2] = CacheConfig::new(Level::L3, inclusive[2].capacity, inclusive[2].ways, PolicyKind::TreePlru)
        .allow_non_pow2();
    for (name, cfg) in [("victim", victim), ("inclusive", inclusive)] {
        group.bench_function(name, |b| {
            b.iter(|| black_box(build_hierarchy(&cfg).unwrap().run_trace(&trace.accesses, None)))
        });
    }
    group.finish();
}

criterion_group!(benches, replay, victim_vs_inclusive);
criterion_main!(benches);
