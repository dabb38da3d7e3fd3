use proptest::prelude::*;

use roofsim_core::machine::{
    bandwidth_from_bytes_per_cycle, bdw, clx, code_balance, crs_footprint, hpcg_composite, hpcg_kernels,
    parallel_efficiency, roofline_perf, stream_corrected_bandwidth, KernelKind, KernelModel, ScalingSeries,
    PUBLISHED_DOT_BALANCE,
};

const MIB: f64 = 1024.0 * 1024.0;

fn kernel_strategy() -> impl Strategy<Value = KernelModel> {
    (1.0f64..5000.0, 0.0f64..500.0, 1u32..6)
        .prop_map(|(c, f, i)| KernelModel::new("k", c, f, i).unwrap())
}

proptest! {
    #[test]
    fn scaling_bandwidth_scales_performance_and_keeps_shares(
        kernels in prop::collection::vec(kernel_strategy(), 1..6),
        k in 0.1f64..10.0,
    ) {
        prop_assume!(kernels.iter().any(|m| m.flops_per_row > 0.0));
        let base = clx();
        let mut scaled = base.clone();
        scaled.bw_load_only *= k;
        scaled.theoretical_mem_bw *= k;
        for m in &kernels {
            let p0 = roofline_perf(m, &base).unwrap().perf_gflops;
            let p1 = roofline_perf(m, &scaled).unwrap().perf_gflops;
            prop_assert!((p1 - k * p0).abs() <= 1e-9 * p1.max(1.0));
        }
        let a = hpcg_composite(&kernels, &base, 1000).unwrap();
        let b = hpcg_composite(&kernels, &scaled, 1000).unwrap();
        for (x, y) in a.breakdown.iter().zip(&b.breakdown) {
            prop_assert!((x.time_share - y.time_share).abs() < 1e-12);
        }
    }

    #[test]
    fn composite_lies_between_kernel_extremes(kernels in prop::collection::vec(kernel_strategy(), 1..6)) {
        prop_assume!(kernels.iter().all(|m| m.flops_per_row > 0.0));
        let m = bdw();
        let perfs: Vec<f64> = kernels.iter().map(|k| roofline_perf(k, &m).unwrap().perf_gflops).collect();
        let lo = perfs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = perfs.iter().cloned().fold(0.0, f64::max);
        let p = hpcg_composite(&kernels, &m, 4096).unwrap().perf_gflops;
        prop_assert!(p >= lo * (1.0 - 1e-12) && p <= hi * (1.0 + 1e-12), "{} not in [{}, {}]", p, lo, hi);
    }

    #[test]
    fn composite_time_is_sum_and_perf_is_ratio(kernels in prop::collection::vec(kernel_strategy(), 1..6)) {
        prop_assume!(kernels.iter().any(|m| m.flops_per_row > 0.0));
        let c = hpcg_composite(&kernels, &clx(), 777).unwrap();
        let sum: f64 = c.breakdown.iter().map(|s| s.time).sum();
        prop_assert!((sum - c.total_time).abs() <= 1e-12 * c.total_time);
        prop_assert!((c.perf_gflops - c.total_flops / c.total_time / 1e9).abs() <= 1e-9 * c.perf_gflops);
    }

    #[test]
    fn composite_does_not_depend_on_rows(kernels in prop::collection::vec(kernel_strategy(), 1..6)) {
        prop_assume!(kernels.iter().any(|m| m.flops_per_row > 0.0));
        let one = hpcg_composite(&kernels, &clx(), 1).unwrap().perf_gflops;
        let many = hpcg_composite(&kernels, &clx(), 1_000_000).unwrap().perf_gflops;
        prop_assert_eq!(one.to_bits(), many.to_bits());
    }

    #[test]
    fn mg_is_five_spmv(n in 1.0f64..1000.0) {
        let mg = code_balance(KernelKind::MgFinest { nnzr: n }).unwrap();
        let spmv = code_balance(KernelKind::Spmv { nnzr: n }).unwrap();
        prop_assert!((mg - 5.0 * spmv).abs() <= 1e-12 * mg);
        prop_assert_eq!(code_balance(KernelKind::SymgsSweep { nnzr: n }).unwrap(), spmv);
    }

    #[test]
    fn spmpv_bound_decreases_towards_twelve(a in 1.0f64..1e6, b in 1.0f64..1e6) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f = |n| code_balance(KernelKind::SpmpvPerNnz { nnzr: n }).unwrap();
        prop_assert!(f(hi) <= f(lo));
        prop_assert!(f(hi) > 12.0);
    }
}

#[test]
fn bandwidth_units() {
    assert!((bandwidth_from_bytes_per_cycle(128.0, 1.6).unwrap() - 204.8).abs() < 1e-12);
    assert_eq!(bandwidth_from_bytes_per_cycle(64.0, 1.0).unwrap(), 64.0);
    assert_eq!(bandwidth_from_bytes_per_cycle(32.0, 2.0).unwrap(), 64.0);
    assert!(bandwidth_from_bytes_per_cycle(0.0, 2.0).is_err());
    assert!(bandwidth_from_bytes_per_cycle(8.0, -1.0).is_err());
}

#[test]
fn l1_bandwidth_identity_on_presets() {
    for m in [bdw(), clx()] {
        assert_eq!(m.l1_bandwidth_gbs(), m.l1_bytes_per_cycle * m.freq_ghz);
    }
    assert!((clx().l1_bandwidth_gbs() - 204.8).abs() < 1e-12);
}

#[test]
fn catalog_examples() {
    let dot = code_balance(KernelKind::DotHpcgAvg).unwrap();
    assert_eq!(dot, (2.0 * 16.0 + 8.0) / 3.0);
    assert_eq!(code_balance(KernelKind::Spmv { nnzr: 27.0 }).unwrap(), 352.0);
    assert_eq!(code_balance(KernelKind::MgFinest { nnzr: 27.0 }).unwrap(), 1760.0);
    assert!((code_balance(KernelKind::SpmpvPerNnz { nnzr: 52.0 }).unwrap() - 12.538).abs() < 5e-4);
    assert_eq!(code_balance(KernelKind::StreamTriad { nt: true }).unwrap(), 24.0);
    assert_eq!(code_balance(KernelKind::StreamTriad { nt: false }).unwrap(), 32.0);
    assert!(code_balance(KernelKind::Spmv { nnzr: 0.5 }).is_err());
}

#[test]
fn roofline_examples() {
    let dot = KernelModel::new("dot", PUBLISHED_DOT_BALANCE, 2.0, 3).unwrap();
    assert!((roofline_perf(&dot, &bdw()).unwrap().perf_gflops - 10.23).abs() < 0.01);
    let spmv = KernelModel::new("spmv", 352.0, 54.0, 1).unwrap();
    let p = roofline_perf(&spmv, &clx()).unwrap();
    assert!((p.perf_gflops - 17.64).abs() < 0.01);
    assert_eq!(p.perf_gflops, 54.0 * 115.0 / 352.0);
    let idle = KernelModel::new("idle", 10.0, 0.0, 1).unwrap();
    assert_eq!(roofline_perf(&idle, &clx()).unwrap().perf_gflops, 0.0);
}

#[test]
fn single_kernel_composite_equals_its_roofline() {
    let k = KernelModel::new("spmv", 352.0, 54.0, 1).unwrap();
    let c = hpcg_composite(std::slice::from_ref(&k), &bdw(), 10).unwrap();
    let p = roofline_perf(&k, &bdw()).unwrap().perf_gflops;
    assert!((c.perf_gflops - p).abs() < 1e-12);
    assert!(hpcg_composite(&[], &bdw(), 10).is_err());
}

#[test]
fn golden_composites() {
    let ks = hpcg_kernels(27.0, PUBLISHED_DOT_BALANCE).unwrap();
    assert!((hpcg_composite(&ks, &bdw(), 1).unwrap().perf_gflops - 10.27).abs() <= 0.01);
    assert!((hpcg_composite(&ks, &clx(), 1).unwrap().perf_gflops - 17.37).abs() <= 0.01);
}

#[test]
fn stream_correction() {
    assert_eq!(stream_corrected_bandwidth(60.0, false).unwrap(), 80.0);
    assert_eq!(stream_corrected_bandwidth(80.0, true).unwrap(), 80.0);
    // equal interface bandwidth: NT moves 24 B/iter, write-allocate 32
    let b = 100.0f64;
    assert!(((b / 24.0) / (b / 32.0) - 4.0 / 3.0).abs() < 1e-15);
    assert!(stream_corrected_bandwidth(0.0, true).is_err());
}

#[test]
fn efficiency_examples() {
    let linear = ScalingSeries::new((1..=18).map(|c| (c, 3.0 * f64::from(c))).collect()).unwrap();
    assert!((parallel_efficiency(&linear).unwrap().efficiency - 1.0).abs() < 1e-12);
    let sub = ScalingSeries::new(vec![(1, 2.0), (9, 17.0), (18, 0.9 * 18.0 * 2.0)]).unwrap();
    let r = parallel_efficiency(&sub).unwrap();
    assert_eq!(r.cores, 18);
    assert!((r.efficiency - 0.9).abs() < 1e-12);
    assert_eq!(r.per_point.len(), 3);
    let missing = ScalingSeries::new(vec![(2, 1.0), (4, 2.0)]).unwrap();
    assert!(parallel_efficiency(&missing).is_err());
    assert!(ScalingSeries::new(vec![(2, 1.0), (2, 2.0)]).is_err());
}

#[test]
fn footprints_in_mib() {
    let ct20 = crs_footprint(52_329, 2_698_463, 2).unwrap() as f64 / MIB;
    assert!((ct20 - 32.0).abs() / 32.0 <= 0.05, "{ct20}");
    let pwtk = crs_footprint(217_918, 11_634_424, 2).unwrap() as f64 / MIB;
    assert!((pwtk - 134.0).abs() / 134.0 <= 0.05, "{pwtk}");
    assert_eq!(crs_footprint(1, 1, 0).unwrap(), 20);
}
