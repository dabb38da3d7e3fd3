//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N PASS|FAIL` line with the measured values, then asserts.
//! The lines go to stderr uncaptured, so a plain `cargo test` shows them.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use roofsim_core::cache::{build_hierarchy, hit_rate_curve, AccessKind, CacheConfig, Level, Outcome, PolicyKind};
use roofsim_core::hpcg::{
    cg_solve, desk_scale_shift, simulate_iteration_traffic, CgOptions, HpcgKernel, MgHierarchy, Preconditioner,
};
use roofsim_core::kernels::{
    gen_stream_trace, load_matrix_market, min_spmv_traffic, rcm_permute, spmpv_trace, spmv, AddressSpace, Grid,
    SpmpvAddrs, StreamBases, StreamKernelKind,
};
use roofsim_core::machine::{
    bdw, clx, code_balance, hpcg_composite, hpcg_kernels, peak_flops, roofline_perf, scale_caches, KernelKind,
    PUBLISHED_DOT_BALANCE,
};

struct Criterion {
    id: u32,
    title: &'static str,
    notes: Vec<String>,
    failures: Vec<String>,
    started: Instant,
}

impl Criterion {
    fn new(id: u32, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            notes: Vec::new(),
            failures: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn close(&mut self, got: f64, want: f64, tol: f64, what: &str) {
        self.check((got - want).abs() <= tol, format!("{what}={got:.4} (want {want} +/- {tol})"));
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if self.failures.is_empty() {
            self.notes.join("; ")
        } else {
            format!("{} | passing: {}", self.failures.join("; "), self.notes.join("; "))
        };
        let line = format!(
            "criterion {} {verdict} {} [{:.1?}]: {detail}\n",
            self.id,
            self.title,
            self.started.elapsed()
        );
        // straight to the handle, past the test harness capture
        let _ = std::io::stderr().lock().write_all(line.as_bytes());
        assert!(self.failures.is_empty(), "criterion {} failed: {detail}", self.id);
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn criterion_1_golden_roofline_table() {
    let mut c = Criterion::new(1, "golden roofline table");
    let kernels = hpcg_kernels(27.0, PUBLISHED_DOT_BALANCE).unwrap();
    for (k, want) in kernels.iter().zip([13.30, 24.00, 352.00, 1760.00]) {
        c.close(k.code_balance, want, 0.01, &format!("C_{}", k.name));
    }
    let golden = [
        (bdw(), [10.23, 5.67, 10.43, 10.43], 10.27),
        (clx(), [17.29, 9.58, 17.64, 17.64], 17.37),
    ];
    for (machine, perfs, composite) in golden {
        for (k, want) in kernels.iter().zip(perfs) {
            let p = roofline_perf(k, &machine).unwrap().perf_gflops;
            c.close(p, want, 0.01, &format!("P_{}@{}", k.name, machine.name));
        }
        let t = hpcg_composite(&kernels, &machine, 160 * 160 * 160).unwrap();
        c.close(t.perf_gflops, composite, 0.01, &format!("P_hpcg@{}", machine.name));
    }
    c.finish();
}

#[test]
fn criterion_2_stream_triad_accounting() {
    let mut c = Criterion::new(2, "STREAM triad accounting");
    let n = 1_000_000;
    // 1.5 MB of caches against a 24 MB working set
    let caches = vec![
        CacheConfig::new(Level::L1, 32 * 1024, 8, PolicyKind::TreePlru),
        CacheConfig::new(Level::L2, 256 * 1024, 8, PolicyKind::TreePlru),
        CacheConfig::new(Level::L3, 1024 * 1024, 16, PolicyKind::TreePlru),
    ];
    let mut per_iter = Vec::new();
    for nt in [true, false] {
        let kind = StreamKernelKind::Triad { nt };
        let trace = gen_stream_trace(kind, n, &StreamBases::packed(kind, n)).unwrap();
        let mut h = build_hierarchy(&caches).unwrap();
        let rep = h.run_trace(&trace.accesses, Some(trace.work_count));
        per_iter.push(rep.bytes_per_work().unwrap());
    }
    c.check(per_iter[0] == 24.0, format!("nt={} B/iter", per_iter[0]));
    c.check(per_iter[1] == 32.0, format!("write-allocate={} B/iter", per_iter[1]));
    let ratio = per_iter[1] / per_iter[0];
    c.check(ratio == 4.0 / 3.0, format!("bandwidth ratio={ratio:.6}"));
    let secs = c.started.elapsed().as_secs_f64();
    c.check(secs < 10.0, format!("runtime {secs:.2}s < 10s"));
    c.finish();
}

#[test]
fn criterion_3_replacement_policy_curve() {
    let mut c = Criterion::new(3, "replacement-policy hit-rate curve");
    let ways = 11;
    let sets = 2048;
    let last = |policy| CacheConfig::new(Level::L3, sets * ways * 64, ways as u32, policy);
    let template = |policy| {
        vec![
            CacheConfig::new(Level::L1, 32 * 1024, 8, PolicyKind::TreePlru),
            CacheConfig::new(Level::L2, 256 * 1024, 8, PolicyKind::TreePlru),
            last(policy),
        ]
    };
    let ratios = [1.5, 2.0, 4.0, 8.0, 10.0];
    let curve = hit_rate_curve(&template(PolicyKind::StreamOneWay), StreamKernelKind::LoadOnly, &ratios, 3).unwrap();
    for p in &curve {
        let closed = ((ways as f64 - 1.0) / ways as f64 / p.ratio).min(1.0);
        c.close(p.l3_hit_rate * 100.0, closed * 100.0, 2.0, &format!("hit%@{}", p.ratio));
        if p.ratio == 4.0 {
            c.close(p.l3_hit_rate * 100.0, 20.0, 5.0, "hit%@4 vs 20");
        }
    }
    let plru = hit_rate_curve(&template(PolicyKind::TreePlru), StreamKernelKind::LoadOnly, &[2.0], 3).unwrap();
    c.check(
        plru[0].l3_hit_rate < 0.01,
        format!("tree-plru hit%@2={:.3}", plru[0].l3_hit_rate * 100.0),
    );
    let secs = c.started.elapsed().as_secs_f64();
    c.check(secs < 60.0, format!("runtime {secs:.1}s < 60s"));
    c.finish();
}

/// Per-set recency stack, most recent first.
fn naive_lru_hits(lines: &[u64], sets: usize, ways: usize) -> Vec<bool> {
    let mut stacks: Vec<Vec<u64>> = vec![Vec::new(); sets];
    lines
        .iter()
        .map(|&line| {
            let s = &mut stacks[(line % sets as u64) as usize];
            let hit = match s.iter().position(|&l| l == line) {
                Some(pos) => {
                    s.remove(pos);
                    true
                }
                None => false,
            };
            s.insert(0, line);
            s.truncate(ways);
            hit
        })
        .collect()
}

#[test]
fn criterion_4_lru_oracle_equivalence() {
    let mut c = Criterion::new(4, "true-LRU oracle equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for ways in [4usize, 8, 11, 16] {
        for sets in [16usize, 64] {
            let span = (2 * sets * ways) as u64;
            let lines: Vec<u64> = (0..100_000).map(|_| rng.gen_range(0..span)).collect();
            let oracle = naive_lru_hits(&lines, sets, ways);
            let cfg = CacheConfig::new(Level::L1, (sets * ways * 64) as u64, ways as u32, PolicyKind::TrueLru);
            let mut h = build_hierarchy(&[cfg]).unwrap();
            let got: Vec<bool> = lines
                .iter()
                .map(|&l| matches!(h.access(l * 64, AccessKind::Load), Outcome::Hit(0)))
                .collect();
            let first = got.iter().zip(&oracle).position(|(a, b)| a != b);
            let hits = oracle.iter().filter(|&&h| h).count();
            c.check(
                first.is_none(),
                format!("{ways}w x {sets}s: {hits} hits, first mismatch {first:?}"),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_5_spmv_traffic_bound_and_dgemm_peak() {
    let mut c = Criterion::new(5, "SpMV traffic bound and DGEMM peak");
    // LRU-like caches far smaller than every non-trivial fixture
    let caches = vec![
        CacheConfig::new(Level::L1, 2 * 1024, 8, PolicyKind::TreePlru),
        CacheConfig::new(Level::L2, 8 * 1024, 8, PolicyKind::TreePlru),
        CacheConfig::new(Level::L3, 16 * 1024, 16, PolicyKind::TreePlru),
    ];
    let p = 4;
    let per_nnz = |m: &roofsim_core::SparseMatrixCrs| {
        let mut space = AddressSpace::new();
        let addrs = SpmpvAddrs::alloc(m, p, &mut space);
        let mut h = build_hierarchy(&caches).unwrap();
        let rep = h.measure(None, |h| spmpv_trace(m, &addrs, h));
        rep.mem_bytes() as f64 / (p as f64 * m.nnz() as f64)
    };
    for name in [
        "banded_scrambled.mtx",
        "random_general.mtx",
        "identity_2.mtx",
        "identity_4096.mtx",
        "duplicates.mtx",
    ] {
        let m = load_matrix_market(&fixture(name)).unwrap();
        let bound = min_spmv_traffic(m.nnzr()).unwrap();
        let got = per_nnz(&m);
        c.check(got >= bound, format!("{name}: {got:.3} >= {bound:.3} B/nnz"));
        if name == "banded_scrambled.mtx" {
            let (ordered, _) = rcm_permute(&m).unwrap();
            let got = per_nnz(&ordered);
            c.check(
                got >= bound && got <= 1.3 * bound,
                format!("{name} rcm: {got:.3} in [{bound:.3}, {:.3}] B/nnz", 1.3 * bound),
            );
        }
    }
    let peak = peak_flops(20, 2.09, 32.0).unwrap();
    c.check(peak == 1337.6, format!("peak={peak} GF/s"));
    c.finish();
}

#[test]
fn criterion_6_hpcg_mini() {
    let mut c = Criterion::new(6, "HPCG mini solver");

    let g32 = Grid::cube(32).unwrap();
    let mg32 = MgHierarchy::new(g32, 3).unwrap();
    let a32 = &mg32.finest().matrix;
    let b32 = spmv(a32, &vec![1.0; a32.n_rows()]).unwrap();
    let res = cg_solve(a32, &b32, Preconditioner::Multigrid(&mg32), &CgOptions { max_iter: 25, tol: 0.0 }).unwrap();
    let acc = &res.accounting;
    for (k, want) in [
        (HpcgKernel::Dot, 3.0),
        (HpcgKernel::Waxpby, 3.0),
        (HpcgKernel::Spmv, 1.0),
        (HpcgKernel::Mg, 1.0),
    ] {
        let got = acc.calls_per_iteration(k);
        c.check(got == want, format!("{k} calls/iter={got}"));
    }
    let drop = 1.0 / res.final_residual();
    c.check(drop >= 1e2, format!("32^3 residual drop={drop:.3e} over {} iterations", res.iterations));

    let g64 = Grid::cube(64).unwrap();
    let mg64 = MgHierarchy::new(g64, 3).unwrap();
    let a64 = &mg64.finest().matrix;
    let b64 = spmv(a64, &vec![1.0; a64.n_rows()]).unwrap();
    let res = cg_solve(a64, &b64, Preconditioner::Multigrid(&mg64), &CgOptions { max_iter: 2, tol: 0.0 }).unwrap();
    // independent count: a 27-point stencil on n^3 points has (3n-2)^3 nonzeros
    let exact_nnzr = (3.0 * 64.0 - 2.0f64).powi(3) / 64.0f64.powi(3);
    c.close(
        res.accounting.flops_per_row(HpcgKernel::Spmv),
        2.0 * exact_nnzr,
        1e-9,
        "F_spmv vs 2(3n-2)^3/n^3",
    );
    for (k, want) in [
        (HpcgKernel::Dot, 2.0),
        (HpcgKernel::Waxpby, 2.0),
        (HpcgKernel::Spmv, 54.0),
        (HpcgKernel::Mg, 270.0),
    ] {
        let got = res.accounting.flops_per_row(k);
        let dev = (got - want) / want;
        c.check(
            dev.abs() <= 0.02,
            format!("F_{k}={got:.3} flops/row ({:+.2}% vs {want})", dev * 100.0),
        );
    }

    let caches = scale_caches(&clx().per_core_caches(), desk_scale_shift(a64.n_rows()));
    let traffic = simulate_iteration_traffic(&mg64, &caches).unwrap();
    let mg = traffic.iter().find(|t| t.kernel == HpcgKernel::Mg).unwrap();
    let target = 5.0 * code_balance(KernelKind::Spmv { nnzr: 27.0 }).unwrap();
    let dev = (mg.bytes_per_row - target) / target;
    c.check(
        dev.abs() <= 0.30,
        format!("MG finest {:.1} B/row ({:+.1}% vs {target})", mg.bytes_per_row, dev * 100.0),
    );
    c.finish();
}
