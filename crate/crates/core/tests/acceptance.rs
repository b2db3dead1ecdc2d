//! Acceptance gate: one test per criterion, each ending in a single
//! "criterion N: PASS/FAIL" line. Tolerances are stated inline; statistical
//! checks use fixed seeds so the suite is deterministic.

use blockwin::{
    draw_innovations, estimate_scales, sample_limit, simulate_window, untruncated_variance_r1,
    volterra_sum, volterra_sum_direct, zeta, CoefficientSeq, ExperimentConfig, HermiteSpec,
    InnovationLaw, Method, ModelName, ModelSpec,
};
use rayon::prelude::*;

const PP: f64 = 100.0;

struct Cell {
    model: ModelName,
    beta: f64,
    c: f64,
    method: Method,
    expect: Expect,
}

enum Expect {
    /// (lower, upper) coverage in percent, +-4 pp per side
    Band(f64, f64),
    /// lower >= min and upper <= max, in percent
    Qualitative { lower_min: f64, upper_max: f64 },
}

fn cfg(cell: &Cell, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        model: cell.model,
        beta: cell.beta,
        n: 1000,
        c: cell.c,
        method: cell.method,
        alpha: 0.1,
        reps,
        master_seed: seed,
        truncation: 10_000,
        rep_offset: 0,
    }
}

/// Criterion 1: Table-scale coverage for six cells, reps = 1000, +-4 pp per
/// side; a band cell that misses may instead agree within +-4 pp with a
/// reps = 5000 rerun of this implementation (self-consistency fallback).
#[test]
fn criterion_1_coverage_cells() {
    let cells = [
        Cell { model: ModelName::ModelI, beta: 2.0, c: 1.0, method: Method::HHat, expect: Expect::Band(90.1, 91.4) },
        Cell { model: ModelName::ModelI, beta: 2.0, c: 1.0, method: Method::Subsampling, expect: Expect::Band(91.5, 92.6) },
        Cell { model: ModelName::ModelI, beta: 0.75, c: 0.5, method: Method::Subsampling, expect: Expect::Band(94.5, 94.2) },
        Cell { model: ModelName::ModelI, beta: 0.75, c: 0.5, method: Method::HHat, expect: Expect::Band(86.7, 87.3) },
        Cell { model: ModelName::ModelII, beta: 2.0, c: 2.0, method: Method::HHat, expect: Expect::Band(88.0, 91.5) },
        Cell { model: ModelName::ModelIV, beta: 0.6, c: 1.0, method: Method::HHat, expect: Expect::Qualitative { lower_min: 95.0, upper_max: 55.0 } },
    ];
    let mut failures = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let label = format!(
            "{} beta={} c={} {}",
            cell.model, cell.beta, cell.c, cell.method.as_str()
        );
        let report = blockwin::run_coverage(&cfg(cell, 1000, 1001 + i as u64)).unwrap();
        let (lo, up) = (report.lower_coverage * PP, report.upper_coverage * PP);
        match cell.expect {
            Expect::Band(el, eu) => {
                if (lo - el).abs() <= 4.0 && (up - eu).abs() <= 4.0 {
                    println!("  cell [{label}]: ({lo:.1}, {up:.1}) vs ({el}, {eu}) — within band");
                } else {
                    // self-consistency fallback at 5000 reps, independent seed
                    let re = blockwin::run_coverage(&cfg(cell, 5000, 0xFA11 + i as u64)).unwrap();
                    let (rl, ru) = (re.lower_coverage * PP, re.upper_coverage * PP);
                    if (lo - rl).abs() <= 4.0 && (up - ru).abs() <= 4.0 {
                        println!(
                            "  cell [{label}]: ({lo:.1}, {up:.1}) vs ({el}, {eu}) — outside band, \
                             self-consistent with 5000-rep rerun ({rl:.1}, {ru:.1})"
                        );
                    } else {
                        failures.push(format!(
                            "[{label}] ({lo:.1}, {up:.1}) vs ({el}, {eu}); rerun ({rl:.1}, {ru:.1})"
                        ));
                    }
                }
            }
            Expect::Qualitative { lower_min, upper_max } => {
                if lo >= lower_min && up <= upper_max {
                    println!("  cell [{label}]: ({lo:.1}, {up:.1}) — lower >= {lower_min}, upper <= {upper_max}");
                } else {
                    failures.push(format!(
                        "[{label}] ({lo:.1}, {up:.1}) missed lower >= {lower_min} / upper <= {upper_max}"
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        println!("criterion 1: PASS");
    } else {
        println!("criterion 1: FAIL — {}", failures.join("; "));
        panic!("criterion 1 failed: {failures:?}");
    }
}

/// Criterion 2: mean H-hat over 500 replicates within 0.08 of the theoretical
/// H (0.75 for beta = 0.75, 0.5 for beta = 2) at n = 5000, l = 70.
#[test]
fn criterion_2_h_hat_consistency() {
    let n = 5000;
    let l = (n as f64).sqrt().floor() as usize;
    let mut failures = Vec::new();
    for (beta, h_true) in [(0.75, 0.75), (2.0, 0.5)] {
        let model = ModelSpec::preset(ModelName::ModelI, beta, 10_000).unwrap();
        let mean_h: f64 = (0..500u64)
            .into_par_iter()
            .map(|k| {
                let seed = blockwin::rng::derive_seed(2025, k);
                let w = simulate_window(&model, n, 2 * l, seed).unwrap();
                estimate_scales(&w, l).unwrap().h_hat
            })
            .sum::<f64>()
            / 500.0;
        let ok = (mean_h - h_true).abs() <= 0.08;
        println!("  beta={beta}: mean H-hat = {mean_h:.4}, target {h_true} +- 0.08");
        if !ok {
            failures.push(format!("beta={beta}: {mean_h:.4} vs {h_true}"));
        }
    }
    if failures.is_empty() {
        println!("criterion 2: PASS");
    } else {
        println!("criterion 2: FAIL — {}", failures.join("; "));
        panic!("criterion 2 failed: {failures:?}");
    }
}

/// Criterion 3: the r = 1 oracle at beta = 0.75, n = 2000, 10^4 reps is within
/// KS 0.02 of the standard normal.
#[test]
fn criterion_3_limit_oracle_gaussianity() {
    let spec = HermiteSpec::new(1, 0.75, 2000, 2000).unwrap();
    let dist = sample_limit(&spec, 10_000, 3).unwrap();
    let ks = dist.ks_to_cdf(blockwin::normal_cdf);
    if ks <= 0.02 {
        println!("criterion 3: PASS (KS to Phi = {ks:.4})");
    } else {
        println!("criterion 3: FAIL (KS to Phi = {ks:.4} > 0.02)");
        panic!("criterion 3 failed: KS {ks}");
    }
}

/// Criterion 4: volterra_sum(r = 2) equals exhaustive double-sum enumeration
/// on all (n <= 8, M <= 8) instances to 1e-8 relative.
#[test]
fn criterion_4_volterra_exhaustive() {
    let mut checked = 0;
    for n in 1..=8usize {
        for m in 0..=8usize {
            let coeffs = CoefficientSeq::allow_tail_excess(0.6, 1.0, m).unwrap();
            let eps = draw_innovations(
                InnovationLaw::Gaussian,
                n + m,
                4004,
                (n * 16 + m) as u64,
            )
            .unwrap();
            let fast = volterra_sum(2, &coeffs, &eps, n).unwrap();
            let slow = volterra_sum_direct(2, &coeffs, &eps, n).unwrap();
            let rel = (fast - slow).abs() / slow.abs().max(1e-300);
            assert!(
                rel < 1e-8 || (fast - slow).abs() < 1e-12,
                "criterion 4: FAIL at n={n} M={m}: {fast} vs {slow}"
            );
            checked += 1;
        }
    }
    println!("criterion 4: PASS ({checked} instances)");
}

/// Criterion 5: exact ||T_{n,1}||^2 / n^{2H} at n = 4000 within 5% of the
/// quadrature zeta(1, beta) for beta in {0.6, 0.75, 0.8}.
#[test]
fn criterion_5_zeta_cross_validation() {
    let n = 4000;
    let mut failures = Vec::new();
    for beta in [0.6, 0.75, 0.8] {
        let var = untruncated_variance_r1(beta, n).unwrap();
        let z = zeta(1, beta, 1e-6).unwrap();
        let h = 1.5 - beta;
        let ratio = var / ((n as f64).powf(2.0 * h) * z.value);
        println!("  beta={beta}: ||T||^2/(n^2H zeta) = {ratio:.4}");
        if (ratio - 1.0).abs() > 0.05 {
            failures.push(format!("beta={beta}: ratio {ratio:.4}"));
        }
    }
    if failures.is_empty() {
        println!("criterion 5: PASS");
    } else {
        println!("criterion 5: FAIL — {}", failures.join("; "));
        panic!("criterion 5 failed: {failures:?}");
    }
}

/// Criterion 6: model (iii), beta = 0.6, n = 4000: mean KS over 50 series
/// between F~_n and the r = 2 oracle (10^4 reps) <= 0.15.
#[test]
fn criterion_6_theorem_2_empirical_validity() {
    let spec = HermiteSpec::new(2, 0.6, 2000, 2000).unwrap();
    let oracle = sample_limit(&spec, 10_000, 6).unwrap();
    let model = ModelSpec::preset(ModelName::ModelIII, 0.6, 10_000).unwrap();
    let n = 4000;
    let l = (n as f64).sqrt().floor() as usize;
    let stats: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|k| {
            let seed = blockwin::rng::derive_seed(606, k);
            let w = simulate_window(&model, n, 2 * l, seed).unwrap();
            let (dist, _) = blockwin::f_n_tilde(&w, l).unwrap();
            (
                dist.ks_to_empirical(&oracle),
                dist.ks_to_cdf(blockwin::normal_cdf),
            )
        })
        .collect();
    let mean_ks = stats.iter().map(|s| s.0).sum::<f64>() / stats.len() as f64;
    let mean_ks_normal = stats.iter().map(|s| s.1).sum::<f64>() / stats.len() as f64;
    println!(
        "  mean KS to r=2 oracle = {mean_ks:.3}; diagnostic: mean KS to Phi = {mean_ks_normal:.3}"
    );
    if mean_ks <= 0.15 {
        println!("criterion 6: PASS");
    } else {
        println!("criterion 6: FAIL — mean KS {mean_ks:.3} > 0.15");
        panic!("criterion 6 failed: mean KS {mean_ks}");
    }
}

/// Criterion 7: cross-module invariants — determinism across worker counts,
/// CDF-quantile Galois connection, shift/scale equivariance of block
/// intervals. The full generative property suite lives in tests/properties.rs.
#[test]
fn criterion_7_invariant_suite() {
    // determinism across 1, 4, and 16 workers
    let config = ExperimentConfig {
        model: ModelName::ModelI,
        beta: 0.75,
        n: 400,
        c: 1.0,
        method: Method::HHat,
        alpha: 0.1,
        reps: 50,
        master_seed: 7,
        truncation: 2000,
        rep_offset: 0,
    };
    let runs: Vec<_> = [1usize, 4, 16]
        .iter()
        .map(|&workers| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .unwrap();
            pool.install(|| blockwin::run_coverage(&config).unwrap())
        })
        .collect();
    for r in &runs[1..] {
        assert_eq!(r.lower_coverage, runs[0].lower_coverage, "criterion 7: FAIL (workers)");
        assert_eq!(r.upper_coverage, runs[0].upper_coverage, "criterion 7: FAIL (workers)");
    }

    // Galois connection: quantile(a) <= x  <=>  a <= cdf(x)
    let dist = blockwin::EmpiricalDist::new(vec![-1.5, -0.2, -0.2, 0.0, 0.4, 2.0, 2.0]).unwrap();
    for i in 1..=50 {
        let a = i as f64 / 50.0;
        let q = dist.quantile(a).unwrap();
        for &x in dist.values() {
            assert_eq!(q <= x, a <= dist.cdf(x), "criterion 7: FAIL (Galois)");
        }
    }

    // shift/scale equivariance: y -> s*y + t maps the interval affinely
    let model = ModelSpec::preset(ModelName::ModelI, 0.75, 2000).unwrap();
    let w = simulate_window(&model, 500, 44, 99).unwrap();
    let (s, t) = (2.5, -3.0);
    let mapped = blockwin::SeriesWindow::from_parts(
        &w.past_values().iter().map(|y| s * y + t).collect::<Vec<_>>(),
        &w.observed().iter().map(|y| s * y + t).collect::<Vec<_>>(),
    )
    .unwrap();
    let a = blockwin::ci_mean(&w, 22, 0.1, blockwin::IntervalKind::TwoSided).unwrap();
    let b = blockwin::ci_mean(&mapped, 22, 0.1, blockwin::IntervalKind::TwoSided).unwrap();
    let near = |x: f64, y: f64| (x - y).abs() < 1e-9 * (1.0 + y.abs());
    assert!(near(b.lo.unwrap(), s * a.lo.unwrap() + t), "criterion 7: FAIL (equivariance)");
    assert!(near(b.hi.unwrap(), s * a.hi.unwrap() + t), "criterion 7: FAIL (equivariance)");

    println!("criterion 7: PASS");
}
