//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p heisenberg-invariants --release --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use heisenberg_invariants::cyclic::{
    degree_audit, recover_cyclic_orbit, recover_weighted, weighted_action, weighted_invariants,
};
use heisenberg_invariants::spectral::{cyclic_shift_real, dft_real, sample_random_real};
use heisenberg_invariants::*;
use rayon::prelude::*;

/// Relative tolerances, pinned per criterion.
const INVARIANCE_TOL: f64 = 1e-9;
const INVERSION_TOL: f64 = 1e-8;
const PHASE_RETRIEVAL_TOL: f64 = 1e-6;
const ORBIT_TOL: f64 = 1e-6;
const STAGE_RESIDUAL_TOL: f64 = 1e-6;
const MIN_SUCCESS_RATE: f64 = 0.95;
const PHASE_SENSITIVITY: f64 = 1e-3;
const WEIGHTED_TOL: f64 = 1e-8;
const WORKED_EXAMPLE_TOL: f64 = 1e-12;
const TRIALS: u64 = 20;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn seed(criterion: u64, n: usize, trial: u64) -> u64 {
    criterion * 1_000_000 + n as u64 * 1_000 + trial
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn generic_signal(criterion: u64, n: usize, trial: u64) -> ComplexVector {
    let floor = ToleranceConfig::default().genericity_floor;
    (0..)
        .map(|k| sample_random_signal(n, seed(criterion, n, trial) + 500 * k))
        .find(|x| is_generic(x, floor).generic)
        .unwrap()
}

fn real_shift_distance(v: &RealVector, target: &RealVector) -> f64 {
    (0..target.len() as i64)
        .map(|s| {
            let t = cyclic_shift_real(target, s);
            v.iter().zip(t.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

fn invariance() -> Outcome {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for n in 2..=5 {
        for trial in 0..TRIALS {
            let x = sample_random_signal(n, seed(1, n, trial));
            let inv = heisenberg_invariants(&x);
            for g in enumerate_group(n) {
                let d = invariant_distance(&inv, &heisenberg_invariants(&act(&g, &x).unwrap()))
                    .unwrap();
                worst = worst.max(d);
                checks += 1;
            }
        }
    }
    Outcome {
        pass: worst <= INVARIANCE_TOL,
        detail: format!("{checks} checks, worst invariant distance {worst:.2e}"),
    }
}

fn low_degree() -> Outcome {
    let mut nonzero = vec![];
    let mut cells = 0;
    for n in 2..=10 {
        for d in 1..n {
            cells += 1;
            let count = degree_audit(n, d);
            if count != 0 {
                nonzero.push((n, d, count));
            }
        }
    }
    Outcome {
        pass: nonzero.is_empty(),
        detail: format!("{cells} (N, d) cells, nonzero: {nonzero:?}"),
    }
}

fn bispectrum_inversion() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut total = 0;
    for n in 3..=16 {
        for trial in 0..TRIALS {
            total += 1;
            let y = sample_random_real(n, seed(3, n, trial));
            let b = unitary_bispectrum(&dft_real(&y));
            match invert_real_bispectrum(&b, &tol) {
                Ok(r) => {
                    let d = real_shift_distance(&r, &y) / y.norm();
                    worst = worst.max(d);
                    if d > INVERSION_TOL {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{total} signals, {failures} failures, worst relative shift distance {worst:.2e}"),
    }
}

fn separation_up_to_shift() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut worst = 0.0f64;
    let mut failures = 0;
    let mut total = 0;
    for n in 3..=8 {
        for trial in 0..TRIALS {
            total += 1;
            let x = generic_signal(4, n, trial);
            let y = modulus_vector(&x);
            let z = fourier_modulus_vector(&x);
            let ry = invert_real_bispectrum(&modulus_bispectrum(&x), &tol);
            let rz = invert_real_bispectrum(&fourier_modulus_bispectrum(&x), &tol);
            match (ry, rz) {
                (Ok(ry), Ok(rz)) => {
                    let d = (real_shift_distance(&ry, &y) / y.norm())
                        .max(real_shift_distance(&rz, &z) / z.norm());
                    worst = worst.max(d);
                    if d > INVERSION_TOL {
                        failures += 1;
                    }
                }
                _ => failures += 1,
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{total} signals, {failures} failures, worst relative shift distance {worst:.2e}"),
    }
}

fn phase_retrieval() -> Outcome {
    let cfg = PhaseRetrievalConfig::default();
    let cases: Vec<(usize, u64)> = (3..=8).flat_map(|n| (0..TRIALS).map(move |t| (n, t))).collect();
    let results: Vec<(bool, bool, bool)> = cases
        .par_iter()
        .map(|&(n, trial)| {
            let x = generic_signal(5, n, trial);
            let y = modulus_vector(&x);
            let z = fourier_modulus_vector(&x);
            let cfg = PhaseRetrievalConfig {
                seed: seed(5, n, trial),
                ..cfg
            };
            match retrieve_phase(&y, &z, &cfg) {
                Ok(report) => {
                    let certified = magnitudes_match(&report.candidate, &y, &z, 10.0 * cfg.residual_target);
                    let (_, d) = best_global_phase(&report.candidate, &x).unwrap();
                    (true, certified, d <= PHASE_RETRIEVAL_TOL * x.norm())
                }
                Err(_) => (false, true, false),
            }
        })
        .collect();
    let total = results.len();
    let converged = results.iter().filter(|r| r.0).count();
    let overclaims = results.iter().filter(|r| r.0 && !r.1).count();
    let aligned = results.iter().filter(|r| r.2).count();
    let rate = aligned as f64 / total as f64;

    // two independent retrievals should agree up to a global phase
    let mut pairs = 0;
    let mut agreeing = 0;
    for n in 3..=5 {
        for trial in 0..TRIALS {
            let x = generic_signal(55, n, trial);
            let y = modulus_vector(&x);
            let z = fourier_modulus_vector(&x);
            let run = |s: u64| {
                retrieve_phase(&y, &z, &PhaseRetrievalConfig { seed: s, ..cfg }).ok()
            };
            if let (Some(a), Some(b)) = (run(seed(55, n, trial)), run(seed(56, n, trial))) {
                pairs += 1;
                if best_global_phase(&a.candidate, &b.candidate).unwrap().1
                    <= PHASE_RETRIEVAL_TOL * x.norm()
                {
                    agreeing += 1;
                }
            }
        }
    }
    Outcome {
        pass: rate >= MIN_SUCCESS_RATE && overclaims == 0 && agreeing == pairs,
        detail: format!(
            "{aligned}/{total} within {PHASE_RETRIEVAL_TOL:e} of λx (rate {rate:.3}), \
             {converged} converged, {overclaims} overclaims; \
             independent retrievals agree up to phase in {agreeing}/{pairs}"
        ),
    }
}

fn full_separation() -> Outcome {
    let tol = ToleranceConfig::default();
    let sizes = [3usize, 4, 5, 6, 8];
    let cases: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| (0..TRIALS).map(move |t| (n, t))).collect();
    let results: Vec<(usize, bool, bool, bool, usize)> = cases
        .par_iter()
        .map(|&(n, trial)| {
            let x = generic_signal(6, n, trial);
            let inv = heisenberg_invariants(&x);
            let cfg = PhaseRetrievalConfig::for_orbit_search(seed(6, n, trial));
            match recover_orbit(&inv, &cfg, &tol) {
                Ok(report) if report.success => {
                    let v = verify_against_truth(&report, &x, ORBIT_TOL).unwrap();
                    let s = report.stage_residuals;
                    let stages_ok = [s.bm_inversion, s.bfm_inversion, s.phase_retrieval, s.phase_fix, s.final_distance]
                        .iter()
                        .all(|r| r.is_some_and(|r| r <= STAGE_RESIDUAL_TOL));
                    (n, true, v.equivalent, stages_ok, report.restarts_used)
                }
                Ok(report) => (n, false, false, false, report.restarts_used),
                Err(_) => (n, false, false, false, 0),
            }
        })
        .collect();
    let mut pass = true;
    let mut parts = vec![];
    for &n in &sizes {
        let rows: Vec<_> = results.iter().filter(|r| r.0 == n).collect();
        let ok = rows.iter().filter(|r| r.1 && r.2 && r.3).count();
        let false_positive = rows.iter().filter(|r| r.1 && !r.2).count();
        let max_restarts = rows.iter().map(|r| r.4).max().unwrap_or(0);
        let rate = ok as f64 / rows.len() as f64;
        pass &= rate >= MIN_SUCCESS_RATE && false_positive == 0;
        parts.push(format!("N={n}: {ok}/{} (fp {false_positive}, max restarts {max_restarts})", rows.len()));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn phase_necessity() -> Outcome {
    let mut failures = 0;
    let mut total = 0;
    let mut worst_bispectrum = 0.0f64;
    let mut weakest_power_gap = f64::INFINITY;
    for n in 3..=8 {
        for trial in 0..TRIALS {
            total += 1;
            let x = generic_signal(7, n, trial);
            let rotated = x.scale(Complex64::from_polar(1.0, PI / (2.0 * n as f64)));
            let a = heisenberg_invariants(&x);
            let b = heisenberg_invariants(&rotated);
            let phase_blind = HeisenbergInvariants { i_n: a.i_n, ..b.clone() };
            let d = invariant_distance(&a, &phase_blind).unwrap();
            let gap = (b.i_n - a.i_n).norm() / a.i_n.norm();
            let separated = !orbit_equivalent(&x, &rotated, ORBIT_TOL).unwrap();
            worst_bispectrum = worst_bispectrum.max(d);
            weakest_power_gap = weakest_power_gap.min(gap);
            if d > INVARIANCE_TOL || gap <= PHASE_SENSITIVITY || !separated {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!(
            "{total} signals, {failures} failures; worst bispectrum deviation {worst_bispectrum:.2e}, \
             smallest relative I_N gap {weakest_power_gap:.3}"
        ),
    }
}

fn weighted_recovery() -> Outcome {
    let tol = ToleranceConfig::default();
    let orbit_distance = |v: &ComplexVector, w: &ComplexVector| {
        (0..3 * v.len())
            .map(|j| weighted_action(v, j).distance(w))
            .fold(f64::INFINITY, f64::min)
    };
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut total = 0;
    let fixture = ComplexVector::from_real(&[1.0, 2.0]).unwrap();
    let mut vectors = vec![fixture];
    for n in 2..=4 {
        vectors.extend((0..TRIALS).map(|t| sample_random_signal(n, seed(8, n, t))));
    }
    for v in &vectors {
        total += 1;
        match recover_weighted(&weighted_invariants(v), &tol) {
            Ok(w) => {
                let d = orbit_distance(v, &w) / v.norm();
                worst = worst.max(d);
                if d > WEIGHTED_TOL {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{total} vectors incl. the Z_6 fixture (1, 2), {failures} failures, worst {worst:.2e}"),
    }
}

fn regular_representation() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut failures = 0;
    let mut worst = 0.0f64;
    let mut total = 0;
    for n in 3..=8 {
        for trial in 0..TRIALS {
            total += 1;
            let x = sample_random_signal(n, seed(9, n, trial));
            match recover_cyclic_orbit(&x, &tol) {
                Ok(w) => {
                    let d = (0..n as i64)
                        .map(|s| cyclic_shift(&x, s).distance(&w))
                        .fold(f64::INFINITY, f64::min)
                        / x.norm();
                    worst = worst.max(d);
                    if d > INVERSION_TOL {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{total} signals, {failures} failures, worst relative shift distance {worst:.2e}"),
    }
}

fn worked_example() -> Outcome {
    let x = ComplexVector::new(vec![
        Complex64::new(1.5, -0.5),
        Complex64::new(0.3, 2.0),
        Complex64::new(-1.0, 0.7),
    ])
    .unwrap();
    let y_hat = dft_real(&modulus_vector(&x));
    let z_hat = dft_real(&fourier_modulus_vector(&x));
    let x_hat = dft(&x);
    let bm = modulus_bispectrum(&x);
    let bfm = fourier_modulus_bispectrum(&x);

    // ζ_3 is the primitive cube root used by the forward transform
    let zeta = Complex64::from_polar(1.0, -TAU / 3.0);
    let expressions = |v: &ComplexVector| {
        let m: Vec<Complex64> = v.iter().map(|c| Complex64::new(c.norm_sqr(), 0.0)).collect();
        let first = m[0] + m[1] + m[2];
        let a = m[0] + zeta * m[1] + zeta * zeta * m[2];
        let b = m[0] + zeta * zeta * m[1] + zeta * m[2];
        (first, a * b, a * a * a)
    };
    let (e0, e12, e111) = expressions(&x);
    let (f0, f12, f111) = expressions(&x_hat);
    let errors = [
        rel(e0, y_hat[0]),
        rel(e12, y_hat[1] * y_hat[2]),
        rel(e111, y_hat[1].powi(3)),
        rel(e111, bm.get(1, 1)),
        rel(f0, z_hat[0]),
        rel(f12, z_hat[1] * z_hat[2]),
        rel(f111, z_hat[1].powi(3)),
        rel(f111, bfm.get(1, 1)),
    ];
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    Outcome {
        pass: worst <= WORKED_EXAMPLE_TOL,
        detail: format!("6 expressions (plus B(1,1) on both sides), worst relative error {worst:.2e}"),
    }
}

fn main() {
    // `cargo test` passes harness flags; a filter that excludes us is honored
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let criteria: [Criterion; 10] = [
        ("invariance of B^M, B^FM and I_N under H_N", invariance),
        ("no invariants of degree < N", low_degree),
        ("bispectrum inversion up to cyclic shift", bispectrum_inversion),
        ("y and z recovered up to cyclic shift", separation_up_to_shift),
        ("phase retrieval up to a global phase", phase_retrieval),
        ("full orbit recovery from the invariant bundle", full_separation),
        ("global phase is detected only by I_N", phase_necessity),
        ("Z_3n weighted recovery", weighted_recovery),
        ("regular representation of Z_N", regular_representation),
        ("N = 3 worked example", worked_example),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "[{status}] {:>2}. {name}: {} ({:.2}s)",
            i + 1,
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
