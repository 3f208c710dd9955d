//! Seeded, deterministic verification suites aggregating every
//! module's invariants, for the CLI `verify` command and the
//! acceptance tests. All sampling is driven by a caller-supplied seed;
//! reductions are order-insensitive, so reports are byte-stable across
//! runs and thread counts.

use crate::elliptic::{
    complete_k, jacobi_ds, jacobi_sd, jacobi_sncndn, Modulus,
};
use crate::exact::{
    eval_case1, eval_case2, residual_cubic_system, residual_cubic_system_fd, ExactSolutionSpec,
};
use crate::ode::{oscillator_energy, integrate_rk4, ReducedSystem};
use crate::parallel::max_map;
use crate::pde::{convergence_study, Scheme};
use crate::symmetry::{
    conditional_ansatz, invariant_surface_residual, lie_z, reduction_consistency_check,
    LieReductionParams, Profile, SymmetryOperator,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Outcome of one verified invariant.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Informational entries are reported but never fail a run.
    pub informational: bool,
    pub detail: String,
}

impl CheckResult {
    fn bounded(
        suite: &'static str,
        name: &'static str,
        measured: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            suite,
            name,
            measured,
            tolerance,
            pass: measured < tolerance,
            informational: false,
            detail: String::new(),
        }
    }

    fn in_range(
        suite: &'static str,
        name: &'static str,
        measured: f64,
        lo: f64,
        hi: f64,
    ) -> Self {
        Self {
            suite,
            name,
            measured,
            tolerance: hi,
            pass: (lo..=hi).contains(&measured),
            informational: false,
            detail: format!("expected in [{lo}, {hi}]"),
        }
    }

    fn info(suite: &'static str, name: &'static str, measured: f64, detail: String) -> Self {
        Self {
            suite,
            name,
            measured,
            tolerance: f64::NAN,
            pass: true,
            informational: true,
            detail,
        }
    }
}

/// Jacobi-function identities over seeded random samples.
pub fn verify_elliptic(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<(f64, f64)> = (0..10_000)
        .map(|_| (rng.gen_range(-50.0..50.0), rng.gen_range(0.0..0.999)))
        .collect();

    let sncn = max_map(&samples, |&(z, k)| {
        let t = jacobi_sncndn(z, Modulus::new(k).unwrap()).unwrap();
        (t.sn * t.sn + t.cn * t.cn - 1.0).abs()
    });
    let dnsn = max_map(&samples, |&(z, k)| {
        let t = jacobi_sncndn(z, Modulus::new(k).unwrap()).unwrap();
        (t.dn * t.dn + k * k * t.sn * t.sn - 1.0).abs()
    });
    let recip = max_map(&samples, |&(z, k)| {
        let m = Modulus::new(k.min(0.95)).unwrap();
        let t = jacobi_sncndn(z, m).unwrap();
        if t.sn.abs() > 1e-6 {
            (jacobi_sd(z, m).unwrap() * jacobi_ds(z, m).unwrap() - 1.0).abs()
        } else {
            0.0
        }
    });

    let m = Modulus::half_sqrt2();
    let big_k = complete_k(m).unwrap();
    let k_dev = (big_k - 1.8540746773013719).abs();

    let zs: Vec<f64> = (0..100).map(|i| 0.3 + 2.7 * (i as f64 + 0.5) / 100.0).collect();
    let h = 1e-4;
    let sd_ode = max_map(&zs, |&z| {
        let f = |z| jacobi_sd(z, m).unwrap();
        let dd = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
        (dd + 0.5 * f(z).powi(3)).abs()
    });
    let ds_ode = max_map(&zs, |&z| {
        let g = |z| jacobi_ds(z, m).unwrap();
        let dd = (g(z + h) - 2.0 * g(z) + g(z - h)) / (h * h);
        (dd - 2.0 * g(z).powi(3)).abs()
    });
    let period = max_map(&zs, |&z| {
        (jacobi_sd(z, m).unwrap() - jacobi_sd(z + 4.0 * big_k, m).unwrap()).abs()
    });
    let odd = max_map(&zs, |&z| {
        (jacobi_sd(z, m).unwrap() + jacobi_sd(-z, m).unwrap()).abs()
    });

    vec![
        CheckResult::bounded("elliptic", "sn2_plus_cn2_identity", sncn, 1e-12),
        CheckResult::bounded("elliptic", "dn2_plus_k2sn2_identity", dnsn, 1e-12),
        CheckResult::bounded("elliptic", "sd_ds_reciprocal", recip, 1e-10),
        CheckResult::bounded("elliptic", "complete_k_half_sqrt2", k_dev, 1e-13),
        CheckResult::bounded("elliptic", "sd_second_derivative_ode", sd_ode, 1e-5),
        CheckResult::bounded("elliptic", "ds_second_derivative_ode", ds_ode, 1e-5),
        CheckResult::bounded("elliptic", "sd_periodicity_4k", period, 1e-10),
        CheckResult::bounded("elliptic", "sd_odd_symmetry", odd, 1e-14),
    ]
}

fn min_distance_to_pole(z: f64, two_k: f64) -> f64 {
    let r = (z / two_k).round();
    (z - r * two_k).abs()
}

/// Closed-form residuals over seeded random specs and pole-free points.
pub fn verify_exact(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ac17);
    let two_k = 2.0 * complete_k(Modulus::half_sqrt2()).unwrap();
    let mut samples = Vec::with_capacity(1000);
    while samples.len() < 1000 {
        let x = rng.gen_range(0.0..1.0);
        let t = rng.gen_range(0.1..0.5);
        let a = rng.gen_range(0.05..5.0);
        let b = rng.gen_range(-5.0..-0.05);
        let k1 = rng.gen_range(0.5..2.0);
        let z = crate::exact::similarity_z(x, t, k1);
        if min_distance_to_pole(z, two_k) > 0.05 {
            samples.push((x, t, a, b, k1));
        }
    }

    let analytic = max_map(&samples, |&(x, t, a, b, k1)| {
        let spec = ExactSolutionSpec::elliptic_pair(a, b, k1).unwrap();
        let (ru, rv) = residual_cubic_system(x, t, &spec).unwrap();
        ru.abs().max(rv.abs())
    });
    // FD cross-check on the canonical spec over its pole-free window;
    // near-pole fourth derivatives of ds would otherwise dominate the
    // truncation error of the h = 1e-4 stencil.
    let canonical = ExactSolutionSpec::elliptic_pair(1.0, -1.0, 1.0).unwrap();
    let fd = max_map(&samples, |&(x, t, _, _, _)| {
        let (ru, rv) = residual_cubic_system_fd(x, t, &canonical, 1e-4).unwrap();
        ru.abs().max(rv.abs())
    });
    let case2_v = max_map(&samples, |&(x, t, a, _, k1)| {
        let spec = ExactSolutionSpec::elliptic_plus_linear(a, k1, 1.3, -0.4).unwrap();
        let (_, rv) = residual_cubic_system(x, t, &spec).unwrap();
        rv.abs()
    });
    let u_agreement = max_map(&samples, |&(x, t, a, b, k1)| {
        let s1 = ExactSolutionSpec::elliptic_pair(a, b, k1).unwrap();
        let s2 = ExactSolutionSpec::elliptic_plus_linear(a, k1, 0.7, 0.1).unwrap();
        let (u1, _) = eval_case1(x, t, &s1).unwrap();
        let (u2, _) = eval_case2(x, t, &s2).unwrap();
        (u1 - u2).abs()
    });
    let scaling = max_map(&samples, |&(x, t, a, b, k1)| {
        let c = 2.0;
        let base = ExactSolutionSpec::elliptic_pair(a, b, k1).unwrap();
        let scaled = ExactSolutionSpec::elliptic_pair(a / (c * c), b, k1).unwrap();
        let (u, _) = eval_case1(x, t, &base).unwrap();
        let (us, _) = eval_case1(x, t, &scaled).unwrap();
        (us - c * u).abs() / u.abs().max(1.0)
    });

    vec![
        CheckResult::bounded("exact", "residual_analytic", analytic, 1e-8),
        CheckResult::bounded("exact", "residual_finite_difference", fd, 1e-4),
        CheckResult::bounded("exact", "case2_v_residual_exact", case2_v, 1e-14),
        CheckResult::bounded("exact", "case1_case2_u_agreement", u_agreement, 1e-15),
        CheckResult::bounded("exact", "amplitude_scaling", scaling, 1e-12),
    ]
}

fn arbitrary_profiles() -> (Profile, Profile) {
    (
        Profile::new(
            |z| z.sin() + 0.3 * z * z,
            |z| z.cos() + 0.6 * z,
            |z| -z.sin() + 0.6,
        ),
        Profile::new(
            |z| (0.2 * z).cos() + 0.1 * z,
            |z| -0.2 * (0.2 * z).sin() + 0.1,
            |z| -0.04 * (0.2 * z).cos(),
        ),
    )
}

/// Invariant-surface identities over seeded random points.
pub fn verify_symmetry(seed: u64) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0b5e_55ed);
    let mut samples = Vec::with_capacity(1000);
    while samples.len() < 1000 {
        let t: f64 = rng.gen_range(0.05..1.5);
        let x: f64 = rng.gen_range(-2.0..2.0);
        let k1: f64 = rng.gen_range(0.5..2.0);
        if (x + k1).abs() > 0.1 {
            samples.push((t, x, k1));
        }
    }

    let (w1, w2) = arbitrary_profiles();
    let conditional = {
        let w1 = w1.clone();
        let w2 = w2.clone();
        max_map(&samples, move |&(t, x, k1)| {
            let fields = conditional_ansatz(w1.clone(), w2.clone(), k1);
            let op = SymmetryOperator::conditional(k1);
            let (qu, qv) = invariant_surface_residual(&op, &fields, t, x).unwrap();
            qu.abs().max(qv.abs())
        })
    };

    let z_invariance = {
        let h = 1e-6;
        let (alpha, beta, nu) = (1.0, 1.3, 0.7);
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .map(|&(t, x, _)| (t, 0.1 + 0.9 * x.abs().fract()))
            .collect();
        max_map(&pts, move |&(t, x)| {
            let zt =
                (lie_z(t + h, x, alpha, beta, nu).unwrap() - lie_z(t - h, x, alpha, beta, nu).unwrap())
                    / (2.0 * h);
            let zx =
                (lie_z(t, x + h, alpha, beta, nu).unwrap() - lie_z(t, x - h, alpha, beta, nu).unwrap())
                    / (2.0 * h);
            // finite differences are exact for this rational z to ~1e-9
            ((alpha + 2.0 * nu * t) * zt + (beta + nu * x) * zx).abs()
        })
    };

    vec![
        CheckResult::bounded("symmetry", "conditional_invariant_surface", conditional, 1e-10),
        CheckResult::bounded("symmetry", "lie_z_characteristic_invariance", z_invariance, 1e-7),
    ]
}

/// Reduced-equation arbitration plus the reduced-ODE oracle checks.
pub fn verify_reduction(_seed: u64) -> Vec<CheckResult> {
    let w1 = Profile::polynomial(&[0.3, -0.2, 0.05, 0.01]);
    let w2 = Profile::polynomial(&[-0.1, 0.4, -0.03, 0.002]);
    let params = LieReductionParams {
        alpha: 1.0,
        beta: 1.0,
        nu: 1.0,
        lambda: 1.0,
        a: 1.0,
        b: 1.0,
        phi1: 0.5,
        phi2: 1.5,
    };
    let points: Vec<(f64, f64)> = (0..50)
        .map(|i| {
            (
                0.1 + 0.9 * (i as f64 + 0.5) / 50.0,
                0.1 + 0.9 * ((i as f64 * 0.37).fract()),
            )
        })
        .collect();
    let report = reduction_consistency_check(&w1, &w2, &params, &points).unwrap();

    // reduced-ODE oracle: RK4 on the cubic oscillator against sd
    let c = std::f64::consts::FRAC_1_SQRT_2;
    let sys = ReducedSystem::cubic_oscillator(1.0, 0.0);
    let m = Modulus::half_sqrt2();
    let max_err = |h: f64| {
        let traj = integrate_rk4(&sys, [0.0, c, 0.0, 0.0], (0.0, 3.0), h).unwrap();
        traj.z_values
            .iter()
            .zip(&traj.states)
            .map(|(z, y)| (y[0] - c * jacobi_sd(*z, m).unwrap()).abs())
            .fold(0.0_f64, f64::max)
    };
    let rk4_err = max_err(1e-3);
    // order measurement at coarser steps, above the roundoff floor
    let order_ratio = max_err(8e-3) / max_err(4e-3);

    let traj = integrate_rk4(&sys, [0.0, c, 0.0, 0.0], (0.0, 3.0), 1e-3).unwrap();
    let e0 = oscillator_energy(0.0, c, 1.0);
    let drift = traj
        .states
        .iter()
        .map(|y| (oscillator_energy(y[0], y[1], 1.0) - e0).abs() / e0)
        .fold(0.0_f64, f64::max);

    vec![
        CheckResult::bounded(
            "reduction",
            "derived_route_discrepancy",
            report.max_discrepancy,
            1e-8,
        ),
        CheckResult::info(
            "reduction",
            "printed_vs_derived_verdict",
            report.max_printed_discrepancy,
            if report.printed_consistent {
                "printed reduced system consistent with chain-rule derivation".into()
            } else {
                "printed reduced system INCONSISTENT with chain-rule derivation; \
                 derived form attached in reduce output"
                    .into()
            },
        ),
        CheckResult::bounded("reduction", "rk4_vs_elliptic_oracle", rk4_err, 1e-8),
        CheckResult::in_range("reduction", "rk4_halving_ratio", order_ratio, 12.0, 20.0),
        CheckResult::bounded("reduction", "oscillator_energy_drift", drift, 1e-6),
    ]
}

/// Manufactured-solution convergence orders.
pub fn verify_convergence(_seed: u64) -> Vec<CheckResult> {
    let spec = ExactSolutionSpec::elliptic_pair(1.0, -1.0, 1.0).unwrap();
    let rows = convergence_study(
        &spec,
        &[51, 101, 201],
        &|nx| {
            let dx = 1.0 / (nx - 1) as f64;
            0.25 * dx * dx
        },
        (0.1, 0.5),
        Scheme::Imex,
    )
    .unwrap();
    let mut out = Vec::new();
    for row in rows.iter().skip(1) {
        let order = row.observed_order.unwrap();
        out.push(CheckResult::in_range(
            "convergence",
            if row.nx == 101 {
                "observed_order_51_to_101"
            } else {
                "observed_order_101_to_201"
            },
            order,
            1.7,
            2.3,
        ));
    }
    out.push(CheckResult::bounded(
        "convergence",
        "end_error_nx201_regression",
        rows.last().unwrap().max_error,
        5e-3,
    ));
    out
}

/// Every suite, in a fixed order.
pub fn verify_all(seed: u64) -> Vec<CheckResult> {
    let mut out = verify_elliptic(seed);
    out.extend(verify_exact(seed));
    out.extend(verify_symmetry(seed));
    out.extend(verify_reduction(seed));
    out.extend(verify_convergence(seed));
    out
}

/// Plain-text report, one fixed-format line per check. Shared by the
/// CLI and the acceptance tests so determinism can be compared
/// byte-for-byte.
pub fn format_report(results: &[CheckResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = if r.informational {
            "INFO"
        } else if r.pass {
            "PASS"
        } else {
            "FAIL"
        };
        out.push_str(&format!(
            "[{status}] {}/{}: measured = {:e}",
            r.suite, r.name, r.measured
        ));
        if !r.informational {
            out.push_str(&format!(", tolerance = {:e}", r.tolerance));
        }
        if !r.detail.is_empty() {
            out.push_str(&format!(" ({})", r.detail));
        }
        out.push('\n');
    }
    out
}

/// True iff every non-informational check passed.
pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.pass || r.informational)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elliptic_suite_passes() {
        assert!(all_passed(&verify_elliptic(42)));
    }

    #[test]
    fn exact_suite_passes() {
        assert!(all_passed(&verify_exact(42)));
    }

    #[test]
    fn symmetry_suite_passes() {
        assert!(all_passed(&verify_symmetry(42)));
    }

    #[test]
    fn reduction_suite_passes_with_informational_verdict() {
        let results = verify_reduction(42);
        assert!(all_passed(&results));
        let verdict = results
            .iter()
            .find(|r| r.name == "printed_vs_derived_verdict")
            .unwrap();
        assert!(verdict.informational);
    }

    #[test]
    fn suites_deterministic_across_runs() {
        let a = verify_elliptic(42);
        let b = verify_elliptic(42);
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.measured.to_bits(), rb.measured.to_bits());
        }
    }
}
