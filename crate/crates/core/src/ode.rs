//! Fixed-step RK4 integration of the reduced ODE systems, with the
//! first-integral diagnostic for the cubic oscillator pair.

use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("rhs-nonfinite: right-hand side not finite at z = {z}")]
    RhsNonFinite { z: f64 },
    #[error("invalid step: h = {0} must be positive")]
    InvalidStep(f64),
    #[error("empty span: z0 = {0}, z1 = {1}")]
    EmptySpan(f64, f64),
}

/// Which reduced system a `ReducedSystem` encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemLabel {
    /// The dilatation-reduced system exactly as printed.
    DilatationPrinted,
    /// The chain-rule-derived counterpart (gauge-fixed in time).
    DilatationDerived,
    /// The cubic oscillator pair from the conditional reduction.
    CubicOscillator,
}

pub type RhsFn = Arc<dyn Fn(f64, &[f64; 4]) -> [f64; 4] + Send + Sync>;

/// A first-order system y' = f(z, y) of dimension 4, in the state
/// ordering (w1, w1', w2, w2').
#[derive(Clone)]
pub struct ReducedSystem {
    pub label: SystemLabel,
    pub rhs: RhsFn,
}

/// Parameters shared by the dilatation-reduced systems.
#[derive(Debug, Clone, Copy)]
pub struct DilatationParams {
    pub nu: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Time gauge for the derived variant: T = 2 nu t_gauge + alpha.
    pub alpha: f64,
    pub t_gauge: f64,
}

impl ReducedSystem {
    /// Cubic oscillator pair: w1'' = -phi1 w1^3, w2'' = -phi2 w2^3.
    pub fn cubic_oscillator(phi1: f64, phi2: f64) -> Self {
        Self {
            label: SystemLabel::CubicOscillator,
            rhs: Arc::new(move |_, y| {
                [
                    y[1],
                    -phi1 * y[0] * y[0] * y[0],
                    y[3],
                    -phi2 * y[2] * y[2] * y[2],
                ]
            }),
        }
    }

    /// The printed reduced system solved for the second derivatives.
    /// Needs nu, a, b, z all nonzero; blow-ups surface as rhs-nonfinite
    /// during integration.
    pub fn dilatation_printed(p: DilatationParams) -> Self {
        Self {
            label: SystemLabel::DilatationPrinted,
            rhs: Arc::new(move |z, y| {
                let nu = p.nu;
                let e = (p.lambda * (y[0] - y[2])).exp();
                let w1pp = -(2.0 * nu * z * z * y[1]
                    + 4.0 * nu * nu * z * y[1]
                    + 2.0 * e * p.phi1 * y[0])
                    / (8.0 * nu * nu * p.a * z * z);
                let w2pp = -(nu * z * z * y[3]
                    + nu * nu * p.b / p.lambda
                    + 2.0 * nu * nu * p.b * z * y[3]
                    + e * (p.phi1 * y[2] + p.phi2))
                    / (4.0 * nu * nu * p.b * z * z);
                [y[1], w1pp, y[3], w2pp]
            }),
        }
    }

    /// The chain-rule-derived reduced system, gauge-fixed at
    /// t = t_gauge so T = 2 nu t_gauge + alpha is a constant and the
    /// exponential factor s^2 = z T / 2 closes in z.
    pub fn dilatation_derived(p: DilatationParams) -> Self {
        Self {
            label: SystemLabel::DilatationDerived,
            rhs: Arc::new(move |z, y| {
                let nu = p.nu;
                let big_t = 2.0 * nu * p.t_gauge + p.alpha;
                let zt2 = z * big_t * (z * big_t);
                let s2 = 0.5 * z * big_t;
                let e = (p.lambda * (y[0] - y[2])).exp();
                let w1pp = -(2.0 * nu * z * z * y[1]
                    + 4.0 * p.a * nu * nu * z * y[1]
                    + 0.5 * zt2 * e * p.phi1 * y[0])
                    / (8.0 * p.a * nu * nu * z * z);
                let v_full = -(2.0 / p.lambda) * (0.5 * s2.ln()) + y[2];
                let w2pp = -(nu * z * z * y[3]
                    + 2.0 * p.b * nu * nu / p.lambda
                    + 2.0 * p.b * nu * nu * z * y[3]
                    + 0.25 * zt2 * e * (p.phi1 * v_full + p.phi2))
                    / (4.0 * p.b * nu * nu * z * z);
                [y[1], w1pp, y[3], w2pp]
            }),
        }
    }
}

/// Integration output: strictly monotone z values and the state rows.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub z_values: Vec<f64>,
    pub states: Vec<[f64; 4]>,
}

impl Trajectory {
    pub fn last(&self) -> &[f64; 4] {
        self.states.last().expect("trajectory is never empty")
    }
}

/// Classical fixed-step RK4 over `z_span` with step `h`; the final
/// partial step is shortened to land exactly on the span end.
pub fn integrate_rk4(
    system: &ReducedSystem,
    y0: [f64; 4],
    z_span: (f64, f64),
    h: f64,
) -> Result<Trajectory, OdeError> {
    if h <= 0.0 {
        return Err(OdeError::InvalidStep(h));
    }
    let (z0, z1) = z_span;
    if z1 <= z0 {
        return Err(OdeError::EmptySpan(z0, z1));
    }
    let rhs = &system.rhs;
    let mut z = z0;
    let mut y = y0;
    let mut z_values = vec![z0];
    let mut states = vec![y0];
    while z < z1 - 1e-12 * (1.0 + z1.abs()) {
        let step = h.min(z1 - z);
        let k1 = rhs(z, &y);
        let yk = add_scaled(&y, &k1, 0.5 * step);
        let k2 = rhs(z + 0.5 * step, &yk);
        let yk = add_scaled(&y, &k2, 0.5 * step);
        let k3 = rhs(z + 0.5 * step, &yk);
        let yk = add_scaled(&y, &k3, step);
        let k4 = rhs(z + step, &yk);
        for i in 0..4 {
            y[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        z += step;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::RhsNonFinite { z });
        }
        z_values.push(z);
        states.push(y);
    }
    Ok(Trajectory { z_values, states })
}

/// First integral of the cubic oscillator:
/// E = w'^2 / 2 + phi w^4 / 4, constant along exact trajectories.
pub fn oscillator_energy(omega: f64, omega_dot: f64, phi: f64) -> f64 {
    0.5 * omega_dot * omega_dot + 0.25 * phi * omega.powi(4)
}

fn add_scaled(y: &[f64; 4], k: &[f64; 4], c: f64) -> [f64; 4] {
    [
        y[0] + c * k[0],
        y[1] + c * k[1],
        y[2] + c * k[2],
        y[3] + c * k[3],
    ]
}
