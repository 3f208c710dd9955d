//! Method-of-lines solver for the coupled reaction-diffusion system
//! on a 1-D interval: flux-form central stencil, explicit RK4 and
//! Crank-Nicolson IMEX stepping, and manufactured-solution convergence
//! studies against the closed-form solutions.

mod convergence;
mod stepper;

pub use convergence::{convergence_study, ConvergenceRow};
pub use stepper::{simulate, simulate_collect, step, SimulationOutcome};

use crate::exact::{self, ExactError, ExactSolutionSpec};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdeError {
    #[error("cfl-violation: dt = {dt} exceeds the explicit limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("blow-up: non-finite state at t = {t}")]
    BlowUp { t: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Uniform 1-D grid with nx nodes including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self, PdeError> {
        if nx < 3 {
            return Err(PdeError::Config(format!("nx must be >= 3, got {nx}")));
        }
        if x_min >= x_max {
            return Err(PdeError::Config(format!(
                "require x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, nx })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Discretized (U, V) fields at one time instant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl FieldState {
    pub fn all_finite(&self) -> bool {
        self.u.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

pub type BcFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ReactFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryCondition {
    /// Prescribed values per field per side, as functions of t.
    Dirichlet {
        u_left: BcFn,
        u_right: BcFn,
        v_left: BcFn,
        v_right: BcFn,
    },
    /// Zero-flux: reflected ghost nodes.
    NeumannZero,
    /// Dirichlet data taken from a closed-form solution.
    Exact(ExactSolutionSpec),
}

impl BoundaryCondition {
    pub fn dirichlet_zero() -> Self {
        let z: BcFn = Arc::new(|_| 0.0);
        BoundaryCondition::Dirichlet {
            u_left: z.clone(),
            u_right: z.clone(),
            v_left: z.clone(),
            v_right: z,
        }
    }

    /// Boundary values (U, V) at position x and time t, if prescribed.
    pub(crate) fn values(&self, x: f64, t: f64, left: bool) -> Result<Option<(f64, f64)>, PdeError> {
        match self {
            BoundaryCondition::Dirichlet {
                u_left,
                u_right,
                v_left,
                v_right,
            } => Ok(Some(if left {
                (u_left(t), v_left(t))
            } else {
                (u_right(t), v_right(t))
            })),
            BoundaryCondition::NeumannZero => Ok(None),
            BoundaryCondition::Exact(spec) => Ok(Some(exact::eval(x, t, spec)?)),
        }
    }
}

/// Reaction terms (F, G) of the coupled system.
#[derive(Clone)]
pub enum Reaction {
    General { f: ReactFn, g: ReactFn },
    /// F = exp(l1 (U-V)) phi1 U, G = exp(l2 (U-V)) (phi1 V + phi2).
    ExpCoupled {
        lambda1: f64,
        lambda2: f64,
        phi1: f64,
        phi2: f64,
    },
    /// F = phi1 U^3, G = phi2 V^3.
    Cubic { phi1: f64, phi2: f64 },
}

impl Reaction {
    pub fn terms(&self, u: f64, v: f64) -> (f64, f64) {
        match self {
            Reaction::General { f, g } => (f(u, v), g(u, v)),
            Reaction::ExpCoupled {
                lambda1,
                lambda2,
                phi1,
                phi2,
            } => (
                (lambda1 * (u - v)).exp() * phi1 * u,
                (lambda2 * (u - v)).exp() * (phi1 * v + phi2),
            ),
            Reaction::Cubic { phi1, phi2 } => (phi1 * u * u * u, phi2 * v * v * v),
        }
    }
}

/// The PDE system: diffusion coupling matrix and reaction terms.
#[derive(Clone)]
pub struct RDSystem {
    /// [[a11, a12], [a21, a22]]; the stencil acts on a11 U + a12 V and
    /// a21 U + a22 V (flux form).
    pub a: [[f64; 2]; 2],
    pub reaction: Reaction,
}

impl RDSystem {
    pub fn general(a: [[f64; 2]; 2], f: ReactFn, g: ReactFn) -> Self {
        Self {
            a,
            reaction: Reaction::General { f, g },
        }
    }

    pub fn exp_coupled(a: f64, b: f64, lambda1: f64, lambda2: f64, phi1: f64, phi2: f64) -> Self {
        Self {
            a: [[a, 0.0], [0.0, b]],
            reaction: Reaction::ExpCoupled {
                lambda1,
                lambda2,
                phi1,
                phi2,
            },
        }
    }

    pub fn cubic(phi1: f64, phi2: f64) -> Self {
        Self {
            a: [[1.0, 0.0], [0.0, 1.0]],
            reaction: Reaction::Cubic { phi1, phi2 },
        }
    }

    /// Standard determinant a11 a22 - a12 a21.
    pub fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    /// The nondegeneracy combination a11 a12 - a21 a22 as stated in the
    /// source material; kept only so callers can compare it against the
    /// standard determinant and warn on disagreement.
    pub fn stated_nondegeneracy(&self) -> f64 {
        self.a[0][0] * self.a[0][1] - self.a[1][0] * self.a[1][1]
    }

    pub fn max_diag_diffusion(&self) -> f64 {
        self.a[0][0].abs().max(self.a[1][1].abs())
    }
}

/// Second difference of the combinations a11 U + a12 V and
/// a21 U + a22 V. Boundary entries use reflected ghosts for
/// NeumannZero and are zero for prescribed-value boundaries (those
/// nodes are pinned by the stepper).
pub fn laplacian_of_combination(
    state: &FieldState,
    a: &[[f64; 2]; 2],
    grid: &Grid1D,
    bc: &BoundaryCondition,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.nx;
    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    let p: Vec<f64> = (0..n)
        .map(|i| a[0][0] * state.u[i] + a[0][1] * state.v[i])
        .collect();
    let q: Vec<f64> = (0..n)
        .map(|i| a[1][0] * state.u[i] + a[1][1] * state.v[i])
        .collect();
    let second = |w: &[f64]| {
        let mut l = vec![0.0; n];
        for i in 1..n - 1 {
            l[i] = (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_dx2;
        }
        if matches!(bc, BoundaryCondition::NeumannZero) {
            l[0] = 2.0 * (w[1] - w[0]) * inv_dx2;
            l[n - 1] = 2.0 * (w[n - 2] - w[n - 1]) * inv_dx2;
        }
        l
    };
    (second(&p), second(&q))
}

/// Initial data selection.
#[derive(Clone)]
pub enum InitialCondition {
    Constant { u: f64, v: f64 },
    Exact(ExactSolutionSpec),
    Table { u: Vec<f64>, v: Vec<f64> },
}

impl InitialCondition {
    pub fn build(&self, grid: &Grid1D, t0: f64) -> Result<FieldState, PdeError> {
        match self {
            InitialCondition::Constant { u, v } => Ok(FieldState {
                t: t0,
                u: vec![*u; grid.nx],
                v: vec![*v; grid.nx],
            }),
            InitialCondition::Exact(spec) => {
                let mut u = Vec::with_capacity(grid.nx);
                let mut v = Vec::with_capacity(grid.nx);
                for i in 0..grid.nx {
                    let (ui, vi) = exact::eval(grid.x(i), t0, spec)?;
                    u.push(ui);
                    v.push(vi);
                }
                Ok(FieldState { t: t0, u, v })
            }
            InitialCondition::Table { u, v } => {
                if u.len() != grid.nx || v.len() != grid.nx {
                    return Err(PdeError::Config(format!(
                        "table length {} / {} does not match nx = {}",
                        u.len(),
                        v.len(),
                        grid.nx
                    )));
                }
                Ok(FieldState {
                    t: t0,
                    u: u.clone(),
                    v: v.clone(),
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ExplicitRk4,
    Imex,
}

/// A full simulation setup at the solver level.
#[derive(Clone)]
pub struct SimulationParams {
    pub system: RDSystem,
    pub grid: Grid1D,
    pub bc: BoundaryCondition,
    pub ic: InitialCondition,
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Keep every `snapshot_stride`-th step (plus initial and final).
    pub snapshot_stride: usize,
    pub scheme: Scheme,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid1D::new(1.0, 0.0, 11).is_err());
        let g = Grid1D::new(0.0, 1.0, 11).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.x(10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
        let state = FieldState {
            t: 0.0,
            u: vec![3.0; 11],
            v: vec![-2.0; 11],
        };
        let a = [[1.0, 0.5], [0.25, 2.0]];
        let (lu, lv) = laplacian_of_combination(&state, &a, &grid, &BoundaryCondition::NeumannZero);
        assert!(lu.iter().all(|x| x.abs() < 1e-10));
        assert!(lv.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn laplacian_exact_on_quadratics() {
        let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
        let u: Vec<f64> = grid.xs().iter().map(|x| x * x).collect();
        let state = FieldState {
            t: 0.0,
            u,
            v: vec![0.0; 11],
        };
        let a = [[1.0, 0.0], [0.0, 1.0]];
        let (lu, _) = laplacian_of_combination(
            &state,
            &a,
            &grid,
            &BoundaryCondition::dirichlet_zero(),
        );
        for i in 1..10 {
            assert!((lu[i] - 2.0).abs() < 1e-12, "node {i}: {}", lu[i]);
        }
    }

    #[test]
    fn laplacian_second_order_convergence() {
        let a = [[1.0, 0.0], [0.0, 1.0]];
        let err_for = |nx: usize| {
            let grid = Grid1D::new(0.0, 1.0, nx).unwrap();
            let u: Vec<f64> = grid
                .xs()
                .iter()
                .map(|x| (std::f64::consts::PI * x).sin())
                .collect();
            let state = FieldState {
                t: 0.0,
                u,
                v: vec![0.0; nx],
            };
            let (lu, _) =
                laplacian_of_combination(&state, &a, &grid, &BoundaryCondition::dirichlet_zero());
            let pi2 = std::f64::consts::PI * std::f64::consts::PI;
            (1..nx - 1)
                .map(|i| (lu[i] + pi2 * (std::f64::consts::PI * grid.x(i)).sin()).abs())
                .fold(0.0_f64, f64::max)
        };
        let ratio = err_for(51) / err_for(101);
        assert!((3.5..=4.5).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn nondegeneracy_conventions_differ() {
        let sys = RDSystem::exp_coupled(0.0, 1.0, 5.73, -11.47, 0.5, 1.5);
        // standard determinant vanishes for a = 0, diagonal coupling
        assert_eq!(sys.det(), 0.0);
        assert_eq!(sys.stated_nondegeneracy(), 0.0);
        let g = RDSystem {
            a: [[1.0, 2.0], [3.0, 4.0]],
            reaction: Reaction::Cubic {
                phi1: 0.0,
                phi2: 0.0,
            },
        };
        assert_eq!(g.det(), -2.0);
        assert_eq!(g.stated_nondegeneracy(), -10.0);
    }

    #[test]
    fn ic_table_length_checked() {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let ic = InitialCondition::Table {
            u: vec![0.0; 4],
            v: vec![0.0; 5],
        };
        assert!(ic.build(&grid, 0.0).is_err());
    }
}
