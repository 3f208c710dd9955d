//! Time stepping: explicit RK4 with a CFL guard, and Crank-Nicolson
//! IMEX (implicit diffusion via a block-tridiagonal solve, explicit
//! reaction).

use super::{
    laplacian_of_combination, BoundaryCondition, FieldState, Grid1D, PdeError, RDSystem, Scheme,
    SimulationParams,
};

const CFL_SAFETY: f64 = 0.9;

/// Advance one step of size dt.
pub fn step(
    state: &FieldState,
    system: &RDSystem,
    grid: &Grid1D,
    bc: &BoundaryCondition,
    dt: f64,
    scheme: Scheme,
) -> Result<FieldState, PdeError> {
    if dt <= 0.0 {
        return Err(PdeError::Config(format!("dt must be positive, got {dt}")));
    }
    let next = match scheme {
        Scheme::ExplicitRk4 => {
            let max_diag = system.max_diag_diffusion();
            if max_diag > 0.0 {
                let limit = CFL_SAFETY * grid.dx() * grid.dx() / (2.0 * max_diag);
                if dt > limit {
                    return Err(PdeError::CflViolation { dt, limit });
                }
            }
            step_rk4(state, system, grid, bc, dt)?
        }
        Scheme::Imex => step_imex(state, system, grid, bc, dt)?,
    };
    if !next.all_finite() {
        return Err(PdeError::BlowUp { t: next.t });
    }
    Ok(next)
}

fn rhs(
    state: &FieldState,
    system: &RDSystem,
    grid: &Grid1D,
    bc: &BoundaryCondition,
) -> (Vec<f64>, Vec<f64>) {
    let (lu, lv) = laplacian_of_combination(state, &system.a, grid, bc);
    let n = grid.nx;
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    for i in 0..n {
        let (f, g) = system.reaction.terms(state.u[i], state.v[i]);
        du[i] = lu[i] + f;
        dv[i] = lv[i] + g;
    }
    (du, dv)
}

fn pin_boundaries(
    state: &mut FieldState,
    grid: &Grid1D,
    bc: &BoundaryCondition,
) -> Result<(), PdeError> {
    if let Some((u, v)) = bc.values(grid.x_min, state.t, true)? {
        state.u[0] = u;
        state.v[0] = v;
    }
    if let Some((u, v)) = bc.values(grid.x_max, state.t, false)? {
        let n = grid.nx - 1;
        state.u[n] = u;
        state.v[n] = v;
    }
    Ok(())
}

fn step_rk4(
    state: &FieldState,
    system: &RDSystem,
    grid: &Grid1D,
    bc: &BoundaryCondition,
    dt: f64,
) -> Result<FieldState, PdeError> {
    let n = grid.nx;
    let stage = |base: &FieldState, k: &(Vec<f64>, Vec<f64>), c: f64, t: f64| FieldState {
        t,
        u: (0..n).map(|i| base.u[i] + c * k.0[i]).collect(),
        v: (0..n).map(|i| base.v[i] + c * k.1[i]).collect(),
    };
    let k1 = rhs(state, system, grid, bc);
    let s2 = stage(state, &k1, 0.5 * dt, state.t + 0.5 * dt);
    let k2 = rhs(&s2, system, grid, bc);
    let s3 = stage(state, &k2, 0.5 * dt, state.t + 0.5 * dt);
    let k3 = rhs(&s3, system, grid, bc);
    let s4 = stage(state, &k3, dt, state.t + dt);
    let k4 = rhs(&s4, system, grid, bc);
    let mut next = FieldState {
        t: state.t + dt,
        u: (0..n)
            .map(|i| state.u[i] + dt / 6.0 * (k1.0[i] + 2.0 * k2.0[i] + 2.0 * k3.0[i] + k4.0[i]))
            .collect(),
        v: (0..n)
            .map(|i| state.v[i] + dt / 6.0 * (k1.1[i] + 2.0 * k2.1[i] + 2.0 * k3.1[i] + k4.1[i]))
            .collect(),
    };
    pin_boundaries(&mut next, grid, bc)?;
    Ok(next)
}

/// One 2x2 block of the tridiagonal system.
type Block = [[f64; 2]; 2];

fn block_mul(a: &Block, x: [f64; 2]) -> [f64; 2] {
    [
        a[0][0] * x[0] + a[0][1] * x[1],
        a[1][0] * x[0] + a[1][1] * x[1],
    ]
}

fn block_mat_mul(a: &Block, b: &Block) -> Block {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn block_inv(a: &Block) -> Block {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let inv = 1.0 / det;
    [
        [a[1][1] * inv, -a[0][1] * inv],
        [-a[1][0] * inv, a[0][0] * inv],
    ]
}

fn block_sub(a: &Block, b: &Block) -> Block {
    [
        [a[0][0] - b[0][0], a[0][1] - b[0][1]],
        [a[1][0] - b[1][0], a[1][1] - b[1][1]],
    ]
}

/// Thomas elimination for a block-tridiagonal system with 2x2 blocks.
fn block_thomas(
    sub: &[Block],
    diag: &[Block],
    sup: &[Block],
    rhs: &[[f64; 2]],
) -> Vec<[f64; 2]> {
    let n = diag.len();
    let mut c_prime: Vec<Block> = Vec::with_capacity(n);
    let mut d_prime: Vec<[f64; 2]> = Vec::with_capacity(n);
    let inv0 = block_inv(&diag[0]);
    c_prime.push(block_mat_mul(&inv0, &sup[0]));
    d_prime.push(block_mul(&inv0, rhs[0]));
    for i in 1..n {
        let denom = block_sub(&diag[i], &block_mat_mul(&sub[i - 1], &c_prime[i - 1]));
        let inv = block_inv(&denom);
        if i < n - 1 {
            c_prime.push(block_mat_mul(&inv, &sup[i]));
        } else {
            c_prime.push([[0.0; 2]; 2]);
        }
        let adj = block_mul(&sub[i - 1], d_prime[i - 1]);
        d_prime.push(block_mul(&inv, [rhs[i][0] - adj[0], rhs[i][1] - adj[1]]));
    }
    let mut x = vec![[0.0; 2]; n];
    x[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        let corr = block_mul(&c_prime[i], x[i + 1]);
        x[i] = [d_prime[i][0] - corr[0], d_prime[i][1] - corr[1]];
    }
    x
}

/// Crank-Nicolson on the diffusion of the combination A w, explicit
/// reaction:
///   (I - r A d2) w^{n+1} = w^n + (dt/2) L(A w^n) + dt R(w^n),
/// with r = dt / (2 dx^2). Prescribed-value boundaries become identity
/// rows evaluated at t^{n+1}.
fn step_imex(
    state: &FieldState,
    system: &RDSystem,
    grid: &Grid1D,
    bc: &BoundaryCondition,
    dt: f64,
) -> Result<FieldState, PdeError> {
    let n = grid.nx;
    let t_next = state.t + dt;
    let r = dt / (2.0 * grid.dx() * grid.dx());
    let a = &system.a;
    let ra: Block = [
        [r * a[0][0], r * a[0][1]],
        [r * a[1][0], r * a[1][1]],
    ];
    let identity: Block = [[1.0, 0.0], [0.0, 1.0]];

    let (lu, lv) = laplacian_of_combination(state, a, grid, bc);
    let mut rhs_vec: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let (f, g) = system.reaction.terms(state.u[i], state.v[i]);
            [
                state.u[i] + 0.5 * dt * lu[i] + dt * f,
                state.v[i] + 0.5 * dt * lv[i] + dt * g,
            ]
        })
        .collect();

    let two_ra: Block = [
        [2.0 * ra[0][0], 2.0 * ra[0][1]],
        [2.0 * ra[1][0], 2.0 * ra[1][1]],
    ];
    let neg_ra: Block = [
        [-ra[0][0], -ra[0][1]],
        [-ra[1][0], -ra[1][1]],
    ];
    let diag_interior: Block = [
        [identity[0][0] + two_ra[0][0], two_ra[0][1]],
        [two_ra[1][0], identity[1][1] + two_ra[1][1]],
    ];

    let mut sub = vec![neg_ra; n - 1];
    let mut sup = vec![neg_ra; n - 1];
    let mut diag = vec![diag_interior; n];

    match bc {
        BoundaryCondition::NeumannZero => {
            // reflected ghost folds the off-diagonal weight inward
            let neg_2ra: Block = [
                [-two_ra[0][0], -two_ra[0][1]],
                [-two_ra[1][0], -two_ra[1][1]],
            ];
            sup[0] = neg_2ra;
            sub[n - 2] = neg_2ra;
        }
        BoundaryCondition::Dirichlet { .. } | BoundaryCondition::Exact(_) => {
            diag[0] = identity;
            sup[0] = [[0.0; 2]; 2];
            diag[n - 1] = identity;
            sub[n - 2] = [[0.0; 2]; 2];
            if let Some((u, v)) = bc.values(grid.x_min, t_next, true)? {
                rhs_vec[0] = [u, v];
            }
            if let Some((u, v)) = bc.values(grid.x_max, t_next, false)? {
                rhs_vec[n - 1] = [u, v];
            }
        }
    }

    let sol = block_thomas(&sub, &diag, &sup, &rhs_vec);
    Ok(FieldState {
        t: t_next,
        u: sol.iter().map(|w| w[0]).collect(),
        v: sol.iter().map(|w| w[1]).collect(),
    })
}

/// Result of a run that is allowed to blow up: the snapshots collected
/// before the failure, and the blow-up time if one occurred.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub snapshots: Vec<FieldState>,
    pub blow_up: Option<f64>,
}

/// Run a full simulation, collecting snapshots every
/// `snapshot_stride` steps plus the initial and final states. A
/// blow-up ends the run early but still returns the earlier snapshots;
/// configuration problems remain hard errors.
pub fn simulate_collect(params: &SimulationParams) -> Result<SimulationOutcome, PdeError> {
    if params.t_end < params.t0 {
        return Err(PdeError::Config(format!(
            "t_end = {} precedes t0 = {}",
            params.t_end, params.t0
        )));
    }
    if params.snapshot_stride == 0 {
        return Err(PdeError::Config("snapshot_stride must be >= 1".into()));
    }
    let mut state = params.ic.build(&params.grid, params.t0)?;
    pin_boundaries(&mut state, &params.grid, &params.bc)?;
    let mut snapshots = vec![state.clone()];
    if params.t_end == params.t0 {
        return Ok(SimulationOutcome {
            snapshots,
            blow_up: None,
        });
    }
    let n_steps = ((params.t_end - params.t0) / params.dt).round().max(1.0) as usize;
    for istep in 1..=n_steps {
        state = match step(
            &state,
            &params.system,
            &params.grid,
            &params.bc,
            params.dt,
            params.scheme,
        ) {
            Ok(next) => next,
            Err(PdeError::BlowUp { .. }) => {
                return Ok(SimulationOutcome {
                    snapshots,
                    blow_up: Some(params.t0 + istep as f64 * params.dt),
                })
            }
            Err(other) => return Err(other),
        };
        // keep snapshot times exact multiples of stride * dt
        state.t = params.t0 + istep as f64 * params.dt;
        if istep % params.snapshot_stride == 0 || istep == n_steps {
            snapshots.push(state.clone());
        }
    }
    Ok(SimulationOutcome {
        snapshots,
        blow_up: None,
    })
}

/// As `simulate_collect`, but a blow-up is returned as a hard error.
pub fn simulate(params: &SimulationParams) -> Result<Vec<FieldState>, PdeError> {
    let outcome = simulate_collect(params)?;
    match outcome.blow_up {
        Some(t) => Err(PdeError::BlowUp { t }),
        None => Ok(outcome.snapshots),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ExactSolutionSpec;
    use crate::pde::{InitialCondition, Reaction};
    use std::sync::Arc;

    fn diffusion_only(a: [[f64; 2]; 2]) -> RDSystem {
        RDSystem {
            a,
            reaction: Reaction::Cubic {
                phi1: 0.0,
                phi2: 0.0,
            },
        }
    }

    #[test]
    fn equilibrium_is_fixed_point() {
        let grid = Grid1D::new(0.0, 1.0, 21).unwrap();
        let sys = diffusion_only([[1.0, 0.0], [0.0, 1.0]]);
        let c: super::super::BcFn = Arc::new(|_| 2.0);
        let bc = BoundaryCondition::Dirichlet {
            u_left: c.clone(),
            u_right: c.clone(),
            v_left: c.clone(),
            v_right: c,
        };
        let state = FieldState {
            t: 0.0,
            u: vec![2.0; 21],
            v: vec![2.0; 21],
        };
        for scheme in [Scheme::ExplicitRk4, Scheme::Imex] {
            let dt = match scheme {
                Scheme::ExplicitRk4 => 1e-4,
                Scheme::Imex => 1e-2,
            };
            let next = step(&state, &sys, &grid, &bc, dt, scheme).unwrap();
            for i in 0..21 {
                assert!((next.u[i] - 2.0).abs() < 1e-12);
                assert!((next.v[i] - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cfl_violation_detected() {
        let grid = Grid1D::new(0.0, 1.0, 101).unwrap();
        let sys = diffusion_only([[1.0, 0.0], [0.0, 1.0]]);
        let state = FieldState {
            t: 0.0,
            u: vec![0.0; 101],
            v: vec![0.0; 101],
        };
        let err = step(
            &state,
            &sys,
            &grid,
            &BoundaryCondition::NeumannZero,
            1e-2,
            Scheme::ExplicitRk4,
        )
        .unwrap_err();
        assert!(matches!(err, PdeError::CflViolation { .. }));
    }

    #[test]
    fn zero_diffusion_skips_cfl() {
        // reaction-only system must accept any dt explicitly
        let grid = Grid1D::new(0.0, 1.0, 51).unwrap();
        let sys = RDSystem::exp_coupled(0.0, 0.0, 1.0, 1.0, 0.1, 0.0);
        let state = FieldState {
            t: 0.0,
            u: vec![1.0; 51],
            v: vec![1.0; 51],
        };
        let next = step(
            &state,
            &sys,
            &grid,
            &BoundaryCondition::NeumannZero,
            1e-2,
            Scheme::ExplicitRk4,
        )
        .unwrap();
        assert!(next.all_finite());
    }

    #[test]
    fn heat_mode_decay() {
        // pure diffusion, sin(pi x) initial data, Dirichlet 0:
        // U(t) = exp(-pi^2 t) sin(pi x)
        let grid = Grid1D::new(0.0, 1.0, 101).unwrap();
        let params = SimulationParams {
            system: diffusion_only([[1.0, 0.0], [0.0, 1.0]]),
            grid,
            bc: BoundaryCondition::dirichlet_zero(),
            ic: InitialCondition::Table {
                u: grid
                    .xs()
                    .iter()
                    .map(|x| (std::f64::consts::PI * x).sin())
                    .collect(),
                v: vec![0.0; 101],
            },
            t0: 0.0,
            t_end: 0.1,
            dt: 1e-4,
            snapshot_stride: 1000,
            scheme: Scheme::Imex,
        };
        let snaps = simulate(&params).unwrap();
        let last = snaps.last().unwrap();
        let pi = std::f64::consts::PI;
        let decay = (-pi * pi * 0.1).exp();
        let err = (0..101)
            .map(|i| (last.u[i] - decay * (pi * grid.x(i)).sin()).abs())
            .fold(0.0_f64, f64::max);
        assert!(err < 1e-4, "max error = {err}");
    }

    #[test]
    fn neumann_conserves_combination_integral() {
        // flux form: the discrete integral of a11 U + a12 V is
        // conserved per step under zero-flux boundaries
        let grid = Grid1D::new(0.0, 1.0, 41).unwrap();
        let a = [[1.0, 0.4], [0.2, 2.0]];
        let sys = diffusion_only(a);
        let mut state = FieldState {
            t: 0.0,
            u: grid.xs().iter().map(|x| (3.0 * x).cos() + x * x).collect(),
            v: grid.xs().iter().map(|x| x.sin()).collect(),
        };
        // trapezoid weights: boundary nodes carry half weight
        let integral = |s: &FieldState| {
            let w = |i: usize| a[0][0] * s.u[i] + a[0][1] * s.v[i];
            let mut acc = 0.5 * (w(0) + w(40));
            for i in 1..40 {
                acc += w(i);
            }
            acc * grid.dx()
        };
        let before = integral(&state);
        for _ in 0..100 {
            state = step(
                &state,
                &sys,
                &grid,
                &BoundaryCondition::NeumannZero,
                1e-3,
                Scheme::Imex,
            )
            .unwrap();
            let now = integral(&state);
            assert!((now - before).abs() < 1e-10, "drift = {}", now - before);
        }
    }

    #[test]
    fn imex_unconditionally_stable_without_reaction() {
        let grid = Grid1D::new(0.0, 1.0, 51).unwrap();
        let sys = diffusion_only([[1.0, 0.0], [0.0, 1.0]]);
        let dx2 = grid.dx() * grid.dx();
        let mut state = FieldState {
            t: 0.0,
            u: grid.xs().iter().map(|x| (13.0 * x).sin()).collect(),
            v: vec![0.0; 51],
        };
        for _ in 0..20 {
            state = step(
                &state,
                &sys,
                &grid,
                &BoundaryCondition::NeumannZero,
                100.0 * dx2,
                Scheme::Imex,
            )
            .unwrap();
            assert!(state.all_finite());
        }
    }

    #[test]
    fn manufactured_solution_error_bound() {
        // exact IC/BC from the elliptic-pair solution over the
        // pole-free window; regression bound for nx = 201
        let spec = ExactSolutionSpec::elliptic_pair(1.0, -1.0, 1.0).unwrap();
        let grid = Grid1D::new(0.0, 1.0, 201).unwrap();
        let params = SimulationParams {
            system: RDSystem::cubic(1.0, -1.0),
            grid,
            bc: BoundaryCondition::Exact(spec),
            ic: InitialCondition::Exact(spec),
            t0: 0.1,
            t_end: 0.5,
            dt: 1e-4,
            snapshot_stride: 4000,
            scheme: Scheme::Imex,
        };
        let snaps = simulate(&params).unwrap();
        let last = snaps.last().unwrap();
        let mut err: f64 = 0.0;
        for i in 0..grid.nx {
            let (ue, ve) = crate::exact::eval(grid.x(i), last.t, &spec).unwrap();
            err = err.max((last.u[i] - ue).abs()).max((last.v[i] - ve).abs());
        }
        assert!(err < 5e-3, "max error = {err}");
    }

    #[test]
    fn zero_length_span_returns_ic() {
        let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
        let params = SimulationParams {
            system: RDSystem::cubic(0.0, 0.0),
            grid,
            bc: BoundaryCondition::NeumannZero,
            ic: InitialCondition::Constant { u: 1.0, v: 0.5 },
            t0: 0.3,
            t_end: 0.3,
            dt: 1e-3,
            snapshot_stride: 10,
            scheme: Scheme::Imex,
        };
        let snaps = simulate(&params).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].u, vec![1.0; 11]);
    }

    #[test]
    fn paper_parameter_run_reports_blow_up_or_completes() {
        let grid = Grid1D::new(0.0, 1.0, 51).unwrap();
        let params = SimulationParams {
            system: RDSystem::exp_coupled(0.0, 1.0, 5.73, -11.47, 0.5, 1.5),
            grid,
            bc: BoundaryCondition::NeumannZero,
            ic: InitialCondition::Constant { u: 1.0, v: 0.5 },
            t0: 0.0,
            t_end: 2.0,
            dt: 1e-4,
            snapshot_stride: 2000,
            scheme: Scheme::Imex,
        };
        match simulate(&params) {
            Ok(snaps) => assert!(snaps.iter().all(|s| s.all_finite())),
            Err(PdeError::BlowUp { t }) => assert!(t > 0.0 && t <= 2.0),
            Err(e) => panic!("unexpected error: {e}"),
        }
    }
}
