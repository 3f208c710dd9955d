//! Manufactured-solution convergence studies: run the solver with
//! exact initial/boundary data and measure the spatial order against
//! the closed form.

use super::{
    simulate, BoundaryCondition, Grid1D, InitialCondition, PdeError, RDSystem, Scheme,
    SimulationParams,
};
use crate::exact::{self, CaseTag, ExactSolutionSpec};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub dt: f64,
    pub max_error: f64,
    /// log2(err(nx) / err(2 nx - 1)), attached to the finer row.
    pub observed_order: Option<f64>,
}

/// Run the manufactured-solution study over the given grid sizes with
/// dt chosen by `dt_rule`. The verification window defaults to the
/// pole-free rectangle x in [0, 1], t in [0.1, 0.5].
pub fn convergence_study(
    spec: &ExactSolutionSpec,
    grids: &[usize],
    dt_rule: &(dyn Fn(usize) -> f64 + Sync),
    t_span: (f64, f64),
    scheme: Scheme,
) -> Result<Vec<ConvergenceRow>, PdeError> {
    if grids.len() < 2 {
        return Err(PdeError::Config(
            "convergence study needs at least two grid sizes".into(),
        ));
    }
    let run_one = |&nx: &usize| -> Result<(usize, f64, f64), PdeError> {
        let grid = Grid1D::new(0.0, 1.0, nx)?;
        let dt = dt_rule(nx);
        let phi2 = match spec.case_tag {
            CaseTag::EllipticPair => spec.b,
            CaseTag::EllipticPlusLinear => 0.0,
        };
        let params = SimulationParams {
            system: RDSystem::cubic(spec.a, phi2),
            grid,
            bc: BoundaryCondition::Exact(*spec),
            ic: InitialCondition::Exact(*spec),
            t0: t_span.0,
            t_end: t_span.1,
            dt,
            snapshot_stride: usize::MAX,
            scheme,
        };
        let snaps = simulate(&params)?;
        let last = snaps.last().expect("simulate returns at least the IC");
        let mut err: f64 = 0.0;
        for i in 0..grid.nx {
            let (ue, ve) = exact::eval(grid.x(i), last.t, spec)?;
            err = err.max((last.u[i] - ue).abs()).max((last.v[i] - ve).abs());
        }
        Ok((nx, dt, err))
    };

    #[cfg(feature = "parallel")]
    let runs: Result<Vec<_>, PdeError> = grids.par_iter().map(run_one).collect();
    #[cfg(not(feature = "parallel"))]
    let runs: Result<Vec<_>, PdeError> = grids.iter().map(run_one).collect();
    let runs = runs?;

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(runs.len());
    for (idx, &(nx, dt, max_error)) in runs.iter().enumerate() {
        let observed_order = if idx > 0 {
            Some((runs[idx - 1].2 / max_error).log2())
        } else {
            None
        };
        rows.push(ConvergenceRow {
            nx,
            dt,
            max_error,
            observed_order,
        });
    }
    Ok(rows)
}
