//! One function per subcommand. Each reads a flat config (where it
//! needs one), drives the core library, and writes deterministic CSV
//! (17 significant digits) plus optional SVG plots into the output
//! directory.

use std::path::{Path, PathBuf};

use rdsym_core::exact::{eval, singular_times, CaseTag, ExactSolutionSpec};
use rdsym_core::ode::{
    integrate_rk4, oscillator_energy, DilatationParams, ReducedSystem, SystemLabel,
};
use rdsym_core::pde::{
    convergence_study, simulate_collect, BoundaryCondition, Grid1D, InitialCondition, PdeError,
    RDSystem,
    Scheme, SimulationParams,
};
use rdsym_core::symmetry::{reduction_consistency_check, LieReductionParams, Profile};
use rdsym_core::verify::{
    all_passed, format_report, verify_all, verify_convergence, verify_elliptic, verify_exact,
    verify_reduction, verify_symmetry, CheckResult,
};

use crate::config::Config;
use crate::plot::write_field_plot;
use crate::CliError;

/// 17 significant digits, the shortest round-trip-safe width for f64.
fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn from_pde_error(e: PdeError) -> CliError {
    match e {
        PdeError::Config(msg) => CliError::Config(msg),
        PdeError::CflViolation { dt, limit } => CliError::Config(format!(
            "field `dt`: dt = {dt} exceeds the explicit stability limit {limit}"
        )),
        PdeError::BlowUp { t } => CliError::Runtime(format!("blow-up reported at t = {t}")),
        PdeError::Exact(err) => CliError::Runtime(format!("{err}")),
    }
}

/// Snapshot CSV: header `t,x,U,V`, time-major rows, x ascending.
fn snapshot_csv(notes: &[&str], xs: &[f64], snaps: &[(f64, Vec<f64>, Vec<f64>)]) -> String {
    let mut out = String::new();
    for note in notes {
        out.push_str(&format!("# {note}\n"));
    }
    out.push_str("t,x,U,V\n");
    for (t, u, v) in snaps {
        for (i, &x) in xs.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                sig17(*t),
                sig17(x),
                sig17(u[i]),
                sig17(v[i])
            ));
        }
    }
    out
}

fn write_field_plots(
    out: &Path,
    xs: &[f64],
    snaps: &[(f64, Vec<f64>, Vec<f64>)],
) -> Result<Vec<PathBuf>, CliError> {
    let u_rows: Vec<(f64, Vec<f64>)> = snaps.iter().map(|(t, u, _)| (*t, u.clone())).collect();
    let v_rows: Vec<(f64, Vec<f64>)> = snaps.iter().map(|(t, _, v)| (*t, v.clone())).collect();
    let u_path = out.join("plot_U.svg");
    let v_path = out.join("plot_V.svg");
    write_field_plot(&u_path, "U", xs, &u_rows)?;
    write_field_plot(&v_path, "V", xs, &v_rows)?;
    Ok(vec![u_path, v_path])
}

/// Closed-form spec from config keys with the given prefix ("" or
/// "exact_").
fn spec_from_config(cfg: &Config, prefix: &str) -> Result<ExactSolutionSpec, CliError> {
    let key = |name: &str| format!("{prefix}{name}");
    let case = cfg.require_str(&key("case"))?;
    let a: f64 = cfg.require(&key("a"))?;
    let k1: f64 = cfg.require(&key("k1"))?;
    let spec = match case {
        "elliptic_pair" => {
            let b: f64 = cfg.require(&key("b"))?;
            ExactSolutionSpec::elliptic_pair(a, b, k1)
        }
        "elliptic_plus_linear" => {
            let c1: f64 = cfg.get_or(&key("c1"), 0.0)?;
            let c2: f64 = cfg.get_or(&key("c2"), 0.0)?;
            ExactSolutionSpec::elliptic_plus_linear(a, k1, c1, c2)
        }
        other => {
            return Err(CliError::Config(format!(
                "field `{}`: unknown case `{other}` \
                 (expected elliptic_pair or elliptic_plus_linear)",
                key("case")
            )))
        }
    };
    spec.map_err(|e| CliError::Config(format!("{e}")))
}

fn parse_scheme(cfg: &Config) -> Result<Scheme, CliError> {
    match cfg.get_or("scheme", "imex".to_string())?.as_str() {
        "imex" => Ok(Scheme::Imex),
        "rk4" => Ok(Scheme::ExplicitRk4),
        other => Err(CliError::Config(format!(
            "field `scheme`: unknown scheme `{other}` (expected imex or rk4)"
        ))),
    }
}

const SIMULATE_KEYS: &[&str] = &[
    "system", "a", "b", "lambda1", "lambda2", "phi1", "phi2", "x_min", "x_max", "nx", "t0",
    "t_end", "dt", "snapshot_stride", "scheme", "ic", "ic_u", "ic_v", "bc", "exact_case",
    "exact_a", "exact_b", "exact_k1", "exact_c1", "exact_c2",
];

pub fn cmd_simulate(cfg: &Config, out: &Path, plot: bool) -> Result<(), CliError> {
    cfg.ensure_only(SIMULATE_KEYS)?;

    let system = match cfg.require_str("system")? {
        "exp_coupled" => RDSystem::exp_coupled(
            cfg.require("a")?,
            cfg.require("b")?,
            cfg.require("lambda1")?,
            cfg.require("lambda2")?,
            cfg.require("phi1")?,
            cfg.require("phi2")?,
        ),
        "cubic" => RDSystem::cubic(cfg.require("phi1")?, cfg.require("phi2")?),
        other => {
            return Err(CliError::Config(format!(
                "field `system`: unknown system `{other}` (expected exp_coupled or cubic)"
            )))
        }
    };
    let grid = Grid1D::new(
        cfg.require("x_min")?,
        cfg.require("x_max")?,
        cfg.require("nx")?,
    )
    .map_err(from_pde_error)?;

    let mut exact_driven = true;
    let ic = match cfg.get_or("ic", "constant".to_string())?.as_str() {
        "constant" => {
            exact_driven = false;
            InitialCondition::Constant {
                u: cfg.require("ic_u")?,
                v: cfg.require("ic_v")?,
            }
        }
        "exact" => InitialCondition::Exact(spec_from_config(cfg, "exact_")?),
        other => {
            return Err(CliError::Config(format!(
                "field `ic`: unknown initial condition `{other}` (expected constant or exact)"
            )))
        }
    };
    let bc = match cfg.get_or("bc", "neumann".to_string())?.as_str() {
        "neumann" => {
            exact_driven = false;
            BoundaryCondition::NeumannZero
        }
        "dirichlet_zero" => {
            exact_driven = false;
            BoundaryCondition::dirichlet_zero()
        }
        "exact" => BoundaryCondition::Exact(spec_from_config(cfg, "exact_")?),
        other => {
            return Err(CliError::Config(format!(
                "field `bc`: unknown boundary condition `{other}` \
                 (expected neumann, dirichlet_zero, or exact)"
            )))
        }
    };

    let params = SimulationParams {
        system,
        grid,
        bc,
        ic,
        t0: cfg.require("t0")?,
        t_end: cfg.require("t_end")?,
        dt: cfg.require("dt")?,
        snapshot_stride: cfg.require("snapshot_stride")?,
        scheme: parse_scheme(cfg)?,
    };

    let outcome = simulate_collect(&params).map_err(from_pde_error)?;
    let xs = params.grid.xs();
    let snaps: Vec<(f64, Vec<f64>, Vec<f64>)> = outcome
        .snapshots
        .into_iter()
        .map(|s| (s.t, s.u, s.v))
        .collect();

    let mut notes = vec!["rdsym simulate snapshot export".to_string()];
    if !exact_driven {
        notes.push("IC/BC not from paper: plausible defaults, overridable in the config".into());
    }
    if let Some(t) = outcome.blow_up {
        notes.push(format!(
            "run ended early: blow-up reported at t = {t}; rows below stop at the \
             last finite snapshot"
        ));
    }
    let note_refs: Vec<&str> = notes.iter().map(String::as_str).collect();
    write_file(
        &out.join("simulate.csv"),
        &snapshot_csv(&note_refs, &xs, &snaps),
    )?;
    println!("wrote {}", out.join("simulate.csv").display());
    if plot {
        for p in write_field_plots(out, &xs, &snaps)? {
            println!("wrote {}", p.display());
        }
    }
    match outcome.blow_up {
        Some(t) => Err(CliError::Runtime(format!("blow-up reported at t = {t}"))),
        None => Ok(()),
    }
}

const EXACT_KEYS: &[&str] = &[
    "case", "a", "b", "k1", "c1", "c2", "x_min", "x_max", "nx", "t_start", "t_end", "nt",
];

pub fn cmd_exact(cfg: &Config, out: &Path, plot: bool) -> Result<(), CliError> {
    cfg.ensure_only(EXACT_KEYS)?;
    let spec = spec_from_config(cfg, "")?;
    let grid = Grid1D::new(
        cfg.require("x_min")?,
        cfg.require("x_max")?,
        cfg.require("nx")?,
    )
    .map_err(from_pde_error)?;
    let t_start: f64 = cfg.require("t_start")?;
    let t_end: f64 = cfg.require("t_end")?;
    let nt: usize = cfg.require("nt")?;
    if nt == 0 || t_end < t_start {
        return Err(CliError::Config(format!(
            "fields `t_start`/`t_end`/`nt`: need nt >= 1 and t_end >= t_start, \
             got [{t_start}, {t_end}] with nt = {nt}"
        )));
    }

    // the elliptic pair's V has ds poles along z = 2mK; refuse windows
    // that cross one (the linear case is pole-free everywhere)
    if spec.case_tag == CaseTag::EllipticPair {
        let curves = singular_times(&spec, (grid.x_min, grid.x_max), (t_start, t_end))
            .map_err(|e| CliError::Runtime(format!("{e}")))?;
        if !curves.is_empty() {
            let list: Vec<String> = curves
                .iter()
                .map(|c| format!("z = {:.6} (m = {})", c.z_level, c.m))
                .collect();
            return Err(CliError::Runtime(format!(
                "window crosses pole curve(s) of ds: {}",
                list.join(", ")
            )));
        }
    }

    let xs = grid.xs();
    let mut snaps = Vec::with_capacity(nt);
    for j in 0..nt {
        let t = if nt == 1 {
            t_start
        } else {
            t_start + (t_end - t_start) * j as f64 / (nt - 1) as f64
        };
        let mut u = Vec::with_capacity(xs.len());
        let mut v = Vec::with_capacity(xs.len());
        for &x in &xs {
            let (ui, vi) = eval(x, t, &spec).map_err(|e| CliError::Runtime(format!("{e}")))?;
            u.push(ui);
            v.push(vi);
        }
        snaps.push((t, u, v));
    }

    let notes = vec!["rdsym exact closed-form export"];
    write_file(&out.join("exact.csv"), &snapshot_csv(&notes, &xs, &snaps))?;
    println!("wrote {}", out.join("exact.csv").display());
    if plot {
        for p in write_field_plots(out, &xs, &snaps)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn report_csv(results: &[CheckResult]) -> String {
    let mut out = String::from("suite,name,status,measured,tolerance,detail\n");
    for r in results {
        let status = if r.informational {
            "info"
        } else if r.pass {
            "pass"
        } else {
            "fail"
        };
        let detail = r.detail.replace('"', "\"\"");
        out.push_str(&format!(
            "{},{},{status},{},{},\"{detail}\"\n",
            r.suite,
            r.name,
            sig17(r.measured),
            sig17(r.tolerance),
        ));
    }
    out
}

pub fn cmd_verify(suite: &str, seed: u64, out: &Path) -> Result<(), CliError> {
    let results = match suite {
        "elliptic" => verify_elliptic(seed),
        "exact" => verify_exact(seed),
        "symmetry" => verify_symmetry(seed),
        "reduction" => verify_reduction(seed),
        "convergence" => verify_convergence(seed),
        "all" => verify_all(seed),
        other => {
            return Err(CliError::Config(format!(
                "unknown suite `{other}` \
                 (expected elliptic, exact, symmetry, reduction, convergence, or all)"
            )))
        }
    };
    // keep stdout exactly the report so runs compare byte-for-byte
    print!("{}", format_report(&results));
    write_file(&out.join("verify_report.csv"), &report_csv(&results))?;
    eprintln!("wrote {}", out.join("verify_report.csv").display());
    if all_passed(&results) {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

const REDUCE_KEYS: &[&str] = &[
    "system", "phi1", "phi2", "nu", "lambda", "a", "b", "alpha", "t_gauge", "z0", "z1", "h", "y0",
];

pub fn cmd_reduce(cfg: &Config, out: &Path) -> Result<(), CliError> {
    cfg.ensure_only(REDUCE_KEYS)?;
    let phi1: f64 = cfg.require("phi1")?;
    let phi2: f64 = cfg.get_or("phi2", 0.0)?;
    let system = match cfg.require_str("system")? {
        "cubic_oscillator" => ReducedSystem::cubic_oscillator(phi1, phi2),
        name @ ("dilatation_printed" | "dilatation_derived") => {
            let p = DilatationParams {
                nu: cfg.require("nu")?,
                lambda: cfg.require("lambda")?,
                a: cfg.require("a")?,
                b: cfg.require("b")?,
                phi1,
                phi2,
                alpha: cfg.get_or("alpha", 1.0)?,
                t_gauge: cfg.get_or("t_gauge", 0.0)?,
            };
            if name == "dilatation_printed" {
                ReducedSystem::dilatation_printed(p)
            } else {
                ReducedSystem::dilatation_derived(p)
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "field `system`: unknown reduced system `{other}` (expected \
                 cubic_oscillator, dilatation_printed, or dilatation_derived)"
            )))
        }
    };

    // default initial data is elliptic-matched so the closed form is
    // the oracle for the cubic oscillator
    let y0_list: Vec<f64> = match cfg.get_str("y0") {
        Some(_) => cfg.require_list("y0")?,
        None => vec![0.0, std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.0],
    };
    let y0: [f64; 4] = y0_list.clone().try_into().map_err(|_| {
        CliError::Config(format!(
            "field `y0`: expected 4 comma-separated values, got {}",
            y0_list.len()
        ))
    })?;

    let z0: f64 = cfg.require("z0")?;
    let z1: f64 = cfg.require("z1")?;
    let h: f64 = cfg.get_or("h", 1e-3)?;

    if matches!(
        system.label,
        SystemLabel::DilatationPrinted | SystemLabel::DilatationDerived
    ) {
        // informational arbitration: does the printed reduced system
        // match the chain-rule derivation on analytic profiles?
        let w1 = Profile::polynomial(&[0.3, -0.2, 0.05, 0.01]);
        let w2 = Profile::polynomial(&[-0.1, 0.4, -0.03, 0.002]);
        let params = LieReductionParams {
            alpha: cfg.get_or("alpha", 1.0)?,
            beta: 1.0,
            nu: cfg.require("nu")?,
            lambda: cfg.require("lambda")?,
            a: cfg.require("a")?,
            b: cfg.require("b")?,
            phi1,
            phi2,
        };
        let points: Vec<(f64, f64)> = (0..20)
            .map(|i| (0.1 + 0.04 * i as f64, 0.2 + 0.03 * i as f64))
            .collect();
        match reduction_consistency_check(&w1, &w2, &params, &points) {
            Ok(rep) => println!(
                "arbitration (informational): printed form {} the chain-rule \
                 derivation (max deviation {:.3e}); derived route discrepancy {:.3e}",
                if rep.printed_consistent {
                    "matches"
                } else {
                    "DOES NOT match"
                },
                rep.max_printed_discrepancy,
                rep.max_discrepancy
            ),
            Err(e) => println!("arbitration (informational): skipped ({e})"),
        }
    }

    let traj = integrate_rk4(&system, y0, (z0, z1), h).map_err(|e| match e {
        rdsym_core::ode::OdeError::RhsNonFinite { z } => {
            CliError::Runtime(format!("trajectory blew up at z = {z}"))
        }
        other => CliError::Config(format!("{other}")),
    })?;

    let with_energy = system.label == SystemLabel::CubicOscillator;
    let mut csv = String::from("# rdsym reduced-trajectory export\n");
    csv.push_str(if with_energy {
        "z,w1,dw1,w2,dw2,energy\n"
    } else {
        "z,w1,dw1,w2,dw2\n"
    });
    for (z, y) in traj.z_values.iter().zip(&traj.states) {
        csv.push_str(&format!(
            "{},{},{},{},{}",
            sig17(*z),
            sig17(y[0]),
            sig17(y[1]),
            sig17(y[2]),
            sig17(y[3])
        ));
        if with_energy {
            let e = oscillator_energy(y[0], y[1], phi1) + oscillator_energy(y[2], y[3], phi2);
            csv.push_str(&format!(",{}", sig17(e)));
        }
        csv.push('\n');
    }
    write_file(&out.join("reduce.csv"), &csv)?;
    println!("wrote {}", out.join("reduce.csv").display());
    Ok(())
}

const CONVERGENCE_KEYS: &[&str] = &[
    "a", "b", "k1", "grids", "t_start", "t_end", "scheme", "dt_factor",
];

pub fn cmd_convergence(cfg: &Config, out: &Path) -> Result<(), CliError> {
    cfg.ensure_only(CONVERGENCE_KEYS)?;
    let spec = ExactSolutionSpec::elliptic_pair(
        cfg.get_or("a", 1.0)?,
        cfg.get_or("b", -1.0)?,
        cfg.get_or("k1", 1.0)?,
    )
    .map_err(|e| CliError::Config(format!("{e}")))?;
    let grids: Vec<usize> = cfg.require_list("grids")?;
    let t_start: f64 = cfg.get_or("t_start", 0.1)?;
    let t_end: f64 = cfg.get_or("t_end", 0.5)?;
    let factor: f64 = cfg.get_or("dt_factor", 0.25)?;
    let scheme = parse_scheme(cfg)?;

    let rows = convergence_study(
        &spec,
        &grids,
        &move |nx| {
            let dx = 1.0 / (nx - 1) as f64;
            factor * dx * dx
        },
        (t_start, t_end),
        scheme,
    )
    .map_err(from_pde_error)?;

    let mut csv = String::from("nx,dt,max_error,observed_order\n");
    println!("{:>6} {:>14} {:>14} {:>10}", "nx", "dt", "max_error", "order");
    for row in &rows {
        let order = row
            .observed_order
            .map(|o| sig17(o))
            .unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{order}\n",
            row.nx,
            sig17(row.dt),
            sig17(row.max_error)
        ));
        println!(
            "{:>6} {:>14.6e} {:>14.6e} {:>10}",
            row.nx,
            row.dt,
            row.max_error,
            row.observed_order
                .map(|o| format!("{o:.3}"))
                .unwrap_or_else(|| "-".into())
        );
    }
    write_file(&out.join("convergence.csv"), &csv)?;
    println!("wrote {}", out.join("convergence.csv").display());
    Ok(())
}
