//! Closed-form solutions of the cubic reaction-diffusion system
//! U_t - U_xx = phi1 U^3, V_t - V_xx = phi2 V^3, built from the
//! Glaisher quotients sd and ds at modulus sqrt(2)/2, together with
//! pole tracking and pointwise residual verification.

use crate::elliptic::{
    complete_k, jacobi_ds_with_tol, jacobi_sd, jacobi_sd_deriv, jacobi_sd_deriv2, jacobi_sncndn,
    EllipticError, Modulus, DEFAULT_POLE_TOL,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// Which closed form a spec selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Both fields elliptic (sd / ds pair); needs a > 0, b < 0.
    EllipticPair,
    /// U elliptic, V linear in the similarity variable; needs a > 0.
    EllipticPlusLinear,
}

/// Constants selecting one member of the closed-form solution family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolutionSpec {
    pub case_tag: CaseTag,
    /// Reaction coefficient phi1.
    pub a: f64,
    /// Reaction coefficient phi2 (EllipticPair only).
    pub b: f64,
    /// Shift constant in the similarity variable.
    pub k1: f64,
    /// Linear-solution constants (EllipticPlusLinear only).
    pub c1: f64,
    pub c2: f64,
}

impl ExactSolutionSpec {
    pub fn elliptic_pair(a: f64, b: f64, k1: f64) -> Result<Self, ExactError> {
        let spec = Self {
            case_tag: CaseTag::EllipticPair,
            a,
            b,
            k1,
            c1: 0.0,
            c2: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn elliptic_plus_linear(a: f64, k1: f64, c1: f64, c2: f64) -> Result<Self, ExactError> {
        let spec = Self {
            case_tag: CaseTag::EllipticPlusLinear,
            a,
            b: 0.0,
            k1,
            c1,
            c2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ExactError> {
        if self.a <= 0.0 {
            return Err(ExactError::InvalidSpec(format!(
                "requires a > 0, got a = {}",
                self.a
            )));
        }
        if self.case_tag == CaseTag::EllipticPair && self.b >= 0.0 {
            return Err(ExactError::InvalidSpec(format!(
                "elliptic pair requires b < 0, got b = {}",
                self.b
            )));
        }
        Ok(())
    }

    /// 1/sqrt(2a), the U-amplitude (equal to sqrt(2a)/(2a)).
    pub fn coeff_u(&self) -> f64 {
        1.0 / (2.0 * self.a).sqrt()
    }

    /// sqrt(-2/b), the V-amplitude for the elliptic pair (b < 0).
    pub fn coeff_v(&self) -> f64 {
        (-2.0 / self.b).sqrt()
    }
}

/// Similarity variable z = x^2/2 + k1 x + 3t.
pub fn similarity_z(x: f64, t: f64, k1: f64) -> f64 {
    0.5 * x * x + k1 * x + 3.0 * t
}

fn eval_u(x: f64, t: f64, spec: &ExactSolutionSpec) -> Result<f64, ExactError> {
    let z = similarity_z(x, t, spec.k1);
    let sd = jacobi_sd(z, Modulus::half_sqrt2())?;
    Ok(spec.coeff_u() * (x + spec.k1) * sd)
}

/// Elliptic-pair solution:
/// U = (x + k1) sd(z) / sqrt(2a), V = sqrt(-2/b) (x + k1) ds(z).
pub fn eval_case1(x: f64, t: f64, spec: &ExactSolutionSpec) -> Result<(f64, f64), ExactError> {
    if spec.case_tag != CaseTag::EllipticPair {
        return Err(ExactError::InvalidSpec("expected EllipticPair spec".into()));
    }
    spec.validate()?;
    let z = similarity_z(x, t, spec.k1);
    let u = eval_u(x, t, spec)?;
    let ds = jacobi_ds_with_tol(z, Modulus::half_sqrt2(), DEFAULT_POLE_TOL)?;
    let v = spec.coeff_v() * (x + spec.k1) * ds;
    Ok((u, v))
}

/// Elliptic-plus-linear solution: U as in the pair case,
/// V = (x + k1)(z C1 + C2).
pub fn eval_case2(x: f64, t: f64, spec: &ExactSolutionSpec) -> Result<(f64, f64), ExactError> {
    if spec.case_tag != CaseTag::EllipticPlusLinear {
        return Err(ExactError::InvalidSpec(
            "expected EllipticPlusLinear spec".into(),
        ));
    }
    spec.validate()?;
    let z = similarity_z(x, t, spec.k1);
    let u = eval_u(x, t, spec)?;
    let v = (x + spec.k1) * (z * spec.c1 + spec.c2);
    Ok((u, v))
}

pub fn eval(x: f64, t: f64, spec: &ExactSolutionSpec) -> Result<(f64, f64), ExactError> {
    match spec.case_tag {
        CaseTag::EllipticPair => eval_case1(x, t, spec),
        CaseTag::EllipticPlusLinear => eval_case2(x, t, spec),
    }
}

/// One pole curve z(x, t) = 2 m K of the ds factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleCurve {
    /// Integer multiple m in z = 2 m K.
    pub m: i64,
    /// The level value 2 m K.
    pub z_level: f64,
}

/// Pole curves of ds intersecting the window `x_range` x `t_range`.
/// An empty list means the window is pole-free. The linear case has no
/// ds factor in V, but the shared U factor is pole-free anyway, so the
/// spec's case tag does not change the answer for U-verification use.
pub fn singular_times(
    spec: &ExactSolutionSpec,
    x_range: (f64, f64),
    t_range: (f64, f64),
) -> Result<Vec<PoleCurve>, ExactError> {
    spec.validate()?;
    let two_k = 2.0 * complete_k(Modulus::half_sqrt2())?;
    let (x0, x1) = x_range;
    let (t0, t1) = t_range;
    // z is quadratic in x (vertex at x = -k1) and increasing in t.
    let zx = |x: f64, t: f64| similarity_z(x, t, spec.k1);
    let mut z_min = zx(x0, t0).min(zx(x1, t0));
    let mut z_max = zx(x0, t1).max(zx(x1, t1));
    let vertex = -spec.k1;
    if x0 <= vertex && vertex <= x1 {
        z_min = z_min.min(zx(vertex, t0));
    }
    z_max = z_max.max(zx(x0, t1)).max(zx(x1, t1));
    let m_lo = (z_min / two_k).ceil() as i64;
    let m_hi = (z_max / two_k).floor() as i64;
    Ok((m_lo..=m_hi)
        .map(|m| PoleCurve {
            m,
            z_level: m as f64 * two_k,
        })
        .collect())
}

/// Pointwise residual of the cubic system on the closed form, using
/// analytic derivatives through the chain rule
/// (z_x = x + k1, z_xx = 1, z_t = 3).
///
/// For a true solution both components vanish; for case 2 the V
/// residual is exactly linear cancellation.
pub fn residual_cubic_system(
    x: f64,
    t: f64,
    spec: &ExactSolutionSpec,
) -> Result<(f64, f64), ExactError> {
    residual_cubic_system_perturbed(x, t, spec, 1.0)
}

/// Test hook: scales the U and V field values by `amp` before forming
/// the residual, so sensitivity of the detector can be measured.
pub fn residual_cubic_system_perturbed(
    x: f64,
    t: f64,
    spec: &ExactSolutionSpec,
    amp: f64,
) -> Result<(f64, f64), ExactError> {
    spec.validate()?;
    let m = Modulus::half_sqrt2();
    let z = similarity_z(x, t, spec.k1);
    let p = x + spec.k1;
    let cu = spec.coeff_u() * amp;

    let f = jacobi_sd(z, m)?;
    let f1 = jacobi_sd_deriv(z, m)?;
    let f2 = jacobi_sd_deriv2(z, m)?;

    // W = c p f(z): W_t = 3 c p f', W_xx = 3 c p f' + c p^3 f''.
    let u = cu * p * f;
    let u_t = 3.0 * cu * p * f1;
    let u_xx = 3.0 * cu * p * f1 + cu * p * p * p * f2;
    let r_u = u_t - u_xx - spec.a * u * u * u;

    let r_v = match spec.case_tag {
        CaseTag::EllipticPair => {
            let triple = jacobi_sncndn(z, m)?;
            if triple.sn.abs() < DEFAULT_POLE_TOL {
                return Err(ExactError::Elliptic(EllipticError::PoleOfDs { z }));
            }
            let g = triple.dn / triple.sn;
            let g1 = -triple.cn / (triple.sn * triple.sn);
            let g2 = triple.dn * (triple.sn * triple.sn + 2.0 * triple.cn * triple.cn)
                / (triple.sn * triple.sn * triple.sn);
            let cv = spec.coeff_v() * amp;
            let v = cv * p * g;
            let v_t = 3.0 * cv * p * g1;
            let v_xx = 3.0 * cv * p * g1 + cv * p * p * p * g2;
            v_t - v_xx - spec.b * v * v * v
        }
        CaseTag::EllipticPlusLinear => {
            // V = p (z C1 + C2): V_t = 3 p C1, V_xx = 3 p C1, phi2 = 0.
            let v_t = 3.0 * p * spec.c1 * amp;
            let v_xx = (2.0 * p * spec.c1 + p * spec.c1) * amp;
            v_t - v_xx
        }
    };
    Ok((r_u, r_v))
}

/// Finite-difference residual cross-check with step `h`; independent of
/// the analytic derivative path.
pub fn residual_cubic_system_fd(
    x: f64,
    t: f64,
    spec: &ExactSolutionSpec,
    h: f64,
) -> Result<(f64, f64), ExactError> {
    let (u0, v0) = eval(x, t, spec)?;
    let (u_tp, v_tp) = eval(x, t + h, spec)?;
    let (u_tm, v_tm) = eval(x, t - h, spec)?;
    let (u_xp, v_xp) = eval(x + h, t, spec)?;
    let (u_xm, v_xm) = eval(x - h, t, spec)?;
    let u_t = (u_tp - u_tm) / (2.0 * h);
    let v_t = (v_tp - v_tm) / (2.0 * h);
    let u_xx = (u_xp - 2.0 * u0 + u_xm) / (h * h);
    let v_xx = (v_xp - 2.0 * v0 + v_xm) / (h * h);
    let phi2 = match spec.case_tag {
        CaseTag::EllipticPair => spec.b,
        CaseTag::EllipticPlusLinear => 0.0,
    };
    Ok((
        u_t - u_xx - spec.a * u0 * u0 * u0,
        v_t - v_xx - phi2 * v0 * v0 * v0,
    ))
}
