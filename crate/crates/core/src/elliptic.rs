//! Jacobi elliptic functions and the complete elliptic integral of the
//! first kind, computed by AGM / descending Landen transformation.
//!
//! Only real arguments and moduli in [0, 1] are supported. The quotient
//! functions follow the Glaisher convention: sd = sn/dn, ds = dn/sn.

use thiserror::Error;

/// Degenerate-modulus switchover: below this distance from k = 0 or
/// k = 1 the closed forms (trig / hyperbolic) are used directly.
const DEGENERATE_EPS: f64 = 1e-9;

/// Default |sn| threshold under which ds is treated as at a pole.
pub const DEFAULT_POLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum EllipticError {
    #[error("modulus-degenerate: K(k) diverges at k = 1")]
    ModulusDegenerate,
    #[error("modulus out of range: k = {0} not in [0, 1]")]
    ModulusOutOfRange(f64),
    #[error("non-finite argument: z = {0}")]
    NonFiniteArgument(f64),
    #[error("pole-of-ds: |sn| below tolerance at z = {z}")]
    PoleOfDs { z: f64 },
}

/// Elliptic modulus k with its cached complement k' = sqrt(1 - k^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    k: f64,
    k_prime: f64,
}

impl Modulus {
    pub fn new(k: f64) -> Result<Self, EllipticError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(EllipticError::ModulusOutOfRange(k));
        }
        Ok(Self {
            k,
            k_prime: (1.0 - k * k).sqrt(),
        })
    }

    /// The modulus used by the closed-form solutions: k = sqrt(2)/2
    /// (parameter m = k^2 = 1/2).
    pub fn half_sqrt2() -> Self {
        let k = std::f64::consts::FRAC_1_SQRT_2;
        Self { k, k_prime: k }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k_prime(&self) -> f64 {
        self.k_prime
    }
}

/// Values of (sn, cn, dn) at a shared argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind, K(k), via the AGM:
/// a_{n+1} = (a_n + b_n)/2, b_{n+1} = sqrt(a_n b_n), K = pi / (2 a_inf).
pub fn complete_k(modulus: Modulus) -> Result<f64, EllipticError> {
    if modulus.k >= 1.0 {
        return Err(EllipticError::ModulusDegenerate);
    }
    let mut a = 1.0_f64;
    let mut b = modulus.k_prime;
    for _ in 0..64 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    Ok(std::f64::consts::PI / (2.0 * a))
}

/// Jacobi sn, cn, dn at argument `z`, by the descending Gauss/Landen
/// transformation with backward phi recurrence (A&S 16.4).
///
/// Degenerate branches: k ~ 0 gives (sin, cos, 1); k ~ 1 gives
/// (tanh, sech, sech).
pub fn jacobi_sncndn(z: f64, modulus: Modulus) -> Result<EllipticTriple, EllipticError> {
    if !z.is_finite() {
        return Err(EllipticError::NonFiniteArgument(z));
    }
    let k = modulus.k;
    let kp = modulus.k_prime;
    if k < DEGENERATE_EPS {
        return Ok(EllipticTriple {
            sn: z.sin(),
            cn: z.cos(),
            dn: 1.0,
        });
    }
    if kp < DEGENERATE_EPS {
        let sech = 1.0 / z.cosh();
        return Ok(EllipticTriple {
            sn: z.tanh(),
            cn: sech,
            dn: sech,
        });
    }

    // AGM sequence a_n, b_n with c_n = (a_n - b_n)/2.
    let mut a_seq = [0.0_f64; 32];
    let mut c_seq = [0.0_f64; 32];
    let mut a = 1.0_f64;
    let mut b = kp;
    a_seq[0] = a;
    c_seq[0] = k;
    let mut n = 0;
    while c_seq[n].abs() > f64::EPSILON * a && n + 1 < 32 {
        n += 1;
        let an = 0.5 * (a + b);
        let cn = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        a_seq[n] = a;
        c_seq[n] = cn;
    }

    // phi_N = 2^N a_N z, then descend via
    // phi_{n-1} = (phi_n + asin((c_n/a_n) sin phi_n)) / 2.
    let mut phi = (1u64 << n) as f64 * a * z;
    for i in (1..=n).rev() {
        let s = (c_seq[i] / a_seq[i] * phi.sin()).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }

    let sn = phi.sin();
    let cn = phi.cos();
    // dn^2 = k'^2 + k^2 cn^2 avoids cancellation near sn = 1.
    let dn = (kp * kp + k * k * cn * cn).sqrt();
    Ok(EllipticTriple { sn, cn, dn })
}

/// sd(z, k) = sn/dn. Bounded by 1/k' on the real line for k < 1.
pub fn jacobi_sd(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    Ok(t.sn / t.dn)
}

/// ds(z, k) = dn/sn; poles at the zeros of sn (z = 0 mod 2K).
pub fn jacobi_ds(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    jacobi_ds_with_tol(z, modulus, DEFAULT_POLE_TOL)
}

pub fn jacobi_ds_with_tol(z: f64, modulus: Modulus, pole_tol: f64) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    if t.sn.abs() < pole_tol {
        return Err(EllipticError::PoleOfDs { z });
    }
    Ok(t.dn / t.sn)
}

/// First derivative of sd: sd' = cn / dn^2.
pub fn jacobi_sd_deriv(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    Ok(t.cn / (t.dn * t.dn))
}

/// Second derivative of sd: sd'' = sn (2 k^2 cn^2 - dn^2) / dn^3.
pub fn jacobi_sd_deriv2(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    let k2 = modulus.k * modulus.k;
    Ok(t.sn * (2.0 * k2 * t.cn * t.cn - t.dn * t.dn) / (t.dn * t.dn * t.dn))
}

/// First derivative of ds: ds' = -cn / sn^2.
pub fn jacobi_ds_deriv(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    if t.sn.abs() < DEFAULT_POLE_TOL {
        return Err(EllipticError::PoleOfDs { z });
    }
    Ok(-t.cn / (t.sn * t.sn))
}

/// Second derivative of ds: ds'' = dn (sn^2 + 2 cn^2) / sn^3.
pub fn jacobi_ds_deriv2(z: f64, modulus: Modulus) -> Result<f64, EllipticError> {
    let t = jacobi_sncndn(z, modulus)?;
    if t.sn.abs() < DEFAULT_POLE_TOL {
        return Err(EllipticError::PoleOfDs { z });
    }
    Ok(t.dn * (t.sn * t.sn + 2.0 * t.cn * t.cn) / (t.sn * t.sn * t.sn))
}
