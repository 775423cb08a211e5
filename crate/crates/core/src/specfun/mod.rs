//! Bessel-family special functions of real order nu >= 0 and real argument
//! x > 0: J, Y, the Hankel pair H1/H2 and the modified function I, together
//! with power-scaled variants and exact order-recurrence derivatives.
//!
//! Evaluation strategy by regime:
//! * ascending series for J wherever its first term dominates (small x, or
//!   x modest compared to nu), and for I whenever the result is representable;
//! * Steed's continued fractions with a Temme small-argument series below
//!   x = 2 for the J/Y pair in the intermediate regime;
//! * the phase-amplitude asymptotic expansion once x dominates nu^2.
//!
//! Everything here is a pure function of its arguments; values that leave
//! the f64 range surface as a tagged [`SpecFunError::Overflow`] rather than
//! an infinity.

pub mod gamma;

mod asymptotic;
mod series;
mod steed;

pub use steed::CylPair;

use num_complex::Complex64;

/// Largest order accepted by the public evaluators.
pub const NU_MAX: f64 = 200.0;
/// Largest argument accepted by the public evaluators.
pub const X_MAX: f64 = 1e6;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("overflow of {kind} at nu={nu}, x={x}")]
    Overflow { kind: &'static str, nu: f64, x: f64 },
    #[error("{what} did not converge at nu={nu}, x={x}")]
    NoConvergence { what: &'static str, nu: f64, x: f64 },
}

/// Which member of the Bessel family to evaluate.
///
/// H1 and H2 are assembled as J + iY and J - iY, so the defining relations
/// hold exactly in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    H1,
    H2,
    I,
}

/// Request for x^p * C_nu(x) with the power shift fused into the evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ScaledBesselRequest {
    pub nu: f64,
    pub x: f64,
    pub power_shift: f64,
}

fn check_domain(nu: f64, x: f64) -> Result<(), SpecFunError> {
    if !(nu >= 0.0) {
        return Err(SpecFunError::Domain(format!("order nu={nu} must be >= 0")));
    }
    if nu > NU_MAX {
        return Err(SpecFunError::Domain(format!("order nu={nu} exceeds NU_MAX={NU_MAX}")));
    }
    if !(x > 0.0) {
        return Err(SpecFunError::Domain(format!("argument x={x} must be > 0")));
    }
    if x > X_MAX {
        return Err(SpecFunError::Domain(format!("argument x={x} exceeds X_MAX={X_MAX:e}")));
    }
    Ok(())
}

/// J, J', Y, Y' at common (nu, x). The J/Y pair shares one evaluation so the
/// cross relations (Wronskian, Hankel assembly) are as consistent as the
/// algorithm allows.
pub fn bessel_jy(nu: f64, x: f64) -> Result<CylPair, SpecFunError> {
    check_domain(nu, x)?;
    if asymptotic::asymptotic_applies(nu, x) {
        Ok(asymptotic::bessel_jy_asymptotic(nu, x))
    } else if asymptotic::band_applies(nu, x) {
        asymptotic::bessel_jy_band(nu, x)
    } else {
        steed::bessel_jy_steed(nu, x)
    }
}

fn eval_j(nu: f64, x: f64) -> Result<f64, SpecFunError> {
    if series::j_series_safe(nu, x) {
        Ok(series::j_series(nu, x))
    } else {
        Ok(bessel_jy(nu, x)?.j)
    }
}

/// C_nu(x) for the requested kind. Real kinds are returned with zero
/// imaginary part.
pub fn bessel(kind: BesselKind, nu: f64, x: f64) -> Result<Complex64, SpecFunError> {
    check_domain(nu, x)?;
    match kind {
        BesselKind::J => Ok(Complex64::new(eval_j(nu, x)?, 0.0)),
        BesselKind::Y => Ok(Complex64::new(bessel_jy(nu, x)?.y, 0.0)),
        // assembled from the same J and Y evaluations the other kinds
        // return, so H1 = J + iY and H2 = J - iY hold exactly
        BesselKind::H1 => Ok(Complex64::new(eval_j(nu, x)?, bessel_jy(nu, x)?.y)),
        BesselKind::H2 => Ok(Complex64::new(eval_j(nu, x)?, -bessel_jy(nu, x)?.y)),
        BesselKind::I => {
            if x > 700.0 {
                Err(SpecFunError::Overflow { kind: "I", nu, x })
            } else {
                let v = series::i_series(nu, x);
                if v.is_finite() {
                    Ok(Complex64::new(v, 0.0))
                } else {
                    Err(SpecFunError::Overflow { kind: "I", nu, x })
                }
            }
        }
    }
}

/// x^p * C_nu(x). For kind J the x -> 0 limit is taken analytically through
/// the series whenever p >= -nu, so no intermediate quantity overflows for x
/// down to 1e-300. The singular kinds reject x = 0.
pub fn scaled_bessel(req: ScaledBesselRequest, kind: BesselKind) -> Result<Complex64, SpecFunError> {
    let ScaledBesselRequest { nu, x, power_shift: p } = req;
    if !(nu >= 0.0) || nu > NU_MAX {
        return Err(SpecFunError::Domain(format!("order nu={nu} out of range")));
    }
    if x < 0.0 || x > X_MAX {
        return Err(SpecFunError::Domain(format!("argument x={x} out of range")));
    }
    if x == 0.0 {
        return match kind {
            BesselKind::J | BesselKind::I => {
                if nu + p > 0.0 {
                    Ok(Complex64::new(0.0, 0.0))
                } else if nu + p == 0.0 {
                    // limit of x^{-nu} C_nu(x): series leading coefficient
                    let v = (-nu * std::f64::consts::LN_2 - gamma::ln_gamma(nu + 1.0)).exp();
                    Ok(Complex64::new(v, 0.0))
                } else {
                    Err(SpecFunError::Domain(format!(
                        "x^p C_nu(x) diverges as x->0 for p={p} < -nu={}",
                        -nu
                    )))
                }
            }
            _ => Err(SpecFunError::Domain("kernel singular: Y/H at x = 0".into())),
        };
    }
    match kind {
        BesselKind::J => {
            if series::j_series_safe(nu, x) {
                let v = series::j_series_scaled(nu, x, p);
                if v.is_finite() {
                    Ok(Complex64::new(v, 0.0))
                } else {
                    Err(SpecFunError::Overflow { kind: "scaled J", nu, x })
                }
            } else {
                let j = bessel(BesselKind::J, nu, x)?;
                finite_or_overflow(j * pow_checked(x, p, nu)?, "scaled J", nu, x)
            }
        }
        BesselKind::I => {
            let v = bessel(BesselKind::I, nu, x)?;
            finite_or_overflow(v * pow_checked(x, p, nu)?, "scaled I", nu, x)
        }
        _ => {
            let v = bessel(kind, nu, x)?;
            finite_or_overflow(v * pow_checked(x, p, nu)?, "scaled Y/H", nu, x)
        }
    }
}

fn pow_checked(x: f64, p: f64, nu: f64) -> Result<f64, SpecFunError> {
    let v = x.powf(p);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SpecFunError::Overflow { kind: "power shift", nu, x })
    }
}

fn finite_or_overflow(
    v: Complex64,
    kind: &'static str,
    nu: f64,
    x: f64,
) -> Result<Complex64, SpecFunError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(SpecFunError::Overflow { kind, nu, x })
    }
}

/// C_nu for signed order, via the standard reflection formulas for nu < 0.
pub(crate) fn cyl_signed(kind: BesselKind, nu: f64, x: f64) -> Result<Complex64, SpecFunError> {
    if nu >= 0.0 {
        return bessel(kind, nu, x);
    }
    let b = -nu;
    if b.fract() == 0.0 {
        // integer order: C_{-m} = (-1)^m C_m for J, Y, H1, H2
        let sign = if (b as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(bessel(kind, b, x)? * sign);
    }
    match kind {
        BesselKind::J | BesselKind::Y => {
            let p = bessel_jy(b, x)?;
            let (s, c) = (std::f64::consts::PI * b).sin_cos();
            let v = match kind {
                BesselKind::J => p.j * c - p.y * s,
                _ => p.j * s + p.y * c,
            };
            Ok(Complex64::new(v, 0.0))
        }
        BesselKind::H1 => {
            let h = bessel(BesselKind::H1, b, x)?;
            Ok(h * Complex64::from_polar(1.0, std::f64::consts::PI * b))
        }
        BesselKind::H2 => {
            let h = bessel(BesselKind::H2, b, x)?;
            Ok(h * Complex64::from_polar(1.0, -std::f64::consts::PI * b))
        }
        BesselKind::I => Err(SpecFunError::Domain(
            "negative-order I is not supported (different recurrence)".into(),
        )),
    }
}

/// Exact k-th lambda-derivative of C_nu(lambda r), expanded through the
/// order recurrence C'_nu = (C_{nu-1} - C_{nu+1})/2 into the binomial
/// combination r^k 2^{-k} sum_i (-1)^i C(k,i) C_{nu-k+2i}(lambda r).
///
/// No finite differences are involved. Kind I is rejected: its derivative
/// recurrence carries different signs.
pub fn bessel_dlambda(
    kind: BesselKind,
    nu: f64,
    lambda: f64,
    r: f64,
    k: u32,
) -> Result<Complex64, SpecFunError> {
    if kind == BesselKind::I {
        return Err(SpecFunError::Domain(
            "derivative recurrence not applicable to kind I".into(),
        ));
    }
    if k > 8 {
        return Err(SpecFunError::Domain(format!("derivative order k={k} exceeds 8")));
    }
    let x = lambda * r;
    if k == 0 {
        return bessel(kind, nu, x);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut binom = 1.0_f64; // C(k, i)
    for i in 0..=k {
        let order = nu - k as f64 + 2.0 * i as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += cyl_signed(kind, order, x)? * (sign * binom);
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    let scale = r.powi(k as i32) * 0.5f64.powi(k as i32);
    Ok(acc * scale)
}

/// H1_nu(x) J'_nu(x) - H1'_nu(x) J_nu(x), with the derivatives taken through
/// the order recurrence. Against the identity this must equal -2i/(pi x).
pub fn wronskian_check(nu: f64, x: f64) -> Result<Complex64, SpecFunError> {
    let j = bessel(BesselKind::J, nu, x)?;
    let h1 = bessel(BesselKind::H1, nu, x)?;
    let jp = bessel_dlambda(BesselKind::J, nu, x, 1.0, 1)?;
    let h1p = bessel_dlambda(BesselKind::H1, nu, x, 1.0, 1)?;
    Ok(h1 * jp - h1p * j)
}

/// Test-only access to the complex-argument I series used by the rotation
/// identity check.
#[doc(hidden)]
pub fn i_series_imag_arg(nu: f64, x: f64) -> Complex64 {
    series::i_series_imag_arg(nu, x)
}
