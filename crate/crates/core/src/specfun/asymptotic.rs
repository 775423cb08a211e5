//! Large-argument evaluation through the phase-amplitude expansion
//!   J_nu(x) = sqrt(2/(pi x)) [P cos w - Q sin w],
//!   Y_nu(x) = sqrt(2/(pi x)) [P sin w + Q cos w],
//! with w = x - nu pi/2 - pi/4. Valid once x dominates nu^2.

use super::steed::{cf1, CylPair};
use super::SpecFunError;

/// Threshold above which the expansion at order nu itself reaches ~1e-13
/// relative accuracy.
pub fn asymptotic_applies(nu: f64, x: f64) -> bool {
    x >= 32.0 && x >= 1.1 * nu * nu
}

/// The seeded-recurrence regime: x is asymptotically large for order ~1 but
/// not for order nu.
pub fn band_applies(nu: f64, x: f64) -> bool {
    x >= 32.0 && !asymptotic_applies(nu, x)
}

/// For 32 <= x < ~nu^2: evaluate Y at the fractional order mu = nu - floor(nu)
/// by the asymptotic expansion, recurse Y upward to nu (stable: Y is the
/// dominant solution and the oscillatory stretch is neutral), then recover J
/// from CF1 and the Wronskian, exactly as the small-x branch does.
pub fn bessel_jy_band(nu: f64, x: f64) -> Result<CylPair, SpecFunError> {
    let nl = nu.floor() as i32;
    let mu = nu - nl as f64;
    let seed = bessel_jy_asymptotic(mu, x);
    let mut yv = seed.y;
    let mut yvp = seed.yp;
    let mut ord = mu;
    for _ in 0..nl {
        let ynext = ord / x * yv - yvp;
        let ypnext = yv - (ord + 1.0) / x * ynext;
        yv = ynext;
        yvp = ypnext;
        ord += 1.0;
        if yv.abs() > 1e305 {
            return Err(SpecFunError::Overflow { kind: "Y", nu, x });
        }
    }
    let (f, _) = cf1(nu, x)?;
    let w = 2.0 / (std::f64::consts::PI * x);
    let j = w / (yvp - f * yv);
    let jp = f * j;
    Ok(CylPair { j, jp, y: yv, yp: yvp })
}

fn pq(nu: f64, x: f64) -> (f64, f64) {
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut k = 0u32;
    // P collects even terms, Q odd ones; signs alternate every other term
    loop {
        let kf = k as f64;
        let num = mu4 - (2.0 * kf + 1.0) * (2.0 * kf + 1.0);
        term *= num / (8.0 * x * (kf + 1.0));
        let contrib = term;
        match k % 4 {
            0 => q += contrib,
            1 => p -= contrib,
            2 => q -= contrib,
            _ => p += contrib,
        }
        k += 1;
        if contrib.abs() < 1e-17 * (p.abs() + q.abs()) || k > 60 {
            break;
        }
    }
    (p, q)
}

pub fn bessel_jy_asymptotic(nu: f64, x: f64) -> CylPair {
    let (p, q) = pq(nu, x);
    // order nu+1 values feed the derivative identities
    let (p1, q1) = pq(nu + 1.0, x);
    let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
    // w = x - theta with theta = (nu/2 + 1/4) pi. Forming x - theta directly
    // loses ulp(x) of phase at large x, so expand sin/cos(x - theta) instead;
    // the standard library reduces the large argument of sin(x)/cos(x)
    // internally to full precision.
    let theta = (0.5 * nu + 0.25) * std::f64::consts::PI;
    let theta = theta % (2.0 * std::f64::consts::PI);
    let (sx, cx) = x.sin_cos();
    let (st, ct) = theta.sin_cos();
    let sw = sx * ct - cx * st;
    let cw = cx * ct + sx * st;
    let j = amp * (p * cw - q * sw);
    let y = amp * (p * sw + q * cw);
    // w shifts by -pi/2 for order nu+1: cos(w1) = sin(w), sin(w1) = -cos(w)
    let j1 = amp * (p1 * sw + q1 * cw);
    let y1 = amp * (-p1 * cw + q1 * sw);
    // C'_nu = (nu/x) C_nu - C_{nu+1}
    let jp = nu / x * j - j1;
    let yp = nu / x * y - y1;
    CylPair { j, jp, y, yp }
}
