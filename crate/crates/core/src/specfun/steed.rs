//! J/Y evaluation of real order by Steed's method: the CF1 continued
//! fraction for J'/J, order reduction to mu with |mu| <= 1/2 (small x) or
//! mu close to x (moderate x), Temme's series or the CF2 continued fraction
//! at mu, and stable forward recurrence for Y back up to the target order.

use super::gamma::temme_chi;
use super::SpecFunError;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 400_000;
const XMIN: f64 = 2.0;
/// |values| beyond this are treated as overflow of the function itself.
const HUGE: f64 = 1e305;

/// J, J', Y, Y' at a common order and argument.
#[derive(Debug, Clone, Copy)]
pub struct CylPair {
    pub j: f64,
    pub jp: f64,
    pub y: f64,
    pub yp: f64,
}

/// CF1: J'_nu/J_nu by the modified Lentz algorithm, together with the sign
/// of J_nu implied by the denominator sign flips.
pub(super) fn cf1(nu: f64, x: f64) -> Result<(f64, f64), SpecFunError> {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut isign = 1.0_f64;
    let mut h = nu * xi;
    if h < FPMIN {
        h = FPMIN;
    }
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            return Ok((h, isign));
        }
    }
    Err(SpecFunError::NoConvergence { what: "CF1", nu, x })
}

/// Evaluate J_nu, J'_nu, Y_nu, Y'_nu for nu >= 0, x > 0 in the Steed regime
/// (x below the large-argument asymptotic threshold).
pub fn bessel_jy_steed(nu: f64, x: f64) -> Result<CylPair, SpecFunError> {
    debug_assert!(nu >= 0.0 && x > 0.0);

    let nl = if x < XMIN {
        (nu + 0.5) as i32
    } else {
        ((nu - x + 1.5) as i32).max(0)
    };
    let mu = nu - nl as f64;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / std::f64::consts::PI; // Wronskian J Y' - J' Y = 2/(pi x)

    let (h, isign) = cf1(nu, x)?;

    // Backward recurrence from nu down to mu. The whole quartet is rescaled
    // together when the unnormalized values approach overflow; the common
    // factor cancels in the final ratio, and a target value that underflows
    // in the process is genuinely below the f64 range.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl; // unnormalized J at the target order nu
    let mut rjp1 = rjpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > 1e250 {
            rjl *= 1e-250;
            rjpl *= 1e-250;
            rjl1 *= 1e-250;
            rjp1 *= 1e-250;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl; // J'_mu / J_mu

    let (rjmu, rymu, rymup, ry1);
    if x < XMIN {
        // Temme's series for Y_mu and Y_{mu+1}.
        let x2 = 0.5 * x;
        let pimu = std::f64::consts::PI * mu;
        let fact1 = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let dln = -x2.ln();
        let e = mu * dln;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (chi1, chi2) = temme_chi(mu);
        let mut ff = 2.0 / std::f64::consts::PI * fact1 * (chi1 * e.cosh() + chi2 * fact2 * dln);
        let e = e.exp();
        let mut p = e / (super::gamma::inv_gamma(1.0 + mu) * std::f64::consts::PI);
        let mut q = 1.0 / (e * std::f64::consts::PI * super::gamma::inv_gamma(1.0 - mu));
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = std::f64::consts::PI * pimu2 * fact3 * fact3;
        let mut cc = 1.0;
        let dd = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut ok = false;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            cc *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = cc * (ff + r * q);
            sum += del;
            let del1 = cc * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(SpecFunError::NoConvergence { what: "Temme series", nu, x });
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        rymup = mu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2 for p + i q = (J'_mu - i Y'_mu)/(J_mu - i Y_mu) by complex Lentz.
        let mut a = 0.25 - mu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let dlr = cr * dr - ci * di;
        let dli = cr * di + ci * dr;
        let temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut ok = false;
        for i in 2..MAX_ITER {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            let fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di = -di / den;
            let dlr = cr * dr - ci * di;
            let dli = cr * di + ci * dr;
            let temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(SpecFunError::NoConvergence { what: "CF2", nu, x });
        }
        let gam = (p - f) / q;
        let mut rj = (w / ((p - f) * gam + q)).sqrt();
        if rjl < 0.0 {
            rj = -rj;
        }
        rjmu = rj;
        rymu = rjmu * gam;
        rymup = rymu * (p + q / gam);
        ry1 = mu * xi * rymu - rymup;
    }

    // Normalize J at the target order.
    let norm = rjmu / rjl;
    let j = rjl1 * norm;
    let jp = rjp1 * norm;

    // Forward recurrence for Y from mu up to nu.
    let mut rymu = rymu;
    let mut ry1 = ry1;
    for i in 1..=nl {
        let rytemp = (mu + i as f64) * xi2 * ry1 - rymu;
        if rytemp.abs() > HUGE {
            return Err(SpecFunError::Overflow { kind: "Y", nu, x });
        }
        rymu = ry1;
        ry1 = rytemp;
    }
    let y = rymu;
    let yp = nu * xi * rymu - ry1;
    if !(y.is_finite() && j.is_finite()) {
        return Err(SpecFunError::Overflow { kind: "Y", nu, x });
    }
    Ok(CylPair { j, jp, y, yp })
}
