//! Ascending power series for J and I, in plain and power-scaled form.

use super::gamma::ln_gamma;

const MAX_TERMS: usize = 600;

/// True when the ascending J series suffers no catastrophic cancellation:
/// the first term is then also the largest one.
pub fn j_series_safe(nu: f64, x: f64) -> bool {
    x <= 2.0 || x * x <= 2.56 * (nu + 1.0)
}

/// J_nu(x) by ascending series. Caller is responsible for `j_series_safe`.
pub fn j_series(nu: f64, x: f64) -> f64 {
    // leading term (x/2)^nu / Gamma(nu+1) in log form so large nu cannot
    // overflow intermediates; genuine underflow returns 0
    let log_lead = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    if log_lead < -745.0 {
        return 0.0;
    }
    let mut term = log_lead.exp();
    let mut sum = term;
    let q = -0.25 * x * x;
    for k in 0..MAX_TERMS {
        let kf = (k + 1) as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= sum.abs() * 1e-18 {
            break;
        }
    }
    sum
}

/// x^p * J_nu(x) by the same series with the power shift fused into the
/// leading term. Finite all the way down to x = 1e-300 when p >= -nu.
pub fn j_series_scaled(nu: f64, x: f64, p: f64) -> f64 {
    let log_lead = (nu + p) * x.ln() - nu * std::f64::consts::LN_2 - ln_gamma(nu + 1.0);
    if log_lead < -745.0 {
        return 0.0;
    }
    if log_lead > 709.0 {
        return f64::INFINITY;
    }
    let mut term = log_lead.exp();
    let mut sum = term;
    let q = -0.25 * x * x;
    for k in 0..MAX_TERMS {
        let kf = (k + 1) as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.abs() <= sum.abs() * 1e-18 {
            break;
        }
    }
    sum
}

/// I_nu(x) by ascending series. All terms are positive so there is no
/// cancellation; usable whenever the result is representable (x <= ~700).
pub fn i_series(nu: f64, x: f64) -> f64 {
    let log_lead = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    if log_lead < -745.0 {
        return 0.0;
    }
    let mut term = log_lead.exp();
    let mut sum = term;
    let q = 0.25 * x * x;
    for k in 0..MAX_TERMS {
        let kf = (k + 1) as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term <= sum * 1e-18 {
            break;
        }
    }
    sum
}

/// I_nu evaluated at a purely imaginary argument i*x via the same series,
/// carried out in complex arithmetic. Test support for the rotation identity.
pub fn i_series_imag_arg(nu: f64, x: f64) -> num_complex::Complex64 {
    use num_complex::Complex64;
    // (ix/2)^nu = (x/2)^nu e^{i pi nu / 2} on the principal branch
    let log_lead = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0);
    if log_lead < -745.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = Complex64::from_polar(1.0, 0.5 * std::f64::consts::PI * nu);
    let mut term = phase * log_lead.exp();
    let mut sum = term;
    // (ix)^2/4 = -x^2/4
    let q = -0.25 * x * x;
    for k in 0..MAX_TERMS {
        let kf = (k + 1) as f64;
        term *= q / (kf * (nu + kf));
        sum += term;
        if term.norm() <= sum.norm() * 1e-18 {
            break;
        }
    }
    sum
}
