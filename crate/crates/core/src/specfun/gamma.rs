//! Gamma-function helpers for the Bessel evaluators.

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos g=7, n=9 coefficients (Godfrey's set, ~15 significant digits).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Gamma(x)| for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection keeps the Lanczos argument away from zero
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma(x) for x > 0, computed through the log form. Returns +inf on overflow.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// 1/Gamma(x) for any real x (zero at the poles x = 0, -1, -2, ...).
pub fn inv_gamma(x: f64) -> f64 {
    if x > 0.0 {
        (-ln_gamma(x)).exp()
    } else if x == x.floor() {
        0.0
    } else {
        // 1/Gamma(x) = Gamma(1-x) sin(pi x)/pi
        let lg = ln_gamma(1.0 - x);
        (std::f64::consts::PI * x).sin() / std::f64::consts::PI * lg.exp()
    }
}

// zeta values for the small-|mu| expansions below
const ZETA3: f64 = 1.202_056_903_159_594_2;
const ZETA5: f64 = 1.036_927_755_143_37;
const ZETA7: f64 = 1.008_349_277_381_922_8;

/// Temme's auxiliary pair for the small-argument Y series:
/// chi1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continued to mu = 0,
/// chi2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
///
/// Requires |mu| <= 1/2.
pub fn temme_chi(mu: f64) -> (f64, f64) {
    debug_assert!(mu.abs() <= 0.5 + 1e-12);
    if mu.abs() < 1e-3 {
        // 1/Gamma(1 +- mu) = exp(+-odd - even) with
        // odd  = gamma*mu + zeta3 mu^3/3 + zeta5 mu^5/5 + ...
        // even = zeta2 mu^2/2 + zeta4 mu^4/4 + ...
        let mu2 = mu * mu;
        let odd_over_mu = EULER_GAMMA + mu2 * (ZETA3 / 3.0 + mu2 * (ZETA5 / 5.0 + mu2 * ZETA7 / 7.0));
        let odd = odd_over_mu * mu;
        let even = mu2 * (std::f64::consts::PI * std::f64::consts::PI / 12.0
            + mu2 * (std::f64::consts::PI.powi(4) / 360.0));
        let damp = (-even).exp();
        // sinh(odd)/mu without cancellation at mu -> 0
        let sh = if odd.abs() < 1e-4 {
            odd_over_mu * (1.0 + odd * odd / 6.0)
        } else {
            odd.sinh() / mu
        };
        (-damp * sh, damp * odd.cosh())
    } else {
        let gp = inv_gamma(1.0 + mu);
        let gm = inv_gamma(1.0 - mu);
        ((gm - gp) / (2.0 * mu), 0.5 * (gm + gp))
    }
}
