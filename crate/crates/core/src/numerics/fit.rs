//! Log-log power-law fitting for exponent scans.

/// Result of a least-squares line fit of ln(y) against ln(x).
#[derive(Debug, Clone, Copy)]
pub struct PowerFit {
    /// fitted exponent (slope in log-log space)
    pub slope: f64,
    /// fitted log-prefactor (intercept)
    pub intercept: f64,
    /// RMS of the log residuals about the fitted line
    pub residual_rms: f64,
    /// standard error of the slope estimate
    pub slope_stderr: f64,
}

/// Fit y ~ C x^p through (x, y) samples with positive entries.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> PowerFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 3, "need at least 3 samples for a fit");
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let dof = (lx.len().max(3) - 2) as f64;
    let residual_rms = (ss_res / dof).sqrt();
    let slope_stderr = (ss_res / dof / sxx).sqrt();
    PowerFit { slope, intercept, residual_rms, slope_stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let xs: Vec<f64> = (1..20).map(|i| 1.3f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.7 * x.powf(-1.5)).collect();
        let fit = fit_power_law(&xs, &ys);
        assert!((fit.slope + 1.5).abs() < 1e-12);
        assert!(fit.residual_rms < 1e-12);
    }

    #[test]
    fn noisy_fit_reports_residual() {
        let xs: Vec<f64> = (1..30).map(|i| 1.2f64.powi(i)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .enumerate()
            .map(|(i, x)| x.powf(2.0) * (1.0 + 0.02 * ((i as f64).sin())))
            .collect();
        let fit = fit_power_law(&xs, &ys);
        assert!((fit.slope - 2.0).abs() < 0.02);
        assert!(fit.residual_rms > 1e-4 && fit.residual_rms < 0.05);
    }
}
