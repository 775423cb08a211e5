//! Free radial resolvent kernels on a radial grid: outgoing/incoming
//! boundary values, their imaginary parts and lambda-derivatives, the
//! spectral-measure density, and kernel application to mode functions.
//!
//! The kernel of the outgoing resolvent at order nu is
//!   (pi i / 2) (r s)^{-(n-2)/2} J_nu(lambda min) H1_nu(lambda max),
//! assembled here from power-scaled Bessel evaluations so every factor stays
//! finite at the cone tip.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::grid::RadialGrid;
use crate::linkspec::{LinkSpectrum, ModeIndex};
use crate::numerics::fd::fd_weights;
use crate::specfun::{
    bessel_dlambda, scaled_bessel, BesselKind, ScaledBesselRequest, SpecFunError,
};

#[derive(Debug, Clone, thiserror::Error)]
pub enum FreeResError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("lambda = {0} rejected: the boundary-value kernels need lambda != 0")]
    InvalidLambda(f64),
    #[error("functions live on different grids")]
    GridMismatch,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Which boundary value (or part) of the resolvent a kernel holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelSign {
    /// outgoing limit, lambda + i0
    Plus,
    /// incoming limit, lambda - i0
    Minus,
    /// imaginary part (a real symmetric kernel)
    Im,
}

/// Dense kernel sampled on grid x grid at fixed (nu, lambda, sign, k).
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub grid: Arc<RadialGrid>,
    pub nu: f64,
    pub lambda: f64,
    pub sign: KernelSign,
    pub deriv_order: u32,
    pub values: DMatrix<Complex64>,
}

/// A radial function sampled on the grid nodes.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<Complex64>,
}

impl ModeFunction {
    pub fn from_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        ModeFunction { grid: grid.clone(), values }
    }

    pub fn from_real_fn(grid: &Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        ModeFunction { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// L2 norm in the cone measure r^{n-1} dr.
    pub fn norm_l2(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Weighted L1 norm of rho^alpha |f| in the cone measure.
    pub fn norm_l1_weighted(&self, alpha: f64) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(self.grid.nodes())
            .zip(&self.values)
            .map(|((w, r), v)| w * (1.0 + r).powf(alpha) * v.norm())
            .sum()
    }

    /// sup over nodes of rho^{-alpha} |f|.
    pub fn sup_weighted(&self, alpha: f64) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(r, v)| v.norm() / (1.0 + r).powf(alpha))
            .fold(0.0, f64::max)
    }
}

/// Scaled per-node factors of the outgoing free kernel, enough to assemble
/// entries or apply the kernel in O(N).
pub struct FreeKernelParts {
    pub grid: Arc<RadialGrid>,
    pub nu: f64,
    pub lambda: f64,
    /// (lambda r)^delta J_nu(lambda r) per node, delta = -(n-2)/2
    pub sj: Vec<f64>,
    /// (lambda r)^delta H1_nu(lambda r) per node
    pub sh: Vec<Complex64>,
    /// (pi i / 2) lambda^{n-2}
    pub prefactor: Complex64,
}

impl FreeKernelParts {
    /// Kernel entry at node pair (a, b) for the outgoing sign.
    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.prefactor * self.sj[lo] * self.sh[hi]
    }
}

/// Per-node scaled factors for the outgoing kernel at lambda > 0.
pub fn free_kernel_parts(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
) -> Result<FreeKernelParts, FreeResError> {
    if !(lambda > 0.0) {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    let n = grid.dim() as f64;
    let delta = -0.5 * (n - 2.0);
    let mut sj = Vec::with_capacity(grid.len());
    let mut sh = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let x = lambda * r;
        sj.push(scaled_bessel(ScaledBesselRequest { nu, x, power_shift: delta }, BesselKind::J)?.re);
        sh.push(scaled_bessel(ScaledBesselRequest { nu, x, power_shift: delta }, BesselKind::H1)?);
    }
    let prefactor = Complex64::new(0.0, 0.5 * std::f64::consts::PI) * lambda.powf(n - 2.0);
    Ok(FreeKernelParts { grid: grid.clone(), nu, lambda, sj, sh, prefactor })
}

/// Free resolvent kernel R_{0}(lambda +- i0) at order nu. Negative lambda is
/// folded onto positive lambda through the reflection identity
/// R(lambda + i0) = R(-lambda - i0).
pub fn free_kernel(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
) -> Result<KernelMatrix, FreeResError> {
    if lambda == 0.0 {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    let (mag, eff_sign) = fold_lambda(lambda, sign)?;
    let parts = free_kernel_parts(grid, nu, mag)?;
    let m = grid.len();
    let mut values = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        for b in 0..m {
            let v = parts.entry(a, b);
            values[(a, b)] = if eff_sign == KernelSign::Minus { v.conj() } else { v };
        }
    }
    Ok(KernelMatrix { grid: grid.clone(), nu, lambda, sign, deriv_order: 0, values })
}

fn fold_lambda(lambda: f64, sign: KernelSign) -> Result<(f64, KernelSign), FreeResError> {
    match sign {
        KernelSign::Im => Err(FreeResError::Invalid(
            "use im_free_kernel for the imaginary part".into(),
        )),
        s if lambda > 0.0 => Ok((lambda, s)),
        KernelSign::Plus => Ok((-lambda, KernelSign::Minus)),
        KernelSign::Minus => Ok((-lambda, KernelSign::Plus)),
    }
}

/// k-th lambda-derivative of the free kernel, expanded by the product rule
/// and the exact order recurrence. Entries lose the tip-scaled safety of the
/// k = 0 path, which is fine for the moderate orders the scans use.
pub fn free_kernel_dlambda(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    k: u32,
) -> Result<KernelMatrix, FreeResError> {
    if k == 0 {
        return free_kernel(grid, nu, lambda, sign);
    }
    if lambda == 0.0 {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    let (mag, eff_sign) = fold_lambda(lambda, sign)?;
    // derivative reflection: for the folded kernel K(lambda) = conj(K(-lambda)),
    // the k-th derivative picks up (-1)^k together with the conjugation
    let flip = if lambda < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };

    let n = grid.dim() as f64;
    let delta = -0.5 * (n - 2.0);
    let m = grid.len();
    // dj[i][a] = r^delta d^i/dlambda^i J_nu(lambda r), same for the H1 side
    let mut dj = vec![vec![0.0f64; m]; (k + 1) as usize];
    let mut dh = vec![vec![Complex64::new(0.0, 0.0); m]; (k + 1) as usize];
    for (a, &r) in grid.nodes().iter().enumerate() {
        let rdelta = r.powf(delta);
        for i in 0..=k {
            dj[i as usize][a] = bessel_dlambda(BesselKind::J, nu, mag, r, i)?.re * rdelta;
            dh[i as usize][a] = bessel_dlambda(BesselKind::H1, nu, mag, r, i)? * rdelta;
        }
    }
    let pref = Complex64::new(0.0, 0.5 * std::f64::consts::PI);
    let mut values = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let binom = binomial_row(k);
    for a in 0..m {
        for b in 0..m {
            // J rides the smaller radius, H1 the larger
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..=k as usize {
                let c = binom[i];
                if grid.nodes()[a] <= grid.nodes()[b] {
                    acc += dj[i][a] * dh[k as usize - i][b] * c;
                } else {
                    acc += dj[i][b] * dh[k as usize - i][a] * c;
                }
            }
            let v = pref * acc * flip;
            values[(a, b)] = if eff_sign == KernelSign::Minus { v.conj() } else { v };
        }
    }
    Ok(KernelMatrix { grid: grid.clone(), nu, lambda, sign, deriv_order: k, values })
}

fn binomial_row(k: u32) -> Vec<f64> {
    let mut row = vec![1.0f64];
    for i in 0..k {
        let last = *row.last().unwrap();
        row.push(last * (k - i) as f64 / (i + 1) as f64);
    }
    row
}

/// k-th lambda-derivative of Im R_0: a real symmetric kernel built from the
/// product J_nu(lambda r) J_nu(lambda s).
pub fn im_free_kernel(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    k: u32,
) -> Result<KernelMatrix, FreeResError> {
    if lambda == 0.0 {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    if k > 8 {
        return Err(FreeResError::Invalid(format!("derivative order {k} exceeds 8")));
    }
    let mag = lambda.abs();
    // Im R(lambda) is odd under lambda -> -lambda; derivatives alternate
    let flip = if lambda < 0.0 && k % 2 == 0 { -1.0 } else { 1.0 };
    let n = grid.dim() as f64;
    let delta = -0.5 * (n - 2.0);
    let m = grid.len();
    let binom = binomial_row(k);

    let mut cols = Vec::with_capacity((k + 1) as usize);
    if k == 0 {
        // fully scaled path, finite down to the tip for every nu
        let mut v = Vec::with_capacity(m);
        for &r in grid.nodes() {
            let x = mag * r;
            v.push(
                scaled_bessel(ScaledBesselRequest { nu, x, power_shift: delta }, BesselKind::J)?.re,
            );
        }
        cols.push(v);
    } else {
        for i in 0..=k {
            let mut v = Vec::with_capacity(m);
            for &r in grid.nodes() {
                let rdelta = r.powf(delta);
                v.push(bessel_dlambda(BesselKind::J, nu, mag, r, i)?.re * rdelta);
            }
            cols.push(v);
        }
    }

    let scale = if k == 0 { 0.5 * std::f64::consts::PI * mag.powf(n - 2.0) } else { 0.5 * std::f64::consts::PI };
    let mut values = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        for b in 0..m {
            let mut acc = 0.0;
            if k == 0 {
                acc = cols[0][a] * cols[0][b];
            } else {
                for i in 0..=k as usize {
                    acc += binom[i] * cols[i][a] * cols[k as usize - i][b];
                }
            }
            values[(a, b)] = Complex64::new(flip * scale * acc, 0.0);
        }
    }
    Ok(KernelMatrix { grid: grid.clone(), nu, lambda, sign: KernelSign::Im, deriv_order: k, values })
}

/// Apply a kernel to a mode function through the grid quadrature:
/// u(r_a) = sum_b K(a,b) f(r_b) w_b.
pub fn apply_kernel(k: &KernelMatrix, f: &ModeFunction) -> Result<ModeFunction, FreeResError> {
    if k.grid.fingerprint() != f.grid.fingerprint() {
        return Err(FreeResError::GridMismatch);
    }
    let w = k.grid.weights();
    let m = k.grid.len();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for a in 0..m {
        let mut acc = Complex64::new(0.0, 0.0);
        for b in 0..m {
            acc += k.values[(a, b)] * f.values[b] * w[b];
        }
        out[a] = acc;
    }
    Ok(ModeFunction { grid: f.grid.clone(), values: out })
}

/// O(N) application of the outgoing free kernel through prefix/suffix sums
/// over the min/max split.
pub fn apply_free_fast(
    parts: &FreeKernelParts,
    f: &ModeFunction,
) -> Result<ModeFunction, FreeResError> {
    if parts.grid.fingerprint() != f.grid.fingerprint() {
        return Err(FreeResError::GridMismatch);
    }
    let m = parts.grid.len();
    let w = parts.grid.weights();
    // prefix[a] = sum_{b < a} sj[b] f[b] w[b]
    let mut prefix = vec![Complex64::new(0.0, 0.0); m + 1];
    for b in 0..m {
        prefix[b + 1] = prefix[b] + parts.sj[b] * f.values[b] * w[b];
    }
    // suffix[a] = sum_{b >= a} sh[b] f[b] w[b]
    let mut suffix = vec![Complex64::new(0.0, 0.0); m + 1];
    for b in (0..m).rev() {
        suffix[b] = suffix[b + 1] + parts.sh[b] * f.values[b] * w[b];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    for a in 0..m {
        out[a] = parts.prefactor * (parts.sh[a] * prefix[a] + parts.sj[a] * suffix[a]);
    }
    Ok(ModeFunction { grid: f.grid.clone(), values: out })
}

/// Continuous spectral-measure density at lambda > 0 for the listed modes,
/// folded onto the half line: D_j(lambda) = (2 lambda / pi) Im R_{0,j}.
/// Integrating D_j over (0, infinity) resolves the identity.
pub fn spectral_density(
    grid: &Arc<RadialGrid>,
    spectrum: &LinkSpectrum,
    lambda: f64,
    modes: &[ModeIndex],
) -> Result<Vec<KernelMatrix>, FreeResError> {
    if !(lambda > 0.0) {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    let scale = 2.0 * lambda / std::f64::consts::PI;
    modes
        .iter()
        .map(|&j| {
            let mut k = im_free_kernel(grid, spectrum.nu(j), lambda, 0)?;
            k.values.iter_mut().for_each(|v| *v *= scale);
            Ok(k)
        })
        .collect()
}

/// Apply the outgoing free kernel to analytically known data, splitting the
/// radial integral at each target node. The split removes the derivative
/// kink of the min/max kernel from the quadrature panels, which the plain
/// Nystrom sum cannot do; use this wherever pointwise accuracy of u = K f
/// itself is needed (the Green-identity oracle, closed-form comparisons).
pub fn apply_free_split(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    f: &dyn Fn(f64) -> f64,
) -> Result<ModeFunction, FreeResError> {
    if !(lambda > 0.0) {
        return Err(FreeResError::InvalidLambda(lambda));
    }
    let n = grid.dim() as f64;
    let delta = -0.5 * (n - 2.0);
    let (gx, gw) = crate::numerics::gauss::gauss_legendre(16);
    let sj = |s: f64| -> Result<f64, FreeResError> {
        Ok(scaled_bessel(
            ScaledBesselRequest { nu, x: lambda * s, power_shift: delta },
            BesselKind::J,
        )?
        .re)
    };
    let sh = |s: f64| -> Result<Complex64, FreeResError> {
        Ok(scaled_bessel(
            ScaledBesselRequest { nu, x: lambda * s, power_shift: delta },
            BesselKind::H1,
        )?)
    };
    // integral of g over [a, b] against s^{n-1} ds by one GL panel
    let seg_j = |a: f64, b: f64| -> Result<f64, FreeResError> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in gx.iter().zip(&gw) {
            let s = mid + half * x;
            acc += w * sj(s)? * f(s) * s.powf(n - 1.0);
        }
        Ok(acc * half)
    };
    let seg_h = |a: f64, b: f64| -> Result<Complex64, FreeResError> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in gx.iter().zip(&gw) {
            let s = mid + half * x;
            acc += sh(s)? * (w * f(s) * s.powf(n - 1.0));
        }
        Ok(acc * half)
    };

    let edges = grid.panel_edges();
    let prefactor = Complex64::new(0.0, 0.5 * std::f64::consts::PI) * lambda.powf(n - 2.0);
    let mut out = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        // lower part: whole panels below r plus the partial panel up to r
        let mut lower = 0.0;
        let mut upper = Complex64::new(0.0, 0.0);
        for win in edges.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= r {
                lower += seg_j(a, b)?;
            } else if a >= r {
                upper += seg_h(a, b)?;
            } else {
                lower += seg_j(a, r)?;
                upper += seg_h(r, b)?;
            }
        }
        out.push(prefactor * (sh(r)? * lower + Complex64::new(sj(r)?, 0.0) * upper));
    }
    Ok(ModeFunction { grid: grid.clone(), values: out })
}

/// Relative residual of the radial Helmholtz equation for u = K f:
/// || (d_rr + (n-1)/r d_r - mu^2/r^2 + lambda^2) u + f || / || f ||
/// over interior nodes r in [r_lo, r_hi], using 5-point finite-difference
/// weights on the (nonuniform) grid. u is built by the split application so
/// the finite differences see the true solution, not quadrature kinks.
pub fn green_residual(
    grid: &Arc<RadialGrid>,
    nu: f64,
    mu2: f64,
    lambda: f64,
    f: &dyn Fn(f64) -> f64,
    r_lo: f64,
    r_hi: f64,
) -> Result<f64, FreeResError> {
    let u = apply_free_split(grid, nu, lambda, f)?;
    let nodes = grid.nodes();
    let m = nodes.len();
    let n = grid.dim() as f64;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for a in 2..m - 2 {
        let r = nodes[a];
        if r < r_lo || r > r_hi {
            continue;
        }
        let stencil = &nodes[a - 2..=a + 2];
        let wts = fd_weights(r, stencil, 2);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for (i, b) in (a - 2..=a + 2).enumerate() {
            d1 += wts[1][i] * u.values[b];
            d2 += wts[2][i] * u.values[b];
        }
        let lu = d2 + d1 * ((n - 1.0) / r)
            + u.values[a] * (lambda * lambda - mu2 / (r * r));
        let res = lu + f(r);
        let w = grid.weights()[a];
        num += w * res.norm_sqr();
        den += w * f(r) * f(r);
    }
    if den == 0.0 {
        return Err(FreeResError::Invalid("test function vanishes on the interior window".into()));
    }
    Ok((num / den).sqrt())
}

#[cfg(test)]
mod tests;
