//! Perturbed radial resolvents: direct Nystrom solves of
//! R_V = R_0 (1 + V R_0)^{-1}, the Birman-Schwinger partial series with its
//! sandwiched remainder, Fredholm resonance indicators on weighted spaces,
//! and Jost solutions of the radial scattering problem.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::freeres::{
    apply_free_fast, free_kernel, free_kernel_parts, FreeKernelParts, FreeResError, KernelMatrix,
    KernelSign, ModeFunction,
};
use crate::grid::RadialGrid;
use crate::numerics::opnorm::{smax_dense, smin_dense};

#[derive(Debug, Clone, thiserror::Error)]
pub enum PerturbError {
    #[error(transparent)]
    FreeRes(#[from] FreeResError),
    #[error("near-singular Fredholm solve at lambda={lambda} (possible resonance): {detail}")]
    NearSingular { lambda: f64, detail: String },
    #[error("Picard iteration did not contract: defect {defect:.3e} after {iterations} sweeps")]
    NoConvergence { defect: f64, iterations: usize },
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Built-in radial potential families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialShape {
    Zero,
    /// a exp(-(r/w)^2)
    Gaussian { amplitude: f64, width: f64 },
    /// -a (1+r)^{-2 sigma}; the decay exponent is the spec sigma
    PolyWell { amplitude: f64 },
    /// compactly supported mollifier a exp(1 - 1/(1 - u^2)), u = (r-c)/w
    Bump { amplitude: f64, center: f64, width: f64 },
}

/// Radial potential with its decay exponent and a certified envelope bound
/// sup |V| (1+r)^{2 sigma} over the grid.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub shape: PotentialShape,
    pub sigma: f64,
    bound: f64,
}

impl PotentialSpec {
    /// Certify the envelope constant by sampling every grid node plus a 10x
    /// oversampling of each gap.
    pub fn certified(shape: PotentialShape, sigma: f64, grid: &RadialGrid) -> Result<Self, PerturbError> {
        if !(sigma > 0.5) {
            return Err(PerturbError::Invalid(format!("decay exponent sigma={sigma} must be > 1/2")));
        }
        let mut spec = PotentialSpec { shape, sigma, bound: 0.0 };
        let mut bound = 0.0f64;
        let mut probe = |r: f64| {
            let v = spec.value(r).abs() * (1.0 + r).powf(2.0 * sigma);
            if v > bound {
                bound = v;
            }
        };
        let nodes = grid.nodes();
        probe(0.0);
        for (i, &r) in nodes.iter().enumerate() {
            probe(r);
            let next = if i + 1 < nodes.len() { nodes[i + 1] } else { grid.r_max() };
            for k in 1..=10 {
                probe(r + (next - r) * k as f64 / 10.0);
            }
        }
        if !bound.is_finite() {
            return Err(PerturbError::Invalid("potential envelope is not finite on the grid".into()));
        }
        spec.bound = bound;
        Ok(spec)
    }

    pub fn zero(grid: &RadialGrid) -> Self {
        PotentialSpec::certified(PotentialShape::Zero, 1.0, grid).expect("zero potential")
    }

    /// Potential value at radius r. The poly well folds its own sigma into
    /// the profile; the other shapes do not depend on sigma.
    pub fn value(&self, r: f64) -> f64 {
        match self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::Gaussian { amplitude, width } => {
                amplitude * (-(r / width) * (r / width)).exp()
            }
            PotentialShape::PolyWell { amplitude } => {
                -amplitude * (1.0 + r).powf(-2.0 * self.sigma)
            }
            PotentialShape::Bump { amplitude, center, width } => {
                let u = (r - center) / width;
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - u * u)).exp()
                }
            }
        }
    }

    /// Certified sup of |V| (1+r)^{2 sigma}.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, PotentialShape::Zero)
    }
}

/// I + diag(V w) K0: the Nystrom matrix of 1 + V R_0 acting with the grid
/// measure folded in.
fn fredholm_matrix(k0: &KernelMatrix, potential: &PotentialSpec) -> DMatrix<Complex64> {
    let grid = &k0.grid;
    let m = grid.len();
    let mut out = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        let scale = potential.value(grid.nodes()[a]) * grid.weights()[a];
        for b in 0..m {
            out[(a, b)] = k0.values[(a, b)] * scale;
        }
        out[(a, a)] += 1.0;
    }
    out
}

/// Perturbed resolvent kernel by direct dense solve:
/// K_V = K_0 (I + diag(V w) K_0)^{-1}, with the post-hoc residual check
/// || (I + K_0 W D_V) K_V - K_0 || <= 1e-8 || K_0 ||.
pub fn perturbed_kernel(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
) -> Result<KernelMatrix, PerturbError> {
    let k0 = free_kernel(grid, nu, lambda, sign)?;
    if potential.is_zero() {
        return Ok(k0);
    }
    let m = grid.len();
    let fred = fredholm_matrix(&k0, potential);
    // K_V = K_0 M^{-1}  <=>  M^T K_V^T = K_0^T
    let lu = fred.transpose().lu();
    let kvt = lu
        .solve(&k0.values.transpose())
        .ok_or_else(|| PerturbError::NearSingular { lambda, detail: "LU solve failed".into() })?;
    let kv = kvt.transpose();

    // residual check against the defining identity
    let mut residual = 0.0f64;
    let mut scale = 0.0f64;
    let w = grid.weights();
    let vals = &k0.values;
    // (I + K_0 W D_V) K_V - K_0, assembled without forming the product matrix twice
    let mut vw = vec![Complex64::new(0.0, 0.0); m];
    for b in 0..m {
        vw[b] = Complex64::new(potential.value(grid.nodes()[b]) * w[b], 0.0);
    }
    for a in 0..m {
        for b in 0..m {
            let mut acc = kv[(a, b)] - vals[(a, b)];
            for c in 0..m {
                acc += vals[(a, c)] * vw[c] * kv[(c, b)];
            }
            residual = residual.max(acc.norm());
            scale = scale.max(vals[(a, b)].norm());
        }
    }
    if !(residual <= 1e-8 * scale) {
        return Err(PerturbError::NearSingular {
            lambda,
            detail: format!("solve residual {residual:.3e} vs scale {scale:.3e}"),
        });
    }
    Ok(KernelMatrix { grid: grid.clone(), nu, lambda, sign, deriv_order: 0, values: kv })
}

/// Birman-Schwinger split of the perturbed kernel: the partial series
/// sum_{l=0}^{2M-1} K_0 (-T)^l with T = W D_V K_0, and the sandwiched
/// remainder [K_0 V]^M K_V [V K_0]^M. Their sum reproduces the direct solve
/// exactly at the discrete level.
pub fn birman_schwinger(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
    half_order: u32,
) -> Result<(KernelMatrix, KernelMatrix), PerturbError> {
    if half_order == 0 {
        return Err(PerturbError::Invalid("Birman-Schwinger order M must be >= 1".into()));
    }
    let m_ord = half_order as usize;
    let k0 = free_kernel(grid, nu, lambda, sign)?;
    let kv = perturbed_kernel(grid, nu, lambda, sign, potential)?;
    let grid_n = grid.len();

    let w = grid.weights();
    let dv: Vec<Complex64> =
        (0..grid_n).map(|b| Complex64::new(potential.value(grid.nodes()[b]), 0.0)).collect();

    // scale columns (kernel . D) or rows (D . kernel), and compose kernels
    // through the quadrature measure: A o B = A W B
    let col_scale = |a: &DMatrix<Complex64>, d: &[Complex64]| {
        let mut out = a.clone();
        for b in 0..grid_n {
            for r in 0..grid_n {
                out[(r, b)] *= d[b];
            }
        }
        out
    };
    let row_scale = |a: &DMatrix<Complex64>, d: &[Complex64]| {
        let mut out = a.clone();
        for r in 0..grid_n {
            for b in 0..grid_n {
                out[(r, b)] *= d[r];
            }
        }
        out
    };
    let compose = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| {
        let mut aw = a.clone();
        for c in 0..grid_n {
            let wc = Complex64::new(w[c], 0.0);
            for r in 0..grid_n {
                aw[(r, c)] *= wc;
            }
        }
        &aw * b
    };

    // partial series
    let mut series = k0.values.clone();
    let mut term = k0.values.clone();
    for _ in 1..(2 * m_ord) {
        // term <- term o (-V K_0) = - term W D_V K_0
        let scaled = row_scale(&k0.values, &dv);
        term = compose(&term, &scaled) * Complex64::new(-1.0, 0.0);
        series += &term;
    }

    // remainder [K_0 V]^M K_V [V K_0]^M
    let k0v = col_scale(&k0.values, &dv);
    let vk0 = row_scale(&k0.values, &dv);
    let mut left = k0v.clone();
    let mut right = vk0.clone();
    for _ in 1..m_ord {
        left = compose(&left, &k0v);
        right = compose(&right, &vk0);
    }
    let remainder = compose(&compose(&left, &kv.values), &right);

    let series_k = KernelMatrix {
        grid: grid.clone(),
        nu,
        lambda,
        sign,
        deriv_order: 0,
        values: series,
    };
    let remainder_k = KernelMatrix {
        grid: grid.clone(),
        nu,
        lambda,
        sign,
        deriv_order: 0,
        values: remainder,
    };
    Ok((series_k, remainder_k))
}

/// k-th lambda-derivative of the perturbed kernel through the recursion
/// (I + K_0 W D_V) d^k K_V = d^k K_0
///   - sum_{i=1}^{k} C(k,i) (d^i K_0) W D_V (d^{k-i} K_V),
/// reusing one LU factorization across all orders.
pub fn perturbed_kernel_dlambda(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
    k: u32,
) -> Result<KernelMatrix, PerturbError> {
    if potential.is_zero() {
        return Ok(crate::freeres::free_kernel_dlambda(grid, nu, lambda, sign, k)?);
    }
    let m = grid.len();
    let vw: Vec<Complex64> = (0..m)
        .map(|b| Complex64::new(potential.value(grid.nodes()[b]) * grid.weights()[b], 0.0))
        .collect();
    let d0 = free_kernel(grid, nu, lambda, sign)?;
    // (I + K_0 W D_V): column-scaled free kernel plus identity
    let mut lhs = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        for b in 0..m {
            lhs[(a, b)] = d0.values[(a, b)] * vw[b];
        }
        lhs[(a, a)] += 1.0;
    }
    let lu = lhs.lu();
    let mut free_derivs = vec![d0.values.clone()];
    for i in 1..=k {
        free_derivs.push(crate::freeres::free_kernel_dlambda(grid, nu, lambda, sign, i)?.values);
    }
    let mut kv_derivs: Vec<DMatrix<Complex64>> = Vec::with_capacity(k as usize + 1);
    for order in 0..=k as usize {
        let mut rhs = free_derivs[order].clone();
        let mut binom = 1.0f64;
        for i in 1..=order {
            binom = binom * (order - i + 1) as f64 / i as f64;
            // rhs -= C(order, i) (d^i K_0) W D_V (d^{order-i} K_V)
            let mut scaled = kv_derivs[order - i].clone();
            for a in 0..m {
                for b in 0..m {
                    scaled[(a, b)] *= vw[a];
                }
            }
            rhs -= (&free_derivs[i] * &scaled) * Complex64::new(binom, 0.0);
        }
        let sol = lu.solve(&rhs).ok_or_else(|| PerturbError::NearSingular {
            lambda,
            detail: format!("derivative solve failed at order {order}"),
        })?;
        kv_derivs.push(sol);
    }
    Ok(KernelMatrix {
        grid: grid.clone(),
        nu,
        lambda,
        sign,
        deriv_order: k,
        values: kv_derivs.pop().expect("at least one order"),
    })
}

/// Fredholm health report over a ladder of lambdas.
#[derive(Debug, Clone)]
pub struct FredholmReport {
    pub lambdas: Vec<f64>,
    pub smin: Vec<f64>,
    /// true where the indicator dips below threshold and the dip persists
    /// under grid refinement
    pub flags: Vec<bool>,
    pub threshold: f64,
    /// indicator approaches 1 monotonically over the last samples
    pub tail_monotone: bool,
}

/// Smallest singular value of the weighted operator
/// I + rho^sigma V R_0 rho^{-sigma} on the symmetrized grid.
pub fn fredholm_indicator(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
) -> Result<f64, PerturbError> {
    Ok(smin_dense(&weighted_fredholm_matrix(grid, nu, lambda, sign, potential)?))
}

/// Largest singular value of the compact part rho^sigma V R_0 rho^{-sigma};
/// the Neumann bound guarantees the indicator >= 1 - this norm.
pub fn fredholm_compact_norm(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
) -> Result<f64, PerturbError> {
    let mut m = weighted_fredholm_matrix(grid, nu, lambda, sign, potential)?;
    for a in 0..grid.len() {
        m[(a, a)] -= 1.0;
    }
    Ok(smax_dense(&m))
}

fn weighted_fredholm_matrix(
    grid: &Arc<RadialGrid>,
    nu: f64,
    lambda: f64,
    sign: KernelSign,
    potential: &PotentialSpec,
) -> Result<DMatrix<Complex64>, PerturbError> {
    let k0 = free_kernel(grid, nu, lambda, sign)?;
    let m = grid.len();
    let sigma = potential.sigma;
    let mut out = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        let ra = grid.nodes()[a];
        let row = potential.value(ra) * (1.0 + ra).powf(sigma) * grid.weights()[a].sqrt();
        for b in 0..m {
            let rb = grid.nodes()[b];
            let col = (1.0 + rb).powf(-sigma) * grid.weights()[b].sqrt();
            out[(a, b)] = k0.values[(a, b)] * (row * col);
        }
        out[(a, a)] += 1.0;
    }
    Ok(out)
}

/// Scan the Fredholm indicator over a sorted, positive lambda ladder. Dips
/// below the threshold are re-tested on a doubled grid before being flagged
/// as physical.
pub fn fredholm_scan(
    grid: &Arc<RadialGrid>,
    nu: f64,
    potential: &PotentialSpec,
    lambdas: &[f64],
    sign: KernelSign,
) -> Result<FredholmReport, PerturbError> {
    if lambdas.windows(2).any(|w| w[1] <= w[0]) || lambdas.first().is_none_or(|&l| l <= 0.0) {
        return Err(PerturbError::Invalid("lambda ladder must be positive and sorted".into()));
    }
    let threshold = 1e-6;
    let mut smin = Vec::with_capacity(lambdas.len());
    let mut flags = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let s = fredholm_indicator(grid, nu, lambda, sign, potential)?;
        let mut flag = false;
        if s < threshold {
            // refinement confirmation: rebuild at twice the node count
            let fine = crate::grid::build_grid(
                grid.dim(),
                grid.r_max(),
                grid.len() * 2,
                crate::grid::GridScheme::Geometric { panel_order: 16 },
            )
            .map_err(|e| PerturbError::Invalid(e.to_string()))?;
            let s2 = fredholm_indicator(&fine, nu, lambda, sign, potential)?;
            flag = s2 < threshold;
        }
        smin.push(s);
        flags.push(flag);
    }
    let tail = &smin[smin.len().saturating_sub(4)..];
    let tail_monotone = tail.windows(2).all(|w| w[1] >= w[0] - 1e-9) || tail.iter().all(|&s| s > 0.9);
    Ok(FredholmReport { lambdas: lambdas.to_vec(), smin, flags, threshold, tail_monotone })
}

/// Support-restricted fast solver for K_V built on the rank-structured free
/// kernel: the Fredholm correction is factored on the nodes where V is
/// numerically nonzero, so applications cost O(N) plus a small dense solve.
pub struct PerturbedSolver {
    parts: FreeKernelParts,
    support: Vec<usize>,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
    vw_support: Vec<f64>,
}

impl PerturbedSolver {
    pub fn new(
        grid: &Arc<RadialGrid>,
        nu: f64,
        lambda: f64,
        potential: &PotentialSpec,
    ) -> Result<Self, PerturbError> {
        let parts = free_kernel_parts(grid, nu, lambda)?;
        let vmax = grid.nodes().iter().map(|&r| potential.value(r).abs()).fold(0.0, f64::max);
        let support: Vec<usize> = (0..grid.len())
            .filter(|&b| potential.value(grid.nodes()[b]).abs() > 1e-14 * vmax)
            .collect();
        let s = support.len();
        let vw_support: Vec<f64> = support
            .iter()
            .map(|&b| potential.value(grid.nodes()[b]) * grid.weights()[b])
            .collect();
        // I_S + diag(vw) (K_0)_SS
        let mut small = DMatrix::from_element(s, s, Complex64::new(0.0, 0.0));
        for (i, &a) in support.iter().enumerate() {
            for (j, &b) in support.iter().enumerate() {
                small[(i, j)] = parts.entry(a, b) * vw_support[i];
            }
            small[(i, i)] += 1.0;
        }
        let lu = small.lu();
        Ok(PerturbedSolver { parts, support, lu, vw_support })
    }

    pub fn lambda(&self) -> f64 {
        self.parts.lambda
    }

    /// u = K_V (W f): the perturbed resolvent applied through the measure.
    pub fn apply(&self, f: &ModeFunction) -> Result<ModeFunction, PerturbError> {
        let z1 = apply_free_fast(&self.parts, f)?;
        if self.support.is_empty() {
            return Ok(z1);
        }
        // rhs = diag(vw) z1 |_S ; solve (I + diag(vw) K0_SS) q = rhs
        let rhs = DVector::from_fn(self.support.len(), |i, _| {
            z1.values[self.support[i]] * self.vw_support[i]
        });
        let q = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| PerturbError::NearSingular { lambda: self.parts.lambda, detail: "support solve failed".into() })?;
        // u = z1 - K0 W v with v = q / w on the support
        let mut v = ModeFunction::zeros(&self.parts.grid);
        for (i, &b) in self.support.iter().enumerate() {
            v.values[b] = q[i] / self.parts.grid.weights()[b];
        }
        let corr = apply_free_fast(&self.parts, &v)?;
        let mut out = z1;
        for b in 0..out.values.len() {
            out.values[b] -= corr.values[b];
        }
        Ok(out)
    }

    /// [Im K_V](W f) through K_V(+i0) and its conjugate kernel.
    pub fn apply_im(&self, f: &ModeFunction) -> Result<ModeFunction, PerturbError> {
        let plus = self.apply(f)?;
        let fbar = ModeFunction {
            grid: f.grid.clone(),
            values: f.values.iter().map(|v| v.conj()).collect(),
        };
        let minus = self.apply(&fbar)?;
        let two_i = Complex64::new(0.0, 2.0);
        let values = plus
            .values
            .iter()
            .zip(&minus.values)
            .map(|(p, q)| (p - q.conj()) / two_i)
            .collect();
        Ok(ModeFunction { grid: f.grid.clone(), values })
    }
}

/// Jost solutions and their diagnostics on a radial grid.
#[derive(Debug, Clone)]
pub struct JostSolutions {
    /// ascending radii
    pub r: Vec<f64>,
    pub u_plus: Vec<Complex64>,
    pub u_minus: Vec<Complex64>,
    pub du_plus: Vec<Complex64>,
    pub du_minus: Vec<Complex64>,
    pub iterations: usize,
    pub defect: f64,
}

impl JostSolutions {
    /// Modified Wronskian r^{n-1}(u_+ u_-' - u_+' u_-) per node.
    pub fn modified_wronskian(&self, dim: u32) -> Vec<Complex64> {
        self.r
            .iter()
            .zip(self.u_plus.iter().zip(&self.du_plus))
            .zip(self.u_minus.iter().zip(&self.du_minus))
            .map(|((r, (up, dup)), (um, dum))| {
                r.powi(dim as i32 - 1) * (up * dum - dup * um)
            })
            .collect()
    }

    /// Max relative drift of the modified Wronskian across the grid.
    pub fn wronskian_drift(&self, dim: u32) -> f64 {
        let w = self.modified_wronskian(dim);
        let reference = w[w.len() - 1];
        w.iter().map(|v| (v - reference).norm()).fold(0.0, f64::max) / reference.norm()
    }
}

/// Truncation radius with int_R^inf |V| below 1e-10, from the certified
/// envelope bound.
pub fn jost_r_max(potential: &PotentialSpec) -> f64 {
    let two_sigma = 2.0 * potential.sigma;
    let a = potential.bound().max(1e-30);
    // a (1+R)^{1-2 sigma} / (2 sigma - 1) < 1e-10
    let r = (a / ((two_sigma - 1.0) * 1e-10)).powf(1.0 / (two_sigma - 1.0)) - 1.0;
    r.clamp(30.0, 2e4)
}

/// Solve the Volterra equations for the Jost pair on a descending grid from
/// r_grid[0] = R_max by Picard iteration with the trapezoid rule. Both
/// solutions satisfy w'' + lambda^2 w = V w in the flattened variable
/// w = r^{(n-1)/2} u, and u_- is the complex conjugate of u_+ for real V.
pub fn jost_solutions(
    dim: u32,
    lambda: f64,
    potential: &PotentialSpec,
    r_desc: &[f64],
) -> Result<JostSolutions, PerturbError> {
    if !(lambda > 0.0) {
        return Err(PerturbError::Invalid(format!("lambda {lambda} must be > 0")));
    }
    if r_desc.len() < 8 || r_desc.windows(2).any(|w| w[1] >= w[0]) || r_desc[r_desc.len() - 1] <= 0.0
    {
        return Err(PerturbError::Invalid(
            "radial grid must be strictly descending with positive entries".into(),
        ));
    }
    let m = r_desc.len();
    let vvals: Vec<f64> = r_desc.iter().map(|&r| potential.value(r)).collect();

    // flattened solutions w_pm(r) = e^{pm i lambda r}
    //                              + int_r^R sin(lambda(s-r))/lambda V w_pm ds;
    // both branches share the Volterra kernel, only the seed phase differs
    let solve_branch = |phase_sign: f64| -> Result<(Vec<Complex64>, Vec<Complex64>, usize, f64), PerturbError> {
        let seed = |r: f64| Complex64::from_polar(1.0, phase_sign * lambda * r);
        let mut w: Vec<Complex64> = r_desc.iter().map(|&r| seed(r)).collect();
        let mut wp: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); m];
        let mut defect = f64::INFINITY;
        let mut iterations = 0usize;
        for sweep in 0..64 {
            iterations = sweep + 1;
            // suffix trapezoid accumulators of sin(lambda s) V w and cos(lambda s) V w
            let mut acc_sin = vec![Complex64::new(0.0, 0.0); m];
            let mut acc_cos = vec![Complex64::new(0.0, 0.0); m];
            for i in 1..m {
                // interval [r_desc[i], r_desc[i-1]] of the descending grid
                let h = r_desc[i - 1] - r_desc[i];
                let (s0, c0) = (lambda * r_desc[i - 1]).sin_cos();
                let (s1, c1) = (lambda * r_desc[i]).sin_cos();
                let f0 = vvals[i - 1] * w[i - 1];
                let f1 = vvals[i] * w[i];
                acc_sin[i] = acc_sin[i - 1] + 0.5 * h * (f0 * s0 + f1 * s1);
                acc_cos[i] = acc_cos[i - 1] + 0.5 * h * (f0 * c0 + f1 * c1);
            }
            // sin(lambda(s-r)) = sin(lambda s) cos(lambda r) - cos(lambda s) sin(lambda r)
            let mut new_defect = 0.0f64;
            for i in 0..m {
                let (sr, cr) = (lambda * r_desc[i]).sin_cos();
                let integral = (acc_sin[i] * cr - acc_cos[i] * sr) / lambda;
                let next = seed(r_desc[i]) + integral;
                new_defect = new_defect.max((next - w[i]).norm());
                w[i] = next;
                // w' = d(seed)/dr - int_r^R cos(lambda(s-r)) V w ds
                let dintegral = -(acc_cos[i] * cr + acc_sin[i] * sr);
                wp[i] = Complex64::new(0.0, phase_sign * lambda) * seed(r_desc[i]) + dintegral;
            }
            defect = new_defect;
            if defect <= 1e-9 {
                break;
            }
        }
        if defect > 1e-9 {
            return Err(PerturbError::NoConvergence { defect, iterations });
        }
        Ok((w, wp, iterations, defect))
    };
    let (w_plus, wp_plus, it_p, defect_p) = solve_branch(1.0)?;
    let (w_minus, wp_minus, it_m, defect_m) = solve_branch(-1.0)?;

    // unflatten to u = r^{-(n-1)/2} w, ascending storage
    let p = 0.5 * (dim as f64 - 1.0);
    let mut r_asc: Vec<f64> = r_desc.to_vec();
    r_asc.reverse();
    let unflatten = |w: &[Complex64], wp: &[Complex64]| {
        let mut u = Vec::with_capacity(m);
        let mut du = Vec::with_capacity(m);
        for i in (0..m).rev() {
            let r = r_desc[i];
            let rp = r.powf(-p);
            u.push(rp * w[i]);
            du.push(rp * (wp[i] - w[i] * (p / r)));
        }
        (u, du)
    };
    let (u_plus, du_plus) = unflatten(&w_plus, &wp_plus);
    let (u_minus, du_minus) = unflatten(&w_minus, &wp_minus);
    Ok(JostSolutions {
        r: r_asc,
        u_plus,
        u_minus,
        du_plus,
        du_minus,
        iterations: it_p.max(it_m),
        defect: defect_p.max(defect_m),
    })
}
