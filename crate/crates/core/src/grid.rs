//! Radial quadrature grids for integrals over (0, R] against the measure
//! r^{n-1} dr, built from composite Gauss-Legendre panels with dyadic
//! refinement toward the cone tip.

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::numerics::gauss::gauss_legendre;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GridError {
    #[error("invalid grid request: {0}")]
    Invalid(String),
}

/// How to partition (0, R] into quadrature panels.
#[derive(Debug, Clone, Copy)]
pub enum GridScheme {
    /// Dyadic panels [R/2^{p+1}, R/2^p] refined toward 0, fixed Gauss order
    /// per panel.
    Geometric { panel_order: usize },
    /// Same, but panels wider than `max_width` are subdivided evenly; used
    /// when the integrands oscillate at a known wavenumber.
    GeometricCapped { panel_order: usize, max_width: f64 },
}

impl GridScheme {
    pub fn panel_order(&self) -> usize {
        match self {
            GridScheme::Geometric { panel_order } => *panel_order,
            GridScheme::GeometricCapped { panel_order, .. } => *panel_order,
        }
    }
}

/// Quadrature nodes and weights for f -> int_0^R f(r) r^{n-1} dr. Weights
/// carry the r^{n-1} factor, so plain dot products against samples are
/// integrals in the cone measure.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    dim: u32,
    r_max: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_edges: Vec<f64>,
    fingerprint: u64,
}

impl RadialGrid {
    /// Cone dimension n (the measure exponent is n-1).
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Strictly increasing nodes in (0, R).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights including the r^{n-1} measure factor.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panel_edges(&self) -> &[f64] {
        &self.panel_edges
    }

    /// Cheap identity check used to reject mixing functions from different
    /// grids.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Integrate sampled values against the grid measure.
    pub fn integrate(&self, values: impl Iterator<Item = f64>) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

/// Build a grid with roughly `target_nodes` nodes under the given scheme.
///
/// The dyadic ladder gets one level per `panel_order` nodes requested; the
/// innermost panel touches 0 so the r^nu behavior of the kernels at the tip
/// is resolved without ever placing a node at r = 0.
pub fn build_grid(
    dim: u32,
    r_max: f64,
    target_nodes: usize,
    scheme: GridScheme,
) -> Result<Arc<RadialGrid>, GridError> {
    if dim < 2 {
        return Err(GridError::Invalid(format!("cone dimension {dim} must be >= 2")));
    }
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(GridError::Invalid(format!("r_max {r_max} must be positive and finite")));
    }
    if target_nodes < 16 {
        return Err(GridError::Invalid(format!("need at least 16 nodes, got {target_nodes}")));
    }
    let order = scheme.panel_order();
    if order < 4 || order > 64 {
        return Err(GridError::Invalid(format!("panel order {order} out of range 4..=64")));
    }

    // dyadic ladder sized to the node budget; at least 4 levels so the tip
    // region is genuinely refined
    let levels = (target_nodes / order).max(4);
    let mut edges = Vec::with_capacity(levels + 2);
    edges.push(0.0);
    for p in (0..levels).rev() {
        edges.push(r_max / 2f64.powi(p as i32));
    }

    if let GridScheme::GeometricCapped { max_width, .. } = scheme {
        if !(max_width > 0.0) {
            return Err(GridError::Invalid(format!("max panel width {max_width} must be > 0")));
        }
        let mut refined = vec![0.0];
        for win in edges.windows(2) {
            let (a, b) = (win[0], win[1]);
            let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
            for i in 1..=pieces {
                refined.push(a + (b - a) * i as f64 / pieces as f64);
            }
        }
        edges = refined;
    }

    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * (edges.len() - 1));
    let mut weights = Vec::with_capacity(order * (edges.len() - 1));
    for win in edges.windows(2) {
        let (a, b) = (win[0], win[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in gx.iter().zip(&gw) {
            let r = mid + half * xi;
            nodes.push(r);
            weights.push(half * wi * r.powi(dim as i32 - 1));
        }
    }

    let mut hasher = std::collections::hash_map::DefaultHasher::new();
    dim.hash(&mut hasher);
    r_max.to_bits().hash(&mut hasher);
    nodes.len().hash(&mut hasher);
    nodes.first().map(|v| v.to_bits()).hash(&mut hasher);
    nodes.last().map(|v| v.to_bits()).hash(&mut hasher);
    let fingerprint = hasher.finish();

    Ok(Arc::new(RadialGrid { dim, r_max, nodes, weights, panel_edges: edges, fingerprint }))
}
