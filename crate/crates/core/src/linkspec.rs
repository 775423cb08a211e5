//! Spectral data of the link manifold: eigenvalue ladders with
//! multiplicities, the shifted Bessel orders they induce on the radial
//! problem, and eigenfunction evaluation for the built-in links.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::numerics::fit::fit_power_law;
use crate::numerics::gauss::gauss_legendre;

#[derive(Debug, Clone, thiserror::Error)]
pub enum LinkError {
    #[error("invalid link geometry: {0}")]
    InvalidGeometry(String),
    #[error("unsupported link for this operation: {0}")]
    Unsupported(String),
    #[error("cannot read spectrum file: {0}")]
    Io(String),
    #[error("malformed spectrum file: {0}")]
    Parse(String),
}

/// Which link manifold the cone is built on.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkKind {
    /// Flat circle of the given circumference; requires cone dimension 2.
    Circle { circumference: f64 },
    /// Round unit sphere S^d; the cone dimension is d + 1.
    UnitSphere { dim: u32 },
    /// Arbitrary eigenvalue ladder supplied by the caller.
    Custom,
}

/// One distinct eigenvalue of the link Laplacian with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLevel {
    pub mu2: f64,
    pub multiplicity: u32,
}

/// Flattened index into the mode ladder, repeating levels by multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModeIndex(pub usize);

/// A point on the link, for eigenfunction evaluation.
#[derive(Debug, Clone, Copy)]
pub enum LinkPoint {
    /// Arclength angle in [0, L) on the circle.
    Angle(f64),
    /// Polar/azimuthal coordinates on S^2.
    Sphere { polar: f64, azimuth: f64 },
}

/// Eigenvalue/multiplicity ladder of the link Laplacian together with the
/// cone dimension, link volume and shifted orders nu_j.
#[derive(Debug, Clone)]
pub struct LinkSpectrum {
    kind: LinkKind,
    dim: u32,
    levels: Vec<SpectralLevel>,
    volume: f64,
    /// flattened level index per mode
    flat: Vec<usize>,
}

impl LinkSpectrum {
    pub fn kind(&self) -> &LinkKind {
        &self.kind
    }

    /// Cone dimension n.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn levels(&self) -> &[SpectralLevel] {
        &self.levels
    }

    /// Number of flattened modes.
    pub fn mode_count(&self) -> usize {
        self.flat.len()
    }

    pub fn level_of(&self, j: ModeIndex) -> usize {
        self.flat[j.0]
    }

    pub fn mu2(&self, j: ModeIndex) -> f64 {
        self.levels[self.flat[j.0]].mu2
    }

    /// Shifted order nu_j = sqrt(mu_j^2 + ((n-2)/2)^2).
    pub fn nu(&self, j: ModeIndex) -> f64 {
        self.nu_of_level(self.flat[j.0])
    }

    pub fn nu_of_level(&self, level: usize) -> f64 {
        let half = 0.5 * (self.dim as f64 - 2.0);
        (self.levels[level].mu2 + half * half).sqrt()
    }

    /// Index of a mode within its level (0-based).
    pub fn sub_index(&self, j: ModeIndex) -> usize {
        let level = self.flat[j.0];
        let first = self.flat.iter().position(|&l| l == level).expect("level present");
        j.0 - first
    }

    fn check_invariants(&self) -> Result<(), LinkError> {
        if self.dim < 2 {
            return Err(LinkError::InvalidGeometry(format!("cone dimension {} < 2", self.dim)));
        }
        if !(self.volume > 0.0) {
            return Err(LinkError::InvalidGeometry(format!("volume {} must be > 0", self.volume)));
        }
        match self.levels.first() {
            Some(l0) if l0.mu2 == 0.0 && l0.multiplicity == 1 => {}
            _ => {
                return Err(LinkError::InvalidGeometry(
                    "first level must be mu^2 = 0 with multiplicity 1 (connected link)".into(),
                ))
            }
        }
        for w in self.levels.windows(2) {
            if !(w[1].mu2 >= w[0].mu2) {
                return Err(LinkError::InvalidGeometry("levels must be nondecreasing in mu^2".into()));
            }
        }
        if self.levels.iter().any(|l| l.mu2 < 0.0 || l.multiplicity == 0) {
            return Err(LinkError::InvalidGeometry("negative mu^2 or zero multiplicity".into()));
        }
        Ok(())
    }
}

/// Surface area of the unit sphere S^d in R^{d+1}.
fn sphere_area(d: u32) -> f64 {
    let dh = 0.5 * (d as f64 + 1.0);
    2.0 * std::f64::consts::PI.powf(dh) * (-crate::specfun::gamma::ln_gamma(dh)).exp()
}

/// Multiplicity of the degree-l eigenspace on S^d:
/// (2l + d - 1) (l + d - 2)! / (l! (d - 1)!).
fn sphere_multiplicity(l: u32, d: u32) -> u32 {
    if l == 0 {
        return 1;
    }
    if d == 1 {
        return 2;
    }
    let lf = l as f64;
    let mut v = 2.0 * lf + d as f64 - 1.0;
    for i in 1..=(d as u64 - 2) {
        v *= lf + i as f64;
    }
    for i in 1..=(d as u64 - 1) {
        v /= i as f64;
    }
    v.round() as u32
}

/// Build the eigenvalue ladder for a built-in link with `num_levels`
/// distinct levels.
pub fn build_spectrum(
    kind: LinkKind,
    dim: u32,
    num_levels: usize,
) -> Result<Arc<LinkSpectrum>, LinkError> {
    if dim < 2 {
        return Err(LinkError::InvalidGeometry(format!("cone dimension {dim} must be >= 2")));
    }
    if num_levels < 1 {
        return Err(LinkError::InvalidGeometry("need at least one level".into()));
    }
    let (levels, volume) = match &kind {
        LinkKind::Circle { circumference } => {
            if dim != 2 {
                return Err(LinkError::InvalidGeometry(format!(
                    "circle link requires cone dimension 2, got {dim}"
                )));
            }
            if !(*circumference > 0.0) {
                return Err(LinkError::InvalidGeometry("circumference must be > 0".into()));
            }
            let mut levels = vec![SpectralLevel { mu2: 0.0, multiplicity: 1 }];
            for k in 1..num_levels {
                let mu = 2.0 * std::f64::consts::PI * k as f64 / circumference;
                levels.push(SpectralLevel { mu2: mu * mu, multiplicity: 2 });
            }
            (levels, *circumference)
        }
        LinkKind::UnitSphere { dim: d } => {
            if *d == 0 {
                return Err(LinkError::InvalidGeometry("sphere dimension must be >= 1".into()));
            }
            if *d + 1 != dim {
                return Err(LinkError::InvalidGeometry(format!(
                    "S^{d} link requires cone dimension {}, got {dim}",
                    d + 1
                )));
            }
            let mut levels = Vec::with_capacity(num_levels);
            for l in 0..num_levels as u32 {
                let mu2 = (l as f64) * (l as f64 + *d as f64 - 1.0);
                levels.push(SpectralLevel { mu2, multiplicity: sphere_multiplicity(l, *d) });
            }
            (levels, sphere_area(*d))
        }
        LinkKind::Custom => {
            return Err(LinkError::InvalidGeometry(
                "custom spectra are built with custom_spectrum / load_spectrum".into(),
            ))
        }
    };
    finish_spectrum(kind, dim, levels, volume)
}

/// Build a spectrum from an explicit ladder, with invariant checks.
pub fn custom_spectrum(
    dim: u32,
    levels: Vec<SpectralLevel>,
    volume: f64,
) -> Result<Arc<LinkSpectrum>, LinkError> {
    finish_spectrum(LinkKind::Custom, dim, levels, volume)
}

fn finish_spectrum(
    kind: LinkKind,
    dim: u32,
    levels: Vec<SpectralLevel>,
    volume: f64,
) -> Result<Arc<LinkSpectrum>, LinkError> {
    let mut flat = Vec::new();
    for (i, l) in levels.iter().enumerate() {
        for _ in 0..l.multiplicity {
            flat.push(i);
        }
    }
    let s = LinkSpectrum { kind, dim, levels, volume, flat };
    s.check_invariants()?;
    Ok(Arc::new(s))
}

/// Load a custom spectrum from a text file: a header line `volume <v>` then
/// one `mu2 multiplicity` pair per line. Blank lines and `#` comments are
/// skipped.
pub fn load_spectrum(path: &Path, dim: u32) -> Result<Arc<LinkSpectrum>, LinkError> {
    let text = std::fs::read_to_string(path).map_err(|e| LinkError::Io(e.to_string()))?;
    parse_spectrum(&text, dim)
}

pub fn parse_spectrum(text: &str, dim: u32) -> Result<Arc<LinkSpectrum>, LinkError> {
    let mut volume = None;
    let mut levels = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let first = parts.next().unwrap();
        if first == "volume" {
            let v: f64 = parts
                .next()
                .ok_or_else(|| LinkError::Parse(format!("line {}: missing volume", lineno + 1)))?
                .parse()
                .map_err(|e| LinkError::Parse(format!("line {}: {e}", lineno + 1)))?;
            volume = Some(v);
            continue;
        }
        let mu2: f64 = first
            .parse()
            .map_err(|e| LinkError::Parse(format!("line {}: {e}", lineno + 1)))?;
        let mult: u32 = parts
            .next()
            .ok_or_else(|| LinkError::Parse(format!("line {}: missing multiplicity", lineno + 1)))?
            .parse()
            .map_err(|e| LinkError::Parse(format!("line {}: {e}", lineno + 1)))?;
        levels.push(SpectralLevel { mu2, multiplicity: mult });
    }
    let volume = volume.ok_or_else(|| LinkError::Parse("missing `volume` header line".into()))?;
    custom_spectrum(dim, levels, volume)
}

/// Orthonormal eigenfunction of the flattened mode at a point of the link.
///
/// Supported links: the circle and S^d with d <= 2. The j = 0 mode is the
/// constant 1/sqrt(vol(X)) on every link.
pub fn eigenfunction(
    spectrum: &LinkSpectrum,
    j: ModeIndex,
    point: LinkPoint,
) -> Result<Complex64, LinkError> {
    if j.0 >= spectrum.mode_count() {
        return Err(LinkError::InvalidGeometry(format!(
            "mode {} out of range ({} modes)",
            j.0,
            spectrum.mode_count()
        )));
    }
    if j.0 == 0 {
        return Ok(Complex64::new(1.0 / spectrum.volume().sqrt(), 0.0));
    }
    match (&spectrum.kind, point) {
        (LinkKind::Circle { circumference }, LinkPoint::Angle(theta)) => {
            Ok(circle_mode(spectrum, j, *circumference, theta))
        }
        (LinkKind::UnitSphere { dim: 1 }, LinkPoint::Angle(theta)) => {
            Ok(circle_mode(spectrum, j, 2.0 * std::f64::consts::PI, theta))
        }
        (LinkKind::UnitSphere { dim: 2 }, LinkPoint::Sphere { polar, azimuth }) => {
            let level = spectrum.level_of(j);
            let sub = spectrum.sub_index(j);
            Ok(Complex64::new(real_sph_harm(level as u32, sub, polar, azimuth), 0.0))
        }
        (LinkKind::UnitSphere { dim }, _) if *dim > 2 => Err(LinkError::Unsupported(format!(
            "eigenfunctions on S^{dim} are not implemented (d <= 2 only)"
        ))),
        (LinkKind::Custom, _) => {
            Err(LinkError::Unsupported("custom links carry no eigenfunctions".into()))
        }
        _ => Err(LinkError::Unsupported("point type does not match the link".into())),
    }
}

fn circle_mode(spectrum: &LinkSpectrum, j: ModeIndex, circumference: f64, theta: f64) -> Complex64 {
    let level = spectrum.level_of(j) as f64;
    let sub = spectrum.sub_index(j);
    let arg = 2.0 * std::f64::consts::PI * level * theta / circumference;
    let norm = (2.0 / circumference).sqrt();
    let v = if sub == 0 { norm * arg.cos() } else { norm * arg.sin() };
    Complex64::new(v, 0.0)
}

/// Fully normalized associated Legendre value K(l,m) P_l^m(cos(theta)) with
/// the Condon-Shortley phase, so that the real harmonics assembled from it
/// are orthonormal on S^2.
fn normalized_assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let s = (1.0 - x * x).max(0.0).sqrt();
    // p_mm = K(m,m) P_m^m
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=m {
        pmm *= -(((2 * k + 1) as f64) / ((2 * k) as f64)).sqrt() * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * ((2 * m + 3) as f64).sqrt() * pmm;
    if l == m + 1 {
        return p;
    }
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        let a = ((4.0 * llf * llf - 1.0) / (llf * llf - mf * mf)).sqrt();
        let b = (((llf - 1.0) * (llf - 1.0) - mf * mf) / (4.0 * (llf - 1.0) * (llf - 1.0) - 1.0))
            .sqrt();
        let p_next = a * (x * p - b * p_prev);
        p_prev = p;
        p = p_next;
    }
    p
}

/// Real spherical harmonic on S^2 for level l; sub enumerates m = 0, then
/// (cos, sin) pairs for m = 1..l.
fn real_sph_harm(l: u32, sub: usize, polar: f64, azimuth: f64) -> f64 {
    let x = polar.cos();
    if sub == 0 {
        return normalized_assoc_legendre(l, 0, x);
    }
    let m = ((sub + 1) / 2) as u32;
    let base = std::f64::consts::SQRT_2 * normalized_assoc_legendre(l, m, x);
    if sub % 2 == 1 {
        base * (m as f64 * azimuth).cos()
    } else {
        base * (m as f64 * azimuth).sin()
    }
}

/// Fitted growth exponent of mu_j against the flattened index j; the Weyl
/// law predicts 1/(n-1).
pub fn weyl_check(spectrum: &LinkSpectrum) -> f64 {
    let count = spectrum.mode_count();
    assert!(count >= 50, "need at least 50 modes for a Weyl fit");
    let lo = count / 4;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in lo..count {
        let mu = spectrum.mu2(ModeIndex(j)).sqrt();
        if mu > 0.0 {
            xs.push(j as f64);
            ys.push(mu);
        }
    }
    fit_power_law(&xs, &ys).slope
}

/// Quadrature over the link for built-in kinds, exact for the retained
/// eigenfunctions when sized generously.
pub struct LinkQuadrature {
    pub points: Vec<LinkPoint>,
    pub weights: Vec<f64>,
}

/// Native quadrature for a built-in link, resolving levels up to
/// `max_level`.
pub fn link_quadrature(spectrum: &LinkSpectrum, max_level: usize) -> Result<LinkQuadrature, LinkError> {
    match &spectrum.kind {
        LinkKind::Circle { circumference } => {
            let m = (4 * max_level + 8).max(16);
            let w = circumference / m as f64;
            Ok(LinkQuadrature {
                points: (0..m)
                    .map(|i| LinkPoint::Angle(circumference * i as f64 / m as f64))
                    .collect(),
                weights: vec![w; m],
            })
        }
        LinkKind::UnitSphere { dim: 1 } => {
            let m = (4 * max_level + 8).max(16);
            let two_pi = 2.0 * std::f64::consts::PI;
            Ok(LinkQuadrature {
                points: (0..m).map(|i| LinkPoint::Angle(two_pi * i as f64 / m as f64)).collect(),
                weights: vec![two_pi / m as f64; m],
            })
        }
        LinkKind::UnitSphere { dim: 2 } => {
            let n_theta = (2 * max_level + 4).max(8);
            let n_phi = (4 * max_level + 8).max(16);
            let (gx, gw) = gauss_legendre(n_theta);
            let mut points = Vec::with_capacity(n_theta * n_phi);
            let mut weights = Vec::with_capacity(n_theta * n_phi);
            let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
            for (x, w) in gx.iter().zip(&gw) {
                let polar = x.acos();
                for k in 0..n_phi {
                    points.push(LinkPoint::Sphere { polar, azimuth: dphi * k as f64 });
                    weights.push(w * dphi);
                }
            }
            Ok(LinkQuadrature { points, weights })
        }
        _ => Err(LinkError::Unsupported("no native quadrature for this link".into())),
    }
}
