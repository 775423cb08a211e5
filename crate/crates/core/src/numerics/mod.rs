//! Shared numerical utilities: quadrature rules, finite-difference weights,
//! power-law fits, operator norms.

pub mod fd;
pub mod fit;
pub mod jet;
pub mod gauss;
pub mod opnorm;
