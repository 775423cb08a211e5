//! Mode-by-mode construction of resolvents, spectral measure and the
//! Schrodinger propagator of -Laplace + V on product cones R+ x X, together
//! with a numerical harness that checks the dispersive and resolvent
//! estimates this construction satisfies.
//!
//! The radial problem on the j-th eigenspace of the link X is a Bessel
//! equation of order nu_j; everything downstream (free and perturbed
//! resolvent kernels, spectral density, oscillatory propagator integrals)
//! is built from the special-function layer in [`specfun`].

pub mod specfun;

pub use specfun::{bessel, bessel_dlambda, scaled_bessel, wronskian_check};
pub use specfun::{BesselKind, ScaledBesselRequest, SpecFunError};

pub mod freeres;
pub mod grid;
pub mod linkspec;
pub mod numerics;
pub mod perturbres;
pub mod propagate;
