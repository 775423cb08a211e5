//! Largest/smallest singular values of dense complex matrices and of
//! matrix-free linear operators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic dense start vector for the power iterations.
fn start_vector(n: usize) -> DVector<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    DVector::from_fn(n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
}

/// Largest singular value of an operator given by its action and the action
/// of its adjoint, by power iteration on A^H A.
pub fn opnorm_power<F, G>(n: usize, apply: F, apply_adjoint: G) -> f64
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
    G: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    let mut v = start_vector(n);
    let mut nv = v.norm();
    if nv == 0.0 {
        return 0.0;
    }
    v /= Complex64::new(nv, 0.0);
    let mut sigma = 0.0_f64;
    for _ in 0..400 {
        let w = apply_adjoint(&apply(&v));
        nv = w.norm();
        if nv == 0.0 || !nv.is_finite() {
            return if nv == 0.0 { 0.0 } else { f64::INFINITY };
        }
        let new_sigma = nv.sqrt();
        let done = (new_sigma - sigma).abs() <= 1e-9 * new_sigma.max(1e-300);
        sigma = new_sigma;
        v = w / Complex64::new(nv, 0.0);
        if done {
            break;
        }
    }
    sigma
}

/// Largest singular value of a dense matrix.
pub fn smax_dense(a: &DMatrix<Complex64>) -> f64 {
    let at = a.adjoint();
    opnorm_power(a.ncols(), |x| a * x, |x| &at * x)
}

/// Smallest singular value of a dense square matrix, by inverse power
/// iteration through an LU factorization. Returns 0 when the matrix is
/// numerically singular.
pub fn smin_dense(a: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.ncols();
    let lu = a.clone().lu();
    let lut = a.transpose().lu();
    let mut v = start_vector(n);
    v /= Complex64::new(v.norm(), 0.0);
    let mut inv_sigma = 0.0_f64;
    for _ in 0..400 {
        // w = A^{-1} A^{-H} v ; A^{-H} v = conj( (A^T)^{-1} conj(v) )
        let vc = v.map(|z| z.conj());
        let u = match lut.solve(&vc) {
            Some(u) => u.map(|z| z.conj()),
            None => return 0.0,
        };
        let w = match lu.solve(&u) {
            Some(w) => w,
            None => return 0.0,
        };
        let nw = w.norm();
        if !nw.is_finite() {
            return 0.0;
        }
        if nw == 0.0 {
            return f64::INFINITY;
        }
        let new_inv = nw.sqrt();
        let done = (new_inv - inv_sigma).abs() <= 1e-9 * new_inv;
        inv_sigma = new_inv;
        v = w / Complex64::new(nw, 0.0);
        if done {
            break;
        }
    }
    1.0 / inv_sigma
}
