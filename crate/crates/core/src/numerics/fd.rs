//! Fornberg's algorithm: finite-difference weights of arbitrary order of
//! accuracy on arbitrarily spaced nodes.

/// Weights w[k][j] such that f^(k)(z) ~ sum_j w[k][j] f(nodes[j]), for all
/// derivative orders k = 0..=max_order.
pub fn fd_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > max_order);
    let mut c = vec![vec![0.0_f64; n]; max_order + 1];
    let mut c1 = 1.0_f64;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0_f64;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_polynomials() {
        let nodes = [0.9, 0.97, 1.0, 1.08, 1.15];
        let z = 1.01;
        let w = fd_weights(z, &nodes, 2);
        let f = |x: f64| x * x * x;
        let d0: f64 = nodes.iter().zip(&w[0]).map(|(x, c)| c * f(*x)).sum();
        let d1: f64 = nodes.iter().zip(&w[1]).map(|(x, c)| c * f(*x)).sum();
        let d2: f64 = nodes.iter().zip(&w[2]).map(|(x, c)| c * f(*x)).sum();
        assert!((d0 - z.powi(3)).abs() < 1e-12);
        assert!((d1 - 3.0 * z * z).abs() < 1e-11);
        assert!((d2 - 6.0 * z).abs() < 1e-10);
    }

    #[test]
    fn derivative_of_smooth_function_on_uneven_nodes() {
        let nodes = [0.9, 0.97, 1.0, 1.08, 1.15];
        let z = 1.01;
        let w = fd_weights(z, &nodes, 2);
        let f = |x: f64| x.sin() * x.exp();
        let d0: f64 = nodes.iter().zip(&w[0]).map(|(x, c)| c * f(*x)).sum();
        let d1: f64 = nodes.iter().zip(&w[1]).map(|(x, c)| c * f(*x)).sum();
        let d2: f64 = nodes.iter().zip(&w[2]).map(|(x, c)| c * f(*x)).sum();
        let e = z.exp();
        let true1 = e * (z.sin() + z.cos());
        let true2 = 2.0 * e * z.cos();
        // degree-4 interpolation error over a width-0.25 stencil
        assert!((d0 - f(z)).abs() < 2e-7);
        assert!((d1 - true1).abs() < 2e-5);
        assert!((d2 - true2).abs() < 5e-4);
    }
}
