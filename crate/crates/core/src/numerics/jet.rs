//! Truncated Taylor-series arithmetic ("jets") for exact higher derivatives
//! of composite scalar expressions.

/// Taylor coefficients c[k] = f^(k)(x0)/k! about a fixed point.
#[derive(Debug, Clone)]
pub struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    /// The identity function x at the expansion point x0.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative value: c[k] * k!.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c[k] * fact
    }

    pub fn add(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order());
        Jet { c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order());
        Jet { c: self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.order(), other.order());
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    /// 1/self; requires a nonzero constant term.
    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        assert!(a0 != 0.0, "jet reciprocal at a zero");
        let mut b = vec![0.0; n];
        b[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.c[j] * b[k - j];
            }
            b[k] = -acc / a0;
        }
        Jet { c: b }
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self.mul(&other.recip())
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    /// d/dx as a jet one order lower.
    pub fn differentiate(&self) -> Jet {
        let n = self.c.len();
        assert!(n >= 2, "cannot differentiate an order-0 jet");
        let mut c = vec![0.0; n - 1];
        for k in 0..n - 1 {
            c[k] = (k as f64 + 1.0) * self.c[k + 1];
        }
        Jet { c }
    }

    /// Truncate to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        assert!(order < self.c.len());
        Jet { c: self.c[..=order].to_vec() }
    }
}
