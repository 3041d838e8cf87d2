//! Constant-coefficient tridiagonal systems, factored once and solved every
//! time step.

use alloc::vec::Vec;

use num_complex::Complex64;

/// LU factors of a tridiagonal matrix with constant bands, no pivoting.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    lower: Complex64,
    upper: Complex64,
    /// Modified upper coefficients `c'_i` of the Thomas algorithm.
    c_prime: Vec<Complex64>,
    /// Reciprocal pivots.
    inv_pivot: Vec<Complex64>,
}

impl Tridiagonal {
    /// `diag` may vary along the diagonal; `lower`/`upper` are constant.
    /// Returns `None` if a pivot vanishes.
    pub fn factor(lower: Complex64, diag: &[Complex64], upper: Complex64) -> Option<Self> {
        let n = diag.len();
        let mut c_prime = Vec::with_capacity(n);
        let mut inv_pivot = Vec::with_capacity(n);
        let mut prev_c = Complex64::new(0.0, 0.0);
        for (i, &d) in diag.iter().enumerate() {
            let pivot = if i == 0 { d } else { d - lower * prev_c };
            if pivot.norm() == 0.0 || !pivot.re.is_finite() || !pivot.im.is_finite() {
                return None;
            }
            let inv = pivot.inv();
            prev_c = upper * inv;
            c_prime.push(prev_c);
            inv_pivot.push(inv);
        }
        Some(Self {
            lower,
            upper,
            c_prime,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    pub fn upper(&self) -> Complex64 {
        self.upper
    }

    /// Solves in place: `rhs` becomes the solution.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        debug_assert_eq!(n, self.len());
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.c_prime[i] * next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_small_system() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let diag = [c(4.0, 1.0), c(4.0, 0.0), c(4.0, -1.0), c(5.0, 0.0)];
        let (l, u) = (c(1.0, 0.5), c(-1.0, 0.0));
        let lu = Tridiagonal::factor(l, &diag, u).unwrap();
        let x = [c(1.0, 0.0), c(-2.0, 1.0), c(0.5, 0.5), c(3.0, -1.0)];
        let mut b: Vec<Complex64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += l * x[i - 1];
                }
                if i < 3 {
                    s += u * x[i + 1];
                }
                s
            })
            .collect();
        lu.solve_in_place(&mut b);
        for (got, want) in b.iter().zip(&x) {
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let z = Complex64::new(0.0, 0.0);
        assert!(Tridiagonal::factor(z, &[z, z], z).is_none());
    }
}
