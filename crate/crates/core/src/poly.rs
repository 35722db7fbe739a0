use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest degree a [`Poly`] may reach.
pub const DEGREE_CAP: usize = 64;

/// Polynomial over the complex numbers, coefficients in the monomial basis
/// (lowest degree first).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn one() -> Self {
        Poly {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        if coeffs.len() - 1 > DEGREE_CAP {
            return Err(Error::DegreeCap(coeffs.len() - 1));
        }
        Ok(Poly { coeffs })
    }

    /// `prod (z - c)^m`.
    pub fn from_roots(roots: &[(Complex64, usize)]) -> Result<Self> {
        let degree: usize = roots.iter().map(|r| r.1).sum();
        if degree > DEGREE_CAP {
            return Err(Error::DegreeCap(degree));
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for &(c, m) in roots {
            for _ in 0..m {
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (i, &a) in coeffs.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= a * c;
                }
                coeffs = next;
            }
        }
        Ok(Poly { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(1.0, 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// The polynomial with conjugated coefficients, so that
    /// `conj(p(w)) = p.conj_coeffs().eval(conj(w))`.
    pub fn conj_coeffs(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }

    /// Taylor coefficients of `p(z0 + t)` in powers of `t`, up to `order`.
    pub fn taylor(&self, z0: Complex64, order: usize) -> Vec<Complex64> {
        // Repeated synthetic division by (z - z0).
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            if work.is_empty() {
                out.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let n = work.len();
            let mut rem = work[n - 1];
            let mut quotient = vec![Complex64::new(0.0, 0.0); n - 1];
            for i in (0..n - 1).rev() {
                quotient[i] = rem;
                rem = work[i] + rem * z0;
            }
            out.push(rem);
            work = quotient;
        }
        out
    }
}
