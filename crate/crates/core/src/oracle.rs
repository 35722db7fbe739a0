//! Independent reference kernels.
//!
//! [`GramKernel`] orthonormalizes the monomials (bilateral on the annulus)
//! against the weight and sums the resulting basis. [`verify_reproducing`]
//! checks `f(z) = <f, K(., z)>` by tensor quadrature.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::domain::{BaseWeight, DomainKind, DomainSpec, WeightSpec};
use crate::error::{Error, Result};
use crate::expr::KernelExpr;
use crate::poly::Poly;

/// Largest acceptable condition number of the equilibrated Gram matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

pub const DEFAULT_GRAM_DEGREE: usize = 60;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        dp = if d != 0.0 { d } else { dp };
        let wt = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wt;
        w[n - 1 - i] = wt;
    }
    (x, w)
}

/// `P_n(t)` and `P_n'(t)`.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (t * p1 - p0) / (t * t - 1.0))
}

/// Radial Gauss-Legendre times uniform angular rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    radial_nodes: usize,
    angular_nodes: usize,
}

/// Integrands integrated exactly by a [`QuadratureSpec`]: polynomials in the
/// radius up to `radial_degree` (including the area factor) times
/// trigonometric polynomials of frequency up to `angular_frequency`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exactness {
    pub radial_degree: usize,
    pub angular_frequency: usize,
}

impl QuadratureSpec {
    pub fn new(radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if radial_nodes == 0 || angular_nodes == 0 || !angular_nodes.is_multiple_of(2) {
            return Err(Error::InvalidDomain(format!(
                "quadrature {radial_nodes}x{angular_nodes}: need positive counts, even angular"
            )));
        }
        Ok(QuadratureSpec {
            radial_nodes,
            angular_nodes,
        })
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_nodes
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular_nodes
    }

    pub fn exactness(&self) -> Exactness {
        Exactness {
            radial_degree: 2 * self.radial_nodes - 1,
            angular_frequency: self.angular_nodes - 1,
        }
    }

    /// Nodes and area weights covering the domain (punctures ignored).
    pub fn nodes(&self, d: &DomainSpec) -> Vec<(Complex64, f64)> {
        let r0 = match d.kind() {
            DomainKind::UnitDisk => 0.0,
            DomainKind::Annulus { inner_radius } => inner_radius,
        };
        let (x, w) = gauss_legendre(self.radial_nodes);
        let half = 0.5 * (1.0 - r0);
        let dtheta = 2.0 * PI / self.angular_nodes as f64;
        let mut out = Vec::with_capacity(self.radial_nodes * self.angular_nodes);
        for (xi, wi) in x.iter().zip(&w) {
            let rho = r0 + half * (xi + 1.0);
            let radial = wi * half * rho * dtheta;
            for k in 0..self.angular_nodes {
                out.push((Complex64::from_polar(rho, dtheta * k as f64), radial));
            }
        }
        out
    }

    pub fn integrate<F>(&self, d: &DomainSpec, f: F) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Result<Complex64> + Sync,
    {
        let parts: Result<Vec<Complex64>> = self
            .nodes(d)
            .into_par_iter()
            .map(|(p, wt)| f(p).map(|v| v * wt))
            .collect();
        Ok(parts?.into_iter().sum())
    }
}

/// Gram matrix of monomials against a weight.
#[derive(Debug, Clone)]
pub struct GramSpec {
    pub domain: DomainSpec,
    pub degree: usize,
    /// Monomial exponent of each row.
    pub exponents: Vec<i64>,
    /// `moments[(j, k)] = <z^{e_j}, z^{e_k}>`.
    pub moments: DMatrix<Complex64>,
    /// Set when quadrature replaced the closed form: estimated absolute error.
    pub quadrature_fallback: Option<f64>,
}

/// `int r^(2a+alpha+1) dr dtheta` over the radial range, times 2 pi.
fn radial_moment(d: &DomainSpec, power: f64) -> Result<f64> {
    // integral of |z|^power over the domain
    let s = power + 2.0;
    match d.kind() {
        DomainKind::UnitDisk => {
            if s <= 0.0 {
                Err(Error::DivergentMoment(format!("|z|^{power} on the disk")))
            } else {
                Ok(2.0 * PI / s)
            }
        }
        DomainKind::Annulus { inner_radius } => {
            if s == 0.0 {
                Ok(2.0 * PI * (1.0 / inner_radius).ln())
            } else {
                Ok(2.0 * PI * (1.0 - inner_radius.powf(s)) / s)
            }
        }
    }
}

/// Moments `<z^j, z^k>` for the weight. Closed form when every factor is a
/// polynomial; quadrature when the weight has poles outside the domain.
pub fn monomial_moments(d: &DomainSpec, w: &WeightSpec, degree: usize) -> Result<GramSpec> {
    w.validate()?;
    let d = d.unpunctured();
    for f in &w.poles {
        if d.closure_contains(f.center()) {
            return Err(Error::DivergentMoment(format!(
                "pole at {} inside the domain",
                f.center()
            )));
        }
    }
    let exponents: Vec<i64> = match d.kind() {
        DomainKind::UnitDisk => (0..=degree as i64).collect(),
        DomainKind::Annulus { .. } => (-(degree as i64)..=degree as i64).collect(),
    };
    let n = exponents.len();
    if w.poles.is_empty() {
        let roots: Vec<(Complex64, usize)> = w
            .zeros
            .iter()
            .map(|f| (f.center(), f.mult as usize))
            .collect();
        let p = Poly::from_roots(&roots)?;
        let pc = p.coeffs();
        let (alpha, scale) = (w.base.alpha(), w.base.scale());
        let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (j, &ej) in exponents.iter().enumerate() {
            for (k, &ek) in exponents.iter().enumerate() {
                // sum over i, l with ej + i = ek + l
                let mut s = Complex64::new(0.0, 0.0);
                for (i, &a) in pc.iter().enumerate() {
                    let l = ej + i as i64 - ek;
                    if l < 0 || l as usize >= pc.len() {
                        continue;
                    }
                    let deg = ej + i as i64;
                    let mom = radial_moment(&d, 2.0 * deg as f64 + alpha)?;
                    s += a * pc[l as usize].conj() * mom;
                }
                m[(j, k)] = s * scale;
            }
        }
        return Ok(GramSpec {
            domain: d,
            degree,
            exponents,
            moments: m,
            quadrature_fallback: None,
        });
    }
    let fine = quadrature_moments(&d, w, &exponents, QuadratureSpec::new(160, 320)?)?;
    let coarse = quadrature_moments(&d, w, &exponents, QuadratureSpec::new(120, 240)?)?;
    let err = (&fine - &coarse).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(GramSpec {
        domain: d,
        degree,
        exponents,
        moments: fine,
        quadrature_fallback: Some(err),
    })
}

fn quadrature_moments(
    d: &DomainSpec,
    w: &WeightSpec,
    exponents: &[i64],
    q: QuadratureSpec,
) -> Result<DMatrix<Complex64>> {
    let n = exponents.len();
    let nodes = q.nodes(d);
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&(p, a)| w.value(p).map(|v| v * a))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|k| {
                    nodes
                        .iter()
                        .zip(&weights)
                        .map(|(&(p, _), &wt)| {
                            p.powi(exponents[j] as i32) * p.conj().powi(exponents[k] as i32) * wt
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |j, k| rows[j][k]))
}

/// Kernel of the span of the monomials in a [`GramSpec`].
#[derive(Debug, Clone)]
pub struct GramKernel {
    exponents: Vec<i64>,
    scale: Vec<f64>,
    chol: DMatrix<Complex64>,
    condition: f64,
}

impl GramKernel {
    pub fn new(g: &GramSpec) -> Result<Self> {
        let n = g.exponents.len();
        let scale: Vec<f64> = (0..n).map(|j| 1.0 / g.moments[(j, j)].re.sqrt()).collect();
        if scale.iter().any(|s| !s.is_finite()) {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        let eq = DMatrix::from_fn(n, n, |j, k| g.moments[(j, k)] * scale[j] * scale[k]);
        let eig = eq.clone().symmetric_eigenvalues();
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned(condition));
        }
        let chol = eq
            .cholesky()
            .ok_or(Error::IllConditioned(condition))?
            .l();
        Ok(GramKernel {
            exponents: g.exponents.clone(),
            scale,
            chol,
            condition,
        })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    fn coords(&self, z: Complex64) -> DVector<Complex64> {
        let e = DVector::from_iterator(
            self.exponents.len(),
            self.exponents
                .iter()
                .zip(&self.scale)
                .map(|(&n, &s)| z.powi(n as i32) * s),
        );
        self.chol
            .solve_lower_triangular(&e)
            .expect("Cholesky factor has a positive diagonal")
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        let b = self.coords(z);
        let a = self.coords(w);
        b.iter().zip(a.iter()).map(|(x, y)| x * y.conj()).sum()
    }
}

/// One-shot Gram kernel evaluation.
pub fn gram_kernel_eval(g: &GramSpec, z: Complex64, w: Complex64) -> Result<Complex64> {
    for p in [z, w] {
        if !g.domain.contains(p) {
            return Err(Error::DomainViolation(p));
        }
    }
    Ok(GramKernel::new(g)?.eval(z, w))
}

/// Reference kernel for a weight: moments, then [`GramKernel`].
pub fn oracle_kernel(d: &DomainSpec, w: &WeightSpec, degree: usize) -> Result<GramKernel> {
    GramKernel::new(&monomial_moments(d, w, degree)?)
}

/// `|int f(x) K(z, x) w(x) dA(x) - f(z)|`.
pub fn verify_reproducing(
    k: &KernelExpr,
    w: &WeightSpec,
    f: &Poly,
    q: &QuadratureSpec,
    z: Complex64,
) -> Result<f64> {
    let d = k.domain().unpunctured();
    let integral = q.integrate(&d, |x| {
        let wt = w.value(x)?;
        Ok(f.eval(x) * k.eval(z, x)? * wt)
    })?;
    Ok((integral - f.eval(z)).norm())
}

/// Moments of a base weight alone, used in tests and diagnostics.
pub fn base_moment(d: &DomainSpec, base: BaseWeight, n: i64) -> Result<f64> {
    Ok(base.scale() * radial_moment(d, 2.0 * n as f64 + base.alpha())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Factor;
    use crate::transform::weighted_kernel;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn legendre_rule() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for degree 19
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(64);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(100)).sum();
        assert!((s - 2.0 / 101.0).abs() < 1e-14);
    }

    #[test]
    fn disk_moments() {
        let d = DomainSpec::unit_disk();
        let g = monomial_moments(&d, &WeightSpec::unit(), 2).unwrap();
        for (j, want) in [PI, PI / 2.0, PI / 3.0].iter().enumerate() {
            assert!((g.moments[(j, j)].re - want).abs() < 1e-15);
        }
        assert_eq!(g.moments[(0, 1)], c(0.0, 0.0));
        let g = monomial_moments(&d, &WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap(), 5).unwrap();
        for n in 0..=5 {
            assert!((g.moments[(n, n)].re - PI / (n as f64 + 2.0)).abs() < 1e-15);
        }
        let w = WeightSpec::with_zeros(&[(c(0.5, 0.0), 1)]).unwrap();
        let g = monomial_moments(&d, &w, 3).unwrap();
        assert!((g.moments[(0, 0)].re - 0.75 * PI).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let d = DomainSpec::unit_disk();
        let w = WeightSpec::with_zeros(&[(c(0.4, 0.1), 1), (c(-0.3, 0.0), 1)]).unwrap();
        let g = monomial_moments(&d, &w, 6).unwrap();
        let q = quadrature_moments(&d, &w, &g.exponents, QuadratureSpec::new(40, 80).unwrap()).unwrap();
        let err = (&g.moments - &q).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(err < 1e-13, "{err}");
        let a = DomainSpec::annulus(0.5).unwrap();
        let g = monomial_moments(&a, &WeightSpec::unit(), 4).unwrap();
        let q = quadrature_moments(&a, &WeightSpec::unit(), &g.exponents, QuadratureSpec::new(40, 80).unwrap()).unwrap();
        let err = (&g.moments - &q).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn gram_kernel_values() {
        let d = DomainSpec::unit_disk();
        let g = oracle_kernel(&d, &WeightSpec::unit(), 40).unwrap();
        assert!((g.eval(c(0.0, 0.0), c(0.0, 0.0)).re - 1.0 / PI).abs() < 1e-12);
        let g2 = oracle_kernel(&d, &WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap(), 40).unwrap();
        assert!((g2.eval(c(0.0, 0.0), c(0.0, 0.0)).re - 2.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn interior_pole_is_divergent() {
        let w = WeightSpec::new(BaseWeight::unit(), vec![], vec![Factor::new(c(0.2, 0.0), 1)]).unwrap();
        assert!(matches!(
            monomial_moments(&DomainSpec::unit_disk(), &w, 5),
            Err(Error::DivergentMoment(_))
        ));
        let w = WeightSpec::new(BaseWeight::unit(), vec![], vec![Factor::new(c(2.0, 0.0), 1)]).unwrap();
        let g = monomial_moments(&DomainSpec::unit_disk(), &w, 5).unwrap();
        assert!(g.quadrature_fallback.unwrap() < 1e-12);
    }

    #[test]
    fn reproducing_disk() {
        let k = KernelExpr::disk();
        let q = QuadratureSpec::new(64, 128).unwrap();
        let r = verify_reproducing(&k, &WeightSpec::unit(), &Poly::one(), &q, c(0.3, 0.0)).unwrap();
        assert!(r < 1e-10, "{r}");
        let w = WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap();
        let k = weighted_kernel(&DomainSpec::unit_disk(), &w).unwrap();
        let f = Poly::from_coeffs(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = verify_reproducing(&k, &w, &f, &q, c(0.4, 0.0)).unwrap();
        assert!(r < 1e-6, "{r}");
        assert!(QuadratureSpec::new(64, 127).is_err());
    }
}
