//! Kernel transforms: division by a rational factor outside the domain,
//! rank-one deflation at an interior point, several interior points at once,
//! transport along disk automorphisms, and the full weight pipeline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::base::DiskAutomorphism;
use crate::domain::{BaseWeight, DomainKind, DomainSpec, WeightSpec};
use crate::error::{Error, Result};
use crate::expr::{KernelExpr, Node, RationalFactor, SumTerm, DEGENERACY_TOL};
use crate::poly::Poly;

/// How several interior zero factors are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    /// One deflation per unit of multiplicity, in order.
    #[default]
    Iterated,
    /// All centers at once in the direct-sum form.
    DirectSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionPlan {
    pub centers: Vec<(Complex64, usize)>,
    pub mode: PlanMode,
}

impl DecompositionPlan {
    pub fn new(centers: Vec<(Complex64, usize)>, mode: PlanMode) -> Result<Self> {
        for (i, &(c, m)) in centers.iter().enumerate() {
            if m == 0 {
                return Err(Error::InvalidWeight(format!("multiplicity 0 at {c}")));
            }
            if centers[..i].iter().any(|e| e.0 == c) {
                return Err(Error::InvalidWeight(format!("repeated center {c}")));
            }
        }
        Ok(DecompositionPlan { centers, mode })
    }

    pub fn total_multiplicity(&self) -> usize {
        self.centers.iter().map(|c| c.1).sum()
    }
}

/// `K / (g(z) conj(g(w)))` for `g = prod (z - a)^m`, every `a` outside the
/// closed domain.
pub fn pole_divide(k: &KernelExpr, g_zeros: &[(Complex64, usize)]) -> Result<KernelExpr> {
    divide_by(k, RationalFactor::new(g_zeros.to_vec(), Vec::new())?)
}

/// `K / (g(z) conj(g(w)))` for a rational `g`.
///
/// Zeros of `g` must lie outside the closed domain, unless `K` is itself a
/// division by a factor with a pole there that cancels it.
pub fn divide_by(k: &KernelExpr, g: RationalFactor) -> Result<KernelExpr> {
    if g.is_one() {
        return Ok(k.clone());
    }
    let (inner, combined) = match k.node() {
        Node::RationalDivide { inner, factor } => (inner.clone(), factor.times(&g)?),
        _ => (k.clone(), g),
    };
    let domain = k.domain();
    for &(a, _) in combined.zeros() {
        if domain.closure_contains(a) {
            return Err(Error::HolomorphyViolation(a));
        }
    }
    if combined.is_one() {
        return Ok(inner);
    }
    Ok(KernelExpr::rational_divide(inner, combined))
}

/// Rank-one deflation at an interior point `c`: the kernel for the weight
/// multiplied by `|z - c|^2`.
pub fn zero_augment(k: &KernelExpr, c: Complex64) -> Result<KernelExpr> {
    if !k.domain().contains_unpunctured(c) {
        return Err(Error::DomainViolation(c));
    }
    let diag = k.eval(c, c)?.re;
    if !(diag > DEGENERACY_TOL) {
        return Err(Error::DegenerateCenter {
            center: c,
            diag,
            term: None,
        });
    }
    Ok(KernelExpr::rank_one_deflate(k.clone(), c, diag))
}

/// Multiplies the weight by `|p|^2`, `p = prod (z - c_j)^{m_j}`, for interior
/// centers.
pub fn multi_zero_augment(k: &KernelExpr, plan: &DecompositionPlan) -> Result<KernelExpr> {
    let plan = DecompositionPlan::new(plan.centers.clone(), plan.mode)?;
    for &(c, _) in &plan.centers {
        if !k.domain().contains_unpunctured(c) {
            return Err(Error::DomainViolation(c));
        }
    }
    match plan.mode {
        PlanMode::Iterated => {
            let mut out = k.clone();
            for &(c, m) in &plan.centers {
                for _ in 0..m {
                    out = zero_augment(&out, c)?;
                }
            }
            Ok(out)
        }
        PlanMode::DirectSum => direct_sum(k, &plan.centers),
    }
}

fn direct_sum(k: &KernelExpr, centers: &[(Complex64, usize)]) -> Result<KernelExpr> {
    if centers.is_empty() {
        return Ok(k.clone());
    }
    let p = Poly::from_roots(centers)?;
    let mut terms = Vec::new();
    for (j, &(c, alpha)) in centers.iter().enumerate() {
        for kk in 1..=alpha {
            let mut rest: Vec<(Complex64, usize)> = Vec::new();
            if alpha > kk {
                rest.push((c, alpha - kk));
            }
            rest.extend_from_slice(&centers[j + 1..]);
            let sub = direct_sum(k, &rest)?;
            let diag = sub.eval(c, c)?.re;
            if !(diag > DEGENERACY_TOL) {
                return Err(Error::DegenerateCenter {
                    center: c,
                    diag,
                    term: Some((j + 1, kk)),
                });
            }
            terms.push(SumTerm {
                index: (j + 1, kk),
                center: c,
                kernel: sub,
                q: Poly::from_roots(&rest)?,
                diag,
            });
        }
    }
    Ok(KernelExpr::direct_sum(k.clone(), centers.to_vec(), p, terms))
}

/// `f'(z) K(f(z), f(w)) conj(f'(w))` for a disk automorphism `f`.
pub fn biholomorphic_transport(k: &KernelExpr, map: DiskAutomorphism) -> Result<KernelExpr> {
    if k.domain().kind() != DomainKind::UnitDisk {
        return Err(Error::InvalidDomain(
            "automorphism transport needs the unit disk".into(),
        ));
    }
    DiskAutomorphism::new(map.a(), map.theta())?;
    if map == DiskAutomorphism::identity() {
        return Ok(k.clone());
    }
    Ok(KernelExpr::transport(k.clone(), map))
}

/// Kernel of the weighted space `A^2_w(d)`.
///
/// Base kernel, then division by the factors outside the domain and all
/// poles, then deflation at the interior zeros.
pub fn weighted_kernel(d: &DomainSpec, w: &WeightSpec) -> Result<KernelExpr> {
    weighted_kernel_with(d, w, PlanMode::Iterated)
}

pub fn weighted_kernel_with(d: &DomainSpec, w: &WeightSpec, mode: PlanMode) -> Result<KernelExpr> {
    w.validate()?;
    let mut outside: Vec<(Complex64, usize)> = Vec::new();
    let mut inside: Vec<(Complex64, usize)> = Vec::new();
    for f in &w.zeros {
        let c = f.center();
        let m = f.mult as usize;
        if d.contains_unpunctured(c) {
            inside.push((c, m));
        } else if !d.closure_contains(c) {
            outside.push((c, m));
        } else {
            return Err(Error::UnsupportedWeight(format!(
                "weight zero at {c} on the boundary"
            )));
        }
    }
    let poles: Vec<(Complex64, usize)> = w
        .poles
        .iter()
        .map(|f| (f.center(), f.mult as usize))
        .collect();

    let base = match (d.kind(), w.base) {
        (DomainKind::Annulus { .. }, BaseWeight::Radial { alpha, coefficient }) if alpha != 0.0 => {
            // |z|^alpha = |z^{alpha/2}|^2 with 0 outside the annulus.
            let half = alpha / 2.0;
            if half.fract() != 0.0 || half.abs() > crate::poly::DEGREE_CAP as f64 {
                return Err(Error::UnsupportedWeight(format!(
                    "radial exponent {alpha} on the annulus (only even integers)"
                )));
            }
            let k = KernelExpr::base(d, BaseWeight::Constant { value: coefficient })?;
            let zero = (Complex64::new(0.0, 0.0), half.abs() as usize);
            let factor = if half > 0.0 {
                RationalFactor::new(vec![zero], Vec::new())?
            } else {
                RationalFactor::new(Vec::new(), vec![zero])?
            };
            divide_by(&k, factor)?
        }
        (_, b) => KernelExpr::base(d, b)?,
    };
    let divided = divide_by(&base, RationalFactor::new(outside, poles)?)?;
    if inside.is_empty() {
        return Ok(divided);
    }
    multi_zero_augment(&divided, &DecompositionPlan::new(inside, mode)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base;
    use crate::domain::Factor;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pole_divide_outside() {
        let k = pole_divide(&KernelExpr::disk(), &[(c(2.0, 0.0), 1)]).unwrap();
        let v = k.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((v.re - 0.0795774715).abs() < 1e-10);
        assert!(matches!(
            pole_divide(&KernelExpr::disk(), &[(c(0.5, 0.0), 1)]),
            Err(Error::HolomorphyViolation(_))
        ));
        assert!(matches!(
            pole_divide(&KernelExpr::disk(), &[(c(1.0, 0.0), 1)]),
            Err(Error::HolomorphyViolation(_))
        ));
        let disk = KernelExpr::disk();
        assert_eq!(pole_divide(&disk, &[]).unwrap().ptr_id(), disk.ptr_id());
    }

    #[test]
    fn interior_pole_then_cancelling_zero() {
        let d = DomainSpec::unit_disk();
        let w = WeightSpec::new(BaseWeight::unit(), vec![], vec![Factor::new(c(0.5, 0.0), 1)]).unwrap();
        let k = weighted_kernel(&d, &w).unwrap();
        let z = c(0.1, 0.2);
        let x = c(-0.3, 0.4);
        let want = (z - 0.5) * base::disk_kernel(z, x).unwrap() * (x.conj() - 0.5);
        assert!((k.eval(z, x).unwrap() - want).norm() < 1e-15);
        assert_eq!(k.eval(c(0.5, 0.0), x).unwrap(), c(0.0, 0.0));
        // Dividing by (z - 0.5) cancels the pole.
        let back = pole_divide(&k, &[(c(0.5, 0.0), 1)]).unwrap();
        assert!((back.eval(z, x).unwrap() - base::disk_kernel(z, x).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn zero_augment_errors() {
        let k = KernelExpr::disk();
        assert!(matches!(zero_augment(&k, c(1.2, 0.0)), Err(Error::DomainViolation(_))));
        let a = zero_augment(&k, c(0.0, 0.0)).unwrap();
        assert!((a.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap().re - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn double_center_direct_sum() {
        let k = KernelExpr::disk();
        let plan = DecompositionPlan::new(vec![(c(0.0, 0.0), 2)], PlanMode::DirectSum).unwrap();
        let ds = multi_zero_augment(&k, &plan).unwrap();
        let v = ds.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((v.re - 3.0 / PI).abs() < 1e-13, "{v}");
        let z = c(0.3, -0.5);
        let w = c(0.6, 0.1);
        let want = base::disk_radial_kernel(4.0, z, w).unwrap();
        assert!((ds.eval(z, w).unwrap() - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn two_centers_three_ways() {
        let k = KernelExpr::disk();
        let a = c(0.4, 0.0);
        let b = c(-0.3, 0.0);
        let it1 = multi_zero_augment(&k, &DecompositionPlan::new(vec![(a, 1), (b, 1)], PlanMode::Iterated).unwrap()).unwrap();
        let it2 = multi_zero_augment(&k, &DecompositionPlan::new(vec![(b, 1), (a, 1)], PlanMode::Iterated).unwrap()).unwrap();
        let ds = multi_zero_augment(&k, &DecompositionPlan::new(vec![(a, 1), (b, 1)], PlanMode::DirectSum).unwrap()).unwrap();
        for &(z, w) in &[(c(0.1, 0.2), c(-0.5, 0.3)), (a, b), (c(0.0, 0.6), a)] {
            let x = it1.eval(z, w).unwrap();
            assert!((x - it2.eval(z, w).unwrap()).norm() < 1e-10 * x.norm());
            assert!((x - ds.eval(z, w).unwrap()).norm() < 1e-10 * x.norm());
        }
    }

    #[test]
    fn transport_invariance_of_disk_kernel() {
        let f = DiskAutomorphism::new(c(0.3, 0.4), 1.1).unwrap();
        let t = biholomorphic_transport(&KernelExpr::disk(), f).unwrap();
        let z = c(0.2, -0.1);
        let w = c(-0.5, 0.5);
        let want = base::disk_kernel(z, w).unwrap();
        assert!((t.eval(z, w).unwrap() - want).norm() < 1e-13 * want.norm());
        assert!((t.d_dz(z, w).unwrap() - KernelExpr::disk().d_dz(z, w).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn annulus_even_radial_routes_through_division() {
        let d = DomainSpec::annulus(0.5).unwrap();
        let w2 = WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap();
        let k = weighted_kernel(&d, &w2).unwrap();
        let k1 = weighted_kernel(&d, &WeightSpec::unit()).unwrap();
        let z = c(0.6, 0.2);
        let x = c(-0.7, 0.1);
        let want = k1.eval(z, x).unwrap() / (z * x.conj());
        assert!((k.eval(z, x).unwrap() - want).norm() < 1e-13 * want.norm());
        let w1 = WeightSpec::with_base(BaseWeight::radial(1.0)).unwrap();
        assert!(matches!(weighted_kernel(&d, &w1), Err(Error::UnsupportedWeight(_))));
    }
}
