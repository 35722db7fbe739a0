//! Kernel expression trees.
//!
//! A kernel `K(z, w)` is handled as a function of the two holomorphic
//! variables `z` and `v = conj(w)`. Every node produces a truncated bivariate
//! Taylor expansion ([`Jet`]) around a point, which gives values and exact
//! derivatives in one pass. Division by `(z - c)` near a deflation center
//! expands the numerator at `c` itself, drops the vanishing leading rows, and
//! re-expands at the requested point.

use num_complex::Complex64;
use std::sync::Arc;

use crate::base::{self, AnnulusResummed, DiskAutomorphism};
use crate::domain::{BaseWeight, DomainKind, DomainSpec};
use crate::error::{Error, Result};
use crate::jet::{compose_product, series, Jet};
use crate::poly::Poly;

/// Distance to a deflation center below which the limit path is taken.
pub const EPS_SING: f64 = 1e-8;

/// Diagonal values at or below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Immutable, cheaply clonable kernel expression.
#[derive(Clone, Debug)]
pub struct KernelExpr(Arc<Node>);

#[derive(Debug)]
pub enum Node {
    Base(BaseNode),
    /// `inner(z, w) * den(z) conj(den(w)) / (num(z) conj(num(w)))`.
    RationalDivide {
        inner: KernelExpr,
        factor: RationalFactor,
    },
    /// Rank-one deflation of `inner` at `center`.
    RankOneDeflate {
        inner: KernelExpr,
        center: Complex64,
        diag: f64,
    },
    /// Several centers at once, in the lexicographic direct-sum form.
    DirectSum {
        inner: KernelExpr,
        centers: Vec<(Complex64, usize)>,
        p: Poly,
        terms: Vec<SumTerm>,
    },
    /// `f'(z) inner(f(z), f(w)) conj(f'(w))`.
    Transport {
        inner: KernelExpr,
        map: DiskAutomorphism,
    },
}

#[derive(Debug)]
pub struct BaseNode {
    pub domain: DomainSpec,
    pub weight: BaseWeight,
    eval: BaseEval,
}

#[derive(Debug)]
enum BaseEval {
    Disk { alpha: f64, scale: f64 },
    Annulus(AnnulusResummed),
}

/// One correction term `R(z, w) q(z) conj(q(w))` of a [`Node::DirectSum`],
/// with `R = K_q(z, c) K_q(c, w) / K_q(c, c)`.
#[derive(Debug)]
pub struct SumTerm {
    /// Position `(j, k)` in the lexicographic order, 1-based.
    pub index: (usize, usize),
    pub center: Complex64,
    pub kernel: KernelExpr,
    pub q: Poly,
    pub diag: f64,
}

/// The rational function `g = prod (z - a)^m / prod (z - b)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFactor {
    zeros: Vec<(Complex64, usize)>,
    poles: Vec<(Complex64, usize)>,
    num: Poly,
    den: Poly,
}

impl RationalFactor {
    pub fn new(zeros: Vec<(Complex64, usize)>, poles: Vec<(Complex64, usize)>) -> Result<Self> {
        let mut zeros: Vec<_> = zeros.into_iter().filter(|z| z.1 > 0).collect();
        let mut poles: Vec<_> = poles.into_iter().filter(|p| p.1 > 0).collect();
        // Cancel common centers.
        for z in zeros.iter_mut() {
            if let Some(p) = poles.iter_mut().find(|p| p.0 == z.0) {
                let k = z.1.min(p.1);
                z.1 -= k;
                p.1 -= k;
            }
        }
        zeros.retain(|z| z.1 > 0);
        poles.retain(|p| p.1 > 0);
        let num = Poly::from_roots(&zeros)?;
        let den = Poly::from_roots(&poles)?;
        Ok(RationalFactor {
            zeros,
            poles,
            num,
            den,
        })
    }

    pub fn zeros(&self) -> &[(Complex64, usize)] {
        &self.zeros
    }

    pub fn poles(&self) -> &[(Complex64, usize)] {
        &self.poles
    }

    pub fn is_one(&self) -> bool {
        self.zeros.is_empty() && self.poles.is_empty()
    }

    /// Product of two factors, with cancellation.
    pub fn times(&self, other: &RationalFactor) -> Result<RationalFactor> {
        let mut zeros = self.zeros.clone();
        let mut poles = self.poles.clone();
        merge_into(&mut zeros, &other.zeros);
        merge_into(&mut poles, &other.poles);
        RationalFactor::new(zeros, poles)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Series of `1/g` around `z0` (or of `1/conj(g(conj v))` when `conj`).
    fn inverse_series(&self, z0: Complex64, order: usize, conj: bool) -> Vec<Complex64> {
        let (num, den) = if conj {
            (self.num.conj_coeffs(), self.den.conj_coeffs())
        } else {
            (self.num.clone(), self.den.clone())
        };
        series::div(&den.taylor(z0, order), &num.taylor(z0, order), order)
    }
}

fn merge_into(list: &mut Vec<(Complex64, usize)>, more: &[(Complex64, usize)]) {
    for &(c, m) in more {
        match list.iter_mut().find(|e| e.0 == c) {
            Some(e) => e.1 += m,
            None => list.push((c, m)),
        }
    }
}

impl KernelExpr {
    fn new(node: Node) -> Self {
        KernelExpr(Arc::new(node))
    }

    /// Base kernel of a domain with a base weight. The annulus supports only
    /// constant weights here; radial powers there are routed through
    /// [`crate::transform::weighted_kernel`].
    pub fn base(domain: &DomainSpec, weight: BaseWeight) -> Result<Self> {
        weight.validate()?;
        let eval = match domain.kind() {
            DomainKind::UnitDisk => BaseEval::Disk {
                alpha: weight.alpha(),
                scale: weight.scale(),
            },
            DomainKind::Annulus { inner_radius } => {
                if weight.alpha() != 0.0 {
                    return Err(Error::UnsupportedWeight(format!(
                        "radial exponent {} on the annulus",
                        weight.alpha()
                    )));
                }
                BaseEval::Annulus(AnnulusResummed::new(inner_radius, weight.scale())?)
            }
        };
        Ok(KernelExpr::new(Node::Base(BaseNode {
            domain: domain.unpunctured(),
            weight,
            eval,
        })))
    }

    /// Unweighted kernel of the unit disk.
    pub fn disk() -> Self {
        Self::base(&DomainSpec::unit_disk(), BaseWeight::unit()).expect("unit weight is valid")
    }

    pub(crate) fn rational_divide(inner: KernelExpr, factor: RationalFactor) -> Self {
        KernelExpr::new(Node::RationalDivide { inner, factor })
    }

    pub(crate) fn rank_one_deflate(inner: KernelExpr, center: Complex64, diag: f64) -> Self {
        KernelExpr::new(Node::RankOneDeflate {
            inner,
            center,
            diag,
        })
    }

    pub(crate) fn direct_sum(
        inner: KernelExpr,
        centers: Vec<(Complex64, usize)>,
        p: Poly,
        terms: Vec<SumTerm>,
    ) -> Self {
        KernelExpr::new(Node::DirectSum {
            inner,
            centers,
            p,
            terms,
        })
    }

    pub(crate) fn transport(inner: KernelExpr, map: DiskAutomorphism) -> Self {
        KernelExpr::new(Node::Transport { inner, map })
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Identity of the shared node, for deduplication.
    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn domain(&self) -> &DomainSpec {
        match self.node() {
            Node::Base(b) => &b.domain,
            Node::RationalDivide { inner, .. }
            | Node::RankOneDeflate { inner, .. }
            | Node::DirectSum { inner, .. }
            | Node::Transport { inner, .. } => inner.domain(),
        }
    }

    /// Number of nodes, shared subtrees counted once per occurrence.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Base(_) => 0,
            Node::RationalDivide { inner, .. }
            | Node::RankOneDeflate { inner, .. }
            | Node::Transport { inner, .. } => inner.size(),
            Node::DirectSum { inner, terms, .. } => {
                inner.size() + terms.iter().map(|t| t.kernel.size()).sum::<usize>()
            }
        }
    }

    fn check_point(&self, p: Complex64) -> Result<()> {
        if p.re.is_finite() && p.im.is_finite() && self.domain().contains_unpunctured(p) {
            Ok(())
        } else {
            Err(Error::DomainViolation(p))
        }
    }

    /// Value at `(z, w)`, taking exact limits at removable singularities.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(self.jet(z, w, 0, 0)?.value())
    }

    /// Alias of [`KernelExpr::eval`] under the name used by callers that
    /// care about the limit semantics.
    pub fn eval_with_limits(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.eval(z, w)
    }

    /// Evaluation that never takes the limit path; at a deflation center
    /// this divides by zero.
    pub fn eval_direct(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        self.check_point(w)?;
        Ok(self.jet_v(z, w.conj(), 0, 0, 0.0)?.value())
    }

    /// `d/dz K(z, w)`.
    pub fn d_dz(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(self.jet(z, w, 1, 0)?.d_dz())
    }

    /// `d/d conj(w) K(z, w)`.
    pub fn d_dwbar(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        Ok(self.jet(z, w, 0, 1)?.d_dwbar())
    }

    /// Taylor coefficients `a_ij` of `K` in `(z - z0)^i (conj(w) - conj(w0))^j`.
    pub fn jet(&self, z0: Complex64, w0: Complex64, nz: usize, nv: usize) -> Result<Jet> {
        self.check_point(z0)?;
        self.check_point(w0)?;
        self.jet_v(z0, w0.conj(), nz, nv, EPS_SING)
    }

    /// Taylor coefficients of `z -> K(z, w0)` around `z0`.
    pub fn z_series(&self, z0: Complex64, w0: Complex64, order: usize) -> Result<Vec<Complex64>> {
        Ok(self.jet(z0, w0, order, 0)?.z_series())
    }

    pub(crate) fn jet_v(
        &self,
        z0: Complex64,
        v0: Complex64,
        nz: usize,
        nv: usize,
        eps: f64,
    ) -> Result<Jet> {
        match self.node() {
            Node::Base(b) => b.jet(z0, v0, nz, nv),
            Node::RationalDivide { inner, factor } => {
                let j = inner.jet_v(z0, v0, nz, nv, eps)?;
                Ok(j
                    .mul_z_series(&factor.inverse_series(z0, nz, false))
                    .mul_v_series(&factor.inverse_series(v0, nv, true)))
            }
            Node::RankOneDeflate {
                inner,
                center,
                diag,
            } => {
                let c = *center;
                let cv = c.conj();
                let roots = [(c, 1usize)];
                let p = Poly::from_roots(&roots)?;
                removable_quotient(z0, v0, nz, nv, eps, &roots, &p, |zc, vc, oz, ov| {
                    let a = inner.jet_v(zc, vc, oz, ov, eps)?;
                    let left = if vc == cv {
                        a.z_series()
                    } else {
                        inner.jet_v(zc, cv, oz, 0, eps)?.z_series()
                    };
                    let right = if zc == c {
                        a.v_series()
                    } else {
                        inner.jet_v(c, vc, 0, ov, eps)?.v_series()
                    };
                    let r = Jet::outer(&left, &right, oz, ov).scale(Complex64::new(1.0 / diag, 0.0));
                    Ok(&a - &r)
                })
            }
            Node::DirectSum {
                inner,
                centers,
                p,
                terms,
            } => removable_quotient(z0, v0, nz, nv, eps, centers, p, |zc, vc, oz, ov| {
                let mut a = inner.jet_v(zc, vc, oz, ov, eps)?;
                for t in terms {
                    let cv = t.center.conj();
                    let left = series::mul(
                        &t.kernel.jet_v(zc, cv, oz, 0, eps)?.z_series(),
                        &t.q.taylor(zc, oz),
                        oz,
                    );
                    let right = series::mul(
                        &t.kernel.jet_v(t.center, vc, 0, ov, eps)?.v_series(),
                        &t.q.conj_coeffs().taylor(vc, ov),
                        ov,
                    );
                    let r = Jet::outer(&left, &right, oz, ov).scale(Complex64::new(1.0 / t.diag, 0.0));
                    a = &a - &r;
                }
                Ok(a)
            }),
            Node::Transport { inner, map } => {
                let fz = map.series(z0, nz + 1);
                let fv = map.conjugate().series(v0, nv + 1);
                let j = inner.jet_v(fz[0], fv[0], nz, nv, eps)?;
                let composed = j.compose(&fz, &fv, nz, nv);
                let dz = series::derivative(&fz);
                let dv = series::derivative(&fv);
                Ok(composed.mul_z_series(&dz).mul_v_series(&dv))
            }
        }
    }
}

impl BaseNode {
    fn jet(&self, z0: Complex64, v0: Complex64, nz: usize, nv: usize) -> Result<Jet> {
        for p in [z0, v0.conj()] {
            if !self.domain.contains_unpunctured(p) {
                return Err(Error::DomainViolation(p));
            }
        }
        let order = nz + nv;
        let t = match &self.eval {
            BaseEval::Disk { alpha, scale } => base::disk_taylor(*alpha, *scale, z0 * v0, order),
            BaseEval::Annulus(a) => a.taylor(z0, v0, order),
        };
        Ok(compose_product(&t, z0, v0, nz, nv))
    }
}

/// `numer / (p(z) conj(p(w)))` where `numer` vanishes at the roots of `p`
/// in each variable. `numer(zc, vc, oz, ov)` expands the numerator.
#[allow(clippy::too_many_arguments)]
fn removable_quotient<F>(
    z0: Complex64,
    v0: Complex64,
    nz: usize,
    nv: usize,
    eps: f64,
    roots: &[(Complex64, usize)],
    p: &Poly,
    numer: F,
) -> Result<Jet>
where
    F: Fn(Complex64, Complex64, usize, usize) -> Result<Jet>,
{
    let near_z = roots.iter().find(|(c, _)| (z0 - c).norm() < eps).copied();
    let near_v = roots
        .iter()
        .find(|(c, _)| (v0 - c.conj()).norm() < eps)
        .map(|&(c, m)| (c.conj(), m));
    let (zc, az) = near_z.unwrap_or((z0, 0));
    let (vc, av) = near_v.unwrap_or((v0, 0));
    let mut n = numer(zc, vc, nz + az, nv + av)?;
    if az > 0 {
        n = n.drop_z(az);
    }
    if av > 0 {
        n = n.drop_v(av);
    }
    let pz = cofactor(p, zc, az, nz);
    let pv = cofactor(&p.conj_coeffs(), vc, av, nv);
    let n = n
        .mul_z_series(&series::recip(&pz, nz))
        .mul_v_series(&series::recip(&pv, nv));
    Ok(if az > 0 || av > 0 {
        n.recenter(z0 - zc, v0 - vc)
    } else {
        n
    })
}

/// Taylor series of `p(z) / (z - x0)^k` at `x0`, where `x0` is a root of
/// multiplicity `k` (or `k = 0`).
fn cofactor(p: &Poly, x0: Complex64, k: usize, order: usize) -> Vec<Complex64> {
    if k == 0 {
        return p.taylor(x0, order);
    }
    p.taylor(x0, order + k)[k..].to_vec()
}
