//! Points, planar domains and weights.
//!
//! A weight is `base(z) * |g(z)|^2` with `g(z) = prod (z - a_j)^{m_j} / prod (z - b_k)^{n_k}`.
//! The JSON layout of [`DomainSpec`] and [`WeightSpec`] is the configuration
//! format consumed by the command-line front end.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the complex plane with finite coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr")]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

#[derive(Deserialize)]
struct PointRepr {
    re: f64,
    im: f64,
}

impl TryFrom<PointRepr> for ComplexPoint {
    type Error = Error;

    fn try_from(p: PointRepr) -> Result<Self> {
        ComplexPoint::new(p.re, p.im)
    }
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidDomain(format!(
                "non-finite point ({re}, {im})"
            )));
        }
        Ok(ComplexPoint { re, im })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(c: Complex64) -> Self {
        ComplexPoint { re: c.re, im: c.im }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        p.to_complex()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind {
    UnitDisk,
    Annulus { inner_radius: f64 },
}

/// The unit disk or the annulus `r < |z| < 1`, optionally punctured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct DomainSpec {
    kind: DomainKind,
    punctures: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    kind: DomainTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inner_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    punctures: Vec<ComplexPoint>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum DomainTag {
    Disk,
    Annulus,
}

impl TryFrom<DomainRepr> for DomainSpec {
    type Error = Error;

    fn try_from(repr: DomainRepr) -> Result<Self> {
        let kind = match (repr.kind, repr.inner_radius) {
            (DomainTag::Disk, None) => DomainKind::UnitDisk,
            (DomainTag::Disk, Some(_)) => {
                return Err(Error::InvalidDomain(
                    "a disk takes no inner_radius".into(),
                ))
            }
            (DomainTag::Annulus, Some(r)) => DomainKind::Annulus { inner_radius: r },
            (DomainTag::Annulus, None) => {
                return Err(Error::InvalidDomain(
                    "an annulus needs inner_radius".into(),
                ))
            }
        };
        let punctures = repr.punctures.into_iter().map(Complex64::from).collect();
        DomainSpec::with_punctures(kind, punctures)
    }
}

impl From<DomainSpec> for DomainRepr {
    fn from(d: DomainSpec) -> Self {
        let (kind, inner_radius) = match d.kind {
            DomainKind::UnitDisk => (DomainTag::Disk, None),
            DomainKind::Annulus { inner_radius } => (DomainTag::Annulus, Some(inner_radius)),
        };
        DomainRepr {
            kind,
            inner_radius,
            punctures: d.punctures.into_iter().map(ComplexPoint::from).collect(),
        }
    }
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec {
            kind: DomainKind::UnitDisk,
            punctures: Vec::new(),
        }
    }

    pub fn annulus(inner_radius: f64) -> Result<Self> {
        Self::with_punctures(DomainKind::Annulus { inner_radius }, Vec::new())
    }

    pub fn with_punctures(kind: DomainKind, punctures: Vec<Complex64>) -> Result<Self> {
        if let DomainKind::Annulus { inner_radius } = kind {
            if !(inner_radius > 0.0 && inner_radius < 1.0) {
                return Err(Error::InvalidDomain(format!(
                    "annulus inner radius {inner_radius} must lie in (0, 1)"
                )));
            }
        }
        let bare = DomainSpec {
            kind,
            punctures: Vec::new(),
        };
        for p in &punctures {
            if !p.re.is_finite() || !p.im.is_finite() || !bare.contains_unpunctured(*p) {
                return Err(Error::InvalidDomain(format!(
                    "puncture {p} is not strictly inside the domain"
                )));
            }
        }
        Ok(DomainSpec { kind, punctures })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn punctures(&self) -> &[Complex64] {
        &self.punctures
    }

    /// Inner radius, zero for the disk.
    pub fn inner_radius(&self) -> f64 {
        match self.kind {
            DomainKind::UnitDisk => 0.0,
            DomainKind::Annulus { inner_radius } => inner_radius,
        }
    }

    /// Membership in the open domain with the punctures removed.
    pub fn contains(&self, p: Complex64) -> bool {
        self.contains_unpunctured(p) && !self.punctures.contains(&p)
    }

    /// Membership in the open domain, ignoring punctures. Kernels extend
    /// across punctures, so evaluation uses this predicate.
    pub fn contains_unpunctured(&self, p: Complex64) -> bool {
        let m = p.norm();
        match self.kind {
            DomainKind::UnitDisk => m < 1.0,
            DomainKind::Annulus { inner_radius } => m > inner_radius && m < 1.0,
        }
    }

    /// Membership in the closed domain `r <= |z| <= 1` (closed disk for the disk).
    pub fn closure_contains(&self, p: Complex64) -> bool {
        let m = p.norm();
        m <= 1.0 && m >= self.inner_radius()
    }

    /// Distance from `p` to the boundary (negative outside).
    pub fn boundary_distance(&self, p: Complex64) -> f64 {
        let m = p.norm();
        match self.kind {
            DomainKind::UnitDisk => 1.0 - m,
            DomainKind::Annulus { inner_radius } => (1.0 - m).min(m - inner_radius),
        }
    }

    /// Same domain without punctures.
    pub fn unpunctured(&self) -> DomainSpec {
        DomainSpec {
            kind: self.kind,
            punctures: Vec::new(),
        }
    }
}

/// The base factor of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BaseWeight {
    Constant {
        value: f64,
    },
    /// `coefficient * |z|^alpha`.
    Radial {
        alpha: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        coefficient: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

impl BaseWeight {
    pub fn unit() -> Self {
        BaseWeight::Constant { value: 1.0 }
    }

    pub fn radial(alpha: f64) -> Self {
        BaseWeight::Radial {
            alpha,
            coefficient: 1.0,
        }
    }

    /// Positive constant multiplying the weight.
    pub fn scale(&self) -> f64 {
        match *self {
            BaseWeight::Constant { value } => value,
            BaseWeight::Radial { coefficient, .. } => coefficient,
        }
    }

    /// Radial exponent, zero for constants.
    pub fn alpha(&self) -> f64 {
        match *self {
            BaseWeight::Constant { .. } => 0.0,
            BaseWeight::Radial { alpha, .. } => alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.scale();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidWeight(format!(
                "base scale {s} must be positive and finite"
            )));
        }
        let a = self.alpha();
        if !a.is_finite() || a <= -2.0 {
            return Err(Error::AlphaOutOfRange(a));
        }
        Ok(())
    }

    pub fn value_at(&self, p: Complex64) -> f64 {
        match *self {
            BaseWeight::Constant { value } => value,
            BaseWeight::Radial { alpha, coefficient } => coefficient * p.norm().powf(alpha),
        }
    }
}

/// A zero or pole of `g` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    #[serde(flatten)]
    pub center: ComplexPoint,
    pub mult: u32,
}

impl Factor {
    pub fn new(center: Complex64, mult: u32) -> Self {
        Factor {
            center: center.into(),
            mult,
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center.to_complex()
    }
}

/// The weight `base(z) * prod |z - a_j|^{2 m_j} / prod |z - b_k|^{2 n_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightRepr", into = "WeightRepr")]
pub struct WeightSpec {
    pub base: BaseWeight,
    pub zeros: Vec<Factor>,
    pub poles: Vec<Factor>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightRepr {
    base: BaseWeight,
    #[serde(default)]
    zeros: Vec<Factor>,
    #[serde(default)]
    poles: Vec<Factor>,
}

impl TryFrom<WeightRepr> for WeightSpec {
    type Error = Error;

    fn try_from(r: WeightRepr) -> Result<Self> {
        WeightSpec::new(r.base, r.zeros, r.poles)
    }
}

impl From<WeightSpec> for WeightRepr {
    fn from(w: WeightSpec) -> Self {
        WeightRepr {
            base: w.base,
            zeros: w.zeros,
            poles: w.poles,
        }
    }
}

impl WeightSpec {
    pub fn new(base: BaseWeight, zeros: Vec<Factor>, poles: Vec<Factor>) -> Result<Self> {
        let w = WeightSpec { base, zeros, poles };
        w.validate()?;
        Ok(w)
    }

    /// The weight identically equal to one.
    pub fn unit() -> Self {
        WeightSpec {
            base: BaseWeight::unit(),
            zeros: Vec::new(),
            poles: Vec::new(),
        }
    }

    pub fn with_base(base: BaseWeight) -> Result<Self> {
        Self::new(base, Vec::new(), Vec::new())
    }

    /// `|z - c|^{2m}` for each listed center.
    pub fn with_zeros(zeros: &[(Complex64, u32)]) -> Result<Self> {
        Self::new(
            BaseWeight::unit(),
            zeros.iter().map(|&(c, m)| Factor::new(c, m)).collect(),
            Vec::new(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        for f in self.zeros.iter().chain(&self.poles) {
            if f.mult == 0 {
                return Err(Error::InvalidWeight("multiplicities must be positive".into()));
            }
        }
        let distinct = |list: &[Factor]| {
            list.iter()
                .enumerate()
                .all(|(i, a)| list[..i].iter().all(|b| b.center != a.center))
        };
        if !distinct(&self.zeros) || !distinct(&self.poles) {
            return Err(Error::InvalidWeight("factor centers must be distinct".into()));
        }
        if self
            .zeros
            .iter()
            .any(|z| self.poles.iter().any(|p| p.center == z.center))
        {
            return Err(Error::InvalidWeight(
                "a center cannot be both a zero and a pole".into(),
            ));
        }
        Ok(())
    }

    /// Value of the weight at `p`.
    pub fn value(&self, p: Complex64) -> Result<f64> {
        let mut v = self.base.value_at(p);
        for f in &self.poles {
            let d = (p - f.center()).norm_sqr();
            if d == 0.0 {
                return Err(Error::PoleAtPoint(p));
            }
            v /= d.powi(f.mult as i32);
        }
        for f in &self.zeros {
            v *= (p - f.center()).norm_sqr().powi(f.mult as i32);
        }
        Ok(v)
    }

    /// Every zero and pole center.
    pub fn centers(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.zeros.iter().chain(&self.poles).map(|f| f.center())
    }
}

/// Domain membership; see [`DomainSpec::contains`].
pub fn contains(d: &DomainSpec, p: Complex64) -> bool {
    d.contains(p)
}

/// Value of the weight; see [`WeightSpec::value`].
pub fn weight_value(w: &WeightSpec, p: Complex64) -> Result<f64> {
    w.value(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn membership() {
        let disk = DomainSpec::unit_disk();
        assert!(contains(&disk, c(0.0, 0.0)));
        assert!(!contains(&disk, c(1.0, 0.0)));
        let ann = DomainSpec::annulus(0.5).unwrap();
        assert!(!contains(&ann, c(0.25, 0.0)));
        assert!(contains(&ann, c(0.0, 0.75)));
        assert!(!contains(&ann, c(0.5, 0.0)));
    }

    #[test]
    fn punctures_are_excluded() {
        let d = DomainSpec::with_punctures(DomainKind::UnitDisk, vec![c(0.3, 0.0)]).unwrap();
        assert!(!d.contains(c(0.3, 0.0)));
        assert!(d.contains_unpunctured(c(0.3, 0.0)));
        assert!(DomainSpec::with_punctures(DomainKind::UnitDisk, vec![c(1.3, 0.0)]).is_err());
    }

    #[test]
    fn annulus_radius_bounds() {
        assert!(DomainSpec::annulus(0.0).is_err());
        assert!(DomainSpec::annulus(1.0).is_err());
        assert!(DomainSpec::annulus(f64::NAN).is_err());
    }

    #[test]
    fn weight_values() {
        let w = WeightSpec::with_zeros(&[(c(0.0, 0.0), 1)]).unwrap();
        assert!((weight_value(&w, c(0.5, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        let w = WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap();
        assert!((weight_value(&w, c(0.5, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        let w = WeightSpec::new(BaseWeight::unit(), vec![], vec![Factor::new(c(0.0, 0.0), 1)]).unwrap();
        assert!((weight_value(&w, c(0.5, 0.0)).unwrap() - 4.0).abs() < 1e-14);
        assert_eq!(weight_value(&w, c(0.0, 0.0)), Err(Error::PoleAtPoint(c(0.0, 0.0))));
    }

    #[test]
    fn weight_invariants() {
        assert!(matches!(
            WeightSpec::with_base(BaseWeight::radial(-2.0)),
            Err(Error::AlphaOutOfRange(_))
        ));
        assert!(WeightSpec::with_zeros(&[(c(0.1, 0.0), 1), (c(0.1, 0.0), 2)]).is_err());
        assert!(WeightSpec::new(
            BaseWeight::unit(),
            vec![Factor::new(c(0.1, 0.0), 1)],
            vec![Factor::new(c(0.1, 0.0), 1)]
        )
        .is_err());
        assert!(WeightSpec::with_zeros(&[(c(0.1, 0.0), 0)]).is_err());
    }

    #[test]
    fn weight_is_continuous_along_rays() {
        let w = WeightSpec::new(
            BaseWeight::radial(1.5),
            vec![Factor::new(c(0.2, 0.1), 2)],
            vec![Factor::new(c(-0.4, 0.3), 1)],
        )
        .unwrap();
        for k in 0..8 {
            let dir = Complex64::from_polar(1.0, 0.7 * k as f64 + 0.1);
            let mut prev = w.value(dir * 0.05).unwrap();
            for s in 1..200 {
                let v = w.value(dir * (0.05 + 0.0045 * s as f64)).unwrap();
                assert!(v >= 0.0 && v.is_finite());
                assert!((v - prev).abs() < 0.2 * (1.0 + prev), "jump on ray {k}");
                prev = v;
            }
        }
    }

    #[test]
    fn json_layout() {
        let d: DomainSpec =
            serde_json::from_str(r#"{"kind":"annulus","inner_radius":0.5}"#).unwrap();
        assert_eq!(d.inner_radius(), 0.5);
        let d: DomainSpec = serde_json::from_str(r#"{"kind":"disk"}"#).unwrap();
        assert_eq!(d, DomainSpec::unit_disk());
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"annulus"}"#).is_err());
        assert!(serde_json::from_str::<DomainSpec>(r#"{"kind":"annulus","inner_radius":1.5}"#).is_err());

        let w: WeightSpec = serde_json::from_str(
            r#"{"base":{"kind":"radial","alpha":2},"zeros":[{"re":0.5,"im":0,"mult":1}],"poles":[]}"#,
        )
        .unwrap();
        assert_eq!(w.base, BaseWeight::radial(2.0));
        assert_eq!(w.zeros[0].center(), c(0.5, 0.0));
        let back = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<WeightSpec>(&back).unwrap(), w);
        assert!(serde_json::from_str::<WeightSpec>(
            r#"{"base":{"kind":"radial","alpha":-3}}"#
        )
        .is_err());
    }
}
