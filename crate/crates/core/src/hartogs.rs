//! Hartogs domains `{(z, w) : z in D, |w| < phi(z)}` over a planar base.
//!
//! The Bergman kernel of such a domain restricted to `w = 0` is the planar
//! kernel with weight `pi * phi^2`, so a zero of that weighted kernel is a
//! zero of the two-variable kernel and the domain is not Lu Qi-keng.

use serde::{Deserialize, Serialize};

use crate::domain::{BaseWeight, DomainKind, DomainSpec, WeightSpec};
use crate::error::Result;
use crate::expr::KernelExpr;
use crate::transform::weighted_kernel;
use crate::zeros::{lu_qikeng_status, GridSpec, LuQikengStatus, ZeroWitness};
use std::f64::consts::PI;

/// A Hartogs domain over `base` with fiber radius `phi`.
///
/// The profile is read as a modulus: base factor `b` with zeros and poles
/// `(c, m)` means `phi(z) = b(z) * prod |z - c|^(+-m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartogsSpec {
    pub base: DomainSpec,
    pub profile: WeightSpec,
    /// Whether the domain is bounded in `C^2`.
    pub bounded: bool,
}

/// Builds the Hartogs domain for a validated profile.
pub fn lift(base: &DomainSpec, profile: &WeightSpec) -> Result<HartogsSpec> {
    profile.validate()?;
    slice_weight_of(profile).validate()?;
    Ok(HartogsSpec {
        base: base.clone(),
        profile: profile.clone(),
        bounded: profile_bounded(base, profile),
    })
}

fn profile_bounded(base: &DomainSpec, profile: &WeightSpec) -> bool {
    let pole_in_closure = profile.poles.iter().any(|p| base.closure_contains(p.center()));
    let radial_blowup = profile.base.alpha() < 0.0 && matches!(base.kind(), DomainKind::UnitDisk);
    !pole_in_closure && !radial_blowup
}

fn slice_weight_of(profile: &WeightSpec) -> WeightSpec {
    let base = match profile.base {
        BaseWeight::Constant { value } => BaseWeight::Constant {
            value: PI * value * value,
        },
        BaseWeight::Radial { alpha, coefficient } => BaseWeight::Radial {
            alpha: 2.0 * alpha,
            coefficient: PI * coefficient * coefficient,
        },
    };
    WeightSpec {
        base,
        zeros: profile.zeros.clone(),
        poles: profile.poles.clone(),
    }
}

impl HartogsSpec {
    /// The planar weight `pi * phi^2`.
    pub fn slice_weight(&self) -> WeightSpec {
        slice_weight_of(&self.profile)
    }
}

/// The kernel of the domain on the slice `w = 0`, as a function of the
/// base variables.
pub fn slice_kernel(h: &HartogsSpec) -> Result<KernelExpr> {
    weighted_kernel(&h.base, &h.slice_weight())
}

/// Outcome of a non-Lu-Qi-keng search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Certification {
    Certified { witness: ZeroWitness },
    Inconclusive { z_resolution: usize, w_resolution: usize },
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified { .. })
    }
}

/// Searches the slice kernel for a certified zero.
pub fn certify_non_lu_qikeng(h: &HartogsSpec, z_grid: &GridSpec, w_grid: &GridSpec) -> Result<Certification> {
    let k = slice_kernel(h)?;
    Ok(match lu_qikeng_status(&k, z_grid, w_grid)? {
        LuQikengStatus::ZeroFound { witness } => Certification::Certified { witness },
        LuQikengStatus::NoZeroAtResolution {
            z_resolution,
            w_resolution,
        } => Certification::Inconclusive {
            z_resolution,
            w_resolution,
        },
    })
}

/// Serializable record of a certification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub domain: HartogsSpec,
    pub witness: ZeroWitness,
    pub method: String,
}

impl Certificate {
    pub fn new(domain: &HartogsSpec, witness: ZeroWitness) -> Self {
        Certificate {
            domain: domain.clone(),
            witness,
            method: "weighted slice kernel at w = 0".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{disk_kernel, disk_radial_kernel};
    use crate::domain::Factor;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pts() -> Vec<(Complex64, Complex64)> {
        vec![
            (c(0.1, 0.2), c(-0.3, 0.4)),
            (c(0.6, -0.1), c(0.2, 0.2)),
            (c(-0.5, -0.5), c(0.0, 0.7)),
        ]
    }

    #[test]
    fn unit_profile_gives_disk_kernel() {
        let p = WeightSpec::with_base(BaseWeight::Constant { value: 1.0 / PI.sqrt() }).unwrap();
        let h = lift(&DomainSpec::unit_disk(), &p).unwrap();
        assert!(h.bounded);
        let k = slice_kernel(&h).unwrap();
        for (z, w) in pts() {
            let (a, b) = (k.eval(z, w).unwrap(), disk_kernel(z, w).unwrap());
            assert!((a - b).norm() <= 1e-13 * b.norm());
        }
    }

    #[test]
    fn modulus_profile_scales_radial_kernel() {
        let h = lift(&DomainSpec::unit_disk(), &WeightSpec::with_base(BaseWeight::radial(1.0)).unwrap()).unwrap();
        let k = slice_kernel(&h).unwrap();
        for (z, w) in pts() {
            let want = disk_radial_kernel(2.0, z, w).unwrap() / PI;
            assert!((k.eval(z, w).unwrap() - want).norm() <= 1e-12 * want.norm());
        }
    }

    #[test]
    fn interior_pole_profile() {
        let p = WeightSpec::new(
            BaseWeight::Constant { value: 1.0 / PI.sqrt() },
            vec![],
            vec![Factor::new(c(0.4, 0.0), 1)],
        )
        .unwrap();
        let h = lift(&DomainSpec::unit_disk(), &p).unwrap();
        assert!(!h.bounded);
        let k = slice_kernel(&h).unwrap();
        for (z, w) in pts() {
            let want = (z - 0.4) * disk_kernel(z, w).unwrap() * (w.conj() - 0.4);
            assert!((k.eval(z, w).unwrap() - want).norm() <= 1e-12 * want.norm());
        }
    }
}
