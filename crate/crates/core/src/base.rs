//! Base kernels: the unit disk (optionally with a radial weight `|z|^alpha`),
//! the Möbius-power formula for `|z - c|^{2p}`, and the annulus `r < |z| < 1`.
//!
//! The disk kernels are closed forms. The annulus kernel is the bilateral
//! monomial series `sum_n (z conj(w))^n / h_n` with
//! `h_n = pi (1 - r^{2n+2}) / (n + 1)` for `n != -1` and `h_{-1} = 2 pi ln(1/r)`.
//! [`annulus_kernel`] sums it literally with an explicit tail bound. The
//! expression trees evaluate the same series after expanding each
//! `1 / (1 - q^{n+1})` geometrically (`q = r^2`) and resumming over `n`:
//!
//! ```text
//! pi K(x) = sum_{j>=0} q^j / (1 - q^j x)^2 + sum_{j>=1} q^j / (x - q^j)^2 + 1 / (2 ln(1/r) x)
//! ```
//!
//! with `x = z conj(w)`. This converges like `q^j` uniformly up to both
//! boundary circles.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::dd::CDd;
use crate::error::{Error, Result};
use crate::jet::series;

pub const DEFAULT_ANNULUS_NMAX: usize = 400;

/// Cutoff for the resummed annulus series: terms below this factor of the
/// leading one are dropped.
const ANNULUS_RESUM_CUTOFF: f64 = 1e-34;

/// Outcome of truncating the bilateral annulus series at `|n| <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub n_max: usize,
    pub tail_bound: f64,
}

fn in_disk(p: Complex64) -> Result<()> {
    if p.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation(p))
    }
}

/// `1 / (pi (1 - z conj(w))^2)`.
pub fn disk_kernel(z: Complex64, w: Complex64) -> Result<Complex64> {
    in_disk(z)?;
    in_disk(w)?;
    let u = 1.0 - z * w.conj();
    Ok(1.0 / (PI * u * u))
}

/// Kernel of the disk with weight `|z|^alpha`:
/// `(1 + alpha/2 - (alpha/2) z conj(w)) K(z, w)`.
pub fn disk_radial_kernel(alpha: f64, z: Complex64, w: Complex64) -> Result<Complex64> {
    if !(alpha > -2.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let k = disk_kernel(z, w)?;
    Ok((1.0 + alpha / 2.0 - alpha / 2.0 * z * w.conj()) * k)
}

/// `mu_c(z) = (z - c) / (1 - conj(c) z)`.
pub fn mobius(c: Complex64, z: Complex64) -> Complex64 {
    (z - c) / (1.0 - c.conj() * z)
}

/// Kernel of the disk with weight `|z - c|^{2p}`:
/// `((p+1) - p mu_c(z) conj(mu_c(w))) K(z, w) / ((1 - conj(c) z)^p (1 - c conj(w))^p)`.
pub fn disk_mobius_power_kernel(
    c: Complex64,
    p: u32,
    z: Complex64,
    w: Complex64,
) -> Result<Complex64> {
    in_disk(c)?;
    let k = disk_kernel(z, w)?;
    let pf = p as f64;
    let mu = mobius(c, z) * mobius(c, w).conj();
    let denom = (1.0 - c.conj() * z).powu(p) * (1.0 - c * w.conj()).powu(p);
    Ok(((pf + 1.0) - pf * mu) * k / denom)
}

fn annulus_point(r: f64, p: Complex64) -> Result<()> {
    let m = p.norm();
    if m > r && m < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation(p))
    }
}

/// Squared norm of `z^n` on the annulus.
pub fn annulus_monomial_norm(r: f64, n: i64) -> f64 {
    if n == -1 {
        2.0 * PI * (1.0 / r).ln()
    } else {
        PI * (1.0 - r.powi(2 * n as i32 + 2)) / (n as f64 + 1.0)
    }
}

/// Literal bilateral series truncated at `|n| <= n_max`.
///
/// Fails with [`Error::TruncationTooSmall`] if the tail bound exceeds
/// `tolerance` (absolute).
pub fn annulus_kernel(
    r: f64,
    z: Complex64,
    w: Complex64,
    n_max: usize,
    tolerance: f64,
) -> Result<(Complex64, SeriesTruncation)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidDomain(format!("annulus inner radius {r}")));
    }
    annulus_point(r, z)?;
    annulus_point(r, w)?;
    let x = z * w.conj();
    let tail_bound = annulus_tail_bound(r, x.norm(), n_max);
    if tail_bound > tolerance {
        return Err(Error::TruncationTooSmall {
            tail_bound,
            requested: tolerance,
        });
    }
    // Compensated (Neumaier) accumulation: the terms cancel heavily near the
    // zero set.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut add = |t: Complex64| {
        let s = sum + t;
        let fix = |a: f64, b: f64, s: f64| {
            if a.abs() >= b.abs() {
                (a - s) + b
            } else {
                (b - s) + a
            }
        };
        comp += Complex64::new(fix(sum.re, t.re, s.re), fix(sum.im, t.im, s.im));
        sum = s;
    };
    // For n = -m the monomial norm grows like r^(2-2m); pair it with
    // (r^2 / x)^m so that neither factor overflows.
    let q = r * r;
    let t = q / x;
    let mut pos = Complex64::new(1.0, 0.0);
    let mut neg = t;
    for n in 0..=n_max as i64 {
        add(pos / annulus_monomial_norm(r, n));
        if n == 1 {
            add(neg / (q * annulus_monomial_norm(r, -1)));
        } else if n >= 2 {
            let m = n as f64;
            add(neg * ((m - 1.0) / (PI * q * (1.0 - q.powi(n as i32 - 1)))));
        }
        if n >= 1 {
            neg *= t;
        }
        pos *= x;
    }
    Ok((
        sum + comp,
        SeriesTruncation {
            n_max,
            tail_bound,
        },
    ))
}

/// Upper bound for the omitted terms `|n| > n_max` at `|z conj(w)| = rho`.
pub fn annulus_tail_bound(r: f64, rho: f64, n_max: usize) -> f64 {
    let q = r * r;
    let n = n_max as f64;
    let lead = 1.0 / (PI * (1.0 - q));
    // sum_{n > N} (n+1) rho^n
    let pos = if rho < 1.0 {
        rho.powf(n + 1.0) * ((n + 2.0) - (n + 1.0) * rho) / ((1.0 - rho) * (1.0 - rho))
    } else {
        f64::INFINITY
    };
    // sum_{k >= N} k sigma^k / rho, sigma = q / rho
    let sigma = q / rho;
    let neg = if sigma < 1.0 {
        sigma.powf(n) * (n - (n - 1.0) * sigma) / ((1.0 - sigma) * (1.0 - sigma)) / rho
    } else {
        f64::INFINITY
    };
    lead * (pos + neg)
}

const DD_TERM_CUTOFF: f64 = 1e-3;

/// The annulus kernel evaluated through the resummed series.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusResummed {
    r: f64,
    /// `q^j` for `j = 0..terms`.
    qpow: Vec<f64>,
    /// `1 / (pi * scale)`.
    series_coef: f64,
    /// `1 / (2 pi ln(1/r) * scale)`.
    log_coef: f64,
}

impl AnnulusResummed {
    pub fn new(r: f64, scale: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidDomain(format!("annulus inner radius {r}")));
        }
        let q = r * r;
        let mut qpow = vec![1.0];
        while *qpow.last().unwrap() > ANNULUS_RESUM_CUTOFF && qpow.len() < 100_000 {
            let next = qpow.last().unwrap() * q;
            qpow.push(next);
        }
        Ok(AnnulusResummed {
            r,
            qpow,
            series_coef: 1.0 / (PI * scale),
            log_coef: 1.0 / (2.0 * PI * (1.0 / r).ln() * scale),
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.r
    }

    /// Value at `x = z0 * v0`, with the product and every `x`-dependent
    /// operation carried in double-double.
    pub fn value(&self, z0: Complex64, v0: Complex64) -> Complex64 {
        let x = CDd::prod(z0, v0);
        let one = CDd::from_c64(Complex64::new(1.0, 0.0));
        let mut s = CDd::default();
        // Small terms only perturb the sum below double-double resolution of
        // the leading ones; plain doubles suffice there.
        let split = self.qpow.partition_point(|&qj| qj >= DD_TERM_CUTOFF);
        let xf = x.to_c64();
        let mut tail = Complex64::new(0.0, 0.0);
        for (j, &qj) in self.qpow.iter().enumerate().skip(split) {
            tail += qj / (1.0 - qj * xf).powu(2);
            if j >= 1 {
                tail += qj / (xf - qj).powu(2);
            }
        }
        s = s + CDd::from_c64(tail);
        for (j, &qj) in self.qpow.iter().enumerate().take(split) {
            let a = (one - x.scale(qj)).square().recip().scale(qj);
            s = s + a;
            if j >= 1 {
                let b = (x - CDd::from_c64(Complex64::new(qj, 0.0)))
                    .square()
                    .recip()
                    .scale(qj);
                s = s + b;
            }
        }
        (s.scale(self.series_coef) + x.recip().scale(self.log_coef)).to_c64()
    }

    /// Taylor coefficients of the kernel as a function of `x` around
    /// `x0 = z0 * v0`, orders `0..=order`.
    pub fn taylor(&self, z0: Complex64, v0: Complex64, order: usize) -> Vec<Complex64> {
        let x = z0 * v0;
        let mut out = Vec::with_capacity(order + 1);
        out.push(self.value(z0, v0));
        for k in 1..=order {
            let kf = k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &qj) in self.qpow.iter().enumerate() {
                let qk = qj.powi(k as i32 + 1);
                if qk > 0.0 {
                    s += (kf + 1.0) * qk / (1.0 - qj * x).powu(k as u32 + 2);
                }
                if j >= 1 {
                    s += sign * (kf + 1.0) * qj / (x - qj).powu(k as u32 + 2);
                }
            }
            out.push(s * self.series_coef + sign * self.log_coef / x.powu(k as u32 + 1));
        }
        out
    }

    /// Bound on the neglected resummation terms at `|x| = rho`.
    pub fn tail_bound(&self, rho: f64) -> f64 {
        let q = self.r * self.r;
        let qj = self.qpow.last().copied().unwrap_or(1.0) * q;
        let first = qj / ((1.0 - q) * (1.0 - qj * rho).powi(2));
        let second = if rho > qj {
            qj / ((1.0 - q) * (rho - qj).powi(2))
        } else {
            f64::INFINITY
        };
        self.series_coef * (first + second)
    }
}

/// Resummed annulus kernel as a plain function.
pub fn annulus_kernel_resummed(r: f64, z: Complex64, w: Complex64) -> Result<Complex64> {
    annulus_point(r, z)?;
    annulus_point(r, w)?;
    Ok(AnnulusResummed::new(r, 1.0)?.value(z, w.conj()))
}

/// Taylor coefficients in `s = z conj(w)` of the disk kernel with weight
/// `scale * |z|^alpha`, around `s0`.
pub(crate) fn disk_taylor(alpha: f64, scale: f64, s0: Complex64, order: usize) -> Vec<Complex64> {
    let u = 1.0 - s0;
    let inv_u = 1.0 / u;
    let mut out = Vec::with_capacity(order + 1);
    let mut pw = inv_u; // u^{-(k+1)}
    for k in 0..=order {
        let kf = k as f64;
        out.push(((kf + 1.0) * pw * inv_u + 0.5 * alpha * pw) / (PI * scale));
        pw *= inv_u;
    }
    out
}

/// Disk automorphism `z -> e^{i theta} (z - a) / (1 - conj(a) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskAutomorphism {
    a: Complex64,
    theta: f64,
}

impl DiskAutomorphism {
    pub fn new(a: Complex64, theta: f64) -> Result<Self> {
        if !(a.norm() < 1.0) || !theta.is_finite() {
            return Err(Error::InvalidAutomorphism(a.norm()));
        }
        Ok(DiskAutomorphism { a, theta })
    }

    pub fn identity() -> Self {
        DiskAutomorphism {
            a: Complex64::new(0.0, 0.0),
            theta: 0.0,
        }
    }

    /// `mu_c` itself.
    pub fn mobius(c: Complex64) -> Result<Self> {
        Self::new(c, 0.0)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta) * (z - self.a) / (1.0 - self.a.conj() * z)
    }

    /// The map `v -> conj(f(conj(v)))`.
    pub fn conjugate(&self) -> DiskAutomorphism {
        DiskAutomorphism {
            a: self.a.conj(),
            theta: -self.theta,
        }
    }

    /// Taylor coefficients of `f(z0 + t)`.
    pub fn series(&self, z0: Complex64, order: usize) -> Vec<Complex64> {
        let rot = Complex64::from_polar(1.0, self.theta);
        let num = [rot * (z0 - self.a), rot];
        let den = [1.0 - self.a.conj() * z0, -self.a.conj()];
        series::div(&num, &den, order)
    }
}
