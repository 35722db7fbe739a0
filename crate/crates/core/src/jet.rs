//! Truncated bivariate Taylor series ("jets") of sesqui-holomorphic kernels.
//!
//! A kernel `K(z, w)` is holomorphic in `z` and in `v = conj(w)`, so it is
//! represented near `(z0, v0)` by coefficients `a[i][j]` of
//! `(z - z0)^i (v - v0)^j`, truncated to `i <= nz`, `j <= nv`.
//! Exact derivatives are read off the coefficients, and division by a factor
//! vanishing at the expansion point is a shift of the coefficient array,
//! which is how removable singularities are evaluated.

use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    nz: usize,
    nv: usize,
    c: Vec<Complex64>,
}

impl Jet {
    pub fn zeros(nz: usize, nv: usize) -> Self {
        Jet {
            nz,
            nv,
            c: vec![ZERO; (nz + 1) * (nv + 1)],
        }
    }

    pub fn constant(value: Complex64, nz: usize, nv: usize) -> Self {
        let mut j = Jet::zeros(nz, nv);
        j.c[0] = value;
        j
    }

    /// Series in `z - z0` only.
    pub fn from_z_series(series: &[Complex64], nz: usize, nv: usize) -> Self {
        let mut j = Jet::zeros(nz, nv);
        for (i, &a) in series.iter().take(nz + 1).enumerate() {
            j.set(i, 0, a);
        }
        j
    }

    /// Series in `v - v0` only.
    pub fn from_v_series(series: &[Complex64], nz: usize, nv: usize) -> Self {
        let mut j = Jet::zeros(nz, nv);
        for (k, &a) in series.iter().take(nv + 1).enumerate() {
            j.set(0, k, a);
        }
        j
    }

    pub fn nz(&self) -> usize {
        self.nz
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i > self.nz || j > self.nv {
            ZERO
        } else {
            self.c[i * (self.nv + 1) + j]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, a: Complex64) {
        self.c[i * (self.nv + 1) + j] = a;
    }

    /// Value at the expansion point.
    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// `d/dz` at the expansion point.
    pub fn d_dz(&self) -> Complex64 {
        self.get(1, 0)
    }

    /// `d/d(conj w)` at the expansion point.
    pub fn d_dwbar(&self) -> Complex64 {
        self.get(0, 1)
    }

    /// Coefficients of the `z`-series at fixed `v = v0`.
    pub fn z_series(&self) -> Vec<Complex64> {
        (0..=self.nz).map(|i| self.get(i, 0)).collect()
    }

    /// Coefficients of the `v`-series at fixed `z = z0`.
    pub fn v_series(&self) -> Vec<Complex64> {
        (0..=self.nv).map(|j| self.get(0, j)).collect()
    }

    /// Restriction to lower orders.
    pub fn truncate(&self, nz: usize, nv: usize) -> Jet {
        let mut out = Jet::zeros(nz, nv);
        for i in 0..=nz {
            for j in 0..=nv {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn scale(mut self, s: Complex64) -> Jet {
        for a in &mut self.c {
            *a *= s;
        }
        self
    }

    /// Divides by `(z - z0)^k`, valid when the first `k` rows vanish.
    pub fn drop_z(&self, k: usize) -> Jet {
        let nz = self.nz - k;
        let mut out = Jet::zeros(nz, self.nv);
        for i in 0..=nz {
            for j in 0..=self.nv {
                out.set(i, j, self.get(i + k, j));
            }
        }
        out
    }

    /// Divides by `(v - v0)^k`, valid when the first `k` columns vanish.
    pub fn drop_v(&self, k: usize) -> Jet {
        let nv = self.nv - k;
        let mut out = Jet::zeros(self.nz, nv);
        for i in 0..=self.nz {
            for j in 0..=nv {
                out.set(i, j, self.get(i, j + k));
            }
        }
        out
    }

    /// Outer product of a `z`-series and a `v`-series.
    pub fn outer(zs: &[Complex64], vs: &[Complex64], nz: usize, nv: usize) -> Jet {
        let mut out = Jet::zeros(nz, nv);
        for i in 0..=nz.min(zs.len().saturating_sub(1)) {
            for j in 0..=nv.min(vs.len().saturating_sub(1)) {
                out.set(i, j, zs[i] * vs[j]);
            }
        }
        out
    }

    /// Multiplies by a series in `z` alone.
    pub fn mul_z_series(&self, s: &[Complex64]) -> Jet {
        let mut out = Jet::zeros(self.nz, self.nv);
        for i in 0..=self.nz {
            for l in 0..=i.min(s.len().saturating_sub(1)) {
                let f = s[l];
                if f == ZERO {
                    continue;
                }
                for j in 0..=self.nv {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + f * self.get(i - l, j));
                }
            }
        }
        out
    }

    /// Multiplies by a series in `v` alone.
    pub fn mul_v_series(&self, s: &[Complex64]) -> Jet {
        let mut out = Jet::zeros(self.nz, self.nv);
        for j in 0..=self.nv {
            for l in 0..=j.min(s.len().saturating_sub(1)) {
                let f = s[l];
                if f == ZERO {
                    continue;
                }
                for i in 0..=self.nz {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + f * self.get(i, j - l));
                }
            }
        }
        out
    }

    /// Re-expands around `(z0 + dz, v0 + dv)`, keeping the truncation orders.
    pub fn recenter(&self, dz: Complex64, dv: Complex64) -> Jet {
        let mut out = self.clone();
        if dz != ZERO {
            for j in 0..=self.nv {
                let col: Vec<_> = (0..=self.nz).map(|i| out.get(i, j)).collect();
                let shifted = shift_series(&col, dz);
                for (i, a) in shifted.into_iter().enumerate() {
                    out.set(i, j, a);
                }
            }
        }
        if dv != ZERO {
            for i in 0..=self.nz {
                let row: Vec<_> = (0..=self.nv).map(|j| out.get(i, j)).collect();
                let shifted = shift_series(&row, dv);
                for (j, a) in shifted.into_iter().enumerate() {
                    out.set(i, j, a);
                }
            }
        }
        out
    }

    /// Value of the truncated series at offset `(dz, dv)`.
    pub fn eval_at(&self, dz: Complex64, dv: Complex64) -> Complex64 {
        let mut acc = ZERO;
        for i in (0..=self.nz).rev() {
            let mut row = ZERO;
            for j in (0..=self.nv).rev() {
                row = row * dv + self.get(i, j);
            }
            acc = acc * dz + row;
        }
        acc
    }

    /// Substitutes `z - z0 = X(dz)` and `v - v0 = Y(dv)` where `X`, `Y` are
    /// univariate series without constant term.
    pub fn compose(&self, x: &[Complex64], y: &[Complex64], nz: usize, nv: usize) -> Jet {
        let xp = series_powers(x, self.nz, nz);
        let yp = series_powers(y, self.nv, nv);
        let mut out = Jet::zeros(nz, nv);
        for i in 0..=self.nz {
            for j in 0..=self.nv {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for p in i..=nz {
                    let xi = xp[i][p];
                    if xi == ZERO {
                        continue;
                    }
                    for q in j..=nv {
                        let cur = out.get(p, q);
                        out.set(p, q, cur + a * xi * yp[j][q]);
                    }
                }
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn recip(&self) -> Jet {
        let a00 = self.c[0];
        let inv0 = 1.0 / a00;
        let mut out = Jet::zeros(self.nz, self.nv);
        for i in 0..=self.nz {
            for j in 0..=self.nv {
                if i == 0 && j == 0 {
                    out.set(0, 0, inv0);
                    continue;
                }
                let mut s = ZERO;
                for p in 0..=i {
                    for q in 0..=j {
                        if p == 0 && q == 0 {
                            continue;
                        }
                        s += self.get(p, q) * out.get(i - p, j - q);
                    }
                }
                out.set(i, j, -s * inv0);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, o: &Jet) -> Jet {
        debug_assert_eq!((self.nz, self.nv), (o.nz, o.nv));
        Jet {
            nz: self.nz,
            nv: self.nv,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, o: &Jet) -> Jet {
        debug_assert_eq!((self.nz, self.nv), (o.nz, o.nv));
        Jet {
            nz: self.nz,
            nv: self.nv,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, o: &Jet) -> Jet {
        debug_assert_eq!((self.nz, self.nv), (o.nz, o.nv));
        let mut out = Jet::zeros(self.nz, self.nv);
        for p in 0..=self.nz {
            for q in 0..=self.nv {
                let a = self.get(p, q);
                if a == ZERO {
                    continue;
                }
                for i in p..=self.nz {
                    for j in q..=self.nv {
                        let cur = out.get(i, j);
                        out.set(i, j, cur + a * o.get(i - p, j - q));
                    }
                }
            }
        }
        out
    }
}

/// Univariate series helpers (coefficient vectors, lowest order first).
pub mod series {
    use super::ZERO;
    use num_complex::Complex64;

    pub fn mul(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
        let mut out = vec![ZERO; order + 1];
        for (i, &x) in a.iter().enumerate().take(order + 1) {
            for (j, &y) in b.iter().enumerate().take(order + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn recip(a: &[Complex64], order: usize) -> Vec<Complex64> {
        let inv0 = 1.0 / a[0];
        let mut out = vec![ZERO; order + 1];
        out[0] = inv0;
        for k in 1..=order {
            let mut s = ZERO;
            for l in 1..=k.min(a.len() - 1) {
                s += a[l] * out[k - l];
            }
            out[k] = -s * inv0;
        }
        out
    }

    pub fn div(a: &[Complex64], b: &[Complex64], order: usize) -> Vec<Complex64> {
        mul(a, &recip(b, order), order)
    }

    /// Series of `1 / (z - c)` around `z0 != c`.
    pub fn inverse_linear(z0: Complex64, c: Complex64, order: usize) -> Vec<Complex64> {
        let d = 1.0 / (z0 - c);
        let mut out = Vec::with_capacity(order + 1);
        let mut t = d;
        for _ in 0..=order {
            out.push(t);
            t *= -d;
        }
        out
    }

    /// Formal derivative.
    pub fn derivative(a: &[Complex64]) -> Vec<Complex64> {
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(k, &x)| x * k as f64)
            .collect()
    }
}

/// Coefficients of `p(t + d)` given those of `p(t)`.
fn shift_series(a: &[Complex64], d: Complex64) -> Vec<Complex64> {
    let n = a.len();
    let mut work = a.to_vec();
    // Horner-style Taylor shift.
    for k in 0..n {
        for i in (k..n - 1).rev() {
            let next = work[i + 1];
            work[i] += d * next;
        }
    }
    work
}

/// `powers[i][p]` = coefficient of `t^p` in `X(t)^i`, for `i <= max_power`.
fn series_powers(x: &[Complex64], max_power: usize, order: usize) -> Vec<Vec<Complex64>> {
    let mut x_trunc = vec![ZERO; order + 1];
    for (k, &a) in x.iter().enumerate().take(order + 1) {
        x_trunc[k] = a;
    }
    x_trunc[0] = ZERO;
    let mut powers = Vec::with_capacity(max_power + 1);
    let mut cur = vec![ZERO; order + 1];
    cur[0] = Complex64::new(1.0, 0.0);
    powers.push(cur.clone());
    for _ in 0..max_power {
        cur = series::mul(&cur, &x_trunc, order);
        powers.push(cur.clone());
    }
    powers
}

/// Composes a univariate Taylor series in `s - s0` with `s = z * v`, around
/// `(z0, v0)` where `s0 = z0 * v0`.
pub fn compose_product(t: &[Complex64], z0: Complex64, v0: Complex64, nz: usize, nv: usize) -> Jet {
    // s - s0 = v0 dz + z0 dv + dz dv
    let mut ds = Jet::zeros(nz, nv);
    if nz >= 1 {
        ds.set(1, 0, v0);
    }
    if nv >= 1 {
        ds.set(0, 1, z0);
    }
    if nz >= 1 && nv >= 1 {
        ds.set(1, 1, Complex64::new(1.0, 0.0));
    }
    let top = (nz + nv).min(t.len() - 1);
    let mut acc = Jet::constant(t[top], nz, nv);
    for k in (0..top).rev() {
        acc = &acc * &ds;
        acc.c[0] += t[k];
    }
    acc
}
