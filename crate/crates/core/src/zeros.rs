//! Locating and certifying zeros of kernel slices `z -> K(z, w0)`.
//!
//! Cells of a rectangular grid are certified with the argument principle;
//! cells with positive winding are refined with Newton's method using the
//! exact `d/dz` of the expression tree. The module also runs the numerical
//! experiments relating zeros of `K_phi` and of its deflations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::domain::{ComplexPoint, DomainKind, DomainSpec};
use crate::error::{Error, Result};
use crate::expr::{KernelExpr, Node};
use crate::transform::zero_augment;

/// Cells closer than this to the boundary are skipped.
pub const BOUNDARY_MARGIN: f64 = 1e-3;
/// Certified residual, relative to the local kernel scale.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Normalized modulus below which a kernel value counts as zero.
pub const ZERO_TOL: f64 = 1e-8;

const MAX_ARG_STEP: f64 = 0.5;
const MAX_BISECT_DEPTH: u32 = 40;
const INTEGRAL_TOL: f64 = 1e-3;
const MAX_SUBDIVISION: u32 = 3;
const MAX_QUADRISECTION: u32 = 24;
const SPLIT: f64 = 0.5377;
const NEWTON_ITERS: usize = 50;

/// A located zero of `z -> K(z, w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroWitness {
    pub z: ComplexPoint,
    pub w: ComplexPoint,
    /// `|K(z, w)|` at the refined point.
    pub residual: f64,
    /// Local kernel scale the residual is measured against.
    pub scale: f64,
    /// Winding number of the certifying contour.
    pub winding: i64,
    pub order: u32,
}

impl ZeroWitness {
    pub fn z(&self) -> Complex64 {
        self.z.to_complex()
    }

    pub fn w(&self) -> Complex64 {
        self.w.to_complex()
    }

    pub fn relative_residual(&self) -> f64 {
        self.residual / self.scale
    }
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]` split into
/// `resolution x resolution` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
    #[serde(default = "default_samples")]
    pub samples_per_edge: usize,
}

fn default_samples() -> usize {
    64
}

impl GridSpec {
    pub fn new(re: (f64, f64), im: (f64, f64), resolution: usize) -> Result<Self> {
        let g = GridSpec {
            re_min: re.0,
            re_max: re.1,
            im_min: im.0,
            im_max: im.1,
            resolution,
            samples_per_edge: default_samples(),
        };
        g.validate()?;
        Ok(g)
    }

    /// The square `[-1, 1]^2`.
    pub fn covering(resolution: usize) -> Self {
        GridSpec {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
            resolution,
            samples_per_edge: default_samples(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.re_min >= self.re_max || self.im_min >= self.im_max {
            return Err(Error::InvalidDomain("empty grid rectangle".into()));
        }
        if self.resolution == 0 || self.samples_per_edge < 64 {
            return Err(Error::InvalidDomain(
                "grid needs a positive resolution and at least 64 samples per edge".into(),
            ));
        }
        Ok(())
    }

    fn node(&self, i: usize, j: usize) -> Complex64 {
        let n = self.resolution as f64;
        Complex64::new(
            self.re_min + (self.re_max - self.re_min) * i as f64 / n,
            self.im_min + (self.im_max - self.im_min) * j as f64 / n,
        )
    }

    fn cell(&self, i: usize, j: usize) -> Rect {
        Rect {
            lo: self.node(i, j),
            hi: self.node(i + 1, j + 1),
        }
    }

    /// Centers of the cells lying in the domain away from its boundary.
    pub fn interior_centers(&self, d: &DomainSpec) -> Vec<Complex64> {
        let mut out = Vec::new();
        for j in 0..self.resolution {
            for i in 0..self.resolution {
                let c = self.cell(i, j).center();
                if d.contains(c) && d.boundary_distance(c) > BOUNDARY_MARGIN {
                    out.push(c);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Rect {
    lo: Complex64,
    hi: Complex64,
}

impl Rect {
    fn center(&self) -> Complex64 {
        (self.lo + self.hi) * 0.5
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }

    fn width(&self) -> f64 {
        (self.hi.re - self.lo.re).max(self.hi.im - self.lo.im)
    }

    fn contains(&self, p: Complex64) -> bool {
        p.re >= self.lo.re && p.re <= self.hi.re && p.im >= self.lo.im && p.im <= self.hi.im
    }

    fn scaled(&self, f: f64) -> Rect {
        let c = self.center();
        Rect {
            lo: c + (self.lo - c) * f,
            hi: c + (self.hi - c) * f,
        }
    }

    fn split(&self) -> [Rect; 4] {
        let m = Complex64::new(
            self.lo.re + SPLIT * (self.hi.re - self.lo.re),
            self.lo.im + SPLIT * (self.hi.im - self.lo.im),
        );
        [
            Rect { lo: self.lo, hi: m },
            Rect {
                lo: Complex64::new(m.re, self.lo.im),
                hi: Complex64::new(self.hi.re, m.im),
            },
            Rect { lo: m, hi: self.hi },
            Rect {
                lo: Complex64::new(self.lo.re, m.im),
                hi: Complex64::new(m.re, self.hi.im),
            },
        ]
    }

    /// Smallest and largest modulus over the rectangle.
    fn modulus_range(&self) -> (f64, f64) {
        let cx = 0.0f64.clamp(self.lo.re, self.hi.re);
        let cy = 0.0f64.clamp(self.lo.im, self.hi.im);
        let min = Complex64::new(cx, cy).norm();
        let max = self.corners().iter().map(|c| c.norm()).fold(0.0, f64::max);
        (min, max)
    }
}

enum CellPlacement {
    Inside,
    Outside,
    NearBoundary,
}

fn placement(d: &DomainSpec, r: &Rect) -> CellPlacement {
    let (min, max) = r.modulus_range();
    let inner = match d.kind() {
        DomainKind::UnitDisk => None,
        DomainKind::Annulus { inner_radius } => Some(inner_radius),
    };
    if min >= 1.0 || inner.is_some_and(|ir| max <= ir) {
        return CellPlacement::Outside;
    }
    let outer_ok = max <= 1.0 - BOUNDARY_MARGIN;
    let inner_ok = inner.is_none_or(|ir| min >= ir + BOUNDARY_MARGIN);
    if outer_ok && inner_ok {
        CellPlacement::Inside
    } else {
        CellPlacement::NearBoundary
    }
}

/// Argument increment of `f` along a segment, with magnitudes of the
/// samples. `None` when the path runs through a zero at working precision.
struct PathIncrement {
    increment: Option<f64>,
    moduli: Vec<f64>,
}

fn wrap(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

fn path_increment<F, P>(f: &F, path: &P, samples: usize) -> Result<PathIncrement>
where
    F: Fn(Complex64) -> Result<Complex64>,
    P: Fn(f64) -> Complex64,
{
    let mut vals = Vec::with_capacity(samples + 1);
    for k in 0..=samples {
        vals.push(f(path(k as f64 / samples as f64))?);
    }
    let moduli: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
    if moduli.iter().any(|&m| m == 0.0 || !m.is_finite()) {
        return Ok(PathIncrement {
            increment: None,
            moduli,
        });
    }
    let mut total = 0.0;
    for k in 0..samples {
        let t0 = k as f64 / samples as f64;
        let t1 = (k + 1) as f64 / samples as f64;
        match bisect_increment(f, path, t0, t1, vals[k], vals[k + 1], 0)? {
            Some(d) => total += d,
            None => {
                return Ok(PathIncrement {
                    increment: None,
                    moduli,
                })
            }
        }
    }
    Ok(PathIncrement {
        increment: Some(total),
        moduli,
    })
}

fn bisect_increment<F, P>(
    f: &F,
    path: &P,
    t0: f64,
    t1: f64,
    f0: Complex64,
    f1: Complex64,
    depth: u32,
) -> Result<Option<f64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
    P: Fn(f64) -> Complex64,
{
    let d = wrap(f1.arg() - f0.arg());
    if d.abs() <= MAX_ARG_STEP {
        return Ok(Some(d));
    }
    if depth >= MAX_BISECT_DEPTH {
        return Ok(None);
    }
    let tm = 0.5 * (t0 + t1);
    let fm = f(path(tm))?;
    if fm.norm() == 0.0 || !fm.norm().is_finite() {
        return Ok(None);
    }
    let a = bisect_increment(f, path, t0, tm, f0, fm, depth + 1)?;
    let b = bisect_increment(f, path, tm, t1, fm, f1, depth + 1)?;
    Ok(a.zip(b).map(|(a, b)| a + b))
}

fn segment(a: Complex64, b: Complex64) -> impl Fn(f64) -> Complex64 {
    move |t| a + (b - a) * t
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mid = v.len() / 2;
    v.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    v[mid]
}

/// Winding of `f` around a rectangle, and the median modulus on it.
struct Winding {
    turns: Option<f64>,
    scale: f64,
}

impl Winding {
    fn integral(&self) -> Option<i64> {
        let t = self.turns?;
        let n = t.round();
        ((t - n).abs() <= INTEGRAL_TOL).then_some(n as i64)
    }
}

fn rect_winding<F>(f: &F, r: &Rect, samples: usize) -> Result<Winding>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let c = r.corners();
    let mut total = Some(0.0);
    let mut moduli = Vec::new();
    for k in 0..4 {
        let p = path_increment(f, &segment(c[k], c[(k + 1) % 4]), samples)?;
        total = total.zip(p.increment).map(|(a, b)| a + b);
        moduli.extend(p.moduli);
    }
    Ok(Winding {
        turns: total.map(|t| t / (2.0 * PI)),
        scale: median(moduli),
    })
}

fn circle_winding<F>(f: &F, center: Complex64, radius: f64, samples: usize) -> Result<Winding>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let p = path_increment(
        f,
        &|t: f64| center + Complex64::from_polar(radius, 2.0 * PI * t),
        samples,
    )?;
    Ok(Winding {
        turns: p.increment.map(|t| t / (2.0 * PI)),
        scale: median(p.moduli),
    })
}

/// Outcome of a slice scan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SliceScan {
    pub witnesses: Vec<ZeroWitness>,
    /// Cells skipped for touching the boundary margin.
    pub boundary_cells: usize,
    /// Diagnostics for cells that could not be resolved.
    pub failures: Vec<String>,
}

/// Zeros of `z -> K(z, w0)` over a grid.
pub fn scan_slice_zeros(k: &KernelExpr, w0: Complex64, grid: &GridSpec) -> Result<Vec<ZeroWitness>> {
    Ok(scan_slice(k, w0, grid)?.witnesses)
}

/// [`scan_slice_zeros`] with the full diagnostic report.
pub fn scan_slice(k: &KernelExpr, w0: Complex64, grid: &GridSpec) -> Result<SliceScan> {
    grid.validate()?;
    let d = k.domain().unpunctured();
    if !d.contains(w0) {
        return Err(Error::DomainViolation(w0));
    }
    let n = grid.resolution;
    let s = grid.samples_per_edge;
    let f = |z: Complex64| k.eval(z, w0);

    let mut usable = vec![false; n * n];
    let mut boundary_cells = 0;
    for j in 0..n {
        for i in 0..n {
            match placement(&d, &grid.cell(i, j)) {
                CellPlacement::Inside => usable[j * n + i] = true,
                CellPlacement::NearBoundary => boundary_cells += 1,
                CellPlacement::Outside => {}
            }
        }
    }
    let cell_ok = |i: usize, j: usize| i < n && j < n && usable[j * n + i];

    // Shared edges: horizontal h[j][i] from node (i, j) to (i+1, j), vertical
    // v[j][i] from node (i, j) to (i, j+1).
    let h_needed: Vec<(usize, usize)> = (0..=n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| cell_ok(i, j) || (j > 0 && cell_ok(i, j - 1)))
        .collect();
    let v_needed: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .filter(|&(i, j)| cell_ok(i, j) || (i > 0 && cell_ok(i - 1, j)))
        .collect();
    let eval_edges = |list: &[(usize, usize)], horizontal: bool| -> Result<Vec<PathIncrement>> {
        list.par_iter()
            .map(|&(i, j)| {
                let a = grid.node(i, j);
                let b = if horizontal {
                    grid.node(i + 1, j)
                } else {
                    grid.node(i, j + 1)
                };
                path_increment(&f, &segment(a, b), s)
            })
            .collect()
    };
    let h_vals = eval_edges(&h_needed, true)?;
    let v_vals = eval_edges(&v_needed, false)?;
    let index = |list: &[(usize, usize)], key: (usize, usize)| list.binary_search_by(|p| (p.1, p.0).cmp(&(key.1, key.0)));
    let h_at = |i, j| &h_vals[index(&h_needed, (i, j)).expect("edge of a usable cell")];
    let v_at = |i, j| &v_vals[index(&v_needed, (i, j)).expect("edge of a usable cell")];

    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !cell_ok(i, j) {
                continue;
            }
            let (b, r, t, l) = (h_at(i, j), v_at(i + 1, j), h_at(i, j + 1), v_at(i, j));
            let turns = [b.increment, r.increment, t.increment.map(|x| -x), l.increment.map(|x| -x)]
                .into_iter()
                .try_fold(0.0, |acc, x| x.map(|x| acc + x))
                .map(|t| t / (2.0 * PI));
            let mut moduli = Vec::new();
            for e in [b, r, t, l] {
                moduli.extend_from_slice(&e.moduli);
            }
            let w = Winding {
                turns,
                scale: median(moduli),
            };
            // Zero-free cells need no further work.
            if w.integral() == Some(0) {
                continue;
            }
            cells.push((grid.cell(i, j), w));
        }
    }

    let results: Vec<Result<(Vec<ZeroWitness>, Vec<String>)>> = cells
        .into_par_iter()
        .map(|(rect, w)| {
            let mut found = Vec::new();
            let mut failures = Vec::new();
            let scale = w.scale.max(f64::MIN_POSITIVE);
            let ctx = CellContext { k, w0, f: &f, samples: s, domain: &d, scale };
            resolve_cell(&ctx, rect, w, 0, &mut found, &mut failures)?;
            Ok((found, failures))
        })
        .collect();
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        let (w, fl) = r?;
        witnesses.extend(w);
        failures.extend(fl);
    }
    Ok(SliceScan {
        witnesses: dedupe(witnesses),
        boundary_cells,
        failures,
    })
}

fn dedupe(mut ws: Vec<ZeroWitness>) -> Vec<ZeroWitness> {
    ws.sort_by(|a, b| {
        let (za, zb) = (a.z(), b.z());
        za.norm()
            .total_cmp(&zb.norm())
            .then(za.arg().total_cmp(&zb.arg()))
    });
    let mut out: Vec<ZeroWitness> = Vec::new();
    for w in ws {
        if !out.iter().any(|o| (o.z() - w.z()).norm() < 1e-7) {
            out.push(w);
        }
    }
    out
}

struct CellContext<'a, F> {
    k: &'a KernelExpr,
    w0: Complex64,
    f: &'a F,
    samples: usize,
    domain: &'a DomainSpec,
    /// Kernel scale of the grid cell being resolved.
    scale: f64,
}

fn resolve_cell<F>(
    ctx: &CellContext<'_, F>,
    rect: Rect,
    w: Winding,
    level: u32,
    found: &mut Vec<ZeroWitness>,
    failures: &mut Vec<String>,
) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (k, w0, f, scale) = (ctx.k, ctx.w0, ctx.f, ctx.scale);
    match w.integral() {
        Some(0) => Ok(()),
        Some(n) if n < 0 => {
            failures.push(format!("negative winding {n} on cell at {}", rect.center()));
            Ok(())
        }
        Some(1) => {
            if let Ok(mut wit) = refine_zero_scaled(k, rect.center(), w0, scale) {
                if rect.scaled(1.1).contains(wit.z()) {
                    wit.winding = 1;
                    found.push(wit);
                    return Ok(());
                }
            }
            if level >= MAX_QUADRISECTION {
                failures.push(format!("no convergence in cell at {}", rect.center()));
                return Ok(());
            }
            split_and_resolve(ctx, rect, level, found, failures)
        }
        Some(n) => {
            if level < MAX_QUADRISECTION && rect.width() > 1e-6 {
                return split_and_resolve(ctx, rect, level, found, failures);
            }
            // Cannot separate: treat as a multiple zero.
            let z = newton(k, rect.center(), w0, scale, false).unwrap_or(rect.center());
            let residual = f(z)?.norm();
            let order = zero_order(k, w0, z, OrderDirection::InZ).unwrap_or(n as u32);
            found.push(ZeroWitness {
                z: z.into(),
                w: w0.into(),
                residual,
                scale,
                winding: n,
                order,
            });
            Ok(())
        }
        None => {
            if level < MAX_SUBDIVISION {
                return split_and_resolve(ctx, rect, level, found, failures);
            }
            let big = rect.scaled(1.1);
            if !matches!(placement(ctx.domain, &big), CellPlacement::Inside) {
                failures.push(format!("non-integral winding near {}", rect.center()));
                return Ok(());
            }
            let wb = rect_winding(f, &big, ctx.samples)?;
            match wb.integral() {
                Some(n) if n >= 1 => {
                    // Resolve inside the enlarged cell without enlarging again.
                    resolve_cell(ctx, big, wb, MAX_SUBDIVISION.max(level) + 1, found, failures)
                }
                Some(_) => Ok(()),
                None => {
                    failures.push(format!(
                        "{}: winding {:?} near {}",
                        Error::NonIntegralWinding(wb.turns.unwrap_or(f64::NAN)).name(),
                        wb.turns,
                        rect.center()
                    ));
                    Ok(())
                }
            }
        }
    }
}

fn split_and_resolve<F>(
    ctx: &CellContext<'_, F>,
    rect: Rect,
    level: u32,
    found: &mut Vec<ZeroWitness>,
    failures: &mut Vec<String>,
) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    for sub in rect.split() {
        let w = rect_winding(ctx.f, &sub, ctx.samples)?;
        resolve_cell(ctx, sub, w, level + 1, found, failures)?;
    }
    Ok(())
}

/// Newton's method on `z -> K(z, w0)`. Returns the last iterate.
fn newton(
    k: &KernelExpr,
    guess: Complex64,
    w0: Complex64,
    scale: f64,
    strict: bool,
) -> Result<Complex64> {
    let d = k.domain();
    let mut z = guess;
    let mut last_residual = f64::INFINITY;
    let mut linear_steps = 0;
    for _ in 0..NEWTON_ITERS {
        let j = k.jet(z, w0, 1, 0)?;
        let (val, der) = (j.value(), j.d_dz());
        let residual = val.norm();
        if residual == 0.0 {
            return Ok(z);
        }
        if der.norm() == 0.0 {
            return Err(Error::NoConvergence(NEWTON_ITERS));
        }
        let ratio = residual / last_residual;
        if strict && (0.2..0.95).contains(&ratio) && residual > 1e-13 * scale {
            linear_steps += 1;
            if linear_steps >= 6 {
                return Err(Error::MultipleZeroSuspected(z));
            }
        } else {
            linear_steps = 0;
        }
        last_residual = residual;
        let step = val / der;
        let next = z - step;
        if !d.contains(next) {
            return Err(Error::NoConvergence(NEWTON_ITERS));
        }
        z = next;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            return Ok(z);
        }
    }
    if strict {
        let r = k.eval(z, w0)?.norm();
        if r > RESIDUAL_TOL * scale {
            return Err(Error::NoConvergence(NEWTON_ITERS));
        }
    }
    Ok(z)
}

/// Median `|K(., w0)|` on a small circle around `z`.
fn local_scale(k: &KernelExpr, z: Complex64, w0: Complex64) -> Result<f64> {
    let radius = (0.5 * k.domain().boundary_distance(z)).min(1e-2);
    let mut v = Vec::with_capacity(16);
    for i in 0..16 {
        v.push(k.eval(z + Complex64::from_polar(radius, PI * i as f64 / 8.0), w0)?.norm());
    }
    Ok(median(v))
}

/// Refines a zero of `z -> K(z, w0)` from a guess.
pub fn refine_zero(k: &KernelExpr, guess: Complex64, w0: Complex64) -> Result<ZeroWitness> {
    let scale = local_scale(k, guess, w0)?;
    refine_zero_scaled(k, guess, w0, scale)
}

/// [`refine_zero`] with the kernel scale supplied.
pub fn refine_zero_scaled(
    k: &KernelExpr,
    guess: Complex64,
    w0: Complex64,
    scale: f64,
) -> Result<ZeroWitness> {
    let z = newton(k, guess, w0, scale, true)?;
    let residual = k.eval(z, w0)?.norm();
    if residual > RESIDUAL_TOL * scale {
        return Err(Error::NoConvergence(NEWTON_ITERS));
    }
    let order = zero_order(k, w0, z, OrderDirection::InZ)?;
    Ok(ZeroWitness {
        z: z.into(),
        w: w0.into(),
        residual,
        scale,
        winding: order as i64,
        order,
    })
}

/// Which variable of `K` varies in [`zero_order`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderDirection {
    /// `z -> K(z, fixed)` at `z = point`.
    InZ,
    /// `w -> K(fixed, w)` at `w = point`.
    InW,
}

/// Order of the zero of a kernel slice at `point`.
///
/// The winding number on a small circle decides; the count of vanishing
/// Taylor coefficients must agree.
pub fn zero_order(
    k: &KernelExpr,
    fixed: Complex64,
    point: Complex64,
    direction: OrderDirection,
) -> Result<u32> {
    let d = k.domain();
    let radius = (0.5 * d.boundary_distance(point)).min(1e-3);
    // Holomorphic slice h with h(point) = 0.
    let h = |x: Complex64| -> Result<Complex64> {
        match direction {
            OrderDirection::InZ => k.eval(x, fixed),
            OrderDirection::InW => Ok(k.eval(fixed, x)?.conj()),
        }
    };
    let value = h(point)?;
    let w = circle_winding(&h, point, radius, 64)?;
    if value.norm() > ZERO_TOL * w.scale {
        return Err(Error::NotAZero(point));
    }
    let winding = w
        .integral()
        .ok_or(Error::NonIntegralWinding(w.turns.unwrap_or(f64::NAN)))?;
    if winding < 1 {
        return Err(Error::NotAZero(point));
    }
    let winding = winding as u32;
    let n = winding as usize + 1;
    let coeffs: Vec<Complex64> = match direction {
        OrderDirection::InZ => k.jet(point, fixed, n, 0)?.z_series(),
        OrderDirection::InW => k
            .jet(fixed, point, 0, n)?
            .v_series()
            .into_iter()
            .map(|c| c.conj())
            .collect(),
    };
    let scaled: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm() * radius.powi(i as i32))
        .collect();
    let top = scaled.iter().cloned().fold(0.0, f64::max);
    let derivative = scaled
        .iter()
        .position(|&x| x > 1e-6 * top)
        .unwrap_or(scaled.len()) as u32;
    if derivative != winding {
        return Err(Error::InconsistentOrder {
            winding: winding as usize,
            derivative: derivative as usize,
        });
    }
    Ok(winding)
}

/// Interior points where the weight of `k` vanishes or blows up.
pub fn weight_centers(k: &KernelExpr) -> Vec<Complex64> {
    let mut out = Vec::new();
    collect_centers(k, &mut out);
    out
}

fn collect_centers(k: &KernelExpr, out: &mut Vec<Complex64>) {
    match k.node() {
        Node::Base(_) => {}
        Node::RationalDivide { inner, factor } => {
            out.extend(factor.zeros().iter().map(|z| z.0));
            out.extend(factor.poles().iter().map(|p| p.0));
            collect_centers(inner, out);
        }
        Node::RankOneDeflate { inner, center, .. } => {
            out.push(*center);
            collect_centers(inner, out);
        }
        Node::DirectSum { inner, centers, .. } => {
            out.extend(centers.iter().map(|c| c.0));
            collect_centers(inner, out);
        }
        Node::Transport { inner, .. } => collect_centers(inner, out),
    }
}

/// The quantities entering the zero-transfer identities at `(c, z0, w0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub c: ComplexPoint,
    pub z0: ComplexPoint,
    pub w0: ComplexPoint,
    /// `K_phi(z0, w0)`, `K_phi(z0, c)`, `K_phi(c, w0)`, deflated `(z0, w0)`.
    pub k_zw: [f64; 2],
    pub k_zc: [f64; 2],
    pub k_cw: [f64; 2],
    pub k_aug_zw: [f64; 2],
    /// `|K(a, b)|` divided by the median of `|K(., b)|` on a small circle
    /// around `a`; a value counts as zero below the certification tolerance.
    pub n_zw: f64,
    pub n_zc: f64,
    pub n_cw: f64,
    pub n_aug_zw: f64,
    /// The deflated kernel vanishes at `(z0, w0)`.
    pub augmented_zero: bool,
    /// `K_phi(z0, w0) = 0`.
    pub base_zero: bool,
    /// `K_phi(z0, c) = 0` or `K_phi(c, w0) = 0`.
    pub side_zero: bool,
    /// The if-and-only-if holds (vacuous when the deflated value is nonzero).
    pub biconditional_holds: bool,
    /// Relative error of the ratio identity, when a side value vanishes.
    pub ratio_identity_error: Option<f64>,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

/// `|K(a, b)|` relative to the scale of the slice `K(., b)` near `a`.
fn relative_to_slice(k: &KernelExpr, a: Complex64, b: Complex64, v: Complex64) -> Result<f64> {
    Ok(v.norm() / local_scale(k, a, b)?)
}

/// Checks the zero-transfer statements for `K_phi` deflated at `c`.
pub fn zero_transfer_report(
    k: &KernelExpr,
    c: Complex64,
    z0: Complex64,
    w0: Complex64,
) -> Result<TransferReport> {
    let dist = 1e-10;
    if (c - z0).norm() < dist || (c - w0).norm() < dist || (z0 - w0).norm() < dist {
        return Err(Error::HypothesisUnmet(
            "c, z0 and w0 must be distinct".into(),
        ));
    }
    if weight_centers(k).iter().any(|&p| (p - c).norm() < dist) {
        return Err(Error::HypothesisUnmet(format!(
            "c = {c} is a center of the weight"
        )));
    }
    let aug = zero_augment(k, c)?;
    let k_zw = k.eval(z0, w0)?;
    let k_zc = k.eval(z0, c)?;
    let k_cw = k.eval(c, w0)?;
    let k_aug = aug.eval(z0, w0)?;
    let n_zw = relative_to_slice(k, z0, w0, k_zw)?;
    let n_zc = relative_to_slice(k, z0, c, k_zc)?;
    let n_cw = relative_to_slice(k, c, w0, k_cw)?;
    let n_aug = relative_to_slice(&aug, z0, w0, k_aug)?;
    let augmented_zero = n_aug <= RESIDUAL_TOL;
    let base_zero = n_zw <= RESIDUAL_TOL;
    let side_zero = n_zc.min(n_cw) <= RESIDUAL_TOL;
    let biconditional_holds = !augmented_zero || (base_zero == side_zero);
    let ratio_identity_error = side_zero.then(|| {
        let want = k_zw / ((z0 - c) * (w0 - c).conj());
        (k_aug - want).norm() / want.norm().max(f64::MIN_POSITIVE)
    });
    Ok(TransferReport {
        c: c.into(),
        z0: z0.into(),
        w0: w0.into(),
        k_zw: pair(k_zw),
        k_zc: pair(k_zc),
        k_cw: pair(k_cw),
        k_aug_zw: pair(k_aug),
        n_zw,
        n_zc,
        n_cw,
        n_aug_zw: n_aug,
        augmented_zero,
        base_zero,
        side_zero,
        biconditional_holds,
        ratio_identity_error,
    })
}

/// `|K(z, c_j)| / sqrt(K(c_j, c_j))` along a sequence of centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTrace {
    pub z: ComplexPoint,
    pub centers: Vec<ComplexPoint>,
    pub values: Vec<f64>,
    /// Distance of each center to the boundary.
    pub boundary_distances: Vec<f64>,
}

impl RatioTrace {
    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// The final value is below the first.
    pub fn decays(&self) -> bool {
        match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => self.values.len() > 1 && b < a,
            _ => false,
        }
    }
}

pub fn boundary_ratio(k: &KernelExpr, z: Complex64, centers: &[Complex64]) -> Result<RatioTrace> {
    let d = k.domain();
    let mut values = Vec::with_capacity(centers.len());
    for &c in centers {
        let diag = k.eval(c, c)?.re;
        if !(diag > 0.0) {
            return Err(Error::DegenerateCenter {
                center: c,
                diag,
                term: None,
            });
        }
        values.push(k.eval(z, c)?.norm() / diag.sqrt());
    }
    Ok(RatioTrace {
        z: z.into(),
        centers: centers.iter().map(|&c| c.into()).collect(),
        values,
        boundary_distances: centers.iter().map(|&c| d.boundary_distance(c)).collect(),
    })
}

/// One accepted step of [`track_zero_near_boundary`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackStep {
    pub index: usize,
    pub center: ComplexPoint,
    pub z1: ComplexPoint,
    pub distance: f64,
    pub radius: f64,
    pub residual: f64,
    /// `|K(c, w0) / K(c, c)|`.
    pub alpha: f64,
    /// Minimum of `|K(z, w0) / K(z, c)|` on the tracking circle.
    pub min_ratio: f64,
    /// Minimum of `|K(z, c)|` on the tracking circle.
    pub min_center_slice: f64,
}

/// Follows the zero `z0` of `K_phi(., w0)` to zeros `z1(c_j)` of the
/// kernels deflated at centers `c_j` tending to the boundary.
///
/// `centers` is indexed from `first_index`. Steps before the first one
/// certified (winding 1 on the current circle) are skipped; afterwards a
/// failure is an error. The circle radius halves after each accepted step.
pub fn track_zero_near_boundary(
    k: &KernelExpr,
    witness: &ZeroWitness,
    centers: &[Complex64],
    first_index: usize,
) -> Result<Vec<TrackStep>> {
    let z0 = witness.z();
    let w0 = witness.w();
    let d = k.domain();
    let trace = boundary_ratio(k, z0, centers)?;
    let near = trace
        .boundary_distances
        .last()
        .is_some_and(|&x| x < 0.05);
    if !trace.decays() || !near {
        return Err(Error::HypothesisUnmet(
            "centers must approach the boundary with a decaying kernel ratio".into(),
        ));
    }
    let mut radius = (0.5 * d.boundary_distance(z0)).min(0.1);
    let mut steps: Vec<TrackStep> = Vec::new();
    let mut start = z0;
    for (n, &c) in centers.iter().enumerate() {
        let index = first_index + n;
        let fail = |reason: String| Error::TrackingFailed { index, reason };
        let aug = zero_augment(k, c)?;
        let slice = |z: Complex64| aug.eval(z, w0);
        let circle = circle_winding(&slice, z0, radius, 128)?;
        let certified = circle.integral() == Some(1);
        let mut min_ratio = f64::INFINITY;
        let mut min_center_slice = f64::INFINITY;
        for i in 0..128 {
            let z = z0 + Complex64::from_polar(radius, 2.0 * PI * i as f64 / 128.0);
            let kc = k.eval(z, c)?;
            min_center_slice = min_center_slice.min(kc.norm());
            min_ratio = min_ratio.min((k.eval(z, w0)? / kc).norm());
        }
        let alpha = (k.eval(c, w0)? / k.eval(c, c)?).norm();
        if !certified {
            if steps.is_empty() {
                continue;
            }
            return Err(fail(format!(
                "winding {:?} on the circle of radius {radius}",
                circle.turns
            )));
        }
        if min_center_slice == 0.0 {
            return Err(fail("K(z, c) vanishes on the tracking circle".into()));
        }
        let scale = circle.scale;
        let z1 = match newton(&aug, start, w0, scale, true) {
            Ok(z) if (z - z0).norm() < radius => z,
            _ => match newton(&aug, z0, w0, scale, true) {
                Ok(z) if (z - z0).norm() < radius => z,
                _ => {
                    if steps.is_empty() {
                        continue;
                    }
                    return Err(fail("Newton left the tracking circle".into()));
                }
            },
        };
        let residual = aug.eval(z1, w0)?.norm();
        if residual > RESIDUAL_TOL * scale {
            return Err(fail(format!("residual {residual:e} above tolerance")));
        }
        steps.push(TrackStep {
            index,
            center: c.into(),
            z1: z1.into(),
            distance: (z1 - z0).norm(),
            radius,
            residual,
            alpha,
            min_ratio,
            min_center_slice,
        });
        start = z1;
        radius *= 0.5;
    }
    if steps.is_empty() {
        return Err(Error::TrackingFailed {
            index: first_index + centers.len().saturating_sub(1),
            reason: "no center produced a certified zero".into(),
        });
    }
    Ok(steps)
}

/// Result of a product-grid search for kernel zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LuQikengStatus {
    ZeroFound { witness: ZeroWitness },
    NoZeroAtResolution { z_resolution: usize, w_resolution: usize },
}

/// Scans `z`-slices for each `w` at the centers of the `w` grid cells and
/// stops at the first certified zero. Slices are visited by increasing `|w|`.
pub fn lu_qikeng_status(k: &KernelExpr, z_grid: &GridSpec, w_grid: &GridSpec) -> Result<LuQikengStatus> {
    let d = k.domain().unpunctured();
    let mut slices = w_grid.interior_centers(&d);
    slices.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    for w0 in slices {
        let scan = scan_slice(k, w0, z_grid)?;
        if let Some(w) = scan
            .witnesses
            .iter()
            .find(|w| w.relative_residual() <= RESIDUAL_TOL)
        {
            return Ok(LuQikengStatus::ZeroFound { witness: *w });
        }
    }
    Ok(LuQikengStatus::NoZeroAtResolution {
        z_resolution: z_grid.resolution,
        w_resolution: w_grid.resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{BaseWeight, Factor, WeightSpec};
    use crate::transform::weighted_kernel;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_slice_is_zero_free() {
        let g = GridSpec::covering(16);
        assert!(scan_slice_zeros(&KernelExpr::disk(), c(0.3, 0.2), &g).unwrap().is_empty());
        let k = weighted_kernel(&DomainSpec::unit_disk(), &WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap()).unwrap();
        assert!(scan_slice_zeros(&k, c(-0.5, 0.1), &g).unwrap().is_empty());
    }

    #[test]
    fn pole_weight_zero_on_grid_line() {
        let w = WeightSpec::new(BaseWeight::unit(), vec![], vec![Factor::new(c(0.4, 0.0), 1)]).unwrap();
        let k = weighted_kernel(&DomainSpec::unit_disk(), &w).unwrap();
        let scan = scan_slice(&k, c(-0.2, 0.3), &GridSpec::covering(16)).unwrap();
        assert_eq!(scan.witnesses.len(), 1, "{scan:?}");
        let wit = scan.witnesses[0];
        assert!((wit.z() - c(0.4, 0.0)).norm() < 1e-12);
        assert_eq!(wit.order, 1);
    }

    #[test]
    fn disk_ratio_closed_form() {
        let centers: Vec<Complex64> = (1..=12).map(|j| c(1.0 - 0.5f64.powi(j), 0.0)).collect();
        let t = boundary_ratio(&KernelExpr::disk(), c(0.0, 0.0), &centers).unwrap();
        for (v, cj) in t.values.iter().zip(&centers) {
            let want = (1.0 - cj.re * cj.re) / PI.sqrt();
            assert!((v - want).abs() < 1e-10);
        }
        assert!(t.decays());
    }

    #[test]
    fn order_of_nonzero_point_is_rejected() {
        let e = zero_order(&KernelExpr::disk(), c(0.1, 0.0), c(0.2, 0.0), OrderDirection::InZ).unwrap_err();
        assert!(matches!(e, Error::NotAZero(_)));
    }

    #[test]
    fn newton_in_zero_free_region_fails() {
        let e = refine_zero(&KernelExpr::disk(), c(0.1, 0.1), c(0.3, 0.0)).unwrap_err();
        assert!(matches!(e, Error::NoConvergence(_)));
    }

    #[test]
    fn transfer_rejects_coincident_points() {
        let e = zero_transfer_report(&KernelExpr::disk(), c(0.1, 0.0), c(0.1, 0.0), c(0.3, 0.0)).unwrap_err();
        assert!(matches!(e, Error::HypothesisUnmet(_)));
    }
}
