//! Acceptance criteria, run sequentially so timings are meaningful. One
//! line per criterion; the process exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use bergkern_core::base::{annulus_kernel, disk_mobius_power_kernel, disk_radial_kernel};
use bergkern_core::hartogs::{certify_non_lu_qikeng, lift, slice_kernel};
use bergkern_core::oracle::{oracle_kernel, verify_reproducing, QuadratureSpec};
use bergkern_core::poly::Poly;
use bergkern_core::transform::{
    multi_zero_augment, weighted_kernel, zero_augment, DecompositionPlan, PlanMode,
};
use bergkern_core::zeros::{
    boundary_ratio, lu_qikeng_status, scan_slice, scan_slice_zeros, track_zero_near_boundary,
    zero_order, zero_transfer_report, GridSpec, LuQikengStatus, OrderDirection, ZeroWitness,
};
use bergkern_core::{BaseWeight, DomainSpec, Factor, KernelExpr, WeightSpec};
use common::{c, disk_weights, kernel_matrix, rel, seeded_pairs};
use nalgebra::DMatrix;
use num_complex::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn annulus() -> DomainSpec {
    DomainSpec::annulus(0.5).unwrap()
}

fn annulus_kernel_expr() -> KernelExpr {
    weighted_kernel(&annulus(), &WeightSpec::unit()).unwrap()
}

fn annulus_witness() -> ZeroWitness {
    let status =
        lu_qikeng_status(&annulus_kernel_expr(), &GridSpec::covering(64), &GridSpec::covering(16)).unwrap();
    match status {
        LuQikengStatus::ZeroFound { witness } => witness,
        other => panic!("no annulus zero: {other:?}"),
    }
}

fn radial_consistency() -> Outcome {
    let disk = KernelExpr::disk();
    let pairs = seeded_pairs(1, 100, 0.0, 0.9);
    let mut worst: f64 = 0.0;
    let mut k = disk.clone();
    for p in 1..=3u32 {
        k = zero_augment(&k, c(0.0, 0.0)).unwrap();
        for &(z, w) in &pairs {
            let want = disk_radial_kernel(2.0 * p as f64, z, w).unwrap();
            worst = worst.max(rel(k.eval(z, w).unwrap(), want));
        }
    }
    outcome(worst <= 1e-10, format!("max rel {worst:.2e} (tol 1e-10)"))
}

fn mobius_consistency() -> Outcome {
    let disk = DomainSpec::unit_disk();
    let pairs = seeded_pairs(2, 100, 0.0, 0.9);
    let mut worst: f64 = 0.0;
    for center in [c(0.5, 0.0), c(0.3, 0.2)] {
        for p in 1..=2u32 {
            let k = weighted_kernel(&disk, &WeightSpec::with_zeros(&[(center, p)]).unwrap()).unwrap();
            for &(z, w) in &pairs {
                let want = disk_mobius_power_kernel(center, p, z, w).unwrap();
                worst = worst.max(rel(k.eval(z, w).unwrap(), want));
            }
        }
    }
    outcome(worst <= 1e-9, format!("max rel {worst:.2e} (tol 1e-9)"))
}

fn oracle_equivalence() -> Outcome {
    let disk = DomainSpec::unit_disk();
    let pairs = seeded_pairs(3, 200, 0.0, 0.7);
    let mut parts = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, w) in disk_weights() {
        let k = weighted_kernel(&disk, &w).unwrap();
        let g = oracle_kernel(&disk, &w, 60).unwrap();
        let e = pairs
            .iter()
            .map(|&(z, x)| rel(g.eval(z, x), k.eval(z, x).unwrap()))
            .fold(0.0, f64::max);
        worst = worst.max(e);
        parts.push(format!("{name} {e:.1e}"));
    }
    outcome(worst <= 1e-6, format!("max rel {worst:.2e} (tol 1e-6): {}", parts.join(", ")))
}

fn reproducing_property() -> Outcome {
    let disk = DomainSpec::unit_disk();
    let q = QuadratureSpec::new(64, 128).unwrap();
    let points: Vec<Complex64> = seeded_pairs(4, 4, 0.0, 0.7).into_iter().map(|p| p.0).collect();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let fs = [
        Poly::from_coeffs(vec![one]).unwrap(),
        Poly::from_coeffs(vec![zero, one]).unwrap(),
        Poly::from_coeffs(vec![zero, zero, one]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for (_, w) in disk_weights() {
        let k = weighted_kernel(&disk, &w).unwrap();
        for f in &fs {
            for &z in &points {
                worst = worst.max(verify_reproducing(&k, &w, f, &q, z).unwrap());
            }
        }
    }
    outcome(worst <= 1e-6, format!("max residual {worst:.2e} (tol 1e-6), 64x128 rule"))
}

fn zero_set_coincidence() -> Outcome {
    let disk = DomainSpec::unit_disk();
    let k = weighted_kernel(&disk, &WeightSpec::with_zeros(&[(c(2.0, 0.0), 1)]).unwrap()).unwrap();
    let zeros = scan_slice_zeros(&k, c(0.3, 0.0), &GridSpec::covering(64)).unwrap();
    let base = KernelExpr::disk();
    let worst = seeded_pairs(5, 100, 0.0, 0.9)
        .into_iter()
        .map(|(z, w)| {
            let lhs = k.eval(z, w).unwrap() * (z - 2.0) * (w.conj() - 2.0);
            rel(lhs, base.eval(z, w).unwrap())
        })
        .fold(0.0, f64::max);
    outcome(
        zeros.is_empty() && worst <= 1e-12,
        format!("{} zeros on w0 = 0.3; factor identity max rel {worst:.2e} (tol 1e-12)", zeros.len()),
    )
}

fn pole_profile_lift() -> Outcome {
    let profile = WeightSpec::new(
        BaseWeight::Constant { value: 1.0 / PI.sqrt() },
        vec![],
        vec![Factor::new(c(0.4, 0.0), 1)],
    )
    .unwrap();
    let h = lift(&DomainSpec::unit_disk(), &profile).unwrap();
    let k = slice_kernel(&h).unwrap();
    let base = KernelExpr::disk();
    let mut shape: f64 = 0.0;
    let mut vanish: f64 = 0.0;
    for (z, w) in seeded_pairs(6, 100, 0.0, 0.9) {
        let want = (z - 0.4) * base.eval(z, w).unwrap() * (w.conj() - 0.4);
        shape = shape.max(rel(k.eval(z, w).unwrap(), want));
        let mut ring: Vec<f64> = (0..16)
            .map(|i| k.eval(c(0.4, 0.0) + Complex64::from_polar(0.05, PI * i as f64 / 8.0), w).unwrap().norm())
            .collect();
        ring.sort_by(f64::total_cmp);
        let scale = ring[8];
        vanish = vanish.max(k.eval(c(0.4, 0.0), w).unwrap().norm() / scale);
    }
    let cert = certify_non_lu_qikeng(&h, &GridSpec::covering(64), &GridSpec::covering(8)).unwrap();
    outcome(
        shape <= 1e-12 && vanish <= 1e-12 && cert.is_certified() && !h.bounded,
        format!(
            "slice form rel {shape:.1e}, |K(0.4,w)|/scale {vanish:.1e} (tol 1e-12), certified {}",
            cert.is_certified()
        ),
    )
}

fn annulus_zero_hunt(w: &ZeroWitness) -> Outcome {
    let (z, w0) = (w.z(), w.w());
    let a = annulus_kernel(0.5, z, w0, 400, 1e-20).unwrap().0;
    let b = annulus_kernel(0.5, z, w0, 800, 1e-20).unwrap().0;
    let change = (a - b).norm();
    let ok = w.relative_residual() <= 1e-10 && w.winding == 1 && change <= 1e-8 && b.norm() <= 1e-10 * w.scale;
    outcome(
        ok,
        format!(
            "z0 = {:.6}, w0 = {:.4}, residual/scale {:.1e} (tol 1e-10), winding {}, series change {change:.1e} (tol 1e-8)",
            z,
            w0,
            w.relative_residual(),
            w.winding
        ),
    )
}

fn transfer_identities(w: &ZeroWitness) -> Outcome {
    let k = annulus_kernel_expr();
    let (z0, w0) = (w.z(), w.w());
    let mut worst_ratio: f64 = 0.0;
    let mut checked = 0;
    let mut violations = 0;
    let mut configs = 0;
    // The deflation center is the zero itself, so K(c, w0) = 0.
    for (a, _) in seeded_pairs(8, 20, 0.55, 0.95) {
        let r = zero_transfer_report(&k, z0, a, w0).unwrap();
        configs += 1;
        violations += usize::from(!r.biconditional_holds);
        if let Some(e) = r.ratio_identity_error {
            worst_ratio = worst_ratio.max(e);
            checked += 1;
        }
    }
    // Zeros of deflated kernels near the tracked zero.
    let u = z0 / z0.norm();
    for j in 4..=8 {
        let center = u * (1.0 - 0.5f64.powi(j));
        let aug = zero_augment(&k, center).unwrap();
        if let Ok(z1) = bergkern_core::zeros::refine_zero(&aug, z0, w0) {
            let r = zero_transfer_report(&k, center, z1.z(), w0).unwrap();
            configs += 1;
            violations += usize::from(!(r.augmented_zero && r.biconditional_holds));
        }
    }
    // Generic triples.
    for (i, (a, b)) in seeded_pairs(9, 30, 0.55, 0.95).into_iter().enumerate() {
        let center = seeded_pairs(100 + i as u64, 1, 0.55, 0.95)[0].0;
        if let Ok(r) = zero_transfer_report(&k, center, a, b) {
            configs += 1;
            violations += usize::from(!r.biconditional_holds);
        }
    }
    outcome(
        checked > 0 && worst_ratio <= 1e-8 && violations == 0,
        format!(
            "ratio identity max rel {worst_ratio:.1e} over {checked} (tol 1e-8); {violations} violations in {configs} configurations"
        ),
    )
}

fn order_drop(first: &ZeroWitness) -> Outcome {
    let k = annulus_kernel_expr();
    let d = annulus();
    let mut slices: Vec<Complex64> = GridSpec::covering(16)
        .interior_centers(&d)
        .into_iter()
        .filter(|w| w.norm() < 0.7)
        .collect();
    slices.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    let mut witnesses = vec![*first];
    for w0 in slices.into_iter().step_by(3).take(4) {
        witnesses.extend(scan_slice(&k, w0, &GridSpec::covering(64)).unwrap().witnesses);
    }
    let mut tested = 0;
    let mut min_ratio = f64::INFINITY;
    let mut fails = 0;
    for wit in witnesses.iter().filter(|w| w.order == 1 && w.relative_residual() <= 1e-10) {
        let (z0, center) = (wit.z(), wit.w());
        if zero_order(&k, z0, center, OrderDirection::InW) != Ok(1) {
            fails += 1;
            continue;
        }
        let aug = zero_augment(&k, center).unwrap();
        let ratio = aug.eval(z0, center).unwrap().norm() / wit.scale;
        min_ratio = min_ratio.min(ratio);
        tested += 1;
        fails += usize::from(ratio <= 1e-6);
    }
    outcome(
        tested > 0 && fails == 0,
        format!("{tested} simple zeros, min |K'(z0,c)|/scale {min_ratio:.2e} (threshold 1e-6)"),
    )
}

fn boundary_tracking(w: &ZeroWitness) -> Outcome {
    let k = annulus_kernel_expr();
    let u = w.z() / w.z().norm();
    let centers: Vec<Complex64> = (3..=10).map(|j| u * (1.0 - 0.5f64.powi(j))).collect();
    match track_zero_near_boundary(&k, w, &centers, 3) {
        Ok(steps) => {
            let d: Vec<f64> = steps.iter().map(|s| s.distance).collect();
            let tail = &d[d.len().saturating_sub(3)..];
            let decreasing = tail.len() == 3 && tail.windows(2).all(|p| p[1] < p[0]);
            let last = *d.last().unwrap();
            outcome(
                decreasing && last <= 0.05,
                format!("{} steps, final distances {:?}, final {last:.2e} (tol 0.05)", steps.len(), tail.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>()),
            )
        }
        Err(e) => outcome(false, format!("tracking failed: {e}")),
    }
}

fn ratio_decay() -> Outcome {
    let disk = DomainSpec::unit_disk();
    let along = |lo: i32| -> Vec<Complex64> { (lo..=12).map(|j| c(1.0 - 0.5f64.powi(j), 0.0)).collect() };
    let cases = [
        ("disk 1", KernelExpr::disk(), c(0.0, 0.0), along(1)),
        (
            "disk |z-0.3|^2",
            weighted_kernel(&disk, &WeightSpec::with_zeros(&[(c(0.3, 0.0), 1)]).unwrap()).unwrap(),
            c(0.0, 0.0),
            along(1),
        ),
        ("annulus 1", annulus_kernel_expr(), c(0.0, 0.7), along(2)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, k, z, centers) in &cases {
        let t = boundary_ratio(k, *z, centers).unwrap();
        let near: Vec<f64> = t
            .values
            .iter()
            .zip(&t.boundary_distances)
            .filter(|(_, &d)| d <= 1e-3)
            .map(|(v, _)| *v)
            .collect();
        ok &= !near.is_empty() && near.iter().all(|&v| v < 1e-2);
        parts.push(format!("{name} ends {:.2e}", t.last().unwrap()));
    }
    let t = boundary_ratio(&cases[0].1, c(0.0, 0.0), &cases[0].3).unwrap();
    let closed = t
        .values
        .iter()
        .zip(&cases[0].3)
        .map(|(v, cj)| (v - (1.0 - cj.re * cj.re) / PI.sqrt()).abs())
        .fold(0.0, f64::max);
    ok &= closed <= 1e-10;
    parts.push(format!("closed-form error {closed:.1e} (tol 1e-10)"));
    outcome(ok, parts.join(", "))
}

fn invariant_suite() -> Outcome {
    let mut herm: f64 = 0.0;
    let mut psd: f64 = 0.0;
    let mut deriv: f64 = 0.0;
    let h = 1e-5;
    for (_, k, (lo, hi)) in kernel_matrix() {
        let pairs = seeded_pairs(12, 40, lo, hi);
        for &(z, w) in &pairs {
            let a = k.eval(z, w).unwrap();
            herm = herm.max((a - k.eval(w, z).unwrap().conj()).norm() / a.norm());
            let dz = k.d_dz(z, w).unwrap();
            let fd = (k.eval(z + h, w).unwrap() - k.eval(z - h, w).unwrap()) / (2.0 * h);
            deriv = deriv.max((dz - fd).norm() / a.norm().max(dz.norm()));
            let dv = k.d_dwbar(z, w).unwrap();
            let fd = (k.eval(z, w + h).unwrap() - k.eval(z, w - h).unwrap()) / (2.0 * h);
            deriv = deriv.max((dv - fd).norm() / a.norm().max(dv.norm()));
        }
        let pts: Vec<Complex64> = pairs.iter().take(8).map(|p| p.0).collect();
        let m = DMatrix::from_fn(pts.len(), pts.len(), |i, j| k.eval(pts[i], pts[j]).unwrap());
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = m.symmetric_eigenvalues();
        let top = eig.max();
        psd = psd.max(-eig.min() / top);
    }
    let disk = KernelExpr::disk();
    let mut perm: f64 = 0.0;
    let centers = [(c(0.4, 0.0), 2usize), (c(-0.3, 0.2), 1), (c(0.1, -0.5), 1)];
    let reference = multi_zero_augment(&disk, &DecompositionPlan::new(centers.to_vec(), PlanMode::Iterated).unwrap()).unwrap();
    let orders = [[0, 1, 2], [2, 1, 0], [1, 2, 0]];
    for mode in [PlanMode::Iterated, PlanMode::DirectSum] {
        for o in orders {
            let plan = DecompositionPlan::new(o.iter().map(|&i| centers[i]).collect(), mode).unwrap();
            let k = multi_zero_augment(&disk, &plan).unwrap();
            for (z, w) in seeded_pairs(13, 40, 0.0, 0.9) {
                perm = perm.max(rel(k.eval(z, w).unwrap(), reference.eval(z, w).unwrap()));
            }
        }
    }
    outcome(
        herm <= 1e-12 && psd <= 1e-10 && deriv <= 1e-6 && perm <= 1e-9,
        format!(
            "hermitian {herm:.1e} (1e-12), psd {psd:.1e} (1e-10), derivatives {deriv:.1e} (1e-6), plans {perm:.1e} (1e-9)"
        ),
    )
}

fn main() {
    let mut failures = 0;
    let mut run = |n: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let elapsed = t.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let pass = o.pass && in_time;
        failures += usize::from(!pass);
        let budget = limit.map(|l| format!(" < {l:?}")).unwrap_or_default();
        println!(
            "criterion {n:>2} {} {name}: {} [{elapsed:.2?}{budget}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    };
    let secs = |s: u64| Some(Duration::from_secs(s));
    run(1, "radial consistency", secs(1), &mut radial_consistency);
    run(2, "Mobius-power consistency", secs(1), &mut mobius_consistency);
    run(3, "oracle equivalence", secs(30), &mut oracle_equivalence);
    run(4, "reproducing property", secs(30), &mut reproducing_property);
    run(5, "zero-set coincidence", None, &mut zero_set_coincidence);
    run(6, "pole-profile Hartogs lift", secs(1), &mut pole_profile_lift);
    let mut witness = None;
    run(7, "annulus zero hunt", secs(120), &mut || {
        let w = annulus_witness();
        witness = Some(w);
        annulus_zero_hunt(&w)
    });
    let w = witness.expect("criterion 7 ran");
    run(8, "zero transfer identities", None, &mut || transfer_identities(&w));
    run(9, "order drop at simple zeros", None, &mut || order_drop(&w));
    run(10, "zero tracking to the boundary", secs(120), &mut || boundary_tracking(&w));
    run(11, "boundary ratio decay", None, &mut ratio_decay);
    run(12, "invariant suite", None, &mut invariant_suite);
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 12 criteria passed");
}
