#![allow(dead_code)]

use bergkern_core::transform::weighted_kernel;
use bergkern_core::{BaseWeight, DomainSpec, KernelExpr, WeightSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The disk weights used across the suites.
pub fn disk_weights() -> Vec<(&'static str, WeightSpec)> {
    vec![
        ("1", WeightSpec::unit()),
        ("|z|^2", WeightSpec::with_zeros(&[(c(0.0, 0.0), 1)]).unwrap()),
        ("|z|^4", WeightSpec::with_zeros(&[(c(0.0, 0.0), 2)]).unwrap()),
        ("|z-0.5|^2", WeightSpec::with_zeros(&[(c(0.5, 0.0), 1)]).unwrap()),
        (
            "|z-0.4|^2|z+0.3|^2",
            WeightSpec::with_zeros(&[(c(0.4, 0.0), 1), (c(-0.3, 0.0), 1)]).unwrap(),
        ),
        ("|z-2|^2", WeightSpec::with_zeros(&[(c(2.0, 0.0), 1)]).unwrap()),
    ]
}

/// Disk and annulus kernels for invariant checks, with the radius range
/// sample points are drawn from.
pub fn kernel_matrix() -> Vec<(String, KernelExpr, (f64, f64))> {
    let disk = DomainSpec::unit_disk();
    let ann = DomainSpec::annulus(0.5).unwrap();
    let mut out: Vec<(String, KernelExpr, (f64, f64))> = disk_weights()
        .into_iter()
        .map(|(n, w)| (format!("disk {n}"), weighted_kernel(&disk, &w).unwrap(), (0.0, 0.9)))
        .collect();
    out.push((
        "disk |z|^1.5".into(),
        weighted_kernel(&disk, &WeightSpec::with_base(BaseWeight::radial(1.5)).unwrap()).unwrap(),
        (0.0, 0.9),
    ));
    let annulus_weights = [
        ("1", WeightSpec::unit()),
        ("|z|^2", WeightSpec::with_base(BaseWeight::radial(2.0)).unwrap()),
        ("|z-0.7|^2", WeightSpec::with_zeros(&[(c(0.7, 0.0), 1)]).unwrap()),
        ("|z-0.2|^2", WeightSpec::with_zeros(&[(c(0.2, 0.0), 1)]).unwrap()),
    ];
    for (n, w) in annulus_weights {
        out.push((format!("annulus {n}"), weighted_kernel(&ann, &w).unwrap(), (0.55, 0.9)));
    }
    out
}

pub fn point_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    let rho = (lo * lo + rng.gen::<f64>() * (hi * hi - lo * lo)).sqrt();
    Complex64::from_polar(rho, 2.0 * PI * rng.gen::<f64>())
}

pub fn seeded_pairs(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (point_in(&mut rng, lo, hi), point_in(&mut rng, lo, hi)))
        .collect()
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
