use std::f64::consts::PI;
use std::path::PathBuf;

use bergkern_core::formula::{to_formula, FormulaFormat};
use bergkern_core::hartogs::{certify_non_lu_qikeng, lift, Certificate, Certification};
use bergkern_core::oracle::{oracle_kernel, verify_reproducing, QuadratureSpec};
use bergkern_core::poly::Poly;
use bergkern_core::transform::weighted_kernel_with;
use bergkern_core::zeros::{
    boundary_ratio, lu_qikeng_status, scan_slice, track_zero_near_boundary, GridSpec, LuQikengStatus,
};
use bergkern_core::{DomainKind, Error, KernelExpr};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{csv_table, heatmap_svg, human, sig, witness_rows, WITNESS_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{}: {0}", .0.name())]
    Compute(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(
                Error::InvalidDomain(_) | Error::InvalidWeight(_) | Error::AlphaOutOfRange(_),
            ) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Formula,
    Verify,
    OracleCompare,
    Zeros,
    Ratio,
    Track,
    Hartogs,
}

pub struct Options {
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub svg: bool,
}

impl Options {
    /// Writes `content` to `<out>/<name>`, or to stdout without `--out`.
    fn emit(&self, name: &str, content: &str) -> Result<(), CliError> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join(name), content)?;
            }
            None => print!("{content}"),
        }
        Ok(())
    }

    fn side_file(&self, name: &str, content: &str) -> Result<(), CliError> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(name), content)?;
        Ok(())
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("missing `{section}` section"))
}

fn kernel(cfg: &RunConfig) -> Result<KernelExpr, CliError> {
    Ok(weighted_kernel_with(&cfg.domain, &cfg.weight, cfg.mode)?)
}

pub fn run(cmd: Command, cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    match cmd {
        Command::Eval => eval(cfg, opts),
        Command::Formula => formula(cfg, opts),
        Command::Verify => verify(cfg, opts),
        Command::OracleCompare => oracle_compare(cfg, opts),
        Command::Zeros => zeros(cfg, opts),
        Command::Ratio => ratio(cfg, opts),
        Command::Track => track(cfg, opts),
        Command::Hartogs => hartogs(cfg, opts),
    }
}

fn eval(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.eval.as_ref().ok_or_else(|| missing("eval"))?;
    let k = kernel(cfg)?;
    let mut rows = Vec::new();
    for p in &section.points {
        let v = k.eval(p.z.to_complex(), p.w.to_complex())?;
        println!("{}", human(v));
        rows.push(vec![p.z.re, p.z.im, p.w.re, p.w.im, v.re, v.im]);
    }
    if opts.out.is_some() {
        let table = csv_table(&["re_z", "im_z", "re_w", "im_w", "re_k", "im_k"], &rows)?;
        opts.emit("eval.csv", &table)?;
    }
    Ok(())
}

fn formula(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let format = cfg.formula.clone().unwrap_or_default().format;
    let text = to_formula(&kernel(cfg)?, format) + "\n";
    let name = match format {
        FormulaFormat::Latex => "formula.tex",
        FormulaFormat::Plain => "formula.txt",
    };
    opts.emit(name, &text)
}

fn verify(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.verify.as_ref().ok_or_else(|| missing("verify"))?;
    let k = kernel(cfg)?;
    let q = QuadratureSpec::new(section.radial, section.angular)?;
    let mut rows = Vec::new();
    for &n in &section.degrees {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        let f = Poly::from_coeffs(coeffs)?;
        for p in &section.points {
            let r = verify_reproducing(&k, &cfg.weight, &f, &q, p.to_complex())?;
            if opts.out.is_some() {
                rows.push(vec![n as f64, p.re, p.im, r]);
            } else {
                println!("z^{n} at {}: residual {}", human(p.to_complex()), sig(r, 10));
            }
        }
    }
    if opts.out.is_some() {
        opts.emit("verify.csv", &csv_table(&["degree", "re_z", "im_z", "residual"], &rows)?)?;
    }
    Ok(())
}

fn sample_point(rng: &mut ChaCha8Rng, inner: f64, outer: f64) -> Complex64 {
    let rho = (inner * inner + rng.gen::<f64>() * (outer * outer - inner * inner)).sqrt();
    Complex64::from_polar(rho, 2.0 * PI * rng.gen::<f64>())
}

fn oracle_compare(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.oracle_compare.as_ref().ok_or_else(|| missing("oracle_compare"))?;
    let inner = match cfg.domain.kind() {
        DomainKind::UnitDisk => 0.0,
        DomainKind::Annulus { inner_radius } => inner_radius + 0.01,
    };
    if section.radius <= inner {
        return Err(CliError::Config("oracle_compare: radius inside the hole".into()));
    }
    let k = kernel(cfg)?;
    let g = oracle_kernel(&cfg.domain, &cfg.weight, section.degree)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut rows = Vec::with_capacity(section.pairs);
    let mut worst: f64 = 0.0;
    for _ in 0..section.pairs {
        let z = sample_point(&mut rng, inner, section.radius);
        let w = sample_point(&mut rng, inner, section.radius);
        let (a, b) = (k.eval(z, w)?, g.eval(z, w));
        let rel = (a - b).norm() / a.norm();
        worst = worst.max(rel);
        rows.push(vec![z.re, z.im, w.re, w.im, rel]);
    }
    if opts.out.is_some() {
        opts.emit("oracle.csv", &csv_table(&["re_z", "im_z", "re_w", "im_w", "relative_error"], &rows)?)?;
    }
    println!("pairs {}", section.pairs);
    println!("gram condition {}", sig(g.condition(), 10));
    println!("max relative error {}", sig(worst, 10));
    Ok(())
}

fn log_modulus_grid(k: &KernelExpr, w0: Complex64, grid: &GridSpec) -> Result<Vec<Option<f64>>, CliError> {
    let d = k.domain();
    let n = grid.resolution;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let z = Complex64::new(
                grid.re_min + (grid.re_max - grid.re_min) * (i as f64 + 0.5) / n as f64,
                grid.im_min + (grid.im_max - grid.im_min) * (j as f64 + 0.5) / n as f64,
            );
            out.push(if d.contains(z) { Some(k.eval(z, w0)?.norm().log10()) } else { None });
        }
    }
    Ok(out)
}

fn zeros(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.zeros.as_ref().ok_or_else(|| missing("zeros"))?;
    let k = kernel(cfg)?;
    let w0 = section.w0.to_complex();
    let scan = scan_slice(&k, w0, &section.grid)?;
    let table = csv_table(&WITNESS_HEADER, &witness_rows(&scan.witnesses))?;
    opts.emit("zeros.csv", &table)?;
    eprintln!(
        "witnesses {}, boundary cells skipped {}, unresolved cells {}",
        scan.witnesses.len(),
        scan.boundary_cells,
        scan.failures.len()
    );
    for f in &scan.failures {
        eprintln!("  {f}");
    }
    if opts.svg {
        let values = log_modulus_grid(&k, w0, &section.grid)?;
        opts.side_file("heatmap.svg", &heatmap_svg(&section.grid, &values, &scan.witnesses))?;
    }
    Ok(())
}

fn ratio(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.ratio.as_ref().ok_or_else(|| missing("ratio"))?;
    let k = kernel(cfg)?;
    let (index, centers): (Vec<f64>, Vec<Complex64>) = match section.toward {
        Some(t) => (section.j_min..=section.j_max)
            .map(|j| (j as f64, t.to_complex() * (1.0 - 0.5f64.powi(j as i32))))
            .unzip(),
        None => section
            .centers
            .iter()
            .enumerate()
            .map(|(i, c)| ((i + 1) as f64, c.to_complex()))
            .unzip(),
    };
    let trace = boundary_ratio(&k, section.z.to_complex(), &centers)?;
    let rows: Vec<Vec<f64>> = (0..centers.len())
        .map(|i| {
            vec![
                index[i],
                centers[i].re,
                centers[i].im,
                trace.boundary_distances[i],
                trace.values[i],
            ]
        })
        .collect();
    opts.emit(
        "ratio.csv",
        &csv_table(&["j", "re_c", "im_c", "boundary_distance", "ratio"], &rows)?,
    )
}

fn track(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.track.as_ref().ok_or_else(|| missing("track"))?;
    let k = kernel(cfg)?;
    let witness = match lu_qikeng_status(&k, &section.z_grid, &section.w_grid)? {
        LuQikengStatus::ZeroFound { witness } => witness,
        LuQikengStatus::NoZeroAtResolution { .. } => {
            return Err(Error::TrackingFailed {
                index: section.j_min as usize,
                reason: "no zero to track at this resolution".into(),
            }
            .into())
        }
    };
    eprintln!("tracking z0 = {} on w0 = {}", human(witness.z()), human(witness.w()));
    let u = witness.z() / witness.z().norm();
    let centers: Vec<Complex64> = (section.j_min..=section.j_max)
        .map(|j| u * (1.0 - 0.5f64.powi(j as i32)))
        .collect();
    let steps = track_zero_near_boundary(&k, &witness, &centers, section.j_min as usize)?;
    let rows: Vec<Vec<f64>> = steps
        .iter()
        .map(|s| {
            vec![
                s.index as f64,
                s.center.re,
                s.center.im,
                s.z1.re,
                s.z1.im,
                s.distance,
                s.radius,
                s.residual,
                s.alpha,
                s.min_ratio,
            ]
        })
        .collect();
    opts.emit(
        "track.csv",
        &csv_table(
            &["j", "re_c", "im_c", "re_z1", "im_z1", "distance", "radius", "residual", "alpha", "min_ratio"],
            &rows,
        )?,
    )
}

fn hartogs(cfg: &RunConfig, opts: &Options) -> Result<(), CliError> {
    let section = cfg.hartogs.as_ref().ok_or_else(|| missing("hartogs"))?;
    let h = lift(&cfg.domain, &cfg.weight)?;
    let value = match certify_non_lu_qikeng(&h, &section.z_grid, &section.w_grid)? {
        Certification::Certified { witness } => serde_json::to_value(Certificate::new(&h, witness)),
        inconclusive => serde_json::to_value(json!({ "domain": h, "result": inconclusive })),
    }
    .expect("certificate serializes");
    let text = serde_json::to_string_pretty(&value).expect("json") + "\n";
    opts.emit("certificate.json", &text)
}
