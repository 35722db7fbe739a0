//! Number formatting, CSV rows and the SVG heatmap.

use bergkern_core::zeros::{GridSpec, ZeroWitness};
use num_complex::Complex64;
use std::fmt::Write;

/// `x` to `digits` significant digits, positional notation where sensible.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    let fixed = format!("{:.*}", (digits as i32 - 1 - exp).max(0) as usize, x);
    if fixed.contains('.') {
        fixed.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        fixed
    }
}

/// Human-readable complex number, 10 significant digits.
pub fn human(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", sig(z.re, 10), sig(z.im.abs(), 10))
}

/// CSV field: 17 significant digits.
pub fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| exact(x)))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn witness_rows(ws: &[ZeroWitness]) -> Vec<Vec<f64>> {
    ws.iter()
        .map(|w| {
            vec![
                w.z.re,
                w.z.im,
                w.w.re,
                w.w.im,
                w.residual,
                w.winding as f64,
                w.order as f64,
            ]
        })
        .collect()
}

pub const WITNESS_HEADER: [&str; 7] = ["re_z", "im_z", "re_w", "im_w", "residual", "winding", "order"];

fn ramp(t: f64) -> (u8, u8, u8) {
    // Dark blue through teal to yellow.
    let stops = [(0.0, (68, 1, 84)), (0.5, (33, 145, 140)), (1.0, (253, 231, 37))];
    let t = t.clamp(0.0, 1.0);
    let (i, lo, hi) = if t <= 0.5 { (0.0, stops[0].1, stops[1].1) } else { (0.5, stops[1].1, stops[2].1) };
    let s = (t - i) / 0.5;
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * s).round() as u8;
    (mix(lo.0, hi.0), mix(lo.1, hi.1), mix(lo.2, hi.2))
}

/// Heatmap of `log10 |K(z, w0)|` on the grid cells; `None` cells are left
/// blank. Witnesses are drawn as circles.
pub fn heatmap_svg(grid: &GridSpec, values: &[Option<f64>], witnesses: &[ZeroWitness]) -> String {
    let n = grid.resolution;
    let px = 8.0;
    let size = n as f64 * px;
    let finite: Vec<f64> = values.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    for j in 0..n {
        for i in 0..n {
            let Some(v) = values[j * n + i] else { continue };
            let (r, g, b) = if v.is_finite() { ramp((v - lo) / span) } else { (0, 0, 0) };
            // Row 0 is the bottom of the rectangle.
            let y = (n - 1 - j) as f64 * px;
            writeln!(
                s,
                r#"<rect x="{}" y="{y}" width="{px}" height="{px}" fill="rgb({r},{g},{b})"/>"#,
                i as f64 * px
            )
            .unwrap();
        }
    }
    for w in witnesses {
        let cx = (w.z.re - grid.re_min) / (grid.re_max - grid.re_min) * size;
        let cy = (grid.im_max - w.z.im) / (grid.im_max - grid.im_min) * size;
        writeln!(
            s,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="none" stroke="red" stroke-width="1.5"/>"#
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_digits() {
        assert_eq!(sig(2.0 / std::f64::consts::PI, 10), "0.6366197724");
        assert_eq!(sig(1.0, 10), "1");
        assert_eq!(sig(123456.0, 3), "1.23e5");
        assert_eq!(human(Complex64::new(0.5, -0.25)), "0.5-0.25i");
    }

    #[test]
    fn csv_digits_round_trip() {
        let x = 0.1 + 0.2;
        assert_eq!(exact(x).parse::<f64>().unwrap(), x);
    }
}
