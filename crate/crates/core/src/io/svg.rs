//! Minimal standalone SVG line plots. Output depends only on the curve.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::Curve;
use crate::scalar::Scalar;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders `curve` as an SVG document.
pub fn curve_to_svg<S: Scalar>(curve: &Curve<S>) -> Result<String> {
    curve.validate()?;
    if curve.samples.is_empty() {
        return Err(Error::CurveFormat("cannot plot an empty curve".into()));
    }
    let (x0, x1) = bounds(curve.xs().map(|x| x.as_f64()));
    let (y0, y1) = bounds(curve.ys().map(|y| y.as_f64()));
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    if let Some(title) = curve.metadata_value("scan") {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{} scan</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let u = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + u * (x1 - x0), y0 + u * (y1 - y0));
        let (tx, ty) = (px(xv), py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{tx:.2}" y1="{:.2}" x2="{tx:.2}" y2="{:.2}" stroke="black"/><text x="{tx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ty:.2}" x2="{LEFT}" y2="{ty:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            ty + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        escape(&curve.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&curve.y_label)
    );
    s.push_str(r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points=""#);
    for (i, (x, y)) in curve.samples.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.2},{:.2}", px(x.as_f64()), py(y.as_f64()));
    }
    s.push_str("\"/>\n</svg>\n");
    Ok(s)
}

fn tick_label(v: f64) -> String {
    let v = if v.abs() < 1e-12 { 0.0 } else { v };
    let text = format!("{v:.3}");
    let text = text.trim_end_matches('0').trim_end_matches('.');
    text.to_string()
}

pub fn write_curve_svg<S: Scalar>(curve: &Curve<S>, destination: &Path) -> Result<()> {
    let text = curve_to_svg(curve)?;
    fs::write(destination, text).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> Curve<f64> {
        Curve::new(
            "tau_prime",
            "rate",
            vec![(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)],
            vec![("scan".into(), "delay".into())],
        )
        .unwrap()
    }

    #[test]
    fn well_formed_and_deterministic() {
        let a = curve_to_svg(&curve()).unwrap();
        assert!(a.starts_with("<svg xmlns="));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("delay scan"));
        assert!(a.contains(r#"points="70.00,"#));
        assert_eq!(a, curve_to_svg(&curve()).unwrap());
    }

    #[test]
    fn flat_curve_still_plots() {
        let c = Curve::new("x", "y", vec![(0.0, 1.0), (1.0, 1.0)], vec![]).unwrap();
        let svg = curve_to_svg(&c).unwrap();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn labels_are_escaped() {
        let c = Curve::new("a<b", "y&z", vec![(0.0, 1.0), (1.0, 2.0)], vec![]).unwrap();
        let svg = curve_to_svg(&c).unwrap();
        assert!(svg.contains("a&lt;b") && svg.contains("y&amp;z"));
    }

    #[test]
    fn tick_labels_are_trimmed() {
        assert_eq!(tick_label(1.0), "1");
        assert_eq!(tick_label(-0.25), "-0.25");
        assert_eq!(tick_label(-1e-15), "0");
        assert_eq!(tick_label(0.123456), "0.123");
    }
}
