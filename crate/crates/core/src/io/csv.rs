//! Curve files: a `# x=…, y=…` header, `# key = value` parameter echo, then
//! `x,y` rows with 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::Curve;
use crate::scalar::Scalar;

/// Renders a curve; refuses non-finite samples.
pub fn curve_to_csv<S: Scalar>(curve: &Curve<S>) -> Result<String> {
    if let Some(index) = curve
        .samples
        .iter()
        .position(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::NonFinite { index });
    }
    let mut out = format!("# x={}, y={}\n", curve.x_label, curve.y_label);
    for (k, v) in &curve.metadata {
        let _ = writeln!(out, "# {k} = {v}");
    }
    for (x, y) in &curve.samples {
        let _ = writeln!(out, "{:.11e},{:.11e}", x.as_f64(), y.as_f64());
    }
    Ok(out)
}

pub fn write_curve_csv<S: Scalar>(curve: &Curve<S>, destination: &Path) -> Result<()> {
    let text = curve_to_csv(curve)?;
    fs::write(destination, text).map_err(|source| Error::Io {
        path: destination.to_path_buf(),
        source,
    })
}

/// Inverse of [`curve_to_csv`].
pub fn parse_curve_csv(text: &str) -> Result<Curve<f64>> {
    let bad = |n: usize, what: &str| Error::CurveFormat(format!("line {n}: {what}"));
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::CurveFormat("empty file".into()))?;
    let (x_label, y_label) = header
        .strip_prefix("# x=")
        .and_then(|rest| rest.split_once(", y="))
        .ok_or_else(|| bad(1, "expected `# x=<label>, y=<label>`"))?;

    let mut metadata = Vec::new();
    let mut samples = Vec::new();
    for (n, line) in lines {
        if let Some(comment) = line.strip_prefix('#') {
            if !samples.is_empty() {
                return Err(bad(n, "comment after data rows"));
            }
            let (k, v) = comment
                .split_once(" = ")
                .ok_or_else(|| bad(n, "expected `# key = value`"))?;
            metadata.push((k.trim().to_string(), v.to_string()));
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let (x, y) = line
            .split_once(',')
            .ok_or_else(|| bad(n, "expected `x,y`"))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(n, &format!("`{s}` is not a number")))
        };
        samples.push((parse(x)?, parse(y)?));
    }
    Curve::new(x_label, y_label, samples, metadata)
}

pub fn read_curve_csv(path: &Path) -> Result<Curve<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_curve_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_points() -> Curve<f64> {
        Curve {
            x_label: "tau_prime".into(),
            y_label: "rate".into(),
            samples: vec![(0.0, 0.0), (1.0, 1.0)],
            metadata: vec![
                ("tau1_fs".into(), "70".into()),
                ("method".into(), "closed-form".into()),
            ],
        }
    }

    #[test]
    fn layout() {
        let text = curve_to_csv(&two_points()).unwrap();
        assert_eq!(
            text,
            "# x=tau_prime, y=rate\n# tau1_fs = 70\n# method = closed-form\n\
             0.00000000000e0,0.00000000000e0\n1.00000000000e0,1.00000000000e0\n"
        );
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 2);
    }

    #[test]
    fn twelve_significant_digits() {
        let mut c = two_points();
        c.samples[1] = (1.0, 1.189_076_583_662_663);
        let text = curve_to_csv(&c).unwrap();
        assert!(text.ends_with("1.00000000000e0,1.18907658366e0\n"));
    }

    #[test]
    fn refuses_non_finite() {
        let mut c = two_points();
        c.samples[1].1 = f64::INFINITY;
        assert!(matches!(
            curve_to_csv(&c),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    #[test]
    fn io_error_names_path() {
        let err =
            write_curve_csv(&two_points(), Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/out.csv"));
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_curve_csv("").is_err());
        assert!(parse_curve_csv("x,y\n1,2\n").is_err());
        assert!(parse_curve_csv("# x=a, y=b\n1;2\n").is_err());
        assert!(parse_curve_csv("# x=a, y=b\n1,2\n# k = v\n").is_err());
        assert!(parse_curve_csv("# x=a, y=b\n2,1\n1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(ys in proptest::collection::vec(-1e3f64..1e3, 2..50), x0 in -1e3f64..1e3) {
            let samples: Vec<_> = ys.iter().enumerate().map(|(i, &y)| (x0 + i as f64, y)).collect();
            let curve = Curve::new("x", "y", samples, vec![("k".into(), "v w".into())]).unwrap();
            let text = curve_to_csv(&curve).unwrap();
            let back = parse_curve_csv(&text).unwrap();
            prop_assert_eq!(&back.metadata, &curve.metadata);
            prop_assert_eq!((&back.x_label[..], &back.y_label[..]), ("x", "y"));
            for (a, b) in back.samples.iter().zip(&curve.samples) {
                let printed = |v: f64| format!("{v:.11e}").parse::<f64>().unwrap();
                prop_assert_eq!(a.0, printed(b.0));
                prop_assert_eq!(a.1, printed(b.1));
            }
            prop_assert_eq!(curve_to_csv(&back).unwrap(), text);
        }
    }
}
