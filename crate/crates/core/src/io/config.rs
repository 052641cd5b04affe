//! Line-oriented `key = value` simulation configuration.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::correlation::Method;
use crate::params::{derive_timing, FrequencyReading, OpticalConfig, PhaseFilter, TimingParams};
use crate::quadrature::QuadratureSpec;

use super::units::{format_quantity, parse_quantity, Dimension};

/// The shipped reference profile.
pub const DEFAULT_PROFILE: &str = include_str!("../../profiles/default.cfg");

/// What went wrong, and on which line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub kind: ConfigErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigErrorKind {
    Syntax(String),
    UnknownKey(String),
    DuplicateKey(String),
    MissingKey(&'static str),
    Unit { key: String, reason: String },
    Range { key: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.kind {
            ConfigErrorKind::Syntax(s) => write!(f, "expected `key = value`, got `{s}`"),
            ConfigErrorKind::UnknownKey(k) => write!(f, "unknown key `{k}`"),
            ConfigErrorKind::DuplicateKey(k) => write!(f, "key `{k}` given twice"),
            ConfigErrorKind::MissingKey(k) => write!(f, "missing required key `{k}`"),
            ConfigErrorKind::Unit { key, reason } => write!(f, "`{key}`: {reason}"),
            ConfigErrorKind::Range { key, reason } => write!(f, "`{key}` out of range: {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn at(line: usize, kind: ConfigErrorKind) -> Self {
        ConfigError {
            line: Some(line),
            kind,
        }
    }

    fn range(line: Option<usize>, key: &str, reason: impl Into<String>) -> Self {
        ConfigError {
            line,
            kind: ConfigErrorKind::Range {
                key: key.to_string(),
                reason: reason.into(),
            },
        }
    }
}

/// Sweep settings shared by the subcommands. Unset ranges fall back to
/// per-command defaults derived from τ₁ and β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Delay range T = τ + τ₂ in fs.
    pub delay_range: Option<(f64, f64)>,
    pub points: usize,
    /// τ' per fs of T.
    pub delay_scale: Option<f64>,
    pub gamma_range: (f64, f64),
    pub gamma_points: usize,
    /// Fixed T for γ scans and optimization, fs.
    pub fixed_delay: f64,
    pub method: Method,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            delay_range: None,
            points: 401,
            delay_scale: None,
            gamma_range: (0.0, 10.0),
            gamma_points: 401,
            fixed_delay: 0.0,
            method: Method::ClosedForm,
        }
    }
}

/// A complete, validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub optical: OpticalConfig<f64>,
    pub frequency_reading: FrequencyReading,
    /// Filter period β in fs; used by γ scans even when no filter is set.
    pub beta: f64,
    pub filter: Option<PhaseFilter<f64>>,
    pub quadrature: QuadratureSpec<f64>,
    pub sweep: SweepConfig,
}

impl SimulationConfig {
    pub fn timing(&self) -> TimingParams<f64> {
        derive_timing(&self.optical).expect("validated at parse time")
    }

    /// Same configuration with the filter set from γ at the configured β.
    pub fn with_gamma(&self, gamma: f64) -> crate::error::Result<Self> {
        let mut out = self.clone();
        out.filter = Some(PhaseFilter::from_gamma(gamma, self.beta)?);
        Ok(out)
    }
}

impl Default for SimulationConfig {
    fn default() -> Self {
        parse_config(DEFAULT_PROFILE).expect("shipped profile parses")
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Quantity(Dimension),
    Count,
    Word,
}

const KEYS: &[(&str, Kind)] = &[
    (
        "inv_group_velocity_diff",
        Kind::Quantity(Dimension::TimePerLength),
    ),
    ("crystal_length", Kind::Quantity(Dimension::Length)),
    ("detector_distance", Kind::Quantity(Dimension::Length)),
    (
        "degenerate_wavelength",
        Kind::Quantity(Dimension::Wavelength),
    ),
    (
        "pump_angular_frequency",
        Kind::Quantity(Dimension::AngularFrequency),
    ),
    ("frequency_reading", Kind::Word),
    ("beta", Kind::Quantity(Dimension::Time)),
    ("gamma", Kind::Quantity(Dimension::Dimensionless)),
    ("alpha", Kind::Quantity(Dimension::Dimensionless)),
    ("rel_tol", Kind::Quantity(Dimension::Dimensionless)),
    (
        "domain_halfwidth_factor",
        Kind::Quantity(Dimension::Dimensionless),
    ),
    ("max_subdivisions", Kind::Count),
    ("delay_min", Kind::Quantity(Dimension::Time)),
    ("delay_max", Kind::Quantity(Dimension::Time)),
    ("points", Kind::Count),
    ("delay_scale", Kind::Quantity(Dimension::InverseTime)),
    ("gamma_min", Kind::Quantity(Dimension::Dimensionless)),
    ("gamma_max", Kind::Quantity(Dimension::Dimensionless)),
    ("gamma_points", Kind::Count),
    ("fixed_delay", Kind::Quantity(Dimension::Time)),
    ("method", Kind::Word),
];

const REQUIRED: &[&str] = &[
    "inv_group_velocity_diff",
    "crystal_length",
    "detector_distance",
    "degenerate_wavelength",
];

#[derive(Clone)]
enum Value {
    Number(f64),
    Count(usize),
    Word(String),
}

struct Entry {
    line: usize,
    value: Value,
}

struct Entries(Vec<(&'static str, Entry)>);

impl Entries {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.0.iter().find(|(k, _)| *k == key).map(|(_, e)| e)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.get(key).map(|e| e.line)
    }

    fn number(&self, key: &str) -> Option<f64> {
        match self.get(key)?.value {
            Value::Number(v) => Some(v),
            _ => None,
        }
    }

    fn count(&self, key: &str) -> Option<usize> {
        match self.get(key)?.value {
            Value::Count(v) => Some(v),
            _ => None,
        }
    }

    fn word(&self, key: &str) -> Option<(&str, usize)> {
        let e = self.get(key)?;
        match &e.value {
            Value::Word(w) => Some((w.as_str(), e.line)),
            _ => None,
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.number(key) {
            Some(v) if !(v.is_finite() && v > 0.0) => Err(ConfigError::range(
                self.line(key),
                key,
                format!("must be > 0, got {v}"),
            )),
            other => Ok(other),
        }
    }

    fn finite(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.number(key) {
            Some(v) if !v.is_finite() => {
                Err(ConfigError::range(self.line(key), key, "must be finite"))
            }
            other => Ok(other),
        }
    }

    fn pair(&self, lo: &str, hi: &str) -> Result<Option<(f64, f64)>, ConfigError> {
        match (self.finite(lo)?, self.finite(hi)?) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) if a < b => Ok(Some((a, b))),
            (Some(a), Some(b)) => Err(ConfigError::range(
                self.line(hi),
                hi,
                format!("must exceed {lo} = {a}, got {b}"),
            )),
            (Some(_), None) => Err(ConfigError {
                line: self.line(lo),
                kind: ConfigErrorKind::Range {
                    key: lo.to_string(),
                    reason: format!("requires `{hi}`"),
                },
            }),
            (None, Some(_)) => Err(ConfigError {
                line: self.line(hi),
                kind: ConfigErrorKind::Range {
                    key: hi.to_string(),
                    reason: format!("requires `{lo}`"),
                },
            }),
        }
    }

    fn points(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.count(key) {
            Some(n) if n < 2 => Err(ConfigError::range(
                self.line(key),
                key,
                "need at least 2 points",
            )),
            Some(n) => Ok(n),
            None => Ok(default),
        }
    }
}

fn tokenize(text: &str) -> Result<Entries, ConfigError> {
    let mut entries: Vec<(&'static str, Entry)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at(line, ConfigErrorKind::Syntax(content.to_string())))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::at(
                line,
                ConfigErrorKind::Syntax(content.to_string()),
            ));
        }
        let &(name, kind) = KEYS
            .iter()
            .find(|(k, _)| *k == key)
            .ok_or_else(|| ConfigError::at(line, ConfigErrorKind::UnknownKey(key.to_string())))?;
        if entries.iter().any(|(k, _)| *k == name) {
            return Err(ConfigError::at(
                line,
                ConfigErrorKind::DuplicateKey(name.to_string()),
            ));
        }
        let unit_error = |reason: String| {
            ConfigError::at(
                line,
                ConfigErrorKind::Unit {
                    key: name.to_string(),
                    reason,
                },
            )
        };
        let value = match kind {
            Kind::Quantity(dim) => {
                Value::Number(parse_quantity(value, dim).map_err(|e| unit_error(e.to_string()))?)
            }
            Kind::Count => Value::Count(
                value
                    .parse()
                    .map_err(|_| unit_error(format!("`{value}` is not a non-negative integer")))?,
            ),
            Kind::Word => Value::Word(value.to_string()),
        };
        entries.push((name, Entry { line, value }));
    }
    Ok(Entries(entries))
}

/// Parses and validates a configuration. Omitted optional keys take their
/// defaults; errors carry the offending line.
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let e = tokenize(text)?;
    for key in REQUIRED {
        if e.get(key).is_none() {
            return Err(ConfigError {
                line: None,
                kind: ConfigErrorKind::MissingKey(key),
            });
        }
    }
    let dinv = e.positive("inv_group_velocity_diff")?.unwrap();
    let length = e.positive("crystal_length")?.unwrap();
    let distance = e.positive("detector_distance")?.unwrap();
    let wavelength = e.positive("degenerate_wavelength")?.unwrap();
    let optical = match e.positive("pump_angular_frequency")? {
        Some(w) => OpticalConfig::with_pump_frequency(dinv, length, distance, wavelength, w),
        None => OpticalConfig::new(dinv, length, distance, wavelength),
    }
    .map_err(|err| ConfigError::range(None, "optical", err.to_string()))?;

    let frequency_reading = match e.word("frequency_reading") {
        None | Some(("pump", _)) => FrequencyReading::Pump,
        Some(("degenerate", _)) => FrequencyReading::Degenerate,
        Some((other, line)) => {
            return Err(ConfigError::range(
                Some(line),
                "frequency_reading",
                format!("`{other}` is neither `pump` nor `degenerate`"),
            ))
        }
    };

    let beta = e.positive("beta")?.unwrap_or(50.0);
    let filter = match (e.finite("gamma")?, e.finite("alpha")?) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::range(
                e.line("alpha"),
                "alpha",
                "give either `gamma` or `alpha`, not both",
            ));
        }
        (Some(g), None) => Some(PhaseFilter::from_gamma(g, beta)),
        (None, Some(a)) => Some(PhaseFilter::from_alpha(
            a,
            beta,
            optical.modulation_frequency(frequency_reading),
        )),
        (None, None) => None,
    }
    .transpose()
    .map_err(|err| {
        ConfigError::range(
            e.line("gamma").or(e.line("alpha")),
            "filter",
            err.to_string(),
        )
    })?;

    let defaults = QuadratureSpec::default();
    let quadrature = QuadratureSpec {
        rel_tol: e.positive("rel_tol")?.unwrap_or(defaults.rel_tol),
        domain_halfwidth_factor: e
            .positive("domain_halfwidth_factor")?
            .unwrap_or(defaults.domain_halfwidth_factor),
        max_subdivisions: e
            .count("max_subdivisions")
            .unwrap_or(defaults.max_subdivisions),
    };
    if let Err(err) = quadrature.validate() {
        let line = e
            .line("rel_tol")
            .or(e.line("domain_halfwidth_factor"))
            .or(e.line("max_subdivisions"));
        return Err(ConfigError::range(line, "quadrature", err.to_string()));
    }

    let sweep_defaults = SweepConfig::default();
    let method = match e.word("method") {
        None => sweep_defaults.method,
        Some((w, line)) => Method::from_str(w)
            .map_err(|reason| ConfigError::range(Some(line), "method", reason))?,
    };
    let sweep = SweepConfig {
        delay_range: e.pair("delay_min", "delay_max")?,
        points: e.points("points", sweep_defaults.points)?,
        delay_scale: e.positive("delay_scale")?,
        gamma_range: e
            .pair("gamma_min", "gamma_max")?
            .unwrap_or(sweep_defaults.gamma_range),
        gamma_points: e.points("gamma_points", sweep_defaults.gamma_points)?,
        fixed_delay: e
            .finite("fixed_delay")?
            .unwrap_or(sweep_defaults.fixed_delay),
        method,
    };

    Ok(SimulationConfig {
        optical,
        frequency_reading,
        beta,
        filter,
        quadrature,
        sweep,
    })
}

/// Writes every field in internal units; [`parse_config`] reads it back to
/// an identical record.
pub fn serialize_config(cfg: &SimulationConfig) -> String {
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        let _ = writeln!(out, "{key} = {value}");
    };
    let o = &cfg.optical;
    put(
        "inv_group_velocity_diff",
        format_quantity(o.inv_group_velocity_diff, Dimension::TimePerLength),
    );
    put(
        "crystal_length",
        format_quantity(o.crystal_length, Dimension::Length),
    );
    put(
        "detector_distance",
        format_quantity(o.detector_distance, Dimension::Length),
    );
    put(
        "degenerate_wavelength",
        format_quantity(o.degenerate_wavelength, Dimension::Wavelength),
    );
    put(
        "pump_angular_frequency",
        format_quantity(o.pump_angular_frequency, Dimension::AngularFrequency),
    );
    put(
        "frequency_reading",
        match cfg.frequency_reading {
            FrequencyReading::Pump => "pump",
            FrequencyReading::Degenerate => "degenerate",
        }
        .to_string(),
    );
    put("beta", format_quantity(cfg.beta, Dimension::Time));
    if let Some(f) = &cfg.filter {
        match f.alpha() {
            Some(a) => put("alpha", format!("{a}")),
            None => put("gamma", format!("{}", f.gamma())),
        }
    }
    let q = &cfg.quadrature;
    put("rel_tol", format!("{}", q.rel_tol));
    put(
        "domain_halfwidth_factor",
        format!("{}", q.domain_halfwidth_factor),
    );
    put("max_subdivisions", q.max_subdivisions.to_string());
    let s = &cfg.sweep;
    if let Some((lo, hi)) = s.delay_range {
        put("delay_min", format_quantity(lo, Dimension::Time));
        put("delay_max", format_quantity(hi, Dimension::Time));
    }
    put("points", s.points.to_string());
    if let Some(scale) = s.delay_scale {
        put(
            "delay_scale",
            format_quantity(scale, Dimension::InverseTime),
        );
    }
    put("gamma_min", format!("{}", s.gamma_range.0));
    put("gamma_max", format!("{}", s.gamma_range.1));
    put("gamma_points", s.gamma_points.to_string());
    put(
        "fixed_delay",
        format_quantity(s.fixed_delay, Dimension::Time),
    );
    put("method", s.method.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn minimal() -> String {
        "inv_group_velocity_diff = 2.5 ps/cm\ncrystal_length = 0.56 mm\n\
         detector_distance = 520 mm\ndegenerate_wavelength = 700 nm\n"
            .to_string()
    }

    #[test]
    fn default_profile() {
        let cfg = SimulationConfig::default();
        let t = cfg.timing();
        assert_eq!(t.tau1, 70.0);
        assert_eq!(t.tau2, 130_000.0);
        assert_eq!(cfg.beta, 50.0);
        assert!(cfg.filter.is_none());
        assert_eq!(cfg.quadrature, QuadratureSpec::default());
        assert_eq!(cfg.sweep, SweepConfig::default());
    }

    #[test]
    fn negative_length_names_the_key_and_line() {
        let text = minimal().replace("0.56 mm", "-1 mm");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(matches!(&err.kind, ConfigErrorKind::Range { key, .. } if key == "crystal_length"));
        assert!(err.to_string().contains("crystal_length"));
    }

    #[test]
    fn gamma_without_alpha_sets_filter_directly() {
        let cfg = parse_config(&(minimal() + "gamma = 4\n")).unwrap();
        let f = cfg.filter.unwrap();
        assert_eq!((f.gamma(), f.beta(), f.alpha()), (4.0, 50.0, None));
    }

    #[test]
    fn alpha_goes_through_the_pump_frequency() {
        let cfg = parse_config(&(minimal() + "alpha = 3\nbeta = 50 fs\n")).unwrap();
        let f = cfg.filter.unwrap();
        assert!((f.gamma() - 3.094_812_281_629_178_7).abs() < 1e-9);
        let cfg =
            parse_config(&(minimal() + "alpha = 3\nfrequency_reading = degenerate\n")).unwrap();
        assert!((cfg.filter.unwrap().gamma() + 5.781_067_404_450_404).abs() < 1e-9);
    }

    #[test]
    fn rejects_malformed_input() {
        let kind = |extra: &str| parse_config(&(minimal() + extra)).unwrap_err();
        assert_eq!(
            kind("colour = blue\n").kind,
            ConfigErrorKind::UnknownKey("colour".into())
        );
        assert_eq!(kind("colour = blue\n").line, Some(5));
        assert!(matches!(
            kind("beta = 50\n").kind,
            ConfigErrorKind::Unit { .. }
        ));
        assert!(matches!(
            kind("beta = 50 kg\n").kind,
            ConfigErrorKind::Unit { .. }
        ));
        assert!(matches!(
            kind("beta 50 fs\n").kind,
            ConfigErrorKind::Syntax(_)
        ));
        assert!(matches!(
            kind("crystal_length = 1 mm\n").kind,
            ConfigErrorKind::DuplicateKey(_)
        ));
        assert!(matches!(
            kind("gamma = 1\nalpha = 1\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        assert!(matches!(
            kind("delay_min = 5 fs\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        assert!(matches!(
            kind("delay_min = 5 fs\ndelay_max = 1 fs\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        assert!(matches!(
            kind("points = 1\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        assert!(matches!(
            kind("points = -3\n").kind,
            ConfigErrorKind::Unit { .. }
        ));
        assert!(matches!(
            kind("method = simpson\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        assert!(matches!(
            kind("domain_halfwidth_factor = 2\n").kind,
            ConfigErrorKind::Range { .. }
        ));
        let missing = parse_config("crystal_length = 1 mm\n").unwrap_err();
        assert_eq!(
            missing.kind,
            ConfigErrorKind::MissingKey("inv_group_velocity_diff")
        );
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# header\n\n{}  beta = 70 fs   # trailing\n", minimal());
        assert_eq!(parse_config(&text).unwrap().beta, 70.0);
    }

    #[test]
    fn round_trip_examples() {
        for extra in [
            "",
            "gamma = -7.25\nmethod = direct\n",
            "alpha = 3\nfrequency_reading = degenerate\ndelay_min = -1 ps\ndelay_max = 2 ps\ndelay_scale = 2e14 /s\n",
        ] {
            let cfg = parse_config(&(minimal() + extra)).unwrap();
            let again = parse_config(&serialize_config(&cfg)).unwrap();
            assert_eq!(cfg, again);
            assert_eq!(serialize_config(&cfg), serialize_config(&again));
        }
    }

    proptest! {
        #[test]
        fn round_trip_random(
            dinv in 1.0f64..1e3,
            d in 0.01f64..10.0,
            z in 1.0f64..1e4,
            lambda in 200.0f64..2000.0,
            beta in 1.0f64..500.0,
            gamma in proptest::option::of(-10.0f64..10.0),
            points in 2usize..5000,
            lo in -1e4f64..0.0,
            width in 1.0f64..1e4,
        ) {
            let mut cfg = SimulationConfig {
                optical: OpticalConfig::new(dinv, d, z, lambda).unwrap(),
                beta,
                filter: gamma.map(|g| PhaseFilter::from_gamma(g, beta).unwrap()),
                ..SimulationConfig::default()
            };
            cfg.sweep.points = points;
            cfg.sweep.delay_range = Some((lo, lo + width));
            let again = parse_config(&serialize_config(&cfg)).unwrap();
            prop_assert_eq!(cfg, again);
        }
    }
}
