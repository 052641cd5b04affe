//! Command-line front end.
//!
//! Exit status: 0 success, 1 bad input, 2 numerical failure. Data goes to
//! the output file or stdout, diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::correlation::Method;
use crate::error::{Error, Result};
use crate::experiments::{delay_scan_with, find_peak_delay, gamma_scan, optimize_gamma, Curve};
use crate::io::{
    curve_to_csv, curve_to_svg, parse_config, parse_quantity, Dimension, SimulationConfig,
};
use crate::params::{PhaseFilter, DIP_DELAY_SCALE_PER_FS, SHAPED_DELAY_SCALE_PER_FS};
use crate::validation::run_checks;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Coincidence rates of phase-shaped down-converted photon pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Unmodulated coincidence dip against effective delay.
    Dip(ScanArgs),
    /// Rate against effective delay with the phase filter applied.
    Shape {
        /// Effective modulation depth; overrides the config.
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Rate at fixed delay against modulation depth.
    GammaScan {
        #[command(flatten)]
        common: CommonArgs,
        /// Filter period, e.g. `50fs`.
        #[arg(long)]
        beta: Option<String>,
        /// Fixed delay T = tau + tau2, e.g. `0fs`.
        #[arg(long, allow_hyphen_values = true)]
        delay: Option<String>,
        /// Modulation depth range.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        range: Option<Vec<f64>>,
    },
    /// Maximize the rate at fixed delay over modulation depth.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
        bracket: Option<Vec<f64>>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        delay: Option<String>,
        /// Absolute tolerance on the optimal depth.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Cross-check quadrature, series and closed form; report pass/fail.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random (T, gamma, beta) tuples to test.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Configuration file; the built-in reference profile when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Number of samples.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Delay range in T = tau + tau2, e.g. `-140fs 140fs`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_hyphen_values = true)]
    range: Option<Vec<String>>,
    /// Effective-delay scale, e.g. `0.14e14/s`.
    #[arg(long)]
    scale: Option<String>,
    /// closed-form, direct or series.
    #[arg(long)]
    method: Option<Method>,
}

fn load_config(path: Option<&Path>) -> Result<SimulationConfig> {
    match path {
        None => Ok(SimulationConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(parse_config(&text)?)
        }
    }
}

fn quantity(name: &'static str, text: &str, dim: Dimension) -> Result<f64> {
    parse_quantity(text, dim).map_err(|e| Error::Parameter {
        name,
        reason: e.to_string(),
    })
}

fn emit(data: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, data).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout
            .write_all(data.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn emit_curve(curve: &Curve<f64>, common: &CommonArgs, stdout: &mut dyn Write) -> Result<()> {
    emit(&curve_to_csv(curve)?, common.out.as_deref(), stdout)?;
    if let Some(svg) = &common.svg {
        fs::write(svg, curve_to_svg(curve)?).map_err(|source| Error::Io {
            path: svg.clone(),
            source,
        })?;
    }
    Ok(())
}

fn delay_sweep(
    cfg: &SimulationConfig,
    filter: Option<&PhaseFilter<f64>>,
    args: &ScanArgs,
    default_range: (f64, f64),
    default_scale: f64,
    stdout: &mut dyn Write,
) -> Result<(Curve<f64>, (f64, f64))> {
    let range = match &args.range {
        Some(r) => (
            quantity("range", &r[0], Dimension::Time)?,
            quantity("range", &r[1], Dimension::Time)?,
        ),
        None => cfg.sweep.delay_range.unwrap_or(default_range),
    };
    let scale = match &args.scale {
        Some(s) => quantity("scale", s, Dimension::InverseTime)?,
        None => cfg.sweep.delay_scale.unwrap_or(default_scale),
    };
    let points = args.common.points.unwrap_or(cfg.sweep.points);
    let method = args.method.unwrap_or(cfg.sweep.method);
    let curve = delay_scan_with(
        &cfg.timing(),
        filter,
        range,
        points,
        &cfg.quadrature,
        scale,
        method,
    )?;
    emit_curve(&curve, &args.common, stdout)?;
    Ok((curve, range))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<bool> {
    match cli.command {
        Command::Dip(args) => {
            let cfg = load_config(args.common.config.as_deref())?;
            let tau1 = cfg.timing().tau1;
            let (curve, _) = delay_sweep(
                &cfg,
                None,
                &args,
                (-2.0 * tau1, 2.0 * tau1),
                DIP_DELAY_SCALE_PER_FS,
                stdout,
            )?;
            if let Some((x, y)) = curve.argmin() {
                log::info!("dip minimum {y:.3e} at tau' = {x}");
            }
        }
        Command::Shape { gamma, scan } => {
            let cfg = load_config(scan.common.config.as_deref())?;
            let cfg = match gamma {
                Some(g) => cfg.with_gamma(g)?,
                None => cfg,
            };
            let filter = cfg.filter.ok_or_else(|| {
                Error::param(
                    "gamma",
                    "no filter configured; pass --gamma or set gamma/alpha",
                )
            })?;
            let timing = cfg.timing();
            let reach = 3.0 * timing.tau1 + 3.0 * filter.beta();
            let (_, range) = delay_sweep(
                &cfg,
                Some(&filter),
                &scan,
                (-reach, reach),
                SHAPED_DELAY_SCALE_PER_FS,
                stdout,
            )?;
            let (t_star, rate) = find_peak_delay(&timing, Some(&filter), range, 1e-9)?;
            log::info!("peak rate {rate} at T = {t_star} fs");
        }
        Command::GammaScan {
            common,
            beta,
            delay,
            range,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let beta = beta.map_or(Ok(cfg.beta), |b| quantity("beta", &b, Dimension::Time))?;
            let delay = delay.map_or(Ok(cfg.sweep.fixed_delay), |d| {
                quantity("delay", &d, Dimension::Time)
            })?;
            let range = range.map_or(cfg.sweep.gamma_range, |r| (r[0], r[1]));
            let points = common.points.unwrap_or(cfg.sweep.gamma_points);
            let curve = gamma_scan(&cfg.timing(), beta, delay, range, points, &cfg.quadrature)?;
            emit_curve(&curve, &common, stdout)?;
        }
        Command::Optimize {
            config,
            out,
            bracket,
            beta,
            delay,
            tol,
        } => {
            let cfg = load_config(config.as_deref())?;
            let beta = beta.map_or(Ok(cfg.beta), |b| quantity("beta", &b, Dimension::Time))?;
            let delay = delay.map_or(Ok(cfg.sweep.fixed_delay), |d| {
                quantity("delay", &d, Dimension::Time)
            })?;
            let bracket = bracket.map_or(cfg.sweep.gamma_range, |b| (b[0], b[1]));
            let timing = cfg.timing();
            let r = optimize_gamma(&timing, beta, delay, bracket, tol)?;
            let report = format!(
                "# optimize\n# tau1_fs = {}\n# beta_fs = {beta}\n# delay_fs = {delay}\n# tol = {tol}\n\
                 gamma_star,{:.11e}\nrate_star,{:.11e}\niterations,{}\nbracket_lo,{:.11e}\nbracket_hi,{:.11e}\n",
                timing.tau1, r.gamma_star, r.rate_star, r.iterations, r.bracket.0, r.bracket.1
            );
            emit(&report, out.as_deref(), stdout)?;
        }
        Command::Validate {
            config,
            out,
            samples,
            seed,
        } => {
            let cfg = load_config(config.as_deref())?;
            let report = run_checks(&cfg.timing(), &cfg.quadrature, samples, seed)?;
            let mut text = String::new();
            for c in &report {
                text.push_str(&format!(
                    "{} {}: observed {:.3e}, tolerance {:.0e}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.observed,
                    c.tolerance
                ));
            }
            emit(&text, out.as_deref(), stdout)?;
            let failed = report.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                log::error!("{failed} of {} checks failed", report.len());
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run_command<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(cli, stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_NUMERICAL,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INPUT
            }
        }
    }
}
