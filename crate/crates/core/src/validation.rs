//! Cross-method consistency checks run by the `validate` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::{Method, RateModel};
use crate::error::Result;
use crate::experiments::{gamma_scan, optimize_gamma, piecewise_linearity_residual};
use crate::params::{PhaseFilter, TimingParams};
use crate::quadrature::QuadratureSpec;
use crate::specfun::bessel_j_table;

/// One (T, γ, β) test point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tuple {
    pub delay: f64,
    pub gamma: f64,
    pub beta: f64,
}

/// Seeded tuples with γ ∈ [0, 8], β/τ₁ ∈ [0.2, 2], |T| ≤ 4τ₁ + 8β.
pub fn random_tuples(n: usize, seed: u64, tau1: f64) -> Vec<Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let gamma = rng.gen_range(0.0..=8.0);
            let beta = tau1 * rng.gen_range(0.2..=2.0);
            let reach = 4.0 * tau1 + 8.0 * beta;
            let delay = rng.gen_range(-reach..=reach);
            Tuple { delay, gamma, beta }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation.
    pub observed: f64,
    pub tolerance: f64,
}

fn outcome(name: &'static str, observed: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: observed <= tolerance,
        observed,
        tolerance,
    }
}

/// Runs every check on `samples` seeded random tuples. Errors only on
/// numerical failure inside a check.
pub fn run_checks(
    timing: &TimingParams<f64>,
    spec: &QuadratureSpec<f64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<CheckOutcome>> {
    let tau1 = timing.tau1;
    let mut out = Vec::new();

    let bare = RateModel::new(timing, None)?;
    let dip = [(0.0, 0.0), (tau1 / 2.0, 0.5), (tau1, 1.0), (-tau1, 1.0)]
        .iter()
        .map(|&(t, want)| Ok((bare.rate(t, Method::Direct, spec)?.rate - want).abs()))
        .collect::<Result<Vec<_>>>()?;
    out.push(outcome(
        "unmodulated dip by quadrature",
        dip.into_iter().fold(0.0, f64::max),
        1e-4,
    ));

    let (mut series_gap, mut closed_gap) = (0.0f64, 0.0f64);
    for t in random_tuples(samples, seed, tau1) {
        let filter = PhaseFilter::from_gamma(t.gamma, t.beta)?;
        let model = RateModel::new(timing, Some(&filter))?;
        let direct = model.rate(t.delay, Method::Direct, spec)?.rate;
        let series = model.rate(t.delay, Method::Series, spec)?.rate;
        series_gap = series_gap.max((direct - series).abs());
        closed_gap = closed_gap.max((direct - model.closed_form(t.delay)).abs());
    }
    out.push(outcome("direct vs series integrand", series_gap, 1e-6));
    out.push(outcome("quadrature vs closed form", closed_gap, 1e-5));

    let off = PhaseFilter::from_gamma(0.0, 50.0)?;
    let off = RateModel::new(timing, Some(&off))?;
    let mut reduction = 0.0f64;
    for k in 0..=400 {
        let t = -2.0 * tau1 + 4.0 * tau1 * k as f64 / 400.0;
        reduction = reduction.max((off.closed_form(t) - bare.closed_form(t)).abs());
    }
    out.push(outcome("transparent filter reduction", reduction, 1e-9));

    let scan = gamma_scan(timing, tau1, 0.0, (0.0, 10.0), 101, spec)?;
    let mut one_minus_j0 = 0.0f64;
    for &(g, r) in &scan.samples {
        one_minus_j0 = one_minus_j0.max((r - (1.0 - bessel_j_table(0, g)?.get(0))).abs());
    }
    out.push(outcome(
        "zero-delay scan with beta = tau1",
        one_minus_j0,
        1e-9,
    ));

    let mut linear = 0.0f64;
    for g in [4.0, 7.0] {
        let f = PhaseFilter::from_gamma(g, 50.0)?;
        let m = RateModel::new(timing, Some(&f))?;
        linear = linear.max(piecewise_linearity_residual(&m, (-300.0, 300.0)));
    }
    out.push(outcome("closed form piecewise linear", linear, 1e-9));

    let mut sum_rule = 0.0f64;
    for x in [0.5, 1.0, 2.0, 4.0, 7.0, 10.0, 20.0] {
        let table = bessel_j_table(x as usize + 40, x)?;
        let v = table.values();
        let s = v[0] * v[0] + 2.0 * v[1..].iter().map(|j| j * j).sum::<f64>();
        sum_rule = sum_rule.max((s - 1.0).abs());
    }
    out.push(outcome("bessel sum rule", sum_rule, 1e-10));

    let opt = optimize_gamma(timing, tau1, 0.0, (0.0, 10.0), 1e-6)?;
    out.push(outcome(
        "optimizer finds first zero of J1",
        (opt.gamma_star - 3.831_705_970_207_512).abs(),
        1e-3,
    ));

    Ok(out)
}
