//! Sweeps over delay and modulation depth, γ optimization and peak search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlation::{Method, RateModel};
use crate::error::{Error, Result};
use crate::params::{PhaseFilter, TimingParams};
use crate::quadrature::QuadratureSpec;
use crate::scalar::Scalar;

/// Sweep points re-evaluated by quadrature after a closed-form sweep.
pub const SPOT_CHECKS: usize = 5;
/// Allowed closed form vs quadrature disagreement at a spot check.
pub const SPOT_CHECK_TOL: f64 = 1e-5;
const SPOT_CHECK_SEED: u64 = 0x5eed_0fd1;
const COARSE_CELLS: usize = 128;

/// A sampled curve plus the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve<S> {
    pub x_label: String,
    pub y_label: String,
    pub samples: Vec<(S, S)>,
    /// Ordered `key = value` record of every input.
    pub metadata: Vec<(String, String)>,
}

impl<S: Scalar> Curve<S> {
    /// Checks that x is strictly increasing and every value finite.
    pub fn new(
        x_label: impl Into<String>,
        y_label: impl Into<String>,
        samples: Vec<(S, S)>,
        metadata: Vec<(String, String)>,
    ) -> Result<Self> {
        let curve = Curve {
            x_label: x_label.into(),
            y_label: y_label.into(),
            samples,
            metadata,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &(x, y)) in self.samples.iter().enumerate() {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
        }
        if self.samples.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::CurveFormat(
                "abscissae must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn xs(&self) -> impl Iterator<Item = S> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = S> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Sample with the largest y; the smallest x wins ties.
    pub fn argmax(&self) -> Option<(S, S)> {
        self.samples
            .iter()
            .copied()
            .fold(None, |best: Option<(S, S)>, s| match best {
                Some(b) if b.1 >= s.1 => Some(b),
                _ => Some(s),
            })
    }

    /// Sample with the smallest y; the smallest x wins ties.
    pub fn argmin(&self) -> Option<(S, S)> {
        self.samples
            .iter()
            .copied()
            .fold(None, |best: Option<(S, S)>, s| match best {
                Some(b) if b.1 <= s.1 => Some(b),
                _ => Some(s),
            })
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Result of [`optimize_gamma`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult<S> {
    pub gamma_star: S,
    pub rate_star: S,
    pub iterations: usize,
    pub bracket: (S, S),
}

/// n uniformly spaced points from lo to hi inclusive; the last is hi exactly.
pub fn linspace<S: Scalar>(lo: S, hi: S, n: usize) -> Vec<S> {
    let last = S::from_count(n - 1);
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * S::from_count(i) / last
            }
        })
        .collect()
}

fn check_range<S: Scalar>(name: &'static str, (lo, hi): (S, S), n_points: usize) -> Result<()> {
    if n_points < 2 {
        return Err(Error::param("points", "need at least 2 points"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(
            name,
            format!("range [{lo}, {hi}] must be finite and increasing"),
        ));
    }
    Ok(())
}

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

// shortest round-trip form, exponent notation for tiny and huge values
fn num<S: Scalar>(key: &str, value: S) -> (String, String) {
    (key.to_string(), format!("{value:?}"))
}

fn common_metadata<S: Scalar>(
    timing: &TimingParams<S>,
    spec: &QuadratureSpec<S>,
    method: Method,
) -> Vec<(String, String)> {
    vec![
        num("tau1_fs", timing.tau1),
        num("tau2_fs", timing.tau2),
        kv("method", method),
        num("rel_tol", spec.rel_tol),
        num("domain_halfwidth_factor", spec.domain_halfwidth_factor),
        kv("max_subdivisions", spec.max_subdivisions),
    ]
}

fn to_f64_filter<S: Scalar>(f: &PhaseFilter<S>) -> Result<PhaseFilter<f64>> {
    PhaseFilter::from_gamma(f.gamma().as_f64(), f.beta().as_f64())
}

/// Re-evaluates a few seeded sweep points by direct quadrature in double
/// precision and fails if any disagrees with the closed-form value.
fn spot_check<S: Scalar>(
    points: &[(S, S, Option<PhaseFilter<S>>)],
    timing: &TimingParams<S>,
    spec: &QuadratureSpec<S>,
) -> Result<()> {
    let timing = TimingParams::new(timing.tau1.as_f64(), timing.tau2.as_f64())?;
    let spec = QuadratureSpec {
        rel_tol: spec.rel_tol.as_f64(),
        domain_halfwidth_factor: spec.domain_halfwidth_factor.as_f64(),
        max_subdivisions: spec.max_subdivisions,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_CHECK_SEED);
    for _ in 0..SPOT_CHECKS.min(points.len()) {
        let (delay, closed, filter) = &points[rng.gen_range(0..points.len())];
        let filter = filter.as_ref().map(to_f64_filter).transpose()?;
        let model = RateModel::new(&timing, filter.as_ref())?;
        let quad = model.rate(delay.as_f64(), Method::Direct, &spec)?.rate;
        let closed = closed.as_f64();
        log::debug!("spot check T = {delay} fs: closed form {closed}, quadrature {quad}");
        if !((quad - closed).abs() <= SPOT_CHECK_TOL) {
            return Err(Error::SpotCheck {
                abscissa: delay.as_f64(),
                closed_form: closed,
                quadrature: quad,
            });
        }
    }
    Ok(())
}

/// Normalized rate against τ' = scale·T over `range` (in T, fs), by the
/// closed form with quadrature spot checks.
pub fn delay_scan<S: Scalar>(
    timing: &TimingParams<S>,
    filter: Option<&PhaseFilter<S>>,
    range: (S, S),
    n_points: usize,
    spec: &QuadratureSpec<S>,
    scale: S,
) -> Result<Curve<S>> {
    delay_scan_with(
        timing,
        filter,
        range,
        n_points,
        spec,
        scale,
        Method::ClosedForm,
    )
}

/// [`delay_scan`] with an explicit evaluation method. Only closed-form
/// sweeps are spot checked.
pub fn delay_scan_with<S: Scalar>(
    timing: &TimingParams<S>,
    filter: Option<&PhaseFilter<S>>,
    range: (S, S),
    n_points: usize,
    spec: &QuadratureSpec<S>,
    scale: S,
    method: Method,
) -> Result<Curve<S>> {
    check_range("delay_range", range, n_points)?;
    if !(scale > S::zero() && scale.is_finite()) {
        return Err(Error::param("delay_scale", "must be positive"));
    }
    spec.validate()?;
    let model = RateModel::new(timing, filter)?;
    let mut points = Vec::with_capacity(n_points);
    for delay in linspace(range.0, range.1, n_points) {
        let rate = model.rate(delay, method, spec)?.rate;
        points.push((delay, rate, filter.copied()));
    }
    if method == Method::ClosedForm {
        spot_check(&points, timing, spec)?;
    }

    let mut metadata = vec![kv("scan", "delay")];
    metadata.extend(common_metadata(timing, spec, method));
    match filter {
        Some(f) => {
            metadata.push(num("gamma", f.gamma()));
            metadata.push(num("beta_fs", f.beta()));
            if let Some(alpha) = f.alpha() {
                metadata.push(num("alpha", alpha));
            }
            metadata.push(kv("bessel_order", model.series().map_or(0, |s| s.order())));
        }
        None => metadata.push(kv("filter", "none")),
    }
    metadata.extend([
        num("delay_min_fs", range.0),
        num("delay_max_fs", range.1),
        kv("points", n_points),
        num("delay_scale_per_fs", scale),
    ]);
    let samples = points.iter().map(|&(t, r, _)| (scale * t, r)).collect();
    Curve::new("tau_prime", "rate", samples, metadata)
}

/// Normalized rate at fixed delay against γ, by the closed form with
/// quadrature spot checks.
pub fn gamma_scan<S: Scalar>(
    timing: &TimingParams<S>,
    beta: S,
    delay: S,
    gamma_range: (S, S),
    n_points: usize,
    spec: &QuadratureSpec<S>,
) -> Result<Curve<S>> {
    check_range("gamma_range", gamma_range, n_points)?;
    spec.validate()?;
    let mut points = Vec::with_capacity(n_points);
    for gamma in linspace(gamma_range.0, gamma_range.1, n_points) {
        let filter = PhaseFilter::from_gamma(gamma, beta)?;
        let rate = RateModel::new(timing, Some(&filter))?.closed_form(delay);
        points.push((delay, rate, Some(filter)));
    }
    spot_check(&points, timing, spec)?;

    let mut metadata = vec![kv("scan", "gamma")];
    metadata.extend(common_metadata(timing, spec, Method::ClosedForm));
    metadata.extend([
        num("beta_fs", beta),
        num("delay_fs", delay),
        num("gamma_min", gamma_range.0),
        num("gamma_max", gamma_range.1),
        kv("points", n_points),
    ]);
    let samples = points
        .iter()
        .map(|(_, r, f)| (f.unwrap().gamma(), *r))
        .collect();
    Curve::new("gamma", "rate", samples, metadata)
}

fn rate_at_gamma<S: Scalar>(timing: &TimingParams<S>, beta: S, delay: S, gamma: S) -> Result<S> {
    let filter = PhaseFilter::from_gamma(gamma, beta)?;
    Ok(RateModel::new(timing, Some(&filter))?.closed_form(delay))
}

fn ties<S: Scalar>(a: S, b: S) -> bool {
    (a - b).abs() <= S::lit(4.0) * S::epsilon() * S::one().max(a.abs()).max(b.abs())
}

/// Maximizes the closed-form rate at fixed delay over γ in `bracket`.
///
/// A coarse scan locates the best cell, golden-section search refines it to
/// `tol`, and the refined point competes with the coarse samples and both
/// bracket ends. Equal rates resolve to the smallest γ.
pub fn optimize_gamma<S: Scalar>(
    timing: &TimingParams<S>,
    beta: S,
    delay: S,
    bracket: (S, S),
    tol: S,
) -> Result<OptimizationResult<S>> {
    let (lo, hi) = bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(
            "bracket",
            format!("[{lo}, {hi}] must have positive width"),
        ));
    }
    if !(tol > S::zero()) {
        return Err(Error::param("tol", "must be positive"));
    }
    let f = |g: S| rate_at_gamma(timing, beta, delay, g);

    let grid = linspace(lo, hi, COARSE_CELLS + 1);
    let mut values = Vec::with_capacity(grid.len());
    for &g in &grid {
        values.push(f(g)?);
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] && !ties(v, values[best]) {
            best = i;
        }
    }

    let (mut a, mut b) = (
        grid[best.saturating_sub(1)],
        grid[(best + 1).min(COARSE_CELLS)],
    );
    let inv_phi = (S::lit(5.0).sqrt() - S::one()) / S::two();
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut iterations = 0;
    while b - a > tol / S::two() {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let refined = if fc >= fd { c } else { d };

    let mut candidates: Vec<(S, S)> = grid.iter().copied().zip(values.iter().copied()).collect();
    candidates.push((refined, f(refined)?));
    candidates.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite"));
    let (gamma_star, rate_star) = pick_max(&candidates);
    Ok(OptimizationResult {
        gamma_star,
        rate_star,
        iterations,
        bracket,
    })
}

/// Largest value in abscissa-sorted pairs; ties go to the earliest.
fn pick_max<S: Scalar>(sorted: &[(S, S)]) -> (S, S) {
    let mut best = sorted[0];
    for &p in &sorted[1..] {
        if p.1 > best.1 && !ties(p.1, best.1) {
            best = p;
        }
    }
    best
}

/// Global maximum of the closed-form rate over `range` (fs).
///
/// The rate is piecewise linear in T, so only the kinks inside the range and
/// the two ends are evaluated. Candidates closer than `tol` are merged.
/// Ties resolve to the smallest delay.
pub fn find_peak_delay<S: Scalar>(
    timing: &TimingParams<S>,
    filter: Option<&PhaseFilter<S>>,
    range: (S, S),
    tol: S,
) -> Result<(S, S)> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::param(
            "search_range",
            format!("[{lo}, {hi}] must be ordered"),
        ));
    }
    if !(tol >= S::zero()) {
        return Err(Error::param("tol", "must be non-negative"));
    }
    let model = RateModel::new(timing, filter)?;
    let mut delays = vec![lo];
    delays.extend(
        model
            .breakpoints()
            .into_iter()
            .filter(|&t| t > lo && t < hi),
    );
    delays.push(hi);

    let mut candidates: Vec<(S, S)> = Vec::with_capacity(delays.len());
    for t in delays {
        let r = model.closed_form(t);
        match candidates.last_mut() {
            Some(prev) if t - prev.0 <= tol => {
                if r > prev.1 && !ties(r, prev.1) {
                    *prev = (t, r);
                }
            }
            _ => candidates.push((t, r)),
        }
    }
    Ok(pick_max(&candidates))
}

/// Largest deviation from a straight line of the closed-form rate sampled
/// at three interior points of every segment between consecutive kinks in
/// `range`. Zero for an exactly piecewise-linear rate.
pub fn piecewise_linearity_residual<S: Scalar>(model: &RateModel<S>, range: (S, S)) -> S {
    let mut knots = vec![range.0];
    knots.extend(
        model
            .breakpoints()
            .into_iter()
            .filter(|&t| t > range.0 && t < range.1),
    );
    knots.push(range.1);
    let mut worst = S::zero();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let xs = [S::lit(0.25), S::half(), S::lit(0.75)].map(|u| a + u * (b - a));
        let ys = xs.map(|x| model.closed_form(x));
        // least-squares line through three equally spaced points
        let mean = (ys[0] + ys[1] + ys[2]) / S::lit(3.0);
        let slope = (ys[2] - ys[0]) / S::two();
        for (k, y) in ys.iter().enumerate() {
            let fit = mean + slope * (S::from_count(k) - S::one());
            worst = worst.max((*y - fit).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing() -> TimingParams<f64> {
        TimingParams::new(70.0, 1.3e5).unwrap()
    }

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec::default()
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-140.0, 140.0, 401);
        assert_eq!(v[0], -140.0);
        assert_eq!(v[200], 0.0);
        assert_eq!(v[400], 140.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unmodulated_dip_is_a_v() {
        let scale = crate::params::DIP_DELAY_SCALE_PER_FS;
        let c = delay_scan(&timing(), None, (-140.0, 140.0), 281, &spec(), scale).unwrap();
        let (x0, y0) = c.argmin().unwrap();
        assert_eq!((x0, y0), (0.0, 0.0));
        for &(x, y) in &c.samples {
            let t = x / scale;
            let want = (t.abs() / 70.0).min(1.0);
            assert!((y - want).abs() < 1e-12, "T={t}");
        }
        assert_eq!(c.metadata_value("filter"), Some("none"));
    }

    #[test]
    fn transparent_filter_scan_matches_unfiltered() {
        let f = PhaseFilter::from_gamma(0.0, 50.0).unwrap();
        let a = delay_scan(&timing(), None, (-200.0, 200.0), 101, &spec(), 0.2).unwrap();
        let b = delay_scan(&timing(), Some(&f), (-200.0, 200.0), 101, &spec(), 0.2).unwrap();
        for (p, q) in a.samples.iter().zip(&b.samples) {
            assert_eq!(p.0, q.0);
            assert!((p.1 - q.1).abs() < 1e-9);
        }
    }

    #[test]
    fn scan_methods_agree() {
        let f = PhaseFilter::from_gamma(4.0, 50.0).unwrap();
        let r = (-360.0, 360.0);
        let a =
            delay_scan_with(&timing(), Some(&f), r, 37, &spec(), 0.2, Method::ClosedForm).unwrap();
        let b = delay_scan_with(&timing(), Some(&f), r, 37, &spec(), 0.2, Method::Direct).unwrap();
        for (p, q) in a.samples.iter().zip(&b.samples) {
            assert!((p.1 - q.1).abs() < 1e-5);
        }
    }

    #[test]
    fn scan_rejects_bad_input() {
        assert!(delay_scan(&timing(), None, (0.0, 1.0), 1, &spec(), 1.0).is_err());
        assert!(delay_scan(&timing(), None, (1.0, 0.0), 5, &spec(), 1.0).is_err());
        assert!(delay_scan(&timing(), None, (0.0, 1.0), 5, &spec(), 0.0).is_err());
        assert!(gamma_scan(&timing(), 50.0, 0.0, (2.0, 2.0), 5, &spec()).is_err());
    }

    #[test]
    fn gamma_scan_at_zero_delay() {
        let c = gamma_scan(&timing(), 50.0, 0.0, (0.0, 8.0), 81, &spec()).unwrap();
        assert!(c.samples[0].1.abs() < 1e-15);
        let at4 = c.samples[40];
        assert_eq!(at4.0, 4.0);
        assert!((at4.1 - 1.189_076_583_662_663).abs() < 1e-12);
    }

    #[test]
    fn gamma_scan_wide_shift_is_one_minus_j0() {
        let c = gamma_scan(&timing(), 70.0, 0.0, (0.0, 10.0), 41, &spec()).unwrap();
        for &(g, r) in &c.samples {
            let j0 = crate::specfun::bessel_j_table(0, g).unwrap().get(0);
            assert!((r - (1.0 - j0)).abs() < 1e-9);
        }
    }

    #[test]
    fn optimizer_boundary_and_interior() {
        let t = timing();
        let edge = optimize_gamma(&t, 70.0, 0.0, (0.0, 0.5), 1e-6).unwrap();
        assert_eq!(edge.gamma_star, 0.5);
        let inner = optimize_gamma(&t, 70.0, 0.0, (0.0, 10.0), 1e-7).unwrap();
        assert!((inner.gamma_star - 3.831_705_970_207_512).abs() < 1e-6);
        assert!(inner.iterations > 0);
        assert_eq!(inner.bracket, (0.0, 10.0));
        let again = optimize_gamma(&t, 70.0, 0.0, (0.0, 10.0), 1e-7).unwrap();
        assert_eq!(inner, again);
    }

    #[test]
    fn optimizer_plateau_takes_smallest_gamma() {
        // far outside every triangle the rate is 1 for all γ
        let r = optimize_gamma(&timing(), 20.0, 5000.0, (1.0, 3.0), 1e-6).unwrap();
        assert_eq!((r.gamma_star, r.rate_star), (1.0, 1.0));
    }

    #[test]
    fn optimizer_rejects_degenerate_bracket() {
        assert!(optimize_gamma(&timing(), 70.0, 0.0, (2.0, 2.0), 1e-6).is_err());
        assert!(optimize_gamma(&timing(), 70.0, 0.0, (0.0, 2.0), 0.0).is_err());
    }

    #[test]
    fn peak_search() {
        let t = timing();
        let (t0, r0) = find_peak_delay(&t, None, (-140.0, 140.0), 1e-9).unwrap();
        assert_eq!((t0, r0), (-140.0, 1.0));
        let f4 = PhaseFilter::from_gamma(4.0, 50.0).unwrap();
        let f7 = PhaseFilter::from_gamma(7.0, 50.0).unwrap();
        let p4 = find_peak_delay(&t, Some(&f4), (-300.0, 300.0), 1e-9).unwrap();
        let p7 = find_peak_delay(&t, Some(&f7), (-300.0, 300.0), 1e-9).unwrap();
        assert_eq!(p4.0, 0.0);
        assert_eq!(p7.0, 55.0);
        let single = find_peak_delay(&t, Some(&f7), (12.5, 12.5), 1e-9).unwrap();
        let m = RateModel::new(&t, Some(&f7)).unwrap();
        assert_eq!(single, (12.5, m.closed_form(12.5)));
    }

    #[test]
    fn closed_form_is_piecewise_linear() {
        for g in [1.0, 4.0, 7.0] {
            let f = PhaseFilter::from_gamma(g, 50.0).unwrap();
            let m = RateModel::new(&timing(), Some(&f)).unwrap();
            assert!(piecewise_linearity_residual(&m, (-300.0, 300.0)) < 1e-12);
        }
    }

    #[test]
    fn curve_validation() {
        let meta = Vec::new();
        assert!(Curve::new("x", "y", vec![(0.0, 1.0), (0.0, 2.0)], meta.clone()).is_err());
        assert!(matches!(
            Curve::new("x", "y", vec![(0.0, 1.0), (1.0, f64::NAN)], meta.clone()),
            Err(Error::NonFinite { index: 1 })
        ));
        let c = Curve::new("x", "y", vec![(0.0, 1.0), (1.0, 1.0), (2.0, 0.5)], meta).unwrap();
        assert_eq!(c.argmax(), Some((0.0, 1.0)));
        assert_eq!(c.argmin(), Some((2.0, 0.5)));
    }
}
