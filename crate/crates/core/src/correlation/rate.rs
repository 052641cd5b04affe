use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::params::{PhaseFilter, TimingParams};
use crate::quadrature::{integrate_partitioned, uniform_breaks, QuadratureSpec, Tolerance};
use crate::scalar::Scalar;

use super::closed_form::{self, triangle_terms, TriangleTerm};
use super::integrand::{
    modulated_integrand_direct, modulated_integrand_series, unmodulated_integrand,
    JacobiAngerSeries,
};
use super::tail::{modulated_cos_tail, sinc_sq_cos_tail};

/// Discarded Bessel weight allowed when a model builds its own series.
pub const DEFAULT_SERIES_EPS: f64 = 1e-13;

/// How a rate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Quadrature of the filter phase as written.
    Direct,
    /// Quadrature of the Bessel-expanded integrand.
    Series,
    /// Exact triangle sum.
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::Series => "series",
            Method::ClosedForm => "closed-form",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Method::Direct),
            "series" => Ok(Method::Series),
            "closed-form" | "closed_form" => Ok(Method::ClosedForm),
            other => Err(format!(
                "unknown method `{other}` (direct, series, closed-form)"
            )),
        }
    }
}

/// One evaluated rate; `delay` is T = τ + τ₂ in fs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint<S> {
    pub delay: S,
    pub rate: S,
    pub method: Method,
}

/// Everything needed to evaluate the rate at any delay for one
/// (τ₁, filter) pair. Immutable and cheap to share.
#[derive(Debug, Clone)]
pub struct RateModel<S> {
    tau1: S,
    filter: Option<PhaseFilter<S>>,
    series: Option<JacobiAngerSeries<S>>,
    terms: Vec<TriangleTerm<S>>,
}

impl<S: Scalar> RateModel<S> {
    pub fn new(timing: &TimingParams<S>, filter: Option<&PhaseFilter<S>>) -> Result<Self> {
        Self::with_series_eps(timing, filter, S::lit(DEFAULT_SERIES_EPS))
    }

    pub fn with_series_eps(
        timing: &TimingParams<S>,
        filter: Option<&PhaseFilter<S>>,
        eps: S,
    ) -> Result<Self> {
        if !(eps > S::zero()) {
            return Err(Error::param("eps", "series tolerance must be positive"));
        }
        let series = filter
            .map(|f| JacobiAngerSeries::new(f.gamma(), eps))
            .transpose()?;
        Ok(Self::assemble(timing.tau1, filter.copied(), series))
    }

    /// Truncates the Bessel expansion at `order` instead of a tolerance.
    pub fn with_series_order(
        timing: &TimingParams<S>,
        filter: Option<&PhaseFilter<S>>,
        order: usize,
    ) -> Result<Self> {
        let series = filter
            .map(|f| JacobiAngerSeries::with_order(f.gamma(), order))
            .transpose()?;
        Ok(Self::assemble(timing.tau1, filter.copied(), series))
    }

    fn assemble(
        tau1: S,
        filter: Option<PhaseFilter<S>>,
        series: Option<JacobiAngerSeries<S>>,
    ) -> Self {
        let beta = filter.map(|f| f.beta()).unwrap_or_else(S::one);
        let terms = triangle_terms(series.as_ref(), beta);
        RateModel {
            tau1,
            filter,
            series,
            terms,
        }
    }

    pub fn tau1(&self) -> S {
        self.tau1
    }

    pub fn filter(&self) -> Option<&PhaseFilter<S>> {
        self.filter.as_ref()
    }

    pub fn series(&self) -> Option<&JacobiAngerSeries<S>> {
        self.series.as_ref()
    }

    pub fn triangle_terms(&self) -> &[TriangleTerm<S>] {
        &self.terms
    }

    /// Exact normalized rate 1 − Σ wᵢ tri((T − cᵢ)/τ₁).
    pub fn closed_form(&self, delay: S) -> S {
        closed_form::evaluate(&self.terms, delay, self.tau1)
    }

    /// Delays where the closed form changes slope, ascending.
    pub fn breakpoints(&self) -> Vec<S> {
        closed_form::breakpoints(&self.terms, self.tau1)
    }

    /// Beyond this |T| every triangle has left its support and the closed
    /// form is exactly 1.
    pub fn saturation_delay(&self) -> S {
        let reach = self
            .terms
            .iter()
            .filter(|t| t.weight != S::zero())
            .fold(S::zero(), |m, t| m.max(t.center.abs()));
        self.tau1 + reach
    }

    /// Normalized rate by quadrature, before clamping.
    ///
    /// The frequency integral is split at A = K/τ₁: [−A, A] by adaptive
    /// quadrature on panels sized to the fastest oscillation, the remainder
    /// by the exact tail formulas.
    pub fn quadrature(&self, delay: S, method: Method, spec: &QuadratureSpec<S>) -> Result<S> {
        spec.validate()?;
        let tau1 = self.tau1;
        let cutoff = spec.domain_halfwidth_factor / tau1;
        let (gamma, beta) = self
            .filter
            .map(|f| (f.gamma(), f.beta()))
            .unwrap_or((S::zero(), S::zero()));
        let omega = S::two() * delay.abs() + gamma.abs() * beta + S::two() * tau1;
        let cycles = (cutoff * omega / (S::two() * S::PI())).ceil();
        let breaks = uniform_breaks(S::zero(), cutoff, cycles.to_usize().unwrap_or(1) + 1);
        // even integrand: 2∫₀^A, normalized by π/τ₁
        let norm = S::two() * tau1 / S::PI();
        let tol = Tolerance {
            abs: spec.rel_tol * S::lit(0.1),
            rel: spec.rel_tol,
        };
        let tail_tol = spec.rel_tol * S::lit(0.01);

        let (body, oscillating_tail) = match (method, self.filter.as_ref(), self.series.as_ref()) {
            (Method::ClosedForm, _, _) => return Ok(self.closed_form(delay)),
            (_, None, _) => {
                let body = integrate_partitioned(
                    |nu| norm * unmodulated_integrand(nu, delay, tau1),
                    &breaks,
                    tol,
                    spec.max_subdivisions,
                )?;
                (body, sinc_sq_cos_tail(S::two() * delay, tau1, cutoff))
            }
            (Method::Direct, Some(filter), _) => {
                let body = integrate_partitioned(
                    |nu| norm * S::half() * modulated_integrand_direct(nu, delay, tau1, filter),
                    &breaks,
                    tol,
                    spec.max_subdivisions,
                )?;
                let tail = modulated_cos_tail(
                    delay,
                    tau1,
                    gamma,
                    beta,
                    cutoff,
                    tail_tol * S::PI() / tau1,
                )?;
                (body, tail)
            }
            (Method::Series, Some(filter), Some(series)) => {
                let body = integrate_partitioned(
                    |nu| norm * modulated_integrand_series(nu, delay, tau1, filter.beta(), series),
                    &breaks,
                    tol,
                    spec.max_subdivisions,
                )?;
                let tail = self.terms.iter().fold(S::zero(), |acc, t| {
                    acc + t.weight * sinc_sq_cos_tail(S::two() * (delay - t.center), tau1, cutoff)
                });
                (body, tail)
            }
            (Method::Series, Some(_), None) => {
                unreachable!("filtered models always carry a series")
            }
        };
        let tail = (sinc_sq_cos_tail(S::zero(), tau1, cutoff) - oscillating_tail) * tau1 / S::PI();
        Ok(body.value + tail)
    }

    /// Normalized rate at `delay`. Quadrature noise below zero is clamped
    /// (the integrand is pointwise non-negative) and logged.
    pub fn rate(&self, delay: S, method: Method, spec: &QuadratureSpec<S>) -> Result<RatePoint<S>> {
        let mut rate = self.quadrature(delay, method, spec)?;
        if rate < S::zero() {
            log::warn!("clamping negative {method} rate {rate} at T = {delay} fs to 0");
            rate = S::zero();
        }
        Ok(RatePoint {
            delay,
            rate,
            method,
        })
    }
}

/// Normalized coincidence rate at combined delay T = τ + τ₂.
pub fn coincidence_rate<S: Scalar>(
    delay: S,
    timing: &TimingParams<S>,
    filter: Option<&PhaseFilter<S>>,
    spec: &QuadratureSpec<S>,
    method: Method,
) -> Result<RatePoint<S>> {
    RateModel::new(timing, filter)?.rate(delay, method, spec)
}

/// Closed-form rate with the Bessel expansion cut at order `order`.
pub fn coincidence_rate_closed_form<S: Scalar>(
    delay: S,
    timing: &TimingParams<S>,
    filter: Option<&PhaseFilter<S>>,
    order: usize,
) -> Result<RatePoint<S>> {
    let model = RateModel::with_series_order(timing, filter, order)?;
    Ok(RatePoint {
        delay,
        rate: model.closed_form(delay),
        method: Method::ClosedForm,
    })
}
