use num_complex::Complex;

use crate::error::Result;
use crate::params::PhaseFilter;
use crate::scalar::Scalar;
use crate::specfun::{bessel_j_table, series_truncation_order, sinc, BesselTable};

/// sinc²(τ₁ν)(1 − cos 2νT): the unshaped integrand, in [0, 2].
#[inline]
pub fn unmodulated_integrand<S: Scalar>(nu: S, delay: S, tau1: S) -> S {
    let s = sinc(tau1 * nu);
    s * s * (S::one() - (S::two() * nu * delay).cos())
}

/// sinc²(τ₁ν)(2 − 2cos(2νT − γ sin βν)), in [0, 4].
///
/// The filter phase enters through the pair e^{−i2νT}e^{iγ sin βν} and its
/// conjugate, which sum to the single real cosine used here.
#[inline]
pub fn modulated_integrand_direct<S: Scalar>(
    nu: S,
    delay: S,
    tau1: S,
    filter: &PhaseFilter<S>,
) -> S {
    let s = sinc(tau1 * nu);
    let phase = S::two() * nu * delay - filter.gamma() * (filter.beta() * nu).sin();
    s * s * S::two() * (S::one() - phase.cos())
}

/// Bessel weights of the Jacobi–Anger expansion
/// e^{iγ sin θ} = Σₙ Jₙ(γ) e^{inθ}, cut at a certified order.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiAngerSeries<S> {
    gamma: S,
    table: BesselTable<S>,
}

impl<S: Scalar> JacobiAngerSeries<S> {
    /// Keeps enough orders that the discarded weights sum to less than `eps`.
    pub fn new(gamma: S, eps: S) -> Result<Self> {
        Self::with_order(gamma, series_truncation_order(gamma, eps))
    }

    /// Keeps Bessel orders 0..=`order`.
    pub fn with_order(gamma: S, order: usize) -> Result<Self> {
        Ok(JacobiAngerSeries {
            gamma,
            table: bessel_j_table(order, gamma)?,
        })
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// Highest Bessel order retained.
    pub fn order(&self) -> usize {
        self.table.order_max()
    }

    /// Number of harmonic pairs n = 1..=pairs carrying J₂ₙ or J₂ₙ₋₁.
    pub fn pairs(&self) -> usize {
        self.order().div_ceil(2)
    }

    #[inline]
    pub fn j(&self, order: usize) -> S {
        self.table.get(order)
    }
}

/// sinc²(τ₁ν) times the truncated Bessel expansion
/// 1 − J₀cos 2νT − 2ΣJ₂ₙcos(2nβν)cos 2νT − 2ΣJ₂ₙ₋₁sin((2n−1)βν)sin 2νT.
///
/// Equals half of [`modulated_integrand_direct`] up to the truncation tail.
pub fn modulated_integrand_series<S: Scalar>(
    nu: S,
    delay: S,
    tau1: S,
    beta: S,
    series: &JacobiAngerSeries<S>,
) -> S {
    let s = sinc(tau1 * nu);
    let carrier = S::two() * nu * delay;
    let (sin_c, cos_c) = carrier.sin_cos();
    let (sin_b, cos_b) = (beta * nu).sin_cos();
    let step = Complex::new(cos_b, sin_b);
    let mut harmonic = Complex::new(S::one(), S::zero());
    let mut even = S::zero();
    let mut odd = S::zero();
    for k in 1..=series.order() {
        harmonic = harmonic * step;
        let w = series.j(k);
        if k % 2 == 0 {
            even = even + w * harmonic.re;
        } else {
            odd = odd + w * harmonic.im;
        }
    }
    let bracket = S::one() - (series.j(0) + S::two() * even) * cos_c - S::two() * odd * sin_c;
    s * s * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unmodulated_zeros() {
        assert_eq!(unmodulated_integrand(0.37, 0.0, 70.0), 0.0);
        assert_eq!(unmodulated_integrand(0.0, 12.0, 70.0), 0.0);
    }

    #[test]
    fn unmodulated_quarter_point() {
        // T = τ₁, ν = π/(2T): τ₁ν = π/2 and 2νT = π.
        let tau1 = 70.0;
        let nu = PI / (2.0 * tau1);
        let want = (2.0 / PI).powi(2) * 2.0;
        assert!((unmodulated_integrand(nu, tau1, tau1) - want).abs() < 1e-15);
    }

    #[test]
    fn transparent_filter_doubles_unmodulated() {
        let filter = PhaseFilter::from_gamma(0.0, 50.0).unwrap();
        for nu in [-0.3f64, 0.01, 0.2, 1.7] {
            let a = modulated_integrand_direct(nu, 33.0, 70.0, &filter);
            let b = 2.0 * unmodulated_integrand(nu, 33.0, 70.0);
            assert!((a - b).abs() < 1e-15);
        }
        let f = PhaseFilter::from_gamma(5.0, 50.0).unwrap();
        assert_eq!(modulated_integrand_direct(0.0, 33.0, 70.0, &f), 0.0);
    }

    #[test]
    fn direct_peak_value() {
        // Choose T so that 2νT − γ sin βν = π at τ₁ν = π/2.
        let (tau1, beta, gamma) = (70.0, 50.0, 4.0);
        let nu = PI / (2.0 * tau1);
        let delay = (PI + gamma * (beta * nu).sin()) / (2.0 * nu);
        let f = PhaseFilter::from_gamma(gamma, beta).unwrap();
        let got = modulated_integrand_direct(nu, delay, tau1, &f);
        assert!((got - 4.0 * (2.0 / PI).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn series_without_modulation_is_exact() {
        let series = JacobiAngerSeries::new(0.0, 1e-12).unwrap();
        for nu in [0.013, 0.4, 2.2] {
            let a = modulated_integrand_series(nu, 21.0, 70.0, 50.0, &series);
            assert_eq!(a, unmodulated_integrand(nu, 21.0, 70.0));
        }
    }

    #[test]
    fn series_at_zero_delay_has_no_odd_part() {
        let (tau1, beta, gamma) = (70.0, 50.0, 4.0);
        let series = JacobiAngerSeries::new(gamma, 1e-13).unwrap();
        for nu in [0.011, 0.09, 0.5] {
            let mut even = 0.0;
            for n in 1..=series.pairs() {
                even += series.j(2 * n) * (2.0 * n as f64 * beta * nu).cos();
            }
            let want = sinc(tau1 * nu).powi(2) * (1.0 - series.j(0) - 2.0 * even);
            let got = modulated_integrand_series(nu, 0.0, tau1, beta, &series);
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn series_matches_direct_on_grid() {
        let (tau1, beta, gamma) = (70.0, 50.0, 4.0);
        let filter = PhaseFilter::from_gamma(gamma, beta).unwrap();
        let series = JacobiAngerSeries::new(gamma, 1e-12).unwrap();
        for delay in [-130.0, 0.0, 45.0] {
            for i in 0..1000 {
                let nu = -2.0 + 4.0 * i as f64 / 999.0;
                let d = modulated_integrand_direct(nu, delay, tau1, &filter) / 2.0;
                let s = modulated_integrand_series(nu, delay, tau1, beta, &series);
                assert!((d - s).abs() < 1e-9, "nu={nu} T={delay}: {d} vs {s}");
            }
        }
    }
}
