//! Exact contributions of |ν| > A to the frequency integrals.
//!
//! Cutting the integral at a finite A smears every kink of the triangle-sum
//! rate over a delay window of width ~1/A and leaves an O(1/(πK)) bias there.
//! The pieces beyond A are evaluated here instead: harmonic terms in closed
//! form through the sine integral, and the filter term e^{−iγ sin βν} (periodic
//! in ν) through a Laplace representation of 1/ν² summed over periods. The
//! latter uses no Bessel functions, so the direct route stays independent of
//! the series route.

use num_complex::Complex;

use crate::quadrature::{gauss_legendre_10, integrate_partitioned, QuadratureError, Tolerance};
use crate::scalar::Scalar;
use crate::specfun::cos_over_square_tail;

// e^{−45} is far below double-precision resolution of the tail.
const LAPLACE_DECAY: f64 = 45.0;
const MAX_TAIL_PANELS: usize = 20_000;

/// 2∫_A^∞ sinc²(τ₁ν) cos(aν) dν, i.e. the |ν| > A part of
/// ∫ sinc²(τ₁ν) cos(aν) dν over the real line.
pub fn sinc_sq_cos_tail<S: Scalar>(a: S, tau1: S, cutoff: S) -> S {
    let c = |b: S| cos_over_square_tail(b, cutoff);
    let w = S::two() * tau1;
    let quarter = S::lit(0.25);
    S::two() / (tau1 * tau1) * (S::half() * c(a) - quarter * c(a + w) - quarter * c(a - w))
}

/// 2∫_A^∞ sinc²(τ₁ν) cos(2Tν − γ sin βν) dν.
///
/// `abs_tol` bounds the absolute error of the returned value.
pub fn modulated_cos_tail<S: Scalar>(
    delay: S,
    tau1: S,
    gamma: S,
    beta: S,
    cutoff: S,
    abs_tol: S,
) -> Result<S, QuadratureError> {
    let carrier = S::two() * delay;
    if gamma == S::zero() {
        return Ok(sinc_sq_cos_tail(carrier, tau1, cutoff));
    }
    let w = S::two() * tau1;
    let per_term = abs_tol * tau1 * tau1 / S::two();
    let l = |c: S| periodic_tail(c, gamma, beta, cutoff, per_term);
    let quarter = S::lit(0.25);
    let combined = S::half() * l(carrier)? - quarter * l(carrier + w)? - quarter * l(carrier - w)?;
    Ok(S::two() / (tau1 * tau1) * combined)
}

fn expm1_complex<S: Scalar>(z: Complex<S>) -> Complex<S> {
    let (s, c) = z.im.sin_cos();
    let half_sin = (z.im / S::two()).sin();
    Complex::new(
        z.re.exp_m1() * c - S::two() * half_sin * half_sin,
        z.re.exp() * s,
    )
}

/// Re ∫_A^∞ e^{i(cν − γ sin βν)} / ν² dν.
///
/// With 1/ν² = ∫₀^∞ t e^{−νt} dt and the period P = 2π/β of the filter
/// factor, the ν-integral collapses to one period:
///
///   ∫₀^∞ t e^{−At} H(t) / (1 − e^{(ic−t)P}) dt,  H(t) = ∫₀^P F(A+u) e^{−ut} du,
///
/// where F(ν) = e^{i(cν − γ sin βν)}. H is tabulated once on a Gauss grid;
/// the outer t-integral is smooth except for a resonance feature of width
/// |c − kβ| near t = 0, which the adaptive rule resolves.
fn periodic_tail<S: Scalar>(
    c: S,
    gamma: S,
    beta: S,
    cutoff: S,
    abs_tol: S,
) -> Result<S, QuadratureError> {
    let period = S::two() * S::PI() / beta;
    let detuning = c - (c / beta).round() * beta;
    let t_max = S::lit(LAPLACE_DECAY) / cutoff;

    // ≤ 3 rad of phase (or e-folds of e^{−ut}) per 10-point panel.
    let span = (c.abs() + gamma.abs() * beta) * period + period * t_max;
    let panels = (span / S::lit(3.0)).ceil().to_usize().unwrap_or(1) + 1;
    let rule = gauss_legendre_10::<S>();
    let width = period / S::from_count(panels);
    let mut nodes: Vec<(S, Complex<S>)> = Vec::with_capacity(panels * rule.len());
    for p in 0..panels {
        let mid = width * (S::from_count(p) + S::half());
        for &(x, w) in &rule {
            let u = mid + x * width / S::two();
            let nu = cutoff + u;
            let phase = c * nu - gamma * (beta * nu).sin();
            let (s, co) = phase.sin_cos();
            nodes.push((u, Complex::new(co, s) * (w * width / S::two())));
        }
    }

    let outer = |t: S| -> S {
        let h = nodes
            .iter()
            .fold(Complex::new(S::zero(), S::zero()), |acc, &(u, g)| {
                acc + g * (-u * t).exp()
            });
        let denom = -expm1_complex(Complex::new(-t * period, detuning * period));
        (h / denom).re * t * (-cutoff * t).exp()
    };

    // Geometric initial panels resolve the t → 0 end where resonances live.
    let mut breaks = vec![S::zero()];
    let mut edge = t_max * S::lit(1e-6);
    while edge < t_max {
        breaks.push(edge);
        edge = edge * S::lit(4.0);
    }
    breaks.push(t_max);
    let tol = Tolerance {
        abs: abs_tol,
        rel: S::zero(),
    };
    Ok(integrate_partitioned(outer, &breaks, tol, MAX_TAIL_PANELS)?.value)
}
