//! Coincidence rate of the shaped two-photon wave packet.
//!
//! Three independent evaluation routes are provided and cross-checked:
//!
//! * **direct**: adaptive quadrature of sinc²(τ₁ν)(1 − cos(2νT − γ sin βν)),
//! * **series**: the same integral after the Jacobi–Anger expansion of the
//!   filter phase into Bessel-weighted harmonics,
//! * **closed form**: each harmonic integrated exactly, using that the
//!   Fourier transform of sinc² is a triangle; the rate becomes a weighted sum
//!   of shifted triangles in the delay T.
//!
//! Rates are normalized by the large-delay baseline ∫sinc²(τ₁ν)dν = π/τ₁, so
//! an uncorrelated pair reads 1.

mod closed_form;
mod integrand;
mod rate;
mod tail;

pub use closed_form::{tri, triangle_terms, TriangleTerm};
pub use integrand::{
    modulated_integrand_direct, modulated_integrand_series, unmodulated_integrand,
    JacobiAngerSeries,
};
pub use rate::{
    coincidence_rate, coincidence_rate_closed_form, Method, RateModel, RatePoint,
    DEFAULT_SERIES_EPS,
};
pub use tail::{modulated_cos_tail, sinc_sq_cos_tail};
