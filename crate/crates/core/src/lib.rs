//! Two-photon coincidence rates of collinear type-II down-converted pairs,
//! with and without a sinusoidal spectral phase filter on one photon.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the precision for the common case.
//!
//! ```
//! use biphoton::{Method, PhaseFilter64, QuadratureSpec64, RateModel64, TimingParams64};
//!
//! let timing = TimingParams64::new(70.0, 1.3e5).unwrap();
//! let filter = PhaseFilter64::from_gamma(4.0, 50.0).unwrap();
//! let model = RateModel64::new(&timing, Some(&filter)).unwrap();
//! let exact = model.closed_form(0.0);
//! let quad = model.rate(0.0, Method::Direct, &QuadratureSpec64::default()).unwrap();
//! assert!((exact - quad.rate).abs() < 1e-6);
//! ```

// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod correlation;
pub mod error;
pub mod experiments;
pub mod io;
pub mod params;
pub mod quadrature;
pub mod scalar;
pub mod specfun;
pub mod validation;

pub use correlation::{
    coincidence_rate, coincidence_rate_closed_form, Method, RateModel, RatePoint,
};
pub use error::{Error, Result};
pub use experiments::{
    delay_scan, find_peak_delay, gamma_scan, optimize_gamma, Curve, OptimizationResult,
};
pub use params::{derive_timing, modulation_gamma, OpticalConfig, PhaseFilter, TimingParams};
pub use quadrature::QuadratureSpec;
pub use scalar::Scalar;

pub type OpticalConfig64 = OpticalConfig<f64>;
pub type TimingParams64 = TimingParams<f64>;
pub type PhaseFilter64 = PhaseFilter<f64>;
pub type QuadratureSpec64 = QuadratureSpec<f64>;
pub type RateModel64 = RateModel<f64>;
pub type Curve64 = Curve<f64>;

pub type OpticalConfig32 = OpticalConfig<f32>;
pub type TimingParams32 = TimingParams<f32>;
pub type PhaseFilter32 = PhaseFilter<f32>;
pub type RateModel32 = RateModel<f32>;
pub type Curve32 = Curve<f32>;
