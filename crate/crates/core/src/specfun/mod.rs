//! Special functions: unnormalized sinc, Bessel functions of the first kind
//! of integer order, and the sine-integral tail used to close truncated
//! Fourier integrals.

mod bessel;
mod sinc;
mod sine_integral;

pub use bessel::{bessel_j_table, series_truncation_order, BesselTable, MAX_BESSEL_ARGUMENT};
pub use sinc::{sinc, SINC_TAYLOR_THRESHOLD};
pub use sine_integral::{cos_over_square_tail, si_complement};
