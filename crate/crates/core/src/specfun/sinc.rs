use crate::scalar::Scalar;

/// Below this |x| the Taylor polynomial replaces sin(x)/x; its truncation
/// error there is under 1e-17.
pub const SINC_TAYLOR_THRESHOLD: f64 = 1e-4;

/// Unnormalized sinc, sin(x)/x.
#[inline]
pub fn sinc<S: Scalar>(x: S) -> S {
    if x.abs() < S::lit(SINC_TAYLOR_THRESHOLD) {
        let x2 = x * x;
        S::one() - x2 / S::lit(6.0) + x2 * x2 / S::lit(120.0)
    } else {
        x.sin() / x
    }
}
