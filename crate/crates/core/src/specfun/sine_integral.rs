use num_complex::Complex;

use crate::scalar::Scalar;

const SERIES_LIMIT: f64 = 2.0;
const MAX_ITERATIONS: usize = 500;

/// π/2 − Si(x) = ∫ₓ^∞ sin(t)/t dt for x ≥ 0.
///
/// Power series below x = 2, otherwise the continued fraction for E₁(ix)
/// evaluated with the modified Lentz method.
pub fn si_complement<S: Scalar>(x: S) -> S {
    assert!(x >= S::zero(), "si_complement needs x >= 0, got {x}");
    let eps = S::epsilon();
    if x <= S::lit(SERIES_LIMIT) {
        // Si(x) = Σ (−1)^k x^{2k+1} / ((2k+1)(2k+1)!)
        let x2 = x * x;
        let mut power = x;
        let mut sum = x;
        for k in 1..MAX_ITERATIONS {
            let two_k = S::from_count(2 * k);
            power = -power * x2 / (two_k * (two_k + S::one()));
            let term = power / (two_k + S::one());
            sum = sum + term;
            if term.abs() <= eps * sum.abs() {
                break;
            }
        }
        return S::FRAC_PI_2() - sum;
    }
    let tiny = S::min_positive_value() / eps;
    let mut b = Complex::new(S::one(), x);
    let mut c = Complex::new(S::one() / tiny, S::zero());
    let mut d = b.inv();
    let mut h = d;
    for i in 2..MAX_ITERATIONS {
        let k = S::from_count(i - 1);
        let a = -(k * k);
        b = b + Complex::new(S::two(), S::zero());
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let delta = c * d;
        h = h * delta;
        if (delta.re - S::one()).abs() + delta.im.abs() <= eps {
            break;
        }
    }
    // E₁(ix) = e^{-ix} h = −Ci(x) + i(Si(x) − π/2)
    let e1 = Complex::new(x.cos(), -x.sin()) * h;
    -e1.im
}

/// ∫ₐ^∞ cos(bν)/ν² dν for a > 0.
pub fn cos_over_square_tail<S: Scalar>(b: S, a: S) -> S {
    assert!(a > S::zero(), "lower limit must be positive");
    let ab = b.abs();
    (b * a).cos() / a - ab * si_complement(ab * a)
}
