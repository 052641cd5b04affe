use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest |x| accepted by [`bessel_j_table`]; accuracy is validated up to here.
pub const MAX_BESSEL_ARGUMENT: f64 = 1e3;

// Below this |x| the two-term ascending series is exact to well under 1e-25.
const SERIES_ARGUMENT: f64 = 1e-5;

/// J₀(x), …, J_N(x) at a single argument.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselTable<S> {
    argument: S,
    values: Vec<S>,
}

impl<S: Scalar> BesselTable<S> {
    pub fn order_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn argument(&self) -> S {
        self.argument
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// Jₙ(x), or zero past the end of the table.
    #[inline]
    pub fn get(&self, n: usize) -> S {
        self.values.get(n).copied().unwrap_or_else(S::zero)
    }
}

/// Tabulates Jₙ(x) for n = 0..=`n_max` by Miller's backward recurrence,
/// normalized with J₀ + 2(J₂ + J₄ + …) = 1.
///
/// Negative arguments use Jₙ(−x) = (−1)ⁿ Jₙ(x).
pub fn bessel_j_table<S: Scalar>(n_max: usize, x: S) -> Result<BesselTable<S>> {
    if !x.is_finite() {
        return Err(Error::param("x", "Bessel argument must be finite"));
    }
    if x.abs() > S::lit(MAX_BESSEL_ARGUMENT) {
        return Err(Error::param(
            "x",
            format!(
                "|x| = {} exceeds the validated range {MAX_BESSEL_ARGUMENT}",
                x.abs()
            ),
        ));
    }
    let ax = x.abs();
    let mut values = if ax == S::zero() {
        let mut v = vec![S::zero(); n_max + 1];
        v[0] = S::one();
        v
    } else if ax < S::lit(SERIES_ARGUMENT) {
        ascending_series(n_max, ax)
    } else {
        miller(n_max, ax)
    };
    if x < S::zero() {
        for v in values.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    Ok(BesselTable {
        argument: x,
        values,
    })
}

fn ascending_series<S: Scalar>(n_max: usize, ax: S) -> Vec<S> {
    let h = ax / S::two();
    let q = h * h;
    let mut lead = S::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            lead = lead * h / S::from_count(n);
        }
        let n1 = S::from_count(n + 1);
        let n2 = S::from_count(n + 2);
        out.push(lead * (S::one() - q / n1 + q * q / (S::two() * n1 * n2)));
    }
    out
}

fn start_order(n_max: usize, ax: f64) -> usize {
    let base = (n_max as f64).max(ax.ceil());
    let m = (base + 30.0 + (60.0 * base).sqrt()).ceil() as usize;
    m + (m & 1)
}

fn miller<S: Scalar>(n_max: usize, ax: S) -> Vec<S> {
    let m = start_order(n_max, ax.as_f64());
    let big = S::max_value().sqrt();
    let inv_big = S::one() / big;
    let two_over_x = S::two() / ax;

    // j[k] holds the unnormalized J_k; j[m + 1] = 0 seeds the recurrence.
    let mut j = vec![S::zero(); m + 2];
    j[m] = S::one();
    let mut even_sum = S::zero();
    for k in (1..=m).rev() {
        let next = S::from_count(k) * two_over_x * j[k] - j[k + 1];
        j[k - 1] = next;
        if k % 2 == 0 {
            even_sum = even_sum + j[k];
        }
        if next.abs() > big {
            for v in &mut j[k - 1..] {
                *v = *v * inv_big;
            }
            even_sum = even_sum * inv_big;
        }
    }
    let norm = j[0] + S::two() * even_sum;
    j.truncate(n_max + 1);
    for v in &mut j {
        *v = *v / norm;
    }
    j
}

/// Upper bound on Σ_{n>m} |Jₙ(x)| from |Jₙ(x)| ≤ (|x|/2)ⁿ/n!, valid once
/// m + 2 > |x|/2.
fn tail_bound(m: usize, ax: f64) -> f64 {
    let h = ax / 2.0;
    let ratio = h / (m as f64 + 2.0);
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    let n = (m + 1) as f64;
    let log_term = n * h.ln() - ln_factorial(m + 1);
    log_term.exp() / (1.0 - ratio)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Bessel order N at which the Jacobi–Anger series may be cut.
///
/// Returns the smallest N with Σ_{n≥N} |Jₙ(γ)| < `eps`/10, which certifies
/// Σ_{n>N} |Jₙ(γ)| < `eps` and also makes the last retained term negligible.
/// The tail is summed from a table that extends to an order M where the
/// analytic bound (|γ|/2)ⁿ/n! covers the remainder, so the result is exact
/// rather than a heuristic margin.
pub fn series_truncation_order<S: Scalar>(gamma: S, eps: S) -> usize {
    let ag = gamma.abs().as_f64();
    let target = eps.as_f64() / 10.0;
    assert!(target > 0.0, "truncation tolerance must be positive");
    if ag == 0.0 {
        return 0;
    }
    let mut m = ag.ceil() as usize + 10;
    while tail_bound(m, ag) >= target / 4.0 {
        m += 5;
    }
    let table = bessel_j_table(m, ag).expect("argument validated by caller");
    // Invariant: tail = Σ_{n≥order} |Jₙ|.
    let mut order = m + 1;
    let mut tail = tail_bound(m, ag);
    while order > 0 {
        let extended = tail + table.get(order - 1).abs();
        if extended >= target {
            break;
        }
        tail = extended;
        order -= 1;
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, x: f64) -> Result<BesselTable<f64>> {
        bessel_j_table(n, x)
    }

    // 20-digit references from an arbitrary-precision evaluator.
    const REFERENCE: [(f64, [f64; 4]); 7] = [
        (
            0.5,
            [
                0.938_469_807_240_812_9,
                0.242_268_457_674_873_9,
                8.053_627_241_357_474e-6,
                2.613_177_360_822_803e-13,
            ],
        ),
        (
            1.0,
            [
                0.765_197_686_557_966_6,
                0.440_050_585_744_933_5,
                2.497_577_302_112_344_3e-4,
                2.630_615_123_687_453e-10,
            ],
        ),
        (
            2.0,
            [
                0.223_890_779_141_235_67,
                0.576_724_807_756_873_4,
                7.039_629_755_871_685e-3,
                2.515_386_282_716_737e-7,
            ],
        ),
        (
            4.0,
            [
                -0.397_149_809_863_847_37,
                -0.066_043_328_023_549_14,
                0.132_086_656_047_098_27,
                1.950_405_546_600_345e-4,
            ],
        ),
        (
            7.0,
            [
                0.300_079_270_519_555_6,
                -0.004_682_823_482_345_833,
                0.347_896_324_751_183_3,
                0.023_539_344_388_267_135,
            ],
        ),
        (
            10.0,
            [
                -0.245_935_764_451_348_34,
                0.043_472_746_168_861_44,
                -0.234_061_528_186_793_64,
                0.207_486_106_633_358_86,
            ],
        ),
        (
            20.0,
            [
                0.167_024_664_340_583_15,
                0.066_833_124_175_850_05,
                0.151_169_767_982_394_97,
                0.186_482_558_023_945_1,
            ],
        ),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for (x, expect) in REFERENCE {
            let t = table(10, x).unwrap();
            for (order, want) in [0usize, 1, 5, 10].into_iter().zip(expect) {
                let got = t.get(order);
                assert!(
                    (got - want).abs() < 1e-13,
                    "J{order}({x}) = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn origin_is_kronecker_delta() {
        let t = table(2, 0.0).unwrap();
        assert_eq!(t.values(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn first_zero_of_j0() {
        let t = table(0, 2.404_825_557_695_773).unwrap();
        assert_eq!(t.order_max(), 0);
        assert!(t.get(0).abs() < 1e-10);
    }

    #[test]
    fn three_term_recurrence_holds() {
        let x = 4.0;
        let t = table(8, x).unwrap();
        for n in 1..8 {
            let lhs = t.get(n + 1);
            let rhs = 2.0 * n as f64 / x * t.get(n) - t.get(n - 1);
            assert!((lhs - rhs).abs() < 1e-10, "order {n}");
        }
    }

    #[test]
    fn negative_argument_parity() {
        let p = table(6, 3.3).unwrap();
        let n = table(6, -3.3).unwrap();
        for k in 0..=6 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(n.get(k), sign * p.get(k));
        }
    }

    #[test]
    fn tiny_arguments_use_series() {
        let x = 3e-6;
        let t = table(3, x).unwrap();
        assert!((t.get(0) - (1.0 - x * x / 4.0)).abs() < 1e-20);
        assert!((t.get(1) - x / 2.0 * (1.0 - x * x / 8.0)).abs() < 1e-24);
        // continuity with the recurrence just above the switch
        let a = table(3, SERIES_ARGUMENT * 0.999_999).unwrap();
        let b = table(3, SERIES_ARGUMENT * 1.000_001).unwrap();
        for k in 0..=3 {
            assert!(
                (a.get(k) / b.get(k) - 1.0).abs() < 1e-5,
                "order {k}: {} vs {}",
                a.get(k),
                b.get(k)
            );
        }
    }

    #[test]
    fn large_argument_and_order() {
        let t = table(1200, 1000.0).unwrap();
        let sum: f64 =
            t.values()[0].powi(2) + 2.0 * t.values()[1..].iter().map(|v| v * v).sum::<f64>();
        assert!((sum - 1.0).abs() < 1e-10);
        assert!(t.values().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(table(3, f64::NAN).is_err());
        assert!(table(3, f64::INFINITY).is_err());
        assert!(table(3, 1001.0).is_err());
    }

    #[test]
    fn single_precision_table() {
        let t = bessel_j_table(4, 4.0f32).unwrap();
        assert!((t.get(0) + 0.397_149_8).abs() < 1e-6);
        assert!((t.get(2) - 0.364_128_15).abs() < 1e-6);
    }

    #[test]
    fn truncation_order_examples() {
        assert_eq!(series_truncation_order(0.0, 1e-10), 0);

        let n = series_truncation_order(7.0, 1e-10);
        let t = table(n + 10, 7.0).unwrap();
        assert!(t.get(n).abs() < 1e-11);
        let tail: f64 = (n + 1..=n + 10).map(|k| t.get(k).abs()).sum();
        assert!(tail < 1e-10);
        // minimality: starting the tail one order lower reaches eps/10
        let lower: f64 = (n - 1..=n + 10).map(|k| t.get(k).abs()).sum();
        assert!(lower >= 1e-11);

        let n4 = series_truncation_order(4.0, 1e-6);
        assert!(n4 <= 30);
        let t4 = table(n4 + 10, 4.0).unwrap();
        assert!((n4 + 1..=n4 + 10).map(|k| t4.get(k).abs()).sum::<f64>() < 1e-6);
    }

    #[test]
    fn truncation_order_is_sign_blind() {
        assert_eq!(
            series_truncation_order(-6.5, 1e-12),
            series_truncation_order(6.5, 1e-12)
        );
    }
}
