use crate::scalar::Scalar;

use super::integrand::JacobiAngerSeries;

/// Triangle max(0, 1 − |x|), with an exact zero outside the support.
#[inline]
pub fn tri<S: Scalar>(x: S) -> S {
    let a = x.abs();
    if a >= S::one() {
        S::zero()
    } else {
        S::one() - a
    }
}

/// One shifted triangle of the closed form: the rate loses
/// `weight`·tri((T − `center`)/τ₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleTerm<S> {
    pub weight: S,
    pub center: S,
}

/// Decomposes the normalized rate into 1 − Σ wᵢ tri((T − cᵢ)/τ₁).
///
/// J₂ₙ weights sit symmetrically at ±nβ; J₂ₙ₋₁ weights at ±(2n−1)β/2 carry
/// opposite signs, so the odd part cancels at T = 0.
pub fn triangle_terms<S: Scalar>(
    series: Option<&JacobiAngerSeries<S>>,
    beta: S,
) -> Vec<TriangleTerm<S>> {
    let Some(series) = series else {
        return vec![TriangleTerm {
            weight: S::one(),
            center: S::zero(),
        }];
    };
    let mut terms = Vec::with_capacity(2 * series.order() + 1);
    terms.push(TriangleTerm {
        weight: series.j(0),
        center: S::zero(),
    });
    for n in 1..=series.pairs() {
        let odd_order = 2 * n - 1;
        let w_odd = series.j(odd_order);
        let half_shift = S::from_count(odd_order) * beta / S::two();
        terms.push(TriangleTerm {
            weight: w_odd,
            center: half_shift,
        });
        terms.push(TriangleTerm {
            weight: -w_odd,
            center: -half_shift,
        });
        if 2 * n <= series.order() {
            let w_even = series.j(2 * n);
            let shift = S::from_count(n) * beta;
            terms.push(TriangleTerm {
                weight: w_even,
                center: shift,
            });
            terms.push(TriangleTerm {
                weight: w_even,
                center: -shift,
            });
        }
    }
    terms
}

pub(crate) fn evaluate<S: Scalar>(terms: &[TriangleTerm<S>], delay: S, tau1: S) -> S {
    terms.iter().fold(S::one(), |acc, t| {
        acc - t.weight * tri((delay - t.center) / tau1)
    })
}

/// Sorted, de-duplicated kinks of the piecewise-linear closed form: the apex
/// and both feet of every triangle with non-zero weight.
pub(crate) fn breakpoints<S: Scalar>(terms: &[TriangleTerm<S>], tau1: S) -> Vec<S> {
    let mut out: Vec<S> = terms
        .iter()
        .filter(|t| t.weight != S::zero())
        .flat_map(|t| [t.center - tau1, t.center, t.center + tau1])
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    out.dedup();
    out
}
