//! Adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Panels are kept in a max-heap keyed on their error estimate; the worst
//! panel is bisected until the summed estimate meets the tolerance or the
//! panel budget runs out. Evaluation order is fixed, so results are
//! bit-reproducible.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::scalar::Scalar;

/// Kronrod abscissae on [0, 1]; odd indices are the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_580,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes and weights of the 10-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre_10<S: Scalar>() -> [(S, S); 10] {
    let mut out = [(S::zero(), S::zero()); 10];
    for (i, k) in [1usize, 3, 5, 7, 9].into_iter().enumerate() {
        out[2 * i] = (-S::lit(XGK[k]), S::lit(WG[i]));
        out[2 * i + 1] = (S::lit(XGK[k]), S::lit(WG[i]));
    }
    out
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not converge within {panels} panels: estimate {estimate:e}, error {abs_error:e}")]
    NotConverged {
        estimate: f64,
        abs_error: f64,
        panels: usize,
    },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
    #[error("invalid quadrature setting: {0}")]
    InvalidSpec(String),
}

/// Integration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<S> {
    /// Relative accuracy requested from the adaptive integrator.
    pub rel_tol: S,
    /// K: the frequency integral is evaluated numerically over |ν| ≤ K/τ₁.
    pub domain_halfwidth_factor: S,
    /// Upper bound on the number of panels the integrator may create.
    pub max_subdivisions: usize,
}

impl<S: Scalar> Default for QuadratureSpec<S> {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: S::lit(1e-8),
            domain_halfwidth_factor: S::lit(200.0),
            max_subdivisions: 1_000_000,
        }
    }
}

impl<S: Scalar> QuadratureSpec<S> {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > S::zero() && self.rel_tol.is_finite()) {
            return Err(QuadratureError::InvalidSpec(format!(
                "rel_tol must be > 0, got {}",
                self.rel_tol
            )));
        }
        if !(self.domain_halfwidth_factor >= S::lit(10.0)
            && self.domain_halfwidth_factor.is_finite())
        {
            return Err(QuadratureError::InvalidSpec(format!(
                "domain_halfwidth_factor must be >= 10, got {}",
                self.domain_halfwidth_factor
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec(
                "max_subdivisions must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Convergence target: the summed error estimate must fall below
/// max(`abs`, `rel`·|I|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<S> {
    pub abs: S,
    pub rel: S,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<S> {
    pub value: S,
    pub abs_error: S,
    pub evaluations: usize,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<S> {
    lo: S,
    hi: S,
    value: S,
    error: S,
    abs_value: S,
}

impl<S: Scalar> PartialEq for Panel<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Panel<S> {}
impl<S: Scalar> PartialOrd for Panel<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Panel<S> {
    // Largest error first; ties broken by position for a total, stable order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.lo.partial_cmp(&self.lo).unwrap_or(Ordering::Equal))
    }
}

fn kronrod21<S: Scalar, F: FnMut(S) -> S>(
    f: &mut F,
    lo: S,
    hi: S,
) -> Result<Panel<S>, QuadratureError> {
    let center = S::half() * (lo + hi);
    let half = S::half() * (hi - lo);
    let f_center = f(center);
    let mut res_k = S::lit(WGK[10]) * f_center;
    let mut res_g = S::zero();
    let mut res_abs = res_k.abs();
    let mut values = [(S::zero(), S::zero()); 10];
    for (j, pair) in values.iter_mut().enumerate() {
        let dx = half * S::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        *pair = (f1, f2);
        let w = S::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + S::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(QuadratureError::NonFinite {
            at: center.as_f64(),
        });
    }
    let mean = res_k * S::half();
    let mut res_asc = S::lit(WGK[10]) * (f_center - mean).abs();
    for (j, (f1, f2)) in values.iter().enumerate() {
        res_asc = res_asc + S::lit(WGK[j]) * ((*f1 - mean).abs() + (*f2 - mean).abs());
    }
    let scale = half.abs();
    let res_asc = res_asc * scale;
    let res_abs = res_abs * scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != S::zero() && error != S::zero() {
        let ratio = (S::lit(200.0) * error / res_asc).powf(S::lit(1.5));
        error = res_asc * ratio.min(S::one());
    }
    let eps = S::epsilon();
    if res_abs > S::min_positive_value() / (S::lit(50.0) * eps) {
        error = error.max(S::lit(50.0) * eps * res_abs);
    }
    Ok(Panel {
        lo,
        hi,
        value: res_k * half,
        error,
        abs_value: res_abs,
    })
}

/// Integrates `f` over consecutive panels given by the sorted `breaks`
/// (at least two points), refining adaptively.
pub fn integrate_partitioned<S, F>(
    mut f: F,
    breaks: &[S],
    tol: Tolerance<S>,
    max_panels: usize,
) -> Result<Estimate<S>, QuadratureError>
where
    S: Scalar,
    F: FnMut(S) -> S,
{
    if breaks.len() < 2 {
        return Err(QuadratureError::InvalidSpec(
            "need at least one panel".into(),
        ));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut settled = Vec::new();
    let mut total = S::zero();
    let mut total_err = S::zero();
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let p = kronrod21(&mut f, w[0], w[1])?;
        total = total + p.value;
        total_err = total_err + p.error;
        heap.push(p);
    }
    let mut panels = heap.len();
    let mut evaluations = 21 * panels;
    let target = |value: S| tol.abs.max(tol.rel * value.abs());

    loop {
        if total_err <= target(total) {
            // re-sum to shed drift from the running updates before accepting
            let (v, e) = sum_panels(heap.iter().chain(settled.iter()));
            total = v;
            total_err = e;
            if total_err <= target(total) {
                break;
            }
        }
        let Some(worst) = heap.pop() else {
            // every panel is at the resolution limit; nothing left to refine
            break;
        };
        let mid = S::half() * (worst.lo + worst.hi);
        let width = worst.hi - worst.lo;
        if width <= S::lit(100.0) * S::epsilon() * mid.abs().max(S::min_positive_value()) {
            settled.push(worst);
            continue;
        }
        if panels >= max_panels {
            heap.push(worst);
            let (v, e) = sum_panels(heap.iter().chain(settled.iter()));
            return Err(QuadratureError::NotConverged {
                estimate: v.as_f64(),
                abs_error: e.as_f64(),
                panels,
            });
        }
        let left = kronrod21(&mut f, worst.lo, mid)?;
        let right = kronrod21(&mut f, mid, worst.hi)?;
        evaluations += 42;
        panels += 1;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);
    }
    let (value, abs_error) = sum_panels(heap.iter().chain(settled.iter()));
    Ok(Estimate {
        value,
        abs_error,
        evaluations,
        panels,
    })
}

fn sum_panels<'a, S: Scalar>(panels: impl Iterator<Item = &'a Panel<S>>) -> (S, S) {
    // Sorted summation keeps the total independent of heap layout.
    let mut items: Vec<&Panel<S>> = panels.collect();
    items.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal));
    items.iter().fold((S::zero(), S::zero()), |(v, e), p| {
        (v + p.value, e + p.error)
    })
}

/// Adaptive integral of `f` over [a, b] to `spec.rel_tol` relative accuracy.
///
/// The error target carries an absolute floor at rel_tol times 1e-3 of the
/// estimated ∫|f|, so integrals that cancel to zero still terminate.
pub fn integrate<S, F>(
    mut f: F,
    a: S,
    b: S,
    spec: &QuadratureSpec<S>,
) -> Result<Estimate<S>, QuadratureError>
where
    S: Scalar,
    F: FnMut(S) -> S,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(QuadratureError::InvalidSpec(
            "integration limits must be finite".into(),
        ));
    }
    if a == b {
        return Ok(Estimate {
            value: S::zero(),
            abs_error: S::zero(),
            evaluations: 0,
            panels: 0,
        });
    }
    let (lo, hi, sign) = if a < b {
        (a, b, S::one())
    } else {
        (b, a, -S::one())
    };
    let probe = kronrod21(&mut f, lo, hi)?;
    let tol = Tolerance {
        abs: spec.rel_tol * S::lit(1e-3) * probe.abs_value,
        rel: spec.rel_tol,
    };
    let est = integrate_partitioned(&mut f, &[lo, hi], tol, spec.max_subdivisions)?;
    Ok(Estimate {
        value: sign * est.value,
        evaluations: est.evaluations + 21,
        ..est
    })
}

/// `n` equal panels spanning [a, b], endpoints exact.
pub fn uniform_breaks<S: Scalar>(a: S, b: S, n: usize) -> Vec<S> {
    let n = n.max(1);
    let step = (b - a) / S::from_count(n);
    let mut out: Vec<S> = (0..n).map(|i| a + step * S::from_count(i)).collect();
    out.push(b);
    out
}
