//! Legendre polynomials, their recurrences, and Funk–Hecke multipliers of
//! zonal kernels.
//!
//! The distance kernel `|w - v| = sqrt(2 - 2 w.v)` is the one that matters
//! for the quadratic functional `H`; its multipliers have the closed form
//! `-8 / ((2k - 1)(2k + 1)(2k + 3))`, which is positive only at `k = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `P_0(t) ..= P_K(t)` at a single point, optionally with derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct LegendreTable {
    pub max_degree: usize,
    pub t: f64,
    pub values: Vec<f64>,
    pub derivatives: Option<Vec<f64>>,
}

impl LegendreTable {
    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn derivative(&self, k: usize) -> Option<f64> {
        self.derivatives.as_ref().map(|d| d[k])
    }
}

/// Fills `out[k] = P_k(t)` for `k < out.len()` by Bonnet's upward recursion.
///
/// No domain check; callers inside the crate only pass `t` in `[-1, 1]`.
pub fn legendre_values_into(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = t;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * t * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// `P_k(t)` for a single degree.
pub fn legendre_p(k: usize, t: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, t);
    if k == 0 {
        return prev;
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * t * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluates `P_0 ..= P_K` at `t`, with `P'_k` from
/// `P'_{k+1} = (k + 1) P_k + t P'_k` when requested.
pub fn legendre_eval(max_degree: usize, t: f64, with_derivatives: bool) -> Result<LegendreTable> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::OutOfDomain { value: t });
    }
    let mut values = vec![0.0; max_degree + 1];
    legendre_values_into(t, &mut values);
    let derivatives = with_derivatives.then(|| {
        let mut d = vec![0.0; max_degree + 1];
        for k in 0..max_degree {
            d[k + 1] = (k as f64 + 1.0) * values[k] + t * d[k];
        }
        d
    });
    Ok(LegendreTable {
        max_degree,
        t,
        values,
        derivatives,
    })
}

/// Maximum residuals over `1 <= k <= K - 1` of the three derivative identities
///
/// * `(2k+1) P_k = P'_{k+1} - P'_{k-1}`
/// * `(2k+1) P_k = (k+1) P'_{k+1} - (2k+1) t P'_k + k P'_{k-1}`
/// * `P_k = P'_{k+1} - 2t P'_k + P'_{k-1}`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceResiduals {
    pub rec0: f64,
    pub rec1: f64,
    pub rec2: f64,
}

impl RecurrenceResiduals {
    pub fn max(&self) -> f64 {
        self.rec0.max(self.rec1).max(self.rec2)
    }
}

pub fn recurrence_residuals(max_degree: usize, t: f64) -> Result<RecurrenceResiduals> {
    // The identities at k need P'_{k+1}; always tabulate at least degree 2.
    let table = legendre_eval(max_degree.max(2), t, true)?;
    let p = &table.values;
    let d = table.derivatives.as_ref().expect("derivatives requested");
    let mut res = RecurrenceResiduals {
        rec0: 0.0,
        rec1: 0.0,
        rec2: 0.0,
    };
    let last = max_degree.max(2) - 1;
    for k in 1..=last {
        let kf = k as f64;
        let lhs = (2.0 * kf + 1.0) * p[k];
        res.rec0 = res.rec0.max((lhs - (d[k + 1] - d[k - 1])).abs());
        let r1 = (kf + 1.0) * d[k + 1] - (2.0 * kf + 1.0) * t * d[k] + kf * d[k - 1];
        res.rec1 = res.rec1.max((lhs - r1).abs());
        let r2 = d[k + 1] - 2.0 * t * d[k] + d[k - 1];
        res.rec2 = res.rec2.max((p[k] - r2).abs());
    }
    Ok(res)
}

/// Partial sum `sum_{k <= K} P_k(t) r^k` of the generating function.
pub fn generating_partial_sum(max_degree: usize, t: f64, r: f64) -> f64 {
    let mut p = vec![0.0; max_degree + 1];
    legendre_values_into(t, &mut p);
    let mut acc = 0.0;
    let mut rk = 1.0;
    for pk in p {
        acc += pk * rk;
        rk *= r;
    }
    acc
}

/// Closed form `(1 - 2rt + r^2)^{-1/2}` of the generating function.
pub fn generating_function(t: f64, r: f64) -> f64 {
    (1.0 - 2.0 * r * t + r * r).powf(-0.5)
}

/// `A_k = int P_k(t) / sqrt(2 - 2t) dt = 2 / (2k + 1)`.
pub fn a_coefficient(k: usize) -> f64 {
    2.0 / (2.0 * k as f64 + 1.0)
}

/// A continuous function of `t = w.v` on `[-1, 1]`.
pub trait ZonalKernel: Sync {
    fn eval(&self, t: f64) -> f64;

    /// True when the kernel behaves like `sqrt(1 - t)` at `t = 1`, so that the
    /// substitution `t = 1 - 2u^2` makes `kernel * P_k` smooth again.
    fn sqrt_endpoint(&self) -> bool {
        false
    }

    fn label(&self) -> String;
}

/// `phi(t) = sqrt(2 - 2t)`, i.e. the chordal distance `|w - v|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistanceKernel;

impl ZonalKernel for DistanceKernel {
    fn eval(&self, t: f64) -> f64 {
        (2.0 - 2.0 * t).max(0.0).sqrt()
    }

    fn sqrt_endpoint(&self) -> bool {
        true
    }

    fn label(&self) -> String {
        "sqrt(2-2t)".into()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantKernel(pub f64);

impl ZonalKernel for ConstantKernel {
    fn eval(&self, _t: f64) -> f64 {
        self.0
    }

    fn label(&self) -> String {
        format!("const({})", self.0)
    }
}

/// `phi(t) = P_k(t)`.
#[derive(Debug, Clone, Copy)]
pub struct LegendreKernel(pub usize);

impl ZonalKernel for LegendreKernel {
    fn eval(&self, t: f64) -> f64 {
        legendre_p(self.0, t)
    }

    fn label(&self) -> String {
        format!("P_{}", self.0)
    }
}

/// Wraps an arbitrary closure.
pub struct FnKernel<F> {
    pub f: F,
    pub sqrt_endpoint: bool,
    pub label: String,
}

impl<F: Fn(f64) -> f64 + Sync> ZonalKernel for FnKernel<F> {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn sqrt_endpoint(&self) -> bool {
        self.sqrt_endpoint
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

/// Per-degree multipliers `lambda_k = int phi(t) P_k(t) dt` of a zonal kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunkHeckeSpectrum {
    pub kernel: String,
    pub multipliers: Vec<f64>,
}

impl FunkHeckeSpectrum {
    pub fn max_degree(&self) -> usize {
        self.multipliers.len().saturating_sub(1)
    }

    pub fn lambda(&self, k: usize) -> f64 {
        self.multipliers[k]
    }
}

/// `Lambda_k = -8 / ((2k - 1)(2k + 1)(2k + 3))` for `k = 0 ..= K`.
///
/// Obtained from `(2k + 1) Lambda_k = A_{k+1} - A_{k-1}`; at `k = 0` the same
/// expression gives `8/3 = int sqrt(2 - 2t) dt`.
pub fn lambda_closed_form(max_degree: usize) -> FunkHeckeSpectrum {
    let multipliers = (0..=max_degree)
        .map(|k| {
            let k = k as f64;
            -8.0 / ((2.0 * k - 1.0) * (2.0 * k + 1.0) * (2.0 * k + 3.0))
        })
        .collect();
    FunkHeckeSpectrum {
        kernel: DistanceKernel.label(),
        multipliers,
    }
}

/// `int_{-1}^{1} phi(t) P_k(t) dt` by Gauss–Legendre quadrature.
///
/// For kernels flagged with a square-root endpoint the rule is applied in
/// `u` after `t = 1 - 2u^2` (with `n_quad + 1` nodes, since the substitution
/// doubles the polynomial degree).
pub fn funk_hecke_coefficient<K: ZonalKernel + ?Sized>(kernel: &K, k: usize, n_quad: usize) -> Result<f64> {
    if n_quad < k + 1 {
        return Err(crate::error::invalid(
            "n_quad",
            format!("need at least k + 1 = {} nodes, got {n_quad}", k + 1),
        ));
    }
    let mut acc = 0.0;
    if kernel.sqrt_endpoint() {
        let rule = GaussLegendre::new(n_quad + 1)?;
        for (u, w) in rule.mapped(0.0, 1.0) {
            let t = 1.0 - 2.0 * u * u;
            let phi = kernel.eval(t);
            if !phi.is_finite() {
                return Err(Error::NonFinite {
                    context: "zonal kernel",
                });
            }
            acc += w * 4.0 * u * phi * legendre_p(k, t);
        }
    } else {
        let rule = GaussLegendre::new(n_quad)?;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let phi = kernel.eval(t);
            if !phi.is_finite() {
                return Err(Error::NonFinite {
                    context: "zonal kernel",
                });
            }
            acc += w * phi * legendre_p(k, t);
        }
    }
    Ok(acc)
}

/// Multipliers for degrees `0 ..= K` by quadrature.
pub fn funk_hecke_spectrum<K: ZonalKernel + ?Sized>(
    kernel: &K,
    max_degree: usize,
    n_quad: usize,
) -> Result<FunkHeckeSpectrum> {
    let multipliers = (0..=max_degree)
        .map(|k| funk_hecke_coefficient(kernel, k, n_quad.max(k + 1)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FunkHeckeSpectrum {
        kernel: kernel.label(),
        multipliers,
    })
}
