//! Operators of the Bessel harmonic analysis applied to test functions:
//! semigroup integrals and their maximal functions, the Riesz transform and
//! its adjoint, square functions, Hardy-type operators and the auxiliary
//! operators that dominate them, plus weighted norms of sampled outputs.

mod hardy;
mod norms;
mod riesz;
mod semigroup;
mod square;

pub use hardy::*;
pub use norms::*;
pub use riesz::*;
pub use semigroup::*;
pub use square::*;

use crate::error::{invalid, Error, Result};
use crate::quad::{adaptive, integrate_measure, QuadResult, QuadratureSpec};
use crate::sampled::SampledFunction;
use rayon::prelude::*;
use std::cell::RefCell;

/// `L^p((0, ∞), x^δ dx)`; `p = ∞` is allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSpace {
    pub p: f64,
    pub delta: f64,
}

impl WeightedSpace {
    pub fn new(p: f64, delta: f64) -> Result<Self> {
        if !(p >= 1.0) || !delta.is_finite() {
            return invalid(format!("weighted space needs p >= 1 and finite delta, got ({p}, {delta})"));
        }
        Ok(WeightedSpace { p, delta })
    }

    /// `p' = p/(p-1)`.
    pub fn conjugate(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else if self.p.is_infinite() {
            1.0
        } else {
            self.p / (self.p - 1.0)
        }
    }
}

/// A value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    fn from_quad(r: QuadResult, floor: f64) -> Result<Estimate> {
        if !r.converged && r.error > 1e-6 * r.value.abs().max(floor) {
            return Err(Error::ToleranceNotMet { estimate: r.value, error: r.error });
        }
        Ok(Estimate { value: r.value, error: r.error })
    }
}

/// How a sampled output is continued beyond its first or last sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    Zero,
    /// Power law through the two outermost samples.
    Extrapolate,
}

/// Operator output sampled at increasing points.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorReport {
    pub operator: String,
    pub input: String,
    pub input_is_indicator: bool,
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest quadrature error estimate over the samples.
    pub max_error: f64,
    pub left: TailPolicy,
    pub right: TailPolicy,
}

impl OperatorReport {
    /// Evaluates `op` at every point (in parallel, collected in order).
    pub fn sample<F>(operator: &str, f: &SampledFunction, xs: &[f64], op: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Estimate> + Sync,
    {
        if xs.len() < 2 || xs.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
            return invalid("report points must be positive and strictly increasing");
        }
        let out: Vec<Estimate> = xs.par_iter().map(|&x| op(x)).collect::<Result<_>>()?;
        Ok(OperatorReport {
            operator: operator.to_string(),
            input: f.describe(),
            input_is_indicator: f.is_indicator(),
            xs: xs.to_vec(),
            values: out.iter().map(|e| e.value).collect(),
            max_error: out.iter().fold(0.0, |m, e| m.max(e.error)),
            left: TailPolicy::Extrapolate,
            right: TailPolicy::Extrapolate,
        })
    }

    /// Report built from values already computed.
    pub fn from_values(operator: &str, input: &str, xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 || xs.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
            return invalid("report points must be positive, strictly increasing and match the values");
        }
        Ok(OperatorReport {
            operator: operator.to_string(),
            input: input.to_string(),
            input_is_indicator: false,
            xs,
            values,
            max_error: 0.0,
            left: TailPolicy::Extrapolate,
            right: TailPolicy::Extrapolate,
        })
    }

    pub fn with_tails(mut self, left: TailPolicy, right: TailPolicy) -> Self {
        self.left = left;
        self.right = right;
        self
    }
}

/// First error raised inside a quadrature integrand.
pub(crate) struct ErrSlot(RefCell<Option<Error>>);

impl ErrSlot {
    pub(crate) fn new() -> Self {
        ErrSlot(RefCell::new(None))
    }

    pub(crate) fn take(&self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                let mut slot = self.0.borrow_mut();
                if slot.is_none() {
                    *slot = Some(e);
                }
                0.0
            }
        }
    }

    pub(crate) fn finish(self) -> Result<()> {
        match self.0.into_inner() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// Breakpoints at `x` and `x ± {1, 4, 12}·w` that are positive.
pub(crate) fn around(x: f64, w: f64) -> Vec<f64> {
    let mut v = vec![x];
    for k in [1.0, 4.0, 12.0] {
        v.push(x + k * w);
        if x - k * w > 0.0 {
            v.push(x - k * w);
        }
    }
    v
}

/// Sup norm of a preset when it is finite, else 0.
pub(crate) fn sup_scale(f: &SampledFunction) -> f64 {
    let s = f.lp_norm(f64::INFINITY, 0.0, &QuadratureSpec::default()).unwrap_or(0.0);
    if s.is_finite() {
        s
    } else {
        0.0
    }
}

/// `∫ K(y) f(y) y^{two_lambda} dy` over `supp f ∩ range`.
///
/// Power cutoffs are integrated in `ln y` with the power folded into the
/// exponential, so extremely small lower cutoffs neither overflow nor lose mass.
#[allow(clippy::too_many_arguments)]
pub(crate) fn apply_kernel<K: Fn(f64) -> f64 + ?Sized>(
    k: &K,
    f: &SampledFunction,
    two_lambda: f64,
    range: (f64, f64),
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> QuadResult {
    let (s_lo, s_hi) = f.support();
    let lo = range.0.max(s_lo);
    let hi = range.1.min(s_hi);
    if !(hi > lo) {
        return QuadResult::ZERO;
    }
    if let SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } = f {
        let la = ln_a.max(lo.ln());
        let lb = ln_b.min(hi.ln());
        if !(lb > la) {
            return QuadResult::ZERO;
        }
        let e = alpha + two_lambda + 1.0;
        let g = |s: f64| {
            let v = k(s.exp());
            if v == 0.0 {
                0.0
            } else {
                v * coef * (e * s).exp()
            }
        };
        let mut pts: Vec<f64> = breaks.iter().filter(|&&b| b > 0.0).map(|b| b.ln()).filter(|&s| s > la && s < lb).collect();
        // graded cover of very long logarithmic ranges
        let mut s = lb - 1.0;
        while s > la && lb - s < 4096.0 {
            pts.push(s);
            s -= (lb - s).max(1.0);
        }
        return adaptive(&g, la, lb, &pts, rel_tol, abs_tol, max_subdiv);
    }
    let g = |y: f64| {
        let fv = f.eval(y);
        if fv == 0.0 {
            0.0
        } else {
            k(y) * fv
        }
    };
    let mut pts: Vec<f64> = breaks.to_vec();
    pts.extend(f.breakpoints());
    let spec = QuadratureSpec { rel_tol, abs_tol, max_subdiv, ..QuadratureSpec::default() };
    integrate_measure(&g, two_lambda, lo, hi, &pts, &spec)
}

/// Sup of `|h|` over log-spaced points of `[t0, t1]`, refined by golden-section
/// search in `ln t` between the neighbours of the best sample.
pub(crate) fn grid_sup<H: Fn(f64) -> Result<f64>>(h: &H, t0: f64, t1: f64, n: usize) -> Result<(f64, f64, bool)> {
    let ts = crate::quad::log_points(t0, t1, n.max(3));
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &t) in ts.iter().enumerate() {
        let v = h(t)?.abs();
        if v > best.1 {
            best = (i, v);
        }
    }
    let i = best.0;
    let on_boundary = i == 0 || i + 1 == ts.len();
    let (mut a, mut b) = (ts[i.saturating_sub(1)].ln(), ts[(i + 1).min(ts.len() - 1)].ln());
    let mut t_best = ts[i];
    let mut v_best = best.1;
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = h(c.exp())?.abs();
    let mut fd = h(d.exp())?.abs();
    for _ in 0..40 {
        if b - a < 1e-7 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = h(c.exp())?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = h(d.exp())?.abs();
        }
    }
    for (s, v) in [(c, fc), (d, fd)] {
        if v > v_best {
            v_best = v;
            t_best = s.exp();
        }
    }
    Ok((v_best, t_best, on_boundary))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sup_finds_interior_peak() {
        let h = |t: f64| Ok(t * (-t).exp());
        let (v, t, edge) = grid_sup(&h, 1e-3, 1e3, 60).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-12);
        assert!((t - 1.0).abs() < 1e-5);
        assert!(!edge);
        let (_, _, edge) = grid_sup(&|t: f64| Ok(1.0 / t), 1.0, 10.0, 10).unwrap();
        assert!(edge);
    }

    #[test]
    fn power_cutoff_integrates_in_log() {
        // ∫ y^{-3} χ_(e^{-900}, 1) y^2 dy = 900
        let f = SampledFunction::power_cutoff_ln(1.0, -3.0, -900.0, 0.0).unwrap();
        let r = apply_kernel(&|_| 1.0, &f, 2.0, (0.0, f64::INFINITY), &[], 1e-12, 1e-300, 2000);
        assert!((r.value - 900.0).abs() < 1e-9);
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(WeightedSpace::new(2.0, 0.0).unwrap().conjugate(), 2.0);
        assert!(WeightedSpace::new(0.5, 0.0).is_err());
    }
}
