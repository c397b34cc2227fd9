use super::{OperatorReport, TailPolicy, WeightedSpace};
use crate::error::{invalid, Result};
use crate::quad::gl_fixed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMode {
    Strong,
    Weak,
    /// Weak quasi-norm, only for indicator inputs.
    RestrictedWeak,
}

impl NormMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormMode::Strong => "strong",
            NormMode::Weak => "weak",
            NormMode::RestrictedWeak => "restricted_weak",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// `(γ, measure{|Tf| > γ})` for the weak modes.
    pub levels: Vec<(f64, f64)>,
    pub warning: Option<String>,
}

const LEVELS: usize = 64;

/// Power law `v0 (x/x0)^a` through two samples, or `None` when it is not defined.
fn tail_exponent(x0: f64, v0: f64, x1: f64, v1: f64) -> Option<f64> {
    if v0 == 0.0 || v1 == 0.0 {
        return None;
    }
    Some((v1 / v0).abs().ln() / (x1 / x0).ln())
}

/// `∫_lo^hi x^δ dx` for `0 ≤ lo < hi ≤ ∞`, possibly infinite.
fn weight_measure(lo: f64, hi: f64, delta: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let k = delta + 1.0;
    if k == 0.0 {
        return if lo == 0.0 || hi.is_infinite() { f64::INFINITY } else { (hi / lo).ln() };
    }
    if (lo == 0.0 && k < 0.0) || (hi.is_infinite() && k > 0.0) {
        return f64::INFINITY;
    }
    let top = if hi.is_infinite() { 0.0 } else { hi.powf(k) };
    let bot = if lo == 0.0 { 0.0 } else { lo.powf(k) };
    (top - bot) / k
}

/// `∫ |v0 (x/x0)^a|^p x^δ dx` over `(0, x0)` or `(x0, ∞)`.
fn tail_power_integral(x0: f64, v0: f64, a: f64, p: f64, delta: f64, left: bool) -> f64 {
    let k = a * p + delta + 1.0;
    let c = v0.abs().powf(p) * x0.powf(delta + 1.0);
    // a fitted exponent within rounding of the critical one counts as critical
    let k = if k.abs() < 1e-9 { 0.0 } else { k };
    if left {
        if k > 0.0 {
            c / k
        } else {
            f64::INFINITY
        }
    } else if k < 0.0 {
        c / -k
    } else {
        f64::INFINITY
    }
}

struct Tails {
    left: Option<f64>,
    right: Option<f64>,
}

fn tails(r: &OperatorReport) -> Tails {
    let n = r.xs.len();
    let left = match r.left {
        TailPolicy::Zero => None,
        TailPolicy::Extrapolate => tail_exponent(r.xs[0], r.values[0], r.xs[1], r.values[1]),
    };
    let right = match r.right {
        TailPolicy::Zero => None,
        TailPolicy::Extrapolate => tail_exponent(r.xs[n - 2], r.values[n - 2], r.xs[n - 1], r.values[n - 1]),
    };
    Tails { left, right }
}

/// Interpolant between two samples at fraction `w` of the `ln x` step:
/// geometric when the samples share a sign, linear otherwise.
fn interp(v0: f64, v1: f64, w: f64) -> f64 {
    if v0 * v1 > 0.0 {
        v0 * (v1 / v0).powf(w)
    } else {
        v0 + (v1 - v0) * w
    }
}

/// Norm of a sampled operator output in `L^p(x^δ dx)` or its weak variants.
///
/// Between samples the output is a power law (or linear in `ln x` across a
/// sign change); beyond the ends it follows the report's tail policy.
pub fn norm_estimate(r: &OperatorReport, space: WeightedSpace, mode: NormMode) -> Result<NormEstimate> {
    if r.xs.len() != r.values.len() || r.xs.len() < 2 {
        return invalid("report needs at least two samples");
    }
    if mode == NormMode::RestrictedWeak && !r.input_is_indicator {
        return invalid("restricted weak norm needs an indicator input");
    }
    let t = tails(r);
    if space.p.is_infinite() {
        let mut v = r.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if t.left.is_some_and(|a| a < 0.0) || t.right.is_some_and(|a| a > 0.0) {
            v = f64::INFINITY;
        }
        return Ok(NormEstimate { value: v, levels: Vec::new(), warning: None });
    }
    match mode {
        NormMode::Strong => Ok(NormEstimate { value: strong(r, &t, space), levels: Vec::new(), warning: None }),
        NormMode::Weak | NormMode::RestrictedWeak => Ok(weak(r, &t, space)),
    }
}

fn strong(r: &OperatorReport, t: &Tails, sp: WeightedSpace) -> f64 {
    let (p, d) = (sp.p, sp.delta);
    let n = r.xs.len();
    let mut acc = 0.0;
    for i in 1..n {
        let (s0, s1) = (r.xs[i - 1].ln(), r.xs[i].ln());
        let (v0, v1) = (r.values[i - 1], r.values[i]);
        let g = |s: f64| interp(v0, v1, (s - s0) / (s1 - s0)).abs().powf(p) * (s * (d + 1.0)).exp();
        acc += gl_fixed(&g, s0, s1, 8);
    }
    if let Some(a) = t.left {
        acc += tail_power_integral(r.xs[0], r.values[0], a, p, d, true);
    }
    if let Some(a) = t.right {
        acc += tail_power_integral(r.xs[n - 1], r.values[n - 1], a, p, d, false);
    }
    acc.powf(1.0 / p)
}

/// `x^δ dx`-measure of `{|v| > γ}` for the interpolated output.
fn level_measure(r: &OperatorReport, t: &Tails, delta: f64, gamma: f64) -> f64 {
    let n = r.xs.len();
    let mut m = 0.0;
    for i in 1..n {
        let (s0, s1) = (r.xs[i - 1].ln(), r.xs[i].ln());
        let (v0, v1) = (r.values[i - 1], r.values[i]);
        let seg = if v0 * v1 > 0.0 {
            let (m0, m1) = (v0.abs(), v1.abs());
            let cross = || s0 + (s1 - s0) * (gamma / m0).ln() / (m1 / m0).ln();
            match (m0 > gamma, m1 > gamma) {
                (true, true) => Some((s0, s1)),
                (true, false) => Some((s0, cross())),
                (false, true) => Some((cross(), s1)),
                (false, false) => None,
            }
        } else {
            None
        };
        if let Some((lo, hi)) = seg {
            m += weight_measure(lo.exp(), hi.exp(), delta);
        }
        if v0 * v1 > 0.0 {
            continue;
        }
        // {v > γ} and {v < -γ} are sub-intervals of a linear function
        for sign in [1.0, -1.0] {
            let (a, b) = (sign * v0 - gamma, sign * v1 - gamma);
            let seg = if a > 0.0 && b > 0.0 {
                Some((s0, s1))
            } else if a > 0.0 && b <= 0.0 {
                Some((s0, s0 + (s1 - s0) * a / (a - b)))
            } else if a <= 0.0 && b > 0.0 {
                Some((s0 + (s1 - s0) * a / (a - b), s1))
            } else {
                None
            };
            if let Some((lo, hi)) = seg {
                m += weight_measure(lo.exp(), hi.exp(), delta);
            }
        }
    }
    let (x0, v0) = (r.xs[0], r.values[0].abs());
    if let Some(a) = t.left {
        // v0 (x/x0)^a > γ on part of (0, x0)
        let q = (gamma / v0).ln();
        let (lo, hi) = if a == 0.0 {
            if q < 0.0 {
                (0.0, x0)
            } else {
                (x0, x0)
            }
        } else if a < 0.0 {
            (0.0, (x0 * (q / a).exp()).min(x0))
        } else {
            ((x0 * (q / a).exp()).min(x0), x0)
        };
        m += weight_measure(lo, hi, delta);
    }
    let (xn, vn) = (r.xs[n - 1], r.values[n - 1].abs());
    if let Some(a) = t.right {
        let q = (gamma / vn).ln();
        let (lo, hi) = if a == 0.0 {
            if q < 0.0 {
                (xn, f64::INFINITY)
            } else {
                (xn, xn)
            }
        } else if a < 0.0 {
            (xn, (xn * (q / a).exp()).max(xn))
        } else {
            ((xn * (q / a).exp()).max(xn), f64::INFINITY)
        };
        m += weight_measure(lo, hi, delta);
    }
    m
}

fn weak(r: &OperatorReport, t: &Tails, sp: WeightedSpace) -> NormEstimate {
    let mags: Vec<f64> = r.values.iter().map(|v| v.abs()).filter(|v| *v > 0.0).collect();
    if mags.is_empty() {
        return NormEstimate { value: 0.0, levels: Vec::new(), warning: None };
    }
    let top = mags.iter().fold(0.0f64, |m, v| m.max(*v));
    let bot = mags.iter().fold(f64::INFINITY, |m, v| m.min(*v)).max(top * 1e-300);
    let mut levels = Vec::with_capacity(LEVELS);
    let (mut best, mut arg) = (0.0f64, 0usize);
    for i in 0..LEVELS {
        let frac = i as f64 / (LEVELS - 1) as f64;
        // strictly below the maximum so the top level sees a non-empty set
        let g = bot * (top / bot).powf(frac) * (1.0 - 1e-12);
        let m = level_measure(r, t, sp.delta, g);
        let q = g * m.powf(1.0 / sp.p);
        if q > best {
            best = q;
            arg = i;
        }
        levels.push((g, m));
    }
    let warning = if best > 0.0 && (arg == 0 || arg == LEVELS - 1) {
        Some(format!(
            "weak quasi-norm maximised at the {} level; distribution may be under-resolved",
            if arg == 0 { "lowest" } else { "highest" }
        ))
    } else {
        None
    };
    NormEstimate { value: best, levels, warning }
}
