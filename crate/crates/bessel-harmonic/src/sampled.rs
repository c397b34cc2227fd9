//! Test functions on `(0, ∞)`: exact analytic presets and log-grid samples.

use crate::error::{invalid, Error, Result};
use crate::quad::{adaptive, integrate_measure, QuadratureSpec};

/// Extrapolation used outside the sampled range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    Zero,
    /// `f(x) = f(x_end) (x / x_end)^exponent`.
    Power(f64),
}

/// Samples on a strictly increasing positive grid, interpolated in `ln x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSamples {
    ln_x: Vec<f64>,
    values: Vec<f64>,
    /// 1 = linear, 3 = four-point cubic Lagrange.
    pub order: u8,
    pub left: Tail,
    pub right: Tail,
}

impl GridSamples {
    pub fn new(xs: &[f64], values: &[f64], order: u8, left: Tail, right: Tail) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 4 {
            return invalid("grid samples need at least 4 matching points");
        }
        if xs.windows(2).any(|w| !(w[0] > 0.0 && w[1] > w[0])) {
            return invalid("grid abscissae must be positive and strictly increasing");
        }
        if order != 1 && order != 3 {
            return invalid(format!("interpolation order {order} not in {{1, 3}}"));
        }
        Ok(GridSamples { ln_x: xs.iter().map(|x| x.ln()).collect(), values: values.to_vec(), order, left, right })
    }

    pub fn ln_x(&self) -> &[f64] {
        &self.ln_x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_min(&self) -> f64 {
        self.ln_x[0].exp()
    }

    pub fn x_max(&self) -> f64 {
        self.ln_x[self.ln_x.len() - 1].exp()
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.ln_x.len();
        let lx = x.ln();
        if lx < self.ln_x[0] {
            return match self.left {
                Tail::Zero => 0.0,
                Tail::Power(e) => self.values[0] * (e * (lx - self.ln_x[0])).exp(),
            };
        }
        if lx > self.ln_x[n - 1] {
            return match self.right {
                Tail::Zero => 0.0,
                Tail::Power(e) => self.values[n - 1] * (e * (lx - self.ln_x[n - 1])).exp(),
            };
        }
        let i = match self.ln_x.binary_search_by(|p| p.total_cmp(&lx)) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        if self.order == 1 {
            let w = (lx - self.ln_x[i]) / (self.ln_x[i + 1] - self.ln_x[i]);
            return self.values[i] * (1.0 - w) + self.values[i + 1] * w;
        }
        let s = i.saturating_sub(1).min(n - 4);
        let mut out = 0.0;
        for j in s..s + 4 {
            let mut w = 1.0;
            for k in s..s + 4 {
                if k != j {
                    w *= (lx - self.ln_x[k]) / (self.ln_x[j] - self.ln_x[k]);
                }
            }
            out += w * self.values[j];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SampledFunction {
    /// `χ_(a,b)`, `0 ≤ a < b ≤ ∞`.
    Indicator {
        a: f64,
        b: f64,
    },
    /// `exp(1 - 1/(1 - s²))` with `s = (y - center)/width`, peak value 1.
    SmoothBump {
        center: f64,
        width: f64,
    },
    /// `coef · y^alpha · χ_(a,b)` with the endpoints stored as logarithms so
    /// that very small cutoffs stay representable.
    PowerCutoff {
        coef: f64,
        alpha: f64,
        ln_a: f64,
        ln_b: f64,
    },
    Grid(GridSamples),
    Constant(f64),
}

impl SampledFunction {
    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a) {
            return invalid(format!("indicator needs 0 <= a < b, got ({a}, {b})"));
        }
        Ok(SampledFunction::Indicator { a, b })
    }

    pub fn smooth_bump(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0 && center - width >= 0.0 && center.is_finite()) {
            return invalid(format!("bump ({center}, {width}) must lie in [0, inf)"));
        }
        Ok(SampledFunction::SmoothBump { center, width })
    }

    pub fn power_cutoff(coef: f64, alpha: f64, a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b > a && b.is_finite()) {
            return invalid(format!("power cutoff needs 0 <= a < b < inf, got ({a}, {b})"));
        }
        Self::power_cutoff_ln(coef, alpha, a.ln(), b.ln())
    }

    pub fn power_cutoff_ln(coef: f64, alpha: f64, ln_a: f64, ln_b: f64) -> Result<Self> {
        if !(ln_b > ln_a) || ln_b.is_nan() || !ln_b.is_finite() {
            return invalid("power cutoff endpoints out of order");
        }
        Ok(SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b })
    }

    pub fn eval(&self, y: f64) -> f64 {
        match self {
            SampledFunction::Indicator { a, b } => {
                if y > *a && y < *b {
                    1.0
                } else {
                    0.0
                }
            }
            SampledFunction::SmoothBump { center, width } => {
                let s = (y - center) / width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                }
            }
            SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } => {
                let ly = y.ln();
                if ly > *ln_a && ly < *ln_b {
                    coef * (alpha * ly).exp()
                } else {
                    0.0
                }
            }
            SampledFunction::Grid(g) => g.eval(y),
            SampledFunction::Constant(c) => *c,
        }
    }

    /// Closed interval outside of which the function vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SampledFunction::Indicator { a, b } => (*a, *b),
            SampledFunction::SmoothBump { center, width } => (center - width, center + width),
            SampledFunction::PowerCutoff { ln_a, ln_b, .. } => (ln_a.exp(), ln_b.exp()),
            SampledFunction::Grid(g) => {
                (if g.left == Tail::Zero { g.x_min() } else { 0.0 }, if g.right == Tail::Zero { g.x_max() } else { f64::INFINITY })
            }
            SampledFunction::Constant(_) => (0.0, f64::INFINITY),
        }
    }

    /// Points where the function or its derivatives jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SampledFunction::Indicator { a, b } => [*a, *b].into_iter().filter(|v| *v > 0.0 && v.is_finite()).collect(),
            SampledFunction::SmoothBump { center, width } => vec![center - width, *center, center + width],
            SampledFunction::PowerCutoff { ln_a, ln_b, .. } => [ln_a.exp(), ln_b.exp()].into_iter().filter(|v| *v > 0.0).collect(),
            SampledFunction::Grid(g) => {
                let n = g.ln_x.len();
                let step = (n / 32).max(1);
                let mut v: Vec<f64> = g.ln_x.iter().step_by(step).map(|l| l.exp()).collect();
                v.push(g.x_max());
                v
            }
            SampledFunction::Constant(_) => Vec::new(),
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, SampledFunction::Indicator { .. })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SampledFunction::Constant(c) if *c == 0.0)
    }

    pub fn describe(&self) -> String {
        match self {
            SampledFunction::Indicator { a, b } => format!("indicator({a},{b})"),
            SampledFunction::SmoothBump { center, width } => format!("bump({center},{width})"),
            SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } => {
                format!("power({coef},{alpha},exp({ln_a}),exp({ln_b}))")
            }
            SampledFunction::Grid(g) => format!("grid({} points)", g.ln_x.len()),
            SampledFunction::Constant(c) => format!("constant({c})"),
        }
    }

    /// `∫_a^b f y^{2λ} dy` in closed form when the preset allows it.
    pub fn weighted_integral_exact(&self, two_lambda: f64, a: f64, b: f64) -> Option<f64> {
        let k = two_lambda + 1.0;
        match self {
            SampledFunction::Indicator { a: lo, b: hi } => {
                let (l, h) = (lo.max(a), hi.min(b));
                if h <= l {
                    return Some(0.0);
                }
                if !h.is_finite() {
                    return None;
                }
                if l == 0.0 && k <= 0.0 {
                    return Some(f64::INFINITY);
                }
                Some(power_integral_ln(two_lambda, l.ln(), h.ln()))
            }
            SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } => {
                let la = ln_a.max(a.ln());
                let lb = ln_b.min(b.ln());
                if lb <= la {
                    return Some(0.0);
                }
                Some(coef * power_integral_ln(alpha + two_lambda, la, lb))
            }
            SampledFunction::Constant(c) if *c == 0.0 => Some(0.0),
            _ => None,
        }
    }

    /// `(∫ |f|^p x^δ dx)^{1/p}`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64, delta: f64, spec: &QuadratureSpec) -> Result<f64> {
        if p.is_infinite() {
            return Ok(match self {
                SampledFunction::Indicator { .. } => 1.0,
                SampledFunction::SmoothBump { .. } => 1.0,
                SampledFunction::Constant(c) => c.abs(),
                SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } => coef.abs() * (alpha * ln_a).exp().max((alpha * ln_b).exp()),
                SampledFunction::Grid(g) => g.values.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
            });
        }
        if !(p >= 1.0) {
            return invalid(format!("exponent p = {p} must be >= 1"));
        }
        let integral = match self {
            SampledFunction::Indicator { a, b } => {
                if !b.is_finite() {
                    return Ok(f64::INFINITY);
                }
                if *a == 0.0 && delta <= -1.0 {
                    return Ok(f64::INFINITY);
                }
                power_integral_ln(delta, a.ln(), b.ln())
            }
            SampledFunction::PowerCutoff { coef, alpha, ln_a, ln_b } => {
                coef.abs().powf(p) * power_integral_ln(alpha * p + delta, *ln_a, *ln_b)
            }
            SampledFunction::Constant(c) => {
                if *c == 0.0 {
                    0.0
                } else {
                    return Ok(f64::INFINITY);
                }
            }
            _ => {
                let (lo, hi) = self.support();
                let g = |y: f64| self.eval(y).abs().powf(p);
                let r = integrate_measure(&g, delta, lo, hi, &self.breakpoints(), spec);
                r.check()?
            }
        };
        Ok(integral.powf(1.0 / p))
    }

    /// `∫ f(y) y^{2λ} dy` over the whole half-line.
    pub fn mass(&self, two_lambda: f64, spec: &QuadratureSpec) -> Result<f64> {
        if let Some(v) = self.weighted_integral_exact(two_lambda, 0.0, f64::INFINITY) {
            return Ok(v);
        }
        let (lo, hi) = self.support();
        integrate_measure(&|y| self.eval(y), two_lambda, lo, hi, &self.breakpoints(), spec).check()
    }

    /// Interpolated samples of an arbitrary closure.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, xs: &[f64], left: Tail, right: Tail) -> Result<Self> {
        let v: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        if v.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(SampledFunction::Grid(GridSamples::new(xs, &v, 3, left, right)?))
    }
}

/// `∫_{e^{la}}^{e^{lb}} y^β dy`, stable for tiny lower limits.
pub fn power_integral_ln(beta: f64, la: f64, lb: f64) -> f64 {
    let k = beta + 1.0;
    if k.abs() < 1e-14 {
        return lb - la;
    }
    if la == f64::NEG_INFINITY {
        return if k > 0.0 { (k * lb).exp() / k } else { f64::INFINITY };
    }
    // (e^{k lb} - e^{k la}) / k, computed as e^{k·max} (1 - e^{-k|lb-la|}) / |k|.
    let top = if k > 0.0 { k * lb } else { k * la };
    top.exp() * (-(-(k.abs()) * (lb - la)).exp_m1()) / k.abs()
}

/// Plain GK integral used by tests of the presets.
pub fn plain_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
    adaptive(&f, a, b, breaks, 1e-13, 1e-300, 4000).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_evaluate() {
        let ind = SampledFunction::indicator(1.0, 2.0).unwrap();
        assert_eq!(ind.eval(1.5), 1.0);
        assert_eq!(ind.eval(2.5), 0.0);
        let b = SampledFunction::smooth_bump(1.0, 0.5).unwrap();
        assert_eq!(b.eval(1.0), 1.0);
        assert_eq!(b.eval(1.5), 0.0);
        let p = SampledFunction::power_cutoff_ln(2.0, -3.0, -1e4, 0.0).unwrap();
        assert!((p.eval(0.5) - 16.0).abs() < 1e-12);
        assert!(SampledFunction::indicator(2.0, 1.0).is_err());
    }

    #[test]
    fn power_integral_matches_quadrature() {
        for &(beta, a, b) in &[(0.0, 1.0, 2.0), (-1.0, 0.5, 4.0), (2.5, 0.1, 3.0), (-3.0, 0.2, 1.0)] {
            let q = plain_integral(|y: f64| y.powf(beta), a, b, &[]);
            let c = power_integral_ln(beta, f64::ln(a), f64::ln(b));
            assert!((q - c).abs() < 1e-12 * c.abs(), "beta={beta}");
        }
    }

    #[test]
    fn lp_norms() {
        let s = QuadratureSpec::default();
        let c = SampledFunction::indicator(0.0, 1.0).unwrap();
        assert!((c.lp_norm(2.0, 0.0, &s).unwrap() - 1.0).abs() < 1e-14);
        let b = SampledFunction::smooth_bump(2.0, 1.0).unwrap();
        let n = b.lp_norm(2.0, 1.0, &s).unwrap();
        let q = plain_integral(|y: f64| b.eval(y).powi(2) * y, 1.0, 3.0, &[2.0]).sqrt();
        assert!((n - q).abs() < 1e-10);
    }

    #[test]
    fn grid_interpolation_reproduces_cubics_in_log() {
        let xs: Vec<f64> = (0..30).map(|i| 0.1 * 1.2f64.powi(i)).collect();
        let f = |x: f64| {
            let l = x.ln();
            1.0 + l - 0.3 * l * l + 0.05 * l * l * l
        };
        let g = SampledFunction::from_fn(f, &xs, Tail::Zero, Tail::Power(-2.0)).unwrap();
        for &x in &[0.13, 0.5, 2.0, 7.5] {
            assert!((g.eval(x) - f(x)).abs() < 1e-12);
        }
        let end = xs[29];
        assert!((g.eval(2.0 * end) - f(end) * 0.25).abs() < 1e-12);
        assert_eq!(g.eval(0.05), 0.0);
    }
}
