//! Quadrature: adaptive Gauss–Kronrod on finite and semi-infinite ranges,
//! integrals against `dμ_λ = y^{2λ} dy`, log-scale integrals in the time
//! variable with power-law tail estimates, and principal values.

#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::kernels::BesselParam;
use crate::sampled::SampledFunction;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

/// Range and density of a logarithmic grid in the time variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
}

impl TGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return Err(Error::InvalidInput(format!("t grid [{}, {}] is not an increasing positive range", self.t_min, self.t_max)));
        }
        if self.per_decade < 8 {
            return Err(Error::InvalidInput("t grid needs at least 8 points per decade".into()));
        }
        Ok(())
    }

    pub fn scaled(&self, scale: f64) -> TGrid {
        TGrid { t_min: self.t_min * scale, t_max: self.t_max * scale, per_decade: self.per_decade }
    }

    pub fn decades(&self) -> f64 {
        (self.t_max / self.t_min).log10()
    }
}

/// Grid of sample points for the sup over `t` in maximal operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalGrid {
    /// Lower and upper end relative to the natural scale (`x²` or `x`).
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PvPolicy {
    OddPartSubtraction,
    SymmetricExcision(f64),
}

/// Log-spaced evaluation grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub per_decade: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, per_decade: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_min < x_max && x_max.is_finite()) || per_decade == 0 {
            return Err(Error::InvalidInput(format!("grid [{x_min}, {x_max}] with {per_decade} points per decade")));
        }
        Ok(GridSpec { x_min, x_max, per_decade })
    }

    pub fn points(&self) -> Vec<f64> {
        log_points(self.x_min, self.x_max, self.len())
    }

    pub fn len(&self) -> usize {
        ((self.x_max / self.x_min).log10() * self.per_decade as f64).ceil() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `n ≥ 2` log-spaced points from `a` to `b` inclusive.
pub fn log_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| if i + 1 == n { b } else { (la + (lb - la) * i as f64 / (n - 1) as f64).exp() }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdiv: usize,
    pub t_grid: TGrid,
    pub pv_policy: PvPolicy,
    pub maximal: MaximalGrid,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_subdiv: 2000,
            t_grid: TGrid { t_min: 1e-8, t_max: 1e8, per_decade: 16 },
            pv_policy: PvPolicy::OddPartSubtraction,
            maximal: MaximalGrid { lo: 1e-6, hi: 1e6, points: 200 },
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.max_subdiv == 0 {
            return Err(Error::InvalidInput("max_subdiv must be positive".into()));
        }
        if !(self.maximal.lo > 0.0 && self.maximal.lo < self.maximal.hi && self.maximal.points >= 2) {
            return Err(Error::InvalidInput("maximal grid must be an increasing positive range".into()));
        }
        if let PvPolicy::SymmetricExcision(eps) = self.pv_policy {
            if !(eps > 0.0 && eps < 0.5) {
                return Err(Error::InvalidInput(format!("excision width {eps} outside (0, 1/2)")));
            }
        }
        self.t_grid.validate()
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, other: QuadResult) -> QuadResult {
        QuadResult { value: self.value + other.value, error: self.error + other.error, converged: self.converged && other.converged }
    }
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult { value: 0.0, error: 0.0, converged: true };

    pub fn scale(self, c: f64) -> QuadResult {
        QuadResult { value: self.value * c, error: self.error * c.abs(), converged: self.converged }
    }

    /// Converts a non-converged result into an error.
    pub fn check(self) -> Result<f64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::ToleranceNotMet { estimate: self.value, error: self.error })
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss–Kronrod 10/21

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208745237075,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// One 21-point Kronrod rule on `[a, b]`: (value, error estimate).
pub fn gk21<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = 0.0;
    let mut abs_k = rk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = rk * 0.5;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = rk * h;
    let resabs = abs_k * h.abs();
    let resasc = asc * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * f64::min(1.0, (200.0 * err / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (result, err)
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive GK21 over `[a, b]` with interior breakpoints.
pub fn adaptive<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> QuadResult {
    if a == b {
        return QuadResult::ZERO;
    }
    if a > b {
        let r = adaptive(f, b, a, breakpoints, rel_tol, abs_tol, max_subdiv);
        return r.scale(-1.0);
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut heap = BinaryHeap::new();
    let mut lo = a;
    let (mut total, mut total_err) = (0.0, 0.0);
    for &hi in cuts.iter().chain(std::iter::once(&b)) {
        let (v, e) = gk21(f, lo, hi);
        total += v;
        total_err += e;
        heap.push(Piece { a: lo, b: hi, value: v, error: e });
        lo = hi;
    }
    let mut n = heap.len();
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if n >= max_subdiv {
            return QuadResult { value: total, error: total_err, converged: false };
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        if !(m > p.a && m < p.b) || (p.b - p.a) <= 4.0 * f64::EPSILON * m.abs() {
            // cannot split further: keep the piece and accept its error
            heap.push(p);
            return QuadResult { value: total, error: total_err, converged: false };
        }
        let (v1, e1) = gk21(f, p.a, m);
        let (v2, e2) = gk21(f, m, p.b);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2 });
        n += 1;
    }
    // Resum to remove drift from the running updates.
    let (mut v, mut e) = (0.0, 0.0);
    for p in heap.iter() {
        v += p.value;
        e += p.error;
    }
    QuadResult { value: v, error: e, converged: true }
}

/// `∫_c^∞ f` through `y = c + u/(1-u)`.
pub fn semi_infinite<F: Fn(f64) -> f64 + ?Sized>(f: &F, c: f64, rel_tol: f64, abs_tol: f64, max_subdiv: usize) -> QuadResult {
    let g = |u: f64| {
        let w = 1.0 - u;
        let v = f(c + u / w) / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let breaks = [0.5, 0.9, 0.99, 0.999];
    adaptive(&g, 0.0, 1.0, &breaks, rel_tol, abs_tol, max_subdiv)
}

/// `∫_0^h y^α g(y) dy` with `u = y^{α+1}`, graded geometrically toward 0.
pub fn integrate_power_origin<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    alpha: f64,
    h: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_subdiv: usize,
) -> QuadResult {
    let k = alpha + 1.0;
    let inv = 1.0 / k;
    let top = h.powf(k);
    let f = |u: f64| g(u.powf(inv));
    let breaks: Vec<f64> = (1..40).map(|j| top * 0.5f64.powi(j)).collect();
    adaptive(&f, 0.0, top, &breaks, rel_tol, abs_tol, max_subdiv).scale(inv)
}

/// `∫_a^b g dμ_λ` for a closure; `b` may be infinite and `a` may be 0.
pub fn integrate_measure<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    two_lambda: f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> QuadResult {
    if !(b > a) {
        return QuadResult::ZERO;
    }
    let mut pts: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > a && p < b && p.is_finite()).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let (rel, abs, ms) = (spec.rel_tol, spec.abs_tol, spec.max_subdiv);
    let weighted = |y: f64| g(y) * y.powf(two_lambda);
    let mut out = QuadResult::ZERO;
    let mut lo = a;
    let mut inner = pts.as_slice();
    if a == 0.0 {
        let h = match pts.first() {
            Some(&p) => p,
            None if b.is_finite() => b,
            None => 1.0,
        };
        out = out + integrate_power_origin(g, two_lambda, h, rel, abs, ms);
        lo = h;
        if !pts.is_empty() {
            inner = &pts[1..];
        }
    }
    if b.is_finite() {
        out = out + adaptive(&weighted, lo, b, inner, rel, abs, ms);
    } else {
        let c = inner.last().copied().unwrap_or(lo).max(lo);
        if c > lo {
            out = out + adaptive(&weighted, lo, c, inner, rel, abs, ms);
        }
        out = out + semi_infinite(&weighted, c, rel, abs, ms);
    }
    out
}

/// `∫_a^b f dμ_λ` for a sampled function, restricted to its support.
pub fn integrate_weighted(f: &SampledFunction, lambda: &BesselParam, interval: (f64, f64), spec: &QuadratureSpec) -> Result<f64> {
    let (a, b) = interval;
    if !(a >= 0.0 && b > a) {
        return Err(Error::InvalidInput(format!("interval ({a}, {b}) is not a subset of (0, inf]")));
    }
    let two_lambda = lambda.measure_exponent();
    if let Some(v) = f.weighted_integral_exact(two_lambda, a, b) {
        return Ok(v);
    }
    let (s_lo, s_hi) = f.support();
    let lo = a.max(s_lo);
    let hi = b.min(s_hi);
    if !(hi > lo) {
        return Ok(0.0);
    }
    let r = integrate_measure(&|y| f.eval(y), two_lambda, lo, hi, &f.breakpoints(), spec);
    r.check()
}

// ---------------------------------------------------------------------------
// Gauss–Legendre

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1], cached.
pub fn gauss_legendre(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(legendre_rule(n))).clone()
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Fixed n-point Gauss–Legendre on [a, b].
pub fn gl_fixed<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0.iter().zip(rule.1.iter()).map(|(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

// ---------------------------------------------------------------------------
// Time integrals

/// Result of a log-scale integral over `t ∈ (0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TIntegral {
    pub value: f64,
    pub error: f64,
    /// Analytic estimate of the part beyond the grid's upper end.
    pub tail: f64,
    /// Estimate of the part below the grid's lower end.
    pub head: f64,
}

/// `∫_0^∞ g(t) dt` where `|g| ≲ t^{-tail_exponent}` for large `t`.
///
/// The grid range (scaled by `scale`) is covered in `s = ln t` with one
/// starting panel per decade. The piece above `t_max` is taken from the power
/// law, the piece below `t_min` from the local slope of `g`; both are added to
/// the value and charged to the error.
pub fn integrate_t<F: Fn(f64) -> f64 + ?Sized>(g: &F, spec: &QuadratureSpec, scale: f64, tail_exponent: f64) -> Result<TIntegral> {
    integrate_t_with(g, spec, scale, tail_exponent, &[])
}

/// [`integrate_t`] with extra breakpoints in `t`.
pub fn integrate_t_with<F: Fn(f64) -> f64 + ?Sized>(
    g: &F,
    spec: &QuadratureSpec,
    scale: f64,
    tail_exponent: f64,
    extra: &[f64],
) -> Result<TIntegral> {
    if !(tail_exponent > 1.0) {
        return Err(Error::InvalidInput(format!("tail exponent {tail_exponent} must exceed 1")));
    }
    let grid = spec.t_grid.scaled(scale);
    let (s0, s1) = (grid.t_min.ln(), grid.t_max.ln());
    let panels = ((s1 - s0) / std::f64::consts::LN_10).ceil().max(1.0) as usize;
    let panels = panels * grid.per_decade.div_ceil(16).max(1);
    let mut breaks: Vec<f64> = (1..panels).map(|i| s0 + (s1 - s0) * i as f64 / panels as f64).collect();
    breaks.extend(extra.iter().filter(|&&t| t > 0.0).map(|t| t.ln()));
    let h = |s: f64| {
        let t = s.exp();
        g(t) * t
    };
    let body = adaptive(&h, s0, s1, &breaks, spec.rel_tol, spec.abs_tol, spec.max_subdiv.max(4 * panels));
    let g_max = g(grid.t_max);
    let tail = g_max * grid.t_max / (tail_exponent - 1.0);
    let g_min = g(grid.t_min);
    let g_min2 = g(grid.t_min * 2.0);
    let head = if g_min == 0.0 {
        0.0
    } else {
        let beta = if g_min2 != 0.0 && g_min2.signum() == g_min.signum() { (g_min2 / g_min).ln() / std::f64::consts::LN_2 } else { 0.0 };
        if beta > -1.0 {
            g_min * grid.t_min / (beta + 1.0)
        } else if (g_min * grid.t_min).abs() <= 1e-6 * spec.rel_tol * body.value.abs() {
            // growth at the roundoff level of a vanishing integrand
            0.0
        } else {
            return Err(Error::Divergence(format!("integrand grows like t^{beta:.3} near t = 0")));
        }
    };
    let value = body.value + tail + head;
    let error = body.error + 1e-3 * tail.abs() + 1e-2 * head.abs();
    if tail.abs() > spec.abs_tol.max(0.1 * value.abs()) {
        return Err(Error::TailDominates { tail });
    }
    if !body.converged && body.error > 1e-6 * value.abs().max(spec.abs_tol) {
        return Err(Error::ToleranceNotMet { estimate: value, error });
    }
    Ok(TIntegral { value, error, tail, head })
}

// ---------------------------------------------------------------------------
// Principal values

/// `pv ∫_{x/2}^{2x} h(y)/(y-x) dy + ∫_{x/2}^{2x} smooth(y) dy`.
///
/// The default policy subtracts `h(x)` so the remaining integrand is bounded,
/// leaving `h(x) log 2` from the exact principal value of `1/(y-x)`.
pub fn pv_local<H, S>(h: &H, x: f64, smooth: &S, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<f64>
where
    H: Fn(f64) -> f64 + ?Sized,
    S: Fn(f64) -> f64 + ?Sized,
{
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("pv point {x} must be positive")));
    }
    let (a, b) = (0.5 * x, 2.0 * x);
    let pv = match spec.pv_policy {
        PvPolicy::OddPartSubtraction => pv_subtracted(h, x, breakpoints, spec)?,
        PvPolicy::SymmetricExcision(eps) => pv_excised(h, x, eps, breakpoints, spec)?,
    };
    let mut pts: Vec<f64> = breakpoints.to_vec();
    pts.push(x);
    let corr = adaptive(smooth, a, b, &pts, spec.rel_tol, spec.abs_tol, spec.max_subdiv);
    Ok(pv + corr.check()?)
}

fn holder_probe<H: Fn(f64) -> f64 + ?Sized>(h: &H, x: f64) -> Result<()> {
    let hx = h(x);
    let q = |d: f64| ((h(x + d) - hx) / d).abs().max(((h(x - d) - hx) / d).abs());
    let coarse = q(1e-3 * x);
    let fine = q(1e-7 * x);
    let base = coarse.max(hx.abs() / x).max(f64::MIN_POSITIVE);
    if fine > 1e3 * base {
        return Err(Error::NonHolder(x));
    }
    Ok(())
}

fn pv_subtracted<H: Fn(f64) -> f64 + ?Sized>(h: &H, x: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    holder_probe(h, x)?;
    let hx = h(x);
    let g = |y: f64| (h(y) - hx) / (y - x);
    let mut pts: Vec<f64> = breakpoints.to_vec();
    pts.push(x);
    let r = adaptive(&g, 0.5 * x, 2.0 * x, &pts, spec.rel_tol, spec.abs_tol, spec.max_subdiv);
    Ok(r.check()? + hx * std::f64::consts::LN_2)
}

/// Symmetric excision of `(x - εx, x + εx)`; independent of the subtraction path.
pub fn pv_excised_raw<H: Fn(f64) -> f64 + ?Sized>(h: &H, x: f64, eps: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let g = |y: f64| h(y) / (y - x);
    let d = eps * x;
    let left = adaptive(&g, 0.5 * x, x - d, breakpoints, spec.rel_tol, spec.abs_tol, spec.max_subdiv);
    let right = adaptive(&g, x + d, 2.0 * x, breakpoints, spec.rel_tol, spec.abs_tol, spec.max_subdiv);
    Ok(left.check()? + right.check()?)
}

/// Excision at `ε, ε/10, ε/100`, extrapolated to `ε → 0` as a quadratic in `ε`.
pub fn pv_excised<H: Fn(f64) -> f64 + ?Sized>(h: &H, x: f64, eps: f64, breakpoints: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let e = [eps, eps / 10.0, eps / 100.0];
    let v = [
        pv_excised_raw(h, x, e[0], breakpoints, spec)?,
        pv_excised_raw(h, x, e[1], breakpoints, spec)?,
        pv_excised_raw(h, x, e[2], breakpoints, spec)?,
    ];
    // Lagrange interpolation evaluated at 0.
    let mut out = 0.0;
    for i in 0..3 {
        let mut w = 1.0;
        for j in 0..3 {
            if i != j {
                w *= e[j] / (e[j] - e[i]);
            }
        }
        out += w * v[i];
    }
    Ok(out)
}
