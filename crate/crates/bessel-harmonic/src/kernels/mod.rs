//! Kernels of the Bessel heat, Poisson and Riesz operators.
//!
//! Every Gaussian times Bessel product is grouped as
//! `(2t)^{-λ-1/2} e^{-(x-y)²/4t} G_ν(xy/2t)` with `G_ν(z) = z^{-ν} e^{-z} I_ν(z)`,
//! which neither overflows for large `xy/t` nor loses the `x, y → 0` limit.

mod lemmas;

pub use lemmas::*;

use crate::error::{invalid, Error, Result};
use crate::quad::{adaptive, gl_fixed, integrate_power_origin, QuadratureSpec};
use crate::specfun::{gamma_fn, gauss_2f1_complement, rgamma, BesselJ, BesselPair};
use std::f64::consts::PI;

/// Upper limit of supported `λ`, matching the Bessel order range.
pub const MAX_LAMBDA: f64 = 40.5;

/// The order `λ > -1/2` of the Bessel operator and the constants derived from it.
#[derive(Debug, Clone)]
pub struct BesselParam {
    lambda: f64,
    pair: BesselPair,
    j_lo: BesselJ,
    j_hi: BesselJ,
    poisson_const: f64,
}

impl BesselParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > -0.5 && lambda <= MAX_LAMBDA) {
            return invalid(format!("lambda = {lambda} outside (-1/2, {MAX_LAMBDA}]"));
        }
        let nu = lambda - 0.5;
        Ok(BesselParam {
            lambda,
            pair: BesselPair::new(nu)?,
            j_lo: BesselJ::new(nu)?,
            j_hi: BesselJ::new(nu + 1.0)?,
            poisson_const: 2.0 / PI.sqrt() * gamma_fn(lambda + 1.0)? * rgamma(lambda + 0.5),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `ν = λ - 1/2`.
    pub fn nu(&self) -> f64 {
        self.lambda - 0.5
    }

    /// Exponent `2λ` of the measure `dμ_λ`.
    pub fn measure_exponent(&self) -> f64 {
        2.0 * self.lambda
    }

    pub fn bessel(&self) -> &BesselPair {
        &self.pair
    }

    /// `2 Γ(λ+1) / (√π Γ(λ+1/2))`, the Poisson normalization.
    pub fn poisson_const(&self) -> f64 {
        self.poisson_const
    }

    #[inline]
    fn prefactor(&self, t: f64, x: f64, y: f64) -> f64 {
        let d = x - y;
        (-(self.lambda + 0.5) * (2.0 * t).ln() - d * d / (4.0 * t)).exp()
    }

    /// `W_t(x, y)` for `t > 0`, `x, y ≥ 0`.
    #[inline]
    pub fn heat(&self, t: f64, x: f64, y: f64) -> f64 {
        let pre = self.prefactor(t, x, y);
        if pre == 0.0 {
            return 0.0;
        }
        pre * self.pair.g(x * y / (2.0 * t))
    }

    /// `∂W_t(x, y)/∂x`.
    #[inline]
    pub fn heat_dx(&self, t: f64, x: f64, y: f64) -> f64 {
        let pre = self.prefactor(t, x, y);
        if pre == 0.0 {
            return 0.0;
        }
        let z = x * y / (2.0 * t);
        let v = self.pair.eval(z);
        pre / (2.0 * t) * ((y - x) * z * v.g_next - x * v.diff)
    }

    /// `∂W_t(x, y)/∂t`.
    #[inline]
    pub fn heat_dt(&self, t: f64, x: f64, y: f64) -> f64 {
        let pre = self.prefactor(t, x, y);
        if pre == 0.0 {
            return 0.0;
        }
        let z = x * y / (2.0 * t);
        let v = self.pair.eval(z);
        let d = x - y;
        pre * ((d * d / (4.0 * t * t) - (self.lambda + 0.5) / t) * v.g + z / t * v.diff)
    }

    /// Poisson kernel from the hypergeometric closed form.
    pub fn poisson(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.poisson_impl(t, x, y, true)
    }

    /// Closed-form Poisson kernel without the conditioning guard near `u = 1`.
    ///
    /// `H` is continuous at `u = 1` (its `c - a - b = 1`), so the value stays
    /// accurate to about `(1-u) log(1-u)`; quadrature nodes use this path.
    pub fn poisson_unguarded(&self, t: f64, x: f64, y: f64) -> f64 {
        self.poisson_impl(t, x, y, false).unwrap_or(0.0)
    }

    fn poisson_impl(&self, t: f64, x: f64, y: f64, strict: bool) -> Result<f64> {
        let (s, a, b) = poisson_parts(t, x, y);
        let h = self.poisson_h(x, y, s, a, b, strict)?;
        Ok(self.poisson_const * t * s.powf(1.0 - self.lambda) / (a * b) * h)
    }

    /// `H(u) = ₂F₁(λ/2, (λ-1)/2; λ+1/2; u)` with `u = (2xy/S)²`.
    fn poisson_h(&self, x: f64, y: f64, s: f64, a: f64, b: f64, strict: bool) -> Result<f64> {
        let l = self.lambda;
        if l == 0.0 || l == 1.0 {
            return Ok(1.0);
        }
        let u = (2.0 * x * y / s).powi(2);
        let omu = a * b / (s * s);
        if strict && omu < 1e-12 {
            return Err(Error::IllConditioned(format!("Poisson argument within {omu:e} of 1")));
        }
        Ok(gauss_2f1_complement(0.5 * l, 0.5 * (l - 1.0), l + 0.5, u, omu, 1e-12)?.value)
    }

    /// `∂P_t(x, y)/∂t` from the closed form.
    pub fn poisson_dt(&self, t: f64, x: f64, y: f64) -> Result<f64> {
        self.poisson_dt_impl(t, x, y, true)
    }

    /// [`Self::poisson_dt`] without the conditioning guard.
    pub fn poisson_dt_unguarded(&self, t: f64, x: f64, y: f64) -> f64 {
        self.poisson_dt_impl(t, x, y, false).unwrap_or(0.0)
    }

    fn poisson_dt_impl(&self, t: f64, x: f64, y: f64, strict: bool) -> Result<f64> {
        let l = self.lambda;
        let (s, a, b) = poisson_parts(t, x, y);
        let h = self.poisson_h(x, y, s, a, b, strict)?;
        let t2 = t * t;
        let mut bracket = h * (1.0 + 2.0 * (1.0 - l) * t2 / s - 2.0 * t2 / a - 2.0 * t2 / b);
        if l != 0.0 && l != 1.0 {
            let (ha, hb, hc) = (0.5 * l, 0.5 * (l - 1.0), l + 0.5);
            let u = (2.0 * x * y / s).powi(2);
            let omu = a * b / (s * s);
            let dh = ha * hb / hc * gauss_2f1_complement(ha + 1.0, hb + 1.0, hc + 1.0, u, omu, 1e-12)?.value;
            bracket += t * dh * (-4.0 * t * u / s);
        }
        Ok(self.poisson_const * s.powf(1.0 - l) / (a * b) * bracket)
    }

    /// Poisson kernel by subordination to the heat kernel.
    pub fn poisson_subordinated(&self, t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
        let f = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            self.heat(t * t / (4.0 * v * v), x, y) * (-v * v).exp()
        };
        let vmax = 7.0;
        let scales = [t / (2.0 * (x - y).abs().max(1e-300)), t / (2.0 * (x * y).sqrt()), t / (x + y), 1.0];
        let mut breaks = Vec::new();
        for s in scales {
            for k in [0.25, 1.0, 4.0] {
                let v = s * k;
                if v > 0.0 && v < vmax {
                    breaks.push(v);
                }
            }
        }
        let lo = breaks.iter().copied().fold(1.0, f64::min);
        let mut v = lo;
        while v > lo * 1e-8 {
            v *= 0.25;
            breaks.push(v);
        }
        let r = adaptive(&f, 0.0, vmax, &breaks, spec.rel_tol.max(1e-13), spec.abs_tol, spec.max_subdiv);
        Ok(2.0 / PI.sqrt() * r.check()?)
    }

    /// Conjugate Poisson kernel by quadrature in the angle variable.
    pub fn conj_poisson(&self, t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
        let l = self.lambda;
        if !(l > 0.0) {
            return invalid(format!("conjugate Poisson kernel needs lambda > 0, got {l}"));
        }
        let d = x - y;
        let a = d * d + t * t;
        let xy = x * y;
        let core = |theta: f64, phi: f64| {
            // theta = angle, phi = distance to the nearer endpoint
            let s2 = (0.5 * theta).sin();
            let den = a + 4.0 * xy * s2 * s2;
            let sin_ratio = if phi == 0.0 { 1.0 } else { phi.sin() / phi };
            (x - y * theta.cos()) * sin_ratio.powf(2.0 * l - 1.0) / den.powf(l + 1.0)
        };
        let left = |p: f64| core(p, p);
        let right = |p: f64| core(PI - p, p);
        let half = 0.5 * PI;
        let tol = spec.rel_tol.max(1e-14);
        let i1 = integrate_power_origin(&left, 2.0 * l - 1.0, half, tol, spec.abs_tol, spec.max_subdiv);
        let i2 = integrate_power_origin(&right, 2.0 * l - 1.0, half, tol, spec.abs_tol, spec.max_subdiv);
        let v = i1.check()? + i2.check()?;
        Ok(-2.0 * l / PI * v)
    }

    /// Riesz kernel by the selected method.
    pub fn riesz(&self, x: f64, y: f64, method: RieszMethod) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return invalid(format!("Riesz kernel needs x, y > 0, got ({x}, {y})"));
        }
        if (x - y).abs() < 1e-10 * x {
            return Err(Error::Diagonal { x, y });
        }
        match method {
            RieszMethod::Lambda0 => {
                if self.lambda != 0.0 {
                    return invalid("lambda0 method requires lambda = 0");
                }
                Ok(riesz_lambda0(x, y))
            }
            RieszMethod::Closed2F1 => self.riesz_closed(x, y),
            RieszMethod::TIntegral => self.riesz_t_integral(x, y),
            RieszMethod::Auto => {
                if self.lambda == 0.0 {
                    Ok(riesz_lambda0(x, y))
                } else if (y - x).abs() >= 1e-3 * x.max(y) {
                    self.riesz_closed(x, y)
                } else {
                    self.riesz_t_integral(x, y)
                }
            }
        }
    }

    fn riesz_closed(&self, x: f64, y: f64) -> Result<f64> {
        let l = self.lambda;
        let q = x * x + y * y;
        let phi = x * y / q;
        let w = 4.0 * phi * phi;
        let omw = ((x * x - y * y) / q).powi(2);
        let k = 2.0 / PI.sqrt() * gamma_fn(l + 2.0)? * rgamma(l + 1.5);
        let f1 = gauss_2f1_complement(0.5 * (l + 2.0), 0.5 * (l + 3.0), l + 1.5, w, omw, 1e-12)?.value;
        let f2 = gauss_2f1_complement(0.5 * (l + 1.0), 0.5 * (l + 2.0), l + 0.5, w, omw, 1e-12)?.value;
        let t1 = y * phi.powf(l + 2.0) * f1;
        let t2 = (l + 0.5) / (l + 1.0) * x * phi.powf(l + 1.0) * f2;
        Ok(k * (x * y).powf(-l - 1.0) * (t1 - t2))
    }

    /// `π^{-1/2} ∫ ∂ₓW_t(x,y) t^{-1/2} dt`, integrated in `ln t` and split at `t = xy`.
    fn riesz_t_integral(&self, x: f64, y: f64) -> Result<f64> {
        let l = self.lambda;
        let d2 = (x - y) * (x - y);
        let m2 = x.max(y).powi(2);
        let s_lo = (d2 / 180.0).ln().min((x * y).ln() - 2.0);
        let s_hi = m2.ln() + 40.0 / (l + 1.0);
        let h = |s: f64| {
            let t = s.exp();
            self.heat_dx(t, x, y) * t.sqrt()
        };
        let n = ((s_hi - s_lo) / 1.5).ceil() as usize;
        let mut breaks: Vec<f64> = (1..n).map(|i| s_lo + (s_hi - s_lo) * i as f64 / n as f64).collect();
        breaks.push((x * y).ln());
        if d2 > 0.0 {
            breaks.push(d2.ln());
        }
        let r = adaptive(&h, s_lo, s_hi, &breaks, 1e-12, 1e-300, 4000);
        let t_hi = s_hi.exp();
        let lead = self.pair.lo.at_zero();
        let tail = -lead * x * 2f64.powf(-l - 1.5) * t_hi.powf(-l - 1.0) / (l + 1.0);
        Ok((r.check()? + tail) / PI.sqrt())
    }

    /// `x^{-ν} J_ν(x)` and `x^{-ν-1} J_{ν+1}(x)` evaluators.
    pub fn bessel_j(&self) -> (&BesselJ, &BesselJ) {
        (&self.j_lo, &self.j_hi)
    }
}

fn poisson_parts(t: f64, x: f64, y: f64) -> (f64, f64, f64) {
    let t2 = t * t;
    (x * x + y * y + t2, (x - y).powi(2) + t2, (x + y).powi(2) + t2)
}

/// `(1/π)(1/(y-x) - 1/(y+x))`.
pub fn riesz_lambda0(x: f64, y: f64) -> f64 {
    (1.0 / (y - x) - 1.0 / (y + x)) / PI
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RieszMethod {
    TIntegral,
    Closed2F1,
    Lambda0,
    /// `lambda0` at `λ = 0`, the closed form off the near-diagonal band,
    /// the time integral inside it.
    Auto,
}

impl RieszMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RieszMethod::TIntegral => "t_integral",
            RieszMethod::Closed2F1 => "closed_2f1",
            RieszMethod::Lambda0 => "lambda0",
            RieszMethod::Auto => "auto",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoissonMethod {
    ClosedForm,
    Subordination,
}

impl PoissonMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PoissonMethod::ClosedForm => "closed_form",
            PoissonMethod::Subordination => "subordination",
        }
    }
}

/// A kernel argument `(t, x, y)`; `t` is absent for the Riesz kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: Option<f64>,
    pub x: f64,
    pub y: f64,
}

impl KernelPoint {
    pub fn new(t: Option<f64>, x: f64, y: f64) -> Result<Self> {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return invalid(format!("kernel point needs x, y > 0, got ({x}, {y})"));
        }
        if let Some(t) = t {
            if !(t > 0.0 && t.is_finite()) {
                return invalid(format!("kernel point needs t > 0, got {t}"));
            }
        }
        Ok(KernelPoint { t, x, y })
    }

    pub fn region(&self) -> RegionTag {
        RegionTag::of(self.x, self.y)
    }
}

/// Position of `y` relative to the local cone around `x`; the cone is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionTag {
    Lower,
    Diagonal,
    Upper,
}

impl RegionTag {
    pub fn of(x: f64, y: f64) -> RegionTag {
        if y < 0.5 * x {
            RegionTag::Lower
        } else if y > 2.0 * x {
            RegionTag::Upper
        } else {
            RegionTag::Diagonal
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegionTag::Lower => "lower",
            RegionTag::Diagonal => "diagonal",
            RegionTag::Upper => "upper",
        }
    }
}

fn check_txy(t: f64, x: f64, y: f64) -> Result<()> {
    KernelPoint::new(Some(t), x, y).map(|_| ())
}

/// `W_t(x, y)`.
pub fn heat_kernel(p: &BesselParam, t: f64, x: f64, y: f64) -> Result<f64> {
    check_txy(t, x, y)?;
    Ok(p.heat(t, x, y))
}

/// Euclidean Gauss–Weierstrass kernel `(4πt)^{-1/2} e^{-(x-y)²/4t}`.
pub fn gauss_weierstrass(t: f64, x: f64, y: f64) -> f64 {
    (-(x - y).powi(2) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `∂ₜ` of the Gauss–Weierstrass kernel.
pub fn gauss_weierstrass_dt(t: f64, x: f64, y: f64) -> f64 {
    let d2 = (x - y).powi(2);
    gauss_weierstrass(t, x, y) * (d2 / (4.0 * t * t) - 0.5 / t)
}

pub fn dheat_dx(p: &BesselParam, t: f64, x: f64, y: f64) -> Result<f64> {
    check_txy(t, x, y)?;
    Ok(p.heat_dx(t, x, y))
}

pub fn dheat_dt(p: &BesselParam, t: f64, x: f64, y: f64) -> Result<f64> {
    check_txy(t, x, y)?;
    Ok(p.heat_dt(t, x, y))
}

pub fn poisson_kernel(p: &BesselParam, t: f64, x: f64, y: f64, method: PoissonMethod, spec: &QuadratureSpec) -> Result<f64> {
    check_txy(t, x, y)?;
    match method {
        PoissonMethod::ClosedForm => p.poisson(t, x, y),
        PoissonMethod::Subordination => p.poisson_subordinated(t, x, y, spec),
    }
}

pub fn dpoisson_dt(p: &BesselParam, t: f64, x: f64, y: f64) -> Result<f64> {
    check_txy(t, x, y)?;
    p.poisson_dt(t, x, y)
}

pub fn conj_poisson_kernel(p: &BesselParam, t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_txy(t, x, y)?;
    p.conj_poisson(t, x, y, spec)
}

pub fn riesz_kernel(p: &BesselParam, x: f64, y: f64, method: RieszMethod) -> Result<f64> {
    p.riesz(x, y, method)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TildeBase {
    Heat { t: f64 },
    Riesz,
    Poisson { t: f64 },
}

/// Kernel of the conjugated operator on Lebesgue measure: base kernel times `(xy)^λ`.
pub fn tilde_kernel(base: TildeBase, p: &BesselParam, x: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = match base {
        TildeBase::Heat { t } => heat_kernel(p, t, x, y)?,
        TildeBase::Riesz => riesz_kernel(p, x, y, RieszMethod::Auto)?,
        TildeBase::Poisson { t } => poisson_kernel(p, t, x, y, PoissonMethod::ClosedForm, spec)?,
    };
    Ok((x * y).powf(p.lambda()) * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectralKind {
    Heat,
    Poisson,
    HeatDx,
    HeatDt,
}

impl SpectralKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectralKind::Heat => "heat",
            SpectralKind::Poisson => "poisson",
            SpectralKind::HeatDx => "dheat_dx",
            SpectralKind::HeatDt => "dheat_dt",
        }
    }
}

/// Brute-force quadrature of the eigenfunction expansion
/// `∫ m(z) φ_z(x) φ_z(y) dμ_λ(z)` with `φ_z(x) = (zx)^{-ν} J_ν(zx)`.
pub fn spectral_oracle(kind: SpectralKind, p: &BesselParam, t: f64, x: f64, y: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_txy(t, x, y)?;
    let l = p.lambda();
    let (jl, jh) = p.bessel_j();
    let power = 2.0 * l + 5.0;
    // truncation where the multiplier times the polynomial growth drops below 1e-17
    let mut zmax: f64 = 1.0;
    for _ in 0..50 {
        let zn = match kind {
            SpectralKind::Poisson => (39.0 + power * zmax.max(1.0).ln()) / t,
            _ => ((39.0 + power * zmax.max(1.0).ln()) / t).sqrt(),
        };
        if (zn - zmax).abs() < 1e-6 * zn {
            zmax = zn;
            break;
        }
        zmax = zn;
    }
    let multiplier = |z: f64| match kind {
        SpectralKind::Poisson => (-z * t).exp(),
        SpectralKind::HeatDt => -z * z * (-z * z * t).exp(),
        _ => (-z * z * t).exp(),
    };
    let integrand = |z: f64| {
        let fy = jl.norm(z * y).value;
        let fx = match kind {
            SpectralKind::HeatDx => -z * z * x * jh.norm(z * x).value,
            _ => jl.norm(z * x).value,
        };
        multiplier(z) * fx * fy
    };
    let width = (PI / (x + y)).min(0.25 * zmax);
    let panels = (zmax / width).ceil() as usize;
    if panels > 2_000_000 {
        return Err(Error::ConvergenceFailure(format!("spectral truncation {zmax:e} needs too many panels")));
    }
    let first = width;
    let weighted = |z: f64| integrand(z) * z.powf(2.0 * l);
    // cancellation near a sign change of the kernel: relative accuracy of a
    // tiny result is meaningless, so the floor follows the integrand size
    let scale = (1..=8).map(|k| weighted(first * k as f64 / 8.0).abs()).fold(0.0, f64::max) * first;
    let abs = spec.abs_tol.max(64.0 * f64::EPSILON * scale);
    let head = integrate_power_origin(&integrand, 2.0 * l, first, spec.rel_tol.max(1e-14), abs, spec.max_subdiv);
    let mut sum = head.check()?;
    let mut a = first;
    let step = (zmax - first) / (panels.max(2) - 1) as f64;
    while a < zmax - 0.5 * step {
        sum += gl_fixed(&weighted, a, a + step, 24);
        a += step;
    }
    Ok(sum)
}
