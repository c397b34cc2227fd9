use super::{apply_kernel, around, sup_scale, ErrSlot};
use crate::error::{invalid, Result};
use crate::kernels::{gauss_weierstrass_dt, BesselParam};
use crate::quad::{integrate_measure, integrate_t_with, QuadratureSpec};
use crate::sampled::SampledFunction;
use std::f64::consts::PI;

fn check_x(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("square function needs x > 0, got {x}"));
    }
    Ok(())
}

/// `f(x)·profile(y)` is subtracted from the input and `f(x)·total(t)` added
/// back, where `total(t) = ∫ dk(t, y) profile(y) dμ_λ(y)` over the range is
/// known in closed form. This removes the `1/t²` near-diagonal peak that
/// otherwise swamps the integral at small `t`.
struct Compensation<'a> {
    profile: &'a dyn Fn(f64) -> f64,
    total: &'a dyn Fn(f64) -> f64,
}

/// `(∫ t |∂ₜ T_t f(x)|² dt)^{1/2}` for a time-derivative kernel `dk(t, y)`.
#[allow(clippy::too_many_arguments)]
fn square_fn<K: Fn(f64, f64) -> f64 + Sync>(
    dk: &K,
    f: &SampledFunction,
    two_lambda: f64,
    x: f64,
    range: (f64, f64),
    width: impl Fn(f64) -> f64,
    comp: Compensation,
    scale: f64,
    tail_exponent: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if f.is_zero() {
        return Ok(0.0);
    }
    let sup = sup_scale(f).max(f64::MIN_POSITIVE);
    let fx = f.eval(x);
    let subtract = fx != 0.0 && !matches!(f, SampledFunction::PowerCutoff { .. });
    let slot = ErrSlot::new();
    let g = |t: f64| {
        let abs = spec.abs_tol.max(1e-13 * sup / t);
        let mut breaks = around(x, width(t));
        let r = if subtract {
            breaks.extend(f.breakpoints());
            let q = QuadratureSpec { abs_tol: abs, ..*spec };
            let h = |y: f64| dk(t, y) * (f.eval(y) - fx * (comp.profile)(y));
            let mut r = integrate_measure(&h, two_lambda, range.0, range.1, &breaks, &q);
            r.value += fx * (comp.total)(t);
            r
        } else {
            apply_kernel(&|y| dk(t, y), f, two_lambda, range, &breaks, spec.rel_tol, abs, spec.max_subdiv)
        };
        if !r.converged && r.error > 1e-6 * r.value.abs().max(1e-6 * sup / t) {
            slot.take(r.check());
        }
        t * r.value * r.value
    };
    let r = integrate_t_with(&g, spec, scale, tail_exponent, &[x * x])?;
    slot.finish()?;
    Ok(r.value.max(0.0).sqrt())
}

/// Semigroups preserve mass, so constants are annihilated by `∂ₜ`.
const MASS: Compensation<'static> = Compensation { profile: &|_| 1.0, total: &|_| 0.0 };

/// Heat square function `g_λ(f)(x) = (∫ t |∂ₜ W_t f(x)|² dt)^{1/2}`.
pub fn g_heat(p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    let reach = x.max(f.support().1.min(1e150));
    square_fn(
        &|t, y| p.heat_dt(t, x, y),
        f,
        p.measure_exponent(),
        x,
        (0.0, f64::INFINITY),
        |t| (2.0 * t).sqrt(),
        MASS,
        reach * reach,
        2.0 * p.lambda() + 2.0,
        spec,
    )
}

/// Poisson square function `(∫ t |∂ₜ P_t f(x)|² dt)^{1/2}`.
pub fn g_poisson(p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    let reach = x.max(f.support().1.min(1e150));
    square_fn(
        &|t, y| p.poisson_dt_unguarded(t, x, y),
        f,
        p.measure_exponent(),
        x,
        (0.0, f64::INFINITY),
        |t| t,
        MASS,
        reach,
        4.0 * p.lambda() + 3.0,
        spec,
    )
}

/// Local square function with kernel `(xy)^{-λ} ∂ₜ𝒲_t(x, y)` over `y ∈ (x/2, 2x)`,
/// `𝒲_t` the Gauss-Weierstrass kernel.
pub fn g_loc(p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_x(x)?;
    let l = p.lambda();
    // with profile (x/y)^λ the weighted kernel is plain ∂ₜ𝒲, whose integral
    // over (x/2, 2x) is ∂ₜ of (erf(x/2√t) + erf(x/4√t))/2
    let profile = |y: f64| (x / y).powf(l);
    let total = |t: f64| {
        let d = |a: f64| -a * (-a * a / (4.0 * t)).exp() / (2.0 * PI.sqrt() * t.powf(1.5));
        0.5 * (d(x) + d(0.5 * x))
    };
    square_fn(
        &|t, y| (x * y).powf(-l) * gauss_weierstrass_dt(t, x, y),
        f,
        p.measure_exponent(),
        x,
        (0.5 * x, 2.0 * x),
        |t| (2.0 * t).sqrt(),
        Compensation { profile: &profile, total: &total },
        x * x,
        2.0,
        spec,
    )
}

/// `‖g f‖²_{L²(dμ_λ)} / ‖f‖²_{L²(dμ_λ)}` for a square function `g`.
pub fn plancherel_ratio<G: Fn(f64) -> Result<f64>>(g: G, p: &BesselParam, f: &SampledFunction, spec: &QuadratureSpec) -> Result<f64> {
    let (lo, hi) = f.support();
    let slot = ErrSlot::new();
    let h = |x: f64| {
        let v = slot.take(g(x));
        v * v
    };
    let loose = QuadratureSpec { rel_tol: 1e-8, abs_tol: 1e-14, max_subdiv: 400, ..*spec };
    let mut breaks = f.breakpoints();
    breaks.extend([0.5 * lo, 2.0 * hi, 10.0 * hi]);
    let num = integrate_measure(&h, p.measure_exponent(), 0.0, f64::INFINITY, &breaks, &loose);
    slot.finish()?;
    let den = f.lp_norm(2.0, p.measure_exponent(), spec)?.powi(2);
    Ok(num.check()? / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::with_tol(1e-9)
    }

    #[test]
    fn zero_input() {
        let p = BesselParam::new(1.0).unwrap();
        let f = SampledFunction::Constant(0.0);
        assert_eq!(g_loc(&p, &f, 1.0, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn poisson_below_sqrt2_heat() {
        let p = BesselParam::new(0.5).unwrap();
        let f = SampledFunction::smooth_bump(1.0, 0.5).unwrap();
        for &x in &[0.3, 1.0, 1.3, 4.0] {
            let gh = g_heat(&p, &f, x, &spec()).unwrap();
            let gp = g_poisson(&p, &f, x, &spec()).unwrap();
            assert!(gp <= 2f64.sqrt() * gh * (1.0 + 1e-12), "x={x}: {gp} {gh}");
        }
    }

    #[test]
    fn local_square_lower_bound() {
        let p = BesselParam::new(1.0).unwrap();
        let eps = 1e-2;
        let f = SampledFunction::indicator(1.0, 1.0 + eps).unwrap();
        let mut c = f64::INFINITY;
        for &x in &[1.05, 1.2, 1.5, 1.9] {
            let v = g_loc(&p, &f, x, &spec()).unwrap();
            c = c.min(v * (x - 1.0) / eps);
        }
        assert!(c > 0.01, "{c}");
    }

    #[test]
    fn local_square_lambda0_translation_invariant_profile() {
        // at λ = 0 and for a thin bump far from the origin the local square
        // function depends only on x - center
        let p = BesselParam::new(0.0).unwrap();
        let a = g_loc(&p, &SampledFunction::smooth_bump(10.0, 0.5).unwrap(), 10.7, &spec()).unwrap();
        let b = g_loc(&p, &SampledFunction::smooth_bump(20.0, 0.5).unwrap(), 20.7, &spec()).unwrap();
        assert!((a - b).abs() < 1e-8 * a, "{a} {b}");
    }
}
