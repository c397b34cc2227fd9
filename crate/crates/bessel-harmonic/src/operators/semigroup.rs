use super::{apply_kernel, around, grid_sup, sup_scale, ErrSlot, Estimate};
use crate::error::{invalid, Error, Result};
use crate::kernels::BesselParam;
use crate::quad::{integrate_t_with, QuadratureSpec};
use crate::sampled::SampledFunction;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semigroup {
    Heat,
    Poisson,
}

impl Semigroup {
    pub fn as_str(&self) -> &'static str {
        match self {
            Semigroup::Heat => "heat",
            Semigroup::Poisson => "poisson",
        }
    }
}

fn check_point(t: f64, x: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite() && x >= 0.0 && x.is_finite()) {
        return invalid(format!("need t > 0 and x >= 0, got t = {t}, x = {x}"));
    }
    Ok(())
}

/// `W_t f(x) = ∫ W_t(x, y) f(y) dμ_λ(y)`; `x = 0` is allowed.
pub fn heat_apply(p: &BesselParam, t: f64, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_point(t, x)?;
    let floor = 1e-16 * sup_scale(f);
    let breaks = around(x, (2.0 * t).sqrt());
    let r = apply_kernel(
        &|y| p.heat(t, x, y),
        f,
        p.measure_exponent(),
        (0.0, f64::INFINITY),
        &breaks,
        spec.rel_tol,
        spec.abs_tol.max(floor),
        spec.max_subdiv,
    );
    Estimate::from_quad(r, floor)
}

/// `P_t f(x) = ∫ P_t(x, y) f(y) dμ_λ(y)`.
pub fn poisson_apply(p: &BesselParam, t: f64, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_point(t, x)?;
    let floor = 1e-16 * sup_scale(f);
    let breaks = around(x, t);
    let r = apply_kernel(
        &|y| p.poisson_unguarded(t, x, y),
        f,
        p.measure_exponent(),
        (0.0, f64::INFINITY),
        &breaks,
        spec.rel_tol,
        spec.abs_tol.max(floor),
        spec.max_subdiv,
    );
    Estimate::from_quad(r, floor)
}

/// Semigroup integral at one time.
pub fn semigroup_apply(sg: Semigroup, p: &BesselParam, t: f64, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    match sg {
        Semigroup::Heat => heat_apply(p, t, f, x, spec),
        Semigroup::Poisson => poisson_apply(p, t, f, x, spec),
    }
}

/// Grid sup of a semigroup integral: a certified lower bound of the maximal function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalValue {
    pub value: f64,
    /// Time at which the sup was found; `0` when it is the small-time limit `|f(x)|`.
    pub t_star: f64,
    /// The grid maximum sat at an end of the time grid, so the grid may be too short.
    pub on_boundary: bool,
}

/// Natural time range `[lo·s(x), hi·s(max(x, sup supp f))]` with `s(r) = r²`
/// for the heat semigroup and `s(r) = r` for the Poisson semigroup.
pub(crate) fn time_range(squared: bool, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> (f64, f64, usize) {
    let hi = f.support().1;
    let reach = if hi.is_finite() { x.max(hi) } else { x };
    let m = spec.maximal;
    let (t0, t1) = if squared { (m.lo * x * x, m.hi * reach * reach) } else { (m.lo * x, m.hi * reach) };
    let base = (m.hi / m.lo).log10();
    let n = ((m.points as f64) * (t1 / t0).log10() / base).ceil() as usize;
    (t0, t1, n.max(m.points))
}

/// `sup_t |T_t f(x)|` over the time grid of `spec.maximal`, refined around the best node.
pub fn maximal_apply(sg: Semigroup, p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<MaximalValue> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("maximal function needs x > 0, got {x}"));
    }
    let (t0, t1, n) = time_range(sg == Semigroup::Heat, f, x, spec);
    let h = |t: f64| semigroup_apply(sg, p, t, f, x, spec).map(|e| e.value);
    let (mut value, mut t_star, on_boundary) = grid_sup(&h, t0, t1, n)?;
    // Both semigroups tend to f(x) as t -> 0 where f is continuous.
    if on_boundary && t_star < t0 * 10.0 {
        let (l, r) = (f.eval(x * (1.0 - 1e-9)), f.eval(x * (1.0 + 1e-9)));
        let fx = f.eval(x).abs();
        if (l - r).abs() <= 1e-6 * fx.max(f64::MIN_POSITIVE) && fx > value {
            value = fx;
            t_star = 0.0;
        }
    }
    Ok(MaximalValue { value, t_star, on_boundary })
}

/// Compensated potential `π^{-1/2} ∫ (W_t f(x) - [λ ≤ 0] W_t f(0)) t^{-1/2} dt`.
pub fn potential_apply(p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    potential_apply_with(p, f, x, p.lambda() <= 0.0, spec)
}

/// [`potential_apply`] with explicit control of the compensating term.
///
/// Before integrating, the large-time slope of the integrand is probed; a
/// slope of `-1` or flatter means the time integral diverges.
pub fn potential_apply_with(p: &BesselParam, f: &SampledFunction, x: f64, compensate: bool, spec: &QuadratureSpec) -> Result<Estimate> {
    let (lo, hi) = f.support();
    if !(lo > 0.0 && hi.is_finite()) {
        return invalid("potential needs a compactly supported input away from 0");
    }
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("potential needs x > 0, got {x}"));
    }
    let slot = ErrSlot::new();
    let g = |t: f64| {
        let a = slot.take(heat_apply(p, t, f, x, spec).map(|e| e.value));
        let b = if compensate { slot.take(heat_apply(p, t, f, 0.0, spec).map(|e| e.value)) } else { 0.0 };
        (a - b) / (PI * t).sqrt()
    };
    let scale = x.max(hi).powi(2);
    let t_hi = spec.t_grid.t_max * scale;
    let (g1, g2) = (g(t_hi), g(0.5 * t_hi));
    let slope = if g1 != 0.0 && g2 != 0.0 { (g1 / g2).abs().ln() / std::f64::consts::LN_2 } else { f64::NEG_INFINITY };
    if slope >= -1.0 {
        return Err(Error::Divergence(format!("potential integrand decays like t^{slope:.3} at large t")));
    }
    let kappa = if compensate { p.lambda() + 2.0 } else { p.lambda() + 1.0 };
    let r = integrate_t_with(&g, spec, scale, kappa, &[1.0])?;
    slot.finish()?;
    Ok(Estimate { value: r.value, error: r.error })
}

/// `Q_t f(x) = ∫ Q_t(x, y) f(y) dμ_λ(y)` for `λ > 0`.
pub fn conj_poisson_apply(p: &BesselParam, t: f64, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_point(t, x)?;
    if !(p.lambda() > 0.0) {
        return invalid("conjugate Poisson integral needs lambda > 0");
    }
    let slot = ErrSlot::new();
    let floor = 1e-16 * sup_scale(f);
    let r = apply_kernel(
        &|y| slot.take(p.conj_poisson(t, x, y, spec)),
        f,
        p.measure_exponent(),
        (0.0, f64::INFINITY),
        &around(x, t),
        spec.rel_tol,
        spec.abs_tol.max(floor),
        spec.max_subdiv,
    );
    slot.finish()?;
    Estimate::from_quad(r, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::erf;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn heat_of_large_indicator_is_one() {
        for &l in &[-0.3, 0.0, 1.0, 3.0] {
            let p = BesselParam::new(l).unwrap();
            let f = SampledFunction::indicator(0.0, 60.0).unwrap();
            let v = heat_apply(&p, 1.0, &f, 2.0, &spec()).unwrap().value;
            assert!((v - 1.0).abs() < 1e-10, "lambda={l}: {v}");
        }
    }

    #[test]
    fn heat_lambda0_reflection_closed_form() {
        let p = BesselParam::new(0.0).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let (t, x) = (1.0f64, 1.0f64);
        let s = 2.0 * t.sqrt();
        let want = 0.5 * (erf((2.0 - x) / s) - erf((1.0 - x) / s)) + 0.5 * (erf((x + 2.0) / s) - erf((x + 1.0) / s));
        let got = heat_apply(&p, t, &f, x, &QuadratureSpec::with_tol(1e-14)).unwrap().value;
        assert!((got - want).abs() < 1e-13, "{got} {want}");
    }

    #[test]
    fn heat_approximate_identity() {
        let p = BesselParam::new(0.7).unwrap();
        let f = SampledFunction::smooth_bump(1.0, 0.5).unwrap();
        let x = 1.1;
        let e1 = (heat_apply(&p, 1e-4, &f, x, &spec()).unwrap().value - f.eval(x)).abs();
        let e2 = (heat_apply(&p, 1e-5, &f, x, &spec()).unwrap().value - f.eval(x)).abs();
        assert!(e1 < 2e-3 && e2 < 0.2 * e1, "{e1} {e2}");
    }

    #[test]
    fn maximal_lower_bounds() {
        let p = BesselParam::new(1.0).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let s = spec();
        for &x in &[2.5, 5.0, 20.0] {
            let m = maximal_apply(Semigroup::Heat, &p, &f, x, &s).unwrap();
            assert!(m.value * x.powi(3) > 0.1 && !m.on_boundary, "x={x}");
        }
        for &x in &[0.5, 0.1, 0.02] {
            let m = maximal_apply(Semigroup::Heat, &p, &f, x, &s).unwrap();
            assert!(m.value * x.powi(2) > 0.0 && m.value >= heat_apply(&p, 1.0, &f, x, &s).unwrap().value);
        }
    }

    #[test]
    fn poisson_maximal_below_heat_maximal() {
        let p = BesselParam::new(0.5).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        for &x in &[0.3, 1.5, 3.0] {
            let w = maximal_apply(Semigroup::Heat, &p, &f, x, &spec()).unwrap().value;
            let q = maximal_apply(Semigroup::Poisson, &p, &f, x, &spec()).unwrap().value;
            assert!(q <= w * (1.0 + 1e-12), "x={x}: {q} > {w}");
        }
    }

    #[test]
    fn potential_matches_poisson_time_integral() {
        let p = BesselParam::new(1.0).unwrap();
        let f = SampledFunction::smooth_bump(1.5, 0.5).unwrap();
        let s = QuadratureSpec::with_tol(1e-10);
        for &x in &[0.5, 1.4, 3.0] {
            let pot = potential_apply(&p, &f, x, &s).unwrap().value;
            let g = |t: f64| poisson_apply(&p, t, &f, x, &s).unwrap().value;
            let alt = crate::quad::integrate_t(&g, &s, x.max(2.0), 3.0).unwrap().value;
            assert!((pot - alt).abs() < 1e-6 * alt.abs(), "x={x}: {pot} {alt}");
        }
    }

    #[test]
    fn potential_needs_compensation_for_nonpositive_lambda() {
        let p = BesselParam::new(-0.3).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let s = QuadratureSpec::with_tol(1e-10);
        let v = potential_apply(&p, &f, 0.5, &s).unwrap();
        assert!(v.value.is_finite());
        assert!(matches!(potential_apply_with(&p, &f, 0.5, false, &s), Err(Error::Divergence(_))));
    }

    #[test]
    fn conj_poisson_decays_in_t() {
        let p = BesselParam::new(1.0).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let s = QuadratureSpec::with_tol(1e-10);
        let a = conj_poisson_apply(&p, 10.0, &f, 1.5, &s).unwrap().value.abs();
        let b = conj_poisson_apply(&p, 100.0, &f, 1.5, &s).unwrap().value.abs();
        assert!(b < 0.02 * a, "{a} {b}");
    }
}
