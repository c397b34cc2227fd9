use super::{apply_kernel, grid_sup, semigroup::time_range, sup_scale};
use crate::error::{invalid, Result};
use crate::kernels::BesselParam;
use crate::quad::{adaptive, QuadratureSpec};
use crate::sampled::SampledFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyKind {
    /// `H_0^η f(x) = x^{-η-1} ∫_0^x f y^η dy`
    Origin,
    /// `H_∞^η f(x) = x^η ∫_x^∞ f y^{-η-1} dy`
    Infinity,
}

impl HardyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HardyKind::Origin => "origin",
            HardyKind::Infinity => "infinity",
        }
    }
}

fn tight() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-12, abs_tol: 1e-300, max_subdiv: 2000, ..QuadratureSpec::default() }
}

/// `∫_a^b f y^e dy`, in closed form for presets.
fn power_moment(f: &SampledFunction, e: f64, a: f64, b: f64) -> Result<f64> {
    if let Some(v) = f.weighted_integral_exact(e, a, b) {
        return Ok(v);
    }
    let s = tight();
    apply_kernel(&|_| 1.0, f, e, (a, b), &[], s.rel_tol, 1e-16 * sup_scale(f), s.max_subdiv).check()
}

pub fn hardy_apply(kind: HardyKind, eta: f64, f: &SampledFunction, x: f64) -> Result<f64> {
    if !(eta > -1.0) {
        return invalid(format!("Hardy operator needs eta > -1, got {eta}"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("Hardy operator needs x > 0, got {x}"));
    }
    Ok(match kind {
        HardyKind::Origin => x.powf(-eta - 1.0) * power_moment(f, eta, 0.0, x)?,
        HardyKind::Infinity => x.powf(eta) * power_moment(f, -eta - 1.0, x, f64::INFINITY)?,
    })
}

/// `sup (v-u)^{-1} ∫_u^v |f|` over `x/k < u < x < v < ku`.
///
/// Scans `x - u` and `v - x` on geometric ladders shrinking towards `x`, then
/// rescans the cell around the best pair on a finer ladder.
pub fn local_max(k: f64, f: &SampledFunction, x: f64) -> Result<f64> {
    if !(k > 1.0) {
        return invalid(format!("local maximal function needs k > 1, got {k}"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("local maximal function needs x > 0, got {x}"));
    }
    let breaks = f.breakpoints();
    let mass = |u: f64, v: f64| {
        let (lo, hi) = f.support();
        let (a, b) = (u.max(lo), v.min(hi));
        if b <= a {
            0.0
        } else {
            adaptive(&|y: f64| f.eval(y).abs(), a, b, &breaks, 1e-12, 1e-300, 400).value
        }
    };
    let avg = |du: f64, dv: f64| {
        let (u, v) = (x - du, x + dv);
        if u <= x / k || v >= k * u {
            return f64::NEG_INFINITY;
        }
        mass(u, v) / (v - u)
    };
    let du_max = x * (1.0 - 1.0 / k);
    let dv_max = x * (k - 1.0);
    let levels = 48;
    let ladder = |top: f64, i: usize| top * (1.0 - 1e-9) * 0.5f64.powi(i as i32);
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for i in 0..levels {
        for j in 0..levels {
            let v = avg(ladder(du_max, i), ladder(dv_max, j));
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let (_, bi, bj) = best;
    let span = |top: f64, i: usize| {
        let hi = ladder(top, i.saturating_sub(1));
        let lo = ladder(top, (i + 1).min(levels + 8));
        (lo, hi)
    };
    let (ua, ub) = span(du_max, bi);
    let (va, vb) = span(dv_max, bj);
    let m = 24;
    for a in 0..=m {
        for b in 0..=m {
            let du = ua * (ub / ua).powf(a as f64 / m as f64);
            let dv = va * (vb / va).powf(b as f64 / m as f64);
            best.0 = best.0.max(avg(du, dv));
        }
    }
    Ok(best.0.max(0.0))
}

/// Auxiliary maximal operator `sup_t |∫_x^∞ (y²/t)^{λ+1/2} e^{-c y²/t} f(y) dy/y|`.
pub fn aux_t(p: &BesselParam, f: &SampledFunction, x: f64, c: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(c > 0.0) {
        return invalid(format!("aux_T needs c > 0, got {c}"));
    }
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("aux_T needs x > 0, got {x}"));
    }
    let e = p.lambda() + 0.5;
    let floor = 1e-16 * sup_scale(f);
    let h = |t: f64| {
        let k = |y: f64| {
            let s = y * y / t;
            s.powf(e) * (-c * s).exp()
        };
        let breaks = [t.sqrt(), 4.0 * t.sqrt(), 16.0 * t.sqrt()];
        apply_kernel(&k, f, -1.0, (x, f64::INFINITY), &breaks, spec.rel_tol, spec.abs_tol.max(floor), spec.max_subdiv).check()
    };
    let (t0, t1, n) = time_range(true, f, x, spec);
    Ok(grid_sup(&h, t0, t1, n)?.0)
}

/// `N f(x) = ∫_{x/2}^{2x} (1 + ln(xy/(x-y)²)) f(y) dy/y`.
pub fn aux_n(f: &SampledFunction, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("aux_N needs x > 0, got {x}"));
    }
    let k = |y: f64| {
        if y == x {
            0.0
        } else {
            (1.0 + (x * y / ((x - y) * (x - y))).ln()) / y
        }
    };
    let mut breaks = vec![x];
    for d in [1e-1, 1e-2, 1e-3, 1e-4] {
        breaks.extend([x * (1.0 - d), x * (1.0 + d)]);
    }
    let s = tight();
    apply_kernel(&k, f, 0.0, (0.5 * x, 2.0 * x), &breaks, 1e-11, 1e-16 * sup_scale(f), s.max_subdiv).check()
}

/// `𝒩 f(x) = ∫_{x/2}^{2x} f(y) dy/y`.
pub fn aux_cal_n(f: &SampledFunction, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("aux_calN needs x > 0, got {x}"));
    }
    let s = tight();
    apply_kernel(&|_| 1.0, f, -1.0, (0.5 * x, 2.0 * x), &[], s.rel_tol, 1e-16 * sup_scale(f), s.max_subdiv).check()
}

/// Sups over time of the heat integral restricted to `y < x/2`, `x/2 ≤ y ≤ 2x`
/// and `y > 2x`; the three pieces of the maximal operator split.
pub fn maximal_pieces(p: &BesselParam, f: &SampledFunction, x: f64, spec: &QuadratureSpec) -> Result<[f64; 3]> {
    if !(x > 0.0 && x.is_finite()) {
        return invalid(format!("maximal pieces need x > 0, got {x}"));
    }
    let (t0, t1, n) = time_range(true, f, x, spec);
    let floor = 1e-16 * sup_scale(f);
    let ranges = [(0.0, 0.5 * x), (0.5 * x, 2.0 * x), (2.0 * x, f64::INFINITY)];
    let mut out = [0.0; 3];
    for (o, range) in out.iter_mut().zip(ranges) {
        let h = |t: f64| {
            let breaks = super::around(x, (2.0 * t).sqrt());
            apply_kernel(
                &|y| p.heat(t, x, y),
                f,
                p.measure_exponent(),
                range,
                &breaks,
                spec.rel_tol,
                spec.abs_tol.max(floor),
                spec.max_subdiv,
            )
            .check()
        };
        *o = grid_sup(&h, t0, t1, n)?.0;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardy_origin_indicator() {
        let f = SampledFunction::indicator(0.0, 1.0).unwrap();
        for &eta in &[-0.5, 0.0, 2.0] {
            for &x in &[0.3, 1.0, 4.0] {
                let got = hardy_apply(HardyKind::Origin, eta, &f, x).unwrap();
                let want = if x >= 1.0 { x.powf(-eta - 1.0) / (eta + 1.0) } else { 1.0 / (eta + 1.0) };
                assert!((got - want).abs() < 1e-13 * want, "eta={eta} x={x}: {got} {want}");
            }
        }
    }

    #[test]
    fn hardy_infinity_indicator() {
        let f = SampledFunction::indicator(0.0, 1.0).unwrap();
        for &x in &[0.01, 0.5] {
            let got = hardy_apply(HardyKind::Infinity, 0.0, &f, x).unwrap();
            assert!((got - (1.0 / x).ln()).abs() < 1e-13);
            let eta = 1.5;
            let got = hardy_apply(HardyKind::Infinity, eta, &f, x).unwrap();
            let want = (1.0 - x.powf(eta)) / eta;
            assert!((got - want).abs() < 1e-13, "{got} {want}");
        }
        assert_eq!(hardy_apply(HardyKind::Infinity, 1.0, &f, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn local_max_cases() {
        let one = SampledFunction::Constant(1.0);
        assert!((local_max(4.0, &one, 3.0).unwrap() - 1.0).abs() < 1e-12);
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        assert!((local_max(4.0, &f, 1.0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(local_max(4.0, &f, 10.0).unwrap(), 0.0);
        // x = 4: u > 1, the best window is (1⁺, v) with v → x⁺: average → 1/3
        let v = local_max(4.0, &f, 4.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn aux_operators_on_constants() {
        let one = SampledFunction::Constant(1.0);
        for &x in &[0.1, 1.0, 30.0] {
            assert!((aux_cal_n(&one, x).unwrap() - 4f64.ln()).abs() < 1e-12);
        }
        let a = aux_n(&one, 0.2).unwrap();
        let b = aux_n(&one, 7.0).unwrap();
        assert!(a.is_finite() && (a - b).abs() < 1e-9 * a.abs(), "{a} {b}");
    }

    #[test]
    fn aux_t_dominated_by_hardy() {
        let p = BesselParam::new(1.0).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let s = QuadratureSpec::default();
        let mut worst: f64 = 0.0;
        for &x in &[0.01, 0.3, 1.2, 1.8] {
            let t = aux_t(&p, &f, x, 0.25, &s).unwrap();
            let h = hardy_apply(HardyKind::Infinity, 0.0, &f, x).unwrap();
            worst = worst.max(t / h);
        }
        assert!(worst.is_finite() && worst < 10.0, "{worst}");
    }

    #[test]
    fn maximal_pieces_sum_dominates() {
        let p = BesselParam::new(0.5).unwrap();
        let f = SampledFunction::indicator(1.0, 2.0).unwrap();
        let s = QuadratureSpec::default();
        let x = 1.5;
        let pieces = maximal_pieces(&p, &f, x, &s).unwrap();
        let m = super::super::maximal_apply(super::super::Semigroup::Heat, &p, &f, x, &s).unwrap().value;
        assert!(m <= pieces.iter().sum::<f64>() * (1.0 + 1e-12));
        assert_eq!(pieces[0], 0.0);
    }
}
