use crate::error::{invalid, Error, Result};
use crate::kernels::BesselParam;
use crate::operators::{
    g_loc, maximal_apply, norm_estimate, riesz_apply, Estimate, NormMode, OperatorReport, Semigroup, TailPolicy, WeightedSpace,
};
use crate::quad::{log_points, QuadratureSpec};
use crate::sampled::{power_integral_ln, SampledFunction};

/// Fewest grid points accepted by a growth fit.
pub const MIN_POINTS: usize = 8;
pub const MIN_R2: f64 = 0.99;
/// Smallest log-log slope counted as unbounded growth along `n`.
pub const MIN_GROWTH_SLOPE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharpnessTarget {
    WMax,
    Riesz,
    GLoc,
}

impl SharpnessTarget {
    pub fn as_str(&self) -> &'static str {
        match self {
            SharpnessTarget::WMax => "wmax",
            SharpnessTarget::Riesz => "riesz",
            SharpnessTarget::GLoc => "gloc",
        }
    }

    pub fn parse(s: &str) -> Option<SharpnessTarget> {
        [SharpnessTarget::WMax, SharpnessTarget::Riesz, SharpnessTarget::GLoc].into_iter().find(|t| t.as_str() == s)
    }
}

/// Least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl GrowthFit {
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<GrowthFit> {
        let n = xs.len() as f64;
        if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !v.is_finite()) {
            return invalid("growth fit needs at least two finite pairs");
        }
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        if sxx == 0.0 {
            return invalid("growth fit needs distinct abscissae");
        }
        let slope = sxy / sxx;
        let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
        Ok(GrowthFit { slope, intercept: my - slope * mx, r2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub experiment: String,
    pub lambda: f64,
    pub p: f64,
    pub delta: f64,
    /// `ε` values (decreasing) or `n` values (increasing).
    pub grid: Vec<f64>,
    /// Norm of each input.
    pub input_norms: Vec<f64>,
    /// Output norm over input norm.
    pub ratios: Vec<f64>,
    pub fit: GrowthFit,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// `2^{-3}, …, 2^{-12}`.
pub fn default_eps_grid() -> Vec<f64> {
    (3..=12).map(|k| 0.5f64.powi(k)).collect()
}

pub fn default_n_grid() -> Vec<f64> {
    vec![2.0, 3.0, 4.0, 6.0, 8.0, 11.0, 16.0, 23.0, 32.0]
}

/// Closest edge offset, relative to `ε`.
const EDGE_CLUSTER: f64 = 1.0 / 256.0;

/// Sample points for an output of `χ_(1, 1+ε)`-type input: a coarse log grid
/// plus geometric clusters at the support edges and at `extra` points.
fn sample_points(eps: f64, extra: &[f64]) -> Vec<f64> {
    let (a, b) = (1.0, 1.0 + eps);
    let mut xs = log_points(1e-3, 1e3, 97);
    let offsets: Vec<f64> = (0..=40).map(|k| eps * EDGE_CLUSTER * 2f64.powf(0.5 * k as f64)).filter(|&o| o < 0.45).collect();
    for &o in &offsets {
        xs.push(b + o);
        xs.push(a - o);
        if o < 0.5 * eps {
            xs.push(a + o);
            xs.push(b - o);
        }
    }
    for &e in extra {
        for &o in &offsets {
            xs.push(e * (1.0 + o));
            xs.push(e * (1.0 - o));
        }
    }
    xs.retain(|&x| x > 0.0 && (x - a).abs() > 1e-3 * eps && (x - b).abs() > 1e-3 * eps);
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|u, v| (*u - *v).abs() <= 1e-12 * v.abs());
    xs
}

/// `‖T f_ε‖_{L¹(x^δ)} / ‖f_ε‖_{L¹(x^δ)}` along `ε → 0` with `f_ε = χ_(1,1+ε)`
/// (times `x^{-λ}` for the Riesz transform), fitted against `ln(1/ε)`.
pub fn sharpness_l1_blowup(
    target: SharpnessTarget,
    lambda: f64,
    delta: f64,
    eps_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<SharpnessReport> {
    let p = BesselParam::new(lambda)?;
    let two_l = 2.0 * lambda;
    let in_range = match target {
        SharpnessTarget::WMax | SharpnessTarget::GLoc => delta > -1.0 && delta <= two_l,
        SharpnessTarget::Riesz => (-2.0..=two_l).contains(&delta),
    };
    if !in_range {
        return invalid(format!("delta = {delta} is outside the weak-but-not-strong range of {}", target.as_str()));
    }
    if eps_grid.len() < MIN_POINTS {
        return invalid(format!("epsilon grid needs at least {MIN_POINTS} points"));
    }
    if eps_grid.windows(2).any(|w| !(w[1] < w[0])) || !(eps_grid[0] < 0.5) || !(eps_grid[eps_grid.len() - 1] > 0.0) {
        return invalid("epsilon grid must be strictly decreasing in (0, 1/2)");
    }
    let space = WeightedSpace::new(1.0, delta)?;
    let mut ratios = Vec::new();
    let mut input_norms = Vec::new();
    for &eps in eps_grid {
        let f = match target {
            SharpnessTarget::Riesz => SampledFunction::power_cutoff(1.0, -lambda, 1.0, 1.0 + eps)?,
            _ => SampledFunction::indicator(1.0, 1.0 + eps)?,
        };
        let base = f.lp_norm(1.0, delta, spec)?;
        let report = match target {
            SharpnessTarget::WMax => {
                let xs = sample_points(eps, &[]);
                // the sup near an edge at distance d sits at t ≈ d²
                let mut fine = *spec;
                fine.maximal.lo = fine.maximal.lo.min(1e-2 * (eps * EDGE_CLUSTER).powi(2));
                OperatorReport::sample("wmax", &f, &xs, |x| {
                    maximal_apply(Semigroup::Heat, &p, &f, x, &fine).map(|m| Estimate { value: m.value, error: 0.0 })
                })?
            }
            SharpnessTarget::Riesz => {
                let xs = sample_points(eps, &[0.5, 0.5 * (1.0 + eps), 2.0, 2.0 * (1.0 + eps)]);
                OperatorReport::sample("riesz", &f, &xs, |x| riesz_apply(&p, &f, x, spec))?
            }
            SharpnessTarget::GLoc => {
                let (lo, hi) = (0.5, 2.0 * (1.0 + eps));
                let mut fine = *spec;
                fine.t_grid.t_min = fine.t_grid.t_min.min(1e-3 * (eps * EDGE_CLUSTER).powi(2));
                let xs: Vec<f64> = sample_points(eps, &[lo, hi]).into_iter().filter(|&x| x > lo && x < hi).collect();
                OperatorReport::sample("gloc", &f, &xs, |x| g_loc(&p, &f, x, &fine).map(|v| Estimate { value: v, error: 0.0 }))?
                    .with_tails(TailPolicy::Zero, TailPolicy::Zero)
            }
        };
        let out = norm_estimate(&report, space, NormMode::Strong)?.value;
        if !out.is_finite() {
            return Err(Error::Divergence(format!("output norm at eps = {eps} is not finite")));
        }
        input_norms.push(base);
        ratios.push(out / base);
    }
    let logs: Vec<f64> = eps_grid.iter().map(|e| (1.0 / e).ln()).collect();
    let fit = GrowthFit::fit(&logs, &ratios)?;
    let verdict = if fit.slope > 0.0 && fit.r2 >= MIN_R2 { Verdict::Pass } else { Verdict::Fail };
    Ok(SharpnessReport {
        experiment: format!("l1_blowup/{}", target.as_str()),
        lambda,
        p: 1.0,
        delta,
        grid: eps_grid.to_vec(),
        input_norms,
        ratios,
        fit,
        verdict,
        note: None,
    })
}

/// Exponent `(2λ - δ)p' + δ` of the integral `∫_0^1 x^e dx` that must diverge
/// at the right end of the strong region.
pub fn boundary_exponent(lambda: f64, p: f64, delta: f64) -> f64 {
    let pc = p / (p - 1.0);
    (2.0 * lambda - delta) * pc + delta
}

/// Weak quasi-norms of `W_* f_n` for `f_n = c_n y^β χ_(a_n, 1)` with
/// `β = (2λ - δ)p'/p`, `ln(1/a_n) = n^{p'}` and `‖f_n‖_{L^p(x^δ)} = 1`.
///
/// At `δ = (2λ+1)p - 1` this gives `∫_0^1 f_n dμ_λ = n`. Growth is fitted on
/// log-log axes; `Pass` means monotone growth with slope at least
/// [`MIN_GROWTH_SLOPE`] and `R² ≥` [`MIN_R2`].
pub fn sharpness_boundary_weak(lambda: f64, p_exp: f64, delta: f64, n_grid: &[f64], spec: &QuadratureSpec) -> Result<SharpnessReport> {
    let p = BesselParam::new(lambda)?;
    if !(p_exp > 1.0 && p_exp.is_finite()) {
        return invalid(format!("boundary experiment needs 1 < p < inf, got {p_exp}"));
    }
    if n_grid.len() < MIN_POINTS {
        return invalid(format!("n grid needs at least {MIN_POINTS} points"));
    }
    if n_grid.windows(2).any(|w| !(w[1] > w[0])) || !(n_grid[0] >= 1.0) {
        return invalid("n grid must be strictly increasing and start at 1 or above");
    }
    let space = WeightedSpace::new(p_exp, delta)?;
    let pc = space.conjugate();
    let beta = (2.0 * lambda - delta) * pc / p_exp;
    let e = boundary_exponent(lambda, p_exp, delta);
    let divergent = e <= -1.0 + 1e-12;
    let xs = log_points(1e-4, 1e4, 65);
    let mut ratios = Vec::new();
    let mut input_norms = Vec::new();
    for &n in n_grid {
        let ln_a = -n.powf(pc);
        let c = power_integral_ln(e, ln_a, 0.0).powf(-1.0 / p_exp);
        let mass = c * power_integral_ln(beta + 2.0 * lambda, ln_a, 0.0);
        if divergent && !(mass >= n * (1.0 - 1e-9)) {
            return Err(Error::Degenerate(format!("truncation at n = {n} gives mass {mass} < n")));
        }
        let f = SampledFunction::power_cutoff_ln(c, beta, ln_a, 0.0)?;
        let report = OperatorReport::sample("wmax", &f, &xs, |x| {
            maximal_apply(Semigroup::Heat, &p, &f, x, spec).map(|m| Estimate { value: m.value, error: 0.0 })
        })?;
        let w = norm_estimate(&report, space, NormMode::Weak)?.value;
        input_norms.push(f.lp_norm(p_exp, delta, spec)?);
        ratios.push(w);
    }
    let ln_n: Vec<f64> = n_grid.iter().map(|n| n.ln()).collect();
    let ln_r: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let fit = GrowthFit::fit(&ln_n, &ln_r)?;
    let monotone = ratios.windows(2).all(|w| w[1] > w[0]);
    let verdict = if monotone && fit.slope >= MIN_GROWTH_SLOPE && fit.r2 >= MIN_R2 { Verdict::Pass } else { Verdict::Fail };
    let note = Some(format!("integral of x^{e:.6} over (0,1) is {}", if divergent { "divergent" } else { "finite" }));
    Ok(SharpnessReport {
        experiment: "boundary_weak/wmax".to_string(),
        lambda,
        p: p_exp,
        delta,
        grid: n_grid.to_vec(),
        input_norms,
        ratios,
        fit,
        verdict,
        note,
    })
}
