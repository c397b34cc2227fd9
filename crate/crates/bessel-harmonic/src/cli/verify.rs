use super::output::Json;
use crate::error::Result;
use crate::kernels::{
    check_heat_bounds, check_heat_dt_energy, check_heat_dt_sign, check_poisson_lower, check_poisson_ratio, check_riesz_bounds,
    check_riesz_signs, riesz_limit_constants, spectral_oracle, BesselParam, LemmaReport, PoissonMethod, RieszMethod, SpectralKind,
};
use crate::operators::{g_heat, g_poisson, maximal_apply, plancherel_ratio, potential_apply, riesz_apply, riesz_composition, Semigroup};
use crate::quad::{integrate_measure, QuadratureSpec};
use crate::sampled::SampledFunction;
use crate::specfun::gamma_fn;
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kernels,
    Identities,
    Lemmas,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub check: String,
    pub citation: &'static str,
    pub passed: bool,
    /// Measured defect, compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckRecord {
    pub fn to_json(&self) -> String {
        let mut j = Json::new();
        j.str("suite", self.suite)
            .str("check", &self.check)
            .str("citation", self.citation)
            .str("status", if self.passed { "PASS" } else { "FAIL" })
            .num("value", self.value)
            .num("tolerance", self.tolerance)
            .str("detail", &self.detail);
        j.finish()
    }
}

fn record(suite: &'static str, check: impl Into<String>, citation: &'static str, tolerance: f64, r: Result<(f64, String)>) -> CheckRecord {
    let check = check.into();
    match r {
        Ok((value, detail)) => CheckRecord { suite, check, citation, passed: value <= tolerance, value, tolerance, detail },
        Err(e) => CheckRecord { suite, check, citation, passed: false, value: f64::NAN, tolerance, detail: format!("error: {e}") },
    }
}

/// Relative error; NaN counts as infinitely wrong.
fn rel(a: f64, b: f64) -> f64 {
    let e = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

/// Log-uniform triples in `[lo, hi]³`.
fn random_triples(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || lo * (hi / lo).powf(rng.gen::<f64>());
    (0..n).map(|_| (draw(), draw(), draw())).collect()
}

/// Largest relative error of `got` against `want` over the points, with the worst point.
fn worst<F, G>(pts: &[(f64, f64, f64)], got: F, want: G) -> Result<(f64, String)>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync,
    G: Fn(f64, f64, f64) -> f64 + Sync,
{
    let errs: Vec<f64> = pts.par_iter().map(|&(t, x, y)| got(t, x, y).map(|v| rel(v, want(t, x, y)))).collect::<Result<_>>()?;
    let (i, e) = errs.iter().enumerate().fold((0, 0.0f64), |(bi, be), (i, &e)| if e > be { (i, e) } else { (bi, be) });
    let (t, x, y) = pts[i];
    Ok((e, format!("{} points, worst at t={t:.6e} x={x:.6e} y={y:.6e}", pts.len())))
}

const LAMBDAS: [f64; 4] = [-0.3, 0.0, 1.0, 4.0];

fn heat0(t: f64, x: f64, y: f64) -> f64 {
    ((-(x - y).powi(2) / (4.0 * t)).exp() + (-(x + y).powi(2) / (4.0 * t)).exp()) / (4.0 * PI * t).sqrt()
}

fn poisson0(t: f64, x: f64, y: f64) -> f64 {
    t / PI * (1.0 / (t * t + (x - y).powi(2)) + 1.0 / (t * t + (x + y).powi(2)))
}

fn hilbert0(x: f64, y: f64) -> f64 {
    (1.0 / (y - x) - 1.0 / (y + x)) / PI
}

pub fn kernels_suite(seed: u64, spec: &QuadratureSpec) -> Vec<CheckRecord> {
    const S: &str = "kernels";
    let mut out = Vec::new();
    let pts = random_triples(seed, 200, 0.05, 20.0);
    let p0 = BesselParam::new(0.0).expect("valid lambda");
    out.push(record(
        S,
        "heat-lambda0-closed-form",
        "heat kernel at lambda = 0 by reflection",
        1e-12,
        worst(&pts, |t, x, y| Ok(p0.heat(t, x, y)), heat0),
    ));
    out.push(record(
        S,
        "poisson-lambda0-closed-form",
        "Poisson kernel at lambda = 0 by reflection",
        1e-12,
        worst(&pts, |t, x, y| p0.poisson(t, x, y), poisson0),
    ));
    out.push(record(
        S,
        "riesz-lambda0-closed-form",
        "Riesz kernel at lambda = 0 as a reflected Hilbert kernel",
        1e-12,
        worst(&pts, |_, x, y| p0.riesz(x, y, RieszMethod::Closed2F1), |_, x, y| hilbert0(x, y)),
    ));

    for &l in &[-0.3, 0.0, 0.5, 2.0] {
        let p = BesselParam::new(l).expect("valid lambda");
        let pts = random_triples(seed ^ l.to_bits(), 6, 0.3, 3.0);
        for kind in [SpectralKind::Heat, SpectralKind::Poisson, SpectralKind::HeatDx, SpectralKind::HeatDt] {
            let closed = |t: f64, x: f64, y: f64| -> Result<f64> {
                match kind {
                    SpectralKind::Heat => Ok(p.heat(t, x, y)),
                    SpectralKind::Poisson => p.poisson(t, x, y),
                    SpectralKind::HeatDx => Ok(p.heat_dx(t, x, y)),
                    SpectralKind::HeatDt => Ok(p.heat_dt(t, x, y)),
                }
            };
            let errs: Result<Vec<f64>> = pts
                .par_iter()
                .map(|&(t, x, y)| {
                    let o = spectral_oracle(kind, &p, t, x, y, spec)?;
                    Ok(rel(closed(t, x, y)?, o))
                })
                .collect();
            let r = errs.map(|e| (e.iter().fold(0.0f64, |m, &v| m.max(v)), format!("lambda={l}, {} points", e.len())));
            out.push(record(
                S,
                format!("spectral-{}-lambda{l}", kind.as_str()),
                "eigenfunction expansion of the semigroup kernels",
                1e-7,
                r,
            ));
        }
    }

    for &l in &LAMBDAS {
        let p = BesselParam::new(l).expect("valid lambda");
        let two_l = p.measure_exponent();
        let pts = random_triples(seed.wrapping_add(l.to_bits()), 5, 0.1, 10.0);
        let mass: Result<Vec<f64>> = pts
            .iter()
            .map(|&(t, x, _)| {
                let w = (2.0 * t).sqrt();
                integrate_measure(&|z| p.heat(t, x, z), two_l, 0.0, f64::INFINITY, &[x, x + w, (x - w).max(0.5 * x)], spec)
                    .check()
                    .map(|m| (m - 1.0).abs())
            })
            .collect();
        let r = mass.map(|e| (e.iter().fold(0.0f64, |m, &v| m.max(v)), format!("lambda={l}")));
        out.push(record(S, format!("heat-conservation-lambda{l}"), "conservation of the heat semigroup", 1e-8, r));

        let ck: Result<Vec<f64>> = pts
            .iter()
            .map(|&(t, x, y)| {
                let s = 0.5 * t;
                let h = |z: f64| p.heat(s, x, z) * p.heat(t, z, y);
                let v = integrate_measure(&h, two_l, 0.0, f64::INFINITY, &[x, y, 0.5 * (x + y)], spec).check()?;
                Ok(rel(v, p.heat(s + t, x, y)))
            })
            .collect();
        let r = ck.map(|e| (e.iter().fold(0.0f64, |m, &v| m.max(v)), format!("lambda={l}")));
        out.push(record(S, format!("heat-semigroup-lambda{l}"), "semigroup property of the heat kernel", 1e-7, r));

        let r = worst(
            &pts,
            |t, x, y| p.poisson_subordinated(t, x, y, spec),
            |t, x, y| crate::kernels::poisson_kernel(&p, t, x, y, PoissonMethod::ClosedForm, spec).unwrap_or(f64::NAN),
        );
        out.push(record(S, format!("poisson-subordination-lambda{l}"), "subordination formula for the Poisson kernel", 1e-8, r));
    }
    out
}

fn bumps() -> Vec<SampledFunction> {
    [(1.0, 0.5), (3.0, 1.0), (0.6, 0.3)].iter().map(|&(c, w)| SampledFunction::smooth_bump(c, w).expect("valid bump")).collect()
}

pub fn identities_suite(_seed: u64, spec: &QuadratureSpec) -> Vec<CheckRecord> {
    const S: &str = "identities";
    let mut out = Vec::new();
    let loose = QuadratureSpec { rel_tol: spec.rel_tol.max(1e-10), ..*spec };
    for &l in &[0.5, 1.0] {
        let p = BesselParam::new(l).expect("valid lambda");
        let f = &bumps()[0];
        match riesz_composition(&p, f, 40, &loose) {
            Ok(c) => {
                let d = format!("lambda={l}, {}, {} outer points", f.describe(), c.outer_points.len());
                out.push(record(
                    S,
                    format!("riesz-adjoint-composition-lambda{l}"),
                    "R* R = I on L2",
                    1e-3,
                    Ok((c.composition_defect, d.clone())),
                ));
                out.push(record(S, format!("riesz-isometry-lambda{l}"), "R is an isometry on L2", 1e-3, Ok((c.isometry_defect, d))));
            }
            Err(e) => out.push(record(S, format!("riesz-adjoint-composition-lambda{l}"), "R* R = I on L2", 1e-3, Err(e))),
        }
    }

    let p = BesselParam::new(1.0).expect("valid lambda");
    let f = &bumps()[0];
    let gspec = QuadratureSpec { rel_tol: 1e-7, ..*spec };
    let r = plancherel_ratio(|x| g_heat(&p, f, x, &gspec), &p, f, &gspec).map(|v| ((v - 0.25).abs(), format!("ratio={v:.12e}")));
    out.push(record(S, "g-plancherel-lambda1", "L2 identity for the heat square function", 1e-3, r));

    // R f = d/dx of the potential, by a fourth-order central difference
    let r = (|| -> Result<(f64, String)> {
        let mut e: f64 = 0.0;
        for &x in &[0.7, 1.2, 2.5] {
            let h = 1e-3 * x;
            let pot = |u: f64| potential_apply(&p, f, u, spec).map(|v| v.value);
            let d = (8.0 * (pot(x + h)? - pot(x - h)?) - (pot(x + 2.0 * h)? - pot(x - 2.0 * h)?)) / (12.0 * h);
            let rv = riesz_apply(&p, f, x, spec)?.value;
            e = e.max((rv - d).abs() / rv.abs().max(1e-3));
        }
        Ok((e, "x in {0.7, 1.2, 2.5}".to_string()))
    })();
    out.push(record(S, "riesz-derivative-of-potential-lambda1", "R as the derivative of the inverse square root", 1e-6, r));

    let doms = [SampledFunction::indicator(1.0, 2.0).expect("valid"), bumps()[1].clone()];
    let xs = [0.3, 1.0, 1.5, 2.5, 6.0];
    for &l in &[0.0, 1.0] {
        let p = BesselParam::new(l).expect("valid lambda");
        let r = (|| -> Result<(f64, String)> {
            let mut worst_excess: f64 = 0.0;
            let mut n = 0;
            for f in &doms {
                let vals: Vec<(f64, f64)> = xs
                    .par_iter()
                    .map(|&x| {
                        Ok((
                            maximal_apply(Semigroup::Poisson, &p, f, x, spec)?.value,
                            maximal_apply(Semigroup::Heat, &p, f, x, spec)?.value,
                        ))
                    })
                    .collect::<Result<_>>()?;
                for (pv, wv) in vals {
                    n += 1;
                    worst_excess = worst_excess.max((pv - wv) / wv.abs().max(f64::MIN_POSITIVE));
                }
            }
            Ok((worst_excess.max(0.0), format!("lambda={l}, {n} configurations")))
        })();
        out.push(record(S, format!("poisson-maximal-below-heat-lambda{l}"), "subordination bound P* <= W*", 1e-12, r));

        let r = (|| -> Result<(f64, String)> {
            let f = &bumps()[0];
            let vals: Vec<(f64, f64)> =
                xs.par_iter().map(|&x| Ok((g_poisson(&p, f, x, &gspec)?, g_heat(&p, f, x, &gspec)?))).collect::<Result<_>>()?;
            let excess = vals.iter().fold(0.0f64, |m, &(gp, gh)| m.max((gp - 2f64.sqrt() * gh) / gh.max(f64::MIN_POSITIVE)));
            Ok((excess.max(0.0), format!("lambda={l}, {} points", vals.len())))
        })();
        out.push(record(S, format!("poisson-square-below-heat-lambda{l}"), "Poisson square function bounded by sqrt(2) g", 1e-12, r));
    }
    out
}

fn lemma_record(r: Result<LemmaReport>, citation: &'static str) -> CheckRecord {
    match r {
        Ok(rep) => {
            let drift = rep.constants.iter().fold(0.0f64, |m, c| m.max((c.coarse / c.fine - 1.0).abs()));
            let check = format!("{}-lambda{}", rep.name, rep.lambda);
            // sign and limit conditions count as well as the drift
            let mut rec = record("lemmas", check, citation, 0.1, Ok((drift, rep.summary())));
            rec.passed = rep.passed();
            rec
        }
        Err(e) => record("lemmas", "lemma", citation, 0.1, Err(e)),
    }
}

pub fn lemmas_suite(_seed: u64, spec: &QuadratureSpec) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    let espec = QuadratureSpec { rel_tol: spec.rel_tol.max(1e-9), ..*spec };
    for &l in &[0.5, 1.0] {
        let p = BesselParam::new(l).expect("valid lambda");
        out.push(lemma_record(Ok(check_heat_bounds(&p, 24)), "heat kernel bounds by region"));
        out.push(lemma_record(check_riesz_bounds(&p, 24), "Riesz kernel bounds by region"));
        let mut signs = lemma_record(check_riesz_signs(&p, 40), "Riesz kernel signs and limits");
        if let (Ok((lo, hi)), Ok(g1), Ok(g2), Ok(g3)) = (riesz_limit_constants(l), gamma_fn(l + 1.0), gamma_fn(l + 0.5), gamma_fn(l + 1.5))
        {
            signs.detail.push_str(&format!(
                " limits {lo:.10e} {hi:.10e}; without the 1/sqrt(pi) factor {:.10e} {:.10e}",
                -2.0 * g1 / g2,
                g1 / g3
            ));
        }
        out.push(signs);
        out.push(lemma_record(check_heat_dt_energy(&p, 12, &espec), "local energy of the heat time derivative"));
        out.push(lemma_record(check_poisson_ratio(&p, 24), "two-sided Poisson kernel estimate"));
        out.push(lemma_record(Ok(check_heat_dt_sign(&p, 16)), "negativity of the heat time derivative"));
        out.push(lemma_record(check_poisson_lower(&p, 24), "local lower bound of the Poisson kernel"));
    }
    out
}

pub fn run_suite(suite: Suite, seed: u64, spec: &QuadratureSpec) -> Vec<CheckRecord> {
    match suite {
        Suite::Kernels => kernels_suite(seed, spec),
        Suite::Identities => identities_suite(seed, spec),
        Suite::Lemmas => lemmas_suite(seed, spec),
        Suite::All => {
            let mut v = kernels_suite(seed, spec);
            v.extend(identities_suite(seed, spec));
            v.extend(lemmas_suite(seed, spec));
            v
        }
    }
}
