//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criterion 7 is known red: the literal limit constants of the Riesz kernel
//! lack a factor `1/sqrt(pi)`, so the run reports FAIL for it without failing
//! the process. Any other FAIL exits non-zero.

use bessel_harmonic::kernels::{
    check_heat_bounds, check_heat_dt_energy, check_heat_dt_sign, check_poisson_lower, check_poisson_ratio, check_riesz_bounds,
    check_riesz_signs, poisson_kernel, riesz_limit_constants, spectral_oracle, BesselParam, LemmaReport, PoissonMethod, RieszMethod,
    SpectralKind,
};
use bessel_harmonic::operators::{g_heat, g_poisson, maximal_apply, plancherel_ratio, riesz_composition, Semigroup};
use bessel_harmonic::quad::{integrate_measure, QuadratureSpec};
use bessel_harmonic::sampled::SampledFunction;
use bessel_harmonic::theory::{
    classify_exact, default_eps_grid, default_n_grid, sharpness_boundary_weak, sharpness_l1_blowup, Exponent, MappedOperator,
    MappingClassSet, Rat, Real, SharpnessTarget, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

const KNOWN_RED: [u32; 1] = [7];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    let e = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    if e.is_nan() {
        f64::INFINITY
    } else {
        e
    }
}

fn triples(seed: u64, n: usize, lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || lo * (hi / lo).powf(rng.gen::<f64>());
    (0..n).map(|_| (draw(), draw(), draw())).collect()
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn bumps() -> [SampledFunction; 3] {
    [(1.0, 0.5), (3.0, 1.0), (0.6, 0.3)].map(|(c, w)| SampledFunction::smooth_bump(c, w).unwrap())
}

fn heat0(t: f64, x: f64, y: f64) -> f64 {
    ((-(x - y).powi(2) / (4.0 * t)).exp() + (-(x + y).powi(2) / (4.0 * t)).exp()) / (4.0 * PI * t).sqrt()
}

fn poisson0(t: f64, x: f64, y: f64) -> f64 {
    t / PI * (1.0 / (t * t + (x - y).powi(2)) + 1.0 / (t * t + (x + y).powi(2)))
}

fn hilbert0(x: f64, y: f64) -> f64 {
    (1.0 / (y - x) - 1.0 / (y + x)) / PI
}

fn closed_forms() -> Outcome {
    let pts = triples(1, 1000, 0.05, 20.0);
    let p = BesselParam::new(0.0).unwrap();
    let h = max_of(pts.iter().map(|&(t, x, y)| rel(p.heat(t, x, y), heat0(t, x, y))));
    let q = max_of(pts.iter().map(|&(t, x, y)| rel(p.poisson(t, x, y).unwrap_or(f64::NAN), poisson0(t, x, y))));
    let r = max_of(pts.iter().map(|&(_, x, y)| rel(p.riesz(x, y, RieszMethod::Auto).unwrap_or(f64::NAN), hilbert0(x, y))));
    outcome(h.max(q).max(r) <= 1e-12, format!("1000 points: heat {h:.2e}, poisson {q:.2e}, riesz {r:.2e}"))
}

fn spectral() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for &l in &[-0.3, 0.0, 0.5, 2.0] {
        let p = BesselParam::new(l).unwrap();
        let pts = triples(2 ^ l.to_bits(), 100, 0.3, 3.0);
        for kind in [SpectralKind::Heat, SpectralKind::Poisson, SpectralKind::HeatDx, SpectralKind::HeatDt] {
            let errs: Vec<f64> = pts
                .par_iter()
                .map(|&(t, x, y)| {
                    let closed = match kind {
                        SpectralKind::Heat => Ok(p.heat(t, x, y)),
                        SpectralKind::Poisson => p.poisson(t, x, y),
                        SpectralKind::HeatDx => Ok(p.heat_dx(t, x, y)),
                        SpectralKind::HeatDt => Ok(p.heat_dt(t, x, y)),
                    };
                    match (closed, spectral_oracle(kind, &p, t, x, y, &spec)) {
                        (Ok(c), Ok(o)) => rel(c, o),
                        _ => f64::INFINITY,
                    }
                })
                .collect();
            errors += errs.iter().filter(|e| e.is_infinite()).count();
            worst = worst.max(max_of(errs));
        }
    }
    outcome(worst <= 1e-7, format!("4 lambdas x 4 kernels x 100 points: worst {worst:.2e}, {errors} errors"))
}

fn conservation_semigroup_subordination() -> (Outcome, Outcome) {
    let spec = QuadratureSpec::default();
    let (mut mass, mut ck, mut sub) = (0.0f64, 0.0f64, 0.0f64);
    for &l in &[-0.3, 0.0, 1.0, 4.0] {
        let p = BesselParam::new(l).unwrap();
        let two_l = p.measure_exponent();
        let pts = triples(3 ^ l.to_bits(), 20, 0.1, 10.0);
        let rows: Vec<(f64, f64, f64)> = pts
            .par_iter()
            .map(|&(t, x, y)| {
                let w = (2.0 * t).sqrt();
                let m = integrate_measure(&|z| p.heat(t, x, z), two_l, 0.0, f64::INFINITY, &[x, x + w, (x - w).max(0.5 * x)], &spec)
                    .check()
                    .map_or(f64::INFINITY, |m| (m - 1.0).abs());
                let s = 0.5 * t;
                let c = integrate_measure(&|z| p.heat(s, x, z) * p.heat(t, z, y), two_l, 0.0, f64::INFINITY, &[x, y, 0.5 * (x + y)], &spec)
                    .check()
                    .map_or(f64::INFINITY, |v| rel(v, p.heat(s + t, x, y)));
                let q = match (p.poisson_subordinated(t, x, y, &spec), poisson_kernel(&p, t, x, y, PoissonMethod::ClosedForm, &spec)) {
                    (Ok(a), Ok(b)) => rel(a, b),
                    _ => f64::INFINITY,
                };
                (m, c, q)
            })
            .collect();
        for (m, c, q) in rows {
            mass = mass.max(m);
            ck = ck.max(c);
            sub = sub.max(q);
        }
    }
    (
        outcome(mass <= 1e-8 && ck <= 1e-7, format!("mass defect {mass:.2e}, composition error {ck:.2e}")),
        outcome(sub <= 1e-8, format!("subordination vs closed form {sub:.2e}")),
    )
}

fn riesz_identity() -> Outcome {
    let spec = QuadratureSpec::with_tol(1e-10);
    let cases: Vec<(f64, usize)> = [0.5, 1.0, 3.0].iter().flat_map(|&l| (0..3).map(move |i| (l, i))).collect();
    let res: Vec<Result<(f64, f64), String>> = cases
        .par_iter()
        .map(|&(l, i)| {
            let p = BesselParam::new(l).unwrap();
            riesz_composition(&p, &bumps()[i], 40, &spec).map(|c| (c.composition_defect, c.isometry_defect)).map_err(|e| e.to_string())
        })
        .collect();
    let mut comp: f64 = 0.0;
    let mut iso: f64 = 0.0;
    for r in &res {
        match r {
            Ok((c, i)) => {
                comp = comp.max(*c);
                iso = iso.max(*i);
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(comp <= 1e-3 && iso <= 1e-3, format!("9 cases: composition {comp:.2e}, isometry {iso:.2e}"))
}

fn plancherel() -> Outcome {
    let spec = QuadratureSpec::with_tol(1e-7);
    let p = BesselParam::new(1.0).unwrap();
    let ratios: Vec<Result<f64, String>> =
        bumps().par_iter().map(|f| plancherel_ratio(|x| g_heat(&p, f, x, &spec), &p, f, &spec).map_err(|e| e.to_string())).collect();
    let mut worst: f64 = 0.0;
    let mut shown = Vec::new();
    for r in ratios {
        match r {
            Ok(v) => {
                worst = worst.max((v - 0.25).abs());
                shown.push(format!("{v:.9}"));
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(worst <= 1e-3, format!("ratios {}", shown.join(" ")))
}

fn lemma_drift(r: &LemmaReport) -> f64 {
    max_of(r.constants.iter().map(|c| (c.coarse / c.fine - 1.0).abs()))
}

fn lemmas() -> Outcome {
    let espec = QuadratureSpec::with_tol(1e-9);
    let mut drift: f64 = 0.0;
    let mut all_passed = true;
    for &l in &[0.5, 1.0] {
        let p = BesselParam::new(l).unwrap();
        let reports = [
            Ok(check_heat_bounds(&p, 24)),
            check_riesz_bounds(&p, 24),
            check_riesz_signs(&p, 40),
            check_heat_dt_energy(&p, 12, &espec),
            check_poisson_ratio(&p, 24),
            Ok(check_heat_dt_sign(&p, 16)),
            check_poisson_lower(&p, 24),
        ];
        for r in reports {
            match r {
                Ok(r) => {
                    drift = drift.max(lemma_drift(&r));
                    all_passed &= r.passed();
                }
                Err(_) => all_passed = false,
            }
        }
    }
    // limits at ratio 1e-4 against the literal constants and the corrected ones
    let mut literal: f64 = 0.0;
    let mut corrected: f64 = 0.0;
    for &l in &[-0.3, 0.5, 1.0, 2.0] {
        let p = BesselParam::new(l).unwrap();
        let g1 = libm::tgamma(l + 1.0);
        let lit = (-2.0 * g1 / libm::tgamma(l + 0.5), g1 / libm::tgamma(l + 1.5));
        let cor = riesz_limit_constants(l).unwrap();
        let near_zero_y = p.riesz(1.0, 1e-4, RieszMethod::Auto).unwrap_or(f64::NAN);
        let near_zero_x = p.riesz(1e-4, 1.0, RieszMethod::Auto).unwrap_or(f64::NAN) / 1e-4;
        literal = literal.max(rel(near_zero_y, lit.0)).max(rel(near_zero_x, lit.1));
        corrected = corrected.max(rel(near_zero_y, cor.0)).max(rel(near_zero_x, cor.1));
    }
    let pass = all_passed && drift <= 0.1 && literal <= 0.01;
    outcome(
        pass,
        format!(
            "checkers {}, drift {drift:.3}; limits vs literal constants {literal:.3e}, vs constants with 1/sqrt(pi) {corrected:.3e}",
            if all_passed { "pass" } else { "fail" }
        ),
    )
}

fn domination() -> Outcome {
    let spec = QuadratureSpec::default();
    let gspec = QuadratureSpec::with_tol(1e-7);
    let [b0, b1, b2] = bumps();
    let inputs = [SampledFunction::indicator(1.0, 2.0).unwrap(), b0, b1, b2];
    let xs = [0.2, 0.5, 0.8, 1.0, 1.3, 1.7, 2.5, 4.0, 8.0];
    let mut configs = Vec::new();
    for &l in &[0.0, 0.5, 1.0] {
        for i in 0..inputs.len() {
            for &x in &xs {
                configs.push((l, i, x));
            }
        }
    }
    let rows: Vec<Result<(f64, f64), String>> = configs
        .par_iter()
        .map(|&(l, i, x)| {
            let p = BesselParam::new(l).unwrap();
            let f = &inputs[i];
            let run = || -> bessel_harmonic::error::Result<(f64, f64)> {
                let pm = maximal_apply(Semigroup::Poisson, &p, f, x, &spec)?.value;
                let wm = maximal_apply(Semigroup::Heat, &p, f, x, &spec)?.value;
                let gp = g_poisson(&p, f, x, &gspec)?;
                let gh = g_heat(&p, f, x, &gspec)?;
                Ok(((pm - wm) / wm.max(f64::MIN_POSITIVE), (gp - 2f64.sqrt() * gh) / gh.max(f64::MIN_POSITIVE)))
            };
            run().map_err(|e| format!("lambda={l} input {i} x={x}: {e}"))
        })
        .collect();
    let (mut vm, mut vg, mut em, mut eg) = (0, 0, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for r in rows {
        match r {
            Ok((m, g)) => {
                vm += (m > 1e-12) as usize;
                vg += (g > 1e-12) as usize;
                em = em.max(m);
                eg = eg.max(g);
            }
            Err(e) => return outcome(false, format!("error: {e}")),
        }
    }
    outcome(
        vm + vg == 0,
        format!(
            "{} configurations: {vm} maximal and {vg} square-function violations, largest relative excess {em:.2e} / {eg:.2e}",
            configs.len()
        ),
    )
}

/// Truth table in integers: every quantity is scaled by 64 so that queries on
/// the 1/8 lattice compare exactly.
mod oracle {
    pub struct Flags {
        pub strong: bool,
        pub weak: bool,
        pub rw: bool,
    }

    /// `p8 = 8p` (`None` for infinity), `d8 = 8δ`, `l8 = 8λ` or `8η`.
    pub fn expected(op: &str, l8: i64, p8: Option<i64>, d8: i64) -> Option<Flags> {
        let d = 8 * d8;
        let Some(p8) = p8 else {
            return match op {
                "wmax" | "pmax" | "h0" => Some(Flags { strong: true, weak: true, rw: true }),
                "hinf" => Some(Flags { strong: l8 > 0, weak: l8 > 0, rw: l8 > 0 }),
                _ => None,
            };
        };
        let pg1 = p8 > 8;
        // (2λ+1)p - 1, (2λ+2)p - 1, -1-p, scaled by 64
        let right = (2 * l8 + 8) * p8 - 64;
        let right_adj = (2 * l8 + 16) * p8 - 64;
        let left_riesz = -64 - 8 * p8;
        let two_l = 16 * l8;
        let f = |strong: bool, weak: bool, rw: bool| Flags { strong, weak: weak || strong, rw: rw || weak || strong };
        Some(match op {
            "wmax" | "pmax" | "g" => {
                let inside = -64 < d && d < right;
                f(pg1 && inside, inside || d == two_l, -64 < d && d <= right)
            }
            "riesz" => {
                let inside = left_riesz < d && d < right;
                f(pg1 && inside, inside || d == -128 || d == two_l, left_riesz <= d && d <= right)
            }
            "riesz-adjoint" => {
                let inside = -64 < d && d < right_adj;
                f(pg1 && inside, inside || d == two_l + 64, -64 < d && d <= right_adj)
            }
            "h0" => {
                let edge = (l8 + 8) * p8 - 64;
                if pg1 {
                    f(d < edge, false, d == edge)
                } else {
                    f(false, d <= 8 * l8, false)
                }
            }
            "hinf" => {
                if pg1 {
                    let edge = -l8 * p8 - 64;
                    f(edge < d, false, l8 != 0 && d == edge)
                } else {
                    let edge = -8 * l8 - 64;
                    f(false, if l8 == 0 { edge < d } else { edge <= d }, false)
                }
            }
            _ => return None,
        })
    }
}

fn classifier() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ops = MappedOperator::ALL;
    let eighth = |n: i64| Real::Exact(Rat::new(n as i128, 8).unwrap());
    let (mut mismatches, mut non_monotone, mut first) = (0, 0, String::new());
    for _ in 0..10_000 {
        let op = ops[rng.gen_range(0..ops.len())];
        let l8 = if op.is_hardy() { rng.gen_range(-7..=24) } else { rng.gen_range(-3..=24) };
        let p8 = if rng.gen_bool(0.05) { None } else { Some(rng.gen_range(8..=40)) };
        // bias δ toward the interval ends so that ties are exercised
        let d8 = if rng.gen_bool(0.5) {
            rng.gen_range(-64..=160)
        } else {
            let p = p8.unwrap_or(16);
            let ends = [
                (2 * l8 + 8) * p / 8 - 8,
                (2 * l8 + 16) * p / 8 - 8,
                -8 - p,
                -16,
                2 * l8,
                2 * l8 + 8,
                -8,
                l8,
                (l8 + 8) * p / 8 - 8,
                -l8 * p / 8 - 8,
            ];
            ends[rng.gen_range(0..ends.len())] + rng.gen_range(-1..=1)
        };
        let p = match p8 {
            Some(v) => Exponent::Finite(eighth(v)),
            None => Exponent::Infinite,
        };
        let got = classify_exact(op, eighth(l8), p, eighth(d8));
        let want = oracle::expected(op.as_str(), l8, p8, d8);
        let agree = match (&got, &want) {
            (Ok(g), Some(w)) => {
                if !g.is_monotone() {
                    non_monotone += 1;
                }
                *g == MappingClassSet { strong: w.strong, weak: w.weak, restricted_weak: w.rw }
            }
            (Err(_), None) => true,
            _ => false,
        };
        if !agree {
            mismatches += 1;
            if first.is_empty() {
                first = format!("; first at {} l8={l8} p8={p8:?} d8={d8}", op.as_str());
            }
        }
    }
    outcome(mismatches == 0 && non_monotone == 0, format!("10000 queries: {mismatches} mismatches, {non_monotone} non-monotone{first}"))
}

fn sharpness() -> Outcome {
    let spec = QuadratureSpec::with_tol(1e-8);
    let eps = default_eps_grid();
    let mut parts = Vec::new();
    let mut pass = true;
    for target in [SharpnessTarget::WMax, SharpnessTarget::Riesz, SharpnessTarget::GLoc] {
        match sharpness_l1_blowup(target, 1.0, 0.0, &eps, &spec) {
            Ok(r) => {
                pass &= r.verdict == Verdict::Pass && r.fit.slope > 0.0 && r.fit.r2 >= 0.99;
                parts.push(format!("{} slope {:.3} r2 {:.5}", target.as_str(), r.fit.slope, r.fit.r2));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{}: {e}", target.as_str()));
            }
        }
    }
    let n = default_n_grid();
    match (sharpness_boundary_weak(1.0, 2.0, 5.0, &n, &spec), sharpness_boundary_weak(1.0, 2.0, 4.9, &n, &spec)) {
        (Ok(edge), Ok(inside)) => {
            let growing = edge.ratios.windows(2).all(|w| w[1] > w[0]);
            pass &= edge.verdict == Verdict::Pass && growing && inside.verdict == Verdict::Fail;
            parts.push(format!(
                "delta=5 ratios {:.3}..{:.3}, delta=4.9 ratios {:.3}..{:.3}",
                edge.ratios[0],
                edge.ratios[edge.ratios.len() - 1],
                inside.ratios[0],
                inside.ratios[inside.ratios.len() - 1]
            ));
        }
        (a, b) => {
            pass = false;
            parts.push(format!("boundary error: {:?} {:?}", a.err(), b.err()));
        }
    }
    outcome(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bessel-harmonic");
    let runs: [&[&str]; 3] = [
        &["--seed", "17", "kernel", "heat", "--lambda", "0.7", "--random", "200"],
        &["region", "--op", "riesz", "--lambda", "1", "--p", "1:3:0.25", "--delta", "-4:6:0.5"],
        &["--seed", "5", "verify", "kernels"],
    ];
    for args in runs {
        let out = |threads: &str| Command::new(bin).args(args).env("BESSEL_HARMONIC_THREADS", threads).output();
        match (out("1"), out("4")) {
            (Ok(a), Ok(b)) => {
                if a.stdout != b.stdout || a.status.code() != b.status.code() || a.stdout.is_empty() {
                    return outcome(false, format!("output differs for {}", args.join(" ")));
                }
            }
            _ => return outcome(false, "cannot run the binary"),
        }
    }
    outcome(true, "kernel, region and verify outputs byte-identical across runs and thread counts")
}

fn main() {
    let mut failed_unexpectedly = Vec::new();
    let mut report = |id: u32, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && KNOWN_RED.contains(&id) { " (known red)" } else { "" };
        println!("[{id:>2}] {tag} {name}: {} ({:.1}s){note}", o.detail, start.elapsed().as_secs_f64());
        if !o.pass && !KNOWN_RED.contains(&id) {
            failed_unexpectedly.push(id);
        }
    };
    report(1, "closed-form kernels", &closed_forms);
    report(2, "spectral oracle", &spectral);
    let (c3, c4) = conservation_semigroup_subordination();
    report(3, "conservation and semigroup", &|| outcome(c3.pass, c3.detail.clone()));
    report(4, "subordination", &|| outcome(c4.pass, c4.detail.clone()));
    report(5, "Riesz composition and isometry", &riesz_identity);
    report(6, "g-function Plancherel", &plancherel);
    report(7, "lemma estimates", &lemmas);
    report(8, "domination", &domination);
    report(9, "region classifier", &classifier);
    report(10, "sharpness", &sharpness);
    report(11, "determinism", &determinism);
    if !failed_unexpectedly.is_empty() {
        eprintln!("unexpected failures: {failed_unexpectedly:?}");
        std::process::exit(1);
    }
}
