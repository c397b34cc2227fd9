//! Maximal function, Riesz transform and square functions of a smooth bump.

use bessel_harmonic::kernels::BesselParam;
use bessel_harmonic::operators::{g_heat, maximal_apply, plancherel_ratio, riesz_apply, Semigroup};
use bessel_harmonic::quad::QuadratureSpec;
use bessel_harmonic::sampled::SampledFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::with_tol(1e-9);
    let p = BesselParam::new(1.0)?;
    let f = SampledFunction::smooth_bump(1.0, 0.5)?;
    println!("{:>5} {:>14} {:>14} {:>14} {:>14}", "x", "f", "W* f", "R f", "g f");
    for &x in &[0.3, 0.8, 1.0, 1.4, 3.0] {
        let w = maximal_apply(Semigroup::Heat, &p, &f, x, &spec)?;
        let r = riesz_apply(&p, &f, x, &spec)?;
        let g = g_heat(&p, &f, x, &spec)?;
        println!("{x:>5} {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}", f.eval(x), w.value, r.value, g);
    }
    let gspec = QuadratureSpec::with_tol(1e-7);
    let ratio = plancherel_ratio(|x| g_heat(&p, &f, x, &gspec), &p, &f, &gspec)?;
    println!("|g f|^2 / |f|^2 = {ratio:.9}");
    Ok(())
}
