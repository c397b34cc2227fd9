//! Growth of operator norms at the edges of the boundedness region.

use bessel_harmonic::quad::QuadratureSpec;
use bessel_harmonic::theory::{default_eps_grid, default_n_grid, sharpness_boundary_weak, sharpness_l1_blowup, SharpnessTarget};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::with_tol(1e-8);
    let r = sharpness_l1_blowup(SharpnessTarget::Riesz, 1.0, 0.0, &default_eps_grid(), &spec)?;
    println!("Riesz on L1: slope {:.4} against ln(1/eps), r2 {:.5}, {}", r.fit.slope, r.fit.r2, r.verdict.as_str());
    for delta in [5.0, 4.9] {
        let r = sharpness_boundary_weak(1.0, 2.0, delta, &default_n_grid(), &spec)?;
        let last = r.ratios[r.ratios.len() - 1];
        println!("weak (2,2) at delta = {delta}: ratio {:.4} -> {last:.4}, {}", r.ratios[0], r.verdict.as_str());
    }
    Ok(())
}
