//! Integrals against x^{2λ}dx and over the time variable.

use bessel_harmonic::kernels::BesselParam;
use bessel_harmonic::quad::{integrate_measure, integrate_t, QuadratureSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    let p = BesselParam::new(1.0)?;
    let (t, x) = (0.7, 1.3);
    let mass = integrate_measure(&|y| p.heat(t, x, y), p.measure_exponent(), 0.0, f64::INFINITY, &[x], &spec).check()?;
    println!("heat kernel mass at t={t}, x={x}: {mass:.15}");

    // ∫_0^∞ t e^{-t} dt = 1, with the tail past the grid handled analytically
    let r = integrate_t(&|t: f64| t * (-t).exp(), &spec, 1.0, 3.0)?;
    println!("time integral {:.15} (error {:.1e}, tail {:.1e})", r.value, r.error, r.tail);
    Ok(())
}
