//! Heat, Poisson and Riesz kernels of the Bessel operator.

use bessel_harmonic::kernels::{BesselParam, RegionTag, RieszMethod};
use bessel_harmonic::quad::QuadratureSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    let p = BesselParam::new(1.0)?;
    println!("{:>6} {:>6} {:>22} {:>22} {:>22}  region", "x", "y", "heat(t=1)", "poisson(t=1)", "riesz");
    for &(x, y) in &[(1.0, 0.3), (1.0, 0.9), (1.0, 1.5), (1.0, 4.0)] {
        println!(
            "{x:>6} {y:>6} {:>22.15e} {:>22.15e} {:>22.15e}  {}",
            p.heat(1.0, x, y),
            p.poisson(1.0, x, y)?,
            p.riesz(x, y, RieszMethod::Auto)?,
            RegionTag::of(x, y).as_str()
        );
    }
    let (a, b) = (p.poisson(0.4, 1.0, 2.0)?, p.poisson_subordinated(0.4, 1.0, 2.0, &spec)?);
    println!("Poisson closed form {a:.15e}, by subordination {b:.15e}");
    Ok(())
}
