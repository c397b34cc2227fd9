//! Modified Bessel functions in both regimes, Gauss 2F1 and Gamma.

use bessel_harmonic::quad::QuadratureSpec;
use bessel_harmonic::specfun::{bessel_i, bessel_i_regime, gamma_fn, gauss_2f1, Regime, ScaledBessel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = QuadratureSpec::default();
    for &(nu, z) in &[(0.5, 1.0), (1.5, 10.0), (2.0, 80.0)] {
        let v = bessel_i(nu, z, &spec)?;
        println!("I_{nu}({z}) = {:.15e}  [{}]", v.value, v.regime.as_str());
    }

    let nu = 1.0;
    let z = ScaledBessel::new(nu)?.crossover() + 30.0;
    let s = bessel_i_regime(nu, z, Regime::Series)?.value;
    let a = bessel_i_regime(nu, z, Regime::Asymptotic)?.value;
    println!("series vs asymptotic at z = {z}: relative gap {:.2e}", (s - a).abs() / s);

    // 2F1(1, 1; 2; z) = -ln(1 - z) / z
    let z: f64 = 0.75;
    let f = gauss_2f1(1.0, 1.0, 2.0, z, &spec)?.value;
    println!("2F1(1,1;2;{z}) = {f:.15e}, closed form {:.15e}", -(1.0 - z).ln() / z);
    println!("Gamma(1/2)^2 = {:.15e}", gamma_fn(0.5)?.powi(2));
    Ok(())
}
