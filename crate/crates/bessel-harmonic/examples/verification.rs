//! The kernel verification suite, as run by `bessel-harmonic verify kernels`.

use bessel_harmonic::cli::verify::{run_suite, Suite};
use bessel_harmonic::quad::QuadratureSpec;

fn main() {
    let records = run_suite(Suite::Kernels, 0, &QuadratureSpec::default());
    for r in &records {
        println!("{:<40} {} {:.2e} (tol {:.0e})", r.check, if r.passed { "PASS" } else { "FAIL" }, r.value, r.tolerance);
    }
    let failed = records.iter().filter(|r| !r.passed).count();
    println!("{} checks, {failed} failed", records.len());
}
