//! Weighted norms of sampled operator outputs, with Hardy operators as the input.

use bessel_harmonic::operators::{hardy_apply, norm_estimate, Estimate, HardyKind, NormMode, OperatorReport, WeightedSpace};
use bessel_harmonic::quad::log_points;
use bessel_harmonic::sampled::SampledFunction;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = SampledFunction::indicator(1.0, 2.0)?;
    let xs = log_points(1e-3, 1e3, 241);
    let space = WeightedSpace::new(2.0, 0.0)?;
    let input = f.lp_norm(space.p, space.delta, &Default::default())?;
    for (kind, name) in [(HardyKind::Origin, "H_0"), (HardyKind::Infinity, "H_inf")] {
        let r = OperatorReport::sample(name, &f, &xs, |x| Ok(Estimate { value: hardy_apply(kind, 0.0, &f, x)?, error: 0.0 }))?;
        let strong = norm_estimate(&r, space, NormMode::Strong)?;
        let weak = norm_estimate(&r, space, NormMode::Weak)?;
        println!("{name}: |Tf| = {:.6}, weak {:.6}, input {:.6}", strong.value, weak.value, input);
    }
    Ok(())
}
