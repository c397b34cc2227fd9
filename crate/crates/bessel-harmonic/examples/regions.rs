//! Text picture of the boundedness region of the Riesz transform.

use bessel_harmonic::theory::{parse_grid, region_map, MappedOperator, Real};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ps = parse_grid("1:3:0.25")?;
    let deltas = parse_grid("-4:7:0.5")?;
    let nodes = region_map(MappedOperator::Riesz, Real::int(1), &ps, &deltas, false)?;
    println!("S strong, w weak, r restricted weak, . none; rows p, columns delta from -4 to 7");
    for p in ps.iter().rev() {
        let row: String = nodes
            .iter()
            .filter(|n| n.p == *p)
            .map(|n| match (n.classes.strong, n.classes.weak, n.classes.restricted_weak) {
                (true, _, _) => 'S',
                (_, true, _) => 'w',
                (_, _, true) => 'r',
                _ => '.',
            })
            .collect();
        println!("p = {:>4}  {row}", p.to_f64());
    }
    Ok(())
}
