//! Close to the critical noise level a small system hops between the two
//! stationary states. Prints the times at which the barycenter passes from
//! one well to the other, counted with hysteresis at `±m+/2`.
//!
//! ```bash
//! cargo run --release --example metastable_transition -- 100 2000
//! ```

use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::simulate::{run_trajectory, InitLaw, SimConfig};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(100, |s| s.parse().expect("N"));
    let horizon: f64 = args.next().map_or(2000.0, |s| s.parse().expect("horizon"));

    let params = ModelParams::double_well(0.64);
    let (m_plus, _) = iterate_to_fixed_point(&params, 1.0, 1e-12, 1_000_000)?;
    let mut config = SimConfig::new(params, n);
    config.horizon = horizon;
    config.init = InitLaw::Gaussian {
        mean: 1.0,
        variance: 0.25,
    };
    config.record_every = 10;
    config.seed = 5;

    let rec = run_trajectory(&config)?;
    let band = 0.5 * m_plus;
    let mut side = 1.0;
    let mut hops = Vec::new();
    for (&t, &x) in rec.times.iter().zip(&rec.barycenter) {
        if x * side < -band {
            side = -side;
            hops.push((t, side));
        }
    }
    println!(
        "m+ = {m_plus:.4}; N = {n}: {} transitions before t = {horizon}",
        hops.len()
    );
    for (t, s) in hops.iter().take(20) {
        println!(
            "  t = {t:>8.1}  into the {} well",
            if *s > 0.0 { "positive" } else { "negative" }
        );
    }
    Ok(())
}
