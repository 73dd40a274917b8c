//! Particle system started from N(1, 1/4) below the critical noise level.
//! The barycenter settles near the positive stationary value within a few
//! time units and then barely moves.
//!
//! ```bash
//! cargo run --release --example trajectory -- 2000 200
//! ```

use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::simulate::{run_trajectory, InitLaw, SimConfig};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(2000, |s| s.parse().expect("N"));
    let horizon: f64 = args.next().map_or(50.0, |s| s.parse().expect("horizon"));

    let params = ModelParams::double_well(0.5);
    let (m_plus, _) = iterate_to_fixed_point(&params, 1.0, 1e-12, 100_000)?;
    let mut config = SimConfig::new(params, n);
    config.horizon = horizon;
    config.init = InitLaw::Gaussian {
        mean: 1.0,
        variance: 0.25,
    };
    config.record_every = 100;
    config.seed = 1;

    let rec = run_trajectory(&config)?;
    println!("m+ = {m_plus:.6}");
    println!("{:>8} {:>10} {:>10}", "t", "xbar", "xbar - m+");
    for (t, x) in rec.times.iter().zip(&rec.barycenter).step_by(5) {
        println!("{t:>8.1} {x:>10.5} {:>+10.5}", x - m_plus);
    }
    if let Some(avg) = rec.time_average(10.0, horizon) {
        println!("time average on [10, {horizon}]: {avg:.5}");
    }
    Ok(())
}
