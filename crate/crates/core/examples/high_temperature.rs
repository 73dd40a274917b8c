//! Above the critical noise level the barycenter forgets its start and
//! fluctuates around zero.
//!
//! ```bash
//! cargo run --release --example high_temperature
//! ```

use mflangevin::simulate::{run_trajectories, InitLaw, SimConfig};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let mut config = SimConfig::new(ModelParams::double_well(0.8), 1000);
    config.horizon = 200.0;
    config.init = InitLaw::Gaussian {
        mean: 1.0,
        variance: 0.25,
    };
    config.record_every = 10;
    for (k, rec) in run_trajectories(&config, 5)?.iter().enumerate() {
        let avg = rec.time_average(10.0, 200.0).unwrap_or(f64::NAN);
        println!(
            "seed {k}: xbar(10) = {:+.4}, time average on [10, 200] = {avg:+.4}",
            rec.barycenter[10]
        );
    }
    Ok(())
}
