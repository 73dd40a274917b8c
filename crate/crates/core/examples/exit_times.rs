//! Exit times of the barycenter from [0.1, ∞) over independent replicas,
//! normalised by their mean and compared with the unit exponential law.
//!
//! ```bash
//! cargo run --release --example exit_times -- 50 200
//! ```

use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::simulate::{run_exit_ensemble, InitLaw, SimConfig};
use mflangevin::stats::exit_report;
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(50, |s| s.parse().expect("N"));
    let replicas: usize = args.next().map_or(200, |s| s.parse().expect("replicas"));

    let params = ModelParams::double_well(0.6);
    let (m_plus, _) = iterate_to_fixed_point(&params, 1.0, 1e-12, 100_000)?;
    let mut config = SimConfig::new(params, n);
    config.horizon = 1e5;
    config.init = InitLaw::Point(m_plus);
    config.seed = 42;

    let outcomes = run_exit_ensemble(&config, 0.1, replicas)?;
    let report = exit_report(&outcomes);
    println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    Ok(())
}
