//! Mean exit time from [0.1, ∞) for growing system sizes.
//!
//! ```bash
//! cargo run --release --example exit_time_growth
//! ```

use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::simulate::{run_exit_ensemble, InitLaw, SimConfig};
use mflangevin::stats::exit_report;
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let params = ModelParams::double_well(0.6);
    let (m_plus, _) = iterate_to_fixed_point(&params, 1.0, 1e-12, 100_000)?;
    let mut previous: Option<f64> = None;
    println!("{:>4} {:>10} {:>8} {:>10}", "N", "mean", "ci95", "log ratio");
    for n in [10, 20, 40, 80] {
        let mut config = SimConfig::new(params.clone(), n);
        config.horizon = 1e5;
        config.init = InitLaw::Point(m_plus);
        config.seed = 42;
        let report = exit_report(&run_exit_ensemble(&config, 0.1, 120)?);
        let mean = report.mean_exit.unwrap_or(f64::NAN);
        let ratio = previous.map_or(String::new(), |p| format!("{:.3}", (mean / p).ln()));
        println!(
            "{n:>4} {mean:>10.2} {:>8.2} {ratio:>10}",
            report.mean_ci_halfwidth.unwrap_or(f64::NAN)
        );
        previous = Some(mean);
    }
    Ok(())
}
