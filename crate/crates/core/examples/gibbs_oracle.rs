//! A single particle (no interaction) samples the Gibbs law of the double
//! well. Compares its occupation histogram with the quadrature density.
//!
//! ```bash
//! cargo run --release --example gibbs_oracle -- 10000000
//! ```

use mflangevin::quadrature::GibbsDensity;
use mflangevin::simulate::{occupation_histogram, InitLaw, SimConfig};
use mflangevin::stats::tv_distance;
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let steps: u64 = std::env::args().nth(1).map_or(2_000_000, |s| s.parse().expect("steps"));
    let params = ModelParams::double_well(0.5);
    let mut config = SimConfig::new(params.clone(), 1);
    config.dt = 0.005;
    config.init = InitLaw::Point(0.0);

    let hist = occupation_histogram(&config, 100_000, steps, 50, (-2.5, 2.5))?;
    let gibbs = GibbsDensity::new(&params, 1e-10)?;
    let tv = tv_distance(&hist, |l, r| gibbs.mass(l, r))?;
    println!("{steps} steps, TV distance to the Gibbs law: {tv:.5}");
    for i in (0..hist.bins()).step_by(5) {
        let (l, r) = hist.edges(i);
        let empirical = hist.counts[i] as f64 / hist.total() as f64;
        println!(
            "  [{l:+.1}, {r:+.1})  empirical {empirical:.4}  exact {:.4}",
            gibbs.mass(l, r)?
        );
    }
    Ok(())
}
