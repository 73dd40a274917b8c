//! Runs a trajectory described by a flat `key = value` configuration, as the
//! command-line tool does.
//!
//! ```bash
//! cargo run --release --example config_file -- recipes/fig3_fast_convergence.conf
//! ```

use mflangevin::simulate::run_trajectory;
use mflangevin::Config;

const INLINE: &str = "
sigma = 0.5
n_particles = 500
horizon = 20
init.kind = gaussian
init.mean = 1
init.variance = 0.25
record_every = 200
seed = 7
";

fn main() -> mflangevin::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => Config::load(path.as_ref())?,
        None => Config::parse(INLINE)?,
    };
    print!("{}", config.canonical());
    let rec = run_trajectory(&config.sim_config()?)?;
    print!("{}", rec.to_csv());
    Ok(())
}
