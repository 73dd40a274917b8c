//! Distance between the particle cloud and the stationary law it should
//! approach, for growing N.
//!
//! ```bash
//! cargo run --release --example wasserstein
//! ```

use mflangevin::fixedpoint::iterate_to_fixed_point;
use mflangevin::quadrature::QuantileTable;
use mflangevin::simulate::{run_trajectory, InitLaw, SimConfig};
use mflangevin::stats::{w2_empirical_1d, w2_sample_vs_density};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let params = ModelParams::double_well(0.5);
    let (m_plus, _) = iterate_to_fixed_point(&params, 1.0, 1e-12, 100_000)?;
    let law = QuantileTable::for_nu(&params, m_plus, 20_000);
    let mut previous: Option<Vec<f64>> = None;
    for n in [100, 400, 1600, 6400] {
        let mut config = SimConfig::new(params.clone(), n);
        config.horizon = 20.0;
        config.init = InitLaw::Gaussian {
            mean: 1.0,
            variance: 0.25,
        };
        config.record_every = 2000;
        config.record_particles = true;
        let rec = run_trajectory(&config)?;
        let cloud = &rec.snapshots.last().expect("final snapshot").1;
        let d = w2_sample_vs_density(cloud, |p| law.quantile(p), 100_000)?;
        println!("N = {n:>5}: W2(cloud, stationary law) = {d:.4}");
        if let Some(prev) = previous.take() {
            let m = prev.len();
            let sub: Vec<f64> = cloud.iter().step_by(cloud.len() / m).take(m).copied().collect();
            println!(
                "           W2 to the previous cloud (subsampled): {:.4}",
                w2_empirical_1d(&prev, &sub)?
            );
        }
        previous = Some(cloud.clone());
    }
    Ok(())
}
