//! The modified and the original particle systems share their noise and
//! agree step for step while the barycenter stays in the domain. Started
//! inside the domain but near its edge, the original system may leave it
//! while the modified one is pulled back towards m*.
//!
//! ```bash
//! cargo run --release --example modified_dynamics
//! ```

use std::sync::Arc;

use mflangevin::modifier::{build_modified_drift, Domain};
use mflangevin::simulate::{DriftMode, InitLaw, Replica, SimConfig};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let params = ModelParams::double_well(0.6);
    let a = 0.1;
    let drift = build_modified_drift(&params, Domain::AtLeast(a), 1e-10)?;
    let mut original = SimConfig::new(params, 20);
    original.init = InitLaw::Point(0.3);
    original.seed = 3;
    let mut modified = original.clone();
    modified.drift_mode = DriftMode::Modified(Arc::new(drift));

    let mut x = Replica::new(&original, 0)?;
    let mut y = Replica::new(&modified, 0)?;
    let mut left = None;
    for _ in 0..200_000 {
        let (xo, xm) = (x.step(&original)?, y.step(&modified)?);
        if left.is_none() && xo < a {
            left = Some((x.time(original.dt), xm));
        }
        if left.is_none() {
            assert_eq!(x.particles, y.particles);
        }
    }
    match left {
        Some((t, xm)) => println!("original left [{a}, inf) at t = {t:.2}; modified barycenter then {xm:.4}"),
        None => println!("no exit before t = {}", x.time(original.dt)),
    }
    println!(
        "final barycenters: original {:.4}, modified {:.4}",
        mflangevin::simulate::barycenter(&x.particles),
        mflangevin::simulate::barycenter(&y.particles)
    );
    Ok(())
}
