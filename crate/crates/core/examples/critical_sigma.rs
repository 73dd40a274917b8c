//! The noise level above which zero is the only stationary barycenter,
//! i.e. where `f'(0) = 1`.
//!
//! ```bash
//! cargo run --release --example critical_sigma
//! ```

use mflangevin::fixedpoint::critical_sigma;
use mflangevin::quadrature::{f_prime, DEFAULT_TOL};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let template = ModelParams::double_well(0.5);
    let sc = critical_sigma(&template, 0.3, 1.0, 1e-6)?;
    println!("sigma_c = {sc:.6}");
    for s in [sc - 0.01, sc, sc + 0.01] {
        let slope = f_prime(&template.with_sigma(s), 0.0, DEFAULT_TOL)?;
        println!("  f'(0) at sigma = {s:.4}: {slope:.6}");
    }
    Ok(())
}
