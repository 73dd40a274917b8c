//! Every fixed point of the self-consistency map at one noise level, with
//! its slope and stability.
//!
//! ```bash
//! cargo run --release --example fixed_points -- 0.5
//! ```

use mflangevin::fixedpoint::{find_all_fixed_points, DEFAULT_GRID_N, DEFAULT_M_MAX};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let sigma: f64 = std::env::args().nth(1).map_or(0.5, |s| s.parse().expect("sigma"));
    let params = ModelParams::double_well(sigma);
    let report = find_all_fixed_points(&params, DEFAULT_M_MAX, DEFAULT_GRID_N, 1e-12)?;
    println!("sigma = {sigma}, kappa / sigma^2 = {}", params.kappa_eff());
    for root in &report.roots {
        let kind = if root.stable { "stable" } else { "unstable" };
        println!("  m = {:+.10}  f'(m) = {:.6}  {kind}", root.m, root.f_prime_at_m);
    }
    Ok(())
}
