//! Builds the modified drift for [0.1, ∞) and checks that its free energy
//! has a single critical point.
//!
//! ```bash
//! cargo run --release --example modifier
//! ```

use mflangevin::modifier::{build_modified_drift, h_value, verify_modifier, Domain, GridSpec};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let params = ModelParams::double_well(0.5);
    let drift = build_modified_drift(&params, Domain::AtLeast(0.1), 1e-10)?;
    let plan = &drift.plan;
    println!(
        "m* = {:.6}, m- = {:.6}, eps = {:.5}, a' = {:.5}, a'' = {:.5}",
        plan.m_star, plan.m_minus, plan.epsilon, plan.a_prime, plan.a_double_prime
    );
    println!(
        "r: band ({:.4}, {:.4}), smallest slope {:.5}",
        drift.r.lo, drift.r.hi, drift.r.slope
    );

    println!("{:>8} {:>12} {:>12}", "y", "h'(y)", "h(y)");
    for i in 0..=16 {
        let y = plan.m_minus - 0.5 + (plan.a - plan.m_minus + 0.8) * i as f64 / 16.0;
        println!(
            "{y:>8.3} {:>12.6} {:>12.6}",
            drift.h_prime_interp(y),
            h_value(&drift, y)
        );
    }

    let report = verify_modifier(&params, &drift, GridSpec::default())?;
    println!(
        "eta = {:.4e}, unique critical point: {}, fixed points of the modified map: {:?}",
        report.eta_measured, report.unique_critical_point, report.f_tilde_fixed_points
    );
    Ok(())
}
