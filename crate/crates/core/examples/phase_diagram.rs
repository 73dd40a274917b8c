//! Stationary barycenters as a function of the noise level, by plain
//! iteration of the self-consistency map from `+1` and `-1`.
//!
//! ```bash
//! cargo run --release --example phase_diagram > phase.csv
//! ```

use mflangevin::fixedpoint::{phase_diagram, phase_diagram_csv, FIGURE_ITERATION_TOL};
use mflangevin::ModelParams;

fn main() -> mflangevin::Result<()> {
    let grid: Vec<f64> = (0..96).map(|i| 0.05 + 0.01 * i as f64).collect();
    let rows = phase_diagram(&ModelParams::double_well(0.5), &grid, FIGURE_ITERATION_TOL)?;
    print!("{}", phase_diagram_csv(&rows));
    Ok(())
}
