//! Worst-case and average loss of the seven multi-layer implementations from
//! 2x2 to 4x4 cores with the Biberman parameters.

use onoc_xbar::analysis::{evaluate_topology, results_csv, BuildOptions, Topology};
use onoc_xbar::grid::GridArchitecture;
use onoc_xbar::loss::preset;

fn main() -> onoc_xbar::Result<()> {
    let params = preset("biberman")?;
    let options = BuildOptions::default();
    let mut results = Vec::new();
    for n in 2..=4 {
        let grid = GridArchitecture::new(n, 2.5)?;
        for t in Topology::multilayer() {
            results.push(evaluate_topology(t, &grid, &params, &options)?);
        }
    }
    print!("{}", results_csv(&results));
    Ok(())
}
