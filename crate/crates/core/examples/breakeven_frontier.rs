//! Break-even propagation loss of the ring against Matrix ML-B on a 4x4 grid.

use onoc_xbar::analysis::Topology;
use onoc_xbar::analysis::{
    breakeven_frontier, crossing_samples, frontier_csv, BuildOptions, Frontier,
};
use onoc_xbar::grid::GridArchitecture;
use onoc_xbar::reproduce::{frontier_params, MATRIX_ML_B};

fn main() -> onoc_xbar::Result<()> {
    let fixed = frontier_params();
    let options = BuildOptions::default();
    for pitch in [1.0, 2.5] {
        let grid = GridArchitecture::new(4, pitch)?;
        let ring = Topology::Ornoc.build(&grid, &options)?;
        let matrix = MATRIX_ML_B.build(&grid, &options)?;
        let points = breakeven_frontier(&ring, &matrix, &fixed, &crossing_samples(11))?;
        println!("pitch {pitch} mm");
        print!("{}", frontier_csv(&points));
        let f = Frontier::new(&ring, &matrix, &fixed)?;
        println!("delta at (0.12 dB, 1 dB/cm): {:.4} dB", f.delta(1.0, 0.12));
    }
    Ok(())
}
