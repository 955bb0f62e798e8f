//! Losses of the multi-layer implementations on a 4x4 grid as the core pitch
//! grows from 1 to 3 mm.

use onoc_xbar::analysis::{results_csv, sweep_distance, BuildOptions, Topology};
use onoc_xbar::grid::GridArchitecture;
use onoc_xbar::loss::preset;

fn main() -> onoc_xbar::Result<()> {
    let pitches = [1.0, 1.5, 2.0, 2.5, 3.0];
    let results = sweep_distance(
        &Topology::multilayer(),
        4,
        &pitches,
        &preset("biberman")?,
        &BuildOptions::default(),
    )?;
    print!("{}", results_csv(&results));
    for p in pitches {
        let g = GridArchitecture::new(4, p)?;
        println!(
            "pitch {p} mm: die {} mm side, {} cm2",
            g.die_side_mm(),
            g.die_area_cm2()
        );
    }
    Ok(())
}
