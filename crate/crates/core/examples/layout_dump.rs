//! Prints the geometry of a 2x2 Snake in both layouts and counts crossings.

use onoc_xbar::crossbar::{build_crossbar, CrossbarKind, LayerMode, LayoutStyle};
use onoc_xbar::geometry::CrossingIndex;
use onoc_xbar::grid::GridArchitecture;

fn main() -> onoc_xbar::Result<()> {
    let grid = GridArchitecture::new(2, 2.5)?;
    for style in [LayoutStyle::A, LayoutStyle::B] {
        let x = build_crossbar(CrossbarKind::Snake, &grid, LayerMode::Multi, style)?;
        let layout = x.layout();
        let index = CrossingIndex::build(&layout)?;
        println!(
            "{}: {} segments, {} devices, {} crossing points",
            x.label(),
            layout.segments().len(),
            layout.devices().len(),
            index.crossing_points()
        );
        print!("{}", layout.dump());
    }
    Ok(())
}
