//! Builds every crossbar variant on a 3x3 grid and traces one pair.

use onoc_xbar::crossbar::{build_crossbar, CrossbarKind, LayerMode, LayoutStyle};
use onoc_xbar::grid::{CoreId, GridArchitecture};

fn main() -> onoc_xbar::Result<()> {
    let grid = GridArchitecture::new(3, 2.5)?;
    for kind in [
        CrossbarKind::Matrix,
        CrossbarKind::LambdaRouter,
        CrossbarKind::Snake,
    ] {
        for mode in [LayerMode::Multi, LayerMode::Single] {
            for style in [LayoutStyle::A, LayoutStyle::B] {
                match build_crossbar(kind, &grid, mode, style) {
                    Ok(x) => {
                        let p = x.trace_path(CoreId(1), CoreId(9))?;
                        println!(
                            "{:<22} wavelengths {:>2} MRs {:>3} worst crossings {:>3}  IP_1->IP_9 {p:?}",
                            x.label(),
                            x.wavelengths(),
                            x.mr_count(),
                            x.worst_case_crossings()
                        );
                    }
                    Err(e) => println!("{kind}-{mode}-{style}: {e}"),
                }
            }
        }
    }
    Ok(())
}
