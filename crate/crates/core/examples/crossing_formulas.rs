//! Worst-case crossings of the bare meshes against their closed forms.

use onoc_xbar::crossbar::{closed_form_crossings, worst_case_crossings, CrossbarKind, LayerMode};

fn main() -> onoc_xbar::Result<()> {
    for kind in [
        CrossbarKind::Matrix,
        CrossbarKind::LambdaRouter,
        CrossbarKind::Snake,
    ] {
        for m in [4, 8, 16] {
            let single = worst_case_crossings(kind, m, LayerMode::Single)?;
            let multi = worst_case_crossings(kind, m, LayerMode::Multi)?;
            let reduction = if single == 0 {
                0.0
            } else {
                100.0 * (single - multi) as f64 / single as f64
            };
            println!(
                "{kind:<13} M={m:<2} single {single:>3} (closed form {:?}) multi {multi:>3} reduction {reduction:.2}%",
                closed_form_crossings(kind, m)
            );
        }
    }
    Ok(())
}
