//! Pitch at which the 8x8 ring's worst-case loss reaches 4.5 dB.

use onoc_xbar::analysis::{calibrate_pitch, evaluate, BuildOptions, Topology};
use onoc_xbar::grid::GridArchitecture;
use onoc_xbar::loss::preset;

fn main() -> onoc_xbar::Result<()> {
    let params = Topology::Ornoc.effective_params(&preset("biberman")?);
    let ring = Topology::Ornoc.build(&GridArchitecture::new(8, 2.5)?, &BuildOptions::default())?;
    let pitch = calibrate_pitch(&ring, &params, 4.5)?;
    let r = evaluate(&ring.with_pitch(pitch)?, &params)?;
    println!(
        "pitch {pitch:.4} mm: worst {:.4} dB, average {:.4} dB",
        r.worst_case_db, r.average_db
    );
    Ok(())
}
