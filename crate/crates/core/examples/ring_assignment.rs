//! Ring and wavelength assignment of the two-layer ring on a 4x4 grid.

use onoc_xbar::grid::{CoreId, GridArchitecture};
use onoc_xbar::ring::{
    assign_rings, assign_wavelengths, ornoc_path, ornoc_resources, DEFAULT_MAX_WAVELENGTHS,
};

fn main() -> onoc_xbar::Result<()> {
    let grid = GridArchitecture::new(4, 2.5)?;
    let rings = assign_rings(&grid);
    let wavelengths = assign_wavelengths(&grid, &rings, DEFAULT_MAX_WAVELENGTHS)?;

    let (src, dst) = (CoreId(1), CoreId(9));
    let choice = rings.get(src, dst)?;
    println!("{src} -> {dst}: {choice:?}");
    println!("  slot {:?}", wavelengths.get(src, dst));
    println!("  path {:?}", ornoc_path(&grid, &rings, src, dst)?);

    let r = ornoc_resources(&grid, &wavelengths);
    println!(
        "lasers {} photodetectors {} receiver MRs {}",
        r.lasers, r.photodetectors, r.receiver_mrs
    );
    for u in &r.rings {
        println!("{u:?}");
    }
    println!("waveguides {}", r.total_waveguides);
    Ok(())
}
