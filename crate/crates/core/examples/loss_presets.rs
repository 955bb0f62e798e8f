//! Scores one path under every built-in parameter set.

use onoc_xbar::loss::{builtin_presets, compute_total_loss, PathCharacteristics};

fn main() {
    let path = PathCharacteristics {
        length_cm: 1.2,
        crossings: 10,
        drops_same_layer: 0,
        drops_cross_layer: 1,
        couplers: 2,
    };
    println!("path: {path:?}");
    for p in builtin_presets() {
        match compute_total_loss(&path, &p) {
            Ok(db) => println!("{:<9} {db:.4} dB", p.name),
            Err(e) => println!("{:<9} {e}", p.name),
        }
        let ml = p.clone().with_multilayer_defaults();
        println!(
            "{:<9} {:.4} dB with multilayer defaults",
            "",
            compute_total_loss(&path, &ml).unwrap()
        );
    }
}
