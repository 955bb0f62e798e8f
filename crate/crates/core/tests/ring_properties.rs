use std::collections::HashMap;

use onoc_xbar::geometry::Layer;
use onoc_xbar::grid::{CoreId, Direction, GridArchitecture};
use onoc_xbar::ring::{assign_rings, assign_wavelengths, ornoc_path, DEFAULT_MAX_WAVELENGTHS};
use proptest::prelude::*;

/// Ring edges covered travelling from `src` to `dst`.
fn edges(
    grid: &GridArchitecture,
    src: CoreId,
    dst: CoreId,
    layer: Layer,
    dir: Direction,
) -> Vec<usize> {
    let l = grid.ring_steps();
    let from = grid.serpentine_step(src, layer).unwrap();
    let steps = grid.ring_distance_steps(src, dst, layer, dir).unwrap();
    (0..steps)
        .map(|k| match dir {
            Direction::Clockwise => (from + k) % l,
            Direction::CounterClockwise => (from + l - k - 1) % l,
        })
        .collect()
}

#[test]
fn serpentine_example_distance() {
    let g = GridArchitecture::new(4, 1.0).unwrap();
    assert_eq!(
        g.ring_distance_steps(CoreId(1), CoreId(9), Layer::One, Direction::Clockwise)
            .unwrap(),
        8
    );
}

#[test]
fn both_directions_cover_the_ring() {
    for n in 2..=8 {
        let g = GridArchitecture::new(n, 1.0).unwrap();
        for s in g.core_ids() {
            for d in g.core_ids().filter(|&d| d != s) {
                for layer in [Layer::One, Layer::Two] {
                    let c = g
                        .ring_distance_steps(s, d, layer, Direction::Clockwise)
                        .unwrap();
                    let cc = g
                        .ring_distance_steps(s, d, layer, Direction::CounterClockwise)
                        .unwrap();
                    assert_eq!(c + cc, g.ring_steps(), "{n}x{n} {s}->{d}");
                }
            }
        }
    }
}

#[test]
fn wavelength_assignment_is_conflict_free() {
    for n in 2..=8 {
        let g = GridArchitecture::new(n, 2.5).unwrap();
        let rings = assign_rings(&g);
        let wl = assign_wavelengths(&g, &rings, DEFAULT_MAX_WAVELENGTHS).unwrap();
        let mut used: HashMap<(Layer, bool, u32, u32, usize), (CoreId, CoreId)> = HashMap::new();
        for (s, d, choice) in rings.iter() {
            let slot = wl.get(s, d).expect("every pair has a slot");
            assert_eq!(slot.ring, choice.ring());
            assert!(slot.wavelength < DEFAULT_MAX_WAVELENGTHS);
            let cw = choice.direction == Direction::Clockwise;
            for e in edges(&g, s, d, choice.layer, choice.direction) {
                let key = (choice.layer, cw, slot.waveguide, slot.wavelength, e);
                if let Some(other) = used.insert(key, (s, d)) {
                    panic!(
                        "{n}x{n}: {s}->{d} and {}->{} share {key:?}",
                        other.0, other.1
                    );
                }
            }
            let back = wl.get(d, s).unwrap();
            assert_eq!(back.wavelength, slot.wavelength, "{s}<->{d}");
            let p = ornoc_path(&g, &rings, s, d).unwrap();
            assert_eq!(p.crossings, 0);
        }
    }
}

#[test]
fn chosen_arc_is_the_shortest() {
    for n in 2..=8 {
        let g = GridArchitecture::new(n, 1.0).unwrap();
        let rings = assign_rings(&g);
        for (s, d, choice) in rings.iter() {
            let best = [Layer::One, Layer::Two]
                .into_iter()
                .flat_map(|l| {
                    [Direction::Clockwise, Direction::CounterClockwise].map(|dir| (l, dir))
                })
                .map(|(l, dir)| g.ring_distance_steps(s, d, l, dir).unwrap())
                .min()
                .unwrap();
            assert_eq!(choice.steps, best, "{n}x{n} {s}->{d}");
        }
    }
}

proptest! {
    #[test]
    fn path_length_scales_with_pitch(n in 2..=8usize, pitch in 0.5..4.0f64, s in 0..64usize, d in 0..64usize) {
        let g = GridArchitecture::new(n, 1.0).unwrap();
        let (s, d) = (CoreId::from_index(s % g.cores()), CoreId::from_index(d % g.cores()));
        prop_assume!(s != d);
        let rings = assign_rings(&g);
        let unit = ornoc_path(&g, &rings, s, d).unwrap();
        let scaled = ornoc_path(&g.with_pitch(pitch).unwrap(), &rings, s, d).unwrap();
        prop_assert!((scaled.length_cm - unit.length_cm * pitch).abs() <= 1e-9);
        prop_assert_eq!(scaled.drops_same_layer, 1);
        prop_assert!(scaled.couplers == 0 || scaled.couplers == 2);
    }
}
