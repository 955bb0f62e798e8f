use std::collections::HashSet;

use onoc_xbar::crossbar::{
    build_crossbar, closed_form_crossings, mesh_paths, worst_case_crossings, CrossbarKind,
    LayerMode, LayoutStyle, Mesh,
};
use onoc_xbar::grid::{CoreId, GridArchitecture};
use proptest::prelude::*;

const KINDS: [CrossbarKind; 3] = [
    CrossbarKind::Matrix,
    CrossbarKind::LambdaRouter,
    CrossbarKind::Snake,
];

#[test]
fn every_pair_is_connected() {
    for n in 2..=4 {
        let grid = GridArchitecture::new(n, 2.5).unwrap();
        for kind in KINDS {
            for mode in [LayerMode::Multi, LayerMode::Single] {
                for style in [LayoutStyle::A, LayoutStyle::B] {
                    if (kind, mode, style)
                        == (CrossbarKind::Matrix, LayerMode::Single, LayoutStyle::A)
                    {
                        continue;
                    }
                    let x = build_crossbar(kind, &grid, mode, style).unwrap();
                    assert_eq!(x.pairs().count(), grid.cores() * (grid.cores() - 1));
                    for (s, d) in x.pairs().collect::<Vec<_>>() {
                        let p = x.trace_path(s, d).unwrap();
                        assert!(p.length_cm > 0.0);
                        assert!(p.drops_same_layer + p.drops_cross_layer <= 1);
                    }
                }
            }
        }
    }
}

#[test]
fn single_layer_matrix_a_is_rejected_as_unroutable() {
    let grid = GridArchitecture::new(3, 2.5).unwrap();
    let e = build_crossbar(
        CrossbarKind::Matrix,
        &grid,
        LayerMode::Single,
        LayoutStyle::A,
    )
    .unwrap_err();
    assert!(matches!(e, onoc_xbar::Error::Unroutable { .. }));
}

#[test]
fn each_input_reaches_distinct_outputs_on_distinct_wavelengths() {
    for m in [4, 9, 16, 25, 36, 64] {
        for kind in KINDS {
            let mesh = Mesh::new(kind, m).unwrap();
            for i in 0..m {
                let wl: HashSet<u32> = (0..m)
                    .filter(|&j| j != i)
                    .map(|j| mesh.wavelength(i, j).unwrap())
                    .collect();
                assert_eq!(wl.len(), m - 1, "{kind} {m} input {i}");
            }
        }
    }
}

#[test]
fn wavelength_counts() {
    assert_eq!(
        Mesh::new(CrossbarKind::Matrix, 64)
            .unwrap()
            .wavelength_count(),
        63
    );
    assert_eq!(
        Mesh::new(CrossbarKind::LambdaRouter, 64)
            .unwrap()
            .wavelength_count(),
        64
    );
    assert_eq!(
        Mesh::new(CrossbarKind::Snake, 64)
            .unwrap()
            .wavelength_count(),
        64
    );
}

#[test]
fn single_layer_closed_forms() {
    for side in [4, 8, 16] {
        for kind in [CrossbarKind::LambdaRouter, CrossbarKind::Snake] {
            let m = (side * side) as u64;
            let expected = if kind == CrossbarKind::LambdaRouter {
                m - 1
            } else {
                2 * m - 5
            };
            assert_eq!(closed_form_crossings(kind, side), Some(expected));
            assert_eq!(
                worst_case_crossings(kind, side, LayerMode::Single).unwrap(),
                expected
            );
        }
    }
}

#[test]
fn multi_layer_never_adds_crossings() {
    for side in 2..=5 {
        for kind in KINDS {
            let single = mesh_paths(kind, side * side, LayerMode::Single).unwrap();
            let multi = mesh_paths(kind, side * side, LayerMode::Multi).unwrap();
            for (s, m) in single.iter().zip(&multi) {
                match (s, m) {
                    (Some(s), Some(m)) => assert!(m.crossings <= s.crossings),
                    (None, None) => {}
                    _ => panic!("connectivity differs between layer modes"),
                }
            }
        }
    }
    for n in 2..=4 {
        let grid = GridArchitecture::new(n, 2.5).unwrap();
        for kind in KINDS {
            let single = build_crossbar(kind, &grid, LayerMode::Single, LayoutStyle::B).unwrap();
            let multi = build_crossbar(kind, &grid, LayerMode::Multi, LayoutStyle::B).unwrap();
            for (s, d) in single.pairs().collect::<Vec<_>>() {
                assert!(
                    multi.trace_path(s, d).unwrap().crossings
                        <= single.trace_path(s, d).unwrap().crossings
                );
            }
        }
    }
}

#[test]
fn matrix_paths_drop_once() {
    let grid = GridArchitecture::new(3, 2.5).unwrap();
    for (mode, same, cross) in [(LayerMode::Multi, 0, 1), (LayerMode::Single, 1, 0)] {
        let x = build_crossbar(CrossbarKind::Matrix, &grid, mode, LayoutStyle::B).unwrap();
        for (s, d) in x.pairs().collect::<Vec<_>>() {
            let p = x.trace_path(s, d).unwrap();
            assert_eq!((p.drops_same_layer, p.drops_cross_layer), (same, cross));
        }
    }
}

#[test]
fn trace_csv_lists_every_pair() {
    let grid = GridArchitecture::new(3, 2.5).unwrap();
    let x = build_crossbar(CrossbarKind::Snake, &grid, LayerMode::Multi, LayoutStyle::B).unwrap();
    let csv = x.trace_csv();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("src,dst,wavelength,length_cm,n_crossing,n_drop1,n_drop2,n_coupler")
    );
    assert_eq!(lines.count(), 72);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pitch_scales_lengths_only(n in 2..=4usize, pitch in 0.5..4.0f64, kind in 0..3usize, s in 0..16usize, d in 0..16usize) {
        let grid = GridArchitecture::new(n, 1.0).unwrap();
        let (s, d) = (CoreId::from_index(s % grid.cores()), CoreId::from_index(d % grid.cores()));
        prop_assume!(s != d);
        let x = build_crossbar(KINDS[kind], &grid, LayerMode::Multi, LayoutStyle::B).unwrap();
        let a = x.trace_path(s, d).unwrap();
        let b = x.with_pitch(pitch).unwrap().trace_path(s, d).unwrap();
        prop_assert!((b.length_cm - a.length_cm * pitch).abs() <= 1e-9 * (1.0 + b.length_cm));
        prop_assert_eq!((a.crossings, a.drops_same_layer, a.drops_cross_layer, a.couplers),
            (b.crossings, b.drops_same_layer, b.drops_cross_layer, b.couplers));
    }
}
