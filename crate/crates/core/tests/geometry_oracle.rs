use onoc_xbar::crossbar::{route_access, CrossbarKind, LayerMode, LayoutOptions, Mesh};
use onoc_xbar::geometry::{
    CrossingIndex, Layer, PhotonicLayout, Point, RouteStyle, Segment, WaveguideId,
};
use proptest::prelude::*;

/// True when `v` (vertical) and `h` (horizontal) meet strictly inside both.
fn cross(h: &Segment, v: &Segment) -> bool {
    let (x1, x2) = (h.a.x.min(h.b.x), h.a.x.max(h.b.x));
    let (y1, y2) = (v.a.y.min(v.b.y), v.a.y.max(v.b.y));
    x1 < v.a.x && v.a.x < x2 && y1 < h.a.y && h.a.y < y2
}

fn overlap(a: &Segment, b: &Segment) -> bool {
    if a.layer != b.layer || a.is_horizontal() != b.is_horizontal() {
        return false;
    }
    let span = |s: &Segment| {
        if s.is_horizontal() {
            (s.a.y, s.a.x.min(s.b.x), s.a.x.max(s.b.x))
        } else {
            (s.a.x, s.a.y.min(s.b.y), s.a.y.max(s.b.y))
        }
    };
    let ((ca, lo_a, hi_a), (cb, lo_b, hi_b)) = (span(a), span(b));
    ca == cb && lo_a.max(lo_b) < hi_a.min(hi_b)
}

fn naive(segments: &[Segment]) -> Option<(usize, Vec<usize>)> {
    let mut per = vec![0; segments.len()];
    let mut points = 0;
    for (i, a) in segments.iter().enumerate() {
        for (j, b) in segments.iter().enumerate().skip(i + 1) {
            if overlap(a, b) {
                return None;
            }
            if a.layer != b.layer
                || a.is_empty()
                || b.is_empty()
                || a.is_horizontal() == b.is_horizontal()
            {
                continue;
            }
            let hit = if a.is_horizontal() {
                cross(a, b)
            } else {
                cross(b, a)
            };
            if hit {
                points += 1;
                per[i] += 1;
                per[j] += 1;
            }
        }
    }
    Some((points, per))
}

fn polyline() -> impl Strategy<Value = (bool, Vec<Point>)> {
    (
        any::<bool>(),
        0..24i64,
        0..24i64,
        prop::collection::vec((any::<bool>(), -10..=10i64), 1..6),
    )
        .prop_map(|(layer_two, x, y, moves)| {
            let mut p = Point::new(x, y);
            let mut pts = vec![p];
            for (k, (horizontal, step)) in moves.into_iter().enumerate() {
                let horizontal = horizontal ^ (k % 2 == 0);
                p = if horizontal {
                    p.offset(step, 0)
                } else {
                    p.offset(0, step)
                };
                pts.push(p);
            }
            (layer_two, pts)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn sweep_matches_all_pairs(lines in prop::collection::vec(polyline(), 1..10)) {
        let mut layout = PhotonicLayout::new(1.0);
        for (k, (two, pts)) in lines.iter().enumerate() {
            let layer = if *two { Layer::Two } else { Layer::One };
            layout.add_waveguide(WaveguideId(k as u32), layer, pts).unwrap();
        }
        let segments = layout.segments();
        match (naive(segments), CrossingIndex::build(&layout)) {
            (Some((points, per)), Ok(index)) => {
                prop_assert_eq!(index.crossing_points(), points);
                for (i, &c) in per.iter().enumerate() {
                    prop_assert_eq!(index.segment_crossings(i), c);
                }
                for w in layout.waveguides() {
                    let expected: usize = (w.first_segment..w.first_segment + w.segment_count).map(|i| per[i]).sum();
                    prop_assert_eq!(index.waveguide_events(w.id).len(), expected);
                }
            }
            (None, Err(_)) => {}
            (oracle, index) => prop_assert!(false, "oracle {:?} vs index {:?}", oracle.is_some(), index.is_ok()),
        }
    }
}

fn segments_of(points: &[Point], layer: Layer) -> Vec<Segment> {
    points
        .windows(2)
        .map(|w| Segment {
            layer,
            waveguide: WaveguideId(u32::MAX),
            a: w[0],
            b: w[1],
        })
        .filter(|s| !s.is_empty())
        .collect()
}

fn layer_of(mesh: &Mesh, mode: LayerMode, w: usize) -> Layer {
    match (mode, mesh.kind()) {
        (LayerMode::Single, _) => Layer::One,
        (LayerMode::Multi, CrossbarKind::Matrix) if w < mesh.inputs() => Layer::One,
        (LayerMode::Multi, CrossbarKind::Matrix) => Layer::Two,
        (LayerMode::Multi, _) if w % 2 == 0 => Layer::One,
        (LayerMode::Multi, _) => Layer::Two,
    }
}

/// Layout-A access nets, redrawn from their routes, meet no same-layer
/// segment of the finished layout anywhere along their length.
#[test]
fn crossing_averse_access_nets_cross_nothing() {
    use onoc_xbar::crossbar::{build_crossbar, LayoutStyle};
    use onoc_xbar::grid::GridArchitecture;
    let options = LayoutOptions::default();
    for n in 2..=4 {
        let grid = GridArchitecture::new(n, 2.5).unwrap();
        for kind in [
            CrossbarKind::Matrix,
            CrossbarKind::LambdaRouter,
            CrossbarKind::Snake,
        ] {
            for mode in [LayerMode::Multi, LayerMode::Single] {
                let Ok(x) = build_crossbar(kind, &grid, mode, LayoutStyle::A) else {
                    assert_eq!((kind, mode), (CrossbarKind::Matrix, LayerMode::Single));
                    continue;
                };
                let mesh = x.mesh();
                let routes =
                    route_access(mesh, n, RouteStyle::CrossingAverse, mode, &options).unwrap();
                let layout = x.layout();
                let mut access = Vec::new();
                for w in 0..mesh.waveguides().len() {
                    let layer = layer_of(mesh, mode, w);
                    assert_eq!(x.waveguide_layer(w), Some(layer));
                    if let Some(i) = mesh.waveguide_input(w) {
                        access.extend(segments_of(&routes.tx[i], layer));
                    }
                    if let Some(j) = mesh.waveguide_output(w) {
                        access.extend(segments_of(&routes.rx[j], layer));
                    }
                }
                for a in &access {
                    for s in layout.segments().iter().filter(|s| s.layer == a.layer) {
                        let hit = match (a.is_horizontal(), s.is_horizontal()) {
                            (true, false) => cross(a, s),
                            (false, true) => cross(s, a),
                            _ => false,
                        };
                        assert!(!hit, "{} {n}x{n}: access {a:?} crosses {s:?}", x.label());
                    }
                }
                for (s, d) in x.pairs().collect::<Vec<_>>() {
                    assert_eq!(x.traced(s, d).unwrap().access_crossings, 0);
                }
            }
        }
    }
}
