//! Access waveguides between the cores and the central crossbar block.

use std::f64::consts::{PI, TAU};

use super::mesh::{CrossbarKind, Mesh};
use super::{layer_of, LayerMode};
use crate::error::{Error, Result};
use crate::geometry::{Heading, Layer, Point, RouteStyle, RoutingPlane};

/// Crossing-averse Matrix tracks per pitch, per power-of-two input.
const DENSITY: i64 = 2;

/// Layout units per core pitch.
pub const UNITS_PER_PITCH: i64 = 1_000_000;

/// Free parameters of the crossbar drawings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutOptions {
    /// Longest side of the crossbar block, in core pitches.
    pub block_span: f64,
    /// Routing tracks per core pitch in each direction.
    pub tracks_per_pitch: u32,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            block_span: 0.5,
            tracks_per_pitch: 16,
        }
    }
}

impl LayoutOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.block_span.is_finite() && self.block_span > 0.0 && self.block_span < 1.0) {
            return Err(Error::InvalidParameter {
                name: "block_span".into(),
                reason: format!(
                    "{} must lie strictly between 0 and 1 pitch",
                    self.block_span
                ),
            });
        }
        if self.tracks_per_pitch < 4 || UNITS_PER_PITCH % self.tracks_per_pitch as i64 != 0 {
            return Err(Error::InvalidParameter {
                name: "tracks_per_pitch".into(),
                reason: format!(
                    "{} must be at least 4 and divide the pitch evenly",
                    self.tracks_per_pitch
                ),
            });
        }
        Ok(())
    }
}

/// One access net of a crossing-averse drawing.
struct Net {
    name: String,
    from: Point,
    to: Point,
    leave: Option<Heading>,
    arrive: Option<Heading>,
}

/// Access nets drawn together around the block, innermost first.
struct Bundle {
    /// Net indices: transmitters `0..m`, receivers `m..2m`.
    order: Vec<usize>,
    /// Areas the whole bundle stays out of.
    fences: Vec<(Point, Point)>,
    /// Sweep direction around the block, counter-clockwise when `true`, if
    /// later cores must stay outside earlier nets.
    sweep: Option<bool>,
}

/// Block placement and routed access nets of one crossbar drawing.
#[derive(Debug, Clone)]
pub struct AccessRoutes {
    /// Global position of the block-local origin.
    pub origin: Point,
    /// Layout units per block-local unit.
    pub scale: i64,
    /// Core (0-based) attached to input and output `i`.
    pub lane_core: Vec<usize>,
    /// Per input, transmitter port to crossbar input.
    pub tx: Vec<Vec<Point>>,
    /// Per output, crossbar output to receiver port.
    pub rx: Vec<Vec<Point>>,
}

impl AccessRoutes {
    pub fn to_global(&self, p: Point) -> Point {
        Point::new(
            self.origin.x + self.scale * p.x,
            self.origin.y + self.scale * p.y,
        )
    }
}

/// Transmitter and receiver port of the core at `(row, col)`.
pub fn core_ports(row: usize, col: usize) -> (Point, Point) {
    let d = UNITS_PER_PITCH;
    let (cx, cy) = (col as i64 * d + d / 2, row as i64 * d + d / 2);
    (Point::new(cx - d / 8, cy), Point::new(cx + d / 8, cy))
}

/// Block centre in core pitches; between cores when `n` is odd.
fn block_centre(n: usize) -> f64 {
    (n / 2) as f64
}

/// Position of core `k` relative to the block centre, in pitches, `y` up.
fn offset(n: usize, k: usize) -> (f64, f64) {
    let c = block_centre(n);
    ((k % n) as f64 + 0.5 - c, c - (k / n) as f64 - 0.5)
}

/// Counter-clockwise angle of core `k` in `[0, 2π)`, seen from a point just
/// off the block centre so that no two cores share a bearing.
fn angle(n: usize, k: usize) -> f64 {
    let (dx, dy) = offset(n, k);
    (dy - 0.0017).atan2(dx - 0.0011).rem_euclid(TAU)
}

fn ring(n: usize, k: usize) -> f64 {
    let (dx, dy) = offset(n, k);
    dx.abs().max(dy.abs())
}

fn sort_by_keys(v: &mut [usize], key: impl Fn(usize) -> (f64, f64)) {
    v.sort_by(|&a, &b| {
        key(a)
            .partial_cmp(&key(b))
            .expect("finite key")
            .then(a.cmp(&b))
    });
}

/// Core attached to every crossbar lane. Input `i` and output `i` always
/// belong to the same core, since the reduced crossbars have no path from an
/// input to the output of the same index.
///
/// Layout B keeps row-major order. Layout A orders the cores so that access
/// waveguides can reach the block without meeting:
///
/// * Matrix: counter-clockwise from due east around the block. This is the
///   order of the inputs down the west side and of the outputs along the
///   south side.
/// * λ-router and Snake: each core's two access waveguides form an arch from
///   the west side to the east side, through the core. Arches of cores north
///   of the block nest around the north side with the first lane innermost;
///   southern ones nest around the south side with the last lane innermost.
///   Cores are taken ring by ring outwards, west to east within a ring.
pub fn attachment(mesh: &Mesh, n: usize, style: RouteStyle) -> Vec<usize> {
    let m = mesh.inputs();
    let mut cores: Vec<usize> = (0..m).collect();
    if style == RouteStyle::Shortest {
        return cores;
    }
    if mesh.kind() == CrossbarKind::Matrix {
        sort_by_keys(&mut cores, |k| (angle(n, k), 0.0));
        return cores;
    }
    let (mut north, mut south): (Vec<usize>, Vec<usize>) =
        cores.into_iter().partition(|&k| offset(n, k).1 > 0.0);
    sort_by_keys(&mut north, |k| (ring(n, k), -angle(n, k)));
    sort_by_keys(&mut south, |k| (ring(n, k), angle(n, k)));
    north.extend(south.into_iter().rev());
    north
}

/// Position of a point on the boundary of the block `min`..`max`,
/// counter-clockwise from the north-west corner.
fn perimeter(min: Point, max: Point, p: Point) -> i64 {
    let (w, h) = (max.x - min.x, max.y - min.y);
    if p.x == min.x {
        p.y - min.y
    } else if p.y == max.y {
        h + p.x - min.x
    } else if p.x == max.x {
        h + w + max.y - p.y
    } else {
        2 * h + w + max.x - p.x
    }
}

/// Two arches, given by their ends on the block boundary, whose ends
/// alternate around the block.
fn interleaved(min: Point, max: Point, arches: &[(Point, Point)]) -> Option<(usize, usize)> {
    let mut ends: Vec<(i64, usize)> = arches
        .iter()
        .enumerate()
        .flat_map(|(k, &(a, b))| [(perimeter(min, max, a), k), (perimeter(min, max, b), k)])
        .collect();
    ends.sort_unstable();
    let mut open: Vec<usize> = Vec::new();
    for (_, k) in ends {
        match open.iter().rposition(|&o| o == k) {
            Some(at) if at + 1 == open.len() => {
                open.pop();
            }
            Some(at) => return Some((k, open[at + 1])),
            None => open.push(k),
        }
    }
    None
}

/// Places the block at the centre of an `n`×`n` grid (on the corner shared by
/// the four central cores when `n` is odd) and routes every access
/// net. Shortest nets are routed one by one, transmitters first, each group in
/// ascending core order. Crossing-averse nets are routed bundle by bundle on
/// one routing plane per layer of `mode`, so that no two nets on a layer touch.
pub fn route_access(
    mesh: &Mesh,
    n: usize,
    style: RouteStyle,
    mode: LayerMode,
    options: &LayoutOptions,
) -> Result<AccessRoutes> {
    options.validate()?;
    let d = UNITS_PER_PITCH;
    let m = mesh.inputs();
    if m != n * n {
        return Err(Error::invariant(format!(
            "{m}-input crossbar on a {n}x{n} grid"
        )));
    }
    let (w, h) = mesh.size();
    let span = (options.block_span * d as f64).round() as i64;
    let scale = (span / w.max(h)).max(1);
    let centre = (n / 2) as i64 * d;
    let origin = Point::new(centre - w * scale / 2, centre - h * scale / 2);
    let mut routes = AccessRoutes {
        origin,
        scale,
        lane_core: attachment(mesh, n, style),
        tx: Vec::with_capacity(m),
        rx: Vec::with_capacity(m),
    };

    let inputs: Vec<Point> = (0..m)
        .map(|i| routes.to_global(mesh.waveguides()[mesh.input_waveguide(i)][0]))
        .collect();
    let outputs: Vec<Point> = (0..m)
        .map(|j| {
            let wg = &mesh.waveguides()[mesh.output_waveguide(j)];
            routes.to_global(*wg.last().expect("non-empty waveguide"))
        })
        .collect();
    let ports: Vec<(Point, Point)> = (0..m).map(|k| core_ports(k / n, k % n)).collect();
    let tx_port = |i: usize| ports[routes.lane_core[i]].0;
    let rx_port = |j: usize| ports[routes.lane_core[j]].1;

    // Crossing-averse Matrix bundles squeeze between the cores, and single
    // layer multistage arches between each other.
    let p2 = m.next_power_of_two() as i64;
    let tracks = match (style, mesh.kind(), mode) {
        (RouteStyle::CrossingAverse, CrossbarKind::Matrix, _) => {
            (options.tracks_per_pitch as i64).max(p2 * DENSITY)
        }
        (RouteStyle::CrossingAverse, _, LayerMode::Single) => {
            (options.tracks_per_pitch as i64).max(p2 * DENSITY / 4)
        }
        _ => options.tracks_per_pitch as i64,
    };
    let step = d / tracks;
    let uniform = || (-(d / 2)..=n as i64 * d + d / 2).step_by(step as usize);
    let far = Point::new(origin.x + w * scale, origin.y + h * scale);
    // Crossing-averse nets wrap around the block in bundles, which need
    // tracks at the lane pitch next to it.
    let halo = if style == RouteStyle::CrossingAverse {
        d / 4 / scale
    } else {
        0
    };
    let around = |lo: i64, hi: i64| (1..=halo).flat_map(move |k| [lo - k * scale, hi + k * scale]);
    let xs = uniform()
        .chain(ports.iter().flat_map(|(t, r)| [t.x, r.x]))
        .chain([origin.x, far.x])
        .chain(around(origin.x, far.x))
        .chain(inputs.iter().chain(&outputs).map(|p| p.x));
    let ys = uniform()
        .chain(ports.iter().map(|(t, _)| t.y))
        .chain([origin.y, far.y])
        .chain(around(origin.y, far.y))
        .chain(inputs.iter().chain(&outputs).map(|p| p.y));
    let mut plane = RoutingPlane::new(xs, ys);
    plane.block_rect(origin, far);
    for &(t, r) in &ports {
        if style == RouteStyle::CrossingAverse {
            plane.block_rect(t, r);
        }
        plane.block_point(t)?;
        plane.block_point(r)?;
    }
    for &p in inputs.iter().chain(&outputs) {
        plane.block_point(p)?;
    }

    let leave = match mesh.kind() {
        CrossbarKind::Matrix => Heading::South,
        _ => Heading::East,
    };
    let tx_name = |i: usize| format!("the transmitter access of IP_{}", routes.lane_core[i] + 1);
    let rx_name = |j: usize| format!("the receiver access of IP_{}", routes.lane_core[j] + 1);
    let (tx, rx) = match style {
        RouteStyle::Shortest => {
            let mut tx = Vec::with_capacity(m);
            for i in 0..m {
                tx.push(plane.route(
                    &tx_name(i),
                    tx_port(i),
                    inputs[i],
                    style,
                    None,
                    Some(Heading::East),
                )?);
            }
            let mut rx = Vec::with_capacity(m);
            for j in 0..m {
                rx.push(plane.route(
                    &rx_name(j),
                    outputs[j],
                    rx_port(j),
                    style,
                    Some(leave),
                    None,
                )?);
            }
            (tx, rx)
        }
        RouteStyle::CrossingAverse => {
            let tx = (0..m).map(|i| Net {
                name: tx_name(i),
                from: tx_port(i),
                to: inputs[i],
                leave: None,
                arrive: Some(Heading::East),
            });
            let rx = (0..m).map(|j| Net {
                name: rx_name(j),
                from: outputs[j],
                to: rx_port(j),
                leave: Some(leave),
                arrive: None,
            });
            let layers = (0..m)
                .map(|k| layer_of(mesh, mode, mesh.input_waveguide(k)))
                .chain((0..m).map(|k| layer_of(mesh, mode, mesh.output_waveguide(k))));
            let nets: Vec<(Layer, Net)> = layers.zip(tx.chain(rx)).collect();
            // A core's two nets on one layer close an arch with the block;
            // arches whose ends alternate around the block must cross.
            let arches: Vec<(Point, Point)> = (0..m)
                .filter(|&i| nets[i].0 == nets[m + i].0)
                .map(|i| (inputs[i], outputs[i]))
                .collect();
            if let Some((a, b)) = interleaved(origin, far, &arches) {
                let core = |p: Point| {
                    inputs
                        .iter()
                        .position(|&q| q == p)
                        .map_or(0, |i| routes.lane_core[i] + 1)
                };
                return Err(Error::Unroutable {
                    net: format!(
                        "IP_{} and IP_{}, whose access waveguides interleave around the block",
                        core(arches[a].0),
                        core(arches[b].0)
                    ),
                });
            }
            // Bundles are drawn innermost first. Each bundle is fenced off
            // from the side of the block it must not wind around.
            let (lo, hi) = (
                Point::new(i64::MIN, i64::MIN),
                Point::new(i64::MAX, i64::MAX),
            );
            let north = (0..m)
                .filter(|&r| offset(n, routes.lane_core[r]).1 > 0.0)
                .count();
            let split = (inputs[north - 1].y + inputs[north].y) / 2;
            let above = (lo, Point::new(hi.x, split));
            let below = (Point::new(lo.x, split), hi);
            let families: Vec<Bundle> = if mesh.kind() == CrossbarKind::Matrix {
                let west = (0..m)
                    .filter(|&r| angle(n, routes.lane_core[r]) < 1.5 * PI)
                    .count();
                let x_split = (outputs[west - 1].x + outputs[west].x) / 2;
                let east = (Point::new(x_split, split), hi);
                vec![
                    Bundle {
                        order: (0..north).collect(),
                        fences: vec![below],
                        sweep: Some(true),
                    },
                    Bundle {
                        order: (north..m).rev().collect(),
                        fences: vec![above],
                        sweep: Some(false),
                    },
                    Bundle {
                        order: (m..m + west).collect(),
                        fences: vec![east],
                        sweep: Some(true),
                    },
                    Bundle {
                        order: (m + west..2 * m).rev().collect(),
                        fences: vec![above, (lo, Point::new(x_split, hi.y))],
                        sweep: Some(false),
                    },
                ]
            } else {
                vec![
                    Bundle {
                        order: (0..north).flat_map(|r| [r, m + r]).collect(),
                        fences: vec![below],
                        sweep: None,
                    },
                    Bundle {
                        order: (north..m).rev().flat_map(|r| [r, m + r]).collect(),
                        fences: vec![above],
                        sweep: None,
                    },
                ]
            };
            let port = |k: usize| if k < m { tx_port(k) } else { rx_port(k - m) };
            // A later core keeps a fenced ray out to the edge of the plane,
            // so no earlier net of its bundle can pass outside it.
            let ray = |k: usize, ccw: bool| {
                let (dx, dy) = offset(n, routes.lane_core[k % m]);
                let quadrant = match (dx > 0.0, dy > 0.0) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                };
                let p = port(k);
                match (quadrant + if ccw { 1 } else { 0 }) % 4 {
                    0 => (p, Point::new(hi.x, p.y)),
                    1 => (Point::new(p.x, lo.y), p),
                    2 => (Point::new(lo.x, p.y), p),
                    _ => (p, Point::new(p.x, hi.y)),
                }
            };
            let mut all = vec![Vec::new(); 2 * m];
            for layer in [Layer::One, Layer::Two] {
                let mut shared = plane.clone();
                shared.set_anchor(origin, far);
                for bundle in &families {
                    let order: Vec<usize> = bundle
                        .order
                        .iter()
                        .copied()
                        .filter(|&k| nets[k].0 == layer)
                        .collect();
                    for (at, &k) in order.iter().enumerate() {
                        let mut fences = bundle.fences.clone();
                        if let Some(ccw) = bundle.sweep {
                            for (gap, &later) in order[at + 1..].iter().enumerate() {
                                let (t, r) = ports[routes.lane_core[later % m]];
                                let c = (d / 8).min(gap as i64 * 2 * step);
                                fences.push(ray(later, ccw));
                                fences.push((
                                    Point::new(t.x - c, t.y - c),
                                    Point::new(r.x + c, r.y + c),
                                ));
                            }
                        }
                        shared.set_fences(&fences);
                        let net = &nets[k].1;
                        all[k] = shared
                            .route(&net.name, net.from, net.to, style, net.leave, net.arrive)?;
                    }
                }
            }
            let rx = all.split_off(m);
            (all, rx)
        }
    };
    routes.tx = tx;
    routes.rx = rx;
    Ok(routes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_arches_do_not_interleave() {
        let (min, max) = (Point::new(0, 0), Point::new(10, 10));
        let west = |y| Point::new(0, y);
        let south = |x| Point::new(x, 10);
        assert_eq!(
            interleaved(min, max, &[(west(2), south(8)), (west(4), south(6))]),
            None
        );
        assert_eq!(
            interleaved(min, max, &[(west(2), west(3)), (south(4), south(6))]),
            None
        );
    }

    #[test]
    fn matrix_diagonal_arches_interleave() {
        let (min, max) = (Point::new(0, 0), Point::new(10, 10));
        let arches = [
            (Point::new(0, 2), Point::new(2, 10)),
            (Point::new(0, 4), Point::new(4, 10)),
        ];
        assert!(interleaved(min, max, &arches).is_some());
    }

    #[test]
    fn perimeter_runs_around_the_block() {
        let (min, max) = (Point::new(0, 0), Point::new(4, 2));
        let order: Vec<i64> = [
            Point::new(0, 1),
            Point::new(2, 2),
            Point::new(4, 1),
            Point::new(2, 0),
        ]
        .iter()
        .map(|&p| perimeter(min, max, p))
        .collect();
        assert_eq!(order, vec![1, 4, 7, 10]);
    }
}
