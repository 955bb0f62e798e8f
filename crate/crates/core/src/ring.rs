//! The two-layer ring crossbar.
//!
//! Each layer carries a serpentine ring in both directions, so a core can
//! reach any other on four rings. Communications are placed on the shortest
//! ring, then packed onto wavelengths by greedy chaining: a wavelength is
//! handed to the longest communication leaving a core, then to the longest
//! one that still fits from where that communication lands, and so on around
//! the ring.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Device, DeviceKind, Layer, PhotonicLayout, Point, WaveguideId};
use crate::grid::{CoreId, Direction, GridArchitecture};
use crate::loss::PathCharacteristics;

/// Default wavelengths per waveguide.
pub const DEFAULT_MAX_WAVELENGTHS: u32 = 64;

/// One of the four rings: a layer and a direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RingId {
    pub layer: Layer,
    pub direction: Direction,
}

impl RingId {
    pub const ALL: [RingId; 4] = [
        RingId {
            layer: Layer::One,
            direction: Direction::Clockwise,
        },
        RingId {
            layer: Layer::One,
            direction: Direction::CounterClockwise,
        },
        RingId {
            layer: Layer::Two,
            direction: Direction::Clockwise,
        },
        RingId {
            layer: Layer::Two,
            direction: Direction::CounterClockwise,
        },
    ];

    fn slot(self) -> usize {
        RingId::ALL
            .iter()
            .position(|&r| r == self)
            .expect("ring id")
    }
}

/// Ring chosen for one communication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingChoice {
    pub layer: Layer,
    pub direction: Direction,
    /// Arc length in core pitches.
    pub steps: usize,
    pub arc_mm: f64,
}

impl RingChoice {
    pub fn ring(&self) -> RingId {
        RingId {
            layer: self.layer,
            direction: self.direction,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RingAssignment {
    grid: GridArchitecture,
    choices: Vec<Option<RingChoice>>,
}

impl RingAssignment {
    pub fn grid(&self) -> &GridArchitecture {
        &self.grid
    }

    pub fn get(&self, src: CoreId, dst: CoreId) -> Result<&RingChoice> {
        self.grid.check(src)?;
        self.grid.check(dst)?;
        self.choices[src.index() * self.grid.cores() + dst.index()]
            .as_ref()
            .ok_or(Error::SelfCommunication(src.0))
    }

    /// All ordered pairs in (source, destination) order.
    pub fn iter(&self) -> impl Iterator<Item = (CoreId, CoreId, &RingChoice)> + '_ {
        let cores = self.grid.cores();
        self.choices.iter().enumerate().filter_map(move |(k, c)| {
            c.as_ref().map(|c| {
                (
                    CoreId::from_index(k / cores),
                    CoreId::from_index(k % cores),
                    c,
                )
            })
        })
    }
}

/// Puts every communication on its shortest ring.
///
/// Each unordered pair picks the best of the four rings for its lower-id
/// direction; the reply uses the same layer the other way round. Equal
/// distances prefer layer 1, then clockwise.
pub fn assign_rings(grid: &GridArchitecture) -> RingAssignment {
    let cores = grid.cores();
    let mut choices = vec![None; cores * cores];
    for a in grid.core_ids() {
        for b in grid.core_ids().filter(|&b| b > a) {
            let mut best: Option<RingChoice> = None;
            for ring in RingId::ALL {
                let steps = grid
                    .ring_distance_steps(a, b, ring.layer, ring.direction)
                    .expect("distinct in-range cores");
                if best.map_or(true, |c| steps < c.steps) {
                    best = Some(RingChoice {
                        layer: ring.layer,
                        direction: ring.direction,
                        steps,
                        arc_mm: steps as f64 * grid.pitch_mm(),
                    });
                }
            }
            let forward = best.expect("four rings");
            // The reply runs the same arc backwards.
            let backward = RingChoice {
                direction: forward.direction.opposite(),
                ..forward
            };
            choices[a.index() * cores + b.index()] = Some(forward);
            choices[b.index() * cores + a.index()] = Some(backward);
        }
    }
    RingAssignment {
        grid: *grid,
        choices,
    }
}

/// A communication placed on one ring, for [`greedy_chains`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub src: usize,
    pub dst: usize,
    /// Position of the source along the ring.
    pub start: usize,
    pub len: usize,
}

/// Greedy chaining of arcs on one directed ring of `circumference` steps.
///
/// Returns the chain index of every arc; arcs sharing a chain never overlap.
/// Chains start from sources in ascending order, repeatedly, until every arc
/// is placed. Equal lengths prefer the lower destination.
pub fn greedy_chains(circumference: usize, arcs: &[Arc]) -> Vec<usize> {
    let mut by_src: Vec<(usize, usize)> =
        arcs.iter().enumerate().map(|(k, a)| (a.src, k)).collect();
    by_src.sort_unstable();
    let mut sources: Vec<usize> = by_src.iter().map(|&(s, _)| s).collect();
    sources.dedup();

    let mut chain = vec![usize::MAX; arcs.len()];
    let mut left = arcs.len();
    let mut next_chain = 0;
    let outgoing = |core: usize| {
        let lo = by_src.partition_point(|&(s, _)| s < core);
        let hi = by_src.partition_point(|&(s, _)| s <= core);
        by_src[lo..hi].iter().map(|&(_, k)| k)
    };
    while left > 0 {
        for &origin in &sources {
            let mut room = circumference;
            let mut at = origin;
            let mut opened = false;
            loop {
                let pick = outgoing(at)
                    .filter(|&k| chain[k] == usize::MAX && arcs[k].len <= room)
                    .max_by(|&i, &j| {
                        arcs[i]
                            .len
                            .cmp(&arcs[j].len)
                            .then(arcs[j].dst.cmp(&arcs[i].dst))
                    });
                let Some(k) = pick else { break };
                chain[k] = next_chain;
                opened = true;
                left -= 1;
                room -= arcs[k].len;
                at = arcs[k].dst;
                if at == origin || room == 0 {
                    break;
                }
            }
            if opened {
                next_chain += 1;
            }
        }
    }
    chain
}

/// Where a communication sits: ring, waveguide and wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub ring: RingId,
    pub waveguide: u32,
    pub wavelength: u32,
}

/// Per-ring totals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingUsage {
    pub ring: RingId,
    pub communications: usize,
    /// Chains built by the greedy packing, one wavelength on one waveguide each.
    pub channels: u32,
    /// Distinct wavelength indices in use.
    pub wavelengths: u32,
    pub waveguides: u32,
}

#[derive(Debug, Clone)]
pub struct WavelengthAssignment {
    cores: usize,
    max_wavelengths: u32,
    slots: Vec<Option<Slot>>,
    usage: Vec<RingUsage>,
}

impl WavelengthAssignment {
    pub fn max_wavelengths(&self) -> u32 {
        self.max_wavelengths
    }

    pub fn get(&self, src: CoreId, dst: CoreId) -> Option<Slot> {
        if src.0 == 0 || dst.0 == 0 || src.0 > self.cores || dst.0 > self.cores {
            return None;
        }
        self.slots[src.index() * self.cores + dst.index()]
    }

    pub fn usage(&self) -> &[RingUsage] {
        &self.usage
    }

    pub fn total_waveguides(&self) -> u32 {
        self.usage.iter().map(|u| u.waveguides).sum()
    }
}

/// Packs the communications of every ring onto waveguides and wavelengths.
///
/// The clockwise ring of each layer is packed with [`greedy_chains`]; each
/// counter-clockwise reply reuses the slot of its request, which is safe
/// because the reply arcs are the request arcs traversed backwards. Chain
/// `c` becomes wavelength `c % max_wavelengths` on waveguide
/// `c / max_wavelengths`.
pub fn assign_wavelengths(
    grid: &GridArchitecture,
    rings: &RingAssignment,
    max_wavelengths: u32,
) -> Result<WavelengthAssignment> {
    if max_wavelengths == 0 {
        return Err(Error::InvalidParameter {
            name: "max_wavelengths".into(),
            reason: "must be at least 1".into(),
        });
    }
    let cores = grid.cores();
    let mut slots = vec![None; cores * cores];
    let mut usage: Vec<RingUsage> = RingId::ALL
        .iter()
        .map(|&ring| RingUsage {
            ring,
            communications: 0,
            channels: 0,
            wavelengths: 0,
            waveguides: 0,
        })
        .collect();

    for layer in [Layer::One, Layer::Two] {
        let cw = RingId {
            layer,
            direction: Direction::Clockwise,
        };
        let mut arcs = Vec::new();
        let mut pairs = Vec::new();
        for (src, dst, choice) in rings.iter() {
            if choice.ring() == cw {
                arcs.push(Arc {
                    src: src.0,
                    dst: dst.0,
                    start: grid.serpentine_step(src, layer)?,
                    len: choice.steps,
                });
                pairs.push((src, dst));
            }
        }
        let chains = greedy_chains(grid.ring_steps(), &arcs);
        let channels = chains.iter().map(|&c| c as u32 + 1).max().unwrap_or(0);
        for (&(src, dst), &c) in pairs.iter().zip(&chains) {
            let c = c as u32;
            let (waveguide, wavelength) = (c / max_wavelengths, c % max_wavelengths);
            slots[src.index() * cores + dst.index()] = Some(Slot {
                ring: cw,
                waveguide,
                wavelength,
            });
            let ccw = RingId {
                layer,
                direction: Direction::CounterClockwise,
            };
            slots[dst.index() * cores + src.index()] = Some(Slot {
                ring: ccw,
                waveguide,
                wavelength,
            });
        }
        for ring in [
            cw,
            RingId {
                layer,
                direction: Direction::CounterClockwise,
            },
        ] {
            let u = &mut usage[ring.slot()];
            u.communications = pairs.len();
            u.channels = channels;
            u.wavelengths = channels.min(max_wavelengths);
            u.waveguides = channels.div_ceil(max_wavelengths);
        }
    }
    Ok(WavelengthAssignment {
        cores,
        max_wavelengths,
        slots,
        usage,
    })
}

/// Path counters of one communication: its ring arc, one drop at the
/// receiver and, on layer 2, a coupler on the way up and one on the way down.
pub fn ornoc_path(
    grid: &GridArchitecture,
    rings: &RingAssignment,
    src: CoreId,
    dst: CoreId,
) -> Result<PathCharacteristics> {
    if src == dst {
        grid.check(src)?;
        return Err(Error::SelfCommunication(src.0));
    }
    let choice = rings.get(src, dst)?;
    Ok(PathCharacteristics {
        length_cm: choice.steps as f64 * grid.pitch_mm() / 10.0,
        crossings: 0,
        drops_same_layer: 1,
        drops_cross_layer: 0,
        couplers: if choice.layer == Layer::Two { 2 } else { 0 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrnocResources {
    pub lasers: usize,
    pub photodetectors: usize,
    pub receiver_mrs: usize,
    pub max_wavelengths: u32,
    pub rings: Vec<RingUsage>,
    pub total_waveguides: u32,
}

/// Device and channel counts. Every core owns one laser per destination and
/// one receiver MR and photodetector per source.
pub fn ornoc_resources(
    grid: &GridArchitecture,
    assignment: &WavelengthAssignment,
) -> OrnocResources {
    let channels = grid.cores() * (grid.cores() - 1);
    OrnocResources {
        lasers: channels,
        photodetectors: channels,
        receiver_mrs: channels,
        max_wavelengths: assignment.max_wavelengths(),
        rings: assignment.usage().to_vec(),
        total_waveguides: assignment.total_waveguides(),
    }
}

/// CSV with one row per communication.
pub fn assignment_csv(rings: &RingAssignment, wavelengths: &WavelengthAssignment) -> String {
    let mut out = String::from("src,dst,layer,direction,waveguide,wavelength,arc_mm\n");
    for (src, dst, choice) in rings.iter() {
        let slot = wavelengths.get(src, dst).expect("complete assignment");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            src.0,
            dst.0,
            choice.layer.number(),
            choice.direction,
            slot.waveguide,
            slot.wavelength,
            crate::fmt::sig6(choice.arc_mm)
        );
    }
    out
}

/// Layout units per core pitch used by [`ring_layout`].
const UNITS_PER_PITCH: i64 = 64;

/// Geometry of the four rings (first waveguide of each) with the lasers,
/// receivers and couplers of every communication.
///
/// Clockwise rings follow the serpentine through the core centres; the ring
/// closes on a run set a quarter pitch outside the grid. Counter-clockwise
/// rings run alongside, inset by a sixteenth of a pitch. Layer 2 is the
/// layer 1 drawing mirrored about the main diagonal.
pub fn ring_layout(grid: &GridArchitecture, rings: &RingAssignment) -> Result<PhotonicLayout> {
    let d = UNITS_PER_PITCH;
    let n = grid.n() as i64;
    let centre = |i: i64| i * d + d / 2;
    let outside = d / 4;

    let mut outline = Vec::new();
    for row in 0..n {
        let (a, b) = if row % 2 == 0 { (0, n - 1) } else { (n - 1, 0) };
        outline.push(Point::new(centre(a), centre(row)));
        outline.push(Point::new(centre(b), centre(row)));
    }
    let last = *outline.last().expect("n >= 2");
    if last.x == centre(0) {
        outline.push(Point::new(centre(0) - outside, last.y));
    } else {
        outline.push(Point::new(last.x, last.y + outside));
        outline.push(Point::new(centre(0) - outside, last.y + outside));
    }
    outline.push(Point::new(centre(0) - outside, centre(0)));
    let outline = dedup_closed(outline);
    let inset = inset_polygon(&outline, d / 16);

    let mut layout = PhotonicLayout::new(grid.pitch_mm() / d as f64);
    let transpose = |p: &Point| Point::new(p.y, p.x);
    let closed = |pts: &[Point]| {
        let mut v = pts.to_vec();
        v.push(pts[0]);
        v
    };
    let mut reversed = inset.clone();
    reversed.reverse();
    let drawings: [(Layer, Vec<Point>); 4] = [
        (Layer::One, closed(&outline)),
        (Layer::One, closed(&reversed)),
        (Layer::Two, closed(&outline).iter().map(transpose).collect()),
        (
            Layer::Two,
            closed(&reversed).iter().map(transpose).collect(),
        ),
    ];
    for (k, (layer, pts)) in drawings.iter().enumerate() {
        layout.add_waveguide(WaveguideId(k as u32), *layer, pts)?;
    }

    for (src, dst, choice) in rings.iter() {
        let at = |core: CoreId| {
            let (row, col) = grid.position(core);
            Point::new(centre(col as i64), centre(row as i64))
        };
        let layer = choice.layer;
        layout.add_device(Device {
            kind: DeviceKind::Laser,
            at: at(src),
            layers: vec![Layer::One],
            wavelength: None,
        });
        if layer == Layer::Two {
            for core in [src, dst] {
                layout.add_device(Device {
                    kind: DeviceKind::VerticalCoupler,
                    at: at(core),
                    layers: vec![Layer::One, Layer::Two],
                    wavelength: None,
                });
            }
        }
        layout.add_device(Device {
            kind: DeviceKind::MrSameLayer,
            at: at(dst),
            layers: vec![layer],
            wavelength: None,
        });
        layout.add_device(Device {
            kind: DeviceKind::Photodetector,
            at: at(dst),
            layers: vec![Layer::One],
            wavelength: None,
        });
    }
    Ok(layout)
}

fn dedup_closed(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    // drop vertices that sit in the middle of a straight run
    let k = out.len();
    let keep: Vec<bool> = (0..k)
        .map(|i| {
            let (a, b, c) = (out[(i + k - 1) % k], out[i], out[(i + 1) % k]);
            !((a.x == b.x && b.x == c.x) || (a.y == b.y && b.y == c.y))
        })
        .collect();
    out.into_iter()
        .zip(keep)
        .filter(|&(_, k)| k)
        .map(|(p, _)| p)
        .collect()
}

/// Moves every edge of a simple rectilinear polygon `by` units inwards.
fn inset_polygon(points: &[Point], by: i64) -> Vec<Point> {
    let k = points.len();
    let twice_area: i64 = (0..k)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % k]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    let side = twice_area.signum();
    let normal = |a: Point, b: Point| {
        let (dx, dy) = ((b.x - a.x).signum(), (b.y - a.y).signum());
        (-dy * side, dx * side)
    };
    (0..k)
        .map(|i| {
            let (prev, here, next) = (points[(i + k - 1) % k], points[i], points[(i + 1) % k]);
            let (ax, ay) = normal(prev, here);
            let (bx, by_) = normal(here, next);
            Point::new(here.x + by * (ax + bx), here.y + by * (ay + by_))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CrossingIndex, Selection};

    fn grid(n: usize) -> GridArchitecture {
        GridArchitecture::new(n, 1.0).unwrap()
    }

    #[test]
    fn ring_choices_4x4() {
        let g = grid(4);
        let r = assign_rings(&g);
        let c = |s, t| *r.get(CoreId(s), CoreId(t)).unwrap();
        assert_eq!(
            (c(1, 9).layer, c(1, 9).direction),
            (Layer::Two, Direction::Clockwise)
        );
        assert_eq!(
            (c(9, 1).layer, c(9, 1).direction),
            (Layer::Two, Direction::CounterClockwise)
        );
        assert_eq!(
            (c(4, 2).layer, c(4, 2).direction),
            (Layer::One, Direction::CounterClockwise)
        );
        assert_eq!(c(4, 2).steps, 2);
        assert_eq!(c(1, 2).layer, Layer::One);
        assert!(r.get(CoreId(3), CoreId(3)).is_err());
    }

    #[test]
    fn chains_close_around_the_ring() {
        let arcs = [
            Arc {
                src: 1,
                dst: 2,
                start: 0,
                len: 1,
            },
            Arc {
                src: 2,
                dst: 3,
                start: 1,
                len: 1,
            },
            Arc {
                src: 3,
                dst: 1,
                start: 2,
                len: 1,
            },
        ];
        assert_eq!(greedy_chains(3, &arcs), vec![0, 0, 0]);
        assert_eq!(greedy_chains(3, &arcs[..1]), vec![0]);
        let overlapping = [
            Arc {
                src: 1,
                dst: 2,
                start: 0,
                len: 1,
            },
            Arc {
                src: 1,
                dst: 3,
                start: 0,
                len: 2,
            },
        ];
        let c = greedy_chains(3, &overlapping);
        assert_ne!(c[0], c[1]);
    }

    #[test]
    fn path_counters() {
        let g = grid(4);
        let r = assign_rings(&g);
        let p = ornoc_path(&g, &r, CoreId(1), CoreId(9)).unwrap();
        assert!((p.length_cm - 0.2).abs() < 1e-12);
        assert_eq!(
            (
                p.crossings,
                p.drops_same_layer,
                p.drops_cross_layer,
                p.couplers
            ),
            (0, 1, 0, 2)
        );
        let p = ornoc_path(&g, &r, CoreId(1), CoreId(2)).unwrap();
        assert!((p.length_cm - 0.1).abs() < 1e-12);
        assert_eq!(p.couplers, 0);
    }

    #[test]
    fn resources_follow_channel_count() {
        let g = grid(8);
        let r = assign_rings(&g);
        let w = assign_wavelengths(&g, &r, DEFAULT_MAX_WAVELENGTHS).unwrap();
        let res = ornoc_resources(&g, &w);
        assert_eq!(res.lasers, 4032);
        assert_eq!(res.photodetectors, 4032);
        let g = grid(2);
        let r = assign_rings(&g);
        let w = assign_wavelengths(&g, &r, 64).unwrap();
        assert_eq!(ornoc_resources(&g, &w).receiver_mrs, 12);
    }

    #[test]
    fn ring_drawing_has_no_crossings() {
        for n in 2..=7 {
            let g = grid(n);
            let r = assign_rings(&g);
            let layout = ring_layout(&g, &r).unwrap();
            layout.validate().unwrap();
            let idx = CrossingIndex::build(&layout).unwrap();
            assert_eq!(idx.crossing_points(), 0, "n = {n}");
            for k in 0..4 {
                assert_eq!(idx.count(Selection::Waveguide(WaveguideId(k))), 0);
            }
        }
    }

    #[test]
    fn csv_has_one_row_per_pair() {
        let g = grid(2);
        let r = assign_rings(&g);
        let w = assign_wavelengths(&g, &r, 64).unwrap();
        let csv = assignment_csv(&r, &w);
        assert_eq!(csv.lines().count(), 1 + 12);
        assert!(csv.starts_with("src,dst,layer,direction,waveguide,wavelength,arc_mm\n1,2,1,C,"));
    }
}
