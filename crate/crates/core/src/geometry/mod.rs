//! Layered Manhattan layouts.
//!
//! Coordinates are integers in layout units; a layout carries the size of
//! one unit in millimetres so that the same geometry can be re-scaled to any
//! core pitch without re-routing. Every segment is horizontal or vertical and
//! belongs to one waveguide on one of the two optical layers.

mod crossing;
mod route;

use std::fmt::{self, Write as _};

pub use crossing::{count_effective_crossings, CrossingIndex, Selection};
pub use route::{route_manhattan, Heading, RouteStyle, RoutingPlane};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    One,
    Two,
}

impl Layer {
    pub fn number(self) -> u8 {
        match self {
            Layer::One => 1,
            Layer::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Layer> {
        match n {
            1 => Some(Layer::One),
            2 => Some(Layer::Two),
            _ => None,
        }
    }
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "layer {}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    pub fn manhattan(self, other: Point) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }

    pub fn offset(self, dx: i64, dy: i64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WaveguideId(pub u32);

impl fmt::Display for WaveguideId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "wg{}", self.0)
    }
}

/// Axis-aligned segment from `a` to `b` in travel order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub layer: Layer,
    pub waveguide: WaveguideId,
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn is_horizontal(&self) -> bool {
        self.a.y == self.b.y
    }

    pub fn len(&self) -> i64 {
        self.a.manhattan(self.b)
    }

    pub fn is_empty(&self) -> bool {
        self.a == self.b
    }

    /// Distance from `a` to `p`, for a point on the segment.
    pub fn offset_of(&self, p: Point) -> i64 {
        self.a.manhattan(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    MrSameLayer,
    MrCrossLayer,
    PseSameLayer,
    PseCrossLayer,
    VerticalCoupler,
    Laser,
    Photodetector,
}

impl DeviceKind {
    pub fn label(self) -> &'static str {
        match self {
            DeviceKind::MrSameLayer => "mr_same_layer",
            DeviceKind::MrCrossLayer => "mr_cross_layer",
            DeviceKind::PseSameLayer => "pse_same_layer",
            DeviceKind::PseCrossLayer => "pse_cross_layer",
            DeviceKind::VerticalCoupler => "vertical_coupler",
            DeviceKind::Laser => "laser",
            DeviceKind::Photodetector => "photodetector",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub kind: DeviceKind,
    pub at: Point,
    /// Layers the device touches; a cross-layer device lists both.
    pub layers: Vec<Layer>,
    pub wavelength: Option<u32>,
}

/// Per-waveguide bookkeeping: the contiguous run of segments it owns.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveguideRecord {
    pub id: WaveguideId,
    pub first_segment: usize,
    pub segment_count: usize,
    pub length: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhotonicLayout {
    unit_mm: f64,
    segments: Vec<Segment>,
    waveguides: Vec<WaveguideRecord>,
    devices: Vec<Device>,
}

impl PhotonicLayout {
    pub fn new(unit_mm: f64) -> Self {
        PhotonicLayout {
            unit_mm,
            segments: Vec::new(),
            waveguides: Vec::new(),
            devices: Vec::new(),
        }
    }

    pub fn unit_mm(&self) -> f64 {
        self.unit_mm
    }

    pub fn set_unit_mm(&mut self, unit_mm: f64) {
        self.unit_mm = unit_mm;
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn devices(&self) -> &[Device] {
        &self.devices
    }

    pub fn waveguides(&self) -> &[WaveguideRecord] {
        &self.waveguides
    }

    pub fn waveguide(&self, id: WaveguideId) -> Option<&WaveguideRecord> {
        self.waveguides.iter().find(|w| w.id == id)
    }

    pub fn waveguide_segments(&self, id: WaveguideId) -> &[Segment] {
        match self.waveguide(id) {
            Some(w) => &self.segments[w.first_segment..w.first_segment + w.segment_count],
            None => &[],
        }
    }

    /// Adds a waveguide drawn through `points`. Repeated points are skipped
    /// and collinear runs are merged; diagonal steps are rejected.
    pub fn add_waveguide(&mut self, id: WaveguideId, layer: Layer, points: &[Point]) -> Result<()> {
        self.add_waveguide_layered(id, points, |_| layer)
    }

    /// Like [`add_waveguide`](Self::add_waveguide) but lets every merged
    /// segment pick its own layer from its index.
    pub fn add_waveguide_layered(
        &mut self,
        id: WaveguideId,
        points: &[Point],
        layer_of: impl Fn(usize) -> Layer,
    ) -> Result<()> {
        if self.waveguide(id).is_some() {
            return Err(Error::invariant(format!("waveguide {id} added twice")));
        }
        let pts = simplify(points);
        let first = self.segments.len();
        let mut length = 0;
        for (k, pair) in pts.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            if a.x != b.x && a.y != b.y {
                return Err(Error::invariant(format!(
                    "waveguide {id} has a diagonal step {a:?} -> {b:?}"
                )));
            }
            length += a.manhattan(b);
            self.segments.push(Segment {
                layer: layer_of(k),
                waveguide: id,
                a,
                b,
            });
        }
        self.waveguides.push(WaveguideRecord {
            id,
            first_segment: first,
            segment_count: self.segments.len() - first,
            length,
        });
        Ok(())
    }

    pub fn add_device(&mut self, device: Device) {
        self.devices.push(device);
    }

    /// Moves every segment of `id` to `layer`.
    pub fn set_waveguide_layer(&mut self, id: WaveguideId, layer: Layer) {
        if let Some(w) = self.waveguide(id).cloned() {
            for s in &mut self.segments[w.first_segment..w.first_segment + w.segment_count] {
                s.layer = layer;
            }
        }
    }

    /// Checks the structural invariants: Manhattan segments, connected
    /// waveguides and no collinear overlap between segments on one layer.
    pub fn validate(&self) -> Result<()> {
        for w in &self.waveguides {
            let segs = &self.segments[w.first_segment..w.first_segment + w.segment_count];
            for s in segs {
                if s.a.x != s.b.x && s.a.y != s.b.y {
                    return Err(Error::invariant(format!(
                        "segment of {} is not axis-aligned",
                        w.id
                    )));
                }
            }
            for pair in segs.windows(2) {
                if pair[0].b != pair[1].a {
                    return Err(Error::invariant(format!(
                        "waveguide {} is disconnected",
                        w.id
                    )));
                }
            }
        }
        CrossingIndex::build(self).map(|_| ())
    }

    /// Line-oriented text dump: one `seg` line per segment and one `dev`
    /// line per device, coordinates in millimetres.
    pub fn dump(&self) -> String {
        let mm = |v: i64| crate::fmt::sig6(v as f64 * self.unit_mm);
        let mut out = String::new();
        out.push_str("# seg layer x1_mm y1_mm x2_mm y2_mm waveguide\n");
        for s in &self.segments {
            let _ = writeln!(
                out,
                "seg {} {} {} {} {} {}",
                s.layer.number(),
                mm(s.a.x),
                mm(s.a.y),
                mm(s.b.x),
                mm(s.b.y),
                s.waveguide.0
            );
        }
        out.push_str("# dev kind x_mm y_mm layers wavelength\n");
        for d in &self.devices {
            let layers: Vec<String> = d.layers.iter().map(|l| l.number().to_string()).collect();
            let _ = writeln!(
                out,
                "dev {} {} {} {} {}",
                d.kind.label(),
                mm(d.at.x),
                mm(d.at.y),
                layers.join("+"),
                d.wavelength
                    .map_or_else(|| "-".to_string(), |w| w.to_string())
            );
        }
        out
    }
}

fn simplify(points: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if out.last() == Some(&p) {
            continue;
        }
        if out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let same_line = (a.x == b.x && b.x == p.x) || (a.y == b.y && b.y == p.y);
            let forward = (b.x - a.x).signum() == (p.x - b.x).signum()
                && (b.y - a.y).signum() == (p.y - b.y).signum();
            if same_line && forward {
                out.pop();
            }
        }
        out.push(p);
    }
    out
}
