//! Central crossbars: Matrix, λ-router and Snake.
//!
//! A crossbar instance is a device mesh drawn as a block in the middle of the
//! grid plus one transmitter and one receiver access waveguide per core.
//! Layout B access waveguides are shortest routes shared by the single- and
//! multi-layer variants. Layout A access waveguides never touch another one on
//! the same layer, so they are routed per layer mode. Every path is traced on
//! the resulting geometry, so lengths and crossings come from the drawing
//! itself.

mod access;
mod mesh;

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::{Arc, Mutex, OnceLock};

pub use access::{core_ports, route_access, AccessRoutes, LayoutOptions, UNITS_PER_PITCH};
pub use mesh::{CrossbarKind, Junction, Mesh, MeshRoute};

use crate::error::{Error, Result};
use crate::geometry::{
    CrossingIndex, Device, DeviceKind, Layer, PhotonicLayout, Point, RouteStyle, Selection,
    WaveguideId,
};
use crate::grid::{CoreId, GridArchitecture};
use crate::loss::PathCharacteristics;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayerMode {
    Single,
    Multi,
}

impl LayerMode {
    pub fn label(self) -> &'static str {
        match self {
            LayerMode::Single => "sl",
            LayerMode::Multi => "ml",
        }
    }
}

impl fmt::Display for LayerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Access-waveguide layout family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LayoutStyle {
    /// No access waveguide crosses another on the same layer.
    A,
    /// Shortest access waveguides.
    B,
}

impl LayoutStyle {
    pub fn label(self) -> &'static str {
        match self {
            LayoutStyle::A => "a",
            LayoutStyle::B => "b",
        }
    }

    pub fn route_style(self) -> RouteStyle {
        match self {
            LayoutStyle::A => RouteStyle::CrossingAverse,
            LayoutStyle::B => RouteStyle::Shortest,
        }
    }
}

impl fmt::Display for LayoutStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Counters of one traced path, with lengths in layout units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TracedPath {
    pub wavelength: u32,
    pub length_units: i64,
    pub crossings: u64,
    /// Part of `crossings` met on access waveguides.
    pub access_crossings: u64,
    pub drops_same_layer: u64,
    pub drops_cross_layer: u64,
    pub couplers: u64,
}

#[derive(Debug, Clone)]
struct WaveguideInfo {
    layer: Layer,
    length: i64,
    tx_len: i64,
    rx_len: i64,
}

#[derive(Debug)]
struct Traced {
    mesh: Arc<Mesh>,
    layout: PhotonicLayout,
    waveguides: Vec<WaveguideInfo>,
    paths: Vec<Option<TracedPath>>,
}

#[derive(Debug, Clone)]
pub struct CrossbarInstance {
    kind: CrossbarKind,
    grid: GridArchitecture,
    mode: LayerMode,
    style: LayoutStyle,
    options: LayoutOptions,
    traced: Arc<Traced>,
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

fn polyline_len(points: &[Point]) -> i64 {
    points.windows(2).map(|w| w[0].manhattan(w[1])).sum()
}

/// Draws the mesh (and access nets, if any), then traces every pair.
fn assemble(
    mesh: Arc<Mesh>,
    mode: LayerMode,
    access: Option<&AccessRoutes>,
    unit_mm: f64,
) -> Result<Traced> {
    let mut layout = PhotonicLayout::new(unit_mm);
    let mut info = Vec::with_capacity(mesh.waveguides().len());
    let (origin, scale) = access.map_or((Point::new(0, 0), 1), |a| (a.origin, a.scale));
    let place = |p: &Point| Point::new(origin.x + scale * p.x, origin.y + scale * p.y);

    for (w, local) in mesh.waveguides().iter().enumerate() {
        let layer = layer_of(&mesh, mode, w);
        let mut points = Vec::new();
        let (mut tx_len, mut rx_len) = (0, 0);
        if let (Some(a), Some(i)) = (access, mesh.waveguide_input(w)) {
            points.extend_from_slice(&a.tx[i]);
            tx_len = polyline_len(&a.tx[i]);
        }
        points.extend(local.iter().map(place));
        if let (Some(a), Some(j)) = (access, mesh.waveguide_output(w)) {
            points.extend_from_slice(&a.rx[j]);
            rx_len = polyline_len(&a.rx[j]);
        }
        let length = polyline_len(&points);
        layout.add_waveguide(WaveguideId(w as u32), layer, &points)?;
        info.push(WaveguideInfo {
            layer,
            length,
            tx_len,
            rx_len,
        });
    }

    for j in mesh.active_junctions() {
        let (la, lb) = (info[j.a].layer, info[j.b].layer);
        let cross = la != lb;
        let kind = match (mesh.kind(), cross) {
            (CrossbarKind::Matrix, false) => DeviceKind::MrSameLayer,
            (CrossbarKind::Matrix, true) => DeviceKind::MrCrossLayer,
            (_, false) => DeviceKind::PseSameLayer,
            (_, true) => DeviceKind::PseCrossLayer,
        };
        let layers = if cross { vec![la, lb] } else { vec![la] };
        layout.add_device(Device {
            kind,
            at: place(&j.at),
            layers,
            wavelength: Some(j.wavelength),
        });
    }
    if let Some(a) = access {
        for (w, wg) in info.iter().enumerate() {
            if let Some(i) = mesh.waveguide_input(w) {
                let at = a.tx[i][0];
                layout.add_device(Device {
                    kind: DeviceKind::Laser,
                    at,
                    layers: vec![Layer::One],
                    wavelength: None,
                });
                if wg.layer == Layer::Two {
                    let layers = vec![Layer::One, Layer::Two];
                    layout.add_device(Device {
                        kind: DeviceKind::VerticalCoupler,
                        at,
                        layers,
                        wavelength: None,
                    });
                }
            }
            if let Some(j) = mesh.waveguide_output(w) {
                let at = *a.rx[j].last().expect("routed");
                if wg.layer == Layer::Two {
                    let layers = vec![Layer::One, Layer::Two];
                    layout.add_device(Device {
                        kind: DeviceKind::VerticalCoupler,
                        at,
                        layers,
                        wavelength: None,
                    });
                }
                let layers = vec![Layer::One];
                layout.add_device(Device {
                    kind: DeviceKind::Photodetector,
                    at,
                    layers,
                    wavelength: None,
                });
            }
        }
    }

    let index = CrossingIndex::build(&layout)?;
    let m = mesh.inputs();
    let mut input_lane: Vec<usize> = (0..m).collect();
    let mut output_lane = input_lane.clone();
    if let Some(a) = access {
        for (lane, &core) in a.lane_core.iter().enumerate() {
            input_lane[core] = lane;
            output_lane[core] = lane;
        }
    }
    let mut paths = vec![None; m * m];
    for s in 0..m {
        for d in (0..m).filter(|&d| d != s) {
            paths[s * m + d] = Some(trace(
                &mesh,
                &info,
                &index,
                scale,
                input_lane[s],
                output_lane[d],
            )?);
        }
    }
    Ok(Traced {
        mesh,
        layout,
        waveguides: info,
        paths,
    })
}

fn trace(
    mesh: &Mesh,
    info: &[WaveguideInfo],
    index: &CrossingIndex,
    scale: i64,
    i: usize,
    j: usize,
) -> Result<TracedPath> {
    let id = |w: usize| WaveguideId(w as u32);
    let access_in = |w: usize| index.count_between(id(w), -1, info[w].tx_len) as u64;
    let access_out = |w: usize| {
        index.count_between(id(w), info[w].length - info[w].rx_len, info[w].length + 1) as u64
    };
    let coupler = |w: usize| (info[w].layer == Layer::Two) as u64;
    match mesh.route(i, j)? {
        MeshRoute::Through {
            waveguide: w,
            wavelength,
        } => Ok(TracedPath {
            wavelength,
            length_units: info[w].length,
            crossings: index.count(Selection::Waveguide(id(w))) as u64,
            access_crossings: access_in(w) + access_out(w),
            drops_same_layer: 0,
            drops_cross_layer: 0,
            couplers: 2 * coupler(w),
        }),
        MeshRoute::Drop { junction } => {
            let jn = mesh.junctions()[junction];
            let w_in = mesh.input_waveguide(i);
            let (w_out, arc_in, arc_out) = if jn.a == w_in {
                (jn.b, jn.arc_a, jn.arc_b)
            } else if jn.b == w_in {
                (jn.a, jn.arc_b, jn.arc_a)
            } else {
                return Err(Error::NoRoute {
                    src: i + 1,
                    dst: j + 1,
                });
            };
            if mesh.waveguide_output(w_out) != Some(j) {
                return Err(Error::NoRoute {
                    src: i + 1,
                    dst: j + 1,
                });
            }
            let arc_in = info[w_in].tx_len + scale * arc_in;
            let arc_out = info[w_out].tx_len + scale * arc_out;
            let end = info[w_out].length;
            let cross = info[w_in].layer != info[w_out].layer;
            Ok(TracedPath {
                wavelength: jn.wavelength,
                length_units: arc_in + (end - arc_out),
                crossings: (index.count_between(id(w_in), -1, arc_in)
                    + index.count_between(id(w_out), arc_out, end + 1))
                    as u64,
                access_crossings: access_in(w_in) + access_out(w_out),
                drops_same_layer: (!cross) as u64,
                drops_cross_layer: cross as u64,
                couplers: coupler(w_in) + coupler(w_out),
            })
        }
    }
}

type MeshKey = (CrossbarKind, usize);
type AccessKey = (CrossbarKind, usize, LayoutStyle, LayerMode, u64, u32);
type TracedKey = (AccessKey, LayerMode);

#[derive(Default)]
struct Caches {
    meshes: HashMap<MeshKey, Arc<Mesh>>,
    access: HashMap<AccessKey, Arc<AccessRoutes>>,
    traced: HashMap<TracedKey, Arc<Traced>>,
}

fn caches() -> &'static Mutex<Caches> {
    static CACHES: OnceLock<Mutex<Caches>> = OnceLock::new();
    CACHES.get_or_init(Default::default)
}

/// Looks `key` up in one of the caches, computing it outside the lock on a
/// miss. Concurrent misses compute the same deterministic value.
fn cached<K: Clone + Eq + std::hash::Hash, V>(
    pick: impl Fn(&mut Caches) -> &mut HashMap<K, Arc<V>>,
    key: K,
    make: impl FnOnce() -> Result<V>,
) -> Result<Arc<V>> {
    if let Some(v) = pick(&mut caches().lock().expect("cache lock")).get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(make()?);
    Ok(pick(&mut caches().lock().expect("cache lock"))
        .entry(key)
        .or_insert(v)
        .clone())
}

fn shared_mesh(kind: CrossbarKind, inputs: usize) -> Result<Arc<Mesh>> {
    cached(
        |c| &mut c.meshes,
        (kind, inputs),
        || Mesh::new(kind, inputs),
    )
}

/// Builds a crossbar on `grid` with the default [`LayoutOptions`].
pub fn build_crossbar(
    kind: CrossbarKind,
    grid: &GridArchitecture,
    mode: LayerMode,
    style: LayoutStyle,
) -> Result<CrossbarInstance> {
    build_crossbar_with(kind, grid, mode, style, &LayoutOptions::default())
}

pub fn build_crossbar_with(
    kind: CrossbarKind,
    grid: &GridArchitecture,
    mode: LayerMode,
    style: LayoutStyle,
    options: &LayoutOptions,
) -> Result<CrossbarInstance> {
    options.validate()?;
    let n = grid.n();
    let mesh = shared_mesh(kind, grid.cores())?;
    // Shortest access nets ignore layers and are shared by both modes.
    let access_mode = if style == LayoutStyle::A {
        mode
    } else {
        LayerMode::Single
    };
    let access_key = (
        kind,
        n,
        style,
        access_mode,
        options.block_span.to_bits(),
        options.tracks_per_pitch,
    );
    let access = cached(
        |c| &mut c.access,
        access_key,
        || route_access(&mesh, n, style.route_style(), access_mode, options),
    )?;
    let traced = cached(
        |c| &mut c.traced,
        (access_key, mode),
        || {
            assemble(
                mesh.clone(),
                mode,
                Some(&access),
                1.0 / UNITS_PER_PITCH as f64,
            )
        },
    )?;
    Ok(CrossbarInstance {
        kind,
        grid: *grid,
        mode,
        style,
        options: *options,
        traced,
    })
}

impl CrossbarInstance {
    pub fn kind(&self) -> CrossbarKind {
        self.kind
    }

    pub fn grid(&self) -> &GridArchitecture {
        &self.grid
    }

    pub fn mode(&self) -> LayerMode {
        self.mode
    }

    pub fn style(&self) -> LayoutStyle {
        self.style
    }

    pub fn options(&self) -> &LayoutOptions {
        &self.options
    }

    pub fn mesh(&self) -> &Mesh {
        &self.traced.mesh
    }

    /// Short name such as `matrix-ml-b`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}",
            self.kind.label(),
            self.mode.label(),
            self.style.label()
        )
    }

    /// The same crossbar on a grid with another pitch. Nothing is re-routed:
    /// the drawing scales with the pitch.
    pub fn with_pitch(&self, pitch_mm: f64) -> Result<CrossbarInstance> {
        Ok(CrossbarInstance {
            grid: self.grid.with_pitch(pitch_mm)?,
            ..self.clone()
        })
    }

    fn mm_per_unit(&self) -> f64 {
        self.grid.pitch_mm() / UNITS_PER_PITCH as f64
    }

    /// The drawing at this instance's pitch.
    pub fn layout(&self) -> PhotonicLayout {
        let mut layout = self.traced.layout.clone();
        layout.set_unit_mm(self.mm_per_unit());
        layout
    }

    pub fn traced(&self, src: CoreId, dst: CoreId) -> Result<&TracedPath> {
        self.grid.check(src)?;
        self.grid.check(dst)?;
        if src == dst {
            return Err(Error::SelfCommunication(src.0));
        }
        let m = self.grid.cores();
        self.traced.paths[src.index() * m + dst.index()]
            .as_ref()
            .ok_or(Error::NoRoute {
                src: src.0,
                dst: dst.0,
            })
    }

    /// Path counters of one communication.
    pub fn trace_path(&self, src: CoreId, dst: CoreId) -> Result<PathCharacteristics> {
        let t = self.traced(src, dst)?;
        Ok(PathCharacteristics {
            length_cm: t.length_units as f64 * self.mm_per_unit() / 10.0,
            crossings: t.crossings,
            drops_same_layer: t.drops_same_layer,
            drops_cross_layer: t.drops_cross_layer,
            couplers: t.couplers,
        })
    }

    /// Every ordered pair in (source, destination) order.
    pub fn pairs(&self) -> impl Iterator<Item = (CoreId, CoreId)> + '_ {
        let m = self.grid.cores();
        (0..m * m)
            .filter(move |k| k / m != k % m)
            .map(move |k| (CoreId::from_index(k / m), CoreId::from_index(k % m)))
    }

    pub fn wavelengths(&self) -> usize {
        self.mesh().wavelength_count()
    }

    pub fn waveguides(&self) -> usize {
        self.mesh().waveguides().len()
    }

    pub fn mr_count(&self) -> usize {
        self.mesh().mr_count()
    }

    /// Whether a single waveguide would need more than `max_wavelengths`.
    pub fn exceeds_wavelength_cap(&self, max_wavelengths: u32) -> bool {
        self.wavelengths() > max_wavelengths as usize
    }

    /// Largest same-layer crossing count over all paths.
    pub fn worst_case_crossings(&self) -> u64 {
        self.traced
            .paths
            .iter()
            .flatten()
            .map(|p| p.crossings)
            .max()
            .unwrap_or(0)
    }

    /// Per-pair CSV: src, dst, wavelength, length_cm, n_crossing, n_drop1,
    /// n_drop2, n_coupler.
    pub fn trace_csv(&self) -> String {
        let mut out =
            String::from("src,dst,wavelength,length_cm,n_crossing,n_drop1,n_drop2,n_coupler\n");
        for (s, d) in self.pairs() {
            let t = self.traced(s, d).expect("traced pair");
            let p = self.trace_path(s, d).expect("traced pair");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.0,
                d.0,
                t.wavelength,
                crate::fmt::sig6(p.length_cm),
                p.crossings,
                p.drops_same_layer,
                p.drops_cross_layer,
                p.couplers
            );
        }
        out
    }

    /// Layer of waveguide `w`.
    pub fn waveguide_layer(&self, w: usize) -> Option<Layer> {
        self.traced.waveguides.get(w).map(|i| i.layer)
    }
}

/// Closed-form single-layer worst case of the multistage crossbars on a
/// `side`×`side` grid: `side²-1` for the λ-router, `2·side²-5` for the Snake.
pub fn closed_form_crossings(kind: CrossbarKind, side: usize) -> Option<u64> {
    let m = (side * side) as u64;
    match kind {
        CrossbarKind::LambdaRouter => Some(m - 1),
        CrossbarKind::Snake if m >= 3 => Some(2 * m - 5),
        _ => None,
    }
}

/// Worst-case same-layer crossings inside the crossbar of a `side`×`side`
/// grid, found by tracing every pair through the bare mesh. Single-layer
/// multistage results are checked against [`closed_form_crossings`].
pub fn worst_case_crossings(kind: CrossbarKind, side: usize, mode: LayerMode) -> Result<u64> {
    if side < 2 {
        return Err(Error::InvalidGrid(format!(
            "need at least 2 cores per side, got {side}"
        )));
    }
    let mesh = shared_mesh(kind, side * side)?;
    let traced = assemble(mesh, mode, None, 1.0)?;
    let worst = traced
        .paths
        .iter()
        .flatten()
        .map(|p| p.crossings)
        .max()
        .unwrap_or(0);
    if mode == LayerMode::Single {
        if let Some(expected) = closed_form_crossings(kind, side) {
            if worst != expected {
                return Err(Error::invariant(format!(
                    "{kind} on {side}x{side}: traced worst case {worst} crossings, closed form {expected}"
                )));
            }
        }
    }
    Ok(worst)
}

/// Mesh-only trace of every pair, for inspection and tests.
pub fn mesh_paths(
    kind: CrossbarKind,
    inputs: usize,
    mode: LayerMode,
) -> Result<Vec<Option<TracedPath>>> {
    let mesh = shared_mesh(kind, inputs)?;
    Ok(assemble(mesh, mode, None, 1.0)?.paths)
}
