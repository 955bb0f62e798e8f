//! Loss aggregation and the three experiment families: scale comparison,
//! distance sweep and break-even frontier.
//!
//! Every per-pair loss is affine in the propagation and crossing
//! coefficients once drops and couplers are fixed, so frontiers and pitch
//! calibration are solved in closed form from the per-pair counters.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::crossbar::{
    build_crossbar_with, CrossbarInstance, CrossbarKind, LayerMode, LayoutOptions, LayoutStyle,
};
use crate::error::{Error, Result};
use crate::grid::{CoreId, GridArchitecture};
use crate::loss::{compute_total_loss, LossParams, PathCharacteristics};
use crate::ring::{
    assign_rings, assign_wavelengths, ornoc_path, ornoc_resources, RingAssignment,
    WavelengthAssignment,
};

/// Environment variable capping worker threads; `0` or unset means one per
/// logical CPU.
pub const THREADS_ENV: &str = "ONOC_XBAR_THREADS";

/// Sizes the global worker pool from [`THREADS_ENV`]. Has no effect once the
/// pool is running.
pub fn init_threads() -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidParameter {
                name: THREADS_ENV.into(),
                reason: format!("`{v}` is not a thread count"),
            })?,
        Err(_) => 0,
    };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// A network implementation: the two-layer ring or one of the twelve
/// crossbar variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Topology {
    Ornoc,
    Crossbar {
        kind: CrossbarKind,
        mode: LayerMode,
        style: LayoutStyle,
    },
}

impl Topology {
    /// The ring and the six multi-layer crossbars.
    pub fn multilayer() -> Vec<Topology> {
        let mut v = vec![Topology::Ornoc];
        for kind in CrossbarKind::ALL {
            for style in [LayoutStyle::A, LayoutStyle::B] {
                v.push(Topology::Crossbar {
                    kind,
                    mode: LayerMode::Multi,
                    style,
                });
            }
        }
        v
    }

    /// The ring and all twelve crossbars.
    pub fn all() -> Vec<Topology> {
        let mut v = vec![Topology::Ornoc];
        for kind in CrossbarKind::ALL {
            for mode in [LayerMode::Multi, LayerMode::Single] {
                for style in [LayoutStyle::A, LayoutStyle::B] {
                    v.push(Topology::Crossbar { kind, mode, style });
                }
            }
        }
        v
    }

    /// Network name without layer mode and layout.
    pub fn family(&self) -> &'static str {
        match self {
            Topology::Ornoc => "ornoc",
            Topology::Crossbar { kind, .. } => kind.label(),
        }
    }

    pub fn layer_mode(&self) -> LayerMode {
        match self {
            Topology::Ornoc => LayerMode::Multi,
            Topology::Crossbar { mode, .. } => *mode,
        }
    }

    pub fn layout(&self) -> Option<LayoutStyle> {
        match self {
            Topology::Ornoc => None,
            Topology::Crossbar { style, .. } => Some(*style),
        }
    }

    /// The parameter set this topology is scored with: multi-layer networks
    /// fill an absent cross-layer drop and coupler loss with the defaults.
    pub fn effective_params(&self, params: &LossParams) -> LossParams {
        match self.layer_mode() {
            LayerMode::Multi => params.clone().with_multilayer_defaults(),
            LayerMode::Single => params.clone(),
        }
    }

    pub fn build(&self, grid: &GridArchitecture, options: &BuildOptions) -> Result<Instance> {
        match *self {
            Topology::Ornoc => {
                let rings = assign_rings(grid);
                let wavelengths = assign_wavelengths(grid, &rings, options.max_wavelengths)?;
                Ok(Instance::Ornoc {
                    grid: *grid,
                    rings,
                    wavelengths,
                })
            }
            Topology::Crossbar { kind, mode, style } => Ok(Instance::Crossbar(
                build_crossbar_with(kind, grid, mode, style, &options.layout)?,
            )),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Ornoc => f.write_str("ornoc-ml"),
            Topology::Crossbar { kind, mode, style } => write!(f, "{kind}-{mode}-{style}"),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    /// Parses labels such as `ornoc-ml`, `matrix-ml-b` or
    /// `lambda-router-sl-a`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Topology::all()
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "topology".into(),
                reason: format!(
                    "`{s}` is not one of {}",
                    Topology::all()
                        .iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            })
    }
}

/// Construction knobs shared by every topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub layout: LayoutOptions,
    /// Wavelengths per ring waveguide.
    pub max_wavelengths: u32,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            layout: LayoutOptions::default(),
            max_wavelengths: crate::ring::DEFAULT_MAX_WAVELENGTHS,
        }
    }
}

/// A built topology on a concrete grid.
#[derive(Debug, Clone)]
pub enum Instance {
    Ornoc {
        grid: GridArchitecture,
        rings: RingAssignment,
        wavelengths: WavelengthAssignment,
    },
    Crossbar(CrossbarInstance),
}

/// Device and channel counts of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resources {
    /// Largest number of wavelengths carried by one waveguide.
    pub wavelengths: usize,
    pub waveguides: usize,
    /// Microrings of the network itself.
    pub mr_count: usize,
    pub lasers: usize,
    pub photodetectors: usize,
}

impl Instance {
    pub fn topology(&self) -> Topology {
        match self {
            Instance::Ornoc { .. } => Topology::Ornoc,
            Instance::Crossbar(x) => Topology::Crossbar {
                kind: x.kind(),
                mode: x.mode(),
                style: x.style(),
            },
        }
    }

    pub fn grid(&self) -> &GridArchitecture {
        match self {
            Instance::Ornoc { grid, .. } => grid,
            Instance::Crossbar(x) => x.grid(),
        }
    }

    /// The same instance at another pitch; nothing is re-routed.
    pub fn with_pitch(&self, pitch_mm: f64) -> Result<Instance> {
        Ok(match self {
            Instance::Ornoc {
                grid,
                rings,
                wavelengths,
            } => Instance::Ornoc {
                grid: grid.with_pitch(pitch_mm)?,
                rings: rings.clone(),
                wavelengths: wavelengths.clone(),
            },
            Instance::Crossbar(x) => Instance::Crossbar(x.with_pitch(pitch_mm)?),
        })
    }

    pub fn path(&self, src: CoreId, dst: CoreId) -> Result<PathCharacteristics> {
        match self {
            Instance::Ornoc { grid, rings, .. } => ornoc_path(grid, rings, src, dst),
            Instance::Crossbar(x) => x.trace_path(src, dst),
        }
    }

    /// Every ordered pair of distinct cores in (source, destination) order.
    pub fn pairs(&self) -> Vec<(CoreId, CoreId)> {
        let m = self.grid().cores();
        (0..m * m)
            .filter(|k| k / m != k % m)
            .map(|k| (CoreId::from_index(k / m), CoreId::from_index(k % m)))
            .collect()
    }

    pub fn resources(&self) -> Resources {
        let channels = self.grid().cores() * (self.grid().cores() - 1);
        match self {
            Instance::Ornoc {
                grid, wavelengths, ..
            } => {
                let r = ornoc_resources(grid, wavelengths);
                Resources {
                    wavelengths: r.rings.iter().map(|u| u.wavelengths).max().unwrap_or(0) as usize,
                    waveguides: r.total_waveguides as usize,
                    mr_count: r.receiver_mrs,
                    lasers: r.lasers,
                    photodetectors: r.photodetectors,
                }
            }
            Instance::Crossbar(x) => Resources {
                wavelengths: x.wavelengths(),
                waveguides: x.waveguides(),
                mr_count: x.mr_count(),
                lasers: channels,
                photodetectors: channels,
            },
        }
    }

    /// Per-pair counters, in pair order.
    pub fn all_paths(&self) -> Result<Vec<PathCharacteristics>> {
        self.pairs()
            .into_par_iter()
            .map(|(s, d)| self.path(s, d))
            .collect()
    }
}

/// Loss of one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairLoss {
    pub src: CoreId,
    pub dst: CoreId,
    pub path: PathCharacteristics,
    pub loss_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationResult {
    pub topology: Topology,
    pub grid_n: usize,
    pub pitch_mm: f64,
    pub param_set: String,
    pub worst_case_db: f64,
    pub average_db: f64,
    pub pairs: Vec<PairLoss>,
    pub resources: Resources,
}

/// Scores every ordered pair of `instance` with `params` as given.
///
/// Pairs are scored in parallel but aggregated in pair order, so the result
/// does not depend on the number of workers.
pub fn evaluate(instance: &Instance, params: &LossParams) -> Result<EvaluationResult> {
    let pairs = instance.pairs();
    let scored: Vec<PairLoss> = pairs
        .into_par_iter()
        .map(|(src, dst)| {
            let path = instance.path(src, dst)?;
            Ok(PairLoss {
                src,
                dst,
                path,
                loss_db: compute_total_loss(&path, params)?,
            })
        })
        .collect::<Result<_>>()?;
    let worst = scored
        .iter()
        .map(|p| p.loss_db)
        .fold(f64::NEG_INFINITY, f64::max);
    let average = scored.iter().map(|p| p.loss_db).sum::<f64>() / scored.len() as f64;
    Ok(EvaluationResult {
        topology: instance.topology(),
        grid_n: instance.grid().n(),
        pitch_mm: instance.grid().pitch_mm(),
        param_set: params.name.clone(),
        worst_case_db: worst,
        average_db: average,
        pairs: scored,
        resources: instance.resources(),
    })
}

/// Builds and scores `topology` with its [`Topology::effective_params`].
pub fn evaluate_topology(
    topology: Topology,
    grid: &GridArchitecture,
    params: &LossParams,
    options: &BuildOptions,
) -> Result<EvaluationResult> {
    evaluate(
        &topology.build(grid, options)?,
        &topology.effective_params(params),
    )
}

/// One result per (topology, pitch), topologies outermost. Each topology is
/// drawn once and rescaled to every pitch.
pub fn sweep_distance(
    topologies: &[Topology],
    n: usize,
    pitches: &[f64],
    params: &LossParams,
    options: &BuildOptions,
) -> Result<Vec<EvaluationResult>> {
    let first = *pitches.first().ok_or_else(|| Error::InvalidParameter {
        name: "pitches".into(),
        reason: "at least one pitch is required".into(),
    })?;
    for &p in pitches {
        GridArchitecture::new(n, p)?;
    }
    let grid = GridArchitecture::new(n, first)?;
    let mut out = Vec::with_capacity(topologies.len() * pitches.len());
    for t in topologies {
        let instance = t.build(&grid, options)?;
        let params = t.effective_params(params);
        for &p in pitches {
            out.push(evaluate(&instance.with_pitch(p)?, &params)?);
        }
    }
    Ok(out)
}

/// Loss of a pair as `propagation·length_cm + crossing·crossings + constant`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Affine {
    length_cm: f64,
    crossings: f64,
    constant_db: f64,
}

/// The distinct affine pair losses of `instance` under the drop and coupler
/// coefficients of `fixed`.
fn affine_losses(instance: &Instance, fixed: &LossParams) -> Result<Vec<Affine>> {
    let mut zeroed = fixed.clone();
    zeroed.propagation_db_per_cm = 0.0;
    zeroed.crossing_db = 0.0;
    let mut v = instance
        .all_paths()?
        .iter()
        .map(|p| {
            Ok(Affine {
                length_cm: p.length_cm,
                crossings: p.crossings as f64,
                constant_db: compute_total_loss(p, &zeroed)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    v.sort_by(|a, b| {
        (a.length_cm, a.crossings, a.constant_db)
            .partial_cmp(&(b.length_cm, b.crossings, b.constant_db))
            .expect("finite")
    });
    v.dedup();
    Ok(v)
}

fn worst_at(lines: &[Affine], p_prop: f64, p_cross: f64) -> f64 {
    lines
        .iter()
        .map(|l| p_prop * l.length_cm + p_cross * l.crossings + l.constant_db)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Upper envelope of lines `(slope, intercept)` as the sorted list of
/// abscissae where the maximising line changes.
fn breakpoints(lines: &[(f64, f64)]) -> Vec<f64> {
    let mut sorted = lines.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for l in sorted {
        if let Some(last) = hull.last() {
            if last.0 == l.0 {
                hull.pop();
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // `b` never wins if `l` overtakes `a` no later than `b` does.
            if (l.1 - a.1) * (b.0 - a.0) >= (b.1 - a.1) * (l.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }
    hull.windows(2)
        .map(|w| (w[0].1 - w[1].1) / (w[1].0 - w[0].0))
        .collect()
}

/// Which topology has the lower worst-case loss, or how they trade places.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontierStatus {
    /// Equal worst cases at the reported propagation loss.
    Crossover,
    /// `a` is strictly better over the whole propagation range.
    AWins,
    /// `b` is at least as good over the whole propagation range.
    BWins,
}

impl FrontierStatus {
    pub fn label(self) -> &'static str {
        match self {
            FrontierStatus::Crossover => "crossover",
            FrontierStatus::AWins => "a wins in range",
            FrontierStatus::BWins => "b wins in range",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    pub p_crossing_db: f64,
    /// Propagation loss at which both worst cases are equal.
    pub p_propagation_star: Option<f64>,
    pub status: FrontierStatus,
}

/// Propagation losses searched by [`breakeven_frontier`], in dB/cm.
pub const PROPAGATION_RANGE: (f64, f64) = (0.0, 2.0);

/// Worst-case comparison of two built topologies under varying propagation
/// and crossing losses.
#[derive(Debug, Clone)]
pub struct Frontier {
    a: Vec<Affine>,
    b: Vec<Affine>,
}

impl Frontier {
    /// Decomposes both instances with the drop and coupler losses of `fixed`;
    /// its propagation and crossing losses are ignored.
    pub fn new(a: &Instance, b: &Instance, fixed: &LossParams) -> Result<Frontier> {
        Ok(Frontier {
            a: affine_losses(a, fixed)?,
            b: affine_losses(b, fixed)?,
        })
    }

    /// Worst-case loss of `a` minus that of `b`.
    pub fn delta(&self, p_prop: f64, p_cross: f64) -> f64 {
        worst_at(&self.a, p_prop, p_cross) - worst_at(&self.b, p_prop, p_cross)
    }

    /// The smallest propagation loss in [`PROPAGATION_RANGE`] at which the
    /// worst cases are equal for crossing loss `p_cross`.
    pub fn point(&self, p_cross: f64) -> FrontierPoint {
        let (lo, hi) = PROPAGATION_RANGE;
        let lines = |set: &[Affine]| -> Vec<(f64, f64)> {
            set.iter()
                .map(|l| (l.length_cm, p_cross * l.crossings + l.constant_db))
                .collect()
        };
        let mut xs: Vec<f64> = breakpoints(&lines(&self.a))
            .into_iter()
            .chain(breakpoints(&lines(&self.b)))
            .filter(|&x| x > lo && x < hi)
            .collect();
        xs.push(lo);
        xs.push(hi);
        xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        xs.dedup();
        let g = |p: f64| self.delta(p, p_cross);
        let found = |p| FrontierPoint {
            p_crossing_db: p_cross,
            p_propagation_star: Some(p),
            status: FrontierStatus::Crossover,
        };
        let mut prev = (xs[0], g(xs[0]));
        if prev.1 == 0.0 {
            return found(prev.0);
        }
        for &x in &xs[1..] {
            let gx = g(x);
            if gx == 0.0 {
                return found(x);
            }
            if (gx > 0.0) != (prev.1 > 0.0) {
                // `g` is linear between consecutive breakpoints.
                return found(prev.0 + (x - prev.0) * prev.1 / (prev.1 - gx));
            }
            prev = (x, gx);
        }
        let status = if prev.1 < 0.0 {
            FrontierStatus::AWins
        } else {
            FrontierStatus::BWins
        };
        FrontierPoint {
            p_crossing_db: p_cross,
            p_propagation_star: None,
            status,
        }
    }

    /// Whether both topologies have the same worst case everywhere.
    pub fn is_degenerate(&self) -> bool {
        let (lo, hi) = PROPAGATION_RANGE;
        [0.0, 0.1, 0.2, 1.0].iter().all(|&pc| {
            let lines = |set: &[Affine]| -> Vec<(f64, f64)> {
                set.iter()
                    .map(|l| (l.length_cm, pc * l.crossings + l.constant_db))
                    .collect()
            };
            let mut xs = breakpoints(&lines(&self.a));
            xs.extend(breakpoints(&lines(&self.b)));
            xs.extend([lo, hi, hi + 1.0]);
            xs.iter().all(|&x| self.delta(x, pc).abs() <= 1e-12)
        })
    }
}

/// Break-even propagation loss of `a` against `b` for every crossing loss in
/// `crossings`, with drops and couplers taken from `fixed`. Below the
/// frontier `a` has the lower worst-case loss.
pub fn breakeven_frontier(
    a: &Instance,
    b: &Instance,
    fixed: &LossParams,
    crossings: &[f64],
) -> Result<Vec<FrontierPoint>> {
    let frontier = Frontier::new(a, b, fixed)?;
    if frontier.is_degenerate() {
        return Err(Error::DegenerateFrontier);
    }
    Ok(crossings.iter().map(|&pc| frontier.point(pc)).collect())
}

/// `count` evenly spaced crossing losses from 0 to 0.2 dB.
pub fn crossing_samples(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count)
            .map(|i| 0.2 * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Pitch at which the worst-case loss of `instance` equals `target_db`.
pub fn calibrate_pitch(instance: &Instance, params: &LossParams, target_db: f64) -> Result<f64> {
    let pitch = instance.grid().pitch_mm();
    let mut best = f64::INFINITY;
    for p in instance.all_paths()? {
        let total = compute_total_loss(&p, params)?;
        let per_mm = params.propagation_db_per_cm * p.length_cm / pitch;
        let fixed = total - per_mm * pitch;
        if fixed >= target_db {
            return Err(Error::InvalidParameter {
                name: "target_db".into(),
                reason: format!("{target_db} dB is below the length-independent loss {fixed} dB"),
            });
        }
        if per_mm > 0.0 {
            best = best.min((target_db - fixed) / per_mm);
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::InvalidParameter {
            name: "target_db".into(),
            reason: "no path loss depends on the pitch".into(),
        })
    }
}

/// Which loss aggregate a comparison refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    WorstCase,
    Average,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::WorstCase => "worst_case",
            Metric::Average => "average",
        }
    }

    pub fn of(self, r: &EvaluationResult) -> f64 {
        match self {
            Metric::WorstCase => r.worst_case_db,
            Metric::Average => r.average_db,
        }
    }
}

/// Improvement of the ring over the crossbars at one scale, in percent of
/// the crossbar loss.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub grid_n: usize,
    pub metric: Metric,
    /// Against the crossbar with the lowest loss.
    pub vs_best_pct: f64,
    pub best: Topology,
    /// Mean of the improvements against every crossbar.
    pub vs_mean_pct: f64,
}

/// Per-scale improvements followed by their means over all scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementReport {
    pub per_scale: Vec<Improvement>,
    pub mean_vs_best_pct: [f64; 2],
    pub mean_vs_mean_pct: [f64; 2],
}

/// `(baseline − ornoc) / baseline` for both metrics at every scale of
/// `ornoc`. Every baseline must share the scale, pitch and parameter set of
/// a ring result.
pub fn improvement_report(
    baseline: &[EvaluationResult],
    ornoc: &[EvaluationResult],
) -> Result<ImprovementReport> {
    if ornoc.is_empty() {
        return Err(Error::MismatchedRuns("no ring results".into()));
    }
    let mut per_scale = Vec::new();
    for o in ornoc {
        let rivals: Vec<&EvaluationResult> =
            baseline.iter().filter(|b| b.grid_n == o.grid_n).collect();
        if rivals.is_empty() {
            return Err(Error::MismatchedRuns(format!(
                "no baseline at {0}x{0}",
                o.grid_n
            )));
        }
        if let Some(b) = rivals
            .iter()
            .find(|b| b.pitch_mm != o.pitch_mm || b.param_set != o.param_set)
        {
            return Err(Error::MismatchedRuns(format!(
                "{} at {}x{} uses {} mm and `{}`, the ring {} mm and `{}`",
                b.topology, b.grid_n, b.grid_n, b.pitch_mm, b.param_set, o.pitch_mm, o.param_set
            )));
        }
        for metric in [Metric::WorstCase, Metric::Average] {
            let gain = |b: &EvaluationResult| 100.0 * (metric.of(b) - metric.of(o)) / metric.of(b);
            let best = rivals
                .iter()
                .min_by(|x, y| metric.of(x).partial_cmp(&metric.of(y)).expect("finite"))
                .expect("non-empty");
            per_scale.push(Improvement {
                grid_n: o.grid_n,
                metric,
                vs_best_pct: gain(best),
                best: best.topology,
                vs_mean_pct: rivals.iter().map(|b| gain(b)).sum::<f64>() / rivals.len() as f64,
            });
        }
    }
    let mean = |metric: Metric, f: fn(&Improvement) -> f64| {
        let v: Vec<f64> = per_scale
            .iter()
            .filter(|i| i.metric == metric)
            .map(f)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    Ok(ImprovementReport {
        mean_vs_best_pct: [
            mean(Metric::WorstCase, |i| i.vs_best_pct),
            mean(Metric::Average, |i| i.vs_best_pct),
        ],
        mean_vs_mean_pct: [
            mean(Metric::WorstCase, |i| i.vs_mean_pct),
            mean(Metric::Average, |i| i.vs_mean_pct),
        ],
        per_scale,
    })
}

/// Header of [`results_csv`].
pub const RESULTS_HEADER: &str =
    "topology,layout,layer_mode,grid,pitch_mm,param_set,worst_db,avg_db,wavelengths,waveguides,mr_count";

/// One CSV row per result, numbers with six significant digits.
pub fn results_csv(results: &[EvaluationResult]) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.topology.family(),
            r.topology.layout().map_or("-", |s| s.label()),
            r.topology.layer_mode(),
            r.grid_n,
            crate::fmt::sig6(r.pitch_mm),
            r.param_set,
            crate::fmt::sig6(r.worst_case_db),
            crate::fmt::sig6(r.average_db),
            r.resources.wavelengths,
            r.resources.waveguides,
            r.resources.mr_count
        ));
    }
    out
}

/// Per-pair losses of one result.
pub fn pairs_csv(result: &EvaluationResult) -> String {
    let mut out = String::from("src,dst,length_cm,n_crossing,n_drop1,n_drop2,n_coupler,loss_db\n");
    for p in &result.pairs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.src.0,
            p.dst.0,
            crate::fmt::sig6(p.path.length_cm),
            p.path.crossings,
            p.path.drops_same_layer,
            p.path.drops_cross_layer,
            p.path.couplers,
            crate::fmt::sig6(p.loss_db)
        ));
    }
    out
}

/// Header of [`frontier_csv`].
pub const FRONTIER_HEADER: &str = "p_crossing_db,p_propagation_star_db_per_cm,status";

pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    let mut out = format!("{FRONTIER_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            crate::fmt::sig6(p.p_crossing_db),
            p.p_propagation_star.map_or(String::new(), crate::fmt::sig6),
            p.status.label()
        ));
    }
    out
}
