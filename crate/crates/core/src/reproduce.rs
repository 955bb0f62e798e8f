//! The full comparison suite: scale comparison under every preset, distance
//! sweep and break-even frontier, with a summary against published figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::analysis::{
    calibrate_pitch, crossing_samples, evaluate, improvement_report, results_csv, BuildOptions,
    EvaluationResult, Frontier, FrontierPoint, ImprovementReport, Instance, Metric, Topology,
    FRONTIER_HEADER,
};
use crate::crossbar::{CrossbarKind, LayerMode, LayoutStyle};
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::grid::GridArchitecture;
use crate::loss::{builtin_presets, preset, LossParams};

/// Published 8×8 figures under the Biberman preset.
pub mod published {
    pub const RING_WORST_DB: f64 = 4.5;
    pub const MATRIX_ML_B_WORST_DB: f64 = 4.75;
    pub const RING_AVERAGE_DB: f64 = 2.02;
    pub const MATRIX_ML_B_AVERAGE_DB: f64 = 4.0;
    /// Ring improvement in worst-case and average loss over Matrix_ML,B at
    /// 8×8 and 2.5 mm.
    pub const IMPROVEMENT_VS_MATRIX_PCT: [f64; 2] = [22.0, 51.4];
    /// Ring improvement in worst-case and average loss, averaged over the
    /// other implementations and scales.
    pub const IMPROVEMENT_MEAN_PCT: [f64; 2] = [36.9, 55.2];
    /// Average-loss improvement at 2×2 and 8×8.
    pub const AVERAGE_IMPROVEMENT_2X2_PCT: f64 = 54.0;
    pub const AVERAGE_IMPROVEMENT_8X8_PCT: f64 = 56.3;
}

/// The closest crossbar competitor in the published comparison.
pub const MATRIX_ML_B: Topology = Topology::Crossbar {
    kind: CrossbarKind::Matrix,
    mode: LayerMode::Multi,
    style: LayoutStyle::B,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceOptions {
    /// Pitch of the scale comparison in mm.
    pub pitch_mm: f64,
    /// Replace `pitch_mm` by the pitch at which the 8×8 ring reaches its
    /// published worst case.
    pub calibrate: bool,
    /// Scales of the Biberman comparison.
    pub scales: Vec<usize>,
    /// Scales evaluated under every preset.
    pub preset_scales: Vec<usize>,
    pub sweep_grid: usize,
    pub sweep_pitches: Vec<f64>,
    pub frontier_grid: usize,
    pub frontier_pitches: Vec<f64>,
    pub frontier_samples: usize,
    pub build: BuildOptions,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions {
            pitch_mm: 2.5,
            calibrate: false,
            scales: (2..=8).collect(),
            preset_scales: vec![2, 4, 6, 8],
            sweep_grid: 6,
            sweep_pitches: vec![1.0, 1.5, 2.0, 2.5, 3.0],
            frontier_grid: 8,
            frontier_pitches: vec![1.0, 1.5, 2.0, 2.5],
            frontier_samples: 21,
            build: BuildOptions::default(),
        }
    }
}

/// A (topology, scale, preset) cell left out of the tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub topology: Topology,
    pub grid_n: usize,
    pub param_set: String,
    pub reason: String,
}

/// A published parameter point placed against the frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetPoint {
    pub pitch_mm: f64,
    pub preset: String,
    pub p_crossing_db: f64,
    pub p_propagation_db_per_cm: f64,
    pub ring_worst_db: f64,
    pub rival_worst_db: f64,
}

impl PresetPoint {
    pub fn delta_db(&self) -> f64 {
        self.ring_worst_db - self.rival_worst_db
    }

    pub fn ring_wins(&self) -> bool {
        self.ring_worst_db < self.rival_worst_db
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub pitch_mm: f64,
    /// Biberman results at every scale, topologies in [`Topology::all`] order.
    pub scale_results: Vec<EvaluationResult>,
    pub preset_results: Vec<EvaluationResult>,
    pub sweep: Vec<EvaluationResult>,
    /// Frontier of the ring against Matrix_ML,B per frontier pitch.
    pub frontiers: Vec<(f64, Vec<FrontierPoint>)>,
    pub preset_points: Vec<PresetPoint>,
    /// Ring against the six multi-layer crossbars.
    pub improvement: Option<ImprovementReport>,
    pub skipped: Vec<Skipped>,
    /// Output file name and contents, sorted by name.
    pub files: Vec<(String, String)>,
}

impl Reproduction {
    pub fn result(&self, topology: Topology, grid_n: usize) -> Option<&EvaluationResult> {
        self.scale_results
            .iter()
            .find(|r| r.topology == topology && r.grid_n == grid_n)
    }
}

/// Frontier parameters: same-layer drop 0.5 dB, cross-layer drop 1 dB and the
/// default coupler loss.
pub fn frontier_params() -> LossParams {
    LossParams {
        name: "frontier".into(),
        propagation_db_per_cm: 0.0,
        crossing_db: 0.0,
        drop_same_layer_db: Some(0.5),
        drop_cross_layer_db: Some(1.0),
        coupler_db: None,
    }
    .with_multilayer_defaults()
}

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::MissingCoefficient { .. } | Error::Unroutable { .. }
    )
}

/// Builds every (scale, topology) cell in parallel; unroutable ones are
/// recorded instead.
fn build_all(
    scales: &[usize],
    pitch_mm: f64,
    build: &BuildOptions,
) -> Result<(BTreeMap<(usize, Topology), Instance>, Vec<Skipped>)> {
    let cells: Vec<(usize, Topology)> = scales
        .iter()
        .flat_map(|&n| Topology::all().into_iter().map(move |t| (n, t)))
        .collect();
    let built: Vec<Result<Instance>> = cells
        .par_iter()
        .map(|&(n, t)| t.build(&GridArchitecture::new(n, pitch_mm)?, build))
        .collect();
    let mut instances = BTreeMap::new();
    let mut skipped = Vec::new();
    for ((n, t), r) in cells.into_iter().zip(built) {
        match r {
            Ok(i) => {
                instances.insert((n, t), i);
            }
            Err(e) if skippable(&e) => skipped.push(Skipped {
                topology: t,
                grid_n: n,
                param_set: "*".into(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    Ok((instances, skipped))
}

/// Scores every built cell under `params`, in scale then topology order.
fn score(
    instances: &BTreeMap<(usize, Topology), Instance>,
    scales: &[usize],
    params: &LossParams,
    skipped: &mut Vec<Skipped>,
) -> Result<Vec<EvaluationResult>> {
    let mut out = Vec::new();
    for &n in scales {
        for t in Topology::all() {
            let Some(i) = instances.get(&(n, t)) else {
                continue;
            };
            match evaluate(i, &t.effective_params(params)) {
                Ok(r) => out.push(r),
                Err(e) if skippable(&e) => skipped.push(Skipped {
                    topology: t,
                    grid_n: n,
                    param_set: params.name.clone(),
                    reason: e.to_string(),
                }),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// Runs the whole suite. The output does not depend on the number of
/// worker threads.
pub fn reproduce(options: &ReproduceOptions) -> Result<Reproduction> {
    let biberman = preset("biberman")?;
    let mut scales = options.scales.clone();
    scales.extend(&options.preset_scales);
    scales.sort_unstable();
    scales.dedup();

    let pitch_mm = if options.calibrate {
        let ring =
            Topology::Ornoc.build(&GridArchitecture::new(8, options.pitch_mm)?, &options.build)?;
        calibrate_pitch(
            &ring,
            &Topology::Ornoc.effective_params(&biberman),
            published::RING_WORST_DB,
        )?
    } else {
        options.pitch_mm
    };
    let (instances, mut skipped) = build_all(&scales, pitch_mm, &options.build)?;
    let scale_results = score(&instances, &options.scales, &biberman, &mut skipped)?;
    let mut preset_results = Vec::new();
    for p in builtin_presets() {
        preset_results.extend(score(&instances, &options.preset_scales, &p, &mut skipped)?);
    }

    let mut sweep = Vec::new();
    for t in Topology::all() {
        let built = match instances.get(&(options.sweep_grid, t)) {
            Some(i) => Ok(i.clone()),
            None if scales.contains(&options.sweep_grid) => continue,
            None => t.build(
                &GridArchitecture::new(options.sweep_grid, pitch_mm)?,
                &options.build,
            ),
        };
        let instance = match built {
            Ok(i) => i,
            Err(e) if skippable(&e) => continue,
            Err(e) => return Err(e),
        };
        let params = t.effective_params(&biberman);
        for &p in &options.sweep_pitches {
            sweep.push(evaluate(&instance.with_pitch(p)?, &params)?);
        }
    }

    let fixed = frontier_params();
    let fgrid = GridArchitecture::new(options.frontier_grid, 1.0)?;
    let ring = Topology::Ornoc.build(&fgrid, &options.build)?;
    let rival = MATRIX_ML_B.build(&fgrid, &options.build)?;
    let mut frontiers = Vec::new();
    let mut preset_points = Vec::new();
    for &p in &options.frontier_pitches {
        let f = Frontier::new(&ring.with_pitch(p)?, &rival.with_pitch(p)?, &fixed)?;
        frontiers.push((
            p,
            crossing_samples(options.frontier_samples)
                .into_iter()
                .map(|pc| f.point(pc))
                .collect(),
        ));
        for t3 in builtin_presets() {
            let at = |i: &Instance| -> Result<f64> {
                let mut params = fixed.clone();
                params.name = t3.name.clone();
                params.propagation_db_per_cm = t3.propagation_db_per_cm;
                params.crossing_db = t3.crossing_db;
                Ok(evaluate(&i.with_pitch(p)?, &params)?.worst_case_db)
            };
            preset_points.push(PresetPoint {
                pitch_mm: p,
                preset: t3.name.clone(),
                p_crossing_db: t3.crossing_db,
                p_propagation_db_per_cm: t3.propagation_db_per_cm,
                ring_worst_db: at(&ring)?,
                rival_worst_db: at(&rival)?,
            });
        }
    }

    let ml = Topology::multilayer();
    let rings: Vec<EvaluationResult> = scale_results
        .iter()
        .filter(|r| r.topology == Topology::Ornoc)
        .cloned()
        .collect();
    let rivals: Vec<EvaluationResult> = scale_results
        .iter()
        .filter(|r| r.topology != Topology::Ornoc && ml.contains(&r.topology))
        .cloned()
        .collect();
    let improvement = improvement_report(&rivals, &rings).ok();

    let mut repro = Reproduction {
        pitch_mm,
        scale_results,
        preset_results,
        sweep,
        frontiers,
        preset_points,
        improvement,
        skipped,
        files: Vec::new(),
    };
    repro.files = render(&repro);
    Ok(repro)
}

fn render(r: &Reproduction) -> Vec<(String, String)> {
    let mut files = Vec::new();
    files.push((
        "scale_comparison.csv".to_string(),
        results_csv(&r.scale_results),
    ));
    files.push(("presets.csv".to_string(), results_csv(&r.preset_results)));
    files.push(("distance_sweep.csv".to_string(), results_csv(&r.sweep)));

    let mut frontier = format!("pitch_mm,{FRONTIER_HEADER}\n");
    for (pitch, points) in &r.frontiers {
        for p in points {
            let _ = writeln!(
                frontier,
                "{},{},{},{}",
                sig6(*pitch),
                sig6(p.p_crossing_db),
                p.p_propagation_star.map_or(String::new(), sig6),
                p.status.label()
            );
        }
    }
    files.push(("frontier.csv".to_string(), frontier));

    let mut points =
        String::from("pitch_mm,preset,p_crossing_db,p_propagation_db_per_cm,ring_worst_db,rival_worst_db,delta_db,winner\n");
    for p in &r.preset_points {
        let _ = writeln!(
            points,
            "{},{},{},{},{},{},{},{}",
            sig6(p.pitch_mm),
            p.preset,
            sig6(p.p_crossing_db),
            sig6(p.p_propagation_db_per_cm),
            sig6(p.ring_worst_db),
            sig6(p.rival_worst_db),
            sig6(p.delta_db()),
            if p.ring_wins() { "a" } else { "b" }
        );
    }
    files.push(("frontier_presets.csv".to_string(), points));

    let mut skipped = String::from("topology,grid,param_set,reason\n");
    for s in &r.skipped {
        let _ = writeln!(
            skipped,
            "{},{},{},\"{}\"",
            s.topology,
            s.grid_n,
            s.param_set,
            s.reason.replace('"', "'")
        );
    }
    files.push(("skipped.csv".to_string(), skipped));
    files.push(("summary.md".to_string(), summary(r)));
    files.sort();
    files
}

fn summary(r: &Reproduction) -> String {
    let mut s = String::from("# Reproduction summary\n\n");
    let _ = writeln!(
        s,
        "Scale comparison pitch: {} mm, Biberman coefficients.\n",
        sig6(r.pitch_mm)
    );

    s.push_str("## 8x8 worst-case and average loss\n\n| quantity | published dB | computed dB | delta dB |\n|---|---|---|---|\n");
    let row = |s: &mut String, what: &str, published: f64, computed: Option<f64>| {
        let _ = match computed {
            Some(c) => writeln!(
                s,
                "| {what} | {} | {} | {} |",
                sig6(published),
                sig6(c),
                sig6(c - published)
            ),
            None => writeln!(s, "| {what} | {} | n/a | n/a |", sig6(published)),
        };
    };
    let ring = r.result(Topology::Ornoc, 8);
    let matrix = r.result(MATRIX_ML_B, 8);
    row(
        &mut s,
        "ornoc-ml worst case",
        published::RING_WORST_DB,
        ring.map(|x| x.worst_case_db),
    );
    row(
        &mut s,
        "matrix-ml-b worst case",
        published::MATRIX_ML_B_WORST_DB,
        matrix.map(|x| x.worst_case_db),
    );
    row(
        &mut s,
        "ornoc-ml average",
        published::RING_AVERAGE_DB,
        ring.map(|x| x.average_db),
    );
    row(
        &mut s,
        "matrix-ml-b average",
        published::MATRIX_ML_B_AVERAGE_DB,
        matrix.map(|x| x.average_db),
    );

    s.push_str("\n## Lowest loss per scale among the multi-layer implementations\n\n");
    s.push_str("| grid | lowest worst case | dB | lowest average | dB | ring lowest in both |\n|---|---|---|---|---|---|\n");
    let ml = Topology::multilayer();
    let mut scales: Vec<usize> = r.scale_results.iter().map(|x| x.grid_n).collect();
    scales.dedup();
    for n in scales {
        let set: Vec<&EvaluationResult> = r
            .scale_results
            .iter()
            .filter(|x| x.grid_n == n && ml.contains(&x.topology))
            .collect();
        let best = |m: Metric| {
            set.iter()
                .copied()
                .min_by(|a, b| m.of(a).partial_cmp(&m.of(b)).expect("finite"))
                .expect("non-empty")
        };
        let (w, a) = (best(Metric::WorstCase), best(Metric::Average));
        let ring_first = r.result(Topology::Ornoc, n).is_some_and(|o| {
            set.iter().all(|x| {
                x.topology == Topology::Ornoc
                    || (o.worst_case_db < x.worst_case_db && o.average_db < x.average_db)
            })
        });
        let _ = writeln!(
            s,
            "| {n}x{n} | {} | {} | {} | {} | {} |",
            w.topology,
            sig6(w.worst_case_db),
            a.topology,
            sig6(a.average_db),
            if ring_first { "yes" } else { "no" }
        );
    }

    if let Some(imp) = &r.improvement {
        s.push_str("\n## Ring improvement over the multi-layer crossbars\n\n");
        s.push_str("| grid | metric | vs best % | best | vs mean % |\n|---|---|---|---|---|\n");
        for i in &imp.per_scale {
            let _ = writeln!(
                s,
                "| {0}x{0} | {1} | {2} | {3} | {4} |",
                i.grid_n,
                i.metric.label(),
                sig6(i.vs_best_pct),
                i.best,
                sig6(i.vs_mean_pct)
            );
        }
        let _ = writeln!(
            s,
            "\nMean over scales, worst case: {} % vs best, {} % vs mean (published {} % and {} %).",
            sig6(imp.mean_vs_best_pct[0]),
            sig6(imp.mean_vs_mean_pct[0]),
            sig6(published::IMPROVEMENT_VS_MATRIX_PCT[0]),
            sig6(published::IMPROVEMENT_MEAN_PCT[0])
        );
        let _ = writeln!(
            s,
            "Mean over scales, average: {} % vs best, {} % vs mean (published {} % and {} %).",
            sig6(imp.mean_vs_best_pct[1]),
            sig6(imp.mean_vs_mean_pct[1]),
            sig6(published::IMPROVEMENT_VS_MATRIX_PCT[1]),
            sig6(published::IMPROVEMENT_MEAN_PCT[1])
        );
        for (n, published) in [
            (2, published::AVERAGE_IMPROVEMENT_2X2_PCT),
            (8, published::AVERAGE_IMPROVEMENT_8X8_PCT),
        ] {
            if let Some(i) = imp
                .per_scale
                .iter()
                .find(|i| i.grid_n == n && i.metric == Metric::Average)
            {
                let _ = writeln!(
                    s,
                    "Average at {n}x{n}: {} % vs mean, {} % vs best (published {} %).",
                    sig6(i.vs_mean_pct),
                    sig6(i.vs_best_pct),
                    sig6(published)
                );
            }
        }
    }
    if let (Some(o), Some(m)) = (ring, matrix) {
        let _ = writeln!(
            s,
            "Against matrix-ml-b at 8x8: worst case {} %, average {} % (published {} % and {} %).",
            sig6(100.0 * (m.worst_case_db - o.worst_case_db) / m.worst_case_db),
            sig6(100.0 * (m.average_db - o.average_db) / m.average_db),
            sig6(published::IMPROVEMENT_VS_MATRIX_PCT[0]),
            sig6(published::IMPROVEMENT_VS_MATRIX_PCT[1])
        );
    }

    s.push_str("\n## Published parameter points against matrix-ml-b\n\n");
    s.push_str("| pitch mm | preset | ring dB | matrix-ml-b dB | delta dB | lower |\n|---|---|---|---|---|---|\n");
    for p in &r.preset_points {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} |",
            sig6(p.pitch_mm),
            p.preset,
            sig6(p.ring_worst_db),
            sig6(p.rival_worst_db),
            sig6(p.delta_db()),
            if p.ring_wins() {
                "ornoc-ml"
            } else {
                "matrix-ml-b"
            }
        );
    }

    if !r.skipped.is_empty() {
        let _ = writeln!(
            s,
            "\n{} cells skipped, listed in skipped.csv.",
            r.skipped.len()
        );
    }
    s
}
