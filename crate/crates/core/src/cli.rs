//! Command-line front end.
//!
//! Every subcommand writes CSV (or the layout dump) to stdout, or to files in
//! `--output-dir` when given. Exit status: 0 on success, 2 for bad flags, 3
//! for a missing loss coefficient, 4 for an unroutable layout, 5 for an
//! internal invariant failure and 1 for I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    breakeven_frontier, crossing_samples, evaluate, frontier_csv, init_threads, pairs_csv,
    results_csv, sweep_distance, BuildOptions, Frontier, Instance, Topology,
};
use crate::crossbar::LayoutOptions;
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::grid::GridArchitecture;
use crate::loss::{builtin_presets, preset, Coefficient, LossParams};
use crate::reproduce::{frontier_params, reproduce, ReproduceOptions};
use crate::ring::{assign_rings, assign_wavelengths, assignment_csv, ring_layout};

#[derive(Parser, Debug)]
#[command(
    name = "onoc-xbar",
    version,
    about = "Insertion-loss exploration of optical crossbars on chip"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Worst-case and average loss of one or more topologies.
    Evaluate {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Also write the per-pair losses of every topology.
        #[arg(long)]
        pairs: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Losses over a range of core pitches.
    Sweep {
        /// Topology labels, comma separated, or `all` / `ml`.
        #[arg(long, value_delimiter = ',', default_value = "ml")]
        topology: Vec<String>,
        /// Cores per side of the grid.
        #[arg(long, default_value_t = 6)]
        grid: usize,
        /// Core pitches in mm, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.5, 2.0, 2.5, 3.0])]
        pitches: Vec<f64>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        layout: LayoutArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Break-even propagation loss of topology a against b over crossing
    /// losses from 0 to 0.2 dB, and the built-in presets against it.
    Frontier {
        /// Topology whose winning region lies below the frontier.
        #[arg(long, default_value = "ornoc-ml")]
        a: String,
        /// Topology it is compared against.
        #[arg(long, default_value = "matrix-ml-b")]
        b: String,
        /// Cores per side of the grid.
        #[arg(long, default_value_t = 8)]
        grid: usize,
        /// Distance between neighbouring cores.
        #[arg(long, default_value_t = 2.5)]
        pitch_mm: f64,
        /// Crossing-loss samples.
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Loss per same-layer drop in dB.
        #[arg(long, default_value_t = 0.5)]
        p_drop1: f64,
        /// Loss per cross-layer drop in dB.
        #[arg(long, default_value_t = 1.0)]
        p_drop2: f64,
        /// Loss per vertical coupler in dB.
        #[arg(long, default_value_t = crate::loss::DEFAULT_COUPLER_DB)]
        p_coupler: f64,
        #[command(flatten)]
        layout: LayoutArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Microring, laser, photodetector, wavelength and waveguide counts.
    Resources {
        #[command(flatten)]
        net: NetArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Every comparison, with a summary against the published figures.
    Reproduce {
        /// Distance between neighbouring cores.
        #[arg(long, default_value_t = 2.5)]
        pitch_mm: f64,
        /// Use the pitch at which the 8x8 ring reaches its published worst case.
        #[arg(long)]
        calibrate: bool,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Wavelengths per ring waveguide.
        #[arg(long, default_value_t = crate::ring::DEFAULT_MAX_WAVELENGTHS)]
        max_wavelengths: u32,
        /// Directory receiving the CSV files and summary.md.
        #[arg(long, default_value = "reproduce")]
        output_dir: PathBuf,
    },
    /// Geometry dump of one topology: segments and devices, in mm.
    Layout {
        /// Topology label such as `snake-ml-a`.
        #[arg(long)]
        topology: String,
        /// Cores per side of the grid.
        #[arg(long)]
        grid: usize,
        /// Distance between neighbouring cores.
        #[arg(long, default_value_t = 2.5)]
        pitch_mm: f64,
        #[command(flatten)]
        layout: LayoutArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ring, waveguide and wavelength of every ring communication.
    Assignment {
        /// Cores per side of the grid.
        #[arg(long)]
        grid: usize,
        /// Distance between neighbouring cores.
        #[arg(long, default_value_t = 2.5)]
        pitch_mm: f64,
        /// Wavelengths per ring waveguide.
        #[arg(long, default_value_t = crate::ring::DEFAULT_MAX_WAVELENGTHS)]
        max_wavelengths: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Path counters of every pair of one topology.
    Trace {
        /// Topology label such as `snake-ml-a`.
        #[arg(long)]
        topology: String,
        /// Cores per side of the grid.
        #[arg(long)]
        grid: usize,
        /// Distance between neighbouring cores.
        #[arg(long, default_value_t = 2.5)]
        pitch_mm: f64,
        #[command(flatten)]
        layout: LayoutArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Debug)]
struct NetArgs {
    /// Topology labels such as `ornoc-ml` or `matrix-ml-b`, comma separated,
    /// or `all` / `ml`.
    #[arg(long, value_delimiter = ',', required = true)]
    topology: Vec<String>,
    /// Cores per side of the grid.
    #[arg(long)]
    grid: usize,
    /// Distance between neighbouring cores.
    #[arg(long, default_value_t = 2.5)]
    pitch_mm: f64,
    /// Wavelengths per ring waveguide.
    #[arg(long, default_value_t = crate::ring::DEFAULT_MAX_WAVELENGTHS)]
    max_wavelengths: u32,
    #[command(flatten)]
    layout: LayoutArgs,
}

#[derive(Args, Debug)]
struct LayoutArgs {
    /// Longest side of the crossbar block, in core pitches.
    #[arg(long, default_value_t = LayoutOptions::default().block_span)]
    block_span: f64,
    /// Routing tracks per core pitch.
    #[arg(long, default_value_t = LayoutOptions::default().tracks_per_pitch)]
    tracks_per_pitch: u32,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Built-in preset: Biberman, Zhang, Pan, Kirman or Koka.
    #[arg(long, default_value = "biberman", conflicts_with = "params_file")]
    params: String,
    /// key=value parameter file.
    #[arg(long)]
    params_file: Option<PathBuf>,
    /// Override: propagation loss in dB/cm.
    #[arg(long)]
    p_propagation: Option<f64>,
    /// Override: loss per same-layer crossing in dB.
    #[arg(long)]
    p_crossing: Option<f64>,
    /// Override: loss per same-layer drop in dB.
    #[arg(long)]
    p_drop1: Option<f64>,
    /// Override: loss per cross-layer drop in dB.
    #[arg(long)]
    p_drop2: Option<f64>,
    /// Override: loss per vertical coupler in dB.
    #[arg(long)]
    p_coupler: Option<f64>,
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Write files here instead of printing to stdout.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl LayoutArgs {
    fn options(&self, max_wavelengths: u32) -> Result<BuildOptions> {
        let layout = LayoutOptions {
            block_span: self.block_span,
            tracks_per_pitch: self.tracks_per_pitch,
        };
        layout.validate()?;
        Ok(BuildOptions {
            layout,
            max_wavelengths,
        })
    }
}

impl ParamArgs {
    fn resolve(&self) -> Result<LossParams> {
        let mut p = match &self.params_file {
            Some(path) => fs::read_to_string(path)?.parse::<LossParams>()?,
            None => preset(&self.params)?,
        };
        for (c, v) in [
            (Coefficient::Propagation, self.p_propagation),
            (Coefficient::Crossing, self.p_crossing),
            (Coefficient::DropSameLayer, self.p_drop1),
            (Coefficient::DropCrossLayer, self.p_drop2),
            (Coefficient::Coupler, self.p_coupler),
        ] {
            if v.is_some() {
                p.set(c, v);
            }
        }
        p.validate()?;
        Ok(p)
    }
}

fn topologies(labels: &[String]) -> Result<Vec<Topology>> {
    let mut out = Vec::new();
    for l in labels {
        match l.trim().to_ascii_lowercase().as_str() {
            "all" => out.extend(Topology::all()),
            "ml" => out.extend(Topology::multilayer()),
            other => out.push(other.parse()?),
        }
    }
    let mut seen = Vec::new();
    out.retain(|t| {
        let fresh = !seen.contains(t);
        seen.push(*t);
        fresh
    });
    Ok(out)
}

/// Exit status of an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MissingCoefficient { .. } => 3,
        Error::Unroutable { .. } => 4,
        Error::Invariant(_)
        | Error::CollinearOverlap { .. }
        | Error::NoRoute { .. }
        | Error::MismatchedRuns(_) => 5,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Output files of one command, written at the end.
struct Output {
    dir: Option<PathBuf>,
    files: Vec<(String, String)>,
}

impl Output {
    fn new(out: &OutArgs) -> Self {
        Output {
            dir: out.output_dir.clone(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn finish(self, stdout: &mut dyn Write) -> Result<()> {
        match self.dir {
            Some(dir) => write_files(&dir, &self.files),
            None => {
                for (k, (_, body)) in self.files.iter().enumerate() {
                    if k > 0 {
                        writeln!(stdout)?;
                    }
                    stdout.write_all(body.as_bytes())?;
                }
                Ok(())
            }
        }
    }
}

fn write_files(dir: &Path, files: &[(String, String)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    init_threads()?;
    match cli.command {
        Command::Evaluate {
            net,
            params,
            pairs,
            out,
        } => {
            let params = params.resolve()?;
            let options = net.layout.options(net.max_wavelengths)?;
            let grid = GridArchitecture::new(net.grid, net.pitch_mm)?;
            let mut output = Output::new(&out);
            let mut results = Vec::new();
            for t in topologies(&net.topology)? {
                results.push(evaluate(
                    &t.build(&grid, &options)?,
                    &t.effective_params(&params),
                )?);
            }
            output.add("results.csv", results_csv(&results));
            if pairs {
                for r in &results {
                    output.add(&format!("pairs_{}.csv", r.topology), pairs_csv(r));
                }
            }
            output.finish(stdout)
        }
        Command::Sweep {
            topology,
            grid,
            pitches,
            params,
            layout,
            out,
        } => {
            let params = params.resolve()?;
            let options = layout.options(crate::ring::DEFAULT_MAX_WAVELENGTHS)?;
            let results =
                sweep_distance(&topologies(&topology)?, grid, &pitches, &params, &options)?;
            let mut output = Output::new(&out);
            output.add("sweep.csv", results_csv(&results));
            output.finish(stdout)
        }
        Command::Frontier {
            a,
            b,
            grid,
            pitch_mm,
            samples,
            p_drop1,
            p_drop2,
            p_coupler,
            layout,
            out,
        } => {
            let (a, b): (Topology, Topology) = (a.parse()?, b.parse()?);
            let mut fixed = frontier_params();
            fixed.drop_same_layer_db = Some(p_drop1);
            fixed.drop_cross_layer_db = Some(p_drop2);
            fixed.coupler_db = Some(p_coupler);
            fixed.validate()?;
            let options = layout.options(crate::ring::DEFAULT_MAX_WAVELENGTHS)?;
            let g = GridArchitecture::new(grid, pitch_mm)?;
            let (ia, ib) = (a.build(&g, &options)?, b.build(&g, &options)?);
            let points = breakeven_frontier(&ia, &ib, &fixed, &crossing_samples(samples))?;
            let mut output = Output::new(&out);
            output.add("frontier.csv", frontier_csv(&points));
            output.add("frontier_presets.csv", preset_points(&ia, &ib, &fixed)?);
            output.finish(stdout)
        }
        Command::Resources { net, out } => {
            let options = net.layout.options(net.max_wavelengths)?;
            let grid = GridArchitecture::new(net.grid, net.pitch_mm)?;
            let mut csv = String::from("topology,layout,layer_mode,grid,wavelengths,waveguides,mr_count,lasers,photodetectors\n");
            for t in topologies(&net.topology)? {
                let r = t.build(&grid, &options)?.resources();
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    t.family(),
                    t.layout().map_or("-", |s| s.label()),
                    t.layer_mode(),
                    net.grid,
                    r.wavelengths,
                    r.waveguides,
                    r.mr_count,
                    r.lasers,
                    r.photodetectors
                ));
            }
            let mut output = Output::new(&out);
            output.add("resources.csv", csv);
            output.finish(stdout)
        }
        Command::Reproduce {
            pitch_mm,
            calibrate,
            layout,
            max_wavelengths,
            output_dir,
        } => {
            GridArchitecture::new(2, pitch_mm)?;
            let options = ReproduceOptions {
                pitch_mm,
                calibrate,
                build: layout.options(max_wavelengths)?,
                ..ReproduceOptions::default()
            };
            let r = reproduce(&options)?;
            write_files(&output_dir, &r.files)?;
            writeln!(
                stdout,
                "wrote {} files to {}",
                r.files.len(),
                output_dir.display()
            )?;
            Ok(())
        }
        Command::Layout {
            topology,
            grid,
            pitch_mm,
            layout,
            out,
        } => {
            let t: Topology = topology.parse()?;
            let g = GridArchitecture::new(grid, pitch_mm)?;
            let dump = match t.build(&g, &layout.options(crate::ring::DEFAULT_MAX_WAVELENGTHS)?)? {
                Instance::Ornoc { grid, rings, .. } => ring_layout(&grid, &rings)?.dump(),
                Instance::Crossbar(x) => x.layout().dump(),
            };
            let mut output = Output::new(&out);
            output.add(&format!("layout_{t}.txt"), dump);
            output.finish(stdout)
        }
        Command::Assignment {
            grid,
            pitch_mm,
            max_wavelengths,
            out,
        } => {
            let g = GridArchitecture::new(grid, pitch_mm)?;
            let rings = assign_rings(&g);
            let wavelengths = assign_wavelengths(&g, &rings, max_wavelengths)?;
            let mut output = Output::new(&out);
            output.add("assignment.csv", assignment_csv(&rings, &wavelengths));
            output.finish(stdout)
        }
        Command::Trace {
            topology,
            grid,
            pitch_mm,
            layout,
            out,
        } => {
            let t: Topology = topology.parse()?;
            let g = GridArchitecture::new(grid, pitch_mm)?;
            let csv = match t.build(&g, &layout.options(crate::ring::DEFAULT_MAX_WAVELENGTHS)?)? {
                Instance::Crossbar(x) => x.trace_csv(),
                ring @ Instance::Ornoc { .. } => {
                    let mut csv = String::from(
                        "src,dst,wavelength,length_cm,n_crossing,n_drop1,n_drop2,n_coupler\n",
                    );
                    let Instance::Ornoc { wavelengths, .. } = &ring else {
                        unreachable!()
                    };
                    for (s, d) in ring.pairs() {
                        let p = ring.path(s, d)?;
                        let slot = wavelengths
                            .get(s, d)
                            .ok_or_else(|| Error::invariant("unassigned pair"))?;
                        csv.push_str(&format!(
                            "{},{},{},{},{},{},{},{}\n",
                            s.0,
                            d.0,
                            slot.wavelength,
                            sig6(p.length_cm),
                            p.crossings,
                            p.drops_same_layer,
                            p.drops_cross_layer,
                            p.couplers
                        ));
                    }
                    csv
                }
            };
            let mut output = Output::new(&out);
            output.add(&format!("trace_{t}.csv"), csv);
            output.finish(stdout)
        }
    }
}

/// Worst cases of both topologies at every built-in preset.
fn preset_points(a: &Instance, b: &Instance, fixed: &LossParams) -> Result<String> {
    let f = Frontier::new(a, b, fixed)?;
    let mut csv =
        String::from("preset,p_crossing_db,p_propagation_db_per_cm,delta_worst_db,winner\n");
    for p in builtin_presets() {
        let delta = f.delta(p.propagation_db_per_cm, p.crossing_db);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.name,
            sig6(p.crossing_db),
            sig6(p.propagation_db_per_cm),
            sig6(delta),
            if delta < 0.0 { "a wins" } else { "b wins" }
        ));
    }
    Ok(csv)
}

/// Runs the command line `args` (program name first), printing results to
/// `stdout` and a one-line diagnostic to `stderr` on failure.
pub fn run_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let head = text.split("\n\n").next().unwrap_or("invalid arguments");
                let _ = writeln!(
                    stderr,
                    "{}",
                    head.split_whitespace().collect::<Vec<_>>().join(" ")
                );
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
