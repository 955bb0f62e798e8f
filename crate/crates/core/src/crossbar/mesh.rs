//! Device meshes of the three crossbars and their block-local drawings.
//!
//! Block-local coordinates use a unit grid with `y` growing downwards.
//!
//! * Matrix: input row `i` at `y = 2(i+1)` runs east from the west edge;
//!   output column `j` at `x = 2(j+1)` runs south to the south edge. The MR
//!   of `(i, j)` sits where they meet, except on the diagonal.
//! * λ-router: an odd-even transposition network. Stage `s` sits at
//!   `x = 4(s+1)` and pairs lanes `(l, l+1)` with `l ≡ s (mod 2)`.
//! * Snake: a bubble-sort triangle. Pass `p` pairs lanes `(l, l+1)` for
//!   `l = 0..=M-2-p` in column `2p + l`.
//!
//! In both multistage meshes every pair of waveguides meets in exactly one
//! PSE, where the two swap lanes, so waveguide `w` leaves on lane `M-1-w`.
//! The PSE of `w` and `M-1-w` would only serve a core talking to itself and
//! is left out.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CrossbarKind {
    Matrix,
    LambdaRouter,
    Snake,
}

impl CrossbarKind {
    pub const ALL: [CrossbarKind; 3] = [
        CrossbarKind::Matrix,
        CrossbarKind::LambdaRouter,
        CrossbarKind::Snake,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CrossbarKind::Matrix => "matrix",
            CrossbarKind::LambdaRouter => "lambda-router",
            CrossbarKind::Snake => "snake",
        }
    }
}

impl fmt::Display for CrossbarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A resonant device joining two waveguides: an MR of the Matrix or a PSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Junction {
    /// The two waveguides; for the Matrix `a` is the input row and `b` the
    /// output column.
    pub a: usize,
    pub b: usize,
    pub wavelength: u32,
    /// Block-local position; also the crossing point of the two waveguides.
    pub at: Point,
    /// Arc positions of `at` along `a` and `b`.
    pub arc_a: i64,
    pub arc_b: i64,
    /// Left out by the reduction; the waveguides still cross here.
    pub removed: bool,
}

/// How one input reaches one output inside the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshRoute {
    /// Along waveguide `waveguide` from its start to its end, no drop.
    Through { waveguide: usize, wavelength: u32 },
    /// Along the input waveguide to the junction, dropped onto the other
    /// waveguide of the junction, then to its end.
    Drop { junction: usize },
}

#[derive(Debug, Clone)]
pub struct Mesh {
    kind: CrossbarKind,
    inputs: usize,
    width: i64,
    height: i64,
    waveguides: Vec<Vec<Point>>,
    junctions: Vec<Junction>,
    // inputs × inputs → junction index (Matrix: input, output; others: symmetric)
    lookup: Vec<usize>,
    end_lane: Vec<usize>,
    free_wavelength: Vec<u32>,
}

const NONE: usize = usize::MAX;

fn lane_y(l: usize) -> i64 {
    2 * (l as i64 + 1)
}

fn column_x(c: usize) -> i64 {
    4 * (c as i64 + 1)
}

/// Odd-even transposition schedule: (stage, upper lane) in stage order.
fn lambda_schedule(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..m {
        let mut l = s % 2;
        while l + 1 < m {
            out.push((s, l));
            l += 2;
        }
    }
    out
}

/// Bubble-sort schedule: (column, upper lane) in column order.
fn snake_schedule(m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for p in 0..m.saturating_sub(1) {
        for l in 0..m - 1 - p {
            out.push((2 * p + l, l));
        }
    }
    out.sort_unstable();
    out
}

/// Runs a transposition schedule on lanes holding waveguides `0..m`.
/// Returns (column, upper lane, waveguide moving down, waveguide moving up)
/// per comparator and the final lane of every waveguide.
fn simulate(
    m: usize,
    schedule: &[(usize, usize)],
) -> (Vec<(usize, usize, usize, usize)>, Vec<usize>) {
    let mut lanes: Vec<usize> = (0..m).collect();
    let mut meets = Vec::with_capacity(schedule.len());
    for &(c, l) in schedule {
        let (down, up) = (lanes[l], lanes[l + 1]);
        meets.push((c, l, down, up));
        lanes.swap(l, l + 1);
    }
    let mut end = vec![0; m];
    for (lane, &w) in lanes.iter().enumerate() {
        end[w] = lane;
    }
    (meets, end)
}

/// Polyline builder that tracks the arc length drawn so far.
struct Pen {
    points: Vec<Point>,
    arc: i64,
}

impl Pen {
    fn start(p: Point) -> Self {
        Pen {
            points: vec![p],
            arc: 0,
        }
    }

    fn to(&mut self, p: Point) {
        let last = *self.points.last().expect("started");
        self.arc += last.manhattan(p);
        self.points.push(p);
    }
}

impl Mesh {
    pub fn new(kind: CrossbarKind, inputs: usize) -> Result<Mesh> {
        if inputs < 2 {
            return Err(Error::InvalidGrid(format!(
                "a crossbar needs at least 2 inputs, got {inputs}"
            )));
        }
        match kind {
            CrossbarKind::Matrix => Ok(Mesh::matrix(inputs)),
            CrossbarKind::LambdaRouter => Ok(Mesh::multistage(
                kind,
                inputs,
                &lambda_schedule(inputs),
                inputs,
            )),
            CrossbarKind::Snake => {
                let columns = 2 * inputs - 3;
                Ok(Mesh::multistage(
                    kind,
                    inputs,
                    &snake_schedule(inputs),
                    columns,
                ))
            }
        }
    }

    fn matrix(m: usize) -> Mesh {
        let (width, height) = (2 * (m as i64 + 1), 2 * (m as i64 + 1));
        let mut waveguides = Vec::with_capacity(2 * m);
        for i in 0..m {
            waveguides.push(vec![
                Point::new(0, lane_y(i)),
                Point::new(lane_y(m - 1) + 1, lane_y(i)),
            ]);
        }
        for j in 0..m {
            waveguides.push(vec![
                Point::new(lane_y(j), 1),
                Point::new(lane_y(j), height),
            ]);
        }
        let mut junctions = Vec::with_capacity(m * (m - 1));
        let mut lookup = vec![NONE; m * m];
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let at = Point::new(lane_y(j), lane_y(i));
                lookup[i * m + j] = junctions.len();
                junctions.push(Junction {
                    a: i,
                    b: m + j,
                    wavelength: ((j + m - i) % m - 1) as u32,
                    at,
                    arc_a: at.x,
                    arc_b: at.y - 1,
                    removed: false,
                });
            }
        }
        Mesh {
            kind: CrossbarKind::Matrix,
            inputs: m,
            width,
            height,
            waveguides,
            junctions,
            lookup,
            end_lane: Vec::new(),
            free_wavelength: Vec::new(),
        }
    }

    fn multistage(
        kind: CrossbarKind,
        m: usize,
        schedule: &[(usize, usize)],
        columns: usize,
    ) -> Mesh {
        let (meets, end_lane) = simulate(m, schedule);

        // Wavelength of a PSE: the λ-router stage at which its pair meets.
        let (lambda_meets, _) = simulate(m, &lambda_schedule(m));
        let mut stage_of = vec![0u32; m * m];
        let mut busy = vec![vec![false; m]; m];
        for &(s, _, a, b) in &lambda_meets {
            stage_of[a * m + b] = s as u32;
            stage_of[b * m + a] = s as u32;
            busy[a][s] = true;
            busy[b][s] = true;
        }
        let free_wavelength: Vec<u32> = (0..m)
            .map(|w| busy[w].iter().position(|&b| !b).unwrap_or(0) as u32)
            .collect();

        // Per waveguide, its comparators in column order.
        let mut visits: Vec<Vec<(usize, usize, bool, usize)>> = vec![Vec::new(); m];
        for (k, &(c, l, down, up)) in meets.iter().enumerate() {
            visits[down].push((c, l, true, k));
            visits[up].push((c, l, false, k));
        }

        let width = column_x(columns);
        let mut junctions: Vec<Junction> = meets
            .iter()
            .map(|&(c, l, down, up)| Junction {
                a: down,
                b: up,
                wavelength: stage_of[down * m + up],
                at: Point::new(column_x(c), lane_y(l) + 1),
                arc_a: 0,
                arc_b: 0,
                removed: down + up == m - 1,
            })
            .collect();
        let mut arc_on = vec![(0i64, 0i64); meets.len()];
        let mut waveguides = Vec::with_capacity(m);
        for (w, visit) in visits.iter().enumerate() {
            let mut pen = Pen::start(Point::new(0, lane_y(w)));
            for &(c, l, moving_down, k) in visit {
                let x = column_x(c);
                let (top, bottom) = (lane_y(l), lane_y(l + 1));
                if moving_down {
                    pen.to(Point::new(x, top));
                    arc_on[k].0 = pen.arc + 1;
                    pen.to(Point::new(x, bottom));
                } else {
                    pen.to(Point::new(x - 1, bottom));
                    pen.to(Point::new(x - 1, top + 1));
                    arc_on[k].1 = pen.arc + 1;
                    pen.to(Point::new(x + 1, top + 1));
                    pen.to(Point::new(x + 1, top));
                }
            }
            pen.to(Point::new(width, lane_y(end_lane[w])));
            waveguides.push(pen.points);
        }
        let mut lookup = vec![NONE; m * m];
        for (k, j) in junctions.iter_mut().enumerate() {
            j.arc_a = arc_on[k].0;
            j.arc_b = arc_on[k].1;
            lookup[j.a * m + j.b] = k;
            lookup[j.b * m + j.a] = k;
        }
        Mesh {
            kind,
            inputs: m,
            width,
            height: lane_y(m - 1) + 2,
            waveguides,
            junctions,
            lookup,
            end_lane,
            free_wavelength,
        }
    }

    pub fn kind(&self) -> CrossbarKind {
        self.kind
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Block size in local units.
    pub fn size(&self) -> (i64, i64) {
        (self.width, self.height)
    }

    /// Local drawings of all waveguides. Matrix rows come first, then
    /// columns; multistage waveguides are numbered by input lane.
    pub fn waveguides(&self) -> &[Vec<Point>] {
        &self.waveguides
    }

    pub fn junctions(&self) -> &[Junction] {
        &self.junctions
    }

    /// Junctions left after the reduction.
    pub fn active_junctions(&self) -> impl Iterator<Item = &Junction> {
        self.junctions.iter().filter(|j| !j.removed)
    }

    /// Waveguide fed by input `i`.
    pub fn input_waveguide(&self, i: usize) -> usize {
        i
    }

    /// Waveguide delivering to output `j`.
    pub fn output_waveguide(&self, j: usize) -> usize {
        match self.kind {
            CrossbarKind::Matrix => self.inputs + j,
            _ => self.inputs - 1 - j,
        }
    }

    /// Input attached to the start of waveguide `w`, if any.
    pub fn waveguide_input(&self, w: usize) -> Option<usize> {
        (w < self.inputs).then_some(w)
    }

    /// Output attached to the end of waveguide `w`, if any.
    pub fn waveguide_output(&self, w: usize) -> Option<usize> {
        match self.kind {
            CrossbarKind::Matrix => w.checked_sub(self.inputs),
            _ => self.end_lane.get(w).copied(),
        }
    }

    /// Routing of input `i` to output `j`.
    pub fn route(&self, i: usize, j: usize) -> Result<MeshRoute> {
        let m = self.inputs;
        if i >= m || j >= m || i == j {
            return Err(Error::NoRoute {
                src: i + 1,
                dst: j + 1,
            });
        }
        if self.kind != CrossbarKind::Matrix && self.end_lane[i] == j {
            return Ok(MeshRoute::Through {
                waveguide: i,
                wavelength: self.free_wavelength[i],
            });
        }
        let other = match self.kind {
            CrossbarKind::Matrix => j,
            _ => self.output_waveguide(j),
        };
        let k = self.lookup[i * m + other];
        if k == NONE || self.junctions[k].removed {
            return Err(Error::NoRoute {
                src: i + 1,
                dst: j + 1,
            });
        }
        Ok(MeshRoute::Drop { junction: k })
    }

    /// Wavelength carrying input `i` to output `j`.
    pub fn wavelength(&self, i: usize, j: usize) -> Result<u32> {
        Ok(match self.route(i, j)? {
            MeshRoute::Through { wavelength, .. } => wavelength,
            MeshRoute::Drop { junction } => self.junctions[junction].wavelength,
        })
    }

    /// Distinct routing wavelengths over all input-output pairs.
    pub fn wavelength_count(&self) -> usize {
        let mut seen = vec![false; self.inputs + 1];
        for i in 0..self.inputs {
            for j in (0..self.inputs).filter(|&j| j != i) {
                if let Ok(w) = self.wavelength(i, j) {
                    seen[w as usize] = true;
                }
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// MRs after the reduction; a PSE holds two.
    pub fn mr_count(&self) -> usize {
        let active = self.active_junctions().count();
        match self.kind {
            CrossbarKind::Matrix => active,
            _ => 2 * active,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multistage_meshes_reverse_the_lanes() {
        for kind in [CrossbarKind::LambdaRouter, CrossbarKind::Snake] {
            for m in [2, 3, 4, 7, 16] {
                let mesh = Mesh::new(kind, m).unwrap();
                assert_eq!(mesh.junctions().len(), m * (m - 1) / 2, "{kind} {m}");
                for w in 0..m {
                    assert_eq!(mesh.waveguide_output(w), Some(m - 1 - w));
                }
            }
        }
    }

    #[test]
    fn every_pair_routes() {
        for kind in CrossbarKind::ALL {
            let mesh = Mesh::new(kind, 9).unwrap();
            for i in 0..9 {
                let mut outputs = Vec::new();
                for j in (0..9).filter(|&j| j != i) {
                    mesh.route(i, j).unwrap();
                    outputs.push(mesh.wavelength(i, j).unwrap());
                }
                outputs.sort_unstable();
                outputs.dedup();
                assert_eq!(outputs.len(), 8, "{kind}: input {i} reuses a wavelength");
            }
        }
    }

    #[test]
    fn wavelength_counts_8x8() {
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
    fn matrix_reduction_2x2() {
        let mesh = Mesh::new(CrossbarKind::Matrix, 4).unwrap();
        assert_eq!(mesh.mr_count(), 12);
    }

    #[test]
    fn removed_pses_sit_in_the_middle() {
        let m = 8;
        let lambda = Mesh::new(CrossbarKind::LambdaRouter, m).unwrap();
        for j in lambda.junctions().iter().filter(|j| j.removed) {
            // central lane pair (3, 4)
            assert_eq!(j.at.y, lane_y(3) + 1);
        }
        let snake = Mesh::new(CrossbarKind::Snake, m).unwrap();
        for j in snake.junctions().iter().filter(|j| j.removed) {
            assert_eq!(j.at.x, column_x(m - 2));
        }
    }
}
