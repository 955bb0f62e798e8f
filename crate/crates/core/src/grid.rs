//! The N×N grid of IP cores and the serpentine ring that threads it.
//!
//! Layer 1 visits cores row by row, alternating direction on each row.
//! Layer 2 is the same ring turned by a quarter turn: it visits cores column
//! by column. Neighbouring cores on the serpentine are one pitch apart, and
//! the ring closes with a straight run back to the first core.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::Layer;

/// 1-based core identifier, numbered row-major from the top-left core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreId(pub usize);

impl CoreId {
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(index: usize) -> Self {
        CoreId(index + 1)
    }
}

impl fmt::Display for CoreId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IP_{}", self.0)
    }
}

/// Propagation direction on a ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Clockwise,
    CounterClockwise,
}

impl Direction {
    pub fn opposite(self) -> Self {
        match self {
            Direction::Clockwise => Direction::CounterClockwise,
            Direction::CounterClockwise => Direction::Clockwise,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Clockwise => "C",
            Direction::CounterClockwise => "CC",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridArchitecture {
    n: usize,
    pitch_mm: f64,
}

impl GridArchitecture {
    pub fn new(n: usize, pitch_mm: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cores per side, got {n}"
            )));
        }
        if !(pitch_mm.is_finite() && pitch_mm > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "pitch must be positive, got {pitch_mm} mm"
            )));
        }
        Ok(GridArchitecture { n, pitch_mm })
    }

    /// Cores per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pitch_mm(&self) -> f64 {
        self.pitch_mm
    }

    pub fn with_pitch(&self, pitch_mm: f64) -> Result<Self> {
        GridArchitecture::new(self.n, pitch_mm)
    }

    pub fn cores(&self) -> usize {
        self.n * self.n
    }

    /// Odd sizes are accepted but fall outside the evaluated configurations.
    pub fn is_even(&self) -> bool {
        self.n % 2 == 0
    }

    pub fn core_ids(&self) -> impl Iterator<Item = CoreId> {
        (1..=self.cores()).map(CoreId)
    }

    pub fn check(&self, core: CoreId) -> Result<()> {
        if core.0 == 0 || core.0 > self.cores() {
            return Err(Error::CoreOutOfRange {
                core: core.0,
                cores: self.cores(),
            });
        }
        Ok(())
    }

    /// Zero-based (row, column) of a core.
    pub fn position(&self, core: CoreId) -> (usize, usize) {
        (core.index() / self.n, core.index() % self.n)
    }

    pub fn core_at(&self, row: usize, col: usize) -> CoreId {
        CoreId::from_index(row * self.n + col)
    }

    /// Die side length; cores sit at the centres of pitch-sized tiles.
    pub fn die_side_mm(&self) -> f64 {
        self.n as f64 * self.pitch_mm
    }

    pub fn die_area_cm2(&self) -> f64 {
        let side_cm = self.die_side_mm() / 10.0;
        side_cm * side_cm
    }

    /// Position of `core` along the serpentine of `layer`, counted in pitches
    /// from the ring origin (core 1).
    pub fn serpentine_step(&self, core: CoreId, layer: Layer) -> Result<usize> {
        self.check(core)?;
        let (row, col) = self.position(core);
        let n = self.n;
        let (major, minor) = match layer {
            Layer::One => (row, col),
            Layer::Two => (col, row),
        };
        let minor = if major % 2 == 0 { minor } else { n - 1 - minor };
        Ok(major * n + minor)
    }

    /// Length of the straight run that closes the serpentine, in pitches.
    pub fn closing_steps(&self) -> usize {
        // An even grid ends the serpentine on the origin's row (or column);
        // an odd one ends in the opposite corner.
        if self.is_even() {
            self.n - 1
        } else {
            2 * (self.n - 1)
        }
    }

    /// Ring circumference in pitches.
    pub fn ring_steps(&self) -> usize {
        self.cores() - 1 + self.closing_steps()
    }

    pub fn ring_circumference_mm(&self) -> f64 {
        self.ring_steps() as f64 * self.pitch_mm
    }

    pub fn serpentine_arc_position(&self, core: CoreId, layer: Layer) -> Result<f64> {
        Ok(self.serpentine_step(core, layer)? as f64 * self.pitch_mm)
    }

    /// Ring distance in pitches from `src` to `dst` travelling in `direction`.
    pub fn ring_distance_steps(
        &self,
        src: CoreId,
        dst: CoreId,
        layer: Layer,
        direction: Direction,
    ) -> Result<usize> {
        if src == dst {
            self.check(src)?;
            return Err(Error::SelfCommunication(src.0));
        }
        let ring = self.ring_steps();
        let from = self.serpentine_step(src, layer)?;
        let to = self.serpentine_step(dst, layer)?;
        let clockwise = (to + ring - from) % ring;
        Ok(match direction {
            Direction::Clockwise => clockwise,
            Direction::CounterClockwise => ring - clockwise,
        })
    }

    pub fn ring_distance(
        &self,
        src: CoreId,
        dst: CoreId,
        layer: Layer,
        direction: Direction,
    ) -> Result<f64> {
        Ok(self.ring_distance_steps(src, dst, layer, direction)? as f64 * self.pitch_mm)
    }
}
