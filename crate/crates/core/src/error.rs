use std::fmt;

use crate::geometry::Layer;
use crate::loss::Coefficient;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parameter set `{set}` has no value for {coefficient}")]
    MissingCoefficient {
        set: String,
        coefficient: Coefficient,
    },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("line {line}: {reason}")]
    ParamsSyntax { line: usize, reason: String },

    #[error("unknown parameter preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("core {core} is out of range 1..={cores}")]
    CoreOutOfRange { core: usize, cores: usize },

    #[error("source and destination are both core {0}")]
    SelfCommunication(usize),

    #[error("waveguides {first} and {second} overlap collinearly on {layer}")]
    CollinearOverlap {
        layer: Layer,
        first: u32,
        second: u32,
    },

    #[error("no crossing-free route for {net}")]
    Unroutable { net: String },

    #[error("mesh has no route from input {src} to output {dst}")]
    NoRoute { src: usize, dst: usize },

    #[error("topologies have identical loss structure; every point is break-even")]
    DegenerateFrontier,

    #[error("result sets do not match: {0}")]
    MismatchedRuns(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl fmt::Display) -> Self {
        Error::Invariant(msg.to_string())
    }
}
