//! Insertion-loss design-space exploration for optical crossbars on chip.
//!
//! The crate models an N×N grid of IP cores connected either by a two-layer
//! ring crossbar ([`ring`]) or by a central Matrix, λ-router or Snake
//! crossbar ([`crossbar`]) reached through access waveguides. Every
//! source-to-destination path is reduced to a handful of counters
//! ([`loss::PathCharacteristics`]) that a parameter set turns into decibels.
//! [`analysis`] aggregates worst-case and average losses and runs the scale,
//! distance and break-even studies.

pub mod analysis;
pub mod cli;
pub mod crossbar;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod grid;
pub mod loss;
pub mod reproduce;
pub mod ring;

pub use error::{Error, Result};
