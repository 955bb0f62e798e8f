//! Insertion-loss coefficients and the per-path loss sum.
//!
//! A path is summarised by its [`PathCharacteristics`]: waveguide length plus
//! counts of same-layer crossings, drops and vertical-coupler traversals. The
//! total loss is the coefficient-weighted sum of those counters. Coefficients
//! that a preset leaves undefined stay `None`; using a path that needs one is
//! an error rather than an implicit zero.

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Drop loss used for cross-layer drops when a parameter set has none.
pub const DEFAULT_CROSS_LAYER_DROP_DB: f64 = 1.0;
/// Optical via loss used when a parameter set has none.
pub const DEFAULT_COUPLER_DB: f64 = 0.1;

/// One of the five loss coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coefficient {
    Propagation,
    Crossing,
    DropSameLayer,
    DropCrossLayer,
    Coupler,
}

impl Coefficient {
    pub const ALL: [Coefficient; 5] = [
        Coefficient::Propagation,
        Coefficient::Crossing,
        Coefficient::DropSameLayer,
        Coefficient::DropCrossLayer,
        Coefficient::Coupler,
    ];

    /// Key used in parameter files.
    pub fn file_key(self) -> &'static str {
        match self {
            Coefficient::Propagation => "p_propagation_db_per_cm",
            Coefficient::Crossing => "p_crossing_db",
            Coefficient::DropSameLayer => "p_drop1_db",
            Coefficient::DropCrossLayer => "p_drop2_db",
            Coefficient::Coupler => "p_coupler_db",
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coefficient::Propagation => "p_propagation",
            Coefficient::Crossing => "p_crossing",
            Coefficient::DropSameLayer => "p_drop1",
            Coefficient::DropCrossLayer => "p_drop2",
            Coefficient::Coupler => "p_coupler",
        })
    }
}

/// Insertion-loss coefficients of a fabrication technology.
#[derive(Debug, Clone, PartialEq)]
pub struct LossParams {
    pub name: String,
    /// dB per cm of waveguide.
    pub propagation_db_per_cm: f64,
    /// dB per crossing of two waveguides on the same layer.
    pub crossing_db: f64,
    /// dB per drop between two waveguides on the same layer.
    pub drop_same_layer_db: Option<f64>,
    /// dB per drop from one optical layer to the other.
    pub drop_cross_layer_db: Option<f64>,
    /// dB per vertical coupler (optical via) traversal.
    pub coupler_db: Option<f64>,
}

impl LossParams {
    pub fn new(
        name: impl Into<String>,
        propagation_db_per_cm: f64,
        crossing_db: f64,
        drop_same_layer_db: Option<f64>,
        drop_cross_layer_db: Option<f64>,
        coupler_db: Option<f64>,
    ) -> Result<Self> {
        let params = LossParams {
            name: name.into(),
            propagation_db_per_cm,
            crossing_db,
            drop_same_layer_db,
            drop_cross_layer_db,
            coupler_db,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for c in Coefficient::ALL {
            if let Some(v) = self.get(c) {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: c.to_string(),
                        reason: format!("{v} is not a finite non-negative dB value"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, coefficient: Coefficient) -> Option<f64> {
        match coefficient {
            Coefficient::Propagation => Some(self.propagation_db_per_cm),
            Coefficient::Crossing => Some(self.crossing_db),
            Coefficient::DropSameLayer => self.drop_same_layer_db,
            Coefficient::DropCrossLayer => self.drop_cross_layer_db,
            Coefficient::Coupler => self.coupler_db,
        }
    }

    pub fn set(&mut self, coefficient: Coefficient, value: Option<f64>) {
        match coefficient {
            Coefficient::Propagation => self.propagation_db_per_cm = value.unwrap_or(0.0),
            Coefficient::Crossing => self.crossing_db = value.unwrap_or(0.0),
            Coefficient::DropSameLayer => self.drop_same_layer_db = value,
            Coefficient::DropCrossLayer => self.drop_cross_layer_db = value,
            Coefficient::Coupler => self.coupler_db = value,
        }
    }

    /// Fills an absent cross-layer drop and coupler loss with
    /// [`DEFAULT_CROSS_LAYER_DROP_DB`] and [`DEFAULT_COUPLER_DB`]. Present
    /// values and the same-layer drop are left alone.
    pub fn with_multilayer_defaults(mut self) -> Self {
        self.drop_cross_layer_db
            .get_or_insert(DEFAULT_CROSS_LAYER_DROP_DB);
        self.coupler_db.get_or_insert(DEFAULT_COUPLER_DB);
        self
    }

    /// Serialises to the `key=value` text format read by [`FromStr`].
    pub fn to_kv_string(&self) -> String {
        let mut out = format!("name={}\n", self.name);
        for c in Coefficient::ALL {
            if let Some(v) = self.get(c) {
                out.push_str(&format!("{}={}\n", c.file_key(), v));
            }
        }
        out
    }
}

impl FromStr for LossParams {
    type Err = Error;

    /// Parses a line-oriented `key=value` parameter file. Blank lines and
    /// lines starting with `#` are ignored; an absent key leaves the
    /// coefficient undefined.
    fn from_str(text: &str) -> Result<Self> {
        let mut name = None;
        let mut values: [Option<f64>; 5] = [None; 5];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ParamsSyntax {
                line: line_no,
                reason: format!("expected key=value, got `{line}`"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key == "name" {
                name = Some(value.to_string());
                continue;
            }
            let slot = Coefficient::ALL
                .iter()
                .position(|c| c.file_key() == key)
                .ok_or_else(|| Error::ParamsSyntax {
                    line: line_no,
                    reason: format!("unknown key `{key}`"),
                })?;
            if values[slot].is_some() {
                return Err(Error::ParamsSyntax {
                    line: line_no,
                    reason: format!("duplicate key `{key}`"),
                });
            }
            let v: f64 = value.parse().map_err(|_| Error::ParamsSyntax {
                line: line_no,
                reason: format!("`{value}` is not a number"),
            })?;
            values[slot] = Some(v);
        }
        let required = |slot: usize| {
            values[slot].ok_or_else(|| Error::InvalidParameter {
                name: Coefficient::ALL[slot].to_string(),
                reason: "required key is missing".into(),
            })
        };
        LossParams::new(
            name.unwrap_or_else(|| "custom".into()),
            required(0)?,
            required(1)?,
            values[2],
            values[3],
            values[4],
        )
    }
}

/// Counters describing one source-to-destination optical path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PathCharacteristics {
    /// Waveguide length between source and destination, in cm.
    pub length_cm: f64,
    /// Crossings with other waveguides on the same layer.
    pub crossings: u64,
    pub drops_same_layer: u64,
    pub drops_cross_layer: u64,
    pub couplers: u64,
}

impl PathCharacteristics {
    fn terms(&self) -> [(Coefficient, f64); 5] {
        [
            (Coefficient::Propagation, self.length_cm),
            (Coefficient::Crossing, self.crossings as f64),
            (Coefficient::DropSameLayer, self.drops_same_layer as f64),
            (Coefficient::DropCrossLayer, self.drops_cross_layer as f64),
            (Coefficient::Coupler, self.couplers as f64),
        ]
    }

    /// Coefficients this path needs to be scored.
    pub fn required(&self) -> impl Iterator<Item = Coefficient> + '_ {
        self.terms()
            .into_iter()
            .filter(|&(_, amount)| amount != 0.0)
            .map(|(c, _)| c)
    }
}

impl Add for PathCharacteristics {
    type Output = PathCharacteristics;

    fn add(self, rhs: Self) -> Self {
        PathCharacteristics {
            length_cm: self.length_cm + rhs.length_cm,
            crossings: self.crossings + rhs.crossings,
            drops_same_layer: self.drops_same_layer + rhs.drops_same_layer,
            drops_cross_layer: self.drops_cross_layer + rhs.drops_cross_layer,
            couplers: self.couplers + rhs.couplers,
        }
    }
}

/// Total insertion loss in dB along `path`.
pub fn compute_total_loss(path: &PathCharacteristics, params: &LossParams) -> Result<f64> {
    let mut total = 0.0;
    for (coefficient, amount) in path.terms() {
        if amount == 0.0 {
            continue;
        }
        let per_unit = params
            .get(coefficient)
            .ok_or_else(|| Error::MissingCoefficient {
                set: params.name.clone(),
                coefficient,
            })?;
        total += per_unit * amount;
    }
    Ok(total)
}

/// Built-in parameter sets.
pub fn builtin_presets() -> Vec<LossParams> {
    let preset = |name: &str, crossing, propagation, drop1, drop2, coupler| LossParams {
        name: name.to_string(),
        propagation_db_per_cm: propagation,
        crossing_db: crossing,
        drop_same_layer_db: drop1,
        drop_cross_layer_db: drop2,
        coupler_db: coupler,
    };
    vec![
        preset("Biberman", 0.05, 0.5, Some(0.5), None, Some(0.1)),
        preset("Zhang", 0.05, 1.0, None, Some(1.0), None),
        preset("Pan", 0.05, 1.0, Some(1.5), None, None),
        preset("Kirman", 0.12, 1.0, Some(1.0), None, None),
        preset("Koka", 0.2, 0.1, Some(1.5), None, None),
    ]
}

/// Looks up a built-in preset by case-insensitive name.
pub fn preset(name: &str) -> Result<LossParams> {
    builtin_presets()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
