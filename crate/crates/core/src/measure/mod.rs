//! Input probability measures: finitely many atoms plus a piecewise-linear
//! absolutely continuous part, on the unit circle or on `[0, ∞)`.
//!
//! Every engine formula consumes one of a handful of kernel integrals
//! against the input measure. Atoms are summed exactly; the continuous part
//! goes through adaptive Gauss–Kronrod panels graded toward the kernel peak.

mod circle;
mod halfline;
mod json;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use circle::{wrap_angle, CircleMeasure};
pub use halfline::HalfLineMeasure;
pub use json::{Measure, MeasureFile, Space};

/// Total-mass tolerance for admissibility.
pub const MASS_TOL: f64 = 1e-9;

/// A point mass at `loc` (an angle on the circle, a coordinate on the half-line).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub loc: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

impl Atom {
    pub fn new(loc: f64, weight: f64) -> Self {
        Atom { loc, weight }
    }
}

/// Piecewise-linear density samples on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcPart {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// A structural finding reported by `validate`.
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    NonNormalized { mass: f64 },
    NegativeDensity { index: usize, value: f64 },
    DuplicateAtom { first: usize, second: usize },
    NonPositiveWeight { index: usize, weight: f64 },
    NegativeLocation { index: usize, loc: f64 },
    ConcentratedAtZero,
}

impl Issue {
    /// Stable short code used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Issue::NonNormalized { .. } => "non-normalized",
            Issue::NegativeDensity { .. } => "negative density",
            Issue::DuplicateAtom { .. } => "duplicate atom",
            Issue::NonPositiveWeight { .. } => "non-positive weight",
            Issue::NegativeLocation { .. } => "negative location",
            Issue::ConcentratedAtZero => "concentrated at zero",
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::NonNormalized { mass } => write!(f, "non-normalized (total mass {mass})"),
            Issue::NegativeDensity { index, value } => {
                write!(f, "negative density ({value} at sample {index})")
            }
            Issue::DuplicateAtom { first, second } => {
                write!(f, "duplicate atom (atoms {first} and {second})")
            }
            Issue::NonPositiveWeight { index, weight } => {
                write!(f, "non-positive weight ({weight} on atom {index})")
            }
            Issue::NegativeLocation { index, loc } => {
                write!(f, "negative location ({loc} on atom {index})")
            }
            Issue::ConcentratedAtZero => write!(f, "concentrated at zero"),
        }
    }
}

/// Result of validating a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    /// `1 - total mass`.
    pub mass_defect: f64,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_admissible(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code() == code)
    }

    /// `Ok(())` when admissible, otherwise an `InvalidMeasure` error listing the issues.
    pub fn into_result(self) -> crate::Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            let msg: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
            Err(crate::Error::InvalidMeasure(msg.join("; ")))
        }
    }
}

/// Atom-level checks shared by both spaces.
fn atom_issues(atoms: &[Atom], same: impl Fn(f64, f64) -> bool, issues: &mut Vec<Issue>) {
    for (i, a) in atoms.iter().enumerate() {
        if a.weight <= 0.0 {
            issues.push(Issue::NonPositiveWeight {
                index: i,
                weight: a.weight,
            });
        }
        for (j, b) in atoms.iter().enumerate().skip(i + 1) {
            if same(a.loc, b.loc) {
                issues.push(Issue::DuplicateAtom {
                    first: i,
                    second: j,
                });
            }
        }
    }
}

fn density_issues(ac: Option<&AcPart>, issues: &mut Vec<Issue>) {
    if let Some(ac) = ac {
        for (index, &value) in ac.values.iter().enumerate() {
            if value < 0.0 {
                issues.push(Issue::NegativeDensity { index, value });
            }
        }
    }
}

/// Checks grid/value shapes; `min_len` nodes are required.
fn check_ac_shape(ac: &AcPart, min_len: usize) -> crate::Result<()> {
    if ac.grid.len() != ac.values.len() {
        return Err(crate::Error::Parse(format!(
            "ac grid has {} nodes but {} values",
            ac.grid.len(),
            ac.values.len()
        )));
    }
    if ac.grid.len() < min_len {
        return Err(crate::Error::Parse(format!(
            "ac grid needs at least {min_len} nodes"
        )));
    }
    if ac.grid.iter().chain(&ac.values).any(|v| !v.is_finite()) {
        return Err(crate::Error::Parse("non-finite ac sample".into()));
    }
    if ac.grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(crate::Error::Parse(
            "ac grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn check_atoms_finite(atoms: &[Atom]) -> crate::Result<()> {
    if atoms
        .iter()
        .any(|a| !a.loc.is_finite() || !a.weight.is_finite())
    {
        return Err(crate::Error::Parse("non-finite atom".into()));
    }
    Ok(())
}
