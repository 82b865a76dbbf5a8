use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AcPart, Atom, CircleMeasure, HalfLineMeasure, ValidationReport};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Circle,
    Halfline,
}

/// On-disk measure description.
///
/// ```json
/// {"space": "circle", "atoms": [{"loc": 0.0, "w": 0.5}], "ac": {"grid": [...], "values": [...]}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub space: Space,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac: Option<AcPart>,
}

/// A measure on either space.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Circle(CircleMeasure),
    HalfLine(HalfLineMeasure),
}

impl Measure {
    pub fn space(&self) -> Space {
        match self {
            Measure::Circle(_) => Space::Circle,
            Measure::HalfLine(_) => Space::Halfline,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Measure::Circle(m) => m.validate(),
            Measure::HalfLine(m) => m.validate(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeasureFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_measure()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_file(&self) -> MeasureFile {
        let (space, atoms, ac) = match self {
            Measure::Circle(m) => (Space::Circle, m.atoms(), m.ac()),
            Measure::HalfLine(m) => (Space::Halfline, m.atoms(), m.ac()),
        };
        MeasureFile {
            space,
            atoms: atoms.to_vec(),
            ac: ac.cloned(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("measure serializes")
    }
}

impl MeasureFile {
    pub fn into_measure(self) -> Result<Measure> {
        Ok(match self.space {
            Space::Circle => Measure::Circle(CircleMeasure::new(self.atoms, self.ac)?),
            Space::Halfline => Measure::HalfLine(HalfLineMeasure::new(self.atoms, self.ac)?),
        })
    }
}
