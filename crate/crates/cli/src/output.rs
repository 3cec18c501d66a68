//! `detections.json` schema. Reals are written with exactly six decimals
//! so repeated runs are byte-identical.

use std::fmt;
use std::path::Path;

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use symconv::{Center, SymmetryLine, SymmetrySegment};

use crate::error::{CliError, Result};

/// A real serialized with six fixed decimals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom("non-finite value in output"));
        }
        // avoid "-0.000000"
        let v = if self.0.abs() < 5e-7 { 0.0 } else { self.0 };
        let raw = RawValue::from_string(format!("{v:.6}")).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Fixed)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRecord {
    pub rho: Fixed,
    pub delta: Fixed,
    pub score: Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub ax: Fixed,
    pub ay: Fixed,
    pub bx: Fixed,
    pub by: Fixed,
    pub score: Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub x: usize,
    pub y: usize,
    pub score: Fixed,
}

/// Contents of `detections.json`. Coordinates are in the resized image;
/// divide by `scale` to map back to the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detections {
    pub image: String,
    pub mode: String,
    pub scale: Fixed,
    pub lines: Vec<LineRecord>,
    pub segments: Vec<SegmentRecord>,
    pub centers: Vec<CenterRecord>,
}

impl From<&SymmetryLine> for LineRecord {
    fn from(l: &SymmetryLine) -> Self {
        Self {
            rho: Fixed(l.rho),
            delta: Fixed(l.delta),
            score: Fixed(l.score),
        }
    }
}

impl From<&SymmetrySegment> for SegmentRecord {
    fn from(s: &SymmetrySegment) -> Self {
        Self {
            ax: Fixed(s.endpoint_a.x),
            ay: Fixed(s.endpoint_a.y),
            bx: Fixed(s.endpoint_b.x),
            by: Fixed(s.endpoint_b.y),
            score: Fixed(s.score()),
        }
    }
}

impl From<&Center> for CenterRecord {
    fn from(c: &Center) -> Self {
        Self {
            x: c.x,
            y: c.y,
            score: Fixed(c.score),
        }
    }
}

impl Detections {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("cannot serialize detections: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
    }
}
