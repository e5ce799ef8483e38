//! Dense Berezin-Toeplitz matrices with provenance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Phase space a matrix family quantizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    Torus,
    Sphere,
    PlaneDisk,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Torus => "torus",
            Space::Sphere => "sphere",
            Space::PlaneDisk => "plane-disk",
        }
    }
}

/// How matrix entries were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Closed-form matrix coefficients.
    #[default]
    Exact,
    /// Principal-symbol entries only.
    Leading,
}

/// A square complex matrix realizing `T^(N)` in the canonical basis of its space.
#[derive(Debug, Clone, PartialEq)]
pub struct BTMatrix {
    entries: CMatrix,
    space: Space,
    level: usize,
    symbol_id: String,
    mode: Mode,
}

impl BTMatrix {
    /// Wraps `entries`, rejecting empty, non-square or non-finite input.
    pub fn new(
        entries: CMatrix,
        space: Space,
        level: usize,
        symbol_id: impl Into<String>,
        mode: Mode,
    ) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::BadDimension(entries.nrows()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::numerical(format!(
                "non-finite entry in {} matrix at level {level}",
                space.name()
            )));
        }
        Ok(BTMatrix { entries, space, level, symbol_id: symbol_id.into(), mode })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn symbol_id(&self) -> &str {
        &self.symbol_id
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Multiplies every entry by `c`, keeping provenance.
    pub fn scaled(&self, c: Complex64) -> BTMatrix {
        BTMatrix { entries: self.entries.map(|z| z * c), ..self.clone() }
    }

    pub fn adjoint(&self) -> BTMatrix {
        BTMatrix { entries: self.entries.adjoint(), ..self.clone() }
    }

    /// Stable identifier combining space, level, symbol and mode.
    pub fn provenance(&self) -> String {
        format!(
            "{}:N={}:{}:{}",
            self.space.name(),
            self.level,
            self.symbol_id,
            match self.mode {
                Mode::Exact => "exact",
                Mode::Leading => "leading",
            }
        )
    }
}

/// Short hex SHA-256 digest used for symbol and matrix ids.
pub fn content_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Largest absolute entry difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
