//! Quantization of symbols on the torus, sphere and disk, and numerical tools for the
//! pseudospectra of the resulting matrices.

pub mod bargmann;
pub mod error;
pub mod family;
pub mod fit;
pub mod gamma;
pub mod matrix;
pub mod poly;
pub mod pseudomode;
pub mod spectral;
pub mod sphere;
pub mod symbol;
pub mod torus;

pub use error::{Error, Result};
pub use family::{Basis, Family, MatrixFamily};
pub use fit::{FitModel, ScalingReport, Verdict};
pub use matrix::{BTMatrix, CMatrix, Mode, Space};
pub use poly::Poly;
pub use pseudomode::{Localization, Pseudomode};
pub use symbol::{PhasePoint, PlaneSymbol, SphereSymbol, Symbol, SymbolJson, TorusSymbol};
