//! Level-indexed matrix families.

use serde::{Deserialize, Serialize};

use crate::bargmann::disk_quantize;
use crate::error::Result;
use crate::matrix::{BTMatrix, Mode};
use crate::sphere::{build_sphere, linear_hamiltonian, linear_symbol};
use crate::symbol::{PlaneSymbol, SphereSymbol, Symbol, TorusSymbol};
use crate::torus::build_torus;

/// Anything that produces `T^(N)` for a level `N`.
pub trait MatrixFamily: Sync {
    fn build(&self, n: usize) -> Result<BTMatrix>;
}

impl<F> MatrixFamily for F
where
    F: Fn(usize) -> Result<BTMatrix> + Sync,
{
    fn build(&self, n: usize) -> Result<BTMatrix> {
        self(n)
    }
}

/// The built-in families, each paired with its generating symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Torus { symbol: TorusSymbol, mode: Mode },
    Sphere { symbol: SphereSymbol },
    /// The spin representation of `cosh(t) s3 + i sinh(t) s1`.
    SphereLinear { t: f64 },
    Disk { symbol: PlaneSymbol },
}

impl Family {
    pub fn symbol(&self) -> Symbol {
        match self {
            Family::Torus { symbol, .. } => Symbol::Torus(symbol.clone()),
            Family::Sphere { symbol } => Symbol::Sphere(symbol.clone()),
            Family::SphereLinear { t } => Symbol::Sphere(linear_symbol(*t)),
            Family::Disk { symbol } => Symbol::Plane(*symbol),
        }
    }

    /// Quantizes `f` in its own space.
    pub fn for_symbol(f: &Symbol, mode: Mode) -> Family {
        match f {
            Symbol::Torus(s) => Family::Torus { symbol: s.clone(), mode },
            Symbol::Sphere(s) => Family::Sphere { symbol: s.clone() },
            Symbol::Plane(s) => Family::Disk { symbol: *s },
        }
    }

    pub fn basis(&self) -> Basis {
        match self {
            Family::Torus { .. } => Basis::Theta,
            Family::Sphere { .. } | Family::SphereLinear { .. } => Basis::Spin,
            Family::Disk { .. } => Basis::Bargmann,
        }
    }
}

impl MatrixFamily for Family {
    fn build(&self, n: usize) -> Result<BTMatrix> {
        match self {
            Family::Torus { symbol, mode } => build_torus(symbol, n, *mode),
            Family::Sphere { symbol } => build_sphere(symbol, n),
            Family::SphereLinear { t } => linear_hamiltonian(*t, n),
            Family::Disk { symbol } => disk_quantize(symbol, n),
        }
    }
}

/// Coordinate basis a coefficient vector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Theta functions `theta_j`, `j = 0..N-1`.
    Theta,
    /// Their discrete Fourier duals `beta_k`.
    Beta,
    /// `|j, N>`, `j = 0..=N`.
    Spin,
    /// Monomials `|k>`, `k = 0..=N`.
    Bargmann,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Theta => "theta",
            Basis::Beta => "beta",
            Basis::Spin => "spin",
            Basis::Bargmann => "bargmann",
        }
    }
}
