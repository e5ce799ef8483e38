//! Fixtures shared by the benchmarks.

use btps_core::{Family, Mode, PlaneSymbol, SphereSymbol, TorusSymbol};
use num_complex::Complex64;

pub fn twisted_torus() -> Family {
    let symbol = TorusSymbol::from_terms([((1, 0), Complex64::new(1.0, 0.0)), ((0, -1), Complex64::new(0.5, 0.0))]);
    Family::Torus { symbol, mode: Mode::Exact }
}

/// `x3^3 + i x1` on the sphere.
pub fn cubic_sphere() -> Family {
    let mut symbol = SphereSymbol::new();
    symbol.add_term([0, 0, 3], Complex64::new(1.0, 0.0));
    symbol.add_term([1, 0, 0], Complex64::new(0.0, 1.0));
    Family::Sphere { symbol }
}

pub fn linear_sphere() -> Family {
    Family::SphereLinear { t: 1.0 }
}

pub fn disk_model() -> Family {
    Family::Disk { symbol: PlaneSymbol::model(0.5) }
}
