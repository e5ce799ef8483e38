//! Named experiment setups.

use std::path::PathBuf;

use btps_core::{Family, Mode, PlaneSymbol, SphereSymbol, Symbol, TorusSymbol};
use num_complex::Complex64;

use crate::config::{default_poly, Command, ExperimentConfig, SymbolSource, SCHEMA_VERSION};
use crate::error::CliError;

pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub levels: &'static [usize],
    pub window: [f64; 4],
    pub grid: [usize; 2],
    pub lambda: fn() -> [f64; 2],
    pub mode: Mode,
    family: fn() -> Family,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `2 cos 2 pi x + 2i cos 2 pi y`.
pub fn scottish_symbol() -> TorusSymbol {
    TorusSymbol::from_terms([((1, 0), c(1.0, 0.0)), ((-1, 0), c(1.0, 0.0)), ((0, 1), c(0.0, 1.0)), ((0, -1), c(0.0, 1.0))])
}

/// `e^{2 pi i x} + 0.5 e^{-2 pi i y}`.
pub fn twisted_symbol() -> TorusSymbol {
    TorusSymbol::from_terms([((1, 0), c(1.0, 0.0)), ((0, -1), c(0.5, 0.0))])
}

/// Point where the twisted symbol's bracket is negative.
pub const TWISTED_CENTER: (f64, f64) = (0.3, 0.45);

pub const REGISTRY: &[Preset] = &[
    Preset {
        name: "bargmann-mu05",
        description: "disk model mu z + conj(z), mu = 0.5; image is the (1.5, 0.5) ellipse",
        levels: &[20, 40, 80, 160],
        window: [-1.8, 1.8, -0.8, 0.8],
        grid: [37, 17],
        lambda: || [0.75, 0.0],
        mode: Mode::Exact,
        family: || Family::Disk { symbol: PlaneSymbol::model(0.5) },
    },
    Preset {
        name: "sphere-linear-t1",
        description: "cosh(1) x3 + i sinh(1) x1 on the sphere, lambda at the real vertex of its image",
        levels: &[32, 64, 128, 256, 512],
        window: [-0.9, 0.9, -0.7, 0.7],
        grid: [37, 29],
        lambda: || [1f64.cosh() / 2.0, 0.0],
        mode: Mode::Exact,
        family: || Family::SphereLinear { t: 1.0 },
    },
    Preset {
        name: "torus-scottish",
        description: "2 cos 2 pi x + 2i cos 2 pi y on the torus, principal-symbol matrices",
        levels: &[16, 32, 64],
        window: [-2.5, 2.5, -2.5, 2.5],
        grid: [51, 51],
        lambda: || [3.0, 3.0],
        mode: Mode::Leading,
        family: || Family::Torus { symbol: scottish_symbol(), mode: Mode::Leading },
    },
    Preset {
        name: "torus-twisted",
        description: "e^{2 pi i x} + 0.5 e^{-2 pi i y} on the torus, lambda = f(0.3, 0.45)",
        levels: &[32, 64, 128, 256],
        window: [-1.6, 1.6, -1.6, 1.6],
        grid: [33, 33],
        lambda: || {
            let l = twisted_symbol().eval(TWISTED_CENTER.0, TWISTED_CENTER.1);
            [l.re, l.im]
        },
        mode: Mode::Exact,
        family: || Family::Torus { symbol: twisted_symbol(), mode: Mode::Exact },
    },
    Preset {
        name: "sphere-x3",
        description: "height function x3 on the sphere, diagonal reference family",
        levels: &[32, 64, 128, 256],
        window: [-0.6, 0.6, -0.3, 0.3],
        grid: [25, 13],
        lambda: || [0.7, 0.0],
        mode: Mode::Exact,
        family: || Family::Sphere { symbol: SphereSymbol::coordinate(3) },
    },
];

pub fn get(name: &str) -> Result<&'static Preset, CliError> {
    REGISTRY.iter().find(|p| p.name == name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

impl Preset {
    pub fn family(&self) -> Family {
        (self.family)()
    }

    /// The fully pinned config for `command`.
    pub fn config(&self, command: Command) -> ExperimentConfig {
        ExperimentConfig {
            v: SCHEMA_VERSION,
            command,
            symbol: SymbolSource::Preset(self.name.to_string()),
            levels: self.levels.to_vec(),
            window: self.window,
            grid: self.grid,
            lambda: (self.lambda)(),
            mode: self.mode,
            width: 1.0,
            output_dir: PathBuf::from(format!("btps-out/{}", self.name)),
            seed: 0,
            poly: default_poly(),
        }
    }
}

/// The family a config quantizes; `mode` applies to torus symbols.
pub fn family_of(source: &SymbolSource, mode: Mode) -> Result<Family, CliError> {
    Ok(match source {
        SymbolSource::Preset(name) => match get(name)?.family() {
            Family::Torus { symbol, .. } => Family::Torus { symbol, mode },
            other => other,
        },
        SymbolSource::Inline(s) => Family::for_symbol(&s.to_symbol()?, mode),
    })
}

pub fn symbol_of(source: &SymbolSource) -> Result<Symbol, CliError> {
    Ok(family_of(source, Mode::Exact)?.symbol())
}
