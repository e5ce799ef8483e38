use std::fmt;
use std::path::PathBuf;

use btps_core::{Mode, SymbolJson};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::preset;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Build,
    Pseudospec,
    Pseudomode,
    Numrange,
    Szego,
    Scaling,
    Part0,
    Presets,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::Pseudospec => "pseudospec",
            Command::Pseudomode => "pseudomode",
            Command::Numrange => "numrange",
            Command::Szego => "szego",
            Command::Scaling => "scaling",
            Command::Part0 => "part0",
            Command::Presets => "presets",
        }
    }

    fn min_levels(self) -> usize {
        match self {
            Command::Presets => 0,
            Command::Build | Command::Pseudospec | Command::Pseudomode | Command::Numrange => 1,
            Command::Szego => 2,
            Command::Scaling | Command::Part0 => 4,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A preset name or an inline symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSource {
    Preset(String),
    Inline(SymbolJson),
}

/// Everything a run depends on. Written next to the outputs as `config.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub v: u32,
    pub command: Command,
    pub symbol: SymbolSource,
    pub levels: Vec<usize>,
    pub window: [f64; 4],
    pub grid: [usize; 2],
    pub lambda: [f64; 2],
    pub mode: Mode,
    pub width: f64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Real and imaginary parts of the trace polynomial's coefficients, lowest degree first.
    #[serde(default = "default_poly")]
    pub poly: Vec<[f64; 2]>,
}

pub fn default_poly() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
}

/// Same fields, all optional, as read from `--config` files and merged with flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    v: Option<u32>,
    command: Option<Command>,
    symbol: Option<SymbolSource>,
    levels: Option<Vec<usize>>,
    window: Option<[f64; 4]>,
    grid: Option<[usize; 2]>,
    lambda: Option<[f64; 2]>,
    mode: Option<Mode>,
    width: Option<f64>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    poly: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Leading,
}

#[derive(Debug, Parser)]
#[command(name = "btps", version, about = "Pseudospectra of Berezin-Toeplitz matrix families")]
pub struct Args {
    pub command: Command,
    #[arg(long, conflicts_with = "symbol")]
    pub preset: Option<String>,
    /// Symbol JSON file.
    #[arg(long)]
    pub symbol: Option<PathBuf>,
    /// Full or partial config JSON; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// re_min,re_max,im_min,im_max
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    /// nx,ny
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
    /// re,im
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn fixed<const K: usize, T: Copy>(field: &str, v: Vec<T>) -> Result<[T; K], CliError> {
    v.try_into().map_err(|v: Vec<T>| CliError::config(field, format!("expected {K} values, got {}", v.len())))
}

impl Args {
    fn to_partial(&self) -> Result<PartialConfig, CliError> {
        Ok(PartialConfig {
            v: None,
            command: Some(self.command),
            symbol: None,
            levels: self.levels.clone(),
            window: self.window.clone().map(|w| fixed("window", w)).transpose()?,
            grid: self.grid.clone().map(|g| fixed("grid", g)).transpose()?,
            lambda: self.lambda.clone().map(|l| fixed("lambda", l)).transpose()?,
            mode: self.mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Leading => Mode::Leading,
            }),
            width: self.width,
            output_dir: self.out.clone(),
            seed: None,
            poly: None,
        })
    }
}

fn read(path: &PathBuf, field: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(field, format!("{}: {e}", path.display())))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, field: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::config(field, e.to_string()))
}

fn pick<T>(a: Option<T>, b: Option<T>, c: Option<T>) -> Option<T> {
    a.or(b).or(c)
}

/// Merges `--config`, the preset or symbol file, and flags (highest precedence) into a checked config.
pub fn resolve(args: &Args) -> Result<ExperimentConfig, CliError> {
    let file: PartialConfig = match &args.config {
        Some(p) => parse_json(&read(p, "config")?, "config")?,
        None => PartialConfig::default(),
    };
    let flags = args.to_partial()?;
    let symbol = match (&args.preset, &args.symbol) {
        (Some(name), _) => Some(SymbolSource::Preset(name.clone())),
        (None, Some(path)) => Some(SymbolSource::Inline(parse_json(&read(path, "symbol")?, "symbol")?)),
        (None, None) => file.symbol.clone(),
    };
    let command = flags.command.or(file.command).ok_or_else(|| CliError::config("command", "missing"))?;
    if command == Command::Presets {
        return Ok(preset::get(preset::REGISTRY[0].name)?.config(command));
    }
    let symbol = symbol.ok_or_else(|| CliError::config("symbol", "give --preset, --symbol or a config with a symbol"))?;
    let base = match &symbol {
        SymbolSource::Preset(name) => Some(preset::get(name)?.config(command)),
        SymbolSource::Inline(_) => None,
    };
    let cfg = ExperimentConfig {
        v: file.v.unwrap_or(SCHEMA_VERSION),
        command,
        levels: pick(flags.levels, file.levels, base.as_ref().map(|b| b.levels.clone()))
            .ok_or_else(|| CliError::config("levels", "missing"))?,
        window: match pick(flags.window, file.window, base.as_ref().map(|b| b.window)) {
            Some(w) => w,
            None => default_window(&symbol)?,
        },
        grid: pick(flags.grid, file.grid, base.as_ref().map(|b| b.grid)).unwrap_or([41, 41]),
        lambda: pick(flags.lambda, file.lambda, base.as_ref().map(|b| b.lambda)).unwrap_or([0.0, 0.0]),
        mode: pick(flags.mode, file.mode, base.as_ref().map(|b| b.mode)).unwrap_or_default(),
        width: pick(flags.width, file.width, base.as_ref().map(|b| b.width)).unwrap_or(1.0),
        output_dir: pick(flags.output_dir, file.output_dir, base.as_ref().map(|b| b.output_dir.clone())).unwrap_or_else(|| PathBuf::from("btps-out")),
        seed: file.seed.unwrap_or(0),
        poly: file.poly.unwrap_or_else(default_poly),
        symbol,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Bounding box of the symbol's image, padded by a tenth of its size.
fn default_window(symbol: &SymbolSource) -> Result<[f64; 4], CliError> {
    let f = preset::symbol_of(symbol)?;
    let img = btps_core::symbol::image_samples(&f, 64)?;
    let (mut a, mut b, mut c, mut d) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in img {
        a = a.min(z.re);
        b = b.max(z.re);
        c = c.min(z.im);
        d = d.max(z.im);
    }
    let pad = 0.1 * (b - a).max(d - c).max(0.1);
    Ok([a - pad, b + pad, c - pad, d + pad])
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.v != SCHEMA_VERSION {
            return Err(CliError::config("v", format!("unsupported schema version {}", self.v)));
        }
        if self.levels.len() < self.command.min_levels() {
            return Err(CliError::config(
                "levels",
                format!("{} needs at least {} levels", self.command, self.command.min_levels()),
            ));
        }
        if self.command != Command::Presets {
            if self.levels.contains(&0) {
                return Err(CliError::config("levels", "levels must be positive"));
            }
            if self.levels.windows(2).any(|w| w[0] >= w[1]) {
                return Err(CliError::config("levels", "levels must be strictly increasing"));
            }
        }
        let [a, b, c, d] = self.window;
        if !(a < b && c < d) || self.window.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("window", "expected re_min < re_max and im_min < im_max"));
        }
        if self.grid.iter().any(|&g| g < 2) {
            return Err(CliError::config("grid", "nx and ny must be >= 2"));
        }
        if self.lambda.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("lambda", "must be finite"));
        }
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(CliError::config("width", "must be a positive number"));
        }
        if self.poly.is_empty() || self.poly.len() > 7 {
            return Err(CliError::config("poly", "expected 1 to 7 coefficients"));
        }
        if let SymbolSource::Inline(s) = &self.symbol {
            s.to_symbol().map_err(|e| CliError::config("symbol", e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Args {
        Args::parse_from(std::iter::once("btps").chain(list.iter().copied()))
    }

    #[test]
    fn flags_override_preset() {
        let cfg = resolve(&args(&["build", "--preset", "sphere-x3", "--levels", "4,8", "--lambda", "-0.25,0.5"])).unwrap();
        assert_eq!(cfg.levels, vec![4, 8]);
        assert_eq!(cfg.lambda, [-0.25, 0.5]);
        assert_eq!(cfg.symbol, SymbolSource::Preset("sphere-x3".into()));
    }

    #[test]
    fn bad_fields_are_named() {
        let e = resolve(&args(&["build", "--preset", "sphere-x3", "--window", "1,0,0,1"])).unwrap_err();
        assert!(matches!(e, CliError::Config { ref field, .. } if field == "window"));
        let e = resolve(&args(&["build", "--preset", "sphere-x3", "--grid", "3"])).unwrap_err();
        assert!(matches!(e, CliError::Config { ref field, .. } if field == "grid"));
        let e = resolve(&args(&["scaling", "--preset", "sphere-x3", "--levels", "8,16"])).unwrap_err();
        assert!(matches!(e, CliError::Config { ref field, .. } if field == "levels"));
        let e = resolve(&args(&["build", "--preset", "nope"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_config_fields_rejected() {
        assert!(serde_json::from_str::<PartialConfig>(r#"{"levels": [4], "colour": 1}"#).is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg = resolve(&args(&["numrange", "--preset", "torus-scottish"])).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }
}
