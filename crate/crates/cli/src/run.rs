use btps_core::bargmann::{project_theta, squeezed_coefficients};
use btps_core::pseudomode::{
    boundary_exponent, classify_level, localize, optimal_pseudomode, part0_check, residual_decay_with, torus_packet_at,
    LevelClass,
};
use btps_core::spectral::{hausdorff_to_hull, numerical_range, pseudospectrum_grid, szego_trace, Window};
use btps_core::symbol::{image_samples, level_set_points, PhasePoint};
use btps_core::{BTMatrix, Error, Family, FitModel, MatrixFamily, Poly, ScalingReport, Symbol};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig, SymbolSource};
use crate::error::CliError;
use crate::output::{commit, Artifact};
use crate::preset::{family_of, REGISTRY};

/// Angles used for numerical range boundaries.
pub const RANGE_ANGLES: usize = 720;

/// One-line result of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub outputs: Vec<String>,
    pub results: Value,
}

impl Summary {
    pub fn to_line(&self, cfg: &ExperimentConfig) -> String {
        let preset = match &cfg.symbol {
            SymbolSource::Preset(p) if cfg.command != Command::Presets => Value::from(p.clone()),
            _ => Value::Null,
        };
        json!({
            "v": crate::config::SCHEMA_VERSION,
            "status": "ok",
            "command": cfg.command.name(),
            "preset": preset,
            "output_dir": if cfg.command == Command::Presets { Value::Null } else { json!(cfg.output_dir) },
            "outputs": self.outputs,
            "results": self.results,
        })
        .to_string()
    }
}

pub fn error_line(e: &CliError) -> String {
    json!({
        "v": crate::config::SCHEMA_VERSION,
        "status": "error",
        "exit": e.exit_code(),
        "field": e.field(),
        "message": e.to_string(),
    })
    .to_string()
}

/// Computes every artifact in memory, then writes them.
pub fn run(cfg: &ExperimentConfig) -> Result<Summary, CliError> {
    cfg.validate()?;
    if cfg.command == Command::Presets {
        let list: Vec<Value> = REGISTRY
            .iter()
            .map(|p| json!({"name": p.name, "description": p.description, "levels": p.levels}))
            .collect();
        return Ok(Summary { outputs: Vec::new(), results: json!({ "presets": list }) });
    }
    let (mut artifacts, results) = compute(cfg)?;
    artifacts.push(Artifact::plain_json("config.json", cfg));
    commit(&cfg.output_dir, &artifacts)?;
    Ok(Summary { outputs: artifacts.into_iter().map(|a| a.name).collect(), results })
}

fn lambda(cfg: &ExperimentConfig) -> Complex64 {
    Complex64::new(cfg.lambda[0], cfg.lambda[1])
}

fn report_brief(r: &ScalingReport) -> Value {
    json!({"slope": r.slope, "r2": r.r2, "verdict": r.verdict, "flags": r.flags})
}

pub fn compute(cfg: &ExperimentConfig) -> Result<(Vec<Artifact>, Value), CliError> {
    let family = family_of(&cfg.symbol, cfg.mode)?;
    let f = family.symbol();
    let lam = lambda(cfg);
    let mut out = Vec::new();
    let results = match cfg.command {
        Command::Presets => unreachable!("handled by run"),
        Command::Build => {
            let mut shapes = Vec::new();
            for &n in &cfg.levels {
                let t = family.build(n)?;
                shapes.push(json!({"N": n, "rows": t.n(), "cols": t.n(), "id": t.provenance()}));
                out.push(Artifact::matrix_csv(format!("matrix_N{n}.csv"), &t));
            }
            json!({ "matrices": shapes })
        }
        Command::Pseudospec => {
            let [a, b, c, d] = cfg.window;
            let window = Window::new(a, b, c, d)?;
            let mut mins = Vec::new();
            for &n in &cfg.levels {
                let g = pseudospectrum_grid(&family.build(n)?, window, cfg.grid[0], cfg.grid[1])?;
                mins.push(json!({"N": n, "min_sigma": g.sigma_min.iter().copied().fold(f64::INFINITY, f64::min)}));
                out.push(Artifact::grid_csv(format!("pseudospec_N{n}.csv"), &g));
                out.push(Artifact::json(format!("pseudospec_N{n}.json"), &g));
            }
            json!({ "grids": mins })
        }
        Command::Pseudomode => {
            let mut rows = Vec::new();
            for &n in &cfg.levels {
                let t = family.build(n)?;
                let p = optimal_pseudomode(&t, lam)?;
                out.push(Artifact::json(format!("pseudomode_N{n}.json"), &p.to_json()));
                let mass = match localize(&p, &f) {
                    Ok(loc) => {
                        out.push(Artifact::json(format!("localization_N{n}.json"), &loc));
                        Some(loc.mass_on_level_set)
                    }
                    Err(Error::BasisMismatch { .. }) => None,
                    Err(e) => return Err(e.into()),
                };
                rows.push(json!({"N": n, "residual": p.residual, "degenerate": p.degenerate, "mass_on_level_set": mass}));
            }
            json!({ "modes": rows })
        }
        Command::Numrange => {
            let img = image_samples(&f, image_resolution(&f))?;
            let mut dist = Vec::new();
            for &n in &cfg.levels {
                let r = numerical_range(&family.build(n)?, RANGE_ANGLES)?;
                dist.push(hausdorff_to_hull(&r, &img));
                out.push(Artifact::range_csv(format!("numrange_N{n}.csv"), &r));
            }
            if cfg.levels.len() >= 2 {
                let rep = ScalingReport::fit(cfg.levels.clone(), dist.clone(), FitModel::Loglog)?;
                out.push(Artifact::json("numrange.json", &rep));
            }
            json!({ "hausdorff": dist })
        }
        Command::Szego => {
            let poly = Poly::new(cfg.poly.iter().map(|c| Complex64::new(c[0], c[1])).collect());
            let rep = szego_trace(&family, &poly, &f, &cfg.levels)?;
            out.push(Artifact::json("szego.json", &rep));
            report_brief(&rep)
        }
        Command::Part0 => {
            let rep = part0_check(&family, &f, lam, &cfg.levels)?;
            out.push(Artifact::json("part0.json", &rep));
            report_brief(&rep)
        }
        Command::Scaling => {
            let (decay, boundary) = scaling(cfg, &family, &f, lam)?;
            let body = json!({"residual_decay": decay, "boundary_exponent": boundary});
            out.push(Artifact::json("scaling.json", &body));
            json!({
                "residual_decay": report_brief(&decay),
                "boundary_exponent": boundary.as_ref().map(report_brief),
            })
        }
    };
    Ok((out, results))
}

fn image_resolution(f: &Symbol) -> usize {
    match f {
        Symbol::Torus(_) | Symbol::Plane(_) => 256,
        Symbol::Sphere(_) => 317,
    }
}

/// Residual decay of the family's natural trial states at `lambda`, and the boundary
/// exponent when `lambda` is a boundary point of finite bracket order.
fn scaling(
    cfg: &ExperimentConfig,
    family: &Family,
    f: &Symbol,
    lam: Complex64,
) -> Result<(ScalingReport, Option<ScalingReport>), CliError> {
    let decay = match family {
        Family::Torus { .. } => {
            let (x, y) = twisted_center(f, lam)?;
            let width = cfg.width;
            let modes = move |t: &BTMatrix| torus_packet_at(x, y, t.n(), width);
            residual_decay_with(family, &modes, lam, &cfg.levels, FitModel::Loglog)?
        }
        Family::Disk { symbol } if symbol.nu == Complex64::new(1.0, 0.0) && symbol.kappa == Complex64::default() && symbol.mu.im == 0.0 => {
            let z0 = match level_set_points(f, lam, 128)?.first() {
                Some(PhasePoint::Plane { re, im }) => Complex64::new(*re, *im),
                _ => return Err(CliError::config("lambda", "not in the image of the symbol")),
            };
            let mu = symbol.mu.re;
            let modes = move |t: &BTMatrix| Ok(project_theta(&squeezed_coefficients(mu, z0, t.level())?).head);
            residual_decay_with(family, &modes, lam, &cfg.levels, FitModel::Semilog)?
        }
        _ => {
            let modes = move |t: &BTMatrix| Ok(optimal_pseudomode(t, lam)?.coeffs);
            residual_decay_with(family, &modes, lam, &cfg.levels, FitModel::Loglog)?
        }
    };
    let boundary = if cfg.levels.len() >= 5 {
        match classify_level(f, lam) {
            Ok(LevelClass::Boundary { .. }) => Some(boundary_exponent(family, f, lam, &cfg.levels)?),
            Ok(LevelClass::Interior) | Err(Error::OrderUnbounded(_)) | Err(Error::InvalidInput(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    Ok((decay, boundary))
}

/// The point of `f^{-1}(lambda)` with the most negative bracket `{Re f, Im f}`.
fn twisted_center(f: &Symbol, lam: Complex64) -> Result<(f64, f64), CliError> {
    let b = f.re_part().poisson_bracket(&f.im_part())?;
    let mut best: Option<((f64, f64), f64)> = None;
    for p in level_set_points(f, lam, 128)? {
        if let PhasePoint::Torus { x, y } = p {
            let v = b.eval(&p)?.re;
            if best.is_none_or(|(_, bv)| v < bv) {
                best = Some(((x, y), v));
            }
        }
    }
    best.map(|b| b.0).ok_or_else(|| CliError::config("lambda", "not in the image of the symbol"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preset;

    #[test]
    fn twisted_center_has_negative_bracket() {
        let f = Symbol::Torus(preset::twisted_symbol());
        let lam = preset::twisted_symbol().eval(preset::TWISTED_CENTER.0, preset::TWISTED_CENTER.1);
        let (x, y) = twisted_center(&f, lam).unwrap();
        let p = PhasePoint::torus(x, y);
        assert!((f.eval(&p).unwrap() - lam).norm() < 1e-8);
        let b = f.re_part().poisson_bracket(&f.im_part()).unwrap();
        assert!(b.eval(&p).unwrap().re < 0.0);
    }

    #[test]
    fn build_writes_one_matrix_per_level() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset::get("sphere-x3").unwrap().config(Command::Build);
        cfg.levels = vec![2, 3];
        cfg.output_dir = dir.path().to_path_buf();
        let s = run(&cfg).unwrap();
        assert_eq!(s.outputs, ["matrix_N2.csv", "matrix_N3.csv", "config.json"]);
        let text = std::fs::read_to_string(dir.path().join("matrix_N3.csv")).unwrap();
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn presets_list_everything() {
        let cfg = preset::get("sphere-x3").unwrap().config(Command::Presets);
        let s = run(&cfg).unwrap();
        assert_eq!(s.results["presets"].as_array().unwrap().len(), REGISTRY.len());
        assert!(s.outputs.is_empty());
    }
}
