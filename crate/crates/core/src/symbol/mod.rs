//! Classical symbols on the torus, the sphere and the plane, with their Poisson algebra.

mod json;
mod levelset;
mod plane;
mod sphere;
mod torus;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{content_hash, Space};

pub use json::{SymbolJson, TermJson};
pub use levelset::{level_set_points, Chart};
pub use plane::PlaneSymbol;
pub use sphere::{from_action_angle, to_action_angle, ActionAngle, SphereSymbol, SPHERE_RADIUS};
pub use torus::TorusSymbol;

/// Values below this are treated as vanishing brackets.
pub const BRACKET_TOL: f64 = 1e-9;

/// A point of one of the three model phase spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase")]
pub enum PhasePoint {
    Torus { x: f64, y: f64 },
    Sphere { x: [f64; 3] },
    Plane { re: f64, im: f64 },
}

impl PhasePoint {
    pub fn torus(x: f64, y: f64) -> Self {
        PhasePoint::Torus { x: x.rem_euclid(1.0), y: y.rem_euclid(1.0) }
    }

    pub fn sphere(x: [f64; 3]) -> Self {
        PhasePoint::Sphere { x }
    }

    pub fn plane(z: Complex64) -> Self {
        PhasePoint::Plane { re: z.re, im: z.im }
    }

    pub fn space_name(&self) -> &'static str {
        match self {
            PhasePoint::Torus { .. } => "torus",
            PhasePoint::Sphere { .. } => "sphere",
            PhasePoint::Plane { .. } => "plane",
        }
    }

    /// Flat distance with wrap-around on the torus, chordal on the sphere.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        match (self, other) {
            (PhasePoint::Torus { x: x1, y: y1 }, PhasePoint::Torus { x: x2, y: y2 }) => {
                let wrap = |d: f64| {
                    let d = (d).rem_euclid(1.0);
                    d.min(1.0 - d)
                };
                wrap(x1 - x2).hypot(wrap(y1 - y2))
            }
            (PhasePoint::Sphere { x: a }, PhasePoint::Sphere { x: b }) => {
                ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
            }
            (PhasePoint::Plane { re: a, im: b }, PhasePoint::Plane { re: c, im: d }) => (a - c).hypot(b - d),
            _ => f64::INFINITY,
        }
    }
}

/// A classical Hamiltonian on one of the model phase spaces.
#[derive(Debug, Clone, PartialEq)]
pub enum Symbol {
    Torus(TorusSymbol),
    Sphere(SphereSymbol),
    Plane(PlaneSymbol),
}

impl Symbol {
    pub fn space_name(&self) -> &'static str {
        match self {
            Symbol::Torus(_) => "torus",
            Symbol::Sphere(_) => "sphere",
            Symbol::Plane(_) => "plane",
        }
    }

    /// Matrix space this symbol quantizes to.
    pub fn space(&self) -> Space {
        match self {
            Symbol::Torus(_) => Space::Torus,
            Symbol::Sphere(_) => Space::Sphere,
            Symbol::Plane(_) => Space::PlaneDisk,
        }
    }

    pub fn eval(&self, p: &PhasePoint) -> Result<Complex64> {
        match (self, p) {
            (Symbol::Torus(f), PhasePoint::Torus { x, y }) => Ok(f.eval(*x, *y)),
            (Symbol::Sphere(f), PhasePoint::Sphere { x }) => f.eval(*x),
            (Symbol::Plane(f), PhasePoint::Plane { re, im }) => Ok(f.eval(Complex64::new(*re, *im))),
            _ => Err(Error::MixedSpaces { left: self.space_name(), right: p.space_name() }),
        }
    }

    /// Like [`Symbol::eval`] but evaluates sphere polynomials off the shell as well.
    pub(crate) fn eval_unchecked(&self, p: &PhasePoint) -> Complex64 {
        match (self, p) {
            (Symbol::Sphere(f), PhasePoint::Sphere { x }) => f.eval_ambient(*x),
            _ => self.eval(p).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
        }
    }

    pub fn poisson_bracket(&self, other: &Symbol) -> Result<Symbol> {
        match (self, other) {
            (Symbol::Torus(g), Symbol::Torus(h)) => Ok(Symbol::Torus(g.bracket(h))),
            (Symbol::Sphere(g), Symbol::Sphere(h)) => Ok(Symbol::Sphere(g.bracket(h))),
            (Symbol::Plane(g), Symbol::Plane(h)) => Ok(Symbol::Plane(g.bracket(h))),
            _ => Err(Error::MixedSpaces { left: self.space_name(), right: other.space_name() }),
        }
    }

    pub fn re_part(&self) -> Symbol {
        match self {
            Symbol::Torus(f) => Symbol::Torus(f.re_part()),
            Symbol::Sphere(f) => Symbol::Sphere(f.re_part()),
            Symbol::Plane(f) => Symbol::Plane(f.re_part()),
        }
    }

    pub fn im_part(&self) -> Symbol {
        match self {
            Symbol::Torus(f) => Symbol::Torus(f.im_part()),
            Symbol::Sphere(f) => Symbol::Sphere(f.im_part()),
            Symbol::Plane(f) => Symbol::Plane(f.im_part()),
        }
    }

    pub fn conj(&self) -> Symbol {
        match self {
            Symbol::Torus(f) => Symbol::Torus(f.conj()),
            Symbol::Sphere(f) => Symbol::Sphere(f.conj()),
            Symbol::Plane(f) => Symbol::Plane(f.conj()),
        }
    }

    pub fn scale(&self, k: Complex64) -> Symbol {
        match self {
            Symbol::Torus(f) => Symbol::Torus(f.scale(k)),
            Symbol::Sphere(f) => Symbol::Sphere(f.scale(k)),
            Symbol::Plane(f) => Symbol::Plane(f.scale(k)),
        }
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        match (self, other) {
            (Symbol::Torus(g), Symbol::Torus(h)) => Ok(Symbol::Torus(g.add(h))),
            (Symbol::Sphere(g), Symbol::Sphere(h)) => Ok(Symbol::Sphere(g.add(h))),
            (Symbol::Plane(g), Symbol::Plane(h)) => Ok(Symbol::Plane(g.add(h))),
            _ => Err(Error::MixedSpaces { left: self.space_name(), right: other.space_name() }),
        }
    }

    /// Pointwise product. Affine plane symbols are closed only under scaling by constants.
    pub fn mul(&self, other: &Symbol) -> Result<Symbol> {
        match (self, other) {
            (Symbol::Torus(g), Symbol::Torus(h)) => Ok(Symbol::Torus(g.mul(h))),
            (Symbol::Sphere(g), Symbol::Sphere(h)) => Ok(Symbol::Sphere(g.mul(h))),
            (Symbol::Plane(g), Symbol::Plane(h)) => {
                let is_const = |s: &PlaneSymbol| s.mu == Complex64::default() && s.nu == Complex64::default();
                if is_const(g) {
                    Ok(Symbol::Plane(h.scale(g.kappa)))
                } else if is_const(h) {
                    Ok(Symbol::Plane(g.scale(h.kappa)))
                } else {
                    Err(Error::invalid("product of non-constant affine plane symbols is not affine"))
                }
            }
            _ => Err(Error::MixedSpaces { left: self.space_name(), right: other.space_name() }),
        }
    }

    pub fn constant_like(&self, c: Complex64) -> Symbol {
        match self {
            Symbol::Torus(_) => Symbol::Torus(TorusSymbol::constant(c)),
            Symbol::Sphere(_) => Symbol::Sphere(SphereSymbol::constant(c)),
            Symbol::Plane(_) => Symbol::Plane(PlaneSymbol::constant(c)),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Symbol::Torus(f) => f.is_real(1e-14),
            Symbol::Sphere(f) => f.is_real(1e-14),
            Symbol::Plane(f) => f.is_real(1e-14),
        }
    }

    /// Largest coefficient magnitude; zero for the zero symbol.
    pub fn max_coefficient(&self) -> f64 {
        match self {
            Symbol::Torus(f) => f.max_coefficient(),
            Symbol::Sphere(f) => f.max_coefficient(),
            Symbol::Plane(f) => f.mu.norm().max(f.nu.norm()).max(f.kappa.norm()),
        }
    }

    pub fn to_json(&self) -> SymbolJson {
        SymbolJson::from_symbol(self)
    }

    /// Content hash of the canonical JSON form.
    pub fn content_id(&self) -> String {
        let bytes = serde_json::to_vec(&self.to_json()).expect("symbol json is always serializable");
        content_hash(&bytes)
    }
}

/// Order `k(x)` of a point: the largest `j <= max_depth` such that every repeated bracket
/// of `Re(f - f(x))`, `Im(f - f(x))` of length at most `j` vanishes at `x`. Returns
/// `max_depth + 1` when all brackets up to length `max_depth + 1` vanish.
pub fn bracket_order(f: &Symbol, point: &PhasePoint, max_depth: usize) -> Result<usize> {
    if max_depth < 1 {
        return Err(Error::invalid("max_depth must be >= 1"));
    }
    let value = f.eval(point)?;
    let shifted = f.add(&f.constant_like(-value))?;
    let parts = [shifted.re_part(), shifted.im_part()];
    let mut current: Vec<Symbol> = parts.to_vec();
    for length in 1..=max_depth + 1 {
        if length > 1 {
            let mut next = Vec::with_capacity(current.len() * 2);
            for outer in &parts {
                for inner in &current {
                    next.push(outer.poisson_bracket(inner)?);
                }
            }
            current = next;
        }
        for g in &current {
            if g.eval(point)?.norm() > BRACKET_TOL {
                return Ok(length - 1);
            }
        }
    }
    Ok(max_depth + 1)
}

/// Deterministic quasi-uniform points: a `resolution^2` lattice on the torus, a
/// `resolution^2`-point Fibonacci lattice on the sphere, and a polar grid on the unit disk.
pub fn sample_points(space: Space, resolution: usize) -> Result<Vec<PhasePoint>> {
    if resolution < 2 {
        return Err(Error::invalid("resolution must be >= 2"));
    }
    let r = resolution;
    Ok(match space {
        Space::Torus => (0..r * r)
            .map(|i| PhasePoint::Torus { x: (i % r) as f64 / r as f64, y: (i / r) as f64 / r as f64 })
            .collect(),
        Space::Sphere => fibonacci_sphere(r * r),
        Space::PlaneDisk => {
            let mut pts = vec![PhasePoint::Plane { re: 0.0, im: 0.0 }];
            for i in 1..=r {
                let rad = i as f64 / r as f64;
                for k in 0..r {
                    let z = Complex64::from_polar(rad, 2.0 * PI * k as f64 / r as f64);
                    pts.push(PhasePoint::plane(z));
                }
            }
            pts
        }
    })
}

pub(crate) fn fibonacci_sphere(n: usize) -> Vec<PhasePoint> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            PhasePoint::Sphere { x: [0.5 * rho * phi.cos(), 0.5 * rho * phi.sin(), 0.5 * z] }
        })
        .collect()
}

pub fn image_samples(f: &Symbol, resolution: usize) -> Result<Vec<Complex64>> {
    let pts = sample_points(f.space(), resolution)?;
    pts.par_iter().map(|p| f.eval(p)).collect()
}

/// `min |f(x) - lambda|` over the sample grid.
pub fn min_distance_to(f: &Symbol, lambda: Complex64, resolution: usize) -> Result<f64> {
    let values = image_samples(f, resolution)?;
    Ok(values.iter().map(|v| (v - lambda).norm()).fold(f64::INFINITY, f64::min))
}

/// Mean of `g(f(x))` over phase space with Liouville weights.
pub fn phase_space_average<G>(f: &Symbol, resolution: usize, g: G) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64 + Sync,
{
    if resolution < 2 {
        return Err(Error::invalid("resolution must be >= 2"));
    }
    match f {
        Symbol::Plane(p) => {
            // midpoint rule in (r^2, angle), which has uniform area weight
            let r = resolution;
            let total: Complex64 = (0..r * r)
                .into_par_iter()
                .map(|idx| {
                    let (i, k) = (idx / r, idx % r);
                    let rad = ((i as f64 + 0.5) / r as f64).sqrt();
                    let ang = 2.0 * PI * (k as f64 + 0.5) / r as f64;
                    g(p.eval(Complex64::from_polar(rad, ang)))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .sum();
            Ok(total / (r * r) as f64)
        }
        _ => {
            let pts = sample_points(f.space(), resolution)?;
            let vals: Vec<Complex64> = pts.par_iter().map(|p| f.eval(p).map(&g)).collect::<Result<_>>()?;
            Ok(vals.iter().sum::<Complex64>() / vals.len() as f64)
        }
    }
}
