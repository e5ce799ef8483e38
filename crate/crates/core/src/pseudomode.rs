//! Pseudomodes: explicit constructions, optimal singular vectors, residual decay across
//! levels and phase-space localization.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{Basis, MatrixFamily};
use crate::fit::{FitModel, ScalingReport, Verdict};
use crate::matrix::{BTMatrix, Space};
use crate::spectral::{residual, sigma_min};
use crate::symbol::{bracket_order, level_set_points, min_distance_to, PhasePoint, Symbol, SPHERE_RADIUS};
use crate::torus::dft_change_of_basis;

/// Singular values closer than this count as degenerate.
const DEGENERACY_GAP: f64 = 1e-12;
/// Deepest bracket checked when classifying level points.
pub const MAX_BRACKET_DEPTH: usize = 6;
/// Grid used to seed level-set searches.
const LEVEL_SET_RESOLUTION: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct Pseudomode {
    pub n: usize,
    pub basis: Basis,
    pub coeffs: Vec<Complex64>,
    pub center: Option<PhasePoint>,
    pub width_param: Option<f64>,
    pub residual: f64,
    pub lambda: Complex64,
    /// Set when the smallest singular value is not simple.
    pub degenerate: bool,
}

/// Wire form of a pseudomode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PseudomodeJson {
    pub basis: Basis,
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: [f64; 2],
    pub residual: f64,
    pub coeffs: Vec<[f64; 2]>,
}

impl Pseudomode {
    /// Wraps `coeffs` (normalized here) and measures its residual against `t`.
    pub fn from_coeffs(t: &BTMatrix, lambda: Complex64, coeffs: Vec<Complex64>, basis: Basis) -> Result<Self> {
        let norm = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::numerical("pseudomode has zero or non-finite norm"));
        }
        let coeffs: Vec<Complex64> = coeffs.into_iter().map(|a| a / norm).collect();
        let r = residual(t, lambda, &coeffs)?;
        Ok(Pseudomode {
            n: t.level(),
            basis,
            coeffs,
            center: None,
            width_param: None,
            residual: r,
            lambda,
            degenerate: false,
        })
    }

    pub fn to_json(&self) -> PseudomodeJson {
        PseudomodeJson {
            basis: self.basis,
            n: self.n,
            lambda: [self.lambda.re, self.lambda.im],
            residual: self.residual,
            coeffs: self.coeffs.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

/// Periodized discrete Gaussian `a_j = sum_{w=-1,0,1} e^{2 pi i x0 (j+wN)} e^{-pi (j+wN-N y0)^2 / (width N)}`,
/// normalized. It peaks at index `N y0` and, after the Fourier change of basis, at `N x0`.
pub fn torus_wavepacket(x0: f64, y0: f64, n: usize, width: f64) -> Result<Vec<Complex64>> {
    if n < 1 {
        return Err(Error::BadDimension(n));
    }
    if width <= 0.0 || !width.is_finite() || !x0.is_finite() || !y0.is_finite() {
        return Err(Error::invalid("wavepacket needs finite center and width > 0"));
    }
    let nf = n as f64;
    let y0 = y0.rem_euclid(1.0);
    let mut a: Vec<Complex64> = (0..n)
        .map(|j| {
            [-1.0, 0.0, 1.0]
                .iter()
                .map(|w| {
                    let s = j as f64 + w * nf;
                    Complex64::from_polar((-PI * (s - nf * y0).powi(2) / (width * nf)).exp(), 2.0 * PI * x0 * s)
                })
                .sum()
        })
        .collect();
    let norm = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if norm.is_nan() || norm <= 0.0 {
        return Err(Error::numerical("wavepacket underflowed"));
    }
    a.iter_mut().for_each(|v| *v /= norm);
    Ok(a)
}

/// Index of the theta basis vector sitting over the phase-space height `y`.
pub fn theta_index(y: f64, n: usize) -> usize {
    ((-y).rem_euclid(1.0) * n as f64).round() as usize % n
}

/// Phase-space height `y` of theta index `j`, and abscissa `x` of Fourier index `k`.
pub fn theta_coordinate(j: usize, n: usize) -> f64 {
    (-(j as f64) / n as f64).rem_euclid(1.0)
}

/// [`torus_wavepacket`] placed at the phase-space point `(x, y)`.
pub fn torus_packet_at(x: f64, y: f64, n: usize, width: f64) -> Result<Vec<Complex64>> {
    torus_wavepacket((-x).rem_euclid(1.0), (-y).rem_euclid(1.0), n, width)
}

/// Gaussian-packet pseudomode for a torus matrix at phase-space point `center`.
pub fn torus_packet_mode(t: &BTMatrix, lambda: Complex64, center: (f64, f64), width: f64) -> Result<Pseudomode> {
    if t.space() != Space::Torus {
        return Err(Error::BasisMismatch { mode: Basis::Theta.name(), space: t.space().name() });
    }
    let coeffs = torus_packet_at(center.0, center.1, t.n(), width)?;
    let mut p = Pseudomode::from_coeffs(t, lambda, coeffs, Basis::Theta)?;
    p.center = Some(PhasePoint::torus(center.0, center.1));
    p.width_param = Some(width);
    Ok(p)
}

/// Solves `(T - lambda) v = 0` row by row for a matrix with a diagonal and a single wrapped
/// off-diagonal `T[r][(r - s) mod n]`, starting from `v[start] = 1` and walking half the orbit
/// in each direction. Decays away from `start` exactly when the sign condition holds there.
pub fn recurrence_pseudomode(t: &BTMatrix, lambda: Complex64, start: usize) -> Result<Pseudomode> {
    let n = t.n();
    let e = t.entries();
    if start >= n {
        return Err(Error::invalid(format!("start index {start} outside 0..{n}")));
    }
    let mut shift = None;
    for r in 0..n {
        for c in 0..n {
            if r == c || e[(r, c)] == Complex64::default() {
                continue;
            }
            let s = (r + n - c) % n;
            match shift {
                None => shift = Some(s),
                Some(prev) if prev == s => {}
                Some(_) => return Err(Error::invalid("matrix has more than one off-diagonal")),
            }
        }
    }
    let basis = match t.space() {
        Space::Torus => Basis::Theta,
        Space::Sphere => Basis::Spin,
        Space::PlaneDisk => Basis::Bargmann,
    };
    let Some(s) = shift else {
        let mut v = vec![Complex64::default(); n];
        v[start] = Complex64::new(1.0, 0.0);
        return Pseudomode::from_coeffs(t, lambda, v, basis);
    };
    let orbit = n / gcd(n, s);
    let forward = (orbit - 1) / 2;
    let backward = orbit - 1 - forward;
    let mut v = vec![Complex64::default(); n];
    v[start] = Complex64::new(1.0, 0.0);
    let (mut prev, mut r) = (start, (start + s) % n);
    for _ in 0..forward {
        let den = e[(r, r)] - lambda;
        if den == Complex64::default() {
            break;
        }
        v[r] = -e[(r, prev)] * v[prev] / den;
        if v[r].norm() < 1e-280 {
            v[r] = Complex64::default();
            break;
        }
        prev = r;
        r = (r + s) % n;
    }
    let mut q = start;
    for _ in 0..backward {
        let below = (q + n - s) % n;
        let c = e[(q, below)];
        if c == Complex64::default() {
            break;
        }
        v[below] = -(e[(q, q)] - lambda) * v[q] / c;
        if v[below].norm() < 1e-280 {
            v[below] = Complex64::default();
            break;
        }
        q = below;
    }
    if v.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::numerical("recurrence pseudomode overflowed"));
    }
    let mut p = Pseudomode::from_coeffs(t, lambda, v, basis)?;
    if t.space() == Space::Torus {
        p.center = Some(PhasePoint::torus(0.0, theta_coordinate(start, n)));
    }
    Ok(p)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Anything that builds a trial vector for `T^(N)`.
pub trait ModeBuilder: Sync {
    fn build(&self, t: &BTMatrix) -> Result<Vec<Complex64>>;
}

impl<F> ModeBuilder for F
where
    F: Fn(&BTMatrix) -> Result<Vec<Complex64>> + Sync,
{
    fn build(&self, t: &BTMatrix) -> Result<Vec<Complex64>> {
        self(t)
    }
}

/// Residuals `||(T^(N) - lambda) psi_N|| / ||psi_N||`, fitted log-log, with the superpolynomial verdict.
pub fn residual_decay<M, B>(family: &M, modes: &B, lambda: Complex64, levels: &[usize]) -> Result<ScalingReport>
where
    M: MatrixFamily + ?Sized,
    B: ModeBuilder + ?Sized,
{
    residual_decay_with(family, modes, lambda, levels, FitModel::Loglog)
}

/// As [`residual_decay`] with a chosen fit model (semilog for exponential laws).
pub fn residual_decay_with<M, B>(
    family: &M,
    modes: &B,
    lambda: Complex64,
    levels: &[usize],
    model: FitModel,
) -> Result<ScalingReport>
where
    M: MatrixFamily + ?Sized,
    B: ModeBuilder + ?Sized,
{
    if levels.len() < 4 {
        return Err(Error::invalid("residual decay needs at least 4 levels"));
    }
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&n| {
            let t = family.build(n)?;
            let v = modes.build(&t)?;
            residual(&t, lambda, &v)
        })
        .collect::<Result<_>>()?;
    let report = ScalingReport::fit(levels.to_vec(), values, model)?;
    let verdict = report.superpolynomial_verdict();
    Ok(report.with_verdict(verdict))
}

/// Right singular vector of the smallest singular value of `T - lambda`.
pub fn optimal_pseudomode(t: &BTMatrix, lambda: Complex64) -> Result<Pseudomode> {
    let mut m = t.entries().clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    let svd = m
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::numerical(format!("SVD of {} for optimal pseudomode", t.provenance())))?;
    let sv = &svd.singular_values;
    let (imin, smin) = sv.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let second = sv.iter().enumerate().filter(|(i, _)| *i != imin).map(|(_, &v)| v).fold(f64::INFINITY, f64::min);
    let v_t = svd.v_t.ok_or_else(|| Error::numerical("SVD returned no right singular vectors"))?;
    let coeffs: Vec<Complex64> = v_t.row(imin).iter().map(|z| z.conj()).collect();
    let basis = match t.space() {
        Space::Torus => Basis::Theta,
        Space::Sphere => Basis::Spin,
        Space::PlaneDisk => Basis::Bargmann,
    };
    let mut p = Pseudomode::from_coeffs(t, lambda, coeffs, basis)?;
    p.degenerate = second - smin < DEGENERACY_GAP;
    Ok(p)
}

/// Coefficient-mass profiles of a pseudomode and the share of mass near `f^{-1}(lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    /// `|a_j|^2` against `j / N` (torus).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_profile: Option<Vec<f64>>,
    /// `|DFT(a)_k|^2` against `k / N` (torus).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_profile: Option<Vec<f64>>,
    /// `|a_j|^2` against `j / (N + 1)` (sphere).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i_profile: Option<Vec<f64>>,
    pub mass_on_level_set: f64,
}

fn normalized_profile(v: impl Iterator<Item = Complex64>) -> Vec<f64> {
    let p: Vec<f64> = v.map(|a| a.norm_sqr()).collect();
    let total: f64 = p.iter().sum();
    p.into_iter().map(|x| x / total).collect()
}

/// Index of the largest entry.
pub fn peak_index(profile: &[f64]) -> usize {
    profile.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc }).0
}

pub fn localize(mode: &Pseudomode, f: &Symbol) -> Result<Localization> {
    let radius = 3.0 / (mode.n.max(1) as f64).sqrt();
    match (mode.basis, f) {
        (Basis::Theta, Symbol::Torus(_)) => {
            let n = mode.coeffs.len();
            let y = normalized_profile(mode.coeffs.iter().copied());
            let dft = dft_change_of_basis(n) * DVector::from_column_slice(&mode.coeffs);
            let x = normalized_profile(dft.iter().copied());
            let level = level_set_points(f, mode.lambda, LEVEL_SET_RESOLUTION)?;
            let mut mass = 0.0;
            if !level.is_empty() {
                for (j, py) in y.iter().enumerate() {
                    if *py == 0.0 {
                        continue;
                    }
                    for (k, px) in x.iter().enumerate() {
                        let p = PhasePoint::torus(theta_coordinate(k, n), theta_coordinate(j, n));
                        if level.iter().any(|q| q.distance(&p) <= radius) {
                            mass += py * px;
                        }
                    }
                }
            }
            Ok(Localization { y_profile: Some(y), x_profile: Some(x), i_profile: None, mass_on_level_set: mass })
        }
        (Basis::Spin, Symbol::Sphere(_)) => {
            let n = mode.coeffs.len() - 1;
            let prof = normalized_profile(mode.coeffs.iter().copied());
            let level = level_set_points(f, mode.lambda, LEVEL_SET_RESOLUTION)?;
            let mut mass = 0.0;
            for (j, p) in prof.iter().enumerate() {
                let h = j as f64 / (n + 1) as f64 - 0.5;
                let rho = (SPHERE_RADIUS * SPHERE_RADIUS - h * h).max(0.0).sqrt();
                // chordal distance from a point to the latitude circle at height h
                let near = level.iter().any(|q| match q {
                    PhasePoint::Sphere { x } => {
                        let qr = x[0].hypot(x[1]);
                        (qr - rho).hypot(x[2] - h) <= radius
                    }
                    _ => false,
                });
                if near {
                    mass += p;
                }
            }
            Ok(Localization { y_profile: None, x_profile: None, i_profile: Some(prof), mass_on_level_set: mass })
        }
        (basis, f) => Err(Error::BasisMismatch { mode: basis.name(), space: f.space_name() }),
    }
}

/// Classification of `lambda` from the bracket orders on `f^{-1}(lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelClass {
    /// Some level point has a non-vanishing bracket.
    Interior,
    /// All brackets vanish at the level points up to length `k`.
    Boundary { k: usize },
}

pub fn classify_level(f: &Symbol, lambda: Complex64) -> Result<LevelClass> {
    let points = level_set_points(f, lambda, LEVEL_SET_RESOLUTION)?;
    if points.is_empty() {
        return Err(Error::invalid(format!("({}, {}) is not in the image of the symbol", lambda.re, lambda.im)));
    }
    let mut k = 0;
    for p in &points {
        let order = bracket_order(f, p, MAX_BRACKET_DEPTH)?;
        if order > MAX_BRACKET_DEPTH {
            return Err(Error::OrderUnbounded(MAX_BRACKET_DEPTH));
        }
        if order == 1 {
            return Ok(LevelClass::Interior);
        }
        k = k.max(order);
    }
    Ok(LevelClass::Boundary { k })
}

/// `sigma_min(T^(N) - lambda)` across levels. On the boundary the report carries the window
/// `[-k/(k+1) - 0.08, -1/2 + 0.08]` and a PASS verdict when the fitted slope lies in it;
/// in the interior it is flagged `interior` with the superpolynomial verdict instead.
pub fn boundary_exponent<M: MatrixFamily + ?Sized>(
    family: &M,
    f: &Symbol,
    lambda: Complex64,
    levels: &[usize],
) -> Result<ScalingReport> {
    if levels.len() < 5 {
        return Err(Error::invalid("boundary exponent needs at least 5 levels"));
    }
    let class = classify_level(f, lambda)?;
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&n| sigma_min(&family.build(n)?, lambda))
        .collect::<Result<_>>()?;
    let report = ScalingReport::fit(levels.to_vec(), values, FitModel::Loglog)?;
    Ok(match class {
        LevelClass::Interior => {
            let v = report.superpolynomial_verdict();
            report.with_flag("interior").with_verdict(v)
        }
        LevelClass::Boundary { k } => {
            let kf = k as f64;
            let window = [-kf / (kf + 1.0) - 0.08, -0.5 + 0.08];
            let inside = report.slope >= window[0] && report.slope <= window[1];
            let mut r = report.with_flag("boundary").with_flag(format!("k={k}"));
            r.window = Some(window);
            r.with_verdict(if inside { Verdict::Pass } else { Verdict::Fail })
        }
    })
}

/// Sample resolution for `inf |f - lambda|`.
fn distance_resolution(f: &Symbol) -> usize {
    match f {
        Symbol::Torus(_) => 256,
        Symbol::Sphere(_) => 317,
        Symbol::Plane(_) => 256,
    }
}

/// `|sigma_min(T^(N) - lambda) - inf |f - lambda||` across levels, fitted log-log.
pub fn part0_check<M: MatrixFamily + ?Sized>(
    family: &M,
    f: &Symbol,
    lambda: Complex64,
    levels: &[usize],
) -> Result<ScalingReport> {
    if levels.len() < 4 {
        return Err(Error::invalid("part0 check needs at least 4 levels"));
    }
    let d = min_distance_to(f, lambda, distance_resolution(f))?;
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&n| Ok((sigma_min(&family.build(n)?, lambda)? - d).abs()))
        .collect::<Result<_>>()?;
    ScalingReport::fit(levels.to_vec(), values, FitModel::Loglog)
}
