//! Dense spectral computations: smallest singular values, eigenvalues, numerical ranges
//! and normalized traces.

use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::fit::{FitModel, ScalingReport};
use crate::matrix::{BTMatrix, CMatrix};
use crate::poly::Poly;
use crate::symbol::{phase_space_average, Symbol};

const SVD_ITER: usize = 0;

fn smallest_singular_value(m: CMatrix, context: impl FnOnce() -> String) -> Result<f64> {
    let s = m.try_svd(false, false, f64::EPSILON, SVD_ITER).map(|svd| svd.singular_values.min());
    match s {
        Some(s) if s.is_finite() => Ok(s.max(0.0)),
        _ => Err(Error::numerical(context())),
    }
}

fn shifted(t: &CMatrix, lambda: Complex64) -> CMatrix {
    let mut m = t.clone();
    for i in 0..m.nrows() {
        m[(i, i)] -= lambda;
    }
    m
}

/// Smallest singular value of `T - lambda`.
pub fn sigma_min(t: &BTMatrix, lambda: Complex64) -> Result<f64> {
    smallest_singular_value(shifted(t.entries(), lambda), || {
        format!("SVD of {} - ({}, {})", t.provenance(), lambda.re, lambda.im)
    })
}

/// `||(T - lambda) v|| / ||v||`.
pub fn residual(t: &BTMatrix, lambda: Complex64, v: &[Complex64]) -> Result<f64> {
    if v.len() != t.n() {
        return Err(Error::BadDimension(v.len()));
    }
    let v = DVector::from_column_slice(v);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::invalid("zero vector"));
    }
    let r = t.entries() * &v - &v * lambda;
    Ok(r.norm() / norm)
}

/// Rectangle `[re_min, re_max] x [im_min, im_max]` of the spectral plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Window { re_min, re_max, im_min, im_max };
        if !(re_min < re_max && im_min < im_max) || [re_min, re_max, im_min, im_max].iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("window {re_min},{re_max},{im_min},{im_max} is not well-ordered")));
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudospectrumGrid {
    pub re_range: [f64; 2],
    pub im_range: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    /// Row-major with the imaginary part as the outer index: `sigma_min[iy * nx + ix]`.
    pub sigma_min: Vec<f64>,
    pub matrix_id: String,
    #[serde(rename = "N")]
    pub level: usize,
}

impl PseudospectrumGrid {
    pub fn re_at(&self, ix: usize) -> f64 {
        node(self.re_range, self.nx, ix)
    }

    pub fn im_at(&self, iy: usize) -> f64 {
        node(self.im_range, self.ny, iy)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.sigma_min[iy * self.nx + ix]
    }

    /// `(lambda, sigma_min)` in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (Complex64, f64)> + '_ {
        (0..self.ny).flat_map(move |iy| {
            (0..self.nx).map(move |ix| (Complex64::new(self.re_at(ix), self.im_at(iy)), self.value(ix, iy)))
        })
    }
}

fn node(range: [f64; 2], count: usize, i: usize) -> f64 {
    if i + 1 == count {
        range[1]
    } else {
        range[0] + (range[1] - range[0]) * i as f64 / (count - 1) as f64
    }
}

pub fn pseudospectrum_grid(t: &BTMatrix, window: Window, nx: usize, ny: usize) -> Result<PseudospectrumGrid> {
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("grid counts must be >= 2"));
    }
    let mut grid = PseudospectrumGrid {
        re_range: [window.re_min, window.re_max],
        im_range: [window.im_min, window.im_max],
        nx,
        ny,
        sigma_min: vec![0.0; nx * ny],
        matrix_id: t.provenance(),
        level: t.level(),
    };
    let lambdas: Vec<Complex64> = (0..nx * ny).map(|i| Complex64::new(grid.re_at(i % nx), grid.im_at(i / nx))).collect();
    let values: Vec<f64> = lambdas
        .par_iter()
        .map(|&lam| {
            smallest_singular_value(shifted(t.entries(), lam), || {
                format!("SVD of {} at grid node ({}, {})", t.provenance(), lam.re, lam.im)
            })
        })
        .collect::<Result<_>>()?;
    grid.sigma_min = values;
    Ok(grid)
}

pub fn eigenvalues(t: &BTMatrix) -> Result<Vec<Complex64>> {
    let fail = || Error::numerical(format!("Schur decomposition of {}", t.provenance()));
    let schur = t.entries().clone().try_schur(f64::EPSILON, 0).ok_or_else(fail)?;
    let eig = schur.eigenvalues().ok_or_else(fail)?;
    Ok(eig.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalRangeBoundary {
    pub angles: Vec<f64>,
    pub support_values: Vec<f64>,
    pub boundary_points: Vec<Complex64>,
}

/// Support function and extreme points of `W(T)` at `M` equally spaced directions.
pub fn numerical_range(t: &BTMatrix, m: usize) -> Result<NumericalRangeBoundary> {
    if m < 8 {
        return Err(Error::invalid("numerical range needs at least 8 angles"));
    }
    let a = t.entries();
    let out: Vec<(f64, f64, Complex64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / m as f64;
            let rot = a * Complex64::from_polar(1.0, -theta);
            let h = (&rot + rot.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::try_new(h, f64::EPSILON, 0)
                .ok_or_else(|| Error::numerical(format!("Hermitian eigensolve of {} at angle {theta}", t.provenance())))?;
            let (imax, nu) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let psi = eig.eigenvectors.column(imax).into_owned();
            let z = (psi.adjoint() * a * &psi)[(0, 0)] / psi.norm_squared();
            Ok((theta, nu, z))
        })
        .collect::<Result<_>>()?;
    Ok(NumericalRangeBoundary {
        angles: out.iter().map(|o| o.0).collect(),
        support_values: out.iter().map(|o| o.1).collect(),
        boundary_points: out.iter().map(|o| o.2).collect(),
    })
}

/// `max_z Re(exp(-i theta) z)`.
pub fn support(points: &[Complex64], theta: f64) -> f64 {
    let r = Complex64::from_polar(1.0, -theta);
    points.iter().map(|z| (r * z).re).fold(f64::NEG_INFINITY, f64::max)
}

/// Vertices of the convex hull in counter-clockwise order (monotone chain).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts: Vec<Complex64> = points.iter().copied().filter(|z| z.re.is_finite() && z.im.is_finite()).collect();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re);
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-12 * scale * scale;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Hausdorff distance between `W` (given by its support values) and the convex hull of
/// `points`, as the largest support-function gap over the boundary's angles.
pub fn hausdorff_to_hull(range: &NumericalRangeBoundary, points: &[Complex64]) -> f64 {
    let hull = convex_hull(points);
    range
        .angles
        .iter()
        .zip(&range.support_values)
        .map(|(&theta, &h)| (h - support(&hull, theta)).abs())
        .fold(0.0, f64::max)
}

/// `F(T)` by Horner's rule.
pub fn poly_of_matrix(f: &Poly, t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut acc = CMatrix::zeros(n, n);
    for c in f.coeffs().iter().rev() {
        acc = &acc * t;
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    acc
}

/// `tr F(T) / dim`.
pub fn normalized_trace(f: &Poly, t: &BTMatrix) -> Complex64 {
    poly_of_matrix(f, t.entries()).trace() / t.n() as f64
}

/// Phase-space resolution used for averages: a 512^2 torus lattice, ~10^5 sphere points.
pub fn average_resolution(f: &Symbol) -> usize {
    match f {
        Symbol::Torus(_) => 512,
        Symbol::Sphere(_) => 317,
        Symbol::Plane(_) => 512,
    }
}

/// Errors `|tr F(T^(N))/dim - avg(F o f)|` across `levels`, fitted log-log.
pub fn szego_trace<M: MatrixFamily + ?Sized>(
    family: &M,
    f_poly: &Poly,
    f: &Symbol,
    levels: &[usize],
) -> Result<ScalingReport> {
    if f_poly.degree() > 6 {
        return Err(Error::invalid("trace polynomial degree must be <= 6"));
    }
    let avg = phase_space_average(f, average_resolution(f), |z| f_poly.eval(z))?;
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&n| {
            let t = family.build(n)?;
            Ok((normalized_trace(f_poly, &t) - avg).norm())
        })
        .collect::<Result<_>>()?;
    ScalingReport::fit(levels.to_vec(), values, FitModel::Loglog)
}
