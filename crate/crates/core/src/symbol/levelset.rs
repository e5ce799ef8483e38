use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{sample_points, PhasePoint, Symbol, SPHERE_RADIUS};
use crate::error::{Error, Result};

const ACCEPT_TOL: f64 = 1e-8;
const REFINE_TOL: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-6;
const MAX_SEEDS: usize = 96;

/// Local coordinates `(u, v)` around a base point. On the torus and plane these are the flat
/// coordinates themselves; on the sphere a tangent plane projected radially onto the shell.
#[derive(Debug, Clone, Copy)]
pub struct Chart {
    base: PhasePoint,
    t1: [f64; 3],
    t2: [f64; 3],
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    a.map(|v| v / n)
}

impl Chart {
    pub fn at(base: &PhasePoint) -> Chart {
        let (mut t1, mut t2) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        if let PhasePoint::Sphere { x } = base {
            let n = unit(*x);
            let e = if n[0].abs() < 0.6 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let d = dot(e, n);
            t1 = unit([e[0] - d * n[0], e[1] - d * n[1], e[2] - d * n[2]]);
            t2 = cross(n, t1);
        }
        Chart { base: *base, t1, t2 }
    }

    pub fn point(&self, uv: [f64; 2]) -> PhasePoint {
        match self.base {
            PhasePoint::Torus { x, y } => PhasePoint::torus(x + uv[0], y + uv[1]),
            PhasePoint::Plane { re, im } => PhasePoint::Plane { re: re + uv[0], im: im + uv[1] },
            PhasePoint::Sphere { x } => {
                let q = [0, 1, 2].map(|i| x[i] + uv[0] * self.t1[i] + uv[1] * self.t2[i]);
                PhasePoint::Sphere { x: unit(q).map(|v| SPHERE_RADIUS * v) }
            }
        }
    }

    /// Value and `(d/du, d/dv)` of `f` at chart coordinates `uv`.
    pub fn jet(&self, f: &Symbol, uv: [f64; 2]) -> Result<(Complex64, [Complex64; 2])> {
        let p = self.point(uv);
        match (f, &p) {
            (Symbol::Torus(t), PhasePoint::Torus { x, y }) => {
                let mut val = Complex64::default();
                let mut grad = [Complex64::default(); 2];
                for ((l, m), c) in t.terms() {
                    let e = c * Complex64::from_polar(1.0, 2.0 * PI * (l as f64 * x + m as f64 * y));
                    val += e;
                    grad[0] += e * Complex64::new(0.0, 2.0 * PI * l as f64);
                    grad[1] += e * Complex64::new(0.0, 2.0 * PI * m as f64);
                }
                Ok((val, grad))
            }
            (Symbol::Plane(s), PhasePoint::Plane { re, im }) => {
                let g = s.gradient();
                Ok((s.eval(Complex64::new(*re, *im)), g))
            }
            (Symbol::Sphere(s), PhasePoint::Sphere { x }) => {
                let PhasePoint::Sphere { x: b } = self.base else { unreachable!() };
                let q = [0, 1, 2].map(|i| b[i] + uv[0] * self.t1[i] + uv[1] * self.t2[i]);
                let qn = dot(q, q).sqrt();
                let qh = q.map(|v| v / qn);
                let dx = |t: [f64; 3]| {
                    let d = dot(qh, t);
                    [0, 1, 2].map(|i| SPHERE_RADIUS * (t[i] - qh[i] * d) / qn)
                };
                let g = s.ambient_gradient(*x);
                let along = |d: [f64; 3]| g[0] * d[0] + g[1] * d[1] + g[2] * d[2];
                Ok((s.eval_ambient(*x), [along(dx(self.t1)), along(dx(self.t2))]))
            }
            _ => Err(Error::MixedSpaces { left: f.space_name(), right: p.space_name() }),
        }
    }
}

/// Solves `J d = -r` in the least-squares sense with Levenberg damping; rows of `J` are real.
fn damped_step(rows: &[([f64; 2], f64)], damping: f64) -> [f64; 2] {
    let (mut a, mut b, mut c, mut g0, mut g1) = (damping, 0.0, damping, 0.0, 0.0);
    for (j, r) in rows {
        a += j[0] * j[0];
        b += j[0] * j[1];
        c += j[1] * j[1];
        g0 += j[0] * r;
        g1 += j[1] * r;
    }
    let det = a * c - b * b;
    if det.abs() < 1e-300 {
        return [0.0, 0.0];
    }
    [-(c * g0 - b * g1) / det, -(a * g1 - b * g0) / det]
}

fn residual_rows(val: Complex64, grad: [Complex64; 2], lambda: Complex64) -> [([f64; 2], f64); 2] {
    let r = val - lambda;
    [([grad[0].re, grad[1].re], r.re), ([grad[0].im, grad[1].im], r.im)]
}

fn solve(f: &Symbol, bracket: Option<&Symbol>, lambda: Complex64, start: PhasePoint) -> Result<PhasePoint> {
    let mut p = start;
    let mut damping = 1e-12;
    let cost = |p: &PhasePoint| -> Result<f64> {
        let r = (f.eval_unchecked(p) - lambda).norm_sqr();
        Ok(match bracket {
            Some(b) => r + b.eval_unchecked(p).re.powi(2),
            None => r,
        })
    };
    let mut current = cost(&p)?;
    for _ in 0..200 {
        if current < 1e-30 {
            break;
        }
        let chart = Chart::at(&p);
        let (val, grad) = chart.jet(f, [0.0, 0.0])?;
        let mut rows = residual_rows(val, grad, lambda).to_vec();
        if let Some(b) = bracket {
            let (bv, bg) = chart.jet(b, [0.0, 0.0])?;
            rows.push(([bg[0].re, bg[1].re], bv.re));
        }
        let mut improved = false;
        for _ in 0..40 {
            let step = damped_step(&rows, damping);
            let trial = chart.point(step);
            let c = cost(&trial)?;
            if c < current {
                p = trial;
                current = c;
                damping = (damping * 0.1).max(1e-15);
                improved = true;
                break;
            }
            damping = (damping * 10.0).max(1e-12);
        }
        if !improved {
            break;
        }
    }
    Ok(p)
}

fn grid_spacing(f: &Symbol, resolution: usize) -> f64 {
    match f {
        Symbol::Torus(_) => 1.0 / resolution as f64,
        Symbol::Sphere(_) => (PI / (resolution * resolution) as f64).sqrt(),
        Symbol::Plane(_) => 1.0 / resolution as f64,
    }
}

/// Points of `{x : f(x) = lambda}` found by seeding Newton iterations from a sample grid.
/// Fold points (where the bracket `{Re f, Im f}` also vanishes) are refined onto the fold.
pub fn level_set_points(f: &Symbol, lambda: Complex64, resolution: usize) -> Result<Vec<PhasePoint>> {
    if let Symbol::Plane(s) = f {
        let det = s.mu.norm_sqr() - s.nu.norm_sqr();
        if det.abs() < 1e-14 {
            return Err(Error::invalid("affine symbol with |mu| = |nu| has no isolated level points"));
        }
        let w = lambda - s.kappa;
        let z = (s.mu.conj() * w - s.nu * w.conj()) / det;
        return Ok(if z.norm() <= 1.0 { vec![PhasePoint::plane(z)] } else { vec![] });
    }
    let pts = sample_points(f.space(), resolution)?;
    let jets: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|p| {
            let (v, g) = Chart::at(p).jet(f, [0.0, 0.0])?;
            let lip = g[0].norm().hypot(g[1].norm());
            Ok(((v - lambda).norm(), lip))
        })
        .collect::<Result<_>>()?;
    let lip = jets.iter().map(|j| j.1).fold(0.0, f64::max);
    let h = grid_spacing(f, resolution);
    let threshold = 2.0 * lip * h;
    let mut order: Vec<usize> = (0..pts.len()).filter(|&i| jets[i].0 <= threshold).collect();
    order.sort_by(|&a, &b| jets[a].0.total_cmp(&jets[b].0));
    let mut seeds: Vec<PhasePoint> = Vec::new();
    for i in order {
        if seeds.len() >= MAX_SEEDS {
            break;
        }
        if seeds.iter().all(|s| s.distance(&pts[i]) > 2.0 * h) {
            seeds.push(pts[i]);
        }
    }
    let bracket = f.re_part().poisson_bracket(&f.im_part())?;
    let refined: Vec<Option<PhasePoint>> = seeds
        .par_iter()
        .map(|s| {
            let a = solve(f, None, lambda, *s)?;
            let b = solve(f, Some(&bracket), lambda, a)?;
            let pick = if (f.eval_unchecked(&b) - lambda).norm() <= REFINE_TOL { b } else { a };
            Ok(((f.eval_unchecked(&pick) - lambda).norm() <= ACCEPT_TOL).then_some(pick))
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<PhasePoint> = Vec::new();
    for p in refined.into_iter().flatten() {
        if out.iter().all(|q| q.distance(&p) > DEDUP_TOL) {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{bracket_order, SphereSymbol, TorusSymbol};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sphere_chart_gradient_matches_differences() {
        let f = Symbol::Sphere(SphereSymbol::from_terms([([1, 0, 0], c(0.0, 1.3)), ([1, 1, 1], c(2.0, 0.5))]));
        let p = PhasePoint::sphere([0.3, -0.1, (0.25f64 - 0.1).sqrt()]);
        let chart = Chart::at(&p);
        let (_, g) = chart.jet(&f, [0.0, 0.0]).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut up = [0.0; 2];
            up[k] = h;
            let mut dn = [0.0; 2];
            dn[k] = -h;
            let fd = (f.eval(&chart.point(up)).unwrap() - f.eval(&chart.point(dn)).unwrap()) / (2.0 * h);
            assert!((fd - g[k]).norm() < 1e-7);
        }
    }

    #[test]
    fn twisted_torus_level_set_contains_seed_point() {
        let f = Symbol::Torus(TorusSymbol::from_terms([((1, 0), c(1.0, 0.0)), ((0, -1), c(0.5, 0.0))]));
        let target = PhasePoint::torus(0.3, 0.45);
        let lam = f.eval(&target).unwrap();
        let pts = level_set_points(&f, lam, 64).unwrap();
        assert!(pts.iter().any(|p| p.distance(&target) < 1e-9));
        for p in &pts {
            assert!((f.eval(p).unwrap() - lam).norm() < 1e-8);
            assert_eq!(bracket_order(&f, p, 3).unwrap(), 1);
        }
    }

    #[test]
    fn fold_points_are_refined_onto_the_fold() {
        let t = 1.0f64;
        let f = Symbol::Sphere(SphereSymbol::from_terms([([1, 0, 0], c(0.0, t.sinh())), ([0, 0, 1], c(t.cosh(), 0.0))]));
        let a = 0.8f64;
        let lam = c(0.5 * t.cosh() * a.cos(), 0.5 * t.sinh() * a.sin());
        let pts = level_set_points(&f, lam, 64).unwrap();
        assert!(!pts.is_empty());
        for p in &pts {
            assert_eq!(bracket_order(&f, p, 4).unwrap(), 2);
        }
    }

    #[test]
    fn plane_level_point_is_explicit() {
        let f = Symbol::Plane(crate::symbol::PlaneSymbol::model(0.5));
        let pts = level_set_points(&f, c(0.3, 0.2), 8).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((f.eval(&pts[0]).unwrap() - c(0.3, 0.2)).norm() < 1e-14);
        assert!(level_set_points(&f, c(3.0, 0.0), 8).unwrap().is_empty());
    }
}
