use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Poly;

pub const SPHERE_RADIUS: f64 = 0.5;

/// Polynomial `sum amp[a,b,c] x1^a x2^b x3^c` restricted to the sphere of radius 1/2.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SphereSymbol {
    terms: BTreeMap<[u32; 3], Complex64>,
}

impl SphereSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ([u32; 3], Complex64)>>(terms: I) -> Self {
        let mut s = Self::new();
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([([0, 0, 0], c)])
    }

    /// The coordinate function `x_i`, `i` in 1..=3.
    pub fn coordinate(i: usize) -> Self {
        let mut k = [0u32; 3];
        k[i - 1] = 1;
        Self::from_terms([(k, Complex64::new(1.0, 0.0))])
    }

    pub fn add_term(&mut self, k: [u32; 3], c: Complex64) {
        let entry = self.terms.entry(k).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k[0] + k[1] + k[2]).max().unwrap_or(0)
    }

    /// Evaluates the ambient polynomial; no shell check.
    pub fn eval_ambient(&self, x: [f64; 3]) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| c * (x[0].powi(k[0] as i32) * x[1].powi(k[1] as i32) * x[2].powi(k[2] as i32)))
            .sum()
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<Complex64> {
        check_shell(x)?;
        Ok(self.eval_ambient(x))
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c.conj())))
    }

    pub fn re_part(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, Complex64::new(c.re, 0.0))))
    }

    pub fn im_part(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, Complex64::new(c.im, 0.0))))
    }

    /// Real coefficients imply a real function; the converse needs the shell relation, so
    /// this checks the canonical action-angle form instead.
    pub fn is_real(&self, tol: f64) -> bool {
        let aa = to_action_angle(self);
        let c = to_action_angle(&self.conj());
        aa.approx_eq(&c, tol)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(key, c)| (*key, c * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }

    /// Partial derivative in `x_i`, `i` in 0..3.
    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::new();
        for (k, c) in &self.terms {
            if k[i] > 0 {
                let mut kk = *k;
                kk[i] -= 1;
                out.add_term(kk, c * k[i] as f64);
            }
        }
        out
    }

    pub fn ambient_gradient(&self, x: [f64; 3]) -> [Complex64; 3] {
        [0, 1, 2].map(|i| self.partial(i).eval_ambient(x))
    }

    /// Lie-Poisson bracket `{g, h}(x) = x . (grad g x grad h)`, so `{x1, x2} = x3`.
    pub fn bracket(&self, other: &Self) -> Self {
        let g = [0, 1, 2].map(|i| self.partial(i));
        let h = [0, 1, 2].map(|i| other.partial(i));
        let mut out = Self::new();
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let cross = g[j].mul(&h[k]).add(&g[k].mul(&h[j]).scale(Complex64::new(-1.0, 0.0)));
            out = out.add(&Self::coordinate(i + 1).mul(&cross));
        }
        out
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn check_shell(x: [f64; 3]) -> Result<()> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if (r - SPHERE_RADIUS).abs() > 1e-9 {
        return Err(Error::SphereOffShell { radius: r });
    }
    Ok(())
}

/// Canonical form `f = sum_l w^l g_l(I)` for `l >= 0` and `conj(w)^|l| g_l(I)` for `l < 0`,
/// with `w = x1 + i x2` and action `I = x3 + 1/2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionAngle {
    modes: BTreeMap<i64, Poly>,
}

impl ActionAngle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_mode(&mut self, l: i64, g: &Poly) {
        let next = self.modes.get(&l).cloned().unwrap_or_default().add(g);
        if next.is_zero() {
            self.modes.remove(&l);
        } else {
            self.modes.insert(l, next);
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &Poly)> {
        self.modes.iter().map(|(l, g)| (*l, g))
    }

    pub fn mode(&self, l: i64) -> Option<&Poly> {
        self.modes.get(&l)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let keys: std::collections::BTreeSet<i64> = self.modes.keys().chain(other.modes.keys()).copied().collect();
        keys.into_iter().all(|l| {
            let a = self.modes.get(&l).cloned().unwrap_or_default();
            let b = other.modes.get(&l).cloned().unwrap_or_default();
            let n = a.coeffs().len().max(b.coeffs().len());
            (0..n).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol)
        })
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn to_action_angle(f: &SphereSymbol) -> ActionAngle {
    let action_minus_half = Poly::from_real(&[-0.5, 1.0]);
    let ww_bar = Poly::from_real(&[0.0, 1.0, -1.0]);
    let mut out = ActionAngle::new();
    for ([a, b, c], amp) in f.terms() {
        // x1 = (w + w̄)/2, x2 = -i (w - w̄)/2
        let pre = amp * Complex64::new(0.5, 0.0).powu(a) * Complex64::new(0.0, -0.5).powu(b);
        let x3_part = action_minus_half.pow(c);
        for r in 0..=a {
            for s in 0..=b {
                let sign = if (b - s) % 2 == 1 { -1.0 } else { 1.0 };
                let coef = pre * (binomial(a, r) * binomial(b, s) * sign);
                let p = r + s;
                let q = a + b - p;
                let l = p as i64 - q as i64;
                let g = ww_bar.pow(p.min(q)).mul(&x3_part).scale(coef);
                out.add_mode(l, &g);
            }
        }
    }
    out
}

pub fn from_action_angle(aa: &ActionAngle) -> SphereSymbol {
    let mut out = SphereSymbol::new();
    for (l, g) in aa.modes() {
        let n_l = l.unsigned_abs() as u32;
        let i_sign = if l >= 0 { 1.0 } else { -1.0 };
        for (n, gc) in g.coeffs().iter().enumerate() {
            if *gc == Complex64::new(0.0, 0.0) {
                continue;
            }
            let n = n as u32;
            // I^n = (x3 + 1/2)^n
            for t in 0..=n {
                let c_t = gc * (binomial(n, t) * 0.5f64.powi((n - t) as i32));
                // w^|l| = (x1 ± i x2)^|l|
                for u in 0..=n_l {
                    let c = c_t * binomial(n_l, u) * Complex64::new(0.0, i_sign).powu(n_l - u);
                    out.add_term([u, n_l - u, t], c);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn x3_is_action_minus_half() {
        let aa = to_action_angle(&SphereSymbol::coordinate(3));
        let g0 = aa.mode(0).unwrap();
        assert_eq!(g0.coeff(0), c(-0.5));
        assert_eq!(g0.coeff(1), c(1.0));
        assert_eq!(aa.modes().count(), 1);
    }

    #[test]
    fn w_is_mode_one() {
        let w = SphereSymbol::from_terms([([1, 0, 0], c(1.0)), ([0, 1, 0], Complex64::i())]);
        let aa = to_action_angle(&w);
        assert_eq!(aa.modes().count(), 1);
        let g1 = aa.mode(1).unwrap();
        assert!((g1.coeff(0) - c(1.0)).norm() < 1e-15);
        assert_eq!(g1.degree(), 0);
    }

    #[test]
    fn x1_squared_uses_shell_relation() {
        // x1^2 = (w^2 + 2 w w̄ + w̄^2)/4 and w w̄ = I(1-I)
        let aa = to_action_angle(&SphereSymbol::from_terms([([2, 0, 0], c(1.0))]));
        assert!((aa.mode(2).unwrap().coeff(0) - c(0.25)).norm() < 1e-15);
        assert!((aa.mode(-2).unwrap().coeff(0) - c(0.25)).norm() < 1e-15);
        let g0 = aa.mode(0).unwrap();
        assert!((g0.coeff(1) - c(0.5)).norm() < 1e-15);
        assert!((g0.coeff(2) - c(-0.5)).norm() < 1e-15);
    }

    #[test]
    fn off_shell_point_is_rejected() {
        let f = SphereSymbol::coordinate(3);
        assert!(matches!(f.eval([0.0, 0.0, 0.6]), Err(Error::SphereOffShell { .. })));
        assert_eq!(f.eval([0.0, 0.0, 0.5]).unwrap(), c(0.5));
    }
}
