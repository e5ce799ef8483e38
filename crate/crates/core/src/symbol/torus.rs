use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

/// Trigonometric polynomial `f(x, y) = sum c[l, m] exp(2 pi i (l x + m y))` on `[0,1)^2`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TorusSymbol {
    terms: BTreeMap<(i64, i64), Complex64>,
}

impl TorusSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), Complex64)>>(terms: I) -> Self {
        let mut s = Self::new();
        for (k, c) in terms {
            s.add_term(k.0, k.1, c);
        }
        s
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    /// Single Fourier mode `c exp(2 pi i (l x + m y))`.
    pub fn mode(l: i64, m: i64, c: Complex64) -> Self {
        Self::from_terms([((l, m), c)])
    }

    pub fn add_term(&mut self, l: i64, m: i64, c: Complex64) {
        let entry = self.terms.entry((l, m)).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&(l, m));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, *c))
    }

    pub fn coefficient(&self, l: i64, m: i64) -> Complex64 {
        self.terms.get(&(l, m)).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(l, m), c)| c * Complex64::from_polar(1.0, 2.0 * PI * (l as f64 * x + m as f64 * y)))
            .sum()
    }

    /// `c[-l,-m] == conj(c[l,m])` for every mode, up to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms.iter().all(|(&(l, m), c)| (self.coefficient(-l, -m).conj() - c).norm() <= tol)
    }

    pub fn conj(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(l, m), c)| ((-l, -m), c.conj())))
    }

    pub fn re_part(&self) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let mut out = self.scale(half);
        for ((l, m), c) in self.conj().terms() {
            out.add_term(l, m, c * half);
        }
        out
    }

    pub fn im_part(&self) -> Self {
        let k = Complex64::new(0.0, -0.5);
        let mut out = self.scale(k);
        for ((l, m), c) in self.conj().terms() {
            out.add_term(l, m, -c * k);
        }
        out
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|(&key, c)| (key, c * k)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, m), c) in other.terms() {
            out.add_term(l, m, c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (&(l1, m1), c1) in &self.terms {
            for (&(l2, m2), c2) in &other.terms {
                out.add_term(l1 + l2, m1 + m2, c1 * c2);
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(&(l, m), c)| ((l, m), c * Complex64::new(0.0, 2.0 * PI * l as f64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms.iter().map(|(&(l, m), c)| ((l, m), c * Complex64::new(0.0, 2.0 * PI * m as f64))),
        )
    }

    /// `{g, h} = g_x h_y - g_y h_x` with `{x, y} = 1`.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (&(l1, m1), c1) in &self.terms {
            for (&(l2, m2), c2) in &other.terms {
                let w = -4.0 * PI * PI * (l1 * m2 - m1 * l2) as f64;
                if w != 0.0 {
                    out.add_term(l1 + l2, m1 + m2, c1 * c2 * w);
                }
            }
        }
        out
    }

    /// Largest absolute Fourier amplitude.
    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
