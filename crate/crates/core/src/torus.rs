//! Berezin-Toeplitz matrices on the torus in the theta basis.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{content_hash, BTMatrix, CMatrix, Mode, Space};
use crate::symbol::{Symbol, TorusSymbol};

/// Builds `T^(N)` for `f`. Term `(l, m)` contributes to row `(j + l) mod N`, column `j`.
pub fn build_torus(f: &TorusSymbol, n: usize, mode: Mode) -> Result<BTMatrix> {
    if n < 1 {
        return Err(Error::BadDimension(n));
    }
    let nf = n as f64;
    let mut t = CMatrix::zeros(n, n);
    for ((l, m), c) in f.terms() {
        let damping = match mode {
            Mode::Exact => (-PI * ((l * l + m * m) as f64) / (2.0 * nf)).exp(),
            Mode::Leading => 1.0,
        };
        let shift = l.rem_euclid(n as i64) as usize;
        for j in 0..n {
            let phase = -PI * m as f64 * (2.0 * j as f64 + l as f64) / nf;
            t[((j + shift) % n, j)] += c * Complex64::from_polar(damping, phase);
        }
    }
    BTMatrix::new(t, Space::Torus, n, Symbol::Torus(f.clone()).content_id(), mode)
}

/// `F[k][j] = exp(-2 pi i k j / N)`, the change of basis from theta functions to their Fourier duals.
pub fn dft_change_of_basis(n: usize) -> CMatrix {
    let nf = n as f64;
    CMatrix::from_fn(n, n, |k, j| Complex64::from_polar(1.0, -2.0 * PI * ((k * j) % n.max(1)) as f64 / nf))
}

/// A 1-periodic coefficient function, given as a callback or as a uniform table.
#[derive(Clone)]
pub enum CoefficientFn {
    Callback(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
    /// Values at `i / len`, linearly interpolated with wrap-around.
    Table(Vec<Complex64>),
}

impl std::fmt::Debug for CoefficientFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoefficientFn::Callback(_) => f.write_str("Callback(..)"),
            CoefficientFn::Table(v) => write!(f, "Table({} points)", v.len()),
        }
    }
}

impl CoefficientFn {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        CoefficientFn::Callback(Arc::new(f))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| c)
    }

    /// Tabulates `f` on the default 1024-point grid.
    pub fn tabulate(f: impl Fn(f64) -> Complex64) -> Self {
        CoefficientFn::Table((0..1024).map(|i| f(i as f64 / 1024.0)).collect())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            CoefficientFn::Callback(f) => f(x.rem_euclid(1.0)),
            CoefficientFn::Table(v) if v.is_empty() => Complex64::default(),
            CoefficientFn::Table(v) => {
                let s = x.rem_euclid(1.0) * v.len() as f64;
                let i = (s.floor() as usize) % v.len();
                let frac = s - s.floor();
                v[i] * (1.0 - frac) + v[(i + 1) % v.len()] * frac
            }
        }
    }
}

/// Matrix with `T[j][(j + l) mod N] = f_l(j / N)`, accumulated over the keys `l`.
pub fn twisted_toeplitz(coeffs: &BTreeMap<i64, CoefficientFn>, n: usize) -> Result<BTMatrix> {
    if n < 1 {
        return Err(Error::BadDimension(n));
    }
    let mut t = CMatrix::zeros(n, n);
    let mut id = String::new();
    for (l, f) in coeffs {
        let shift = l.rem_euclid(n as i64) as usize;
        for j in 0..n {
            let v = f.eval(j as f64 / n as f64);
            t[(j, (j + shift) % n)] += v;
            id.push_str(&format!("{l}:{}:{};", v.re, v.im));
        }
    }
    BTMatrix::new(t, Space::Torus, n, content_hash(id.as_bytes()), Mode::Leading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::max_abs_diff;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scottish() -> TorusSymbol {
        TorusSymbol::from_terms([
            ((1, 0), c(1.0, 0.0)),
            ((-1, 0), c(1.0, 0.0)),
            ((0, 1), c(0.0, 1.0)),
            ((0, -1), c(0.0, 1.0)),
        ])
    }

    #[test]
    fn single_x_mode_is_a_damped_shift() {
        let t = build_torus(&TorusSymbol::mode(1, 0, c(1.0, 0.0)), 10, Mode::Exact).unwrap();
        let want = (-PI / 20.0).exp();
        assert_abs_diff_eq!(want, 0.85461, epsilon = 1e-4);
        for r in 0..10 {
            for col in 0..10 {
                let v = t.entries()[(r, col)];
                if r == (col + 1) % 10 {
                    assert_abs_diff_eq!(v.re, want, epsilon = 1e-15);
                    assert_eq!(v.im, 0.0);
                } else {
                    assert_eq!(v, Complex64::default());
                }
            }
        }
    }

    #[test]
    fn constant_symbol_gives_identity() {
        for n in [1, 2, 7, 32] {
            let t = build_torus(&TorusSymbol::constant(c(1.0, 0.0)), n, Mode::Exact).unwrap();
            assert_eq!(t.entries(), &CMatrix::identity(n, n));
        }
        assert!(matches!(build_torus(&TorusSymbol::constant(c(1.0, 0.0)), 0, Mode::Exact), Err(Error::BadDimension(0))));
    }

    #[test]
    fn y_only_symbol_gives_theta_eigenvalues() {
        let a = [(0i64, c(0.5, 0.0)), (1, c(0.2, -0.1)), (-2, c(1.0, 0.3))];
        let f = TorusSymbol::from_terms(a.iter().map(|&(m, v)| ((0, m), v)));
        let n = 12;
        let t = build_torus(&f, n, Mode::Exact).unwrap();
        for j in 0..n {
            let lam: Complex64 = a
                .iter()
                .map(|&(m, v)| {
                    v * (-PI * (m * m) as f64 / (2.0 * n as f64)).exp()
                        * Complex64::from_polar(1.0, -2.0 * PI * (m * j as i64) as f64 / n as f64)
                })
                .sum();
            assert!((t.entries()[(j, j)] - lam).norm() < 1e-14);
            for k in 0..n {
                if k != j {
                    assert_eq!(t.entries()[(j, k)], Complex64::default());
                }
            }
        }
    }

    #[test]
    fn dft_small_cases() {
        assert_eq!(dft_change_of_basis(1), CMatrix::from_element(1, 1, c(1.0, 0.0)));
        let f2 = dft_change_of_basis(2);
        let want = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(max_abs_diff(&f2, &want) < 1e-15);
        let f8 = dft_change_of_basis(8);
        let id = &f8 * f8.adjoint() / c(8.0, 0.0);
        assert!(max_abs_diff(&id, &CMatrix::identity(8, 8)) < 1e-12);
    }

    #[test]
    fn x_only_symbol_is_diagonalized_by_dft() {
        let f = TorusSymbol::from_terms([((1, 0), c(1.0, 0.5)), ((-3, 0), c(0.25, 0.0)), ((2, 0), c(0.0, -1.0))]);
        for n in [8, 13] {
            let t = build_torus(&f, n, Mode::Exact).unwrap();
            let dft = dft_change_of_basis(n);
            let conj = &dft * t.entries() * dft.adjoint() / c(n as f64, 0.0);
            for r in 0..n {
                for col in 0..n {
                    if r != col {
                        assert!(conj[(r, col)].norm() <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn exact_and_leading_agree_to_order_one_over_n() {
        let f = scottish().add(&TorusSymbol::mode(1, 1, c(0.3, 0.2)));
        let levels = [16usize, 32, 64, 128];
        let diffs: Vec<f64> = levels
            .iter()
            .map(|&n| {
                let e = build_torus(&f, n, Mode::Exact).unwrap();
                let l = build_torus(&f, n, Mode::Leading).unwrap();
                max_abs_diff(e.entries(), l.entries())
            })
            .collect();
        for w in diffs.windows(2) {
            assert!(w[1] < w[0]);
        }
        let xs: Vec<f64> = levels.iter().map(|&n| (n as f64).ln()).collect();
        let ys: Vec<f64> = diffs.iter().map(|d| d.ln()).collect();
        let fit = crate::fit::linear_fit(&xs, &ys);
        assert!(fit.slope <= -0.9, "slope {}", fit.slope);
    }

    #[test]
    fn twisted_toeplitz_examples() {
        let mut map = BTreeMap::new();
        map.insert(0, CoefficientFn::new(|x| c(x, 0.0)));
        let t = twisted_toeplitz(&map, 4).unwrap();
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.0, 0.0),
            c(0.25, 0.0),
            c(0.5, 0.0),
            c(0.75, 0.0),
        ]));
        assert!(max_abs_diff(t.entries(), &want) < 1e-15);

        let mut zero = BTreeMap::new();
        zero.insert(3, CoefficientFn::constant(Complex64::default()));
        assert!(twisted_toeplitz(&zero, 5).unwrap().entries().iter().all(|v| *v == Complex64::default()));
    }

    #[test]
    fn scottish_flag_matches_leading_mode() {
        let n = 8;
        let mut map = BTreeMap::new();
        map.insert(1, CoefficientFn::constant(c(1.0, 0.0)));
        map.insert(n as i64 - 1, CoefficientFn::constant(c(1.0, 0.0)));
        map.insert(0, CoefficientFn::new(|x| c(0.0, 2.0 * (2.0 * PI * x).cos())));
        let t = twisted_toeplitz(&map, n).unwrap();
        let b = build_torus(&scottish(), n, Mode::Leading).unwrap();
        assert!(max_abs_diff(t.entries(), b.entries()) < 1e-14);

        let mut tab = BTreeMap::new();
        tab.insert(1, CoefficientFn::tabulate(|_| c(1.0, 0.0)));
        tab.insert(-1, CoefficientFn::tabulate(|_| c(1.0, 0.0)));
        tab.insert(0, CoefficientFn::tabulate(|x| c(0.0, 2.0 * (2.0 * PI * x).cos())));
        let tt = twisted_toeplitz(&tab, n).unwrap();
        assert!(max_abs_diff(tt.entries(), b.entries()) < 1e-12);
    }

    #[test]
    fn table_interpolation_is_periodic() {
        let f = CoefficientFn::Table(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!(f.eval(0.25).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(0.75).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(1.5).re, 1.0, epsilon = 1e-15);
    }

    fn arb_symbol() -> impl Strategy<Value = TorusSymbol> {
        prop::collection::vec(((-3i64..=3, -3i64..=3), (-2.0f64..2.0, -2.0f64..2.0)), 1..6)
            .prop_map(|v| TorusSymbol::from_terms(v.into_iter().map(|(k, (a, b))| (k, c(a, b)))))
    }

    proptest! {
        #[test]
        fn real_symbol_gives_hermitian(f in arb_symbol(), n in 1usize..24) {
            let re = f.re_part();
            let t = build_torus(&re, n, Mode::Exact).unwrap();
            prop_assert!(max_abs_diff(t.entries(), &t.entries().adjoint()) <= 1e-12);
        }

        #[test]
        fn adjoint_covariance(f in arb_symbol(), n in 1usize..24) {
            let a = build_torus(&f.conj(), n, Mode::Exact).unwrap();
            let b = build_torus(&f, n, Mode::Exact).unwrap();
            prop_assert!(max_abs_diff(a.entries(), b.adjoint().entries()) <= 1e-12);
        }

        #[test]
        fn single_mode_occupies_one_wrapped_diagonal(l in -5i64..5, m in -5i64..5, n in 1usize..20) {
            let t = build_torus(&TorusSymbol::mode(l, m, c(1.0, 0.0)), n, Mode::Exact).unwrap();
            let shift = l.rem_euclid(n as i64) as usize;
            for r in 0..n {
                for col in 0..n {
                    let v = t.entries()[(r, col)];
                    if r == (col + shift) % n {
                        prop_assert!(v.norm() > 0.0);
                    } else {
                        prop_assert_eq!(v, Complex64::default());
                    }
                }
            }
        }
    }
}
