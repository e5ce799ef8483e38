//! Berezin-Toeplitz matrices on the sphere in the standard `|j, N>` basis, `j = 0..=N`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{content_hash, BTMatrix, CMatrix, Mode, Space};
use crate::poly::Poly;
use crate::symbol::{to_action_angle, SphereSymbol, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Raising,
    Lowering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderSpec {
    pub n: usize,
    pub direction: Direction,
}

/// `m_j = sqrt(j (N - j + 1))` placed at `(j - 1, j)` for lowering and `(j, j - 1)` for raising.
pub fn ladder_matrix(spec: LadderSpec) -> CMatrix {
    let n = spec.n;
    let mut out = CMatrix::zeros(n + 1, n + 1);
    for j in 1..=n {
        let m = ((j * (n - j + 1)) as f64).sqrt();
        match spec.direction {
            Direction::Lowering => out[(j - 1, j)] = Complex64::new(m, 0.0),
            Direction::Raising => out[(j, j - 1)] = Complex64::new(m, 0.0),
        }
    }
    out
}

/// `diag(g(j / (N + 1)))` for `j = 0..=N`.
pub fn diagonal_calculus(g: &Poly, n: usize) -> CMatrix {
    let vals: Vec<Complex64> = (0..=n).map(|j| g.eval_real(j as f64 / (n + 1) as f64)).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals))
}

/// `J3 = diag(j - N/2)`, so that `[J+, J-] = 2 J3`.
pub fn j3(n: usize) -> CMatrix {
    let vals: Vec<Complex64> = (0..=n).map(|j| Complex64::new(j as f64 - n as f64 / 2.0, 0.0)).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vals))
}

/// `sum_l ((1/N) J_sgn(l))^|l| diag(g_l)` over the action-angle modes of `f`.
pub fn build_sphere(f: &SphereSymbol, n: usize) -> Result<BTMatrix> {
    let aa = to_action_angle(f);
    let dim = n + 1;
    let scale = if n == 0 { 0.0 } else { 1.0 / n as f64 };
    let lower = ladder_matrix(LadderSpec { n, direction: Direction::Lowering }) * Complex64::new(scale, 0.0);
    let raise = lower.transpose();
    let mut out = CMatrix::zeros(dim, dim);
    for (l, g) in aa.modes() {
        let ladder = if l > 0 { &lower } else { &raise };
        let mut term = diagonal_calculus(g, n);
        for _ in 0..l.unsigned_abs() {
            term = ladder * term;
        }
        out += term;
    }
    if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ConversionFailure("non-finite action-angle coefficient".into()));
    }
    BTMatrix::new(out, Space::Sphere, n, Symbol::Sphere(f.clone()).content_id(), Mode::Exact)
}

/// The symbol `F_A = i sinh(t) x1 + cosh(t) x3`.
pub fn linear_symbol(t: f64) -> SphereSymbol {
    SphereSymbol::from_terms([([1, 0, 0], Complex64::new(0.0, t.sinh())), ([0, 0, 1], Complex64::new(t.cosh(), 0.0))])
}

/// `(cosh(t) J3 + i sinh(t) J1) / (N + 1)` with `J1 = (J+ + J-)/2`: the spin-`N/2` image of
/// the matrix `cosh(t) s3 + i sinh(t) s1`, whose symbol is `F_A`.
pub fn linear_hamiltonian(t: f64, n: usize) -> Result<BTMatrix> {
    let lower = ladder_matrix(LadderSpec { n, direction: Direction::Lowering });
    let j1 = (&lower + lower.transpose()) * Complex64::new(0.5, 0.0);
    let m = (j3(n) * Complex64::new(t.cosh(), 0.0) + j1 * Complex64::new(0.0, t.sinh()))
        / Complex64::new((n + 1) as f64, 0.0);
    let id = format!("linear:{}", Symbol::Sphere(linear_symbol(t)).content_id());
    BTMatrix::new(m, Space::Sphere, n, content_hash(id.as_bytes()), Mode::Exact)
}
