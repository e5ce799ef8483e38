//! The unit-disk model: degree-`<= N` cutoff of Bargmann space, the tridiagonal model
//! operator and squeezed coherent states. Coefficients are taken in the orthonormal basis
//! `|k> = N^((k+1)/2) z^k / sqrt(k!)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::{ln_factorial, lower_ratio};
use crate::matrix::{BTMatrix, CMatrix, Mode, Space};
use crate::symbol::{PlaneSymbol, Symbol};

const TAIL_REL: f64 = 1e-14;
const MAX_TERMS: usize = 200_000;

/// Quantization of `mu z + nu conj(z) + kappa`: `z` acts by raising, `conj(z)` by `(1/N) d/dz`.
pub fn disk_quantize(f: &PlaneSymbol, n: usize) -> Result<BTMatrix> {
    if n < 1 {
        return Err(Error::BadDimension(n));
    }
    let mut t = CMatrix::identity(n + 1, n + 1) * f.kappa;
    for k in 1..=n {
        let s = (k as f64 / n as f64).sqrt();
        t[(k - 1, k)] += f.nu * s;
        t[(k, k - 1)] += f.mu * s;
    }
    BTMatrix::new(t, Space::PlaneDisk, n, Symbol::Plane(*f).content_id(), Mode::Exact)
}

/// `P_N` for `Q = (1/N) d/dz + mu z`, with symbol `mu z + conj(z)`.
pub fn model_matrix(mu: f64, n: usize) -> Result<BTMatrix> {
    disk_quantize(&PlaneSymbol::model(mu), n)
}

/// Coefficients of `phi_{mu, z0}`, truncated where the Gaussian tail is negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedState {
    pub n: usize,
    pub mu: f64,
    pub z0: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl SqueezedState {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// The eigenvalue `f(z0) = mu z0 + conj(z0)`.
    pub fn lambda(&self) -> Complex64 {
        self.z0 * self.mu + self.z0.conj()
    }
}

pub fn squeezed_coefficients(mu: f64, z0: Complex64, n: usize) -> Result<SqueezedState> {
    if mu.abs() >= 1.0 || !mu.is_finite() {
        return Err(Error::NotNormalizable(mu.abs()));
    }
    if n < 1 {
        return Err(Error::BadDimension(n));
    }
    let nf = n as f64;
    let b = (z0.conj() + z0 * mu) * nf.sqrt();
    // prefactor exp(-N|z0|^2/2 - N mu z0^2/2), kept as log
    let ln_pref = -nf * z0.norm_sqr() / 2.0 - nf * mu * (z0 * z0) / 2.0;
    // mantissas with a running log scale so that d_k = m_k exp(scale_k)
    let mut mant: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
    let mut scale: Vec<f64> = vec![0.0];
    let mut prev2 = Complex64::default();
    let mut prev1 = Complex64::new(1.0, 0.0);
    let mut cur_scale = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut small_run = 0;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let next = b * prev1 / kf.sqrt() - prev2 * (mu * ((kf - 1.0) / kf).sqrt());
        prev2 = prev1;
        prev1 = next;
        let m = prev1.norm();
        if m > 1e150 {
            prev1 /= 1e150;
            prev2 /= 1e150;
            cur_scale += 150.0 * std::f64::consts::LN_10;
        } else if m > 0.0 && m < 1e-150 && prev2.norm() < 1e-150 {
            prev1 *= 1e150;
            prev2 *= 1e150;
            cur_scale -= 150.0 * std::f64::consts::LN_10;
        }
        mant.push(prev1);
        scale.push(cur_scale);
        let log_mag = if prev1.norm() > 0.0 { prev1.norm().ln() + cur_scale } else { f64::NEG_INFINITY };
        best = best.max(log_mag);
        if log_mag < best + TAIL_REL.ln() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if (k > n && small_run >= 3) || (prev1 == Complex64::default() && prev2 == Complex64::default() && k > n) {
            break;
        }
        k += 1;
        if k > MAX_TERMS {
            return Err(Error::numerical(format!("squeezed state tail did not decay by k = {MAX_TERMS}")));
        }
    }
    let coeffs = mant
        .iter()
        .zip(&scale)
        .map(|(m, s)| if *m == Complex64::default() { *m } else { m * (ln_pref + s).exp() })
        .collect::<Vec<_>>();
    if coeffs.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::numerical("squeezed state coefficients overflowed"));
    }
    Ok(SqueezedState { n, mu, z0, coeffs })
}

/// `Theta_N` in coefficient space: the first `N + 1` coefficients and the norm of the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProjection {
    pub head: Vec<Complex64>,
    pub tail_norm: f64,
}

pub fn project_theta(state: &SqueezedState) -> ThetaProjection {
    project_coefficients(&state.coeffs, state.n)
}

pub fn project_coefficients(coeffs: &[Complex64], n: usize) -> ThetaProjection {
    let cut = (n + 1).min(coeffs.len());
    let mut head = coeffs[..cut].to_vec();
    head.resize(n + 1, Complex64::default());
    let tail_norm = coeffs[cut..].iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    ThetaProjection { head, tail_norm }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualCheck {
    /// `||(P_N - lambda) Theta_N phi||`
    pub direct: f64,
    /// `|mu a_{N-1} - lambda a_N|`
    pub formula: f64,
    /// `||Theta_N phi||`
    pub head_norm: f64,
}

impl ResidualCheck {
    /// Equal to `1e-9` relative, or to `1e-14` absolute when both sides are below `1e-12`.
    pub fn agrees(&self) -> bool {
        let (a, b) = (self.direct, self.formula);
        if a < 1e-12 && b < 1e-12 {
            (a - b).abs() <= 1e-14
        } else {
            (a - b).abs() <= 1e-9 * a.max(b)
        }
    }
}

pub fn residual_identity_check(mu: f64, z0: Complex64, n: usize) -> Result<ResidualCheck> {
    let state = squeezed_coefficients(mu, z0, n)?;
    let proj = project_theta(&state);
    let lam = state.lambda();
    let p = model_matrix(mu, n)?;
    let v = nalgebra::DVector::from_vec(proj.head.clone());
    let r = p.entries() * &v - &v * lam;
    let a = |k: usize| proj.head[k];
    let formula = (a(n - 1) * mu - a(n) * lam).norm();
    Ok(ResidualCheck { direct: r.norm(), formula, head_norm: v.norm() })
}

/// The reproducing kernel `phi_w(z) = N exp(N z conj(w))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentState {
    pub n: usize,
    pub w: Complex64,
}

impl CoherentState {
    pub fn new(w: Complex64, n: usize) -> Self {
        CoherentState { n, w }
    }

    /// `a_k = sqrt(N) (sqrt(N) conj(w))^k / sqrt(k!)`, from log magnitudes.
    pub fn coefficient(&self, k: usize) -> Complex64 {
        let nf = self.n as f64;
        let wb = self.w.conj();
        if wb == Complex64::default() {
            return if k == 0 { Complex64::new(nf.sqrt(), 0.0) } else { Complex64::default() };
        }
        let ln_mag = 0.5 * nf.ln() + k as f64 * (0.5 * nf.ln() + wb.norm().ln()) - 0.5 * ln_factorial(k as u64);
        Complex64::from_polar(ln_mag.exp(), k as f64 * wb.arg())
    }

    pub fn coefficients(&self, count: usize) -> Vec<Complex64> {
        (0..count).map(|k| self.coefficient(k)).collect()
    }

    /// `ln ||phi_w||^2 = ln N + N |w|^2`.
    pub fn ln_norm_sq(&self) -> f64 {
        (self.n as f64).ln() + self.n as f64 * self.w.norm_sqr()
    }

    /// Fraction of `||phi_w||^2` outside the cutoff space: `1 - Gamma(N+1, N|w|^2)/N!`.
    pub fn tail_fraction(&self) -> f64 {
        lower_ratio(self.n as u64 + 1, self.n as f64 * self.w.norm_sqr())
    }

    /// `||(1 - Theta_N) phi_w||^2 / ||phi_w||^2` by summing coefficients past `N` until negligible.
    pub fn tail_fraction_direct(&self) -> f64 {
        let ln_total = self.ln_norm_sq();
        let mut acc = 0.0;
        let mut k = self.n + 1;
        loop {
            let term = (2.0 * self.coefficient(k).norm().ln() - ln_total).exp();
            acc += term;
            if term <= acc * 1e-18 || term == 0.0 {
                break;
            }
            k += 1;
        }
        acc
    }

    /// Right side of the cutoff estimate divided by `||phi_w||^2`:
    /// `((1 + delta)/sqrt(2 pi)) |w|^2 sqrt(N) exp(-N (1 - |w|^2)^2 / 2)`.
    pub fn tail_bound_fraction(&self, delta: f64) -> f64 {
        let s = self.w.norm_sqr();
        let nf = self.n as f64;
        (1.0 + delta) / (2.0 * std::f64::consts::PI).sqrt() * s * nf.sqrt() * (-nf * (1.0 - s).powi(2) / 2.0).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn model_matrix_small() {
        let t = model_matrix(0.5, 2).unwrap();
        let e = t.entries();
        assert_eq!(t.n(), 3);
        assert_abs_diff_eq!(e[(0, 1)].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 2)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 0)].re, 0.5 * 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(e[(2, 1)].re, 0.5, epsilon = 1e-15);
        for k in 0..3 {
            assert_eq!(e[(k, k)], Complex64::default());
        }
    }

    #[test]
    fn nilpotent_when_mu_vanishes() {
        let t = model_matrix(0.0, 10).unwrap();
        let mut p = t.entries().clone();
        for _ in 0..10 {
            p = &p * t.entries();
        }
        assert!(p.iter().all(|z| z.norm() == 0.0));
        let eig = crate::spectral::eigenvalues(&t).unwrap();
        assert!(eig.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn origin_state_is_a_single_coefficient() {
        let s = squeezed_coefficients(0.0, c(0.0, 0.0), 12).unwrap();
        assert_abs_diff_eq!(s.coeffs[0].re, 1.0, epsilon = 1e-15);
        assert!(s.coeffs[1..].iter().all(|a| a.norm() == 0.0));
        let r = residual_identity_check(0.0, c(0.0, 0.0), 12).unwrap();
        assert_eq!(r.direct, 0.0);
        assert_eq!(r.formula, 0.0);
    }

    #[test]
    fn squeezed_state_rejects_large_mu() {
        assert!(matches!(squeezed_coefficients(1.0, c(0.0, 0.0), 5), Err(Error::NotNormalizable(_))));
        assert!(matches!(squeezed_coefficients(-1.3, c(0.0, 0.0), 5), Err(Error::NotNormalizable(_))));
    }

    #[test]
    fn squeezed_state_matches_taylor_coefficients() {
        // oracle: Taylor coefficients of exp(beta z - gamma z^2 / 2) by the Cauchy product of the two series
        let (mu, z0, n) = (0.5, c(0.3, 0.2), 6usize);
        let nf = n as f64;
        let beta = (z0.conj() + z0 * mu) * nf;
        let gamma = nf * mu;
        let s = squeezed_coefficients(mu, z0, n).unwrap();
        let pref = (-(nf * z0.norm_sqr()) / 2.0 - z0 * z0 * (nf * mu / 2.0)).exp() * nf.sqrt();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        for k in 0..8 {
            let mut ck = Complex64::default();
            for p in 0..=k / 2 {
                let q = k - 2 * p;
                ck += beta.powu(q as u32) / fact(q) * (-gamma / 2.0).powi(p as i32) / fact(p);
            }
            let want = pref * ck * fact(k).sqrt() / nf.powf((k as f64 + 1.0) / 2.0);
            assert!((s.coeffs[k] - want).norm() <= 1e-12 * want.norm().max(1e-3), "k = {k}");
        }
    }

    #[test]
    fn squeezed_norm_is_universal() {
        let a = squeezed_coefficients(0.5, c(0.0, 0.0), 40).unwrap().norm();
        let b = squeezed_coefficients(0.5, c(0.3, 0.2), 40).unwrap().norm();
        assert_relative_eq!(a, b, max_relative = 1e-8);
        assert_relative_eq!(a * a, 1.0 / (1.0f64 - 0.25).sqrt(), max_relative = 1e-10);
        let far = squeezed_coefficients(0.5, c(0.6, -0.5), 400).unwrap().norm();
        assert_relative_eq!(a, far, max_relative = 1e-6);
    }

    #[test]
    fn squeezed_tail_is_negligible() {
        let s = squeezed_coefficients(0.7, c(0.5, 0.1), 80).unwrap();
        let max = s.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        assert!(s.coeffs.last().unwrap().norm() <= 1e-14 * max);
        assert!(s.coeffs.len() >= 82);
    }

    #[test]
    fn residual_identity_at_origin() {
        let r = residual_identity_check(0.5, c(0.0, 0.0), 30).unwrap();
        assert!(r.agrees());
        assert!(r.direct <= 1e-3);
    }

    #[test]
    fn projection_is_pythagorean() {
        let s = squeezed_coefficients(0.5, c(0.7, 0.3), 20).unwrap();
        let p = project_theta(&s);
        let head: f64 = p.head.iter().map(|a| a.norm_sqr()).sum();
        assert_relative_eq!(head + p.tail_norm.powi(2), s.norm().powi(2), max_relative = 1e-12);
        let short = project_coefficients(&[c(1.0, 0.0), c(0.5, 0.0)], 4);
        assert_eq!(short.tail_norm, 0.0);
        assert_eq!(short.head.len(), 5);
    }

    #[test]
    fn coherent_norm_identity() {
        for (n, w) in [(10usize, c(0.3, 0.1)), (50, c(-0.6, 0.4)), (200, c(0.0, 0.9))] {
            let s = CoherentState::new(w, n);
            // direct log-sum-exp over all coefficients
            let logs: Vec<f64> = (0..n * 10).map(|k| 2.0 * s.coefficient(k).norm().ln()).collect();
            let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let direct = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
            assert_relative_eq!(direct, s.ln_norm_sq(), max_relative = 1e-10);
        }
    }

    #[test]
    fn reproducing_property() {
        let n = 17usize;
        for z in [c(0.3, 0.1), c(-0.5, 0.6), c(0.05, -0.8)] {
            let phi = CoherentState::new(z, n);
            for k in 0..=5usize {
                // z^k has the single coefficient sqrt(k!) / N^((k+1)/2) on |k>
                let psi_k = (ln_factorial(k as u64) / 2.0 - (k as f64 + 1.0) / 2.0 * (n as f64).ln()).exp();
                let inner = phi.coefficient(k).conj() * psi_k;
                let want = z.powu(k as u32);
                assert!((inner - want).norm() <= 1e-9 * want.norm().max(1e-300), "k = {k}");
            }
        }
    }

    #[test]
    fn tail_fraction_matches_direct_sum() {
        for n in [25usize, 50, 100] {
            for r in [0.2, 0.5, 0.8] {
                let s = CoherentState::new(c(r, 0.0), n);
                assert_relative_eq!(s.tail_fraction(), s.tail_fraction_direct(), max_relative = 1e-10);
            }
        }
        let s = CoherentState::new(c(0.6 * 0.6f64.cos(), 0.6 * 0.6f64.sin()), 50);
        assert_relative_eq!(s.tail_fraction(), s.tail_fraction_direct(), max_relative = 1e-10);
    }

    #[test]
    fn disk_quantize_is_affine_and_adjoint_covariant() {
        let f = PlaneSymbol::new(c(0.3, 0.1), c(-0.5, 0.2), c(1.0, -1.0));
        let a = disk_quantize(&f.conj(), 9).unwrap();
        let b = disk_quantize(&f, 9).unwrap().adjoint();
        assert!(crate::matrix::max_abs_diff(a.entries(), b.entries()) < 1e-15);
        assert!(disk_quantize(&f, 0).is_err());
    }

    #[test]
    fn residual_identity_on_random_centers() {
        // twenty fixed pseudo-random (mu, z0) with |mu| <= 0.8 and |z0| <= 0.9
        let mut s = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let mu = 1.6 * next() - 0.8;
            let z0 = Complex64::from_polar(0.9 * next().sqrt(), std::f64::consts::TAU * next());
            let chk = residual_identity_check(mu, z0, 30).unwrap();
            assert!(chk.agrees(), "mu = {mu}, z0 = {z0}: {chk:?}");
        }
    }

    proptest! {
        #[test]
        fn residual_identity_up_to_rounding(
            mu in -0.8f64..0.8,
            r in 0.0f64..0.9,
            theta in 0.0f64..std::f64::consts::TAU,
            n in 5usize..80,
        ) {
            let z0 = Complex64::from_polar(r, theta);
            let chk = residual_identity_check(mu, z0, n).unwrap();
            // rows below N cancel only up to the rounding of the coefficients
            let floor = 1e-15 * chk.head_norm * (n as f64).sqrt();
            prop_assert!((chk.direct - chk.formula).abs() <= 1e-9 * chk.direct.max(chk.formula) + floor);
        }
    }
}
