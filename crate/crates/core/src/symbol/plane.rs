use num_complex::Complex64;

/// Affine symbol `f(z) = mu z + nu conj(z) + kappa` on the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlaneSymbol {
    pub mu: Complex64,
    pub nu: Complex64,
    pub kappa: Complex64,
}

impl PlaneSymbol {
    pub fn new(mu: Complex64, nu: Complex64, kappa: Complex64) -> Self {
        PlaneSymbol { mu, nu, kappa }
    }

    /// `mu z + conj(z)`, the symbol of the tridiagonal disk model.
    pub fn model(mu: f64) -> Self {
        PlaneSymbol::new(Complex64::new(mu, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn constant(kappa: Complex64) -> Self {
        PlaneSymbol { kappa, ..Default::default() }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.mu * z + self.nu * z.conj() + self.kappa
    }

    pub fn conj(&self) -> Self {
        PlaneSymbol { mu: self.nu.conj(), nu: self.mu.conj(), kappa: self.kappa.conj() }
    }

    pub fn re_part(&self) -> Self {
        let c = self.conj();
        PlaneSymbol { mu: (self.mu + c.mu) * 0.5, nu: (self.nu + c.nu) * 0.5, kappa: (self.kappa + c.kappa) * 0.5 }
    }

    pub fn im_part(&self) -> Self {
        let c = self.conj();
        let k = Complex64::new(0.0, -0.5);
        PlaneSymbol { mu: (self.mu - c.mu) * k, nu: (self.nu - c.nu) * k, kappa: (self.kappa - c.kappa) * k }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        PlaneSymbol { mu: self.mu * k, nu: self.nu * k, kappa: self.kappa * k }
    }

    pub fn add(&self, o: &Self) -> Self {
        PlaneSymbol { mu: self.mu + o.mu, nu: self.nu + o.nu, kappa: self.kappa + o.kappa }
    }

    /// `(d/dx, d/dy)` with `z = x + i y`.
    pub fn gradient(&self) -> [Complex64; 2] {
        [self.mu + self.nu, Complex64::i() * (self.mu - self.nu)]
    }

    /// Bracket of two affine symbols is the constant `2i (mu_h nu_g - mu_g nu_h)`.
    pub fn bracket(&self, other: &Self) -> Self {
        let value = Complex64::new(0.0, 2.0) * (other.mu * self.nu - self.mu * other.nu);
        PlaneSymbol::constant(value)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        (self.mu - self.nu.conj()).norm() <= tol && self.kappa.im.abs() <= tol
    }
}
