use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{PlaneSymbol, SphereSymbol, Symbol, TorusSymbol};
use crate::error::{Error, Result};

/// One coefficient of a symbol file. `k` is `[l, m]` for the torus, the exponent triple
/// for the sphere, and `[0]`, `[1]`, `[2]` for the `z`, `conj(z)` and constant parts on the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub space: String,
    pub terms: Vec<TermJson>,
}

impl SymbolJson {
    pub fn from_symbol(f: &Symbol) -> Self {
        let term = |k: Vec<i64>, c: Complex64| TermJson { k, re: c.re, im: c.im };
        let terms = match f {
            Symbol::Torus(t) => t.terms().map(|((l, m), c)| term(vec![l, m], c)).collect(),
            Symbol::Sphere(s) => s.terms().map(|(e, c)| term(e.iter().map(|&v| v as i64).collect(), c)).collect(),
            Symbol::Plane(p) => [p.mu, p.nu, p.kappa]
                .into_iter()
                .enumerate()
                .filter(|(_, c)| *c != Complex64::default())
                .map(|(i, c)| term(vec![i as i64], c))
                .collect(),
        };
        SymbolJson { space: f.space_name().to_string(), terms }
    }

    pub fn to_symbol(&self) -> Result<Symbol> {
        let mut out = match self.space.as_str() {
            "torus" => Symbol::Torus(TorusSymbol::new()),
            "sphere" => Symbol::Sphere(SphereSymbol::new()),
            "plane" => Symbol::Plane(PlaneSymbol::default()),
            other => return Err(Error::invalid(format!("unknown space '{other}'"))),
        };
        for t in &self.terms {
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(Error::invalid("non-finite coefficient"));
            }
            let c = Complex64::new(t.re, t.im);
            match &mut out {
                Symbol::Torus(s) => match t.k.as_slice() {
                    [l, m] => s.add_term(*l, *m, c),
                    _ => return Err(Error::invalid("torus terms need k = [l, m]")),
                },
                Symbol::Sphere(s) => match t.k.as_slice() {
                    [a, b, d] if *a >= 0 && *b >= 0 && *d >= 0 => {
                        let e = [*a, *b, *d].map(|v| u32::try_from(v).unwrap_or(u32::MAX));
                        if e.iter().any(|&v| v > 64) {
                            return Err(Error::invalid("sphere exponent too large"));
                        }
                        s.add_term(e, c)
                    }
                    _ => return Err(Error::invalid("sphere terms need k = [a, b, c] with a, b, c >= 0")),
                },
                Symbol::Plane(p) => match t.k.as_slice() {
                    [0] => p.mu += c,
                    [1] => p.nu += c,
                    [2] => p.kappa += c,
                    _ => return Err(Error::invalid("plane terms need k = [0], [1] or [2]")),
                },
            }
        }
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Symbol> {
        let j: SymbolJson = serde_json::from_str(text).map_err(|e| Error::invalid(format!("symbol json: {e}")))?;
        j.to_symbol()
    }
}
