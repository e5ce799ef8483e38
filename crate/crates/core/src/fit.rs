//! Least-squares scaling fits over level sweeps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values below this are treated as numerical zero and left out of fits.
pub const FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return LinearFit { slope: 0.0, intercept: ys.first().copied().unwrap_or(0.0), r2: 0.0 };
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (dx, dy) = (xs[i] - mx, ys[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return LinearFit { slope: 0.0, intercept: my, r2: 0.0 };
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    LinearFit { slope, intercept: my - slope * mx, r2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// `log value` against `log N`.
    Loglog,
    /// `log value` against `N`.
    Semilog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A measured quantity across levels together with its fitted power or exponential law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub model: FitModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default)]
    pub flags: Vec<String>,
    /// Admissible slope interval, when the law being tested predicts one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

impl ScalingReport {
    /// Fits `values` against `levels`; values under [`FLOOR`] are flagged and skipped.
    pub fn fit(levels: Vec<usize>, values: Vec<f64>, model: FitModel) -> Result<Self> {
        if levels.len() != values.len() {
            return Err(Error::invalid("levels and values differ in length"));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("levels must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::numerical("scaling values must be finite and non-negative"));
        }
        let mut flags = Vec::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (&n, &v) in levels.iter().zip(&values) {
            if v < FLOOR {
                flags.push(format!("floored:N={n}"));
                continue;
            }
            xs.push(match model {
                FitModel::Loglog => (n as f64).ln(),
                FitModel::Semilog => n as f64,
            });
            ys.push(v.ln());
        }
        let fit = if xs.len() < 2 {
            flags.push("insufficient-fit-points".to_string());
            LinearFit { slope: 0.0, intercept: ys.first().copied().unwrap_or(0.0), r2: 0.0 }
        } else {
            linear_fit(&xs, &ys)
        };
        Ok(ScalingReport {
            levels,
            values,
            slope: fit.slope,
            intercept: fit.intercept,
            r2: fit.r2,
            model,
            verdict: None,
            flags,
            window: None,
        })
    }

    /// PASS iff `r_N N^p` strictly decreases over the top half of the levels for `p = 2, 3, 4`.
    /// A floored value counts as smaller than anything unfloored.
    pub fn superpolynomial_verdict(&self) -> Verdict {
        let start = self.levels.len() / 2;
        let tail: Vec<(f64, f64)> = self.levels[start..]
            .iter()
            .zip(&self.values[start..])
            .map(|(&n, &v)| (n as f64, v))
            .collect();
        if tail.len() < 2 {
            return Verdict::Fail;
        }
        for p in [2, 3, 4] {
            for w in tail.windows(2) {
                let (n0, v0) = w[0];
                let (n1, v1) = w[1];
                if v1 < FLOOR {
                    continue;
                }
                if v0 < FLOOR || v1 * n1.powi(p) >= v0 * n0.powi(p) {
                    return Verdict::Fail;
                }
            }
        }
        Verdict::Pass
    }

    pub fn with_verdict(mut self, v: Verdict) -> Self {
        self.verdict = Some(v);
        self
    }

    pub fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_law() {
        let levels = vec![16, 32, 64, 128];
        let values: Vec<f64> = levels.iter().map(|&n| 3.0 * (n as f64).powf(-0.75)).collect();
        let r = ScalingReport::fit(levels, values, FitModel::Loglog).unwrap();
        assert_abs_diff_eq!(r.slope, -0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(r.intercept, 3f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_exponential() {
        let levels = vec![20, 40, 60, 80];
        let values: Vec<f64> = levels.iter().map(|&n| (-0.2 * n as f64).exp()).collect();
        let r = ScalingReport::fit(levels, values, FitModel::Semilog).unwrap();
        assert_abs_diff_eq!(r.slope, -0.2, epsilon = 1e-12);
    }

    #[test]
    fn floored_values_are_flagged() {
        let r = ScalingReport::fit(vec![1, 2, 3], vec![1e-3, 0.0, 1e-20], FitModel::Loglog).unwrap();
        assert_eq!(r.slope, 0.0);
        assert!(r.flags.iter().any(|f| f == "insufficient-fit-points"));
        assert_eq!(r.flags.iter().filter(|f| f.starts_with("floored")).count(), 2);
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(ScalingReport::fit(vec![2, 2], vec![1.0, 1.0], FitModel::Loglog).is_err());
        assert!(ScalingReport::fit(vec![1, 2], vec![1.0, -1.0], FitModel::Loglog).is_err());
    }

    #[test]
    fn verdicts() {
        let levels = vec![32, 64, 128, 256];
        let fast: Vec<f64> = levels.iter().map(|&n| (-(n as f64) / 8.0).exp()).collect();
        let slow: Vec<f64> = levels.iter().map(|&n| 1.0 / n as f64).collect();
        let fast = ScalingReport::fit(levels.clone(), fast, FitModel::Loglog).unwrap();
        let slow = ScalingReport::fit(levels, slow, FitModel::Loglog).unwrap();
        assert_eq!(fast.superpolynomial_verdict(), Verdict::Pass);
        assert_eq!(slow.superpolynomial_verdict(), Verdict::Fail);
    }

    #[test]
    fn json_round_trip() {
        let r = ScalingReport::fit(vec![4, 8], vec![0.5, 0.25], FitModel::Loglog)
            .unwrap()
            .with_verdict(Verdict::Pass);
        let text = serde_json::to_string(&r).unwrap();
        let back: ScalingReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
