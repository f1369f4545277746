//! Least-squares scaling laws and the size-doubling difference of the magic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least squares `y = intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub residual_ss: f64,
}

/// OLS with standard errors from the residual variance (`n - 2` dof).
/// With exactly two points the errors are reported as zero.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} point(s) for a line")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("linear fit input"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_ss: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let (slope_stderr, intercept_stderr) = if n > 2 {
        let s2 = residual_ss / (nf - 2.0);
        let se_slope = (s2 / sxx).sqrt();
        let se_int = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
        (se_slope, se_int)
    } else {
        (0.0, 0.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        intercept_stderr,
        residual_ss,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `y = A N^α`
    PowerLaw,
    /// `y = α + β ln(N + 1)`
    LogLinear,
}

/// Fitted scaling law.
///
/// For [`FitModel::PowerLaw`] the exponent is `α` and the prefactor `A`; for
/// [`FitModel::LogLinear`] the exponent is the slope `β` and the prefactor
/// the offset `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: FitModel,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub prefactor: f64,
    pub prefactor_stderr: f64,
    /// Sizes that entered the fit, in input order.
    pub window: Vec<f64>,
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "scaling fits need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, _)| n.is_nan() || n <= 0.0) {
        return Err(Error::param("N", "sizes must be positive"));
    }
    Ok(())
}

/// `ln y = ln A + α ln N`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    check_points(points)?;
    if let Some(&(n, y)) = points.iter().find(|&&(_, y)| y.is_nan() || y <= 0.0) {
        return Err(Error::param(
            "y",
            format!("power-law fit needs positive values, got {y} at N = {n}"),
        ));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let fit = linear_fit(&x, &y)?;
    let prefactor = fit.intercept.exp();
    Ok(ScalingFit {
        model: FitModel::PowerLaw,
        exponent: fit.slope,
        exponent_stderr: fit.slope_stderr,
        prefactor,
        prefactor_stderr: prefactor * fit.intercept_stderr,
        window: points.iter().map(|p| p.0).collect(),
    })
}

/// `y = α + β ln(N + 1)`.
pub fn fit_log_linear(points: &[(f64, f64)]) -> Result<ScalingFit> {
    check_points(points)?;
    let x: Vec<f64> = points.iter().map(|p| (p.0 + 1.0).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(ScalingFit {
        model: FitModel::LogLinear,
        exponent: fit.slope,
        exponent_stderr: fit.slope_stderr,
        prefactor: fit.intercept,
        prefactor_stderr: fit.intercept_stderr,
        window: points.iter().map(|p| p.0).collect(),
    })
}

/// Dispatch on the model tag.
pub fn fit(model: FitModel, points: &[(f64, f64)]) -> Result<ScalingFit> {
    match model {
        FitModel::PowerLaw => fit_power_law(points),
        FitModel::LogLinear => fit_log_linear(points),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMagic {
    pub n_spins: usize,
    /// `M̄(N) - M̄(N/2)`
    pub delta: f64,
    /// Combined standard error, when both inputs carry one.
    pub stderr: f64,
}

/// `δM_N = M̄(N) − M̄(N/2)` for every even `N` whose half is present.
///
/// Sizes without a partner are skipped with a warning.
pub fn delta_magic(asymptotic: &BTreeMap<usize, (f64, f64)>) -> Vec<DeltaMagic> {
    let mut out = Vec::new();
    for (&n, &(m, se)) in asymptotic {
        if n % 2 != 0 || !asymptotic.contains_key(&(n / 2)) {
            // the smallest sizes never have a partner; only flag the rest
            if asymptotic.keys().any(|&k| k < n) {
                log::warn!("no N/2 partner for N = {n}; skipping δM_N");
            }
            continue;
        }
        let (m_half, se_half) = asymptotic[&(n / 2)];
        out.push(DeltaMagic {
            n_spins: n,
            delta: m - m_half,
            stderr: se.hypot(se_half),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powf(0.5)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12);
        assert!((f.prefactor - 3.0).abs() < 1e-11);
        assert!(f.exponent_stderr < 1e-12);
        assert_eq!(f.window, vec![10.0, 20.0, 40.0, 80.0]);
    }

    #[test]
    fn exact_log_linear() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0, 160.0]
            .iter()
            .map(|&n: &f64| (n, -1.0 + 0.97 * (n + 1.0).ln()))
            .collect();
        let f = fit_log_linear(&pts).unwrap();
        assert!((f.exponent - 0.97).abs() < 1e-12);
        assert!((f.prefactor + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]).is_err());
        assert!(fit_log_linear(&[(0.0, 1.0), (2.0, 2.0), (3.0, 1.0)]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
    }

    #[test]
    fn stderr_from_noisy_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.1, 0.9, 2.1, 2.9];
        let f = linear_fit(&x, &y).unwrap();
        // hand computation: slope 0.96, residuals ±0.08/0.14 pattern
        assert!((f.slope - 0.96).abs() < 1e-12);
        let rss: f64 = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (b - f.intercept - f.slope * a).powi(2))
            .sum();
        assert!((f.slope_stderr - (rss / 2.0 / 5.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn delta_of_log_law_is_constant() {
        let c = 0.8;
        let m: BTreeMap<usize, (f64, f64)> = [10usize, 20, 40, 80, 160]
            .iter()
            .map(|&n| (n, (c * (n as f64).ln(), 0.0)))
            .collect();
        let d = delta_magic(&m);
        assert_eq!(d.len(), 4);
        for x in d {
            assert!((x.delta - c * 2f64.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn delta_of_linear_law() {
        let m: BTreeMap<usize, (f64, f64)> = [8usize, 16, 32]
            .iter()
            .map(|&n| (n, (0.3 * n as f64, 0.0)))
            .collect();
        for x in delta_magic(&m) {
            assert!((x.delta - 0.3 * x.n_spins as f64 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_preserves_power_exponent() {
        let beta = 0.37;
        let m: BTreeMap<usize, (f64, f64)> = [10usize, 20, 40, 80, 160]
            .iter()
            .map(|&n| (n, (1.7 * (n as f64).powf(beta), 0.0)))
            .collect();
        let direct = fit_power_law(
            &m.iter()
                .map(|(&n, &(y, _))| (n as f64, y))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let pts: Vec<(f64, f64)> = delta_magic(&m)
            .iter()
            .map(|d| (d.n_spins as f64, d.delta))
            .collect();
        let via_delta = fit_power_law(&pts).unwrap();
        assert!((direct.exponent - beta).abs() < 1e-6);
        assert!((via_delta.exponent - beta).abs() < 1e-6);
    }

    #[test]
    fn missing_partner_is_skipped() {
        let m: BTreeMap<usize, (f64, f64)> =
            [(10usize, (1.0, 0.0)), (20, (2.0, 0.0)), (30, (2.5, 0.0))]
                .into_iter()
                .collect();
        let d = delta_magic(&m);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].n_spins, 20);
    }
}
