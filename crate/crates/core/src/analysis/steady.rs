//! Plateau averages and pooled fluctuation statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    /// Sample standard deviation over `√n`; zero for a single sample.
    pub stderr: f64,
}

/// Mean and standard error of a sample (no autocorrelation correction).
pub fn mean_stderr(xs: &[f64]) -> Result<MeanStderr> {
    if xs.is_empty() {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let stderr = if xs.len() > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(MeanStderr { mean, stderr })
}

/// Average of `series[k0..]`.
pub fn steady_average(series: &[f64], k0: usize) -> Result<MeanStderr> {
    if k0 >= series.len() {
        return Err(Error::param(
            "k0",
            format!(
                "window start {k0} must be below the series length {}",
                series.len()
            ),
        ));
    }
    mean_stderr(&series[k0..])
}

/// `mean(x²) − mean(x)²` of the pooled per-trajectory expectations.
pub fn variance_mz(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no magnetization samples".into()));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    // two-pass form of mean(x²) − mean(x)², which is the same quantity
    Ok(samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn constant_series() {
        let s = vec![0.7; 40];
        let r = steady_average(&s, 10).unwrap();
        assert!((r.mean - 0.7).abs() < 1e-15);
        assert!(r.stderr < 1e-15);
    }

    #[test]
    fn last_point_window() {
        let s = [1.0, 2.0, 3.0, 9.0];
        let r = steady_average(&s, 3).unwrap();
        assert_eq!(r.mean, 9.0);
        assert!(steady_average(&s, 4).is_err());
    }

    #[test]
    fn noisy_plateau_after_transient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let plateau = 2.5;
        let s: Vec<f64> = (0..1000)
            .map(|k| plateau * (1.0 - (-(k as f64) / 30.0).exp()) + noise.sample(&mut rng))
            .collect();
        let r = steady_average(&s, 500).unwrap();
        assert!(
            (r.mean - plateau).abs() < 3.0 * 0.05 / 500f64.sqrt(),
            "{r:?}"
        );
        assert!((r.stderr - 0.05 / 500f64.sqrt()).abs() < 0.3 * r.stderr);
    }

    #[test]
    fn variance_examples() {
        assert!(variance_mz(&[0.3; 10]).unwrap() < 1e-30);
        assert!((variance_mz(&[-1.0, 1.0, -1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(variance_mz(&[]).is_err());
    }

    #[test]
    fn variance_ignores_order() {
        let a = [0.1, -0.4, 0.9, 0.2, -0.7];
        let mut b = a;
        b.reverse();
        assert!((variance_mz(&a).unwrap() - variance_mz(&b).unwrap()).abs() < 1e-15);
    }
}
