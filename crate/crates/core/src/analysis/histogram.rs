//! Magnetization histograms and peak detection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bin width for `m_z` histograms.
pub const DEFAULT_BIN: f64 = 0.01;
/// Default peak prominence, as a fraction of the global maximum density.
pub const DEFAULT_PROMINENCE: f64 = 0.05;

/// Density histogram with uniform bins over `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub density: Vec<f64>,
    pub n_samples: usize,
}

impl Histogram {
    pub fn n_bins(&self) -> usize {
        self.density.len()
    }

    /// `n_bins + 1` edges.
    pub fn edges(&self) -> Vec<f64> {
        (0..=self.n_bins())
            .map(|i| self.lo + self.width * i as f64)
            .collect()
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + self.width * (i as f64 + 0.5)
    }

    /// `Σ density · width`.
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.width
    }
}

/// Histogram of `m_z` samples on `[-1, 1]`; the value `1` goes in the last bin.
pub fn histogram_mz(samples: &[f64], bin: f64) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples to histogram".into()));
    }
    if !(bin.is_finite() && bin > 0.0 && bin <= 2.0) {
        return Err(Error::param(
            "bin",
            format!("bin width {bin} outside (0, 2]"),
        ));
    }
    let (lo, hi) = (-1.0, 1.0);
    let n_bins = ((hi - lo) / bin).round() as usize;
    let width = (hi - lo) / n_bins as f64;
    let tol = 1e-9;
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        if !(x >= lo - tol && x <= hi + tol) {
            return Err(Error::param(
                "samples",
                format!("value {x} outside [-1, 1]"),
            ));
        }
        let i = (((x - lo) / width).floor().max(0.0) as usize).min(n_bins - 1);
        counts[i] += 1;
    }
    let norm = 1.0 / (samples.len() as f64 * width);
    Ok(Histogram {
        lo,
        width,
        density: counts.iter().map(|&c| c as f64 * norm).collect(),
        n_samples: samples.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    pub prominence: f64,
    pub is_global_max: bool,
}

/// Local maxima whose topographic prominence is at least
/// `min_prominence × (global maximum density)`, sorted by position.
///
/// Plateaus of equal bins count once, at their middle.
pub fn find_peaks(hist: &Histogram, min_prominence: f64) -> Vec<Peak> {
    let d = &hist.density;
    let n = d.len();
    let global = d.iter().cloned().fold(0.0, f64::max);
    if n == 0 || global <= 0.0 {
        return Vec::new();
    }
    let threshold = min_prominence * global;
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        // extent of a run of equal values
        let mut j = i;
        while j + 1 < n && d[j + 1] == d[i] {
            j += 1;
        }
        let left_lower = i == 0 || d[i - 1] < d[i];
        let right_lower = j + 1 == n || d[j + 1] < d[i];
        if left_lower && right_lower && d[i] > 0.0 {
            let prominence = d[i] - prominence_base(d, i, j);
            if prominence >= threshold {
                peaks.push(Peak {
                    position: hist.center((i + j) / 2),
                    height: d[i],
                    prominence,
                    is_global_max: false,
                });
            }
        }
        i = j + 1;
    }
    if let Some(best) = peaks
        .iter_mut()
        .max_by(|a, b| a.height.total_cmp(&b.height))
    {
        best.is_global_max = true;
    }
    peaks
}

/// Higher of the two minima reached walking away from the run `i..=j` until
/// a strictly higher bin or the edge of the histogram.
fn prominence_base(d: &[f64], i: usize, j: usize) -> f64 {
    let h = d[i];
    let mut left_min = h;
    let mut left_bounded = false;
    for k in (0..i).rev() {
        if d[k] > h {
            left_bounded = true;
            break;
        }
        left_min = left_min.min(d[k]);
    }
    let mut right_min = h;
    let mut right_bounded = false;
    for &v in &d[j + 1..] {
        if v > h {
            right_bounded = true;
            break;
        }
        right_min = right_min.min(v);
    }
    match (left_bounded, right_bounded) {
        (true, true) => left_min.max(right_min),
        (true, false) => left_min,
        (false, true) => right_min,
        // highest peak: measured from the lowest point on either side
        (false, false) => left_min.min(right_min),
    }
}

/// Position of the global maximum of the density (bin centre).
pub fn global_max_position(hist: &Histogram) -> Option<f64> {
    hist.density
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .filter(|(_, &v)| v > 0.0)
        .map(|(i, _)| hist.center(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn normalization() {
        let h = histogram_mz(&[-1.0, -0.5, 0.0, 0.3, 1.0], DEFAULT_BIN).unwrap();
        assert_eq!(h.n_bins(), 200);
        assert!((h.integral() - 1.0).abs() < 1e-12);
        assert!(h.density[199] > 0.0);
        assert_eq!(h.edges().len(), 201);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(histogram_mz(&[], DEFAULT_BIN).is_err());
        assert!(histogram_mz(&[1.5], DEFAULT_BIN).is_err());
        assert!(histogram_mz(&[f64::NAN], DEFAULT_BIN).is_err());
    }

    #[test]
    fn gaussian_has_single_peak_at_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = Normal::new(-0.3, 0.1).unwrap();
        let xs: Vec<f64> = (0..400_000)
            .map(|_| g.sample(&mut rng))
            .filter(|x: &f64| x.abs() <= 1.0)
            .collect();
        let h = histogram_mz(&xs, DEFAULT_BIN).unwrap();
        let peaks = find_peaks(&h, DEFAULT_PROMINENCE);
        assert_eq!(peaks.len(), 1, "{peaks:?}");
        assert!(peaks[0].is_global_max);
        assert!((peaks[0].position + 0.3).abs() <= 0.01 + 1e-12);
    }

    #[test]
    fn two_bumps_are_resolved() {
        let mut d = vec![0.0; 200];
        for (i, v) in d.iter_mut().enumerate() {
            let x = -1.0 + 0.01 * (i as f64 + 0.5);
            *v = 2.0 * (-((x + 0.8) / 0.05).powi(2)).exp() + (-((x - 0.1) / 0.1).powi(2)).exp();
        }
        let h = Histogram {
            lo: -1.0,
            width: 0.01,
            density: d,
            n_samples: 1,
        };
        let peaks = find_peaks(&h, DEFAULT_PROMINENCE);
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!(peaks[0].is_global_max && !peaks[1].is_global_max);
        assert!((peaks[0].position + 0.8).abs() < 0.011);
        assert!((peaks[1].position - 0.1).abs() < 0.011);
        assert!((global_max_position(&h).unwrap() + 0.8).abs() < 0.011);
    }

    #[test]
    fn small_wiggles_are_not_peaks() {
        let mut d: Vec<f64> = (0..200)
            .map(|i| 1.0 - ((i as f64 - 100.0) / 100.0).powi(2))
            .collect();
        d[30] += 0.02;
        let h = Histogram {
            lo: -1.0,
            width: 0.01,
            density: d,
            n_samples: 1,
        };
        assert_eq!(find_peaks(&h, DEFAULT_PROMINENCE).len(), 1);
    }
}
