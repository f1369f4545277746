//! Box-counting estimate of the Hausdorff dimension of the stroboscopic set.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::MeanFieldFlow;
use super::scan::{orbit_from, random_phase_point, scan_rng};
use crate::analysis::scaling::linear_fit;
use crate::bloch::{bloch_from_phase, PhasePoint};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Dyadic box sizes `2^-10 … 2^-1`.
pub fn default_epsilons() -> Vec<f64> {
    (1..=10).map(|k| 2f64.powi(-k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffConfig {
    pub n_init: usize,
    pub n_periods: usize,
    /// Leading periods of each orbit left out of the point set. The default
    /// keeps every post-kick point, approach to the attractor included.
    pub transient: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
}

impl Default for HausdorffConfig {
    fn default() -> Self {
        Self {
            n_init: 500,
            n_periods: 1000,
            transient: 0,
            epsilons: default_epsilons(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCount {
    pub epsilon: f64,
    pub boxes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEstimate {
    pub dimension: f64,
    pub stderr: f64,
    pub counts: Vec<BoxCount>,
}

/// Occupied boxes of side `epsilon` on the section.
///
/// `P` is rescaled by `2/π` so both axes span 2 and boxes are squares; the
/// grid is anchored at the lower-left corner `(Q, P) = (-1, -π/2)`. Points on
/// the upper edge `Q = 1` fall into the last box.
pub fn count_boxes(points: &[PhasePoint], epsilon: f64) -> usize {
    let n_side = (2.0 / epsilon).ceil() as i64;
    let mut seen = HashSet::with_capacity(points.len().min(1 << 20));
    for pt in points {
        let x = pt.q + 1.0;
        let y = (pt.p + FRAC_PI_2) * (2.0 / PI);
        let ix = ((x / epsilon).floor() as i64).clamp(0, n_side - 1);
        let iy = ((y / epsilon).floor() as i64).clamp(0, n_side - 1);
        seen.insert((ix, iy));
    }
    seen.len()
}

/// Slope of `ln N(ε)` against `-ln ε` by least squares.
pub fn box_counting_dimension(
    points: &[PhasePoint],
    epsilons: &[f64],
) -> Result<HausdorffEstimate> {
    if epsilons.len() < 3 {
        return Err(Error::param(
            "epsilons",
            format!("need at least 3 box sizes, got {}", epsilons.len()),
        ));
    }
    if let Some(e) = epsilons
        .iter()
        .find(|e| !(e.is_finite() && **e > 0.0 && **e <= 2.0))
    {
        return Err(Error::param(
            "epsilons",
            format!("box size {e} outside (0, 2]"),
        ));
    }
    if points.is_empty() {
        return Err(Error::InsufficientData("no points to cover".into()));
    }
    let counts: Vec<BoxCount> = epsilons
        .iter()
        .map(|&epsilon| BoxCount {
            epsilon,
            boxes: count_boxes(points, epsilon),
        })
        .collect();
    let nontrivial = counts.iter().filter(|c| c.boxes > 1).count();
    if nontrivial < 3 {
        return Err(Error::DegenerateBoxCount { nontrivial });
    }
    let x: Vec<f64> = counts.iter().map(|c| -c.epsilon.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|c| (c.boxes as f64).ln()).collect();
    let fit = linear_fit(&x, &y)?;
    Ok(HausdorffEstimate {
        dimension: fit.slope,
        stderr: fit.slope_stderr,
        counts,
    })
}

/// Collects stroboscopic points from `n_init` random initial conditions,
/// skipping the first `config.transient` periods of each, and estimates
/// `d_H` by box counting.
pub fn hausdorff_dimension(
    params: &ModelParams,
    config: &HausdorffConfig,
) -> Result<HausdorffEstimate> {
    if config.n_init == 0 {
        return Err(Error::param("n_init", "must be at least 1"));
    }
    if config.transient >= config.n_periods {
        return Err(Error::param("transient", "must be shorter than the run"));
    }
    let points = section_points(params, config)?;
    box_counting_dimension(&points, &config.epsilons)
}

/// Section points after the transient, ordered by initial condition then time.
pub fn section_points(params: &ModelParams, config: &HausdorffConfig) -> Result<Vec<PhasePoint>> {
    let flow = MeanFieldFlow::new(params)?;
    let per_init: Vec<Vec<PhasePoint>> = (0..config.n_init as u64)
        .into_par_iter()
        .map(|i| {
            let p0 = random_phase_point(&mut scan_rng(config.seed, i));
            let orbit = orbit_from(&flow, &bloch_from_phase(&p0), config.n_periods);
            orbit.phase_points().split_off(config.transient)
        })
        .collect();
    Ok(per_init.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniform_points(n: usize) -> Vec<PhasePoint> {
        let mut rng = scan_rng(11, 0);
        (0..n).map(|_| random_phase_point(&mut rng)).collect()
    }

    #[test]
    fn uniform_square_is_two_dimensional() {
        let pts = uniform_points(4_000_000);
        let est = box_counting_dimension(&pts, &default_epsilons()).unwrap();
        assert!((est.dimension - 2.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn segment_is_one_dimensional() {
        let mut rng = scan_rng(12, 0);
        let pts: Vec<PhasePoint> = (0..200_000)
            .map(|_| {
                let t: f64 = rng.random_range(0.0..1.0);
                PhasePoint {
                    q: -0.9 + 1.7 * t,
                    p: -1.2 + 2.0 * t,
                }
            })
            .collect();
        let est = box_counting_dimension(&pts, &default_epsilons()).unwrap();
        assert!((est.dimension - 1.0).abs() < 0.1, "{est:?}");
    }

    #[test]
    fn boundary_point_lands_in_last_box() {
        let pts = [
            PhasePoint { q: 1.0, p: 0.0 },
            PhasePoint { q: 0.99, p: 0.0 },
        ];
        assert_eq!(count_boxes(&pts, 0.5), 1);
    }

    #[test]
    fn single_point_is_degenerate() {
        let pts = vec![PhasePoint { q: 0.1, p: 0.2 }; 10];
        assert!(matches!(
            box_counting_dimension(&pts, &default_epsilons()),
            Err(Error::DegenerateBoxCount { .. })
        ));
    }

    #[test]
    fn too_few_scales_rejected() {
        let pts = uniform_points(100);
        assert!(box_counting_dimension(&pts, &[0.1]).is_err());
        assert!(box_counting_dimension(&pts, &[0.1, 0.2]).is_err());
    }
}
