//! Largest Lyapunov exponent by two-trajectory renormalization (Benettin).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{check_unit, MeanFieldFlow};
use crate::bloch::BlochVector;
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Default initial separation.
pub const DEFAULT_D0: f64 = 1e-10;
/// Default number of accumulated periods.
pub const DEFAULT_LYAPUNOV_PERIODS: usize = 1000;
/// Periods discarded before the sum starts.
pub const LYAPUNOV_TRANSIENT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovResult {
    /// Largest Lyapunov exponent, in inverse time units.
    pub lambda: f64,
    pub n_periods: usize,
    pub d0: f64,
}

/// Companion initial condition at separation `~d0` from the north pole:
/// `(√(d0/2), √(d0/2), √(1-d0²))`, projected onto the sphere.
pub fn companion_of_pole(d0: f64) -> BlochVector {
    let s = (0.5 * d0).sqrt();
    BlochVector::new(s, s, (1.0 - d0 * d0).sqrt()).normalized()
}

/// Benettin estimate `λ = (1/(N_τ τ)) Σ_k ln(d_k/d0)` starting from `m0` and
/// a companion at distance `d0`.
///
/// The companion for the pole is [`companion_of_pole`]; for any other `m0`
/// it is displaced by `d0` along the local `θ` direction. Both points are
/// evolved over [`LYAPUNOV_TRANSIENT`] periods with renormalization before
/// the `n_periods` that enter the sum.
pub fn lyapunov_largest(
    m0: &BlochVector,
    params: &ModelParams,
    n_periods: usize,
    d0: f64,
) -> Result<LyapunovResult> {
    let flow = MeanFieldFlow::new(params)?;
    check_unit(m0)?;
    if !(d0.is_finite() && d0 > 0.0 && d0 < 1e-2) {
        return Err(Error::param(
            "d0",
            format!("must be small and positive, got {d0}"),
        ));
    }
    if n_periods == 0 {
        return Err(Error::param("n_periods", "must be at least 1"));
    }
    let m1 = m0.normalized();
    let m2 = companion(&m1, d0);
    let lambda = benettin(&flow, m1, m2, d0, LYAPUNOV_TRANSIENT, n_periods, params.tau)?;
    Ok(LyapunovResult {
        lambda,
        n_periods,
        d0,
    })
}

fn companion(m: &BlochVector, d0: f64) -> BlochVector {
    if m.distance(&BlochVector::UP) < 1e-12 {
        return companion_of_pole(d0);
    }
    let theta = m.mz.clamp(-1.0, 1.0).acos();
    let phi = m.my.atan2(m.mx);
    // unit tangent e_θ
    let e = BlochVector::new(
        theta.cos() * phi.cos(),
        theta.cos() * phi.sin(),
        -theta.sin(),
    );
    BlochVector::new(m.mx + d0 * e.mx, m.my + d0 * e.my, m.mz + d0 * e.mz).normalized()
}

pub(crate) fn benettin(
    flow: &MeanFieldFlow,
    mut m1: BlochVector,
    mut m2: BlochVector,
    d0: f64,
    transient: usize,
    n_periods: usize,
    tau: f64,
) -> Result<f64> {
    let mut sum = 0.0;
    for period in 1..=transient + n_periods {
        m1 = flow.period(&m1);
        m2 = flow.period(&m2);
        let d = m1.distance(&m2);
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::DegenerateSeparation { period });
        }
        if period > transient {
            sum += (d / d0).ln();
        }
        // move the companion back along the joining line
        let s = d0 / d;
        m2 = BlochVector::new(
            m1.mx + s * (m2.mx - m1.mx),
            m1.my + s * (m2.my - m1.my),
            m1.mz + s * (m2.mz - m1.mz),
        )
        .normalized();
    }
    Ok(sum / (n_periods as f64 * tau))
}

/// Evenly spaced grid including both ends; a single node sits at `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// One node of a Lyapunov heat map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovNode {
    pub kick: f64,
    pub gamma: f64,
    /// `None` when the estimate failed at this node.
    pub lambda: Option<f64>,
}

/// λ over a `(K, γ)` grid, rows ordered by ascending `K`, then `γ`.
///
/// Each node starts from the pole with [`DEFAULT_D0`]. Failures mark the
/// node invalid instead of aborting the scan.
pub fn lyapunov_map(
    kick_range: (f64, f64),
    gamma_range: (f64, f64),
    grid: (usize, usize),
    params: &ModelParams,
    n_periods: usize,
) -> Result<Vec<LyapunovNode>> {
    let (nk, ng) = grid;
    if nk == 0 || ng == 0 {
        return Err(Error::param(
            "grid",
            "both grid dimensions must be at least 1",
        ));
    }
    for (name, (lo, hi)) in [("K-range", kick_range), ("gamma-range", gamma_range)] {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi >= lo) {
            return Err(Error::param(name, format!("invalid range [{lo}, {hi}]")));
        }
    }
    let ks = linspace(kick_range.0, kick_range.1, nk);
    let gs = linspace(gamma_range.0, gamma_range.1, ng);
    let nodes: Vec<(f64, f64)> = ks
        .iter()
        .flat_map(|&k| gs.iter().map(move |&g| (k, g)))
        .collect();
    let out = nodes
        .par_iter()
        .map(|&(kick, gamma)| {
            let p = ModelParams {
                kick,
                gamma,
                ..params.clone()
            };
            let lambda = lyapunov_largest(&BlochVector::UP, &p, n_periods, DEFAULT_D0)
                .map(|r| r.lambda)
                .ok();
            LyapunovNode {
                kick,
                gamma,
                lambda,
            }
        })
        .collect();
    Ok(out)
}
