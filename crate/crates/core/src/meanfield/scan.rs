//! Parameter and initial-condition scans of the stroboscopic map.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flow::{check_unit, MeanFieldFlow, OrbitSeries};
use crate::bloch::{bloch_from_phase, BlochVector, PhasePoint};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Component recorded by the bifurcation scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    X,
    Y,
    Z,
}

impl Component {
    pub fn of(self, m: &BlochVector) -> f64 {
        match self {
            Component::X => m.mx,
            Component::Y => m.my,
            Component::Z => m.mz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationColumn {
    pub kick: f64,
    /// The last `keep` post-kick values of the observable.
    pub values: Vec<f64>,
}

/// For each `K`, runs `n_periods` from the pole and keeps the last `keep`
/// post-kick values of `observable`.
pub fn bifurcation_scan(
    kicks: &[f64],
    params: &ModelParams,
    n_periods: usize,
    keep: usize,
    observable: Component,
) -> Result<Vec<BifurcationColumn>> {
    if kicks.is_empty() {
        return Err(Error::param("K-range", "needs at least one kick strength"));
    }
    if keep == 0 || keep > n_periods {
        return Err(Error::param(
            "keep",
            format!("must lie in 1..={n_periods}, got {keep}"),
        ));
    }
    kicks
        .par_iter()
        .map(|&kick| {
            let flow = MeanFieldFlow::new(&ModelParams {
                kick,
                ..params.clone()
            })?;
            let mut m = BlochVector::UP;
            let mut values = Vec::with_capacity(keep);
            for n in 1..=n_periods {
                m = flow.period(&m);
                if n > n_periods - keep {
                    values.push(observable.of(&m));
                }
            }
            Ok(BifurcationColumn { kick, values })
        })
        .collect()
}

/// Number of distinct values up to `tol` (sorted single-linkage clusters).
pub fn distinct_count(values: &[f64], tol: f64) -> usize {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    if v.is_empty() {
        return 0;
    }
    1 + v.windows(2).filter(|w| w[1] - w[0] > tol).count()
}

/// Initial condition drawn uniformly over the `(Q, P)` rectangle.
pub fn random_phase_point<R: Rng + ?Sized>(rng: &mut R) -> PhasePoint {
    let q = rng.random_range(-1.0..=1.0);
    let p = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
    PhasePoint { q, p }
}

/// Deterministic RNG for the `index`-th member of a scan.
pub fn scan_rng(seed: u64, index: u64) -> ChaCha8Rng {
    crate::rng::stream_rng(seed, index)
}

/// One orbit per random initial condition (Poincaré section data).
///
/// Initial condition `i` is drawn from stream `i` of the base seed, so the
/// result does not depend on scheduling.
pub fn poincare_orbits(
    params: &ModelParams,
    n_init: usize,
    n_periods: usize,
    seed: u64,
) -> Result<Vec<(PhasePoint, OrbitSeries)>> {
    if n_init == 0 {
        return Err(Error::param("n_init", "must be at least 1"));
    }
    let flow = MeanFieldFlow::new(params)?;
    Ok((0..n_init as u64)
        .into_par_iter()
        .map(|i| {
            let p0 = random_phase_point(&mut scan_rng(seed, i));
            (p0, orbit_from(&flow, &bloch_from_phase(&p0), n_periods))
        })
        .collect())
}

pub(crate) fn orbit_from(flow: &MeanFieldFlow, m0: &BlochVector, n_periods: usize) -> OrbitSeries {
    let mut m = *m0;
    let points = (1..=n_periods)
        .map(|n| {
            m = flow.period(&m);
            (n, m)
        })
        .collect();
    OrbitSeries { points }
}

/// Orbit from an explicit chart point.
pub fn orbit_from_phase(
    p0: &PhasePoint,
    params: &ModelParams,
    n_periods: usize,
) -> Result<OrbitSeries> {
    let flow = MeanFieldFlow::new(params)?;
    let m0 = bloch_from_phase(p0);
    check_unit(&m0)?;
    Ok(orbit_from(&flow, &m0, n_periods))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_count_clusters() {
        assert_eq!(distinct_count(&[0.1, 0.1 + 1e-9, 0.5, 0.5], 1e-6), 2);
        assert_eq!(distinct_count(&[], 1e-6), 0);
    }

    #[test]
    fn strong_damping_gives_single_branch() {
        let p = ModelParams::mean_field(0.5, 0.0, 0.5);
        let cols = bifurcation_scan(&[0.0, 2.0, 6.0, 10.0], &p, 3000, 250, Component::Y).unwrap();
        let counts: Vec<usize> = cols
            .iter()
            .map(|c| distinct_count(&c.values, 1e-6))
            .collect();
        assert!(cols.iter().all(|c| c.values.len() == 250));
        // K = 10 settles on a period-2 cycle
        assert_eq!(counts, [1, 1, 1, 2]);
    }

    #[test]
    fn chaotic_window_is_dense() {
        let p = ModelParams::mean_field(0.5, 0.0, 0.2);
        let cols = bifurcation_scan(&[5.0], &p, 3000, 250, Component::Y).unwrap();
        assert!(distinct_count(&cols[0].values, 1e-6) > 100);
    }

    #[test]
    fn empty_scan_rejected() {
        let p = ModelParams::mean_field(0.5, 0.0, 0.5);
        assert!(bifurcation_scan(&[], &p, 100, 10, Component::Y).is_err());
        assert!(bifurcation_scan(&[1.0], &p, 100, 0, Component::Y).is_err());
    }

    #[test]
    fn poincare_is_reproducible() {
        let p = ModelParams::mean_field(0.5, 5.0, 0.2);
        let a = poincare_orbits(&p, 3, 20, 7).unwrap();
        let b = poincare_orbits(&p, 3, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a
            .iter()
            .all(|(p0, o)| (-1.0..=1.0).contains(&p0.q) && o.len() == 20));
    }
}
