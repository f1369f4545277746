//! Trajectory ensembles and their averaged stroboscopic series.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::propagators::{build_propagators, FloquetPropagators};
use super::trajectory::{
    run_trajectory_with, JumpScheme, ProbeEvaluator, ProbeKind, Probes, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::stream_rng;
use crate::spin::{spin_coherent_state, DickeState};

/// Initial condition of each ensemble member.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum InitialState {
    /// Fully polarized state when `γ > 0`, random coherent states when `γ = 0`.
    #[default]
    Auto,
    Polarized,
    /// Spin coherent state with `cos θ` and `φ` uniform (uniform on the sphere).
    RandomCoherent,
    Fixed(DickeState),
}

/// Spin coherent state drawn uniformly over the sphere.
pub fn random_coherent_state<R: Rng + ?Sized>(n_spins: usize, rng: &mut R) -> Result<DickeState> {
    let cos_theta: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    spin_coherent_state(n_spins, cos_theta.clamp(-1.0, 1.0).acos(), phi)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub probes: Probes,
    pub initial: InitialState,
    pub scheme: JumpScheme,
    /// Keep the per-trajectory records in the result.
    pub keep_records: bool,
}

impl EnsembleConfig {
    pub fn new(probes: Probes) -> Self {
        Self {
            probes,
            ..Self::default()
        }
    }

    pub fn keep_records(mut self) -> Self {
        self.keep_records = true;
        self
    }

    pub fn with_initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }
}

/// Trajectory average of one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub kind: ProbeKind,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `√N_traj`.
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSeries {
    pub periods: Vec<usize>,
    pub n_traj: usize,
    /// False for a single trajectory, where the reported errors are zero.
    pub stderr_defined: bool,
    pub probes: Vec<ProbeSeries>,
}

impl EnsembleSeries {
    pub fn probe(&self, kind: ProbeKind) -> Option<&ProbeSeries> {
        self.probes.iter().find(|p| p.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub series: EnsembleSeries,
    /// Per-trajectory records, ordered by trajectory index (empty unless kept).
    pub records: Vec<TrajectoryRecord>,
    pub total_jumps: u64,
}

/// Ensemble of `params.n_traj` members with the default configuration.
pub fn run_ensemble(params: &ModelParams, probes: &Probes) -> Result<EnsembleResult> {
    run_ensemble_with(params, &EnsembleConfig::new(probes.clone()))
}

pub fn run_ensemble_with(params: &ModelParams, config: &EnsembleConfig) -> Result<EnsembleResult> {
    let props = build_propagators(params)?;
    run_ensemble_on(&props, params, config)
}

/// Ensemble on prebuilt propagators (they must match `params`).
///
/// Member `i` draws from stream `i` of `params.seed`, so the result does not
/// depend on the number of worker threads.
pub fn run_ensemble_on(
    props: &FloquetPropagators,
    params: &ModelParams,
    config: &EnsembleConfig,
) -> Result<EnsembleResult> {
    if params.n_traj == 0 {
        return Err(Error::param("n_traj", "must be at least 1"));
    }
    if props.n_spins() != params.n_spins {
        return Err(Error::DimensionMismatch {
            expected: params.n_spins + 1,
            got: props.dim(),
        });
    }
    let evaluator = ProbeEvaluator::new(params.n_spins, &config.probes)?;
    let initial = match &config.initial {
        InitialState::Auto if params.gamma == 0.0 => InitialState::RandomCoherent,
        InitialState::Auto => InitialState::Polarized,
        other => other.clone(),
    };
    let records: Vec<TrajectoryRecord> = (0..params.n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(params.seed, i);
            let psi0 = match &initial {
                InitialState::RandomCoherent => random_coherent_state(params.n_spins, &mut rng)?,
                InitialState::Fixed(psi) => psi.clone(),
                _ => DickeState::polarized_up(params.n_spins)?,
            };
            let mut rec = run_trajectory_with(
                props,
                &psi0,
                params.n_periods,
                &evaluator,
                &config.probes,
                config.scheme,
                &mut rng,
            )?;
            rec.id = i;
            rec.seed = params.seed;
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    let series = average(&records, evaluator.kinds())?;
    let total_jumps = records.iter().map(TrajectoryRecord::total_jumps).sum();
    Ok(EnsembleResult {
        series,
        records: if config.keep_records {
            records
        } else {
            Vec::new()
        },
        total_jumps,
    })
}

/// Per-time mean and standard error, accumulated in trajectory order.
pub fn average(records: &[TrajectoryRecord], kinds: &[ProbeKind]) -> Result<EnsembleSeries> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("empty ensemble".into()))?;
    let n_times = first.periods.len();
    let n = records.len() as f64;
    let probes = kinds
        .iter()
        .enumerate()
        .map(|(j, &kind)| {
            let mut mean = vec![0.0; n_times];
            for rec in records {
                for (m, v) in mean.iter_mut().zip(&rec.values) {
                    *m += v[j];
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            let stderr = if records.len() > 1 {
                let mut var = vec![0.0; n_times];
                for rec in records {
                    for ((s, v), m) in var.iter_mut().zip(&rec.values).zip(&mean) {
                        *s += (v[j] - m).powi(2);
                    }
                }
                var.iter().map(|s| (s / (n - 1.0) / n).sqrt()).collect()
            } else {
                vec![0.0; n_times]
            };
            ProbeSeries { kind, mean, stderr }
        })
        .collect();
    Ok(EnsembleSeries {
        periods: first.periods.clone(),
        n_traj: records.len(),
        stderr_defined: records.len() > 1,
        probes,
    })
}
