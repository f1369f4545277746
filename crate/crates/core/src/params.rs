//! Physical and numerical parameters of the dissipative kicked top.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by the mean-field and finite-size simulations.
///
/// Energies are in units of the coupling `J = 1` and `ħ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Transverse field strength `h`.
    pub h: f64,
    /// Kick strength `K`.
    pub kick: f64,
    /// Collective decay rate `γ`.
    pub gamma: f64,
    /// Driving period `τ`.
    pub tau: f64,
    /// Number of spins `N`.
    pub n_spins: usize,
    /// Mean-field RK4 step.
    pub dt_mf: f64,
    /// Quantum-jump time step `δt`.
    pub dt_q: f64,
    /// Number of driving periods `N_τ`.
    pub n_periods: usize,
    /// Number of trajectories `N_traj`.
    pub n_traj: usize,
    /// Base RNG seed.
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            h: 0.5,
            kick: 0.0,
            gamma: 0.0,
            tau: 1.0,
            n_spins: 20,
            dt_mf: 0.01,
            dt_q: 0.01,
            n_periods: 1000,
            n_traj: 1024,
            seed: 0,
        }
    }
}

impl ModelParams {
    /// Mean-field parameters `(h, K, γ)` with every other field at its default.
    pub fn mean_field(h: f64, kick: f64, gamma: f64) -> Self {
        Self {
            h,
            kick,
            gamma,
            ..Self::default()
        }
    }

    /// Finite-size parameters for `N` spins with every other field at its default.
    pub fn quantum(n_spins: usize, h: f64, kick: f64, gamma: f64) -> Self {
        Self {
            n_spins,
            ..Self::mean_field(h, kick, gamma)
        }
    }

    pub fn with_periods(mut self, n_periods: usize) -> Self {
        self.n_periods = n_periods;
        self
    }

    pub fn with_traj(mut self, n_traj: usize) -> Self {
        self.n_traj = n_traj;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dt_q(mut self, dt_q: f64) -> Self {
        self.dt_q = dt_q;
        self
    }

    pub fn with_dt_mf(mut self, dt_mf: f64) -> Self {
        self.dt_mf = dt_mf;
        self
    }

    /// Total spin `S = N/2`.
    pub fn spin(&self) -> f64 {
        self.n_spins as f64 / 2.0
    }

    /// Checks every domain invariant.
    pub fn validate(&self) -> Result<()> {
        self.validate_mean_field()?;
        if self.n_spins == 0 {
            return Err(Error::param("n_spins", "must be at least 1"));
        }
        self.quantum_steps()?;
        Ok(())
    }

    /// Checks the invariants relevant to the thermodynamic-limit dynamics only.
    pub fn validate_mean_field(&self) -> Result<()> {
        check_nonneg("h", self.h)?;
        check_nonneg("kick", self.kick)?;
        check_nonneg("gamma", self.gamma)?;
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::param(
                "tau",
                format!("must be positive, got {}", self.tau),
            ));
        }
        self.mean_field_steps()?;
        Ok(())
    }

    /// Number of RK4 steps per period.
    pub fn mean_field_steps(&self) -> Result<usize> {
        steps_per_period(self.tau, self.dt_mf)
    }

    /// Number of quantum-jump steps per period.
    pub fn quantum_steps(&self) -> Result<usize> {
        steps_per_period(self.tau, self.dt_q)
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and non-negative, got {value}"),
        ))
    }
}

/// Integer number of steps of length `dt` in one period `tau`.
pub fn steps_per_period(tau: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) || dt > tau {
        return Err(Error::StepDoesNotDivide { step: dt, tau });
    }
    let ratio = tau / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::StepDoesNotDivide { step: dt, tau });
    }
    Ok(steps as usize)
}
