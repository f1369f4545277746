//! Mean-field flow between kicks and the kick rotation.

use serde::{Deserialize, Serialize};

use crate::bloch::{phase_from_bloch, BlochVector, PhasePoint};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Time derivative of the magnetization between kicks.
///
/// Accepts any `m`; keeping it on the sphere is the caller's job.
pub fn mf_rhs(m: &BlochVector, h: f64, gamma: f64) -> [f64; 3] {
    let BlochVector { mx, my, mz } = *m;
    [
        2.0 * my * mz + 2.0 * gamma * mx * mz,
        -2.0 * mx * mz + 2.0 * h * mz + 2.0 * gamma * my * mz,
        -2.0 * h * my - 2.0 * gamma * (mx * mx + my * my),
    ]
}

/// Kick: rotation about `z` by `2 K m_z`.
pub fn mf_kick(m: &BlochVector, kick: f64) -> BlochVector {
    let (s, c) = (2.0 * kick * m.mz).sin_cos();
    BlochVector::new(m.mx * c - m.my * s, m.mx * s + m.my * c, m.mz)
}

/// Fixed-step RK4 integrator for one driving period, renormalizing after
/// every step.
#[derive(Debug, Clone, Copy)]
pub struct MeanFieldFlow {
    h: f64,
    gamma: f64,
    kick: f64,
    dt: f64,
    steps: usize,
}

impl MeanFieldFlow {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate_mean_field()?;
        let steps = params.mean_field_steps()?;
        Ok(Self {
            h: params.h,
            gamma: params.gamma,
            kick: params.kick,
            dt: params.tau / steps as f64,
            steps,
        })
    }

    pub fn steps_per_period(&self) -> usize {
        self.steps
    }

    #[inline]
    fn rk4_step(&self, m: BlochVector) -> BlochVector {
        let dt = self.dt;
        let add = |m: &BlochVector, k: &[f64; 3], s: f64| {
            BlochVector::new(m.mx + s * k[0], m.my + s * k[1], m.mz + s * k[2])
        };
        let k1 = mf_rhs(&m, self.h, self.gamma);
        let k2 = mf_rhs(&add(&m, &k1, 0.5 * dt), self.h, self.gamma);
        let k3 = mf_rhs(&add(&m, &k2, 0.5 * dt), self.h, self.gamma);
        let k4 = mf_rhs(&add(&m, &k3, dt), self.h, self.gamma);
        let w = dt / 6.0;
        BlochVector::new(
            m.mx + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            m.my + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            m.mz + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        )
    }

    /// Flow for one period without renormalization; returns the end point
    /// and the largest per-step deviation of the norm from one.
    pub fn step_period_raw(&self, m: &BlochVector) -> (BlochVector, f64) {
        let mut x = *m;
        let mut drift = 0.0f64;
        for _ in 0..self.steps {
            x = self.rk4_step(x);
            drift = drift.max((x.norm() - 1.0).abs());
            x = x.normalized();
        }
        (x, drift)
    }

    /// `m(τ⁻)` starting from `m(0⁺)`.
    pub fn step_period(&self, m: &BlochVector) -> BlochVector {
        let mut x = *m;
        for _ in 0..self.steps {
            x = self.rk4_step(x).normalized();
        }
        x
    }

    pub fn kick(&self, m: &BlochVector) -> BlochVector {
        mf_kick(m, self.kick)
    }

    /// One full period: flow, then kick. Returns `m(t_{n+1}^+)`.
    pub fn period(&self, m: &BlochVector) -> BlochVector {
        self.kick(&self.step_period(m))
    }
}

/// Integrates the flow for one period `τ` (RK4, renormalized each step).
pub fn mf_step_period(m: &BlochVector, params: &ModelParams) -> Result<BlochVector> {
    Ok(MeanFieldFlow::new(params)?.step_period(m))
}

/// Stroboscopic samples right after each kick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSeries {
    /// `(n, m(t_n^+))` for `n = 1..=n_periods`.
    pub points: Vec<(usize, BlochVector)>,
}

impl OrbitSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&BlochVector> {
        self.points.last().map(|(_, m)| m)
    }

    /// The orbit in the `(Q, P)` chart.
    pub fn phase_points(&self) -> Vec<PhasePoint> {
        self.points
            .iter()
            .map(|(_, m)| phase_from_bloch(m))
            .collect()
    }
}

/// Alternates flow and kick for `n_periods`, recording after each kick.
pub fn mf_stroboscopic_orbit(
    m0: &BlochVector,
    params: &ModelParams,
    n_periods: usize,
) -> Result<OrbitSeries> {
    let flow = MeanFieldFlow::new(params)?;
    check_unit(m0)?;
    let mut m = m0.normalized();
    let mut points = Vec::with_capacity(n_periods);
    for n in 1..=n_periods {
        m = flow.period(&m);
        points.push((n, m));
    }
    Ok(OrbitSeries { points })
}

pub(crate) fn check_unit(m: &BlochVector) -> Result<()> {
    if !m.is_finite() || (m.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::param(
            "m0",
            format!(
                "initial magnetization must be a unit vector, norm {}",
                m.norm()
            ),
        ));
    }
    Ok(())
}
