//! Dense density-matrix integration of the kicked Lindblad equation, used
//! as a reference for trajectory averages at small `N`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::propagators::{kick_diagonal, non_hermitian_hamiltonian};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::spin::{build_collective_ops, DickeState};

/// Largest `N` accepted by the dense integrator.
pub const ORACLE_MAX_SPINS: usize = 12;

const TRACE_TOL: f64 = 1e-8;
const POSITIVITY_TOL: f64 = 1e-8;

/// `|ψ⟩⟨ψ|`.
pub fn pure_density(psi: &DickeState) -> DMatrix<Complex64> {
    let v = nalgebra::DVector::from_column_slice(psi.amps());
    &v * v.adjoint()
}

/// `Tr(ρ m_z)`.
pub fn mz_of_density(rho: &DMatrix<Complex64>) -> f64 {
    let n = (rho.nrows() - 1) as f64;
    (0..rho.nrows())
        .map(|k| rho[(k, k)].re * (1.0 - 2.0 * k as f64 / n))
        .sum()
}

/// `Tr ρ²`.
pub fn purity(rho: &DMatrix<Complex64>) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}

/// Upper bound on `‖generator‖ · substep` for the RK4 integration.
const SUBSTEP_SCALE: f64 = 0.01;

/// Integrates `∂_t ρ = −i[H_0, ρ] + (γ/S)(S_−ρS_+ − ½{S_+S_−, ρ})` with RK4
/// substeps of `δt` (refined until the generator norm times the substep is
/// small), applying `ρ → U_K ρ U_K†` at the end of every period.
///
/// Returns `ρ(t_n^+)` for `n = 1..=n_periods`. Each returned state is checked
/// for unit trace and positivity.
pub fn lindblad_dense_oracle(
    rho0: &DMatrix<Complex64>,
    params: &ModelParams,
    n_periods: usize,
) -> Result<Vec<DMatrix<Complex64>>> {
    params.validate()?;
    let n = params.n_spins;
    if n > ORACLE_MAX_SPINS {
        return Err(Error::SizeTooLarge {
            n,
            max: ORACLE_MAX_SPINS,
        });
    }
    let d = n + 1;
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho0.nrows(),
        });
    }
    check_density(rho0, 0)?;
    let ops = build_collective_ops(n)?;
    let h_nh = non_hermitian_hamiltonian(&ops, params.h, params.gamma);
    let h_nh_adj = h_nh.adjoint();
    let rate = params.gamma / params.spin();
    let lower = ops.sminus_matrix().map(|x| Complex64::new(x, 0.0));
    let raise = lower.transpose();
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |rho: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let coherent = (&h_nh * rho - rho * &h_nh_adj) * minus_i;
        coherent + (&lower * rho * &raise) * Complex64::new(rate, 0.0)
    };
    // generator norm bound times the substep stays below SUBSTEP_SCALE
    let row_sum = |m: &DMatrix<Complex64>| {
        m.row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let bound = 2.0 * row_sum(&h_nh) + rate * row_sum(&lower).powi(2);
    let steps = params.quantum_steps()?;
    let substeps = ((bound * params.tau / steps as f64) / SUBSTEP_SCALE)
        .ceil()
        .max(1.0) as usize;
    let steps = steps * substeps;
    let dt = params.tau / steps as f64;
    let kick = kick_diagonal(n, params.kick);

    let mut rho = rho0.clone();
    let mut out = Vec::with_capacity(n_periods);
    for period in 1..=n_periods {
        for _ in 0..steps {
            let k1 = rhs(&rho);
            let k2 = rhs(&(&rho + &k1 * Complex64::new(0.5 * dt, 0.0)));
            let k3 = rhs(&(&rho + &k2 * Complex64::new(0.5 * dt, 0.0)));
            let k4 = rhs(&(&rho + &k3 * Complex64::new(dt, 0.0)));
            rho += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                * Complex64::new(dt / 6.0, 0.0);
        }
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] *= kick[i] * kick[j].conj();
            }
        }
        check_density(&rho, period)?;
        out.push(rho.clone());
    }
    Ok(out)
}

fn check_density(rho: &DMatrix<Complex64>, period: usize) -> Result<()> {
    let trace: Complex64 = rho.diagonal().iter().sum();
    if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
        return Err(Error::InvariantViolated(format!(
            "trace {trace} at period {period}"
        )));
    }
    let herm = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min = herm
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min < -POSITIVITY_TOL {
        return Err(Error::InvariantViolated(format!(
            "negative eigenvalue {min} at period {period}"
        )));
    }
    Ok(())
}
