//! Bipartite entanglement entropy of Dicke-sector states.
//!
//! Splitting the `N` spins into blocks of `N_A` and `N_B = N - N_A`, a Dicke
//! state decomposes as
//! `|D_k⟩ = Σ_{k_A + k_B = k} √(C(N_A,k_A) C(N_B,k_B) / C(N,k)) |D_{k_A}⟩|D_{k_B}⟩`,
//! so the Schmidt coefficients are the singular values of a small matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::combinatorics::LnFactorials;
use crate::error::{Error, Result};
use crate::spin::DickeState;

/// Combinatorial weights of the `N_A | N_B` split.
#[derive(Debug, Clone)]
pub struct SchmidtWeights {
    n_spins: usize,
    n_a: usize,
    /// `weights[k_A * (N_B+1) + k_B]`
    weights: Vec<f64>,
}

impl SchmidtWeights {
    pub fn new(n_spins: usize, n_a: usize) -> Result<Self> {
        if n_spins < 2 || n_a == 0 || n_a >= n_spins {
            return Err(Error::param(
                "N_A",
                format!("must satisfy 1 ≤ N_A ≤ N-1 with N = {n_spins}, got {n_a}"),
            ));
        }
        let n_b = n_spins - n_a;
        let lf = LnFactorials::new(n_spins);
        let mut weights = Vec::with_capacity((n_a + 1) * (n_b + 1));
        for ka in 0..=n_a {
            for kb in 0..=n_b {
                let ln_w = lf.ln_binomial(n_a, ka) + lf.ln_binomial(n_b, kb)
                    - lf.ln_binomial(n_spins, ka + kb);
                weights.push((0.5 * ln_w).exp());
            }
        }
        Ok(Self {
            n_spins,
            n_a,
            weights,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    /// `M[k_A][k_B] = c_{k_A+k_B} √(C(N_A,k_A) C(N_B,k_B) / C(N,k_A+k_B))`.
    pub fn schmidt_matrix(&self, amps: &[Complex64]) -> Result<DMatrix<Complex64>> {
        if amps.len() != self.n_spins + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins + 1,
                got: amps.len(),
            });
        }
        let n_b = self.n_spins - self.n_a;
        Ok(DMatrix::from_fn(self.n_a + 1, n_b + 1, |ka, kb| {
            amps[ka + kb] * self.weights[ka * (n_b + 1) + kb]
        }))
    }

    /// Squared Schmidt coefficients, descending.
    pub fn schmidt_spectrum(&self, amps: &[Complex64]) -> Result<Vec<f64>> {
        let m = self.schmidt_matrix(amps)?;
        // reduced density matrix on the smaller side
        let rho = if m.nrows() <= m.ncols() {
            &m * m.adjoint()
        } else {
            m.adjoint() * &m
        };
        let mut p: Vec<f64> = rho
            .symmetric_eigenvalues()
            .iter()
            .map(|&x| x.max(0.0))
            .collect();
        p.sort_by(|a, b| b.total_cmp(a));
        Ok(p)
    }

    /// `−Σ s² ln s²` with `0 ln 0 = 0`.
    pub fn entropy(&self, amps: &[Complex64]) -> Result<f64> {
        let p = self.schmidt_spectrum(amps)?;
        Ok(p.iter()
            .filter(|&&x| x > 0.0)
            .map(|&x| -x * x.ln())
            .sum::<f64>()
            .max(0.0))
    }
}

/// Entanglement entropy of the first `N_A` spins with the rest.
pub fn entanglement_entropy(psi: &DickeState, n_a: usize) -> Result<f64> {
    SchmidtWeights::new(psi.n_spins(), n_a)?.entropy(psi.amps())
}

/// Half-system bipartition, `N_A = ⌊N/2⌋`.
pub fn half_system_entropy(psi: &DickeState) -> Result<f64> {
    entanglement_entropy(psi, psi.n_spins() / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn product_state_is_unentangled() {
        for n in [2, 7, 40] {
            let up = DickeState::polarized_up(n).unwrap();
            assert!(half_system_entropy(&up).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn two_spin_triplet() {
        let psi = DickeState::basis(2, 1).unwrap();
        assert!((entanglement_entropy(&psi, 1).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn schmidt_matrix_has_unit_norm() {
        let amps: Vec<Complex64> = (0..=9)
            .map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos()))
            .collect();
        let psi = DickeState::normalized(amps).unwrap();
        let w = SchmidtWeights::new(9, 4).unwrap();
        let m = w.schmidt_matrix(psi.amps()).unwrap();
        assert!((m.norm() - 1.0).abs() < 1e-12);
        let p = w.schmidt_spectrum(psi.amps()).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn bounded_by_smaller_block() {
        let amps: Vec<Complex64> = (0..=12).map(|k| Complex64::new(1.0, k as f64)).collect();
        let psi = DickeState::normalized(amps).unwrap();
        for n_a in 1..12 {
            let e = entanglement_entropy(&psi, n_a).unwrap();
            let bound = ((n_a.min(12 - n_a) + 1) as f64).ln();
            assert!(e <= bound + 1e-12 && e >= 0.0);
        }
    }

    #[test]
    fn rejects_bad_cut() {
        let psi = DickeState::polarized_up(4).unwrap();
        assert!(entanglement_entropy(&psi, 0).is_err());
        assert!(entanglement_entropy(&psi, 4).is_err());
    }
}
