//! Functionals of pure Dicke-sector states: magnetization, magic and
//! entanglement.

pub mod entanglement;
pub mod expand;
pub mod pauli;

use num_complex::Complex64;

use crate::spin::DickeState;

pub use entanglement::{entanglement_entropy, half_system_entropy, SchmidtWeights};
pub use expand::{dicke_to_full, full_to_dicke, FULL_SPACE_MAX_SPINS};
pub use pauli::{
    pauli_class_expectation, pauli_classes, sre_m2, PauliClass, SreKernel, SRE_MAX_SPINS,
};

/// `⟨m_z⟩ = Σ_k |c_k|² (N/2 − k) / (N/2)`.
pub fn mz_expect(psi: &DickeState) -> f64 {
    mz_of_amps(psi.amps())
}

/// [`mz_expect`] on raw amplitudes, normalized by their own norm.
pub fn mz_of_amps(amps: &[Complex64]) -> f64 {
    let n = (amps.len() - 1) as f64;
    let (mut num, mut norm) = (0.0, 0.0);
    for (k, c) in amps.iter().enumerate() {
        let p = c.norm_sqr();
        num += p * (1.0 - 2.0 * k as f64 / n);
        norm += p;
    }
    num / norm
}
