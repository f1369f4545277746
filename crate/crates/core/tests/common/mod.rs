//! Brute-force references on the full `2^N` tensor-product space.
//!
//! Bit `i` of a basis index is site `i`; a set bit is a down spin, matching
//! `kicktop::observables::dicke_to_full`.

#![allow(dead_code)]

use kicktop::DickeState;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    Id,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::Id, Pauli::X, Pauli::Y, Pauli::Z];
}

/// Gaussian random Dicke-sector state.
pub fn random_dicke(n_spins: usize, seed: u64) -> DickeState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..=n_spins)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    DickeState::normalized(amps).unwrap()
}

/// `P|v⟩` for a string with one factor per site.
pub fn apply_string(string: &[Pauli], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (x, &amp) in v.iter().enumerate() {
        let mut y = x;
        let mut phase = Complex64::new(1.0, 0.0);
        for (site, p) in string.iter().enumerate() {
            let down = x >> site & 1 == 1;
            match p {
                Pauli::Id => {}
                Pauli::X => y ^= 1 << site,
                Pauli::Y => {
                    // Y|↑⟩ = i|↓⟩, Y|↓⟩ = −i|↑⟩
                    y ^= 1 << site;
                    phase *= if down { -I } else { I };
                }
                Pauli::Z => {
                    if down {
                        phase = -phase;
                    }
                }
            }
        }
        out[y] += phase * amp;
    }
    out
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `⟨v|P|v⟩`, real for Hermitian `P`.
pub fn string_expectation(string: &[Pauli], v: &[Complex64]) -> f64 {
    let z = inner(v, &apply_string(string, v));
    assert!(z.im.abs() < 1e-12, "non-real Pauli expectation {z}");
    z.re
}

/// `−ln(2^{−N} Σ_P ⟨P⟩⁴)` over all `4^N` strings.
pub fn brute_force_m2(v: &[Complex64]) -> f64 {
    let n = v.len().trailing_zeros() as usize;
    let mut string = vec![Pauli::Id; n];
    let mut total = 0.0;
    for code in 0..1usize << (2 * n) {
        for (site, s) in string.iter_mut().enumerate() {
            *s = Pauli::ALL[code >> (2 * site) & 3];
        }
        total += string_expectation(&string, v).powi(4);
    }
    -(total / (1usize << n) as f64).ln()
}

/// Von Neumann entropy of sites `0..n_a` from the full reduced density matrix.
pub fn brute_force_entropy(v: &[Complex64], n_a: usize) -> f64 {
    let n = v.len().trailing_zeros() as usize;
    let (da, db) = (1usize << n_a, 1usize << (n - n_a));
    // low bits are block A
    let m = DMatrix::from_fn(da, db, |a, b| v[a | b << n_a]);
    let rho_a = &m * m.adjoint();
    rho_a
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.ln())
        .sum()
}

/// `Σ_i σ^α_i / 2` on the full space.
pub fn collective(p: Pauli, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len().trailing_zeros() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for site in 0..n {
        let mut string = vec![Pauli::Id; n];
        string[site] = p;
        for (o, w) in out.iter_mut().zip(apply_string(&string, v)) {
            *o += 0.5 * w;
        }
    }
    out
}

/// `Σ_i σ^-_i` with `σ^- |↑⟩ = |↓⟩`.
pub fn collective_lowering(v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len().trailing_zeros() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (x, &amp) in v.iter().enumerate() {
        for site in 0..n {
            if x >> site & 1 == 0 {
                out[x | 1 << site] += amp;
            }
        }
    }
    out
}
