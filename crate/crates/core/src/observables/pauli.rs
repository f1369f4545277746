//! Stabilizer 2-Rényi entropy of Dicke-sector states.
//!
//! Pauli strings that differ by a permutation of sites share their
//! expectation value on permutation-symmetric states, so the sum over the
//! `4^N` strings collapses onto classes `(a, b, c)` of `a` X, `b` Y and `c` Z
//! factors weighted by their multiplicity `N!/(a! b! c! d!)`.
//!
//! For a representative string (X, then Y, then Z, then identities) and the
//! rescaled amplitudes `ã_k = c_k / √C(N,k)`,
//!
//! ```text
//! ⟨P⟩ = i^b Σ_u F(u) Σ_v G(v) conj(ã_{f-u+v}) ã_{u+v},   f = a + b,
//! ```
//!
//! where `F(u)` is the coefficient of `x^u` in `(1+x)^a (1-x)^b` (down spins
//! in the flip block, signed by Y) and `G(v)` that of `(1-x)^c (1+x)^d` (down
//! spins in the diagonal block, signed by Z).

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::LnFactorials;
use crate::error::{Error, Result};
use crate::spin::DickeState;

/// Largest `N` accepted by [`SreKernel`]; keeps `4^N` multiplicities finite.
pub const SRE_MAX_SPINS: usize = 400;

/// Tolerance on the input norm for the SRE.
const SRE_NORM_TOL: f64 = 1e-8;

/// Permutation class of Pauli strings: `a` X, `b` Y, `c` Z and `N-a-b-c` I.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliClass {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl PauliClass {
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        Self { a, b, c }
    }

    pub fn weight(&self) -> usize {
        self.a + self.b + self.c
    }

    fn check(&self, n_spins: usize) -> Result<()> {
        if self.weight() > n_spins {
            return Err(Error::param(
                "class",
                format!("{self:?} has more than N = {n_spins} factors"),
            ));
        }
        Ok(())
    }

    /// `ln [N!/(a! b! c! d!)]`.
    pub fn ln_multiplicity(&self, lf: &LnFactorials, n_spins: usize) -> f64 {
        lf.ln_multinomial4(n_spins, self.a, self.b, self.c)
    }
}

/// Every class for `N` spins.
pub fn pauli_classes(n_spins: usize) -> impl Iterator<Item = PauliClass> {
    (0..=n_spins).flat_map(move |a| {
        (0..=n_spins - a)
            .flat_map(move |b| (0..=n_spins - a - b).map(move |c| PauliClass { a, b, c }))
    })
}

/// Precomputed coefficient tables for one system size.
///
/// `tables[f][a][u]` is the coefficient of `x^u` in `(1+x)^a (1-x)^{f-a}`.
#[derive(Debug, Clone)]
pub struct SreKernel {
    n_spins: usize,
    lf: LnFactorials,
    tables: Vec<Vec<f64>>,
}

impl SreKernel {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::param("N", "must be at least 1"));
        }
        if n_spins > SRE_MAX_SPINS {
            return Err(Error::SizeTooLarge {
                n: n_spins,
                max: SRE_MAX_SPINS,
            });
        }
        let mut tables: Vec<Vec<f64>> = Vec::with_capacity(n_spins + 1);
        tables.push(vec![1.0]);
        for f in 1..=n_spins {
            let prev = &tables[f - 1];
            let w_prev = f;
            let w = f + 1;
            let mut t = vec![0.0; w * w];
            for a in 0..f {
                // multiply row a of the previous table by (1 - x)
                let src = &prev[a * w_prev..(a + 1) * w_prev];
                let dst = &mut t[a * w..(a + 1) * w];
                dst[0] = src[0];
                for u in 1..f {
                    dst[u] = src[u] - src[u - 1];
                }
                dst[f] = -src[f - 1];
            }
            // row f: (1 + x)^f from row f-1 of the previous table
            let src = &prev[(f - 1) * w_prev..f * w_prev];
            let dst = &mut t[f * w..(f + 1) * w];
            dst[0] = src[0];
            for u in 1..f {
                dst[u] = src[u] + src[u - 1];
            }
            dst[f] = src[f - 1];
            tables.push(t);
        }
        Ok(Self {
            n_spins,
            lf: LnFactorials::new(n_spins),
            tables,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    fn row(&self, f: usize, a: usize) -> &[f64] {
        let w = f + 1;
        &self.tables[f][a * w..(a + 1) * w]
    }

    fn check_state(&self, psi: &DickeState) -> Result<()> {
        if psi.n_spins() != self.n_spins {
            return Err(Error::DimensionMismatch {
                expected: self.n_spins + 1,
                got: psi.dim(),
            });
        }
        let norm_sqr = psi.norm_sqr();
        if (norm_sqr - 1.0).abs() > SRE_NORM_TOL {
            return Err(Error::Unnormalized { norm_sqr });
        }
        Ok(())
    }

    fn rescaled(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_spins;
        amps.iter()
            .enumerate()
            .map(|(k, c)| c * (-0.5 * self.lf.ln_binomial(n, k)).exp())
            .collect()
    }

    /// `W(u) = Σ_v G_{c,d}(v) conj(ã_{f-u+v}) ã_{u+v}` for `u = 0..=f`.
    fn diagonal_block(&self, at: &[Complex64], f: usize, c: usize) -> Vec<Complex64> {
        let d = self.n_spins - f - c;
        let g = self.row(c + d, d);
        (0..=f)
            .map(|u| {
                let lo = &at[f - u..];
                let hi = &at[u..];
                g.iter()
                    .zip(lo)
                    .zip(hi)
                    .map(|((&gv, x), y)| x.conj() * y * gv)
                    .sum()
            })
            .collect()
    }

    /// Complex `⟨P⟩` for one class; the imaginary part is rounding noise.
    fn class_value(&self, w: &[Complex64], a: usize, b: usize) -> Complex64 {
        let s: Complex64 = self
            .row(a + b, a)
            .iter()
            .zip(w)
            .map(|(&fu, wu)| wu * fu)
            .sum();
        match b % 4 {
            0 => s,
            1 => Complex64::new(-s.im, s.re),
            2 => -s,
            _ => Complex64::new(s.im, -s.re),
        }
    }

    /// `⟨ψ|P|ψ⟩` for the representative string of `cls`.
    pub fn class_expectation(&self, psi: &DickeState, cls: PauliClass) -> Result<f64> {
        cls.check(self.n_spins)?;
        self.check_state(psi)?;
        let at = self.rescaled(psi.amps());
        let f = cls.a + cls.b;
        let w = self.diagonal_block(&at, f, cls.c);
        let v = self.class_value(&w, cls.a, cls.b);
        debug_assert!(v.im.abs() < 1e-8, "Pauli expectation not real: {v}");
        Ok(v.re)
    }

    /// `Σ_P ⟨P⟩⁴ / 4^N`, summed class by class.
    pub fn fourth_moment(&self, psi: &DickeState) -> Result<f64> {
        self.check_state(psi)?;
        let n = self.n_spins;
        let at = self.rescaled(psi.amps());
        let ln_4n = 2.0 * n as f64 * LN_2;
        let partial: Vec<f64> = (0..=n)
            .into_par_iter()
            .map(|f| {
                let mut acc = 0.0;
                for c in 0..=n - f {
                    let w = self.diagonal_block(&at, f, c);
                    for a in 0..=f {
                        let b = f - a;
                        let p = self.class_value(&w, a, b).re;
                        let cls = PauliClass { a, b, c };
                        acc += (cls.ln_multiplicity(&self.lf, n) - ln_4n).exp() * p.powi(4);
                    }
                }
                acc
            })
            .collect();
        Ok(partial.iter().sum())
    }

    /// `M_2 = −ln[Σ_P ⟨P⟩⁴ / 2^{2N}] − N ln 2`.
    pub fn m2(&self, psi: &DickeState) -> Result<f64> {
        let s = self.fourth_moment(psi)?;
        Ok(-s.ln() - self.n_spins as f64 * LN_2)
    }
}

/// Expectation of a class representative; builds a one-off kernel.
pub fn pauli_class_expectation(psi: &DickeState, cls: PauliClass) -> Result<f64> {
    SreKernel::new(psi.n_spins())?.class_expectation(psi, cls)
}

/// Stabilizer 2-Rényi entropy; builds a one-off kernel.
pub fn sre_m2(psi: &DickeState) -> Result<f64> {
    SreKernel::new(psi.n_spins())?.m2(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_class_is_one() {
        let psi =
            DickeState::normalized(vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, 0.0), c(0.1, -0.4)])
                .unwrap();
        let v = pauli_class_expectation(&psi, PauliClass::new(0, 0, 0)).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triplet_zz_is_minus_one() {
        let psi = DickeState::basis(2, 1).unwrap();
        let v = pauli_class_expectation(&psi, PauliClass::new(0, 0, 2)).unwrap();
        assert!((v + 1.0).abs() < 1e-14);
        let xx = pauli_class_expectation(&psi, PauliClass::new(2, 0, 0)).unwrap();
        assert!((xx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn single_spin_expectations() {
        // (|↑⟩ + e^{iπ/4}|↓⟩)/√2 has ⟨X⟩ = ⟨Y⟩ = 1/√2
        let ph = Complex64::from_polar(FRAC_1_SQRT_2, std::f64::consts::FRAC_PI_4);
        let psi = DickeState::new(vec![c(FRAC_1_SQRT_2, 0.0), ph]).unwrap();
        let x = pauli_class_expectation(&psi, PauliClass::new(1, 0, 0)).unwrap();
        let y = pauli_class_expectation(&psi, PauliClass::new(0, 1, 0)).unwrap();
        let z = pauli_class_expectation(&psi, PauliClass::new(0, 0, 1)).unwrap();
        assert!((x - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((y - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(z.abs() < 1e-14);
        assert!((sre_m2(&psi).unwrap() - (4.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn stabilizer_states_have_zero_magic() {
        for n in [1, 2, 5, 16, 64] {
            let up = DickeState::polarized_up(n).unwrap();
            assert!(sre_m2(&up).unwrap().abs() < 1e-9, "N = {n}");
        }
        let triplet = DickeState::basis(2, 1).unwrap();
        assert!(sre_m2(&triplet).unwrap().abs() < 1e-12);
    }

    #[test]
    fn class_multiplicities_partition_all_strings() {
        for n in [1usize, 3, 8, 30] {
            let lf = LnFactorials::new(n);
            let total: f64 = pauli_classes(n)
                .map(|cls| (cls.ln_multiplicity(&lf, n) - 2.0 * n as f64 * LN_2).exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "N = {n}: {total}");
        }
    }

    #[test]
    fn tables_match_binomial_expansion() {
        let k = SreKernel::new(6).unwrap();
        // (1+x)^2 (1-x)^3 = 1 - x - 2x^2 + 2x^3 + x^4 - x^5
        assert_eq!(k.row(5, 2), &[1.0, -1.0, -2.0, 2.0, 1.0, -1.0]);
        assert_eq!(k.row(4, 4), &[1.0, 4.0, 6.0, 4.0, 1.0]);
        assert_eq!(k.row(3, 0), &[1.0, -3.0, 3.0, -1.0]);
    }

    #[test]
    fn rejects_unnormalized_and_oversized() {
        let k = SreKernel::new(2).unwrap();
        let bad = DickeState::basis(3, 0).unwrap();
        assert!(k.m2(&bad).is_err());
        assert!(SreKernel::new(SRE_MAX_SPINS + 1).is_err());
        assert!(pauli_class_expectation(
            &DickeState::basis(2, 0).unwrap(),
            PauliClass::new(2, 1, 0)
        )
        .is_err());
    }
}
