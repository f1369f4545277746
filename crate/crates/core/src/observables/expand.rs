//! Expansion of Dicke-sector states into the full `2^N` tensor-product space.
//!
//! Bit `i` of a basis index is site `i`; a set bit is a down spin.

use num_complex::Complex64;

use crate::combinatorics::LnFactorials;
use crate::error::{Error, Result};
use crate::spin::DickeState;

/// Largest `N` for the full-space expansion.
pub const FULL_SPACE_MAX_SPINS: usize = 12;

/// Spreads `c_k` over the `C(N,k)` bitstrings of weight `k` as `c_k / √C(N,k)`.
pub fn dicke_to_full(psi: &DickeState) -> Result<Vec<Complex64>> {
    let n = psi.n_spins();
    if n > FULL_SPACE_MAX_SPINS {
        return Err(Error::SizeTooLarge {
            n,
            max: FULL_SPACE_MAX_SPINS,
        });
    }
    let lf = LnFactorials::new(n);
    let scale: Vec<f64> = (0..=n)
        .map(|k| (-0.5 * lf.ln_binomial(n, k)).exp())
        .collect();
    Ok((0..1usize << n)
        .map(|x| {
            let k = x.count_ones() as usize;
            psi.amps()[k] * scale[k]
        })
        .collect())
}

/// Projects a full-space vector onto the Dicke sector, `c_k = ⟨D_k|v⟩`.
///
/// The result is not renormalized.
pub fn full_to_dicke(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let dim = v.len();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::param(
            "v",
            format!("length {dim} is not 2^N with N ≥ 1"),
        ));
    }
    let n = dim.trailing_zeros() as usize;
    if n > FULL_SPACE_MAX_SPINS {
        return Err(Error::SizeTooLarge {
            n,
            max: FULL_SPACE_MAX_SPINS,
        });
    }
    let lf = LnFactorials::new(n);
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    for (x, z) in v.iter().enumerate() {
        c[x.count_ones() as usize] += z;
    }
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= (-0.5 * lf.ln_binomial(n, k)).exp();
    }
    Ok(c)
}
