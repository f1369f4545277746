//! Collective spin algebra in the maximum-spin (Dicke) sector.
//!
//! Basis index `k` counts down spins: `|k⟩ = |N/2, N/2 - k⟩`, so `k = 0` is
//! the fully polarized up state and `k = N` is annihilated by `S_-`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochVector;
use crate::combinatorics::LnFactorials;
use crate::error::{Error, Result};

/// Tolerance on `Σ|c_k|² = 1` for states handed across the API.
pub const NORM_TOL: f64 = 1e-10;

/// Pure state in the Dicke basis, `Σ_k c_k |N/2, N/2 - k⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DickeState {
    n_spins: usize,
    amps: Vec<Complex64>,
}

impl DickeState {
    /// Wraps already-normalized amplitudes.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n_spins = dims_to_spins(amps.len())?;
        let norm_sqr = norm_sqr(&amps);
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm_sqr });
        }
        Ok(Self { n_spins, amps })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let n_spins = dims_to_spins(amps.len())?;
        let norm_sqr = norm_sqr(&amps);
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::Unnormalized { norm_sqr });
        }
        let s = norm_sqr.sqrt().recip();
        amps.iter_mut().for_each(|c| *c *= s);
        Ok(Self { n_spins, amps })
    }

    /// Dicke basis state with `k` down spins.
    pub fn basis(n_spins: usize, k: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::param("N", "must be at least 1"));
        }
        if k > n_spins {
            return Err(Error::param(
                "k",
                format!("must be ≤ N = {n_spins}, got {k}"),
            ));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n_spins + 1];
        amps[k] = Complex64::new(1.0, 0.0);
        Ok(Self { n_spins, amps })
    }

    /// Fully polarized state `|N/2, N/2⟩`.
    pub fn polarized_up(n_spins: usize) -> Result<Self> {
        Self::basis(n_spins, 0)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DickeState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn dims_to_spins(dim: usize) -> Result<usize> {
    if dim < 2 {
        return Err(Error::param(
            "amps",
            format!("need at least 2 amplitudes, got {dim}"),
        ));
    }
    Ok(dim - 1)
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Collective operators of `N` spins-1/2 restricted to the Dicke sector.
///
/// All matrix elements are real; `S_z`, `S_z²` and `S_+S_-` are diagonal and
/// `S_±` have a single off-diagonal band.
#[derive(Debug, Clone)]
pub struct CollectiveOps {
    n_spins: usize,
    /// `S_z|k⟩ = (N/2 - k)|k⟩`
    sz: Vec<f64>,
    /// `S_-|k⟩ = lower[k] |k+1⟩`, `lower[k] = √((N-k)(k+1))`, length `N`.
    lower: Vec<f64>,
    /// `S_+S_-|k⟩ = (N-k)(k+1)|k⟩`
    splus_sminus: Vec<f64>,
}

/// Builds the collective operators for `N ≥ 1` spins.
pub fn build_collective_ops(n_spins: usize) -> Result<CollectiveOps> {
    if n_spins == 0 {
        return Err(Error::param("N", "must be at least 1"));
    }
    let n = n_spins as f64;
    let sz = (0..=n_spins).map(|k| n / 2.0 - k as f64).collect();
    let splus_sminus: Vec<f64> = (0..=n_spins)
        .map(|k| (n - k as f64) * (k as f64 + 1.0))
        .collect();
    let lower = splus_sminus[..n_spins].iter().map(|x| x.sqrt()).collect();
    Ok(CollectiveOps {
        n_spins,
        sz,
        lower,
        splus_sminus,
    })
}

impl CollectiveOps {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    pub fn sz_diag(&self) -> &[f64] {
        &self.sz
    }

    /// Sub-diagonal band of `S_-` (`⟨k+1|S_-|k⟩`).
    pub fn lowering_band(&self) -> &[f64] {
        &self.lower
    }

    pub fn splus_sminus_diag(&self) -> &[f64] {
        &self.splus_sminus
    }

    pub fn sz2_diag(&self) -> Vec<f64> {
        self.sz.iter().map(|m| m * m).collect()
    }

    /// `out = S_- v`.
    pub fn apply_lowering(&self, v: &[Complex64], out: &mut [Complex64]) {
        out[0] = Complex64::new(0.0, 0.0);
        for k in 0..self.n_spins {
            out[k + 1] = v[k] * self.lower[k];
        }
    }

    /// `out = S_+ v`.
    pub fn apply_raising(&self, v: &[Complex64], out: &mut [Complex64]) {
        for k in 0..self.n_spins {
            out[k] = v[k + 1] * self.lower[k];
        }
        out[self.n_spins] = Complex64::new(0.0, 0.0);
    }

    pub fn sz_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.sz))
    }

    pub fn sminus_matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (k, &l) in self.lower.iter().enumerate() {
            m[(k + 1, k)] = l;
        }
        m
    }

    pub fn splus_matrix(&self) -> DMatrix<f64> {
        self.sminus_matrix().transpose()
    }

    /// `S_x = (S_+ + S_-)/2`.
    pub fn sx_matrix(&self) -> DMatrix<f64> {
        (self.splus_matrix() + self.sminus_matrix()) * 0.5
    }

    /// `S_y = (S_+ - S_-)/(2i)`, the only complex one.
    pub fn sy_matrix(&self) -> DMatrix<Complex64> {
        let diff = self.splus_matrix() - self.sminus_matrix();
        diff.map(|x| Complex64::new(0.0, -0.5 * x))
    }

    pub fn sz2_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.sz2_diag()))
    }

    pub fn splus_sminus_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.splus_sminus))
    }

    /// `(⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩)` for an arbitrary (not necessarily normalized) vector.
    pub fn expectations(&self, v: &[Complex64]) -> [f64; 3] {
        // ⟨S_-⟩ = Σ_k conj(c_{k+1}) lower[k] c_k
        let mut sminus = Complex64::new(0.0, 0.0);
        for k in 0..self.n_spins {
            sminus += v[k + 1].conj() * v[k] * self.lower[k];
        }
        let sz = v.iter().zip(&self.sz).map(|(c, m)| c.norm_sqr() * m).sum();
        // ⟨S_+⟩ = conj⟨S_-⟩, S_x = (S_+ + S_-)/2, S_y = (S_+ - S_-)/(2i)
        let sx = sminus.re;
        let sy = -sminus.im;
        [sx, sy, sz]
    }
}

/// Spin coherent state pointing along `(θ, φ)`.
///
/// `c_k = √C(N,k) cos(θ/2)^{N-k} (sin(θ/2) e^{iφ})^k`, evaluated in log space.
pub fn spin_coherent_state(n_spins: usize, theta: f64, phi: f64) -> Result<DickeState> {
    if n_spins == 0 {
        return Err(Error::param("N", "must be at least 1"));
    }
    if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
        return Err(Error::param(
            "theta",
            format!("must lie in [0, π], got {theta}"),
        ));
    }
    if !(phi.is_finite() && (0.0..std::f64::consts::TAU).contains(&phi)) {
        return Err(Error::param(
            "phi",
            format!("must lie in [0, 2π), got {phi}"),
        ));
    }
    let lf = LnFactorials::new(n_spins);
    let (s, c) = (0.5 * theta).sin_cos();
    let amps = (0..=n_spins)
        .map(|k| {
            let up = n_spins - k;
            let magnitude = if (up > 0 && c == 0.0) || (k > 0 && s == 0.0) {
                0.0
            } else {
                let ln_mag = 0.5 * lf.ln_binomial(n_spins, k)
                    + if up > 0 { up as f64 * c.ln() } else { 0.0 }
                    + if k > 0 { k as f64 * s.ln() } else { 0.0 };
                ln_mag.exp()
            };
            Complex64::from_polar(magnitude, k as f64 * phi)
        })
        .collect();
    // normalized analytically; renormalize to absorb rounding
    DickeState::normalized(amps)
}

/// Magnetization `m_α = ⟨S_α⟩ / (N/2)`; not projected onto the sphere.
pub fn bloch_from_state(ops: &CollectiveOps, psi: &DickeState) -> Result<BlochVector> {
    if psi.n_spins() != ops.n_spins() {
        return Err(Error::DimensionMismatch {
            expected: ops.dim(),
            got: psi.dim(),
        });
    }
    let s = ops.n_spins() as f64 / 2.0;
    let [sx, sy, sz] = ops.expectations(psi.amps());
    Ok(BlochVector::new(sx / s, sy / s, sz / s))
}
