//! Kick, free and no-jump propagators in the Dicke basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseOp;
use crate::params::ModelParams;
use crate::spin::{build_collective_ops, CollectiveOps};

/// Default limit on `N` for propagator construction.
pub const DEFAULT_MAX_SPINS: usize = 1024;

/// `H_0 = −2h S_x + (2/N) S_z²`.
pub fn free_hamiltonian(ops: &CollectiveOps, h: f64) -> DMatrix<Complex64> {
    let n = ops.n_spins() as f64;
    let h0 = ops.sx_matrix() * (-2.0 * h) + ops.sz2_matrix() * (2.0 / n);
    h0.map(|x| Complex64::new(x, 0.0))
}

/// `H_nH = H_0 − i (γ/2S) S_+S_−` with `S = N/2`.
pub fn non_hermitian_hamiltonian(ops: &CollectiveOps, h: f64, gamma: f64) -> DMatrix<Complex64> {
    let n = ops.n_spins() as f64;
    let mut m = free_hamiltonian(ops, h);
    for (k, &d) in ops.splus_sminus_diag().iter().enumerate() {
        m[(k, k)] -= Complex64::new(0.0, gamma / n * d);
    }
    m
}

/// Diagonal of `U_K = exp(−i K S_z² / S)`: `exp(−i 2K (N/2 − k)² / N)`.
pub fn kick_diagonal(n_spins: usize, kick: f64) -> Vec<Complex64> {
    let n = n_spins as f64;
    (0..=n_spins)
        .map(|k| {
            let m = n / 2.0 - k as f64;
            Complex64::from_polar(1.0, -2.0 * kick * m * m / n)
        })
        .collect()
}

/// `exp(−i H t)`.
pub fn evolution_operator(hamiltonian: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    (hamiltonian * Complex64::new(0.0, -t)).exp()
}

/// Tridiagonal `H_nH = H_0 − iΓ` for propagation over times off the `δt` grid.
#[derive(Debug, Clone)]
pub struct BandedGenerator {
    diag: Vec<Complex64>,
    /// `⟨k+1|H_0|k⟩ = ⟨k|H_0|k+1⟩`
    off: Vec<f64>,
    /// `Γ = (γ/2S) S_+S_−`
    decay: Vec<f64>,
    /// Upper bound on `‖H_nH‖`.
    bound: f64,
}

impl BandedGenerator {
    pub fn new(ops: &CollectiveOps, h: f64, gamma: f64) -> Self {
        let n = ops.n_spins() as f64;
        let decay: Vec<f64> = ops
            .splus_sminus_diag()
            .iter()
            .map(|d| gamma / n * d)
            .collect();
        let diag: Vec<Complex64> = ops
            .sz2_diag()
            .iter()
            .zip(&decay)
            .map(|(m2, g)| Complex64::new(2.0 / n * m2, -g))
            .collect();
        let off: Vec<f64> = ops.lowering_band().iter().map(|l| -h * l).collect();
        let bound = (0..diag.len())
            .map(|k| {
                let left = if k > 0 { off[k - 1].abs() } else { 0.0 };
                let right = off.get(k).map_or(0.0, |x| x.abs());
                diag[k].norm() + left + right
            })
            .fold(0.0, f64::max);
        Self {
            diag,
            off,
            decay,
            bound,
        }
    }

    /// `out = H_nH v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let mut acc = self.diag[k] * v[k];
            if k > 0 {
                acc += v[k - 1] * self.off[k - 1];
            }
            if k < self.off.len() {
                acc += v[k + 1] * self.off[k];
            }
            *o = acc;
        }
    }

    /// `exp(−i H_nH s) v`, as a Taylor series on chunks with `|s|‖H‖ ≤ 1`.
    /// Negative `s` is fine for the short backward corrections of a root search.
    pub fn propagate(&self, v: &[Complex64], s: f64) -> Vec<Complex64> {
        let chunks = (s.abs() * self.bound).ceil().max(1.0) as usize;
        let step = Complex64::new(0.0, -s / chunks as f64);
        let mut sum = v.to_vec();
        let mut term = vec![Complex64::new(0.0, 0.0); v.len()];
        let mut next = term.clone();
        for _ in 0..chunks {
            term.copy_from_slice(&sum);
            for j in 1..=40 {
                self.apply(&term, &mut next);
                let c = step / j as f64;
                let mut size = 0.0f64;
                for ((t, x), acc) in term.iter_mut().zip(&next).zip(sum.iter_mut()) {
                    *t = x * c;
                    *acc += *t;
                    size = size.max(t.norm_sqr());
                }
                if size <= 1e-36 {
                    break;
                }
            }
        }
        sum
    }

    /// `⟨v|Γ|v⟩`, so that `d‖v(s)‖²/ds = −2⟨v|Γ|v⟩`.
    pub fn decay_expectation(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(&self.decay)
            .map(|(z, g)| z.norm_sqr() * g)
            .sum()
    }
}

/// Everything a trajectory needs for one parameter set, shared read-only.
#[derive(Debug, Clone)]
pub struct FloquetPropagators {
    n_spins: usize,
    gamma: f64,
    steps: usize,
    dt: f64,
    ops: CollectiveOps,
    generator: BandedGenerator,
    kick: Vec<Complex64>,
    /// `exp(−i H_nH δt)`
    nojump: DMatrix<Complex64>,
    /// `exp(−i H_nH 2^j δt)` for `2^j ≤ steps`, hot-path layout.
    powers: Vec<DenseOp>,
    /// `exp(−i H_nH τ)`
    period: DenseOp,
    /// `U_K exp(−i H_0 τ)`, only when `γ = 0`.
    floquet: Option<DenseOp>,
}

/// Builds the propagators with the default size limit.
pub fn build_propagators(params: &ModelParams) -> Result<FloquetPropagators> {
    build_propagators_with_limit(params, DEFAULT_MAX_SPINS)
}

pub fn build_propagators_with_limit(
    params: &ModelParams,
    max_spins: usize,
) -> Result<FloquetPropagators> {
    params.validate()?;
    if params.n_spins > max_spins {
        return Err(Error::SizeTooLarge {
            n: params.n_spins,
            max: max_spins,
        });
    }
    let steps = params.quantum_steps()?;
    let dt = params.tau / steps as f64;
    let ops = build_collective_ops(params.n_spins)?;
    let h_nh = non_hermitian_hamiltonian(&ops, params.h, params.gamma);
    let nojump = evolution_operator(&h_nh, dt);

    let mut powers = vec![DenseOp::from_matrix(&nojump)];
    let mut current = nojump.clone();
    let mut span = 1usize;
    while span * 2 <= steps {
        current = &current * &current;
        span *= 2;
        powers.push(DenseOp::from_matrix(&current));
    }

    let full = evolution_operator(&h_nh, params.tau);
    let kick = kick_diagonal(params.n_spins, params.kick);
    let floquet = (params.gamma == 0.0).then(|| {
        let mut f = full.clone();
        for (k, mut row) in f.row_iter_mut().enumerate() {
            row *= kick[k];
        }
        DenseOp::from_matrix(&f)
    });
    Ok(FloquetPropagators {
        n_spins: params.n_spins,
        gamma: params.gamma,
        steps,
        dt,
        generator: BandedGenerator::new(&ops, params.h, params.gamma),
        ops,
        kick,
        nojump,
        powers,
        period: DenseOp::from_matrix(&full),
        floquet,
    })
}

impl FloquetPropagators {
    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    pub fn dim(&self) -> usize {
        self.n_spins + 1
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `τ / δt`.
    pub fn steps_per_period(&self) -> usize {
        self.steps
    }

    /// `δt`.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn generator(&self) -> &BandedGenerator {
        &self.generator
    }

    pub fn ops(&self) -> &CollectiveOps {
        &self.ops
    }

    pub fn kick_diagonal(&self) -> &[Complex64] {
        &self.kick
    }

    /// `exp(−i H_nH δt)`.
    pub fn nojump_matrix(&self) -> &DMatrix<Complex64> {
        &self.nojump
    }

    pub(crate) fn step_op(&self) -> &DenseOp {
        &self.powers[0]
    }

    pub(crate) fn powers(&self) -> &[DenseOp] {
        &self.powers
    }

    pub(crate) fn period_op(&self) -> &DenseOp {
        &self.period
    }

    pub(crate) fn floquet_op(&self) -> Option<&DenseOp> {
        self.floquet.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn taylor_exp(m: &DMatrix<Complex64>, terms: usize) -> DMatrix<Complex64> {
        let n = m.nrows();
        let mut out = DMatrix::<Complex64>::identity(n, n);
        let mut term = out.clone();
        for j in 1..terms {
            term = &term * m / Complex64::new(j as f64, 0.0);
            out += &term;
        }
        out
    }

    #[test]
    fn unitary_without_decay() {
        let p = ModelParams::quantum(12, 0.5, 3.0, 0.0);
        let props = build_propagators(&p).unwrap();
        let u = props.nojump_matrix();
        let id = DMatrix::<Complex64>::identity(13, 13);
        assert!(max_abs_diff(&(u.adjoint() * u), &id) < 1e-10);
    }

    #[test]
    fn no_kick_is_identity() {
        assert!(kick_diagonal(9, 0.0)
            .iter()
            .all(|z| *z == Complex64::new(1.0, 0.0)));
        assert!(kick_diagonal(9, 4.2)
            .iter()
            .all(|z| (z.norm() - 1.0).abs() < 1e-15));
    }

    #[test]
    fn matches_series_expansion() {
        let p = ModelParams::quantum(6, 0.7, 1.0, 0.4);
        let props = build_propagators(&p).unwrap();
        let ops = build_collective_ops(6).unwrap();
        let gen = non_hermitian_hamiltonian(&ops, 0.7, 0.4) * Complex64::new(0.0, -0.01);
        assert!(max_abs_diff(props.nojump_matrix(), &taylor_exp(&gen, 20)) < 1e-14);
    }

    #[test]
    fn dark_state_column_keeps_its_norm() {
        let p = ModelParams::quantum(4, 0.5, 0.0, 0.3);
        let props = build_propagators(&p).unwrap();
        let u = props.nojump_matrix();
        for j in 0..5 {
            let norm = u.column(j).norm();
            assert!(norm <= 1.0 + 1e-12, "column {j}: {norm}");
        }
        // with h = 0 the dark state k = N is an exact eigenvector of H_nH
        let p0 = ModelParams::quantum(4, 0.0, 0.0, 0.3);
        let u0 = build_propagators(&p0).unwrap().nojump_matrix().clone();
        assert!((u0.column(4).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn banded_generator_matches_dense_exponential() {
        let p = ModelParams::quantum(30, 0.8, 1.0, 0.3);
        let props = build_propagators(&p).unwrap();
        let ops = build_collective_ops(30).unwrap();
        let h_nh = non_hermitian_hamiltonian(&ops, 0.8, 0.3);
        let v = crate::spin::spin_coherent_state(30, 1.0, 0.4).unwrap();
        for s in [0.0, 0.0037, 0.01, 0.25, -0.002] {
            let exact =
                evolution_operator(&h_nh, s) * nalgebra::DVector::from_column_slice(v.amps());
            let fast = props.generator().propagate(v.amps(), s);
            let err = fast
                .iter()
                .zip(exact.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-13, "s = {s}: {err}");
        }
        let mut hv = vec![Complex64::new(0.0, 0.0); 31];
        props.generator().apply(v.amps(), &mut hv);
        let dense = &h_nh * nalgebra::DVector::from_column_slice(v.amps());
        assert!(hv
            .iter()
            .zip(dense.iter())
            .all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn powers_compose() {
        let p = ModelParams::quantum(5, 0.5, 2.0, 0.2);
        let props = build_propagators(&p).unwrap();
        assert_eq!(props.powers().len(), 7);
        let mut m = props.nojump_matrix().clone();
        for _ in 0..6 {
            m = &m * &m;
        }
        let ops = build_collective_ops(5).unwrap();
        let direct = evolution_operator(&non_hermitian_hamiltonian(&ops, 0.5, 0.2), 0.64);
        assert!(max_abs_diff(&m, &direct) < 1e-12);
    }

    #[test]
    fn rejects_oversized_and_bad_steps() {
        let p = ModelParams::quantum(40, 0.5, 1.0, 0.1);
        assert!(matches!(
            build_propagators_with_limit(&p, 20),
            Err(Error::SizeTooLarge { .. })
        ));
        assert!(build_propagators(&p.clone().with_dt_q(0.03)).is_err());
    }
}
