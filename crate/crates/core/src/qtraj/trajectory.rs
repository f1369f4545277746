//! Quantum-jump unraveling of the kicked dissipative dynamics.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::propagators::{build_propagators, FloquetPropagators};
use crate::error::{Error, Result};
use crate::linalg::SplitVec;
use crate::observables::{mz_of_amps, SchmidtWeights, SreKernel};
use crate::params::ModelParams;
use crate::spin::{norm_sqr, DickeState, NORM_TOL};

/// One step of length `δt`: no-jump evolution with probability `‖U ψ‖²`,
/// otherwise a jump `S_−ψ / ‖S_−ψ‖`.
pub fn qj_step<R: Rng + ?Sized>(
    psi: &DickeState,
    props: &FloquetPropagators,
    rng: &mut R,
) -> Result<(DickeState, bool)> {
    check_dim(psi, props)?;
    let x = SplitVec::from_complex(psi.amps());
    let mut y = SplitVec::zeros(x.len());
    props.step_op().apply(&x, &mut y);
    let p_nojump = y.norm_sqr();
    let u: f64 = rng.random();
    if u >= p_nojump {
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
        props.ops().apply_lowering(psi.amps(), &mut out);
        if norm_sqr(&out) > 0.0 {
            return Ok((DickeState::normalized(out)?, true));
        }
        log::warn!(
            "jump drawn on a dark state; treating the step as a no-jump step (δt too large?)"
        );
    }
    Ok((DickeState::normalized(y.to_complex())?, false))
}

fn check_dim(psi: &DickeState, props: &FloquetPropagators) -> Result<()> {
    if psi.dim() != props.dim() {
        return Err(Error::DimensionMismatch {
            expected: props.dim(),
            got: psi.dim(),
        });
    }
    Ok(())
}

/// Observable recorded along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeKind {
    Mz,
    Ee,
    Sre,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 3] = [ProbeKind::Mz, ProbeKind::Ee, ProbeKind::Sre];

    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::Mz => "mz",
            ProbeKind::Ee => "ee",
            ProbeKind::Sre => "sre",
        }
    }
}

impl fmt::Display for ProbeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mz" => Ok(ProbeKind::Mz),
            "ee" => Ok(ProbeKind::Ee),
            "sre" => Ok(ProbeKind::Sre),
            other => Err(Error::param(
                "probes",
                format!("unknown probe `{other}` (expected mz, ee or sre)"),
            )),
        }
    }
}

/// Which observables to record and when.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probes {
    /// Sorted, without duplicates.
    pub kinds: Vec<ProbeKind>,
    /// Size of block `A` for the entanglement entropy; `N/2` when unset.
    pub n_a: Option<usize>,
    /// First recorded period (1-based).
    pub record_from: usize,
    /// Record every `stride`-th period from `record_from` on.
    pub stride: usize,
}

impl Default for Probes {
    fn default() -> Self {
        Self::new(&[ProbeKind::Mz])
    }
}

impl Probes {
    pub fn new(kinds: &[ProbeKind]) -> Self {
        let mut kinds = kinds.to_vec();
        kinds.sort();
        kinds.dedup();
        Self {
            kinds,
            n_a: None,
            record_from: 1,
            stride: 1,
        }
    }

    /// Parses a comma-separated list such as `sre,ee,mz`.
    pub fn parse(list: &str) -> Result<Self> {
        let kinds = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<ProbeKind>>>()?;
        if kinds.is_empty() {
            return Err(Error::param("probes", "no probe selected"));
        }
        Ok(Self::new(&kinds))
    }

    pub fn with_window(mut self, record_from: usize, stride: usize) -> Self {
        self.record_from = record_from;
        self.stride = stride;
        self
    }

    pub fn with_n_a(mut self, n_a: usize) -> Self {
        self.n_a = Some(n_a);
        self
    }

    pub fn has(&self, kind: ProbeKind) -> bool {
        self.kinds.contains(&kind)
    }

    /// Recorded period indices for a run of `n_periods`.
    pub fn recorded_periods(&self, n_periods: usize) -> Vec<usize> {
        (self.record_from.max(1)..=n_periods)
            .step_by(self.stride.max(1))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.record_from == 0 {
            return Err(Error::param("record_from", "periods are counted from 1"));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", "must be at least 1"));
        }
        Ok(())
    }
}

/// Per-size evaluators shared by all trajectories of an ensemble.
#[derive(Debug, Clone)]
pub struct ProbeEvaluator {
    kinds: Vec<ProbeKind>,
    schmidt: Option<SchmidtWeights>,
    sre: Option<SreKernel>,
}

impl ProbeEvaluator {
    pub fn new(n_spins: usize, probes: &Probes) -> Result<Self> {
        probes.validate()?;
        let schmidt = if probes.has(ProbeKind::Ee) {
            Some(SchmidtWeights::new(
                n_spins,
                probes.n_a.unwrap_or(n_spins / 2),
            )?)
        } else {
            None
        };
        let sre = if probes.has(ProbeKind::Sre) {
            Some(SreKernel::new(n_spins)?)
        } else {
            None
        };
        Ok(Self {
            kinds: probes.kinds.clone(),
            schmidt,
            sre,
        })
    }

    pub fn kinds(&self) -> &[ProbeKind] {
        &self.kinds
    }

    /// Values in the order of [`ProbeEvaluator::kinds`].
    pub fn evaluate(&self, amps: &[Complex64]) -> Result<Vec<f64>> {
        self.kinds
            .iter()
            .map(|kind| match kind {
                ProbeKind::Mz => Ok(mz_of_amps(amps)),
                ProbeKind::Ee => self
                    .schmidt
                    .as_ref()
                    .expect("evaluator built with EE weights")
                    .entropy(amps),
                ProbeKind::Sre => {
                    let psi = DickeState::new(amps.to_vec())?;
                    self.sre
                        .as_ref()
                        .expect("evaluator built with SRE kernel")
                        .m2(&psi)
                }
            })
            .collect()
    }
}

/// Stroboscopic record of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub id: u64,
    pub seed: u64,
    /// Recorded period indices `n` (values taken at `t_n^+`).
    pub periods: Vec<usize>,
    pub kinds: Vec<ProbeKind>,
    /// `values[i][j]`: probe `kinds[j]` at `periods[i]`.
    pub values: Vec<Vec<f64>>,
    /// Jumps during each period `1..=n_periods`.
    pub jumps: Vec<u32>,
}

impl TrajectoryRecord {
    /// Time series of one probe, if recorded.
    pub fn series(&self, kind: ProbeKind) -> Option<Vec<f64>> {
        let j = self.kinds.iter().position(|&k| k == kind)?;
        Some(self.values.iter().map(|v| v[j]).collect())
    }

    pub fn total_jumps(&self) -> u64 {
        self.jumps.iter().map(|&j| j as u64).sum()
    }
}

/// Tolerance, in steps, when fitting whole steps into the rest of a period.
const GRID_SLACK: f64 = 1e-9;
const MAX_THRESHOLD_ITERS: usize = 60;
/// Relative tolerance on a jump time within its step.
const THRESHOLD_TIME_TOL: f64 = 1e-13;

/// How jump times are sampled between kicks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumpScheme {
    /// One uniform draw per step of length `δt`, as in [`qj_step`].
    PerStep,
    /// One uniform draw `r` per inter-jump interval: the state survives
    /// while `‖ψ(t)‖² > r`. Survival is scanned in steps of `δt` and the
    /// jump time is then solved for inside its step, so jumps happen at
    /// continuous times. Much cheaper than `PerStep` when jumps are rare.
    #[default]
    WaitingTime,
}

/// Working buffers for one trajectory.
struct Stepper<'a> {
    props: &'a FloquetPropagators,
    scheme: JumpScheme,
    psi: SplitVec,
    cand: SplitVec,
    tmp: SplitVec,
    lowered: Vec<Complex64>,
    jumps_last: u32,
}

impl<'a> Stepper<'a> {
    fn new(props: &'a FloquetPropagators, psi0: &DickeState, scheme: JumpScheme) -> Self {
        let d = props.dim();
        Self {
            props,
            scheme,
            psi: SplitVec::from_complex(psi0.amps()),
            cand: SplitVec::zeros(d),
            tmp: SplitVec::zeros(d),
            lowered: vec![Complex64::new(0.0, 0.0); d],
            jumps_last: 0,
        }
    }

    fn normalize(&mut self) -> Result<()> {
        let n = self.psi.norm_sqr();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NonFinite("trajectory state norm"));
        }
        self.psi.scale(n.sqrt().recip());
        Ok(())
    }

    /// Replaces `psi` by `S_−psi / ‖S_−psi‖`; false on a dark state.
    fn jump(&mut self) -> bool {
        let amps = self.psi.to_complex();
        self.props.ops().apply_lowering(&amps, &mut self.lowered);
        let n = norm_sqr(&self.lowered);
        if n == 0.0 {
            log::warn!("jump drawn on a dark state; treating it as a no-jump step (δt too large?)");
            return false;
        }
        self.psi.copy_from_complex(&self.lowered);
        self.psi.scale(n.sqrt().recip());
        true
    }

    /// Evolves `psi` (normalized) through one period including the kick.
    fn period<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u32> {
        if let Some(f) = self.props.floquet_op() {
            f.apply(&self.psi, &mut self.cand);
            std::mem::swap(&mut self.psi, &mut self.cand);
            self.normalize()?;
            return Ok(0);
        }
        let jumps = match self.scheme {
            JumpScheme::PerStep => self.period_per_step(rng)?,
            JumpScheme::WaitingTime => self.period_waiting_time(rng)?,
        };
        self.psi.mul_diag(self.props.kick_diagonal());
        self.normalize()?;
        self.jumps_last = jumps;
        Ok(jumps)
    }

    fn period_per_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u32> {
        let mut jumps = 0;
        for _ in 0..self.props.steps_per_period() {
            self.props.step_op().apply(&self.psi, &mut self.cand);
            let p = self.cand.norm_sqr();
            let u: f64 = rng.random();
            if u >= p && self.jump() {
                jumps += 1;
                continue;
            }
            std::mem::swap(&mut self.psi, &mut self.cand);
            self.normalize()?;
        }
        Ok(jumps)
    }

    fn period_waiting_time<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u32> {
        let steps = self.props.steps_per_period();
        let dt = self.props.dt();
        let tau = steps as f64 * dt;
        let mut jumps = 0;
        let mut r: f64 = rng.random();
        self.props.period_op().apply(&self.psi, &mut self.cand);
        if self.cand.norm_sqr() > r {
            std::mem::swap(&mut self.psi, &mut self.cand);
            return Ok(jumps);
        }
        // with many jumps per period a plain scan beats binary lifting
        let lifting_cost = (self.props.powers().len() + 1) as u64;
        let linear = (self.jumps_last as u64 + 1) * lifting_cost > steps as u64;
        // after a jump the δt grid restarts at the jump time; the leftover
        // fraction of a step is propagated once, before the kick
        let mut elapsed = 0.0;
        loop {
            let whole = ((tau - elapsed) / dt + GRID_SLACK).floor().max(0.0) as usize;
            let survived = if linear {
                self.survive_linear(r, whole)
            } else {
                self.survive_lifting(r, whole)
            };
            elapsed += survived as f64 * dt;
            let span = if survived < whole {
                dt
            } else {
                let rest = tau - elapsed;
                if rest <= GRID_SLACK * dt {
                    break;
                }
                let cand = self
                    .props
                    .generator()
                    .propagate(&self.psi.to_complex(), rest);
                if norm_sqr(&cand) > r {
                    self.psi.copy_from_complex(&cand);
                    break;
                }
                rest
            };
            elapsed += self.advance_to_threshold(r, span);
            self.normalize()?;
            if self.jump() {
                jumps += 1;
            }
            r = rng.random();
        }
        Ok(jumps)
    }

    /// Moves `psi` forward by the time `s ≤ limit` at which `‖ψ(s)‖² = r`
    /// and returns `s`; requires `‖ψ‖² > r ≥ ‖ψ(limit)‖²`.
    fn advance_to_threshold(&mut self, r: f64, limit: f64) -> f64 {
        let gen = self.props.generator();
        let mut state = self.psi.to_complex();
        let mut n = norm_sqr(&state);
        let (mut lo, mut hi) = (0.0, limit);
        let mut s = 0.0;
        // Newton on ln‖ψ(s)‖², which is close to linear within a step
        for _ in 0..MAX_THRESHOLD_ITERS {
            let g = (n / r).ln();
            if g > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let slope = 2.0 * gen.decay_expectation(&state) / n;
            let newton = s + g / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            state = gen.propagate(&state, next - s);
            n = norm_sqr(&state);
            let done = (next - s).abs() <= THRESHOLD_TIME_TOL * limit;
            s = next;
            if done {
                break;
            }
        }
        self.psi.copy_from_complex(&state);
        s
    }

    /// Largest `t ≤ limit` with `‖U^t ψ‖² > r`; leaves `U^t ψ` in `psi`.
    fn survive_lifting(&mut self, r: f64, limit: usize) -> usize {
        let mut t = 0;
        for j in (0..self.props.powers().len()).rev() {
            let span = 1usize << j;
            if t + span > limit {
                continue;
            }
            self.props.powers()[j].apply(&self.psi, &mut self.tmp);
            if self.tmp.norm_sqr() > r {
                std::mem::swap(&mut self.psi, &mut self.tmp);
                t += span;
            }
        }
        t
    }

    fn survive_linear(&mut self, r: f64, limit: usize) -> usize {
        let mut t = 0;
        while t < limit {
            self.props.step_op().apply(&self.psi, &mut self.tmp);
            if self.tmp.norm_sqr() <= r {
                break;
            }
            std::mem::swap(&mut self.psi, &mut self.tmp);
            t += 1;
        }
        t
    }
}

/// Runs one trajectory with prebuilt propagators.
pub fn run_trajectory_with<R: Rng + ?Sized>(
    props: &FloquetPropagators,
    psi0: &DickeState,
    n_periods: usize,
    evaluator: &ProbeEvaluator,
    probes: &Probes,
    scheme: JumpScheme,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    check_dim(psi0, props)?;
    probes.validate()?;
    let mut stepper = Stepper::new(props, psi0, scheme);
    let recorded = probes.recorded_periods(n_periods);
    let mut next = recorded.iter().peekable();
    let mut values = Vec::with_capacity(recorded.len());
    let mut jumps = Vec::with_capacity(n_periods);
    for n in 1..=n_periods {
        jumps.push(stepper.period(rng)?);
        if next.peek() == Some(&&n) {
            next.next();
            let amps = stepper.psi.to_complex();
            debug_assert!((norm_sqr(&amps) - 1.0).abs() < NORM_TOL);
            values.push(evaluator.evaluate(&amps)?);
        }
    }
    Ok(TrajectoryRecord {
        id: 0,
        seed: 0,
        periods: recorded,
        kinds: evaluator.kinds().to_vec(),
        values,
        jumps,
    })
}

/// Runs one trajectory of `params.n_periods` periods from `psi0`.
pub fn run_trajectory<R: Rng + ?Sized>(
    psi0: &DickeState,
    params: &ModelParams,
    probes: &Probes,
    rng: &mut R,
) -> Result<TrajectoryRecord> {
    let props = build_propagators(params)?;
    let evaluator = ProbeEvaluator::new(params.n_spins, probes)?;
    let mut rec = run_trajectory_with(
        &props,
        psi0,
        params.n_periods,
        &evaluator,
        probes,
        JumpScheme::default(),
        rng,
    )?;
    rec.seed = params.seed;
    Ok(rec)
}

/// State after `n_periods` periods (no recording); useful for checks.
pub fn evolve_state<R: Rng + ?Sized>(
    props: &FloquetPropagators,
    psi0: &DickeState,
    n_periods: usize,
    scheme: JumpScheme,
    rng: &mut R,
) -> Result<(DickeState, u64)> {
    check_dim(psi0, props)?;
    let mut stepper = Stepper::new(props, psi0, scheme);
    let mut jumps = 0u64;
    for _ in 0..n_periods {
        jumps += stepper.period(rng)? as u64;
    }
    Ok((DickeState::normalized(stepper.psi.to_complex())?, jumps))
}
