//! Subcommand implementations: resolve parameters, run, write CSV and manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use kicktop::analysis::{
    delta_magic, fit, mean_stderr, DeltaMagic, FitModel, MeanStderr, ScalingFit,
};
use kicktop::meanfield::{
    bifurcation_scan, default_epsilons, hausdorff_dimension, linspace, poincare_orbits, Component,
    HausdorffConfig, DEFAULT_LYAPUNOV_PERIODS,
};
use kicktop::qtraj::{
    build_propagators, run_ensemble_on, EnsembleConfig, InitialState, JumpScheme, ProbeKind, Probes,
};
use kicktop::ModelParams;

use crate::config::{pick, FileConfig};
use crate::error::{CliError, CliResult};
use crate::output::{ensure_writable, float, sidecar, CsvWriter, ManifestBuilder};
use crate::{ComponentArg, FitArg, InitialArg, ModelArgs, ProbeArg, RunArgs, SchemeArg};

const DEFAULT_KICK_RANGE: (f64, f64) = (0.0, 10.0);
const DEFAULT_GAMMA_RANGE: (f64, f64) = (0.0, 1.0);
const DEFAULT_GRID: usize = 50;
const DEFAULT_TRAJ: usize = 1024;
const DEFAULT_PERIODS: usize = 1000;
const SRE_PERIODS: usize = 100;
const SRE_K0: usize = 50;
const LONG_K0: usize = 500;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Model parameters from flags, then the config file, then defaults.
fn base_params(
    file: &FileConfig,
    m: &ModelArgs,
    kick: Option<f64>,
    gamma: Option<f64>,
) -> ModelParams {
    let d = ModelParams::default();
    ModelParams {
        h: pick(m.h, file.h, d.h),
        kick: pick(kick, file.kick, d.kick),
        gamma: pick(gamma, file.gamma, d.gamma),
        tau: pick(m.tau, file.tau, d.tau),
        dt_mf: pick(m.dt_mf, file.dt_mf, d.dt_mf),
        dt_q: pick(m.dt_q, file.dt_q, d.dt_q),
        seed: pick(m.seed, file.seed, d.seed),
        n_spins: file.n_spins.unwrap_or(d.n_spins),
        n_periods: file.n_periods.unwrap_or(d.n_periods),
        n_traj: file.n_traj.unwrap_or(d.n_traj),
    }
}

/// `lo:hi`.
pub fn parse_range(name: &str, s: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("--{name} expects lo:hi, got `{s}`")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("--{name}: `{t}` is not a number")))
    };
    Ok((num(lo)?, num(hi)?))
}

/// `n` or `nK x nγ` (also `nKxnγ`).
pub fn parse_grid(s: &str) -> CliResult<(usize, usize)> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| usage(format!("--grid: `{t}` is not a count")))
    };
    let grid = match s.split_once(['x', 'X']) {
        Some((a, b)) => (num(a)?, num(b)?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if grid.0 == 0 || grid.1 == 0 {
        return Err(usage("--grid dimensions must be at least 1"));
    }
    Ok(grid)
}

/// Comma-separated list of values.
pub fn parse_list<T: std::str::FromStr>(name: &str, s: &str) -> CliResult<Vec<T>> {
    let values = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("--{name}: cannot parse `{}`", t.trim())))
        })
        .collect::<CliResult<Vec<T>>>()?;
    if values.is_empty() {
        return Err(usage(format!("--{name} is empty")));
    }
    Ok(values)
}

fn finish(manifest: ManifestBuilder, outputs: Vec<PathBuf>) -> CliResult<()> {
    let path = manifest.finish(&outputs[0], &outputs)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn manifest_paths(primary: &Path, extra: &[PathBuf]) -> Vec<PathBuf> {
    let mut paths = vec![primary.to_path_buf(), sidecar(primary, "manifest.json")];
    paths.extend_from_slice(extra);
    paths
}

#[derive(Serialize)]
struct PoincareParams<'a> {
    model: &'a ModelParams,
    n_init: usize,
    n_periods: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn poincare(
    file: &FileConfig,
    model: &ModelArgs,
    kick: Option<f64>,
    gamma: Option<f64>,
    n_init: Option<usize>,
    n_periods: Option<usize>,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let params = base_params(file, model, kick, gamma);
    let n_init = pick(n_init, file.n_init, 300);
    let n_periods = pick(n_periods, file.n_periods, DEFAULT_PERIODS);
    ensure_writable(&manifest_paths(out, &[]), force)?;
    let manifest = ManifestBuilder::new(
        "poincare",
        &PoincareParams {
            model: &params,
            n_init,
            n_periods,
        },
        params.seed,
    )?;
    let orbits = poincare_orbits(&params, n_init, n_periods, params.seed)?;
    let mut w = CsvWriter::create(out, &["init_id", "n", "Q", "P"])?;
    for (id, (_, orbit)) in orbits.iter().enumerate() {
        for (&(n, _), p) in orbit.points.iter().zip(orbit.phase_points()) {
            w.row(&[id.to_string(), n.to_string(), float(p.q), float(p.p)])?;
        }
    }
    finish(manifest, vec![w.finish()?])
}

#[derive(Serialize)]
struct LyapunovParams<'a> {
    model: &'a ModelParams,
    kick_range: (f64, f64),
    gamma_range: (f64, f64),
    grid: (usize, usize),
    n_periods: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn lyapunov_map(
    file: &FileConfig,
    model: &ModelArgs,
    k_range: Option<String>,
    gamma_range: Option<String>,
    grid: Option<String>,
    n_periods: Option<usize>,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let params = base_params(file, model, None, None);
    let kick_range = k_range
        .map(|s| parse_range("K-range", &s))
        .transpose()?
        .unwrap_or(DEFAULT_KICK_RANGE);
    let gamma_range = gamma_range
        .map(|s| parse_range("gamma-range", &s))
        .transpose()?
        .unwrap_or(DEFAULT_GAMMA_RANGE);
    let grid = grid
        .map(|s| parse_grid(&s))
        .transpose()?
        .unwrap_or((DEFAULT_GRID, DEFAULT_GRID));
    let n_periods = pick(n_periods, file.n_periods, DEFAULT_LYAPUNOV_PERIODS);
    ensure_writable(&manifest_paths(out, &[]), force)?;
    let manifest = ManifestBuilder::new(
        "lyapunov-map",
        &LyapunovParams {
            model: &params,
            kick_range,
            gamma_range,
            grid,
            n_periods,
        },
        params.seed,
    )?;
    let nodes =
        kicktop::meanfield::lyapunov_map(kick_range, gamma_range, grid, &params, n_periods)?;
    let failed = nodes.iter().filter(|n| n.lambda.is_none()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} nodes have no estimate (written as NaN)",
            nodes.len()
        );
    }
    let mut w = CsvWriter::create(out, &["K", "gamma", "lambda"])?;
    for node in &nodes {
        w.row(&[
            float(node.kick),
            float(node.gamma),
            float(node.lambda.unwrap_or(f64::NAN)),
        ])?;
    }
    finish(manifest, vec![w.finish()?])
}

#[derive(Serialize)]
struct BifurcationParams<'a> {
    model: &'a ModelParams,
    kick_range: (f64, f64),
    n_k: usize,
    n_periods: usize,
    keep: usize,
    component: &'static str,
}

#[allow(clippy::too_many_arguments)]
pub fn bifurcation(
    file: &FileConfig,
    model: &ModelArgs,
    gamma: Option<f64>,
    k_range: Option<String>,
    n_k: Option<usize>,
    n_periods: Option<usize>,
    keep: Option<usize>,
    component: ComponentArg,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let params = base_params(file, model, None, gamma);
    let kick_range = k_range
        .map(|s| parse_range("K-range", &s))
        .transpose()?
        .unwrap_or(DEFAULT_KICK_RANGE);
    let n_k = n_k.unwrap_or(200);
    let n_periods = pick(n_periods, file.n_periods, 10_000);
    let keep = keep.unwrap_or(250);
    let (observable, name) = match component {
        ComponentArg::X => (Component::X, "x"),
        ComponentArg::Y => (Component::Y, "y"),
        ComponentArg::Z => (Component::Z, "z"),
    };
    if n_k == 0 {
        return Err(usage("--n-K must be at least 1"));
    }
    if !(kick_range.0 >= 0.0 && kick_range.1 >= kick_range.0) {
        return Err(usage(format!("invalid --K-range {kick_range:?}")));
    }
    ensure_writable(&manifest_paths(out, &[]), force)?;
    let manifest = ManifestBuilder::new(
        "bifurcation",
        &BifurcationParams {
            model: &params,
            kick_range,
            n_k,
            n_periods,
            keep,
            component: name,
        },
        params.seed,
    )?;
    let kicks = linspace(kick_range.0, kick_range.1, n_k);
    let columns = bifurcation_scan(&kicks, &params, n_periods, keep, observable)?;
    let mut w = CsvWriter::create(out, &["K", "value"])?;
    for col in &columns {
        for &v in &col.values {
            w.row(&[float(col.kick), float(v)])?;
        }
    }
    finish(manifest, vec![w.finish()?])
}

pub struct HausdorffArgs {
    pub kick: Option<f64>,
    pub gamma: Option<String>,
    pub n_init: Option<usize>,
    pub n_periods: Option<usize>,
    pub transient: Option<usize>,
    pub epsilons: Option<String>,
}

#[derive(Serialize)]
struct HausdorffParams<'a> {
    model: &'a ModelParams,
    gammas: &'a [f64],
    config: &'a HausdorffConfig,
}

pub fn hausdorff(
    file: &FileConfig,
    model: &ModelArgs,
    args: &HausdorffArgs,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let params = base_params(file, model, args.kick, None);
    let gammas = match &args.gamma {
        Some(s) => parse_list::<f64>("gamma", s)?,
        None => vec![file.gamma.unwrap_or(0.5)],
    };
    let defaults = HausdorffConfig::default();
    let config = HausdorffConfig {
        n_init: pick(args.n_init, file.n_init, defaults.n_init),
        n_periods: pick(args.n_periods, file.n_periods, defaults.n_periods),
        transient: args.transient.unwrap_or(defaults.transient),
        epsilons: match &args.epsilons {
            Some(s) => parse_list("epsilons", s)?,
            None => default_epsilons(),
        },
        seed: params.seed,
    };
    ensure_writable(&manifest_paths(out, &[]), force)?;
    let manifest = ManifestBuilder::new(
        "hausdorff",
        &HausdorffParams {
            model: &params,
            gammas: &gammas,
            config: &config,
        },
        params.seed,
    )?;
    let mut w = CsvWriter::create(out, &["gamma", "d_H", "stderr"])?;
    for &gamma in &gammas {
        let est = hausdorff_dimension(
            &ModelParams {
                gamma,
                ..params.clone()
            },
            &config,
        )?;
        w.row(&[float(gamma), float(est.dimension), float(est.stderr)])?;
    }
    finish(manifest, vec![w.finish()?])
}

fn ensemble_config(run: &RunArgs, probes: Probes) -> EnsembleConfig {
    let initial = match run.initial {
        InitialArg::Auto => InitialState::Auto,
        InitialArg::Polarized => InitialState::Polarized,
        InitialArg::RandomCoherent => InitialState::RandomCoherent,
    };
    let mut config = EnsembleConfig::new(probes).with_initial(initial);
    config.scheme = match run.scheme {
        SchemeArg::WaitingTime => JumpScheme::WaitingTime,
        SchemeArg::PerStep => JumpScheme::PerStep,
    };
    config
}

fn run_params(file: &FileConfig, run: &RunArgs, default_periods: usize) -> ModelParams {
    let mut params = base_params(file, &run.model, run.kick, run.gamma);
    params.n_traj = pick(run.n_traj, file.n_traj, DEFAULT_TRAJ);
    params.n_periods = pick(run.n_periods, file.n_periods, default_periods);
    params
}

pub struct EvolveArgs {
    pub n_spins: Option<usize>,
    pub probes: String,
    pub record_from: usize,
    pub stride: usize,
    pub n_a: Option<usize>,
    pub raw: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvolveParams<'a> {
    model: &'a ModelParams,
    config: &'a EnsembleConfig,
}

pub fn evolve(
    file: &FileConfig,
    run: &RunArgs,
    args: &EvolveArgs,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let mut params = run_params(file, run, DEFAULT_PERIODS);
    params.n_spins = pick(args.n_spins, file.n_spins, params.n_spins);
    let mut probes = Probes::parse(&args.probes)?.with_window(args.record_from, args.stride);
    if let Some(n_a) = args.n_a {
        probes = probes.with_n_a(n_a);
    }
    if args.raw.is_some() && !probes.has(ProbeKind::Mz) {
        return Err(usage("--raw needs the mz probe"));
    }
    let mut config = ensemble_config(run, probes);
    if args.raw.is_some() {
        config = config.keep_records();
    }
    let extra: Vec<PathBuf> = args.raw.iter().cloned().collect();
    ensure_writable(&manifest_paths(out, &extra), force)?;
    let manifest = ManifestBuilder::new(
        "evolve",
        &EvolveParams {
            model: &params,
            config: &config,
        },
        params.seed,
    )?;
    let props = build_propagators(&params)?;
    let result = run_ensemble_on(&props, &params, &config)?;
    log::info!(
        "{} jumps over {} trajectories",
        result.total_jumps,
        params.n_traj
    );
    let series = &result.series;
    let mut w = CsvWriter::create(out, &["n", "probe", "mean", "stderr"])?;
    for (i, &n) in series.periods.iter().enumerate() {
        for p in &series.probes {
            w.row(&[
                n.to_string(),
                p.kind.name().to_string(),
                float(p.mean[i]),
                float(p.stderr[i]),
            ])?;
        }
    }
    let mut outputs = vec![w.finish()?];
    if let Some(raw) = &args.raw {
        let mut w = CsvWriter::create(raw, &["trajectory_id", "n", "mz"])?;
        for rec in &result.records {
            let mz = rec.series(ProbeKind::Mz).unwrap_or_default();
            for (&n, v) in rec.periods.iter().zip(mz) {
                w.row(&[rec.id.to_string(), n.to_string(), float(v)])?;
            }
        }
        outputs.push(w.finish()?);
    }
    finish(manifest, outputs)
}

pub struct ScalingArgs {
    pub sweep: Option<String>,
    pub probe: ProbeArg,
    pub fit: FitArg,
    pub k0: Option<usize>,
    pub input: Option<PathBuf>,
}

#[derive(Serialize)]
struct ScalingParams<'a> {
    model: &'a ModelParams,
    probe: &'static str,
    fit: FitModel,
    sizes: &'a [usize],
    k0: usize,
    config: Option<&'a EnsembleConfig>,
    input: Option<String>,
}

#[derive(Serialize)]
struct FitReport {
    probe: &'static str,
    fit: ScalingFit,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_magic: Option<Vec<DeltaMagic>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_fit: Option<ScalingFit>,
}

/// Time average of each trajectory over recorded periods `k0..`, then the
/// mean and standard error across trajectories.
fn simulate_plateau(
    params: &ModelParams,
    config: &EnsembleConfig,
    kind: ProbeKind,
    k0: usize,
) -> CliResult<MeanStderr> {
    let props = build_propagators(params)?;
    let result = run_ensemble_on(&props, params, config)?;
    let per_member = result
        .records
        .iter()
        .map(|rec| {
            let s = rec.series(kind).unwrap_or_default();
            if k0 >= s.len() {
                return Err(usage(format!(
                    "--k0 {k0} leaves no recorded period out of {}",
                    s.len()
                )));
            }
            Ok(s[k0..].iter().sum::<f64>() / (s.len() - k0) as f64)
        })
        .collect::<CliResult<Vec<f64>>>()?;
    Ok(mean_stderr(&per_member)?)
}

fn read_points(path: &Path) -> CliResult<BTreeMap<usize, MeanStderr>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| usage(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| usage(format!("{} lacks a `{name}` column", path.display())))
    };
    let (cn, cm, cs) = (column("N")?, column("mean")?, column("stderr")?);
    let mut points = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let field = |c: usize| record.get(c).unwrap_or("").trim().to_string();
        let bad = |c: usize| {
            usage(format!(
                "{} row {}: bad value `{}`",
                path.display(),
                line + 2,
                field(c)
            ))
        };
        let n: usize = field(cn).parse().map_err(|_| bad(cn))?;
        let mean: f64 = field(cm).parse().map_err(|_| bad(cm))?;
        let stderr: f64 = field(cs).parse().map_err(|_| bad(cs))?;
        points.insert(n, MeanStderr { mean, stderr });
    }
    Ok(points)
}

pub fn scaling(
    file: &FileConfig,
    run: &RunArgs,
    args: &ScalingArgs,
    out: &Path,
    force: bool,
) -> CliResult<()> {
    let (kind, probe_name) = match args.probe {
        ProbeArg::Mz => (ProbeKind::Mz, "mz"),
        ProbeArg::Sre => (ProbeKind::Sre, "sre"),
        ProbeArg::Ee => (ProbeKind::Ee, "ee"),
    };
    let model = match args.fit {
        FitArg::Power => FitModel::PowerLaw,
        FitArg::Log => FitModel::LogLinear,
    };
    let (default_periods, default_k0) = match kind {
        ProbeKind::Sre => (SRE_PERIODS, SRE_K0),
        _ => (DEFAULT_PERIODS, LONG_K0),
    };
    let params = run_params(file, run, default_periods);
    let k0 = pick(args.k0, file.k0, default_k0);
    let fit_path = sidecar(out, "fit.json");
    ensure_writable(&manifest_paths(out, std::slice::from_ref(&fit_path)), force)?;

    let config = ensemble_config(run, Probes::new(&[kind])).keep_records();
    let (points, sizes) = match &args.input {
        Some(input) => {
            let points = read_points(input)?;
            let sizes: Vec<usize> = points.keys().copied().collect();
            (Some(points), sizes)
        }
        None => {
            let sweep = args
                .sweep
                .as_deref()
                .ok_or_else(|| usage("--sweep is required unless --input is given"))?;
            (None, parse_list::<usize>("sweep", sweep)?)
        }
    };
    let manifest = ManifestBuilder::new(
        "scaling",
        &ScalingParams {
            model: &params,
            probe: probe_name,
            fit: model,
            sizes: &sizes,
            k0,
            config: args.input.is_none().then_some(&config),
            input: args.input.as_ref().map(|p| p.display().to_string()),
        },
        params.seed,
    )?;
    let points = match points {
        Some(points) => points,
        None => {
            let mut points = BTreeMap::new();
            for &n in &sizes {
                let p = ModelParams {
                    n_spins: n,
                    ..params.clone()
                };
                let m = simulate_plateau(&p, &config, kind, k0)?;
                log::info!("N = {n}: {} ± {}", m.mean, m.stderr);
                points.insert(n, m);
            }
            points
        }
    };

    let mut w = CsvWriter::create(out, &["N", "mean", "stderr"])?;
    for (n, m) in &points {
        w.row(&[n.to_string(), float(m.mean), float(m.stderr)])?;
    }
    let csv_path = w.finish()?;

    let xy: Vec<(f64, f64)> = points.iter().map(|(&n, m)| (n as f64, m.mean)).collect();
    let fitted = fit(model, &xy)?;
    let (deltas, delta_fit) = if kind == ProbeKind::Sre {
        let asym = points
            .iter()
            .map(|(&n, m)| (n, (m.mean, m.stderr)))
            .collect();
        let deltas = delta_magic(&asym);
        let dxy: Vec<(f64, f64)> = deltas.iter().map(|d| (d.n_spins as f64, d.delta)).collect();
        let delta_fit = match fit(FitModel::PowerLaw, &dxy) {
            Ok(f) => Some(f),
            Err(e) => {
                log::warn!("no δM scaling fit: {e}");
                None
            }
        };
        (Some(deltas), delta_fit)
    } else {
        (None, None)
    };
    let report = FitReport {
        probe: probe_name,
        fit: fitted,
        delta_magic: deltas,
        delta_fit,
    };
    let fit_out = crate::output::write_json(&fit_path, &report)?;
    finish(manifest, vec![csv_path, fit_out])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("K-range", "0:10").unwrap(), (0.0, 10.0));
        assert!(parse_range("K-range", "0-10").is_err());
        assert_eq!(parse_grid("50").unwrap(), (50, 50));
        assert_eq!(parse_grid("50x40").unwrap(), (50, 40));
        assert!(parse_grid("0").is_err());
        assert!(parse_grid("3x0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(
            parse_list::<usize>("sweep", "8, 16,32").unwrap(),
            vec![8, 16, 32]
        );
        assert!(parse_list::<usize>("sweep", "8,x").is_err());
        assert!(parse_list::<f64>("gamma", "").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file = FileConfig {
            h: Some(0.7),
            kick: Some(3.0),
            ..FileConfig::default()
        };
        let m = ModelArgs {
            h: Some(0.9),
            tau: None,
            dt_mf: None,
            dt_q: None,
            seed: None,
        };
        let p = base_params(&file, &m, None, Some(0.2));
        assert_eq!((p.h, p.kick, p.gamma, p.tau), (0.9, 3.0, 0.2, 1.0));
    }
}
