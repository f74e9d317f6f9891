use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use super::config::{ExperimentConfig, FddSource, RayleighMode, Subcommand};
use super::result::{format_real, RunResult};
use crate::graph::{GraphKind, GraphModel};
use crate::loop_erasure::{History, LoopErasedState};
use crate::rayleigh::{
    rayleigh_cdf, rayleigh_event_driven, rayleigh_from_field, sample_poisson_field, surrogate_lengths, CouplingLaw,
    StepPath,
};
use crate::replicates::{map_replicates, with_workers};
use crate::rng::domain_seed;
use crate::segments::{build_schedule_with, estimate_constants, Case, ScalingConstants, ScheduleParams};
use crate::stats::{fdd_compare, ks_statistic, modulus_w, Estimate, Rescaling};
use crate::walk::{green_sum, lazy_step, mixing_time};
use crate::{Error, Result};

/// Runs the configured pipeline on the configured number of workers.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult> {
    let started = Instant::now();
    let mut result = with_workers(cfg.workers, || match cfg.subcommand {
        Subcommand::LerwRun => lerw_run(cfg),
        Subcommand::RayleighRun => rayleigh_run(cfg),
        Subcommand::SurrogateRun => surrogate_run(cfg),
        Subcommand::Constants => constants_run(cfg),
        Subcommand::Mixing => mixing_run(cfg),
        Subcommand::Fdd => fdd_run(cfg),
        Subcommand::CoupleVerify => couple_verify(cfg),
        Subcommand::Modulus => modulus_run(cfg),
    })?;
    result.wall_clock = started.elapsed();
    Ok(result)
}

fn estimate_json(e: &Estimate) -> Value {
    json!({ "mean": e.mean, "stderr": e.stderr, "count": e.count })
}

fn require_times(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let times = cfg.effective_times();
    if times.is_empty() {
        return Err(Error::config(format!("{} needs times or a horizon", cfg.subcommand)));
    }
    Ok(times)
}

/// `tau` from the config, or the exact uniform mixing time of `g`.
pub fn resolve_tau(g: &GraphModel, given: Option<u64>, tmax: u64) -> Result<u64> {
    if let Some(tau) = given {
        return Ok(tau);
    }
    mixing_time(g, tmax)?
        .tau
        .ok_or_else(|| Error::Infeasible(format!("mixing time not reached by tmax = {tmax}")))
}

/// Scaling constants estimated on `g` with the given schedule inputs.
pub fn resolve_constants(
    g: &GraphModel,
    case: Case,
    params: &ScheduleParams,
    tmax: u64,
    replicates: usize,
    capacity_walks: u64,
    seed: u64,
) -> Result<ScalingConstants> {
    let mut params = *params;
    if case == Case::One && (params.r.is_none() || params.s.is_none()) {
        params.tau = Some(resolve_tau(g, params.tau, tmax)?);
    }
    // the first pass only fixes r; the second lays out enough windows
    let probe = build_schedule_with(case, g, &params, 0)?;
    let schedule = build_schedule_with(case, g, &params, 2 * probe.r)?;
    estimate_constants(g, &schedule, replicates, capacity_walks, domain_seed(seed, "constants"))
}

fn rescaling_for(cfg: &ExperimentConfig, g: &GraphModel) -> Result<(Rescaling, Value)> {
    match (cfg.a, cfg.b) {
        (Some(a), Some(b)) => Ok((Rescaling::new(cfg.case, a, b, g)?, json!({ "source": "given" }))),
        (None, None) => {
            let c = resolve_constants(
                g,
                cfg.case,
                &cfg.schedule,
                cfg.tmax,
                cfg.const_replicates,
                cfg.cap_walks,
                cfg.require_seed()?,
            )?;
            Ok((Rescaling::from_constants(&c, g)?, json!({ "source": "estimated", "constants": c })))
        }
        _ => Err(Error::config("give both a and b, or neither")),
    }
}

/// `Y_{g(t)}` for every time, one row per replicate. Each walk starts at
/// vertex 0 and runs `g(times.last())` lazy steps.
pub fn lerw_lengths(
    g: &GraphModel,
    rescaling: &Rescaling,
    times: &[f64],
    replicates: usize,
    seed: u64,
) -> Vec<Vec<u64>> {
    let targets: Vec<u64> = times.iter().map(|&t| rescaling.g(t)).collect();
    let last = targets.last().copied().unwrap_or(0);
    map_replicates(replicates, seed, |_, rng| {
        let mut state = LoopErasedState::for_id_bound(g.vertex_count(), History::Off);
        let mut v = 0;
        state.push(v);
        let mut out = Vec::with_capacity(targets.len());
        let mut next = 0;
        for step in 0..=last {
            if step > 0 {
                v = lazy_step(g, v, rng);
                state.push(v);
            }
            while next < targets.len() && targets[next] == step {
                out.push(state.len() as u64);
                next += 1;
            }
        }
        out
    })
}

/// `R(t)` from `R(0) = y` at every time, one event-driven path per replicate.
pub fn rayleigh_marginals(y: f64, times: &[f64], replicates: usize, seed: u64) -> Vec<Vec<f64>> {
    let horizon = times.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    map_replicates(replicates, seed, |_, rng| {
        let path = rayleigh_event_driven(y, horizon, rng).expect("valid horizon");
        times.iter().map(|&t| path.value_at(t)).collect()
    })
}

/// `floor(t / d)`, guarded against `t / d` landing a hair below an integer.
pub fn surrogate_index(t: f64, d: f64) -> usize {
    (t / d * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

/// `d |S_{floor(t/d)}|` with `d = m^(-1/2)` at every time, one row per replicate.
///
/// These start from `d |S_0| = d`, so they are compared with `R` started at
/// `y = d`. The value is evaluated as `d + d (L - 1)`, which puts the
/// no-collision atom `d + d j` on exactly the same float as the Rayleigh
/// path value `d + t` when `t = d j`.
pub fn surrogate_marginals(m: u64, times: &[f64], replicates: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let d = 1.0 / (m as f64).sqrt();
    let idx: Vec<usize> = times.iter().map(|&t| surrogate_index(t, d)).collect();
    let steps = idx.last().copied().unwrap_or(0);
    map_replicates(replicates, seed, |_, rng| -> Result<Vec<f64>> {
        let lengths = surrogate_lengths(m, steps, rng)?;
        Ok(idx.iter().map(|&k| d + d * (lengths[k] - 1) as f64).collect())
    })
    .into_iter()
    .collect()
}

fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

fn lerw_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let g = cfg.require_graph()?;
    let seed = cfg.require_seed()?;
    let times = require_times(cfg)?;
    let (rescaling, constants) = rescaling_for(cfg, g)?;
    let ys = lerw_lengths(g, &rescaling, &times, cfg.replicates, seed);
    let mut out = RunResult::new(cfg.echo(), &["replicate", "t", "Y", "Z"]);
    let mut zs = vec![Vec::with_capacity(ys.len()); times.len()];
    for (r, row) in ys.iter().enumerate() {
        for (k, (&t, &y)) in times.iter().zip(row).enumerate() {
            let z = rescaling.z(y as f64);
            zs[k].push(z);
            out.push_row(vec![r.to_string(), format_real(t), y.to_string(), format_real(z)]);
        }
    }
    let per_time: Vec<Value> = times
        .iter()
        .zip(&zs)
        .map(|(&t, z)| json!({ "t": t, "z": estimate_json(&Estimate::from_samples(z)) }))
        .collect();
    out.estimate("z_by_time", per_time);
    out.estimate("a", rescaling.a);
    out.estimate("b", rescaling.b);
    out.diagnostic("constants", constants);
    out.diagnostic("time_scale", rescaling.time_scale());
    out.diagnostic("length_scale", rescaling.length_scale());
    out.diagnostic("walk_steps", rescaling.g(*times.last().expect("times nonempty")));
    Ok(out)
}

fn rayleigh_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let seed = cfg.require_seed()?;
    let horizon = cfg.effective_horizon().ok_or_else(|| Error::config("rayleigh-run needs a horizon"))?;
    let y = cfg.y;
    let paths: Vec<StepPath> = map_replicates(cfg.replicates, seed, |_, rng| match cfg.mode {
        RayleighMode::Event => rayleigh_event_driven(y, horizon, rng),
        RayleighMode::Field => {
            let field = sample_poisson_field(horizon, y + horizon, rng)?;
            rayleigh_from_field(&field, y, horizon)
        }
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut out = RunResult::new(cfg.echo(), &["replicate", "time", "value"]);
    for (r, path) in paths.iter().enumerate() {
        out.push_row(vec![r.to_string(), format_real(0.0), format_real(path.start())]);
        for &(t, v) in path.breakpoints() {
            out.push_row(vec![r.to_string(), format_real(t), format_real(v)]);
        }
    }
    let finals: Vec<f64> = paths.iter().map(|p| p.value_at(horizon)).collect();
    let jumps: Vec<f64> = paths.iter().map(|p| p.breakpoints().len() as f64).collect();
    out.estimate("final_value", estimate_json(&Estimate::from_samples(&finals)));
    out.estimate("jumps", estimate_json(&Estimate::from_samples(&jumps)));
    out.diagnostic("ks_final_vs_rayleigh", ks_statistic(&finals, rayleigh_cdf)?);
    out.diagnostic("horizon", horizon);
    Ok(out)
}

fn surrogate_size(cfg: &ExperimentConfig) -> Result<u64> {
    if let Some(m) = cfg.m {
        return Ok(m);
    }
    match cfg.graph.as_ref().map(GraphModel::kind) {
        Some(GraphKind::Complete { m }) => Ok(m),
        _ => Err(Error::config("surrogate size needs m or a complete graph")),
    }
}

fn surrogate_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let seed = cfg.require_seed()?;
    let m = surrogate_size(cfg)?;
    if m == 0 {
        return Err(Error::config("m must be at least 1"));
    }
    let d = 1.0 / (m as f64).sqrt();
    let steps = match (cfg.j, cfg.effective_horizon()) {
        (Some(j), _) => j,
        (None, Some(h)) => surrogate_index(h, d),
        (None, None) => return Err(Error::config("surrogate-run needs j or a horizon")),
    };
    let runs: Vec<Vec<usize>> = map_replicates(cfg.replicates, seed, |_, rng| surrogate_lengths(m, steps, rng))
        .into_iter()
        .collect::<Result<_>>()?;
    let mut out = RunResult::new(cfg.echo(), &["replicate", "j", "L"]);
    for (r, lengths) in runs.iter().enumerate() {
        for (j, l) in lengths.iter().enumerate() {
            out.push_row(vec![r.to_string(), j.to_string(), l.to_string()]);
        }
    }
    let finals: Vec<f64> = runs.iter().map(|l| l[steps] as f64).collect();
    let scaled: Vec<f64> = finals.iter().map(|l| d * l).collect();
    out.estimate("final_length", estimate_json(&Estimate::from_samples(&finals)));
    out.estimate("scaled_final_length", estimate_json(&Estimate::from_samples(&scaled)));
    out.diagnostic("m", m);
    out.diagnostic("d", d);
    out.diagnostic("steps", steps);
    out.diagnostic("long_run_mean_reference", (std::f64::consts::PI * m as f64 / 2.0).sqrt());
    Ok(out)
}

fn constants_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let g = cfg.require_graph()?;
    let seed = cfg.require_seed()?;
    let c = resolve_constants(g, cfg.case, &cfg.schedule, cfg.tmax, cfg.replicates, cfg.cap_walks, seed)?;
    let mut out = RunResult::new(cfg.echo(), &["name", "value"]);
    let reals = [
        ("gamma", c.gamma),
        ("alpha", c.alpha),
        ("a", c.a),
        ("b", c.b),
        ("d", c.d),
        ("stderr_gamma", c.stderr_gamma),
        ("stderr_alpha", c.stderr_alpha),
    ];
    for (name, v) in reals {
        out.push_row(vec![name.to_string(), format_real(v)]);
        out.estimate(name, v);
    }
    out.push_row(vec!["m".to_string(), c.m.to_string()]);
    out.estimate("m", c.m);
    out.diagnostic("case", c.case.to_string());
    out.diagnostic("replicates", cfg.replicates);
    out.diagnostic("capacity_walks", cfg.cap_walks);
    Ok(out)
}

fn mixing_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let g = cfg.require_graph()?;
    let report = mixing_time(g, cfg.tmax)?;
    let mut out = RunResult::new(cfg.echo(), &["t", "deviation"]);
    for &(t, dev) in &report.separation_curve {
        out.push_row(vec![t.to_string(), format_real(dev)]);
    }
    out.estimate("tau", report.tau);
    if let (Some(tau), Some(n)) = (report.tau, g.side_length()) {
        out.estimate("tau_over_n2", tau as f64 / (n * n) as f64);
    }
    // the Green sum costs sqrt(|G|) profile evaluations
    if g.vertex_count() <= 100_000 {
        out.estimate("green_sum", green_sum(g)?);
    }
    out.diagnostic("t_max", report.t_max);
    out.diagnostic("vertex_count", g.vertex_count());
    Ok(out)
}

fn fdd_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let seed = cfg.require_seed()?;
    let times = require_times(cfg)?;
    if times[0] <= 0.0 {
        return Err(Error::config("fdd times must be positive"));
    }
    let (samples, start, source_info) = match cfg.source {
        FddSource::Lerw => {
            let g = cfg.require_graph()?;
            let (rescaling, constants) = rescaling_for(cfg, g)?;
            let ys = lerw_lengths(g, &rescaling, &times, cfg.replicates, seed);
            let zs = ys.iter().map(|row| row.iter().map(|&y| rescaling.z(y as f64)).collect()).collect();
            (zs, 0.0, json!({ "source": "lerw", "constants": constants }))
        }
        FddSource::Surrogate => {
            let m = surrogate_size(cfg)?;
            let d = 1.0 / (m as f64).sqrt();
            (surrogate_marginals(m, &times, cfg.replicates, seed)?, d, json!({ "source": "surrogate", "m": m }))
        }
    };
    let rayleigh_seed = domain_seed(seed, "rayleigh");
    let reference = rayleigh_marginals(start, &times, cfg.rayleigh_replicates.unwrap_or(cfg.replicates), rayleigh_seed);
    let mut report = fdd_compare(&times, &samples, &reference)?;
    report.seeds = vec![seed, rayleigh_seed];
    let mut out = RunResult::new(cfg.echo(), &["time", "ks", "n_lerw", "n_rayleigh"]);
    for (k, &t) in times.iter().enumerate() {
        out.push_row(vec![
            format_real(t),
            format_real(report.ks[k]),
            report.n_lerw.to_string(),
            report.n_rayleigh.to_string(),
        ]);
    }
    let means: Vec<Value> = (0..times.len())
        .map(|k| {
            json!({
                "t": times[k],
                "sample": estimate_json(&Estimate::from_samples(&column(&samples, k))),
                "rayleigh": estimate_json(&Estimate::from_samples(&column(&reference, k))),
            })
        })
        .collect();
    out.estimate("ks", report.ks.clone());
    out.estimate("means", means);
    out.diagnostic("seeds", report.seeds.clone());
    out.diagnostic("sample", source_info);
    out.diagnostic("rayleigh_start", start);
    Ok(out)
}

fn couple_verify(cfg: &ExperimentConfig) -> Result<RunResult> {
    let j = cfg.j.ok_or_else(|| Error::config("couple-verify needs j"))?;
    let p = cfg.p.ok_or_else(|| Error::config("couple-verify needs p"))?;
    let q = cfg.q.ok_or_else(|| Error::config("couple-verify needs q"))?;
    let law = CouplingLaw::new(j, p, q)?;
    let (vm, wm) = (law.v_marginal(), law.w_marginal());
    let marginal_error = (0..1u32 << j)
        .map(|mask| (vm[mask as usize] - law.v_mass(mask)).abs().max((wm[mask as usize] - law.w_mass(mask)).abs()))
        .fold(0.0, f64::max);
    let matched = law.match_probability();
    let bound = law.bound();
    let mut out = RunResult::new(
        cfg.echo(),
        &["j", "p", "q", "match_probability", "bound", "match_ge_bound", "max_marginal_error"],
    );
    out.push_row(vec![
        j.to_string(),
        format_real(p),
        format_real(q),
        format_real(matched),
        format_real(bound),
        (matched >= bound).to_string(),
        format_real(marginal_error),
    ]);
    out.estimate("match_probability", matched);
    out.estimate("bound", bound);
    out.estimate("match_ge_bound", matched >= bound);
    out.diagnostic("max_marginal_error", marginal_error);
    out.diagnostic("cells", law.cells.len());
    // an empirical audit only when a seed is given
    if let Some(seed) = cfg.seed {
        let agree: Vec<f64> = map_replicates(cfg.replicates, seed, |_, rng| {
            let (v, w) = law.sample_masks(rng);
            f64::from(u8::from(v == w))
        });
        out.estimate("empirical_match", estimate_json(&Estimate::from_samples(&agree)));
    }
    Ok(out)
}

/// Paths from a `time,value` CSV, grouped by the optional `replicate`
/// column. Each group starts with its value at time 0.
fn read_paths(path: &Path, slope: f64, horizon: Option<f64>) -> Result<Vec<(String, StepPath)>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ti, vi) = match (find("time"), find("value")) {
        (Some(t), Some(v)) => (t, v),
        _ => return Err(Error::config("modulus input needs time and value columns")),
    };
    let ri = find("replicate");
    let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("").trim().to_string();
        let parse = |k: usize| {
            field(k).parse::<f64>().map_err(|e| Error::config(format!("bad number {:?}: {e}", field(k))))
        };
        let key = ri.map(field).unwrap_or_default();
        let slot = *index.entry(key.clone()).or_insert_with(|| {
            groups.push((key, Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push((parse(ti)?, parse(vi)?));
    }
    groups
        .into_iter()
        .map(|(key, points)| {
            let (&(t0, start), rest) =
                points.split_first().ok_or_else(|| Error::config("empty path in modulus input"))?;
            if t0 != 0.0 {
                return Err(Error::config("each path must start with a row at time 0"));
            }
            let last = rest.last().map_or(0.0, |p| p.0);
            let horizon = horizon.unwrap_or(last);
            let path = StepPath::from_breakpoints(start, slope, horizon, rest.to_vec())
                .map_err(|e| Error::config(format!("path {key:?}: {e}")))?;
            Ok((key, path))
        })
        .collect()
}

fn modulus_run(cfg: &ExperimentConfig) -> Result<RunResult> {
    let input = cfg.input.as_ref().ok_or_else(|| Error::config("modulus needs an input CSV"))?;
    let theta = cfg.theta.ok_or_else(|| Error::config("modulus needs theta"))?;
    let paths = read_paths(input, cfg.slope, cfg.horizon)?;
    let mut out = RunResult::new(cfg.echo(), &["replicate", "w"]);
    let mut ws = Vec::with_capacity(paths.len());
    for (key, path) in &paths {
        let w = modulus_w(path, theta, path.horizon()).map_err(|e| Error::config(e.to_string()))?;
        ws.push(w);
        out.push_row(vec![key.clone(), format_real(w)]);
    }
    out.estimate("w", estimate_json(&Estimate::from_samples(&ws)));
    out.diagnostic("paths", paths.len());
    out.diagnostic("theta", theta);
    Ok(out)
}
