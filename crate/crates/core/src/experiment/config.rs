use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::graph::GraphModel;
use crate::segments::{Case, ScheduleParams, DEFAULT_ETA};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    LerwRun,
    RayleighRun,
    SurrogateRun,
    Constants,
    Mixing,
    Fdd,
    CoupleVerify,
    Modulus,
}

impl Subcommand {
    pub const ALL: [Subcommand; 8] = [
        Subcommand::LerwRun,
        Subcommand::RayleighRun,
        Subcommand::SurrogateRun,
        Subcommand::Constants,
        Subcommand::Mixing,
        Subcommand::Fdd,
        Subcommand::CoupleVerify,
        Subcommand::Modulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::LerwRun => "lerw-run",
            Subcommand::RayleighRun => "rayleigh-run",
            Subcommand::SurrogateRun => "surrogate-run",
            Subcommand::Constants => "constants",
            Subcommand::Mixing => "mixing",
            Subcommand::Fdd => "fdd",
            Subcommand::CoupleVerify => "couple-verify",
            Subcommand::Modulus => "modulus",
        }
    }

    /// Whether the subcommand draws random numbers and so needs a seed.
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Subcommand::Mixing | Subcommand::Modulus | Subcommand::CoupleVerify)
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::config(format!("unknown subcommand {s:?}")))
    }
}

/// How `rayleigh-run` builds its paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayleighMode {
    Event,
    Field,
}

/// What `fdd` compares against the Rayleigh process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FddSource {
    Lerw,
    Surrogate,
}

/// Every key accepted in config files and as `--key value` flags.
pub const KEYS: &[&str] = &[
    "subcommand",
    "graph",
    "case",
    "seed",
    "replicates",
    "horizon",
    "times",
    "eta",
    "output",
    "summary",
    "workers",
    "tmax",
    "tau",
    "r",
    "s",
    "w",
    "cap-walks",
    "const-replicates",
    "a",
    "b",
    "m",
    "mode",
    "y",
    "j",
    "p",
    "q",
    "theta",
    "input",
    "slope",
    "source",
    "rayleigh-replicates",
];

/// Keys that do not affect results and are left out of the config echo.
const PLUMBING_KEYS: &[&str] = &["output", "summary", "workers"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub graph: Option<GraphModel>,
    pub case: Case,
    pub seed: Option<u64>,
    pub replicates: usize,
    pub horizon: Option<f64>,
    pub times: Vec<f64>,
    pub schedule: ScheduleParams,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tmax: u64,
    pub cap_walks: u64,
    pub const_replicates: usize,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub m: Option<u64>,
    pub mode: RayleighMode,
    pub y: f64,
    pub j: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub input: Option<PathBuf>,
    pub slope: f64,
    pub source: FddSource,
    pub rayleigh_replicates: Option<usize>,
    /// The merged key/value pairs, for echoing into summaries.
    pub raw: BTreeMap<String, String>,
}

impl ExperimentConfig {
    /// The stated horizon, or the last requested time.
    pub fn effective_horizon(&self) -> Option<f64> {
        self.horizon.or_else(|| self.times.last().copied())
    }

    /// Requested times, defaulting to the horizon alone.
    pub fn effective_times(&self) -> Vec<f64> {
        if self.times.is_empty() {
            self.horizon.into_iter().collect()
        } else {
            self.times.clone()
        }
    }

    pub fn require_graph(&self) -> Result<&GraphModel> {
        self.graph
            .as_ref()
            .ok_or_else(|| Error::config(format!("{} needs a graph", self.subcommand)))
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::config("seed required"))
    }

    /// Key/value pairs that determine the results.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.raw
            .iter()
            .filter(|(k, _)| !PLUMBING_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-").to_ascii_lowercase()
}

/// Reads flat `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}: expected key=value, got {line:?}", lineno + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Merges config-file text with flag pairs (flags win) and validates.
pub fn parse_config(text: &str, flags: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut raw = BTreeMap::new();
    for (k, v) in parse_pairs(text)?.into_iter().chain(flags.iter().cloned()) {
        let key = normalize_key(&k);
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(format!("unknown key {k:?}")));
        }
        raw.insert(key, v);
    }
    from_map(raw)
}

fn parse_value<T: FromStr>(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    raw.get(key)
        .map(|v| v.parse::<T>().map_err(|e| Error::config(format!("{key} = {v:?}: {e}"))))
        .transpose()
}

fn parse_real(raw: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    match parse_value::<f64>(raw, key)? {
        Some(x) if !x.is_finite() => Err(Error::config(format!("{key} must be finite"))),
        other => Ok(other),
    }
}

fn parse_times(text: &str) -> Result<Vec<f64>> {
    let times: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| Error::config(format!("times entry {s:?}: {e}"))))
        .collect::<Result<_>>()?;
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::config("times must be finite and nonnegative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("times must be ascending"));
    }
    Ok(times)
}

fn from_map(raw: BTreeMap<String, String>) -> Result<ExperimentConfig> {
    let subcommand: Subcommand = raw
        .get("subcommand")
        .ok_or_else(|| Error::config("subcommand required"))?
        .parse()?;
    let seed = parse_value::<u64>(&raw, "seed")?;
    if seed.is_none() && subcommand.is_stochastic() {
        return Err(Error::config("seed required"));
    }
    let graph = parse_value::<GraphModel>(&raw, "graph")?;
    let case = parse_value::<Case>(&raw, "case")?.unwrap_or(Case::One);
    let replicates = parse_value::<usize>(&raw, "replicates")?.unwrap_or(100);
    if replicates == 0 {
        return Err(Error::config("replicates must be at least 1"));
    }
    let times = match raw.get("times") {
        Some(t) => parse_times(t)?,
        None => Vec::new(),
    };
    let horizon = parse_real(&raw, "horizon")?;
    if let Some(h) = horizon {
        if !(h > 0.0) {
            return Err(Error::config("horizon must be positive"));
        }
        if times.last().is_some_and(|&t| t > h) {
            return Err(Error::config("times must not exceed the horizon"));
        }
    }
    let schedule = ScheduleParams {
        tau: parse_value(&raw, "tau")?,
        eta: parse_real(&raw, "eta")?.unwrap_or(DEFAULT_ETA),
        r: parse_value(&raw, "r")?,
        s: parse_value(&raw, "s")?,
        w: parse_value(&raw, "w")?,
    };
    let mode = match raw.get("mode").map(String::as_str) {
        None | Some("event") => RayleighMode::Event,
        Some("field") => RayleighMode::Field,
        Some(other) => return Err(Error::config(format!("mode must be event or field, got {other:?}"))),
    };
    let source = match raw.get("source").map(String::as_str) {
        None | Some("lerw") => FddSource::Lerw,
        Some("surrogate") => FddSource::Surrogate,
        Some(other) => return Err(Error::config(format!("source must be lerw or surrogate, got {other:?}"))),
    };
    let workers = parse_value::<usize>(&raw, "workers")?;
    if workers == Some(0) {
        return Err(Error::config("workers must be at least 1"));
    }
    Ok(ExperimentConfig {
        subcommand,
        graph,
        case,
        seed,
        replicates,
        horizon,
        times,
        schedule,
        output: parse_value(&raw, "output")?,
        summary: parse_value(&raw, "summary")?,
        workers,
        tmax: parse_value(&raw, "tmax")?.unwrap_or(1_000_000),
        cap_walks: parse_value(&raw, "cap-walks")?.unwrap_or(8),
        const_replicates: parse_value(&raw, "const-replicates")?.unwrap_or(200),
        a: parse_real(&raw, "a")?,
        b: parse_real(&raw, "b")?,
        m: parse_value(&raw, "m")?,
        mode,
        y: parse_real(&raw, "y")?.unwrap_or(0.0),
        j: parse_value(&raw, "j")?,
        p: parse_real(&raw, "p")?,
        q: parse_real(&raw, "q")?,
        theta: parse_real(&raw, "theta")?,
        input: parse_value(&raw, "input")?,
        slope: parse_real(&raw, "slope")?.unwrap_or(1.0),
        source,
        rayleigh_replicates: parse_value(&raw, "rayleigh-replicates")?,
        raw,
    })
}
