use lerw_core::experiment::{parse_config, run_experiment, RunResult};
use lerw_core::stats::Estimate;

fn run(text: &str, flags: &[(&str, &str)]) -> RunResult {
    let flags: Vec<(String, String)> = flags.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    run_experiment(&parse_config(text, &flags).unwrap()).unwrap()
}

fn column(result: &RunResult, name: &str) -> usize {
    result.header.iter().position(|h| h == name).unwrap()
}

/// Final value of each replicate, read back from the rows.
fn finals(result: &RunResult, value: &str) -> Vec<f64> {
    let (rc, vc) = (column(result, "replicate"), column(result, value));
    let mut out: Vec<f64> = Vec::new();
    for row in &result.rows {
        let r: usize = row[rc].parse().unwrap();
        let v: f64 = row[vc].parse().unwrap();
        if r == out.len() {
            out.push(v);
        } else {
            out[r] = v;
        }
    }
    out
}

const RAYLEIGH: &str = "subcommand=rayleigh-run\nseed=11\nhorizon=3\nreplicates=40";
const SURROGATE: &str = "subcommand=surrogate-run\nseed=5\nm=900\nj=60\nreplicates=30";
const LERW: &str = "subcommand=lerw-run\nseed=3\ngraph=torus:d=2,n=6\ntau=2\na=1\nb=1\ntimes=0.5,1\nreplicates=12";

#[test]
fn same_seed_same_output() {
    for text in [RAYLEIGH, SURROGATE, LERW] {
        let (a, b) = (run(text, &[]), run(text, &[]));
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.summary_json().unwrap(), b.summary_json().unwrap());
    }
}

#[test]
fn different_seed_different_output() {
    let a = run(RAYLEIGH, &[]);
    let b = run(RAYLEIGH, &[("seed", "12")]);
    assert_ne!(a.to_csv().unwrap(), b.to_csv().unwrap());
}

#[test]
fn replicates_are_prefix_stable() {
    for (text, key) in [(RAYLEIGH, "replicate"), (SURROGATE, "replicate"), (LERW, "replicate")] {
        let small = run(text, &[("replicates", "5")]);
        let large = run(text, &[]);
        let rc = column(&small, key);
        let prefix: Vec<_> = large.rows.iter().filter(|r| r[rc].parse::<usize>().unwrap() < 5).cloned().collect();
        assert_eq!(small.rows, prefix);
    }
}

#[test]
fn rayleigh_summary_matches_rows() {
    let result = run(RAYLEIGH, &[]);
    // unit slope after the last listed point up to the horizon 3
    let times = finals(&result, "time");
    let values = finals(&result, "value");
    let at_horizon: Vec<f64> = times.iter().zip(&values).map(|(t, v)| v + (3.0 - t)).collect();
    let from_rows = Estimate::from_samples(&at_horizon);
    let est = &result.estimates["final_value"];
    assert!((est["mean"].as_f64().unwrap() - from_rows.mean).abs() < 1e-12);
    assert!((est["stderr"].as_f64().unwrap() - from_rows.stderr).abs() < 1e-12);
    assert_eq!(est["count"].as_u64().unwrap(), 40);
}

#[test]
fn surrogate_summary_drops_an_excluded_replicate() {
    let result = run(SURROGATE, &[]);
    let mut lengths = finals(&result, "L");
    let full = Estimate::from_samples(&lengths);
    assert!((result.estimates["final_length"]["mean"].as_f64().unwrap() - full.mean).abs() < 1e-12);

    let dropped = lengths.remove(7);
    let rest = Estimate::from_samples(&lengths);
    let n = full.count as f64;
    assert!((rest.mean - (full.mean * n - dropped) / (n - 1.0)).abs() < 1e-9);
    assert_eq!(rest.count, 29);
}

#[test]
fn lerw_rows_follow_the_rescaling() {
    let result = run(LERW, &[]);
    assert_eq!(result.rows.len(), 24);
    let (yc, zc) = (column(&result, "Y"), column(&result, "Z"));
    // unit constants on 36 vertices: z = y / 6
    for row in &result.rows {
        let y: f64 = row[yc].parse().unwrap();
        let z: f64 = row[zc].parse().unwrap();
        assert!((1.0..=36.0).contains(&y));
        assert!((z - y / 6.0).abs() < 1e-12);
    }
}

#[test]
fn summary_echoes_config() {
    let result = run(SURROGATE, &[("workers", "2")]);
    let summary = result.summary();
    assert_eq!(summary["config"]["seed"], "5");
    assert_eq!(summary["config"]["m"], "900");
    assert!(summary["config"].get("workers").is_none());
    assert!(summary["version"].as_str().unwrap().starts_with("lerw-core"));
}
