//! Batch drivers behind the command-line verbs: seed lists, sweeps, the
//! canned figure matrix and the mining comparison against random logs.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::domain::ServiceId;
use crate::mining::{mine_transactions, MiningError};
use crate::sim::workload::SessionGenerator;
use crate::sim::{run, ConfigError, CorrelationMatrix, MetricsReport, SimConfig};

/// A named set of config overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    pub name: String,
    pub overrides: Vec<(String, String)>,
}

impl Arm {
    pub fn new(name: &str, overrides: &[(&str, &str)]) -> Self {
        Self {
            name: name.to_string(),
            overrides: overrides.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn config(&self, base: &SimConfig, seed: u64) -> Result<SimConfig, ConfigError> {
        let mut c = base.clone();
        for (k, v) in &self.overrides {
            c.set(k, v)?;
        }
        c.seed = seed;
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct ArmResult {
    pub arm: String,
    pub seed: u64,
    pub report: Result<MetricsReport, String>,
}

/// `"3"`, `"1..10"` (inclusive) or `"1,4,9"`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("bad seed list '{s}'");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

/// `"key=v1,v2,..."` into one arm per value.
pub fn parse_sweep(s: &str) -> Result<Vec<Arm>, String> {
    let (k, vs) = s.split_once('=').ok_or_else(|| format!("bad sweep '{s}', expected key=v1,v2"))?;
    let k = k.trim();
    let arms: Vec<Arm> = vs
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| Arm::new(&format!("{k}={v}"), &[(k, v)]))
        .collect();
    if arms.is_empty() {
        return Err(format!("sweep '{s}' has no values"));
    }
    Ok(arms)
}

/// Cartesian product of several sweeps.
pub fn combine(sweeps: &[Vec<Arm>]) -> Vec<Arm> {
    let mut out = vec![Arm::new("base", &[])];
    for sweep in sweeps {
        out = out
            .iter()
            .flat_map(|a| {
                sweep.iter().map(move |b| {
                    let name = if a.overrides.is_empty() {
                        b.name.clone()
                    } else {
                        format!("{} {}", a.name, b.name)
                    };
                    let mut overrides = a.overrides.clone();
                    overrides.extend(b.overrides.iter().cloned());
                    Arm { name, overrides }
                })
            })
            .collect();
    }
    out
}

/// Runs every arm at every seed in parallel; results come back in arm
/// order, then seed order.
pub fn run_arms(base: &SimConfig, arms: &[Arm], seeds: &[u64]) -> Vec<ArmResult> {
    let jobs: Vec<(usize, u64)> = (0..arms.len()).flat_map(|a| seeds.iter().map(move |&s| (a, s))).collect();
    jobs.par_iter()
        .map(|&(a, seed)| {
            let arm = &arms[a];
            let report = arm
                .config(base, seed)
                .and_then(|c| run(&c))
                .map_err(|e| e.to_string());
            ArmResult {
                arm: arm.name.clone(),
                seed,
                report,
            }
        })
        .collect()
}

/// CSV of the successful results, with the arm name as first column.
pub fn write_reports<W: Write>(out: W, results: &[ArmResult]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = false;
    for r in results {
        let Ok(rep) = &r.report else { continue };
        if !header {
            let mut h = vec!["arm".to_string()];
            h.extend(rep.csv_header());
            w.write_record(&h)?;
            header = true;
        }
        let mut row = vec![r.arm.clone()];
        row.extend(rep.csv_record());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmSummary {
    pub runs: usize,
    pub failed: usize,
    pub hit_ratio: f64,
    pub latency: f64,
    pub energy: f64,
}

pub fn summarize(results: &[ArmResult], arm: &str) -> ArmSummary {
    let ok: Vec<&MetricsReport> = results
        .iter()
        .filter(|r| r.arm == arm)
        .filter_map(|r| r.report.as_ref().ok())
        .collect();
    let failed = results.iter().filter(|r| r.arm == arm && r.report.is_err()).count();
    let mean = |f: &dyn Fn(&MetricsReport) -> f64| {
        if ok.is_empty() {
            0.0
        } else {
            ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
        }
    };
    ArmSummary {
        runs: ok.len(),
        failed,
        hit_ratio: mean(&|r| r.hit_ratio),
        latency: mean(&|r| r.latency_mean),
        energy: mean(&|r| r.energy_mean),
    }
}

/// The discovery arms compared in the summary table, cumulative from the
/// reactive baseline.
pub fn discovery_arms() -> Vec<Arm> {
    vec![
        Arm::new("reactive", &[("advertise", "off"), ("piggyback", "false")]),
        Arm::new("random-adv", &[("advertise", "random"), ("piggyback", "false")]),
        Arm::new("assoc-adv", &[("advertise", "correlated"), ("piggyback", "false")]),
        Arm::new("piggyback", &[("advertise", "correlated"), ("piggyback", "true")]),
    ]
}

// ---- mining validation ----

/// Frequent itemset counts by size: 1, 2, 3, 4 and more.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ItemsetCounts {
    pub by_size: [usize; 4],
}

impl ItemsetCounts {
    pub fn total(&self) -> usize {
        self.by_size.iter().sum()
    }

    /// Itemsets with three or more members.
    pub fn large(&self) -> usize {
        self.by_size[2] + self.by_size[3]
    }

    /// `sizes[k]` counts itemsets with `k + 1` members.
    fn from_sizes(sizes: &[usize]) -> Self {
        let mut by_size = [0; 4];
        for (k, &n) in sizes.iter().enumerate() {
            by_size[k.min(3)] += n;
        }
        Self { by_size }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub services: u32,
    pub sessions: usize,
    pub dataset: ItemsetCounts,
    pub random: ItemsetCounts,
}

fn count(transactions: &[Vec<ServiceId>], min_support: u32) -> Result<ItemsetCounts, MiningError> {
    let r = mine_transactions(transactions, min_support)?;
    Ok(ItemsetCounts::from_sizes(&r.counts_by_size()))
}

/// Sessions restricted to ids `<= services`; sessions left empty are dropped.
pub fn truncate(sessions: &[Vec<ServiceId>], services: u32) -> Vec<Vec<ServiceId>> {
    sessions
        .iter()
        .map(|s| s.iter().copied().filter(|x| x.0 <= services).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}

/// A session of `len` distinct ids drawn uniformly from `1..=services`.
pub fn random_session<R: Rng>(len: usize, services: u32, rng: &mut R) -> Vec<ServiceId> {
    let len = len.min(services as usize);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let j = ServiceId(rng.random_range(1..=services));
        if seen.insert(j) {
            out.push(j);
        }
    }
    out
}

/// Mines `sessions` at each service-count truncation next to a random log
/// with the same session lengths.
pub fn validate_mining<R: Rng>(
    sessions: &[Vec<ServiceId>],
    service_counts: &[u32],
    min_support: u32,
    rng: &mut R,
) -> Result<Vec<ValidationRow>, MiningError> {
    let counts: Vec<u32> = if service_counts.is_empty() {
        vec![sessions.iter().flatten().map(|s| s.0).max().unwrap_or(0)]
    } else {
        service_counts.to_vec()
    };
    counts
        .iter()
        .map(|&n| {
            let data = truncate(sessions, n);
            let random: Vec<Vec<ServiceId>> = data.iter().map(|s| random_session(s.len(), n, rng)).collect();
            Ok(ValidationRow {
                services: n,
                sessions: data.len(),
                dataset: count(&data, min_support)?,
                random: count(&random, min_support)?,
            })
        })
        .collect()
}

pub fn write_validation<W: Write>(out: W, rows: &[ValidationRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "services", "sessions", "dataset", "size1", "size2", "size3", "size4plus", "total",
    ])?;
    for r in rows {
        for (name, c) in [("dataset", r.dataset), ("random", r.random)] {
            let mut row = vec![r.services.to_string(), r.sessions.to_string(), name.to_string()];
            row.extend(c.by_size.iter().map(usize::to_string));
            row.push(c.total().to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Sessions from a walk over the YouTube correlation fixture.
pub fn youtube_sessions<R: Rng>(count: usize, len: (usize, usize), rng: &mut R) -> Vec<Vec<ServiceId>> {
    let m = CorrelationMatrix::youtube();
    SessionGenerator::walk(m.size() as u32, &m, len).sessions(count, rng)
}

// ---- figure matrix ----

pub struct Figure {
    pub name: &'static str,
    pub base: Vec<(&'static str, &'static str)>,
    pub arms: Vec<Arm>,
}

/// The canned scenario matrix, one entry per output CSV.
pub fn figures() -> Vec<Figure> {
    let sweep = |key: &str, vals: &[&str]| -> Vec<Arm> {
        vals.iter().map(|v| Arm::new(&format!("{key}={v}"), &[(key, v)])).collect()
    };
    vec![
        Figure {
            name: "fig7_latency",
            base: vec![],
            arms: discovery_arms(),
        },
        Figure {
            name: "fig8_hit_ratio",
            base: vec![("protocol", "dsr")],
            arms: discovery_arms(),
        },
        Figure {
            name: "fig9a_cache_size",
            base: vec![("protocol", "dsr")],
            arms: sweep("cache_size", &["2", "4", "8", "16"]),
        },
        Figure {
            name: "fig9b_speed",
            base: vec![("protocol", "dsr")],
            arms: ["5", "10", "20", "30"]
                .iter()
                .map(|v| Arm::new(&format!("speed_max={v}"), &[("speed_max", v)]))
                .collect(),
        },
        Figure {
            name: "fig10a_nodes",
            base: vec![("mobility", "street")],
            arms: sweep("nodes", &["20", "30", "40", "50"]),
        },
        Figure {
            name: "fig10b_energy",
            base: vec![("mobility", "street")],
            arms: discovery_arms(),
        },
        Figure {
            name: "fig11_semantic",
            base: vec![],
            arms: vec![
                Arm::new("semantic=off", &[("semantic", "off")]),
                Arm::new("semantic=multilevel", &[("semantic", "multilevel")]),
            ],
        },
        Figure {
            name: "fig12b_ontology",
            base: vec![],
            arms: vec![
                Arm::new("multilevel", &[("semantic", "multilevel")]),
                Arm::new("unified", &[("semantic", "unified")]),
            ],
        },
    ]
}

#[derive(Debug, Clone, Default)]
pub struct FigsOutcome {
    pub written: Vec<String>,
    pub failures: Vec<String>,
}

/// Runs all figures and writes `<name>.csv`, a per-arm `summary.csv`
/// and the multilevel ontology timeline. One failing arm does not stop the
/// others; failures are listed in the summary.
pub fn paper_figs(out_dir: &Path, base: &SimConfig, seeds: &[u64]) -> std::io::Result<FigsOutcome> {
    fs::create_dir_all(out_dir)?;
    let mut outcome = FigsOutcome::default();
    let mut summary = csv::Writer::from_path(out_dir.join("summary.csv"))?;
    summary.write_record(["figure", "arm", "runs", "failed", "hit_ratio", "latency", "energy_mean", "errors"])?;

    for fig in figures() {
        let mut fb = base.clone();
        let mut base_err = None;
        for (k, v) in &fig.base {
            if let Err(e) = fb.set(k, v) {
                base_err = Some(e.to_string());
            }
        }
        let results = match base_err {
            Some(e) => fig
                .arms
                .iter()
                .flat_map(|a| {
                    seeds.iter().map(|&seed| ArmResult {
                        arm: a.name.clone(),
                        seed,
                        report: Err(e.clone()),
                    })
                })
                .collect(),
            None => run_arms(&fb, &fig.arms, seeds),
        };
        let name = format!("{}.csv", fig.name);
        write_reports(fs::File::create(out_dir.join(&name))?, &results).map_err(std::io::Error::other)?;
        outcome.written.push(name);
        for arm in &fig.arms {
            let s = summarize(&results, &arm.name);
            let errors: Vec<String> = results
                .iter()
                .filter(|r| r.arm == arm.name)
                .filter_map(|r| r.report.as_ref().err().map(|e| format!("seed {}: {e}", r.seed)))
                .collect();
            outcome.failures.extend(errors.iter().map(|e| format!("{} {}: {e}", fig.name, arm.name)));
            summary.write_record([
                fig.name.to_string(),
                arm.name.clone(),
                s.runs.to_string(),
                s.failed.to_string(),
                s.hit_ratio.to_string(),
                s.latency.to_string(),
                s.energy.to_string(),
                errors.join("; "),
            ])?;
        }
        if fig.name == "fig12b_ontology" {
            write_timeline(out_dir, &results)?;
            outcome.written.push("fig12a_ontology_growth.csv".into());
        }
    }
    summary.flush()?;
    outcome.written.push("summary.csv".into());
    Ok(outcome)
}

/// Mean ext-ontology tuples per node over time, multilevel runs.
fn write_timeline(out_dir: &Path, results: &[ArmResult]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(out_dir.join("fig12a_ontology_growth.csv"))?;
    w.write_record(["seed", "time", "mean_tuples", "mean_documents"])?;
    for r in results.iter().filter(|r| r.arm == "multilevel") {
        let Ok(rep) = &r.report else { continue };
        for s in &rep.timeline {
            let n = s.tuples.len().max(1) as f64;
            w.write_record([
                r.seed.to_string(),
                s.time.to_string(),
                (s.tuples.iter().sum::<usize>() as f64 / n).to_string(),
                (s.documents.iter().sum::<usize>() as f64 / n).to_string(),
            ])?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_seeds("4,9").unwrap(), vec![4, 9]);
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn sweep_times_seeds() {
        let arms = parse_sweep("cache_size=2,4,8,16").unwrap();
        assert_eq!(arms.len(), 4);
        assert_eq!(arms.len() * parse_seeds("1..10").unwrap().len(), 40);
        let both = combine(&[arms, parse_sweep("protocol=aodv,dsr").unwrap()]);
        assert_eq!(both.len(), 8);
        assert_eq!(both[1].overrides.len(), 2);
    }

    #[test]
    fn itemset_counts_bucket_by_size() {
        let log: Vec<Vec<ServiceId>> = vec![(1..=5).map(ServiceId).collect()];
        let rows = validate_mining(&log, &[5], 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        // all 31 subsets of one 5-item session: 5, 10, 10, 5 + 1
        assert_eq!(rows[0].dataset.by_size, [5, 10, 10, 6]);
        assert_eq!(rows[0].dataset.large(), 16);
    }

    #[test]
    fn empty_dataset_gives_zero_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows = validate_mining(&[], &[10], 2, &mut rng).unwrap();
        assert_eq!(rows[0].dataset.total(), 0);
        assert_eq!(rows[0].random.total(), 0);
    }

    #[test]
    fn random_sessions_are_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s = random_session(6, 8, &mut rng);
            assert_eq!(s.iter().collect::<BTreeSet<_>>().len(), 6);
        }
    }

    #[test]
    fn truncation_drops_high_ids() {
        let s = vec![vec![ServiceId(1), ServiceId(9)], vec![ServiceId(12)]];
        assert_eq!(truncate(&s, 5), vec![vec![ServiceId(1)]]);
    }

    #[test]
    fn figure_matrix_shape() {
        let figs = figures();
        assert_eq!(figs.iter().find(|f| f.name == "fig7_latency").unwrap().arms.len(), 4);
        let names: BTreeSet<_> = figs.iter().map(|f| f.name).collect();
        assert_eq!(names.len(), figs.len());
    }
}
