use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use handy::experiments::{self, Arm};
use handy::mining::text::{format_sessions, parse_sessions};
use handy::sim::{Scenario, SimConfig, Simulation};

#[derive(Parser)]
#[command(name = "handy", about = "Correlation-aware service discovery simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl ConfigArgs {
    fn load(&self, base: SimConfig) -> Result<SimConfig> {
        let mut cfg = base;
        if let Some(p) = &self.config {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            cfg.apply_text(&text).with_context(|| format!("in {}", p.display()))?;
        }
        for kv in &self.set {
            cfg.apply_override(kv).with_context(|| format!("--set {kv}"))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run scenarios and write one CSV row per run.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, conflicts_with = "seeds")]
        seed: Option<u64>,
        /// Seed list: `1..10` or `1,2,5`.
        #[arg(long)]
        seeds: Option<String>,
        /// `key=v1,v2,...`, repeatable; sweeps combine as a product.
        #[arg(long)]
        sweep: Vec<String>,
        /// Append rows here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the event trace of the first run.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Compare frequent itemsets of a session log against random logs.
    ValidateMining {
        /// Session log, one session per line.
        #[arg(long, conflicts_with = "generate")]
        dataset: Option<PathBuf>,
        /// Generate the log instead: `youtube` or `random`.
        #[arg(long)]
        generate: Option<String>,
        #[arg(long, default_value_t = 1000)]
        sessions: usize,
        /// Service-count truncations, comma separated.
        #[arg(long, value_delimiter = ',')]
        services: Vec<u32>,
        #[arg(long, default_value_t = 50)]
        min_support: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Save the generated log.
        #[arg(long)]
        write_dataset: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the canned figure matrix and write one CSV per figure.
    PaperFigs {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "1..10")]
        seeds: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn output(path: &Option<PathBuf>, append: bool) -> Result<Box<dyn Write>> {
    Ok(match path {
        None => Box::new(io::stdout().lock()),
        Some(p) => Box::new(
            fs::OpenOptions::new()
                .create(true)
                .write(true)
                .append(append)
                .truncate(!append)
                .open(p)
                .with_context(|| format!("opening {}", p.display()))?,
        ),
    })
}

fn cmd_run(
    config: ConfigArgs,
    seed: Option<u64>,
    seeds: Option<String>,
    sweep: Vec<String>,
    out: Option<PathBuf>,
    trace: Option<PathBuf>,
) -> Result<()> {
    let base = config.load(SimConfig::default())?;
    let seeds = match (seed, seeds) {
        (Some(s), _) => vec![s],
        (None, Some(list)) => experiments::parse_seeds(&list).map_err(anyhow::Error::msg)?,
        (None, None) => vec![base.seed],
    };
    let sweeps = sweep
        .iter()
        .map(|s| experiments::parse_sweep(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(anyhow::Error::msg)?;
    let arms = if sweeps.is_empty() {
        vec![Arm::new("base", &[])]
    } else {
        experiments::combine(&sweeps)
    };
    // reject bad sweep values before spending time on runs
    for a in &arms {
        a.config(&base, seeds[0]).with_context(|| format!("arm {}", a.name))?;
    }
    if let Some(tp) = &trace {
        let cfg = arms[0].config(&base, seeds[0])?;
        let run = Simulation::new(Scenario::new(cfg))?.with_trace().run();
        let mut w = io::BufWriter::new(fs::File::create(tp).with_context(|| format!("creating {}", tp.display()))?);
        for r in &run.trace {
            writeln!(w, "{r}")?;
        }
    }
    let results = experiments::run_arms(&base, &arms, &seeds);
    let failed: Vec<String> = results
        .iter()
        .filter_map(|r| r.report.as_ref().err().map(|e| format!("{} seed {}: {e}", r.arm, r.seed)))
        .collect();
    let append = out.as_ref().is_some_and(|p| p.metadata().is_ok_and(|m| m.len() > 0));
    let mut buf = Vec::new();
    experiments::write_reports(&mut buf, &results)?;
    let text = String::from_utf8(buf)?;
    let body = if append {
        text.split_once('\n').map_or("", |(_, rest)| rest).to_string()
    } else {
        text
    };
    output(&out, append)?.write_all(body.as_bytes())?;
    if !failed.is_empty() {
        bail!("{} run(s) failed:\n{}", failed.len(), failed.join("\n"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_validate(
    dataset: Option<PathBuf>,
    generate: Option<String>,
    sessions: usize,
    services: Vec<u32>,
    min_support: u32,
    seed: u64,
    write_dataset: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log = match (dataset, generate.as_deref()) {
        (Some(p), _) => {
            let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            parse_sessions(&text).with_context(|| format!("in {}", p.display()))?
        }
        (None, Some("youtube")) => experiments::youtube_sessions(sessions, (2, 8), &mut rng),
        (None, Some("random")) => {
            let n = services.iter().copied().max().unwrap_or(25);
            (0..sessions)
                .map(|_| {
                    let len = rand::Rng::random_range(&mut rng, 2..=8);
                    experiments::random_session(len, n, &mut rng)
                })
                .collect()
        }
        (None, Some(other)) => bail!("unknown generator '{other}', expected youtube or random"),
        (None, None) => bail!("give --dataset or --generate"),
    };
    if let Some(p) = write_dataset {
        fs::write(&p, format_sessions(&log)).with_context(|| format!("writing {}", p.display()))?;
    }
    let rows = experiments::validate_mining(&log, &services, min_support, &mut rng)?;
    experiments::write_validation(output(&out, false)?, &rows)?;
    Ok(())
}

fn cmd_figs(config: ConfigArgs, seeds: String, out: PathBuf) -> Result<()> {
    let desk = SimConfig {
        sim_time: 2000.0,
        ..SimConfig::default()
    };
    let base = config.load(desk)?;
    let seeds = experiments::parse_seeds(&seeds).map_err(anyhow::Error::msg)?;
    let res = experiments::paper_figs(&out, &base, &seeds)?;
    for f in &res.written {
        println!("{}", out.join(f).display());
    }
    for f in &res.failures {
        eprintln!("failed: {f}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Run {
            config,
            seed,
            seeds,
            sweep,
            out,
            trace,
        } => cmd_run(config, seed, seeds, sweep, out, trace),
        Cmd::ValidateMining {
            dataset,
            generate,
            sessions,
            services,
            min_support,
            seed,
            write_dataset,
            out,
        } => cmd_validate(dataset, generate, sessions, services, min_support, seed, write_dataset, out),
        Cmd::PaperFigs { config, seeds, out } => cmd_figs(config, seeds, out),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
