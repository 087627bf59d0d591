//! `binvote`: run elections, estimate expected distortion, and reproduce
//! the desk-scale checks.

mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use binvote::engine::{exact_report, mc_expected_distortion, EstimationConfig};
use binvote::model::{write_profile_text, Electorate};
use binvote::verify::{self, VerifyOptions};
use binvote::{GroupedProfile, Ranking, VotingRule};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use config::{parse_construction, ExperimentConfig, ProfileSource};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl From<binvote::Error> for CliError {
    fn from(e: binvote::Error) -> Self {
        use binvote::Error as E;
        match e {
            E::Precondition(_)
            | E::Constraint(_)
            | E::InstanceTooLarge { .. }
            | E::DegenerateRule(_)
            | E::Quadrature { .. } => CliError::Precondition(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "binvote", version, about = "Positional voting rules and expected distortion")]
struct Cli {
    /// Master seed; every random stream derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo. Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (defaults to stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Experiment {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline profile, voters separated by `;`, e.g. "1 2 3; 3 1 2".
    #[arg(long)]
    profile: Option<String>,
    /// Profile file: a header `n m` then one ranking per line.
    #[arg(long)]
    profile_file: Option<PathBuf>,
    /// Construction with arguments, e.g. "thm2 m=32 n=1000000".
    #[arg(long)]
    construction: Option<String>,
    /// Utility distribution: uniform, bernoulli:p, perturbed:eps, point:c,
    /// discrete:v,p;v,p
    #[arg(long = "dist")]
    distribution: Option<String>,
    /// Voting rule, e.g. binomial, borda, quantile:0.25.
    #[arg(long)]
    rule: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Winner and per-alternative score totals.
    Winner(Experiment),
    /// Monte Carlo expected distortion and welfare, as CSV.
    Estimate(Experiment),
    /// Exact expected distortion by enumeration, as CSV.
    Oracle(Experiment),
    /// Print a construction's manifest; `--out` receives its profile.
    Construct {
        name: String,
        /// Parameters as key=value.
        args: Vec<String>,
    },
    /// Run one desk-scale check; `all` runs every one.
    Verify {
        id: String,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Monte Carlo throughput at a given size.
    Bench {
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        m: usize,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long = "dist", default_value = "uniform")]
        distribution: String,
    },
}

fn experiment_config(cli: &Cli, e: &Experiment) -> Result<ExperimentConfig, CliError> {
    let base = match &e.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let mut profile = Vec::new();
    if let Some(p) = &e.profile {
        profile.push(ProfileSource::Inline(p.clone()));
    }
    if let Some(p) = &e.profile_file {
        profile.push(ProfileSource::File(p.clone()));
    }
    if let Some(p) = &e.construction {
        profile.push(ProfileSource::Construction(p.clone()));
    }
    Ok(base.merge(ExperimentConfig {
        profile,
        distribution: e.distribution.clone(),
        rule: e.rule.clone(),
        trials: e.trials,
        seed: cli.seed,
        workers: cli.workers,
        out: cli.out.clone(),
    }))
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn winner(cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let (sigma, _) = cfg.load_profile()?;
    let rule = cfg.rule()?.build(sigma.m())?;
    let mut out = output(cfg.out.as_ref())?;
    match &rule {
        VotingRule::Scoring { scores, .. } => {
            let totals = binvote::rules::score_totals(&sigma, scores)?;
            writeln!(out, "rule = {}", rule.name())?;
            writeln!(out, "winner = {}", rule.winner(&sigma)?)?;
            writeln!(out, "alternative,score")?;
            for (j, t) in totals.iter().enumerate() {
                writeln!(out, "{},{t}", j + 1)?;
            }
        }
        VotingRule::Majority => {
            let h = sigma.histogram();
            writeln!(out, "rule = majority")?;
            writeln!(out, "winner = {}", rule.winner(&sigma)?)?;
            writeln!(out, "alternative,first_places")?;
            for j in 1..=2 {
                writeln!(out, "{j},{}", h.count(binvote::Alternative::new(j, 2)?, 1))?;
            }
        }
        VotingRule::Randomized { .. } => {
            writeln!(out, "rule = {}", rule.name())?;
            writeln!(out, "alternative,probability")?;
            for (j, p) in rule.probabilities(&sigma)?.iter().enumerate() {
                writeln!(out, "{},{p}", j + 1)?;
            }
        }
    }
    out.flush()?;
    Ok(0)
}

fn estimate(cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let (sigma, inst) = cfg.load_profile()?;
    let d = cfg.distribution(inst.as_ref())?;
    let trials = cfg
        .trials
        .ok_or_else(|| CliError::Usage("a trial count is required (--trials or `trials =`)".into()))?;
    let est = EstimationConfig::new(trials, cfg.seed()?).with_workers(cfg.workers());
    let report = mc_expected_distortion(&sigma, &d, &est)?;
    let mut out = output(cfg.out.as_ref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(0)
}

fn oracle(cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let (sigma, inst) = cfg.load_profile()?;
    let d = cfg.distribution(inst.as_ref())?;
    let report = exact_report(&sigma, &d)?;
    let mut out = output(cfg.out.as_ref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(0)
}

fn construct_cmd(cli: &Cli, name: &str, args: &[String]) -> Result<u8, CliError> {
    let spec = std::iter::once(name.to_string()).chain(args.iter().cloned()).collect::<Vec<_>>().join(" ");
    let inst = parse_construction(&spec)?;
    print!("{}", inst.manifest());
    if let Some(path) = &cli.out {
        let mut out = output(Some(path))?;
        write_profile_text(&inst.profile, &mut out)?;
        out.flush()?;
    }
    Ok(0)
}

fn verify_cmd(cli: &Cli, id: &str, instances: Option<usize>, trials: Option<u64>) -> Result<u8, CliError> {
    let opts = VerifyOptions {
        // Fixed default so a bare `verify <id>` is reproducible.
        seed: cli.seed.unwrap_or(1),
        workers: cli.workers.unwrap_or(1),
        instances,
        trials,
    };
    let ids: Vec<&str> = if id == "all" { verify::IDS.to_vec() } else { vec![id] };
    if let Some(bad) = ids.iter().find(|i| !verify::IDS.contains(i)) {
        return Err(CliError::Usage(format!(
            "unknown verification id `{bad}`; expected one of: {}",
            verify::IDS.join(", ")
        )));
    }
    let mut out = output(cli.out.as_ref())?;
    let mut all_passed = true;
    for id in ids {
        let result = verify::run(id, &opts)?;
        eprintln!("{}", result.summary());
        writeln!(out, "{result}\n")?;
        all_passed &= result.passed;
    }
    out.flush()?;
    Ok(if all_passed { 0 } else { 1 })
}

/// `n` voters spread over the `m` cyclic shifts of `1..m`.
fn bench_profile(n: u64, m: usize) -> Result<GroupedProfile, CliError> {
    let shifts = (m as u64).min(n) as usize;
    let groups = (0..shifts)
        .map(|s| {
            let order = (0..m).map(|k| ((k + s) % m + 1) as u32).collect();
            let count = n / shifts as u64 + u64::from((s as u64) < n % shifts as u64);
            Ok((Ranking::new(order)?, count))
        })
        .collect::<Result<Vec<_>, binvote::Error>>()?;
    Ok(GroupedProfile::new(groups)?)
}

fn bench(cli: &Cli, n: u64, m: usize, trials: u64, distribution: &str) -> Result<u8, CliError> {
    if n == 0 || m == 0 {
        return Err(CliError::Usage("n and m must be at least 1".into()));
    }
    let seed = cli
        .seed
        .ok_or_else(|| CliError::Usage("bench needs --seed".into()))?;
    let d = distribution.parse()?;
    let sigma = bench_profile(n, m)?;
    let est = EstimationConfig::new(trials, seed).with_workers(cli.workers.unwrap_or(1));
    let started = Instant::now();
    let report = mc_expected_distortion(&sigma, &d, &est)?;
    let secs = started.elapsed().as_secs_f64();
    let draws = trials as f64 * n as f64 * m as f64;
    let mut out = output(cli.out.as_ref())?;
    writeln!(out, "n = {n}")?;
    writeln!(out, "m = {m}")?;
    writeln!(out, "trials = {trials}")?;
    writeln!(out, "workers = {}", est.workers)?;
    writeln!(out, "distribution = {d}")?;
    for e in &report.estimates {
        writeln!(out, "distortion_{} = {}", e.alternative, e.expected_distortion)?;
    }
    writeln!(out, "runtime_seconds = {secs:.3}")?;
    writeln!(out, "trials_per_second = {:.1}", trials as f64 / secs)?;
    writeln!(out, "draws_per_second = {:.3e}", draws / secs)?;
    out.flush()?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Winner(e) => winner(&experiment_config(cli, e)?),
        Command::Estimate(e) => estimate(&experiment_config(cli, e)?),
        Command::Oracle(e) => oracle(&experiment_config(cli, e)?),
        Command::Construct { name, args } => construct_cmd(cli, name, args),
        Command::Verify { id, instances, trials } => verify_cmd(cli, id, *instances, *trials),
        Command::Bench {
            n,
            m,
            trials,
            distribution,
        } => bench(cli, *n, *m, *trials, distribution),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
