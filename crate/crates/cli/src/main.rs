//! `hetcc`: build, verify and analyze heterogeneous-cache delivery schedules.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hetcc_core::analysis::{self, DelaySummary};
use hetcc_core::channel::DEFAULT_PRIME;
use hetcc_core::report::{run_scenario, sweep, Scenario, SweepSpec, SWEEP_HEADER};
use hetcc_core::{schedule_with, Demands, Error, Rational, SystemConfig};

#[derive(Parser)]
#[command(name = "hetcc", version, about = "Multi-antenna coded caching with heterogeneous cache sizes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Schedule a scenario and verify it combinatorially and over F_p.
    Verify {
        scenario: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
        /// One-line JSON instead of pretty-printed.
        #[arg(long)]
        compact: bool,
    },
    /// Closed-form delays, bound and gap of one configuration.
    Delay {
        #[command(flatten)]
        params: DelayParams,
        #[arg(long)]
        json: bool,
    },
    /// CSV of delays over a parameter grid.
    Sweep {
        /// Values of K1: `a..b` (inclusive), `a,b,c` or `a`.
        #[arg(long = "K1", value_parser = parse_u32_list)]
        k1: U32List,
        /// Comma-separated rationals.
        #[arg(long, value_parser = parse_rational_list)]
        gamma1: RationalList,
        #[arg(long = "K2", value_parser = parse_u32_list)]
        k2: U32List,
        #[arg(long, value_parser = parse_rational_list, default_value = "0")]
        gamma2: RationalList,
        #[arg(long = "L", value_parser = parse_u32_list)]
        l: U32List,
        /// Refuse grids with more combinations than this.
        #[arg(long, default_value_t = 100_000)]
        max_rows: u64,
        /// Write to a file instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Dump the transmission plan of a scenario as JSON lines.
    Trace {
        scenario: PathBuf,
        /// Stop after this many transmissions.
        #[arg(long)]
        limit: Option<u64>,
    },
}

#[derive(Args)]
struct FieldArgs {
    /// Prime of the verification field.
    #[arg(long, env = "HETCC_PRIME", default_value_t = DEFAULT_PRIME)]
    prime: u64,
}

#[derive(Args)]
struct DelayParams {
    #[arg(long = "K1")]
    k1: u32,
    #[arg(long)]
    gamma1: Rational,
    #[arg(long = "K2")]
    k2: u32,
    #[arg(long, default_value = "0")]
    gamma2: Rational,
    #[arg(long = "L")]
    l: u32,
}

#[derive(Clone)]
struct U32List(Vec<u32>);

#[derive(Clone)]
struct RationalList(Vec<Rational>);

fn parse_u32_list(s: &str) -> Result<U32List, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(U32List(Vec::new()));
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
        let b: u32 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
        return Ok(U32List((a..=b).collect()));
    }
    s.split(',')
        .map(|v| v.trim().parse().map_err(|e| format!("{v}: {e}")))
        .collect::<Result<_, _>>()
        .map(U32List)
}

fn parse_rational_list(s: &str) -> Result<RationalList, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(RationalList(Vec::new()));
    }
    s.split(',')
        .map(|v| v.trim().parse::<Rational>().map_err(|e| format!("{v}: {e}")))
        .collect::<Result<_, _>>()
        .map(RationalList)
}

/// Failure of a subcommand, with its exit code.
enum Failure {
    Config(String),
    Verification,
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Io(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { scenario, field, compact } => verify(&scenario, field.prime, compact),
        Command::Delay { params, json } => delay(&params, json),
        Command::Sweep { k1, gamma1, k2, gamma2, l, max_rows, output } => {
            let spec = SweepSpec { k1: k1.0, gamma1: gamma1.0, k2: k2.0, gamma2: gamma2.0, l: l.0 };
            run_sweep(&spec, max_rows, output.as_deref())
        }
        Command::Trace { scenario, limit } => trace(&scenario, limit),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn verify(path: &Path, prime: u64, compact: bool) -> Result<(), Failure> {
    let scenario = read_scenario(path)?;
    let report = run_scenario(&scenario, prime)?;
    let mut out = io::stdout().lock();
    if compact {
        serde_json::to_writer(&mut out, &report)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &report)?;
    }
    writeln!(out)?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

#[derive(Serialize)]
struct DelayReport {
    config: SystemConfig,
    t_k1: Rational,
    #[serde(flatten)]
    summary: DelaySummary,
}

fn delay(p: &DelayParams, json: bool) -> Result<(), Failure> {
    let cfg = SystemConfig::with_min_library(p.k1, p.gamma1.clone(), p.k2, p.gamma2.clone(), p.l)?;
    let summary = analysis::summarize(&cfg);
    let mut out = io::stdout().lock();
    if json {
        let report = DelayReport { t_k1: cfg.tk1(), config: cfg, summary };
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        return Ok(());
    }
    let mut rows: Vec<(&str, Option<Rational>)> = vec![
        ("achievable", Some(summary.achievable.clone())),
        ("bound", summary.bound.clone()),
        ("gap", summary.gap.clone()),
        ("homogeneous", Some(summary.homogeneous.clone())),
        ("gamma_av", Some(summary.gamma_av.clone())),
        ("dof", Some(summary.dof.clone())),
    ];
    rows.insert(1, ("t_k1", Some(cfg.tk1())));
    writeln!(out, "branch       {}", summary.branch)?;
    for (name, v) in rows {
        match v {
            Some(v) => writeln!(out, "{name:<12} {:<10} {}", v.to_string(), v.to_decimal_string())?,
            None => writeln!(out, "{name:<12} -")?,
        }
    }
    Ok(())
}

fn run_sweep(spec: &SweepSpec, max_rows: u64, output: Option<&Path>) -> Result<(), Failure> {
    let rows = sweep(spec, max_rows)?;
    let sink: Box<dyn Write> = match output {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    w.write_record(SWEEP_HEADER)?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TraceHeader<'a> {
    config: &'a SystemConfig,
    scheme: hetcc_core::SchemeTag,
    regime: &'static str,
    subpacketization: u64,
    transmissions: u64,
}

fn trace(path: &Path, limit: Option<u64>) -> Result<(), Failure> {
    let scenario = read_scenario(path)?;
    let cfg = scenario.config()?;
    let demands = Demands::for_config(&cfg, scenario.demands.clone())?;
    let schedule = schedule_with(scenario.scheme, &cfg, &demands)?;
    let mut out = BufWriter::new(io::stdout().lock());
    let header = TraceHeader {
        config: schedule.config(),
        scheme: schedule.scheme(),
        regime: schedule.design().regime(),
        subpacketization: schedule.subpacketization(),
        transmissions: schedule.transmission_count(),
    };
    serde_json::to_writer(&mut out, &header)?;
    writeln!(out)?;
    let limit = limit.unwrap_or(u64::MAX);
    let mut written = 0u64;
    let mut io_err = None;
    let stop = "trace limit";
    let run = schedule.run(&mut |tx| {
        if written == limit {
            return Err(Error::InvalidConfig(stop.into()));
        }
        written += 1;
        let line = serde_json::to_writer(&mut out, tx).map_err(io::Error::from).and_then(|_| writeln!(out));
        if let Err(e) = line {
            io_err = Some(e);
            return Err(Error::InvalidConfig(stop.into()));
        }
        Ok(())
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    match run {
        Err(Error::InvalidConfig(m)) if m == stop => {}
        r => {
            r?;
        }
    }
    out.flush()?;
    Ok(())
}
