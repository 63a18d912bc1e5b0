use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use charp_orbits::commands::certify_saved;
use charp_orbits::orbit::OrbitCache;
use charp_orbits::setops::{parse_setops, run_setops};
use charp_orbits::{run, CliError, Command, Problem, RunOptions};
use clap::{Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(
    name = "charp-orbits",
    version,
    about = "Orbit intersections of affine and torus maps over F_q(t)"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every (n1, n2) in the window with equal orbit values.
    Enumerate(Args),
    /// Enumerate, then fit the solution structure and predict beyond the window.
    Fit(Args),
    /// Fit, then verify every prediction by exact orbit computation.
    Certify(Args),
    /// Membership and intersection requests on p-nested sets and families.
    Setops(Args),
    /// Check the reduction identities exactly over the window.
    VerifyIdentity(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Problem file (JSON); for setops, a file of set requests.
    #[arg(long)]
    problem: PathBuf,
    /// Override the window as N1,N2.
    #[arg(long, value_parser = parse_window)]
    window: Option<(u64, u64)>,
    /// Override the degree cap.
    #[arg(long)]
    cap: Option<usize>,
    /// Worker threads for enumeration and certification.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Directory for the on-disk orbit cache.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Write records here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append timing records (makes output non-reproducible).
    #[arg(long)]
    timings: bool,
    /// certify only: verify the predictions of this saved run instead of fresh ones.
    #[arg(long)]
    run: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(',').ok_or("expected N1,N2")?;
    Ok((
        a.trim().parse().map_err(|e| format!("{e}"))?,
        b.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

fn write_records(records: &[Value], out: &Option<PathBuf>) -> Result<(), CliError> {
    let mut text = String::new();
    for r in records {
        text.push_str(&r.to_string());
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (command, args) = match cli.command {
        Cmd::Enumerate(a) => (Some(Command::Enumerate), a),
        Cmd::Fit(a) => (Some(Command::Fit), a),
        Cmd::Certify(a) => (Some(Command::Certify), a),
        Cmd::VerifyIdentity(a) => (Some(Command::VerifyIdentity), a),
        Cmd::Setops(a) => (None, a),
    };
    let text = std::fs::read_to_string(&args.problem)?;
    let Some(command) = command else {
        let records = run_setops(&parse_setops(&text)?)?;
        return write_records(&records, &args.out);
    };
    let mut problem = Problem::from_json(&text)?;
    if let Some(w) = args.window {
        problem.window = w;
    }
    if let Some(c) = args.cap {
        problem.degree_cap = c;
    }
    let cache = match &args.cache {
        Some(dir) => OrbitCache::at(dir)?,
        None => OrbitCache::disabled(),
    };
    let opts = RunOptions {
        threads: args.threads.max(1),
        cache,
        timings: args.timings,
    };
    let report = match (&args.run, command) {
        (Some(path), Command::Certify) => {
            let saved = std::fs::read_to_string(path)?
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str)
                .collect::<Result<Vec<Value>, _>>()
                .map_err(|e| CliError::Schema(format!("saved run: {e}")))?;
            certify_saved(&problem, &opts, &saved)
        }
        (Some(_), _) => return Err(CliError::Schema("--run applies to certify only".into())),
        (None, _) => run(command, &problem, &opts),
    };
    write_records(&report.records, &args.out)?;
    report.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("charp-orbits: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
