use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use cnfgame::constructions::Construction;
use cnfgame::format::{parse_instance, serialize_instance, serialize_transcript};
use cnfgame::harness::{random_instance, run_match_specs, sweep_bound, verify_construction, RandomSpec, SweepSpec};
use cnfgame::solver::{Solver, SolverConfig};
use cnfgame::strategy::StrategySpec;
use cnfgame::{GameInstance, Pattern, PotentialScheme};

#[derive(Parser)]
#[command(name = "cnfgame", version, about = "Unordered CNF games: solver, strategies and sweeps")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a construction as an instance file.
    Generate {
        name: Construction,
        #[arg(long)]
        k: usize,
    },
    /// Decide the winner under optimal play.
    Solve {
        file: PathBuf,
        /// Drop unused variables in pairs before solving.
        #[arg(long)]
        prune_padding: bool,
        /// Fan the root moves out over threads.
        #[arg(long)]
        parallel: bool,
        #[arg(long)]
        no_memo: bool,
    },
    /// Play two strategies against each other.
    Play {
        file: PathBuf,
        #[arg(long)]
        t: StrategySpec,
        #[arg(long)]
        f: StrategySpec,
        /// Record the potential each round under this scheme.
        #[arg(long)]
        audit: Option<PotentialScheme>,
        /// Write the transcript here.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Check a construction's shape and that its F strategy always wins.
    Verify {
        name: Construction,
        #[arg(long)]
        k: usize,
    },
    /// Run T's potential strategy against exhaustive F below the clause threshold.
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        scheme: PotentialScheme,
        #[arg(long)]
        clauses: usize,
        /// Random instances per extra universe size.
        #[arg(long, default_value_t = 100)]
        seeds: u64,
    },
    /// Print a random instance, e.g. `--spec k=3,m=3,n=7,pattern=TT,seed=5`.
    Random {
        #[arg(long)]
        spec: RandomSpec,
    },
}

/// Input and usage problems exit with 2; failed checks exit with 1.
enum Outcome {
    Green,
    Red,
}

fn read_instance(path: &Path) -> Result<GameInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    if json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    let json = cli.json;
    match cli.command {
        Command::Generate { name, k } => {
            let g = name.build(k)?;
            let text = serialize_instance(&g);
            emit(json, &json!({"construction": name.name(), "k": k, "instance": text}), || text.clone())?;
            Ok(Outcome::Green)
        }
        Command::Solve {
            file,
            prune_padding,
            parallel,
            no_memo,
        } => {
            let mut g = read_instance(&file)?;
            if prune_padding {
                g = g.prune_padding();
            }
            let config = SolverConfig {
                parallel,
                memoize: !no_memo,
                ..SolverConfig::from_env()
            };
            let r = Solver::new(&g, config)?.solve_root();
            let value = json!({
                "universe_size": g.universe_size(),
                "pattern": g.pattern(),
                "winner": r.winner,
                "principal_move": r.principal_move,
                "nodes_explored": r.nodes_explored,
            });
            emit(json, &value, || {
                let principal = r.principal_move.map_or("none".to_string(), |m| m.to_string());
                format!(
                    "winner {} principal {} nodes {} universe {} pattern {}\n",
                    r.winner,
                    principal,
                    r.nodes_explored,
                    g.universe_size(),
                    g.pattern()
                )
            })?;
            Ok(Outcome::Green)
        }
        Command::Play {
            file,
            t,
            f,
            audit,
            transcript,
        } => {
            let g = read_instance(&file)?;
            let report = run_match_specs(&g, t, f, audit)?;
            if let Some(out) = transcript {
                fs::write(&out, serialize_transcript(&report.transcript))
                    .with_context(|| format!("writing {}", out.display()))?;
            }
            emit(json, &report, || report.to_text())?;
            Ok(if report.is_clean() { Outcome::Green } else { Outcome::Red })
        }
        Command::Verify { name, k } => {
            let report = verify_construction(name, k)?;
            emit(json, &report, || report.to_text())?;
            Ok(if report.passed { Outcome::Green } else { Outcome::Red })
        }
        Command::Sweep {
            k,
            pattern,
            scheme,
            clauses,
            seeds,
        } => {
            let summary = sweep_bound(&SweepSpec {
                k,
                pattern,
                scheme,
                clauses,
                seeds,
            })?;
            emit(json, &summary, || summary.to_text())?;
            Ok(if summary.passed { Outcome::Green } else { Outcome::Red })
        }
        Command::Random { spec } => {
            let g = random_instance(spec)?;
            let text = serialize_instance(&g);
            emit(json, &json!({"spec": spec, "instance": text}), || text.clone())?;
            Ok(Outcome::Green)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Green) => ExitCode::SUCCESS,
        Ok(Outcome::Red) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
