use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairlot::io::{load_instance, load_lottery, lottery_to_json};
use fairlot::picking::{prefix_wef_condition, violating_prefixes, PickingSequence};
use fairlot::pipelines::{
    bobw_additive, bobw_cancelable, bobw_groupfair, bobw_multidemand, bobw_xos, replay_counterexample, verify_lottery,
    PipelineResult,
};
use fairlot::checkers::wef_xy_notion;
use fairlot::rational::parse_rational;
use fairlot::{Instance, Rational};

/// Best-of-both-worlds lotteries for fair division with entitlements.
#[derive(Parser)]
#[command(name = "fairlot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    Bobw,
    Groupfair,
    Xos,
    Multidemand,
    Cancelable,
}

#[derive(Subcommand)]
enum Command {
    /// Build a lottery and check the guarantees its construction promises.
    Solve {
        pipeline: Pipeline,
        instance: PathBuf,
        /// Print the eating trace.
        #[arg(long)]
        trace: bool,
        /// Print the bihierarchy dump, solver log and support.
        #[arg(long)]
        verbose: bool,
        /// Write the lottery as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a lottery file against a list of notions.
    Verify {
        instance: PathBuf,
        lottery: PathBuf,
        /// Comma-separated, e.g. wef11,wprop1,exante-wef.
        #[arg(long, default_value = "wsd-ef,exante-wef,wef11,wprop1")]
        notions: String,
    },
    /// Check a picking sequence's prefix condition for WEF(x,y).
    VerifySequence {
        instance: PathBuf,
        /// Agents (0-based), space- or comma-separated.
        pi: String,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        x: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        y: Rational,
    },
    /// Replay an impossibility instance by exhaustive search.
    Replay {
        name: String,
        #[arg(long, value_parser = parse_rational)]
        x: Option<Rational>,
        #[arg(long, value_parser = parse_rational)]
        y: Option<Rational>,
    },
}

/// Splits on commas outside parentheses so `wef(1,0)` stays whole.
fn split_notions(text: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0;
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(String::new());
                continue;
            }
            _ => {}
        }
        out.last_mut().expect("nonempty").push(c);
    }
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn read_instance(path: &Path) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_instance(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn print_result(result: &PipelineResult, trace: bool, verbose: bool) {
    if trace {
        if let Some(t) = &result.trace {
            println!("{t}");
        }
    }
    println!("{}", result.fractional);
    if verbose {
        for note in &result.notes {
            println!("# {note}");
        }
        println!("{}", result.lottery);
    } else {
        println!("support size {}", result.lottery.len());
    }
    for r in &result.reports {
        println!("{r}");
    }
    for u in &result.unverified {
        println!("{u} unverified");
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Solve {
            pipeline,
            instance,
            trace,
            verbose,
            out,
        } => {
            let inst = read_instance(&instance)?;
            let result = match pipeline {
                Pipeline::Bobw => bobw_additive(&inst),
                Pipeline::Groupfair => bobw_groupfair(&inst),
                Pipeline::Xos => bobw_xos(&inst),
                Pipeline::Multidemand => bobw_multidemand(&inst),
                Pipeline::Cancelable => bobw_cancelable(&inst),
            }
            .map_err(|e| e.to_string())?;
            print_result(&result, trace, verbose);
            if let Some(path) = out {
                fs::write(&path, lottery_to_json(&result.lottery)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(result.all_hold())
        }
        Command::Verify {
            instance,
            lottery,
            notions,
        } => {
            let inst = read_instance(&instance)?;
            let text = fs::read_to_string(&lottery).map_err(|e| format!("{}: {e}", lottery.display()))?;
            let lot = load_lottery(&text, inst.goods()).map_err(|e| e.to_string())?;
            let reports = verify_lottery(&inst, &lot, &split_notions(&notions)).map_err(|e| e.to_string())?;
            for r in &reports {
                println!("{r}");
            }
            Ok(reports.iter().all(|r| r.holds))
        }
        Command::VerifySequence { instance, pi, x, y } => {
            let inst = read_instance(&instance)?;
            let seq = PickingSequence::parse(&pi, inst.agents()).map_err(|e| e.to_string())?;
            let verdict = prefix_wef_condition(&seq, inst.weights(), &x, &y);
            for v in violating_prefixes(&seq, inst.weights(), &x, &y) {
                println!("{v}");
            }
            println!("prefix condition for {} holds={}", wef_xy_notion(&x, &y), verdict.holds());
            Ok(verdict.holds())
        }
        Command::Replay { name, x, y } => {
            let replay = replay_counterexample(&name, x, y).map_err(|e| e.to_string())?;
            println!("{replay}");
            Ok(replay.certified())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
