//! `qcsp`: solve, translate and classify qualitative constraint problems.
//!
//! Exit codes: 0 satisfiable / success, 1 unsatisfiable / negative answer,
//! 2 usage or internal error.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qcsp::horn::{models_of, ClauseSet};
use qcsp::interp::{homotopy_witness, lookup, run_homotopy_check, translate_instance};
use qcsp::poly::{tractability_report, ReportInput};
use qcsp::relations::basic::BasicCode;
use qcsp::relations::compose::compose;
use qcsp::relations::relation::QualRelation;
use qcsp::solve::{parse_instance, solve, SolveOptions, SolveStrategy, DEFAULT_MAX_SLOTS};
use qcsp::Calculus;

#[derive(Parser)]
#[command(name = "qcsp", version, about = "Qualitative constraint satisfaction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability of an instance file (`-` reads stdin).
    Solve {
        file: PathBuf,
        /// auto | bruteforce | backtracking | ordhorn | translate:<name>
        #[arg(long, default_value = "auto")]
        method: String,
        /// Translate through this catalog interpretation first.
        #[arg(long)]
        via: Option<String>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_SLOTS)]
        max_slots: usize,
    },
    /// Print the instance translated through a catalog interpretation.
    Translate {
        file: PathBuf,
        #[arg(long)]
        via: String,
    },
    /// Report Horn-class memberships and polymorphism checks of point relations
    /// given as clause sets (clauses separated by `;` or newlines).
    Classify {
        #[arg(long = "relation", required = true)]
        relations: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Sample-check that a calculus's composed interpretation is homotopic to the identity.
    CheckHomotopy {
        /// ia | ra | cdc | dia
        #[arg(long)]
        calculus: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Compose two relations, e.g. `compose --algebra IA "p m" "d"`.
    Compose {
        #[arg(long, default_value = "IA")]
        algebra: String,
        first: String,
        second: String,
    },
}

fn read_input(path: &PathBuf) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_relation(calculus: Calculus, text: &str) -> Result<QualRelation> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut rel = QualRelation::empty(calculus);
    // BA codes are parenthesized and may contain spaces after commas
    let mut depth = 0;
    let mut cur = String::new();
    let mut codes = Vec::new();
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                codes.push(std::mem::take(&mut cur));
            }
        } else if !ch.is_whitespace() {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        codes.push(cur);
    }
    for c in codes {
        rel.insert(&BasicCode::parse(calculus, &c)?)?;
    }
    Ok(rel)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            file,
            method,
            via,
            json,
            seed,
            max_slots,
        } => {
            let inst = parse_instance(&read_input(&file)?)?;
            let strategy = match via {
                Some(name) => SolveStrategy::Translate(name),
                None => method.parse()?,
            };
            let report = solve(&inst, &SolveOptions { strategy, max_slots, seed })?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{}", if report.satisfiable { "satisfiable" } else { "unsatisfiable" });
                if let (Some(values), vars) = (&report.assignment, inst.vars()) {
                    for (name, v) in vars.iter().zip(values) {
                        println!("  {name} = {v}");
                    }
                }
                println!(
                    "strategy {}, nodes {}, firings {}, {} ms",
                    report.strategy, report.stats.nodes, report.stats.firings, report.stats.ms
                );
            }
            Ok(if report.satisfiable { 0 } else { 1 })
        }
        Command::Translate { file, via } => {
            let inst = parse_instance(&read_input(&file)?)?;
            let out = translate_instance(&inst, &lookup(&via)?)?;
            print!("{out}");
            Ok(0)
        }
        Command::Classify { relations, json } => {
            let mut inputs = Vec::new();
            for (i, text) in relations.iter().enumerate() {
                let cs = ClauseSet::parse(&text.replace(';', "\n"))
                    .with_context(|| format!("relation {}", i + 1))?;
                let relation = models_of(&cs, cs.arity())?;
                inputs.push(ReportInput {
                    id: text.clone(),
                    relation,
                    clauses: Some(cs),
                });
            }
            let report = tractability_report(&inputs)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for r in &report.relations {
                    println!("{} (arity {}, {} models)", r.id, r.arity, r.models);
                    println!("  classes: {}", r.classes.join(", "));
                    println!("  maximal: {}", r.maximal_classes.join(", "));
                }
                for t in &report.tags {
                    println!("tag: {t}");
                }
            }
            Ok(0)
        }
        Command::CheckHomotopy {
            calculus,
            samples,
            seed,
            json,
        } => {
            let w = homotopy_witness(&calculus.to_lowercase())?;
            let report = run_homotopy_check(&w, samples, seed)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!(
                    "{}: {} samples checked, {} outside the domain",
                    calculus,
                    report.checked,
                    report.skipped.len()
                );
                match &report.counterexample {
                    None => println!("passed"),
                    Some(c) => println!("counterexample {}: {}", c.sample.join(", "), c.reason),
                }
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Compose {
            algebra,
            first,
            second,
        } => {
            let Some(calculus) = Calculus::parse(&algebra) else {
                bail!("unknown algebra `{algebra}`");
            };
            let r = compose(&parse_relation(calculus, &first)?, &parse_relation(calculus, &second)?)?;
            println!("{r}");
            Ok(if r.is_empty() { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
