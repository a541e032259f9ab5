use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use qc_core::net::{explore, simulate, NodeKind, Scheduler};
use qc_core::proj::{project_system, ProjectionFailure};
use qc_core::sem::{run, Outcome, Strategy};

use crate::source::{load, Program};
use crate::suites::{run_suite, Bounds, Suite};
use crate::trace::{kind_name, write_chor_trace, write_sys_trace, GraphFile, LabelRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTICS: u8 = 1;
pub const EXIT_PROJECTION: u8 = 2;
pub const EXIT_CONFORMANCE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "qc", version, about = "Check, run and project choreographies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Leftmost,
    Random,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchedulerArg {
    Leftmost,
    Seeded,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-check a file and print the type of `main`.
    Check { file: PathBuf },
    /// Evaluate `main` with the choreographic semantics.
    Run {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "leftmost")]
        strategy: StrategyArg,
        #[arg(long, env = "QC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        /// Write one JSON record per step.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the network program of one location, or of all of them.
    Project {
        file: PathBuf,
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        loc: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Run the projected system under a scheduler.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "seeded")]
        scheduler: SchedulerArg,
        #[arg(long, env = "QC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        fuel: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Explore every interleaving of the projected system.
    Explore {
        file: PathBuf,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        /// Write the reachability graph as JSON.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run the conformance suites on generated programs.
    Conformance {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, env = "QC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        /// Write the full results as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn load_or_report(file: &Path, err: &mut dyn Write) -> io::Result<Option<Program>> {
    match load(file) {
        Ok(p) => Ok(Some(p)),
        Err(e) => {
            writeln!(err, "{e}")?;
            Ok(None)
        }
    }
}

fn report_projection(fs: &[ProjectionFailure], err: &mut dyn Write) -> io::Result<u8> {
    writeln!(err, "projection failed:")?;
    for f in fs {
        writeln!(err, "  {f}")?;
    }
    Ok(EXIT_PROJECTION)
}

pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    match cli.command {
        Command::Check { file } => {
            let Some(p) = load_or_report(&file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
            writeln!(out, "{}", p.ty)?;
            Ok(EXIT_OK)
        }
        Command::Run { file, strategy, seed, fuel, trace } => {
            let Some(p) = load_or_report(&file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
            let strategy = match strategy {
                StrategyArg::Leftmost => Strategy::Leftmost,
                StrategyArg::Random => Strategy::Random(seed),
            };
            let rep = run(&p.file.main, &p.file.table, fuel, strategy);
            if let Some(path) = trace {
                let mut w = create(&path)?;
                write_chor_trace(&mut w, &rep.trace)?;
                w.flush()?;
            }
            for (i, (r, c)) in rep.trace.iter().enumerate() {
                writeln!(out, "{i:>4}  {r}\n      {c}")?;
            }
            match rep.outcome {
                Outcome::Value => {
                    writeln!(out, "value: {}", rep.last)?;
                    Ok(EXIT_OK)
                }
                Outcome::OutOfFuel => {
                    writeln!(out, "out of fuel after {} steps: {}", rep.trace.len(), rep.last)?;
                    Ok(EXIT_OK)
                }
                Outcome::Stuck => {
                    writeln!(err, "stuck: {}", rep.last)?;
                    Ok(EXIT_CONFORMANCE)
                }
            }
        }
        Command::Project { file, loc, all } => {
            let Some(p) = load_or_report(&file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
            let locs: Vec<&str> = match &loc {
                Some(l) if !all => {
                    if !p.file.locations.contains(l) {
                        writeln!(err, "`{l}` is not a declared location")?;
                        return Ok(EXIT_DIAGNOSTICS);
                    }
                    vec![l.as_str()]
                }
                _ => p.locations(),
            };
            match project_system(&p.file.main, locs) {
                Ok(sys) => {
                    for (l, e) in &sys.procs {
                        writeln!(out, "{l}: {e}")?;
                    }
                    Ok(EXIT_OK)
                }
                Err(fs) => report_projection(&fs, err),
            }
        }
        Command::Simulate { file, scheduler, seed, fuel, trace } => {
            let Some(p) = load_or_report(&file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
            let sys = match project_system(&p.file.main, p.locations()) {
                Ok(s) => s,
                Err(fs) => return report_projection(&fs, err),
            };
            let scheduler = match scheduler {
                SchedulerArg::Leftmost => Scheduler::Leftmost,
                SchedulerArg::Seeded => Scheduler::Seeded(seed),
            };
            let rep = simulate(&sys, &p.file.table, scheduler, fuel);
            if let Some(path) = trace {
                let mut w = create(&path)?;
                write_sys_trace(&mut w, &sys, &rep.trace)?;
                w.flush()?;
            }
            for (i, (l, _)) in rep.trace.iter().enumerate() {
                writeln!(out, "{i:>4}  {l}")?;
            }
            writeln!(out, "final: {}", rep.last)?;
            match rep.end {
                Some(NodeKind::Deadlocked) => {
                    writeln!(err, "deadlocked after {} steps", rep.trace.len())?;
                    Ok(EXIT_CONFORMANCE)
                }
                Some(k) => {
                    writeln!(out, "end: {}", kind_name(k))?;
                    Ok(EXIT_OK)
                }
                None => {
                    writeln!(out, "end: out of fuel")?;
                    Ok(EXIT_OK)
                }
            }
        }
        Command::Explore { file, depth, graph } => {
            let Some(p) = load_or_report(&file, err)? else { return Ok(EXIT_DIAGNOSTICS) };
            let sys = match project_system(&p.file.main, p.locations()) {
                Ok(s) => s,
                Err(fs) => return report_projection(&fs, err),
            };
            let g = explore(&sys, &p.file.table, depth);
            if let Some(path) = graph {
                let mut w = create(&path)?;
                serde_json::to_writer_pretty(&mut w, &GraphFile::of(&g))?;
                writeln!(w)?;
                w.flush()?;
            }
            writeln!(out, "states: {}", g.nodes.len())?;
            writeln!(out, "transitions: {}", g.edges.len())?;
            for k in [NodeKind::AllValues, NodeKind::Deadlocked, NodeKind::Frontier] {
                writeln!(out, "{}: {}", kind_name(k), g.count(k))?;
            }
            let dead: Vec<usize> = (0..g.nodes.len()).filter(|i| g.kinds[*i] == NodeKind::Deadlocked).collect();
            for i in &dead {
                writeln!(err, "deadlocked: {}", g.nodes[*i])?;
                for (a, l, b) in &g.edges {
                    if b == i && a != b {
                        let l = LabelRecord::of(l);
                        writeln!(err, "  reached from state {a} by {}", serde_json::to_string(&l)?)?;
                    }
                }
            }
            Ok(if dead.is_empty() { EXIT_OK } else { EXIT_CONFORMANCE })
        }
        Command::Conformance { suite, seed, cases, report } => {
            let results = run_suite(suite, seed, cases, &Bounds::default());
            for r in &results {
                writeln!(out, "{}", r.summary())?;
                for f in r.failures.iter().take(5) {
                    writeln!(out, "  [{}] seed {:?}: {}", f.check, f.seed, f.message)?;
                    if !f.program.is_empty() {
                        writeln!(out, "    program: {}", f.program)?;
                    }
                    for w in &f.witness {
                        writeln!(out, "    {w}")?;
                    }
                }
            }
            if let Some(path) = report {
                let mut w = create(&path)?;
                serde_json::to_writer_pretty(&mut w, &results)?;
                writeln!(w)?;
                w.flush()?;
            }
            Ok(if results.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_CONFORMANCE })
        }
    }
}
