use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lcsat_core::bench::{
    aggregate, aggregates_to_csv, config_for_scheme, generate_chain, plotdata, rows_to_csv, run_experiment,
    scaling_report, ChainSpec, Encoding, ExperimentSpec,
};
use lcsat_core::cdcl::{is_absorbed, solve, Branching, RestartPolicy, SolveResult, SolverStats};
use lcsat_core::cnf::{Clause, CnfFormula};
use lcsat_core::consistency::k_consistency_closure;
use lcsat_core::csp::CspInstance;
use lcsat_core::dimacs::{parse_dimacs, write_dimacs};
use lcsat_core::encode::{direct_encode, support_encode};
use lcsat_core::hyperres::{saturate, theoretical_bounds, DerivationTrace, NhrOptions};

type Res<T> = Result<T, Box<dyn Error>>;

#[derive(Parser)]
#[command(
    name = "lcsat",
    version,
    about = "Consistency closure, hyper-resolution and CDCL experiments on CSP encodings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-consistency closure of a CSP instance (JSON)
    Closure {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        k: usize,
        /// Write one line per direct removal
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Encode a CSP instance as DIMACS CNF
    Encode {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        encoding: EncodingArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Width-bounded negative-hyper-resolution refutation search
    Nhr {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Discard resolvents subsumed by known clauses
        #[arg(long)]
        subsumption: bool,
    },
    /// Evaluate the restart and derivation-size bound formulas
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
    /// Run the CDCL solver on a DIMACS file
    Solve {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value = "1uip")]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "every")]
        restart: RestartArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        branching: BranchingArg,
        /// Recursive conflict-clause minimization
        #[arg(long)]
        minimize: bool,
        #[arg(long)]
        stats_json: Option<PathBuf>,
    },
    /// Test whether a clause is absorbed by a clause database
    Absorb {
        #[arg(long)]
        cnf: PathBuf,
        /// DIMACS literals, e.g. "-1 -5"
        #[arg(long, allow_hyphen_values = true)]
        clause: String,
    },
    /// Write a chain instance as CSP JSON
    Generate {
        #[arg(long)]
        w: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve chain instances over many seeds and write CSV
    Bench {
        /// One or more group sizes, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<u32>,
        /// One or more domain sizes, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u32>,
        #[arg(long, value_enum, default_value = "direct")]
        encoding: EncodingArg,
        #[arg(long, default_value = "1uip")]
        scheme: SchemeArg,
        #[arg(long, value_enum, default_value = "every")]
        restart: RestartArg,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        plotdata: Option<PathBuf>,
        /// Also write per-(w, d, scheme) means and standard deviations
        #[arg(long)]
        aggregate_csv: Option<PathBuf>,
        /// Add a wall_time column (output is then no longer reproducible)
        #[arg(long)]
        wall_time: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EncodingArg {
    Direct,
    DirectNoAmo,
    Support,
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Encoding {
        match e {
            EncodingArg::Direct => Encoding::Direct,
            EncodingArg::DirectNoAmo => Encoding::DirectNoAmo,
            EncodingArg::Support => Encoding::Support,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    #[value(name = "1uip")]
    OneUip,
    Decision,
    /// 1UIP with conflict-clause minimization
    Minisat,
}

impl SchemeArg {
    fn name(self) -> &'static str {
        match self {
            SchemeArg::OneUip => "1uip",
            SchemeArg::Decision => "decision",
            SchemeArg::Minisat => "minisat",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RestartArg {
    Every,
    Never,
    Geometric,
}

impl From<RestartArg> for RestartPolicy {
    fn from(r: RestartArg) -> RestartPolicy {
        match r {
            RestartArg::Every => RestartPolicy::EveryConflict,
            RestartArg::Never => RestartPolicy::Never,
            RestartArg::Geometric => RestartPolicy::geometric(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchingArg {
    Random,
    Activity,
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn read_cnf(path: &Path) -> Res<CnfFormula> {
    let (cnf, _) = parse_dimacs(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(cnf)
}

#[derive(Serialize)]
struct StatsJson<'a> {
    result: &'a str,
    #[serde(flatten)]
    stats: SolverStats,
}

fn run(cli: Cli) -> Res<()> {
    match cli.command {
        Command::Closure { instance, k, trace } => {
            let inst = CspInstance::from_json(&read(&instance)?)?;
            let res = k_consistency_closure(&inst, k)?;
            if let Some(path) = trace {
                let mut out = String::new();
                for r in res.removal_trace.iter().filter(|r| r.direct) {
                    out.push_str(&format!(
                        "REMOVE {} BLOCKED-ON {}\n",
                        inst.display_assignment(&r.assignment),
                        inst.name(r.blocked_on)
                    ));
                }
                write(&path, &out)?;
            }
            println!("{}", if res.empty { "EMPTY" } else { "NONEMPTY" });
        }
        Command::Encode { instance, encoding, out } => {
            let inst = CspInstance::from_json(&read(&instance)?)?;
            let (cnf, map) = match encoding {
                EncodingArg::Direct => direct_encode(&inst, true)?,
                EncodingArg::DirectNoAmo => direct_encode(&inst, false)?,
                EncodingArg::Support => support_encode(&inst, true)?,
            };
            write(&out, &write_dimacs(&cnf, Some(&map)))?;
            println!("vars={} clauses={}", cnf.num_vars(), cnf.len());
        }
        Command::Nhr { cnf, width, trace, subsumption } => {
            let f = read_cnf(&cnf)?;
            let options = NhrOptions { subsumption, ..NhrOptions::default() };
            let sat = saturate(&f, width, &options)?;
            match sat.refutation_trace() {
                Some(t) => {
                    if let Some(path) = trace {
                        write(&path, &t.render())?;
                    }
                    println!("REFUTED width={width} steps={}", t.len());
                }
                None => {
                    if let Some(path) = trace {
                        let all = DerivationTrace {
                            num_inputs: sat.num_inputs,
                            steps: sat.steps.clone(),
                            width: sat.derived.iter().map(Clause::len).max().unwrap_or(0),
                            refutation: false,
                        };
                        write(&path, &all.render())?;
                    }
                    println!("SATURATED clauses={}", sat.derived.len());
                }
            }
        }
        Command::Bounds { n, d, k, m } => {
            println!("{}", theoretical_bounds(n, d, k, m));
        }
        Command::Solve { cnf, scheme, restart, seed, branching, minimize, stats_json } => {
            let f = read_cnf(&cnf)?;
            let mut config = config_for_scheme(scheme.name())?;
            config.minimize_conflict_clause |= minimize;
            config.restart_policy = restart.into();
            config.rng_seed = seed;
            config.branching = match branching {
                BranchingArg::Random => Branching::RandomTrue,
                BranchingArg::Activity => Branching::Activity,
            };
            let out = solve(&f, &config);
            let result = match &out.result {
                SolveResult::Sat(_) => "SAT",
                SolveResult::Unsat => "UNSAT",
                SolveResult::Unknown => "UNKNOWN",
            };
            println!("{result}");
            if let SolveResult::Sat(model) = &out.result {
                let lits: Vec<String> =
                    (1..model.len()).map(|v| if model[v] { v.to_string() } else { format!("-{v}") }).collect();
                println!("v {} 0", lits.join(" "));
            }
            println!("{}", out.stats);
            if let Some(path) = stats_json {
                let json = serde_json::to_string_pretty(&StatsJson { result, stats: out.stats })?;
                write(&path, &(json + "\n"))?;
            }
        }
        Command::Absorb { cnf, clause } => {
            let f = read_cnf(&cnf)?;
            let lits = clause
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| format!("bad literal `{t}`")))
                .collect::<Result<Vec<_>, _>>()?;
            if lits.contains(&0) {
                return Err("literal 0 is not allowed".into());
            }
            let c = Clause::from_dimacs(&lits)?;
            println!("{}", is_absorbed(&f, &c)?);
        }
        Command::Generate { w, d, out } => {
            let spec = ChainSpec::new(w, d)?;
            let inst = generate_chain(spec)?;
            write(&out, &inst.to_json())?;
            println!("n={} constraints={} arity={}", spec.num_vars(), spec.num_constraints(), spec.arity());
        }
        Command::Bench { w, d, encoding, scheme, restart, seeds, csv, plotdata: plot, aggregate_csv, wall_time } => {
            let mut config = config_for_scheme(scheme.name())?;
            config.restart_policy = restart.into();
            let mut rows = Vec::new();
            for &wi in &w {
                for &di in &d {
                    let spec = ExperimentSpec::chain(wi, di, encoding.into(), config.clone(), (0..seeds).collect());
                    rows.extend(run_experiment(&spec)?);
                }
            }
            write(&csv, &rows_to_csv(&rows, wall_time)?)?;
            let aggs = aggregate(&rows);
            for a in &aggs {
                println!(
                    "w={} d={} n={} scheme={} runs={} mean_restarts={:.2} sd_restarts={:.2}",
                    a.w.unwrap_or(0),
                    a.d.unwrap_or(0),
                    a.n,
                    a.scheme,
                    a.runs,
                    a.mean_restarts,
                    a.sd_restarts
                );
            }
            if let Some(path) = aggregate_csv {
                write(&path, &aggregates_to_csv(&aggs)?)?;
            }
            let reports = scaling_report(&aggs);
            for r in reports.iter().filter(|r| r.reliable) {
                println!("{r}");
            }
            if let Some(path) = plot {
                write(&path, &plotdata(&reports))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
