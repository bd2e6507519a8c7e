use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::{generate_chain, BenchError, ChainSpec};
use crate::cdcl::{solve, LearningScheme, SolveResult, SolverConfig};
use crate::cnf::CnfFormula;
use crate::csp::CspInstance;
use crate::encode::{direct_encode, support_encode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Encoding {
    Direct,
    DirectNoAmo,
    Support,
}

impl Encoding {
    pub fn label(self) -> &'static str {
        match self {
            Encoding::Direct => "direct",
            Encoding::DirectNoAmo => "direct-no-amo",
            Encoding::Support => "support",
        }
    }

    pub fn encode(self, inst: &CspInstance) -> Result<CnfFormula, BenchError> {
        let (cnf, _) = match self {
            Encoding::Direct => direct_encode(inst, true),
            Encoding::DirectNoAmo => direct_encode(inst, false),
            Encoding::Support => support_encode(inst, true),
        }?;
        Ok(cnf)
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Encoding::Direct),
            "direct-no-amo" => Ok(Encoding::DirectNoAmo),
            "support" => Ok(Encoding::Support),
            _ => Err(format!("unknown encoding `{s}` (expected direct, direct-no-amo or support)")),
        }
    }
}

/// Short name of a solver configuration's learning setup.
pub fn scheme_label(config: &SolverConfig) -> &'static str {
    match (config.learning_scheme, config.minimize_conflict_clause) {
        (LearningScheme::OneUip, false) => "1uip",
        (LearningScheme::OneUip, true) => "minisat",
        (LearningScheme::Decision, _) => "decision",
    }
}

/// Parses `1uip`, `decision` or `minisat` (1UIP with minimization) into a config.
pub fn config_for_scheme(name: &str) -> Result<SolverConfig, String> {
    let mut config = SolverConfig::default();
    match name {
        "1uip" => {}
        "decision" => config.learning_scheme = LearningScheme::Decision,
        "minisat" => config.minimize_conflict_clause = true,
        _ => return Err(format!("unknown scheme `{name}` (expected 1uip, decision or minisat)")),
    }
    Ok(config)
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    Chain(ChainSpec),
    /// CSP instance in JSON form.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub source: InstanceSource,
    pub encoding: Encoding,
    /// Every run uses this template with its own `rng_seed`.
    pub config: SolverConfig,
    pub seeds: Vec<u64>,
}

impl ExperimentSpec {
    pub fn chain(w: u32, d: u32, encoding: Encoding, config: SolverConfig, seeds: Vec<u64>) -> Self {
        ExperimentSpec { source: InstanceSource::Chain(ChainSpec { w, d }), encoding, config, seeds }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.seeds.is_empty() {
            return Err(BenchError::NoSeeds);
        }
        let distinct: HashSet<u64> = self.seeds.iter().copied().collect();
        if distinct.len() != self.seeds.len() {
            return Err(BenchError::DuplicateSeeds);
        }
        if let InstanceSource::Chain(spec) = &self.source {
            spec.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub w: Option<u32>,
    pub d: Option<u32>,
    pub n: usize,
    pub clause_count: usize,
    pub scheme: &'static str,
    pub seed: u64,
    pub verdict: Verdict,
    pub restarts: u64,
    pub conflicts: u64,
    pub decisions: u64,
    /// Seconds; kept out of the CSV unless asked for.
    pub wall_time: f64,
}

pub const CSV_HEADER: [&str; 10] =
    ["w", "d", "n", "clause_count", "scheme", "seed", "verdict", "restarts", "conflicts", "decisions"];

/// Runs every seed (in parallel) and returns rows in seed-list order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, BenchError> {
    spec.validate()?;
    let (inst, w, d) = match &spec.source {
        InstanceSource::Chain(c) => (generate_chain(*c)?, Some(c.w), Some(c.d)),
        InstanceSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.display().to_string(), e))?;
            (CspInstance::from_json(&text)?, None, None)
        }
    };
    let cnf = spec.encoding.encode(&inst)?;
    let scheme = scheme_label(&spec.config);
    let rows = spec
        .seeds
        .par_iter()
        .map(|&seed| {
            let config = SolverConfig { rng_seed: seed, ..spec.config.clone() };
            let start = Instant::now();
            let out = solve(&cnf, &config);
            let wall_time = start.elapsed().as_secs_f64();
            let verdict = match out.result {
                SolveResult::Sat(_) => Verdict::Sat,
                SolveResult::Unsat => Verdict::Unsat,
                SolveResult::Unknown => Verdict::Unknown,
            };
            ResultRow {
                w,
                d,
                n: inst.num_vars(),
                clause_count: cnf.len(),
                scheme,
                seed,
                verdict,
                restarts: out.stats.restarts,
                conflicts: out.stats.conflicts,
                decisions: out.stats.decisions,
                wall_time,
            }
        })
        .collect();
    Ok(rows)
}

fn opt(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV text for the rows; `with_wall_time` appends a timing column, which
/// makes the output vary between runs.
pub fn rows_to_csv(rows: &[ResultRow], with_wall_time: bool) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if with_wall_time {
        header.push("wall_time");
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            opt(r.w),
            opt(r.d),
            r.n.to_string(),
            r.clause_count.to_string(),
            r.scheme.to_string(),
            r.seed.to_string(),
            r.verdict.to_string(),
            r.restarts.to_string(),
            r.conflicts.to_string(),
            r.decisions.to_string(),
        ];
        if with_wall_time {
            rec.push(format!("{:.6}", r.wall_time));
        }
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub w: Option<u32>,
    pub d: Option<u32>,
    pub n: usize,
    pub scheme: &'static str,
    pub runs: usize,
    pub mean_restarts: f64,
    pub sd_restarts: f64,
    pub mean_conflicts: f64,
    pub mean_decisions: f64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation per (w, d, scheme), sorted by key.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    type Key = (Option<u32>, Option<u32>, &'static str, usize);
    let mut groups: BTreeMap<Key, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.w, r.d, r.scheme, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((w, d, scheme, n), rs)| {
            let col = |f: fn(&ResultRow) -> u64| rs.iter().map(|r| f(r) as f64).collect::<Vec<_>>();
            let (mean_restarts, sd_restarts) = mean_sd(&col(|r| r.restarts));
            let (mean_conflicts, _) = mean_sd(&col(|r| r.conflicts));
            let (mean_decisions, _) = mean_sd(&col(|r| r.decisions));
            AggregateRow { w, d, n, scheme, runs: rs.len(), mean_restarts, sd_restarts, mean_conflicts, mean_decisions }
        })
        .collect()
}

pub fn aggregates_to_csv(aggs: &[AggregateRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "w",
        "d",
        "n",
        "scheme",
        "runs",
        "mean_restarts",
        "sd_restarts",
        "mean_conflicts",
        "mean_decisions",
    ])?;
    for a in aggs {
        w.write_record([
            opt(a.w),
            opt(a.d),
            a.n.to_string(),
            a.scheme.to_string(),
            a.runs.to_string(),
            format!("{:.3}", a.mean_restarts),
            format!("{:.3}", a.sd_restarts),
            format!("{:.3}", a.mean_conflicts),
            format!("{:.3}", a.mean_decisions),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
