//! A small clause-learning SAT solver with configurable learning scheme,
//! branching rule and restart policy, and the unit-propagation absorption test.

mod absorb;
mod solver;

use serde::Serialize;

pub use absorb::{is_absorbed, AbsorbError, AbsorptionReport, LiteralAbsorption, LiteralVerdict};
pub use solver::{solve, solve_with_observer, ConflictEvent, Learned, SolveOutcome, SolveResult, Solver};

use crate::cnf::{Clause, Lit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LearningScheme {
    /// First unique implication point.
    OneUip,
    /// Resolve back to decision literals only.
    Decision,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branching {
    /// Uniformly random unassigned variable, set to true.
    RandomTrue,
    /// Highest-activity unassigned variable, set to false.
    Activity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RestartPolicy {
    EveryConflict,
    /// Restart after `base`, `base·factor`, `base·factor²`, ... conflicts.
    Geometric {
        base: u64,
        factor: f64,
    },
    Never,
}

impl RestartPolicy {
    pub fn geometric() -> Self {
        RestartPolicy::Geometric { base: 100, factor: 1.5 }
    }
}

/// Learnt clauses are never deleted; there is deliberately no switch for it.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub learning_scheme: LearningScheme,
    pub minimize_conflict_clause: bool,
    pub branching: Branching,
    pub restart_policy: RestartPolicy,
    pub rng_seed: u64,
    /// Give up with [`SolveResult::Unknown`] after this many conflicts.
    pub conflict_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            learning_scheme: LearningScheme::OneUip,
            minimize_conflict_clause: false,
            branching: Branching::RandomTrue,
            restart_policy: RestartPolicy::EveryConflict,
            rng_seed: 0,
            conflict_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn with_scheme(scheme: LearningScheme, seed: u64) -> Self {
        SolverConfig { learning_scheme: scheme, rng_seed: seed, ..SolverConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub restarts: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub learned_clause_count: u64,
    pub learned_literal_total: u64,
}

impl std::fmt::Display for SolverStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "restarts={} conflicts={} decisions={} props={}",
            self.restarts, self.conflicts, self.decisions, self.propagations
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Decision,
    Clause(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailEntry {
    pub lit: Lit,
    pub level: u32,
    pub reason: Reason,
}

/// Snapshot of the assignment trail.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrailState {
    pub entries: Vec<TrailEntry>,
    pub decision_level: u32,
}

impl TrailState {
    pub fn decisions(&self) -> impl Iterator<Item = Lit> + '_ {
        self.entries.iter().filter(|e| e.reason == Reason::Decision).map(|e| e.lit)
    }

    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.entries.iter().map(|e| e.lit)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    Satisfied,
    Clause(Clause),
}

/// Restriction of `clause` by a set of true literals.
pub fn restrict(clause: &Clause, assignments: &[Lit]) -> Restriction {
    if clause.iter().any(|l| assignments.contains(&l)) {
        return Restriction::Satisfied;
    }
    let rest = clause.iter().filter(|&l| !assignments.contains(&!l));
    Restriction::Clause(Clause::new(rest).expect("subset of a clause"))
}
