//! k-consistency closure, strategy checking, and closure-guided solution
//! construction.
//!
//! The closure is computed over an explicit set `H` of partial solutions with
//! at most `k + 1` bindings. Each member keeps, per unbound variable, a count
//! of surviving one-variable extensions binding that variable. A member with
//! at most `k` bindings whose count drops to zero for some variable is
//! removed together with all its extensions; removals are processed in
//! waves until nothing changes. Because `H` stays closed under restriction,
//! "some extension of `f` in `H` binds `v`" is equivalent to "some one-step
//! extension `f ∪ {v ↦ a}` is in `H`", which is what the counts track.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xorshift::XorShiftRng;
use thiserror::Error;

use crate::csp::{Constraint, CspError, CspInstance, PartialAssignment, VarId};

#[derive(Debug, Error)]
pub enum ConsistencyError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error("internal invariant violated: closure-guided assignment {0} is not a solution")]
    Defect(String),
}

/// One assignment leaving `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Removal {
    pub assignment: PartialAssignment,
    /// The variable that had no supporting extension. For assignments removed
    /// only because they extend a removed one, this is the root's variable.
    pub blocked_on: VarId,
    /// False when the assignment was removed as an extension of another.
    pub direct: bool,
}

#[derive(Clone, Debug)]
pub struct ClosureResult {
    /// Members of `H` at the fixpoint, sorted by size then bindings.
    pub surviving: Vec<PartialAssignment>,
    pub empty: bool,
    pub removal_trace: Vec<Removal>,
    /// Number of removal waves that changed `H`.
    pub iterations: usize,
}

impl ClosureResult {
    pub fn surviving_set(&self) -> HashSet<PartialAssignment> {
        self.surviving.iter().cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ClosureOptions {
    /// Shuffle the processing order inside each removal wave.
    pub shuffle_seed: Option<u64>,
}

struct Node {
    assignment: PartialAssignment,
    alive: bool,
    extensions: Vec<usize>,
    /// Surviving one-step extensions per variable; only kept for `|f| ≤ k`.
    support: Vec<u32>,
}

struct Closure<'a> {
    inst: &'a CspInstance,
    k: usize,
    nodes: Vec<Node>,
    index: HashMap<PartialAssignment, usize>,
}

impl<'a> Closure<'a> {
    fn build(inst: &'a CspInstance, k: usize) -> Result<Self, CspError> {
        let compiled = inst.compiled()?;
        let n = inst.num_vars();
        let max_size = (k + 1).min(n);
        let mut this = Closure { inst, k, nodes: Vec::new(), index: HashMap::new() };
        this.push(PartialAssignment::empty());
        let mut level_start = 0;
        for _size in 0..max_size {
            let level_end = this.nodes.len();
            for id in level_start..level_end {
                let first_free = this.nodes[id].assignment.vars().last().map_or(0, |v| v + 1);
                for var in first_free..n {
                    for value in 0..inst.domain(var).len() {
                        let g = this.nodes[id].assignment.with(var, value);
                        if inst.consistent_at(compiled, &g, var) {
                            this.push(g);
                        }
                    }
                }
            }
            level_start = level_end;
        }
        // link every member to its one-variable restrictions
        for id in 1..this.nodes.len() {
            let vars: Vec<VarId> = this.nodes[id].assignment.vars().collect();
            for var in vars {
                let parent = this.nodes[id].assignment.without(var);
                let pid = this.index[&parent];
                this.nodes[pid].extensions.push(id);
                this.nodes[pid].support[var] += 1;
            }
        }
        Ok(this)
    }

    fn push(&mut self, assignment: PartialAssignment) {
        let support = if assignment.len() <= self.k { vec![0; self.inst.num_vars()] } else { Vec::new() };
        self.index.insert(assignment.clone(), self.nodes.len());
        self.nodes.push(Node { assignment, alive: true, extensions: Vec::new(), support });
    }

    /// First variable outside `Dom(f)` with no supporting extension.
    fn blocking_var(&self, id: usize) -> Option<VarId> {
        let node = &self.nodes[id];
        if node.assignment.len() > self.k {
            return None;
        }
        (0..self.inst.num_vars()).find(|&v| !node.assignment.contains_var(v) && node.support[v] == 0)
    }

    fn run(mut self, options: ClosureOptions) -> ClosureResult {
        let mut rng = options.shuffle_seed.map(XorShiftRng::seed_from_u64);
        let mut wave: Vec<(usize, VarId)> =
            (0..self.nodes.len()).filter_map(|id| self.blocking_var(id).map(|v| (id, v))).collect();
        let mut trace = Vec::new();
        let mut iterations = 0;
        while !wave.is_empty() {
            if let Some(rng) = rng.as_mut() {
                wave.shuffle(rng);
            }
            let mut next = Vec::new();
            let mut changed = false;
            for (id, var) in wave {
                if self.nodes[id].alive {
                    changed = true;
                    self.remove_with_extensions(id, var, &mut trace, &mut next);
                }
            }
            if changed {
                iterations += 1;
            }
            wave = next;
        }
        let mut surviving: Vec<PartialAssignment> =
            self.nodes.into_iter().filter(|n| n.alive).map(|n| n.assignment).collect();
        surviving.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        ClosureResult { empty: surviving.is_empty(), surviving, removal_trace: trace, iterations }
    }

    fn remove_with_extensions(
        &mut self,
        root: usize,
        blocked_on: VarId,
        trace: &mut Vec<Removal>,
        next: &mut Vec<(usize, VarId)>,
    ) {
        let mut stack = vec![root];
        self.nodes[root].alive = false;
        while let Some(id) = stack.pop() {
            trace.push(Removal { assignment: self.nodes[id].assignment.clone(), blocked_on, direct: id == root });
            let vars: Vec<VarId> = self.nodes[id].assignment.vars().collect();
            for var in vars {
                let parent = self.nodes[id].assignment.without(var);
                let pid = self.index[&parent];
                if self.nodes[pid].alive {
                    let count = &mut self.nodes[pid].support[var];
                    *count -= 1;
                    if *count == 0 {
                        next.push((pid, var));
                    }
                }
            }
            for i in 0..self.nodes[id].extensions.len() {
                let ext = self.nodes[id].extensions[i];
                if self.nodes[ext].alive {
                    self.nodes[ext].alive = false;
                    stack.push(ext);
                }
            }
        }
    }
}

/// Computes the k-consistency closure of `inst`.
///
/// When `k + 1` exceeds the number of variables, `H` holds assignments up to
/// full size and the extension requirement is vacuous for total ones.
pub fn k_consistency_closure(inst: &CspInstance, k: usize) -> Result<ClosureResult, ConsistencyError> {
    k_consistency_closure_with(inst, k, ClosureOptions::default())
}

pub fn k_consistency_closure_with(
    inst: &CspInstance,
    k: usize,
    options: ClosureOptions,
) -> Result<ClosureResult, ConsistencyError> {
    if k == 0 {
        return Err(ConsistencyError::ZeroK);
    }
    Ok(Closure::build(inst, k)?.run(options))
}

/// Which requirement on a strategy failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyCondition {
    NonEmpty,
    /// A member is not a partial solution of the instance.
    PartialSolution,
    SizeBound,
    DownwardClosure,
    Extension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyCheckReport {
    pub ok: bool,
    pub violated_condition: Option<StrategyCondition>,
    /// Offending member and, where relevant, the variable involved.
    pub witness: Option<(PartialAssignment, Option<VarId>)>,
}

impl StrategyCheckReport {
    fn ok() -> Self {
        StrategyCheckReport { ok: true, violated_condition: None, witness: None }
    }

    fn fail(cond: StrategyCondition, f: Option<&PartialAssignment>, var: Option<VarId>) -> Self {
        StrategyCheckReport { ok: false, violated_condition: Some(cond), witness: f.map(|f| (f.clone(), var)) }
    }
}

/// Checks whether `family` is a strategy: non-empty, made of partial
/// solutions with at most `k + 1` bindings, closed under restriction, and
/// every member with at most `k` bindings extends to every missing variable.
pub fn is_strategy(
    inst: &CspInstance,
    family: &HashSet<PartialAssignment>,
    k: usize,
) -> Result<StrategyCheckReport, ConsistencyError> {
    inst.ensure_valid()?;
    if family.is_empty() {
        return Ok(StrategyCheckReport::fail(StrategyCondition::NonEmpty, None, None));
    }
    let mut members: Vec<&PartialAssignment> = family.iter().collect();
    members.sort();
    for f in &members {
        if !inst.is_partial_solution(f)? {
            return Ok(StrategyCheckReport::fail(StrategyCondition::PartialSolution, Some(f), None));
        }
        if f.len() > k + 1 {
            return Ok(StrategyCheckReport::fail(StrategyCondition::SizeBound, Some(f), None));
        }
    }
    for f in &members {
        for var in f.vars() {
            if !family.contains(&f.without(var)) {
                return Ok(StrategyCheckReport::fail(StrategyCondition::DownwardClosure, Some(f), Some(var)));
            }
        }
    }
    // with downward closure in place, one-step extensions are enough
    for f in members.iter().filter(|f| f.len() <= k) {
        for var in (0..inst.num_vars()).filter(|&v| !f.contains_var(v)) {
            let extendable = (0..inst.domain(var).len()).any(|a| family.contains(&f.with(var, a)));
            if !extendable {
                return Ok(StrategyCheckReport::fail(StrategyCondition::Extension, Some(f), Some(var)));
            }
        }
    }
    Ok(StrategyCheckReport::ok())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureSolveOutcome {
    Solution(PartialAssignment),
    ClosureEmpty,
    /// Every value of `stuck_on` empties the closure once `fixed` is in place,
    /// or (for constraints wider than `k + 1`) the fully fixed assignment
    /// turned out not to be a solution.
    Inconclusive {
        fixed: PartialAssignment,
        stuck_on: Option<VarId>,
    },
}

/// Builds a solution variable by variable, keeping the first value (in
/// domain order) whose unary restriction leaves the closure non-empty.
pub fn solve_via_closure(inst: &CspInstance, k: usize) -> Result<ClosureSolveOutcome, ConsistencyError> {
    if k_consistency_closure(inst, k)?.empty {
        return Ok(ClosureSolveOutcome::ClosureEmpty);
    }
    let mut current = inst.clone();
    let mut fixed = PartialAssignment::empty();
    for var in 0..inst.num_vars() {
        let mut chosen = None;
        for (idx, &value) in inst.domain(var).iter().enumerate() {
            let candidate = current.with_constraint(Constraint::new(vec![var], vec![vec![value]]));
            if !k_consistency_closure(&candidate, k)?.empty {
                chosen = Some((idx, candidate));
                break;
            }
        }
        match chosen {
            Some((idx, candidate)) => {
                fixed = fixed.with(var, idx);
                current = candidate;
            }
            None => return Ok(ClosureSolveOutcome::Inconclusive { fixed, stuck_on: Some(var) }),
        }
    }
    if inst.is_partial_solution(&fixed)? {
        return Ok(ClosureSolveOutcome::Solution(fixed));
    }
    let widest = inst.constraints().iter().map(|c| c.arity()).max().unwrap_or(0);
    if widest > k + 1 {
        Ok(ClosureSolveOutcome::Inconclusive { fixed, stuck_on: None })
    } else {
        Err(ConsistencyError::Defect(inst.display_assignment(&fixed)))
    }
}
