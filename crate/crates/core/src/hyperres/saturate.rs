use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xorshift::XorShiftRng;
use thiserror::Error;

use super::rule::NhrStep;
use crate::cnf::{Clause, CnfFormula, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NhrError {
    #[error("width must be at least 1")]
    ZeroWidth,
    #[error("input clause {clause} ({text}) uses a variable beyond {num_vars}")]
    NotNegativeSparse { clause: usize, text: String, num_vars: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NhrOptions {
    /// Stop as soon as the empty clause is derived.
    pub stop_on_empty: bool,
    /// Drop resolvents subsumed by a known negative clause.
    pub subsumption: bool,
    /// Shuffle nucleus and side-clause enumeration order.
    pub shuffle_seed: Option<u64>,
}

impl Default for NhrOptions {
    fn default() -> Self {
        NhrOptions { stop_on_empty: true, subsumption: false, shuffle_seed: None }
    }
}

/// A step inside a derivation, with the clause ids it used.
///
/// Ids `0..num_inputs` are input clauses in formula order; id
/// `num_inputs + i` is the resolvent of step `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracedStep {
    pub step: NhrStep,
    pub nucleus_id: usize,
    pub side_ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTrace {
    pub num_inputs: usize,
    pub steps: Vec<TracedStep>,
    pub width: usize,
    pub refutation: bool,
}

impl DerivationTrace {
    fn new(num_inputs: usize, steps: Vec<TracedStep>, input_empty: bool) -> Self {
        let width = steps.iter().map(|s| s.step.resolvent.len()).max().unwrap_or(0);
        let refutation = input_empty || steps.last().is_some_and(|s| s.step.resolvent.is_empty());
        DerivationTrace { num_inputs, steps, width, refutation }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every step against `cnf`: ids point backwards, the referenced
    /// clauses match, each step obeys the rule, and the width is recomputed.
    pub fn verify(&self, cnf: &CnfFormula) -> Result<(), String> {
        if self.num_inputs != cnf.len() {
            return Err(format!("trace built for {} inputs, formula has {}", self.num_inputs, cnf.len()));
        }
        let clause_at = |id: usize, before: usize| -> Option<&Clause> {
            if id < self.num_inputs {
                cnf.clauses().get(id)
            } else if id - self.num_inputs < before {
                Some(&self.steps[id - self.num_inputs].step.resolvent)
            } else {
                None
            }
        };
        for (i, t) in self.steps.iter().enumerate() {
            if clause_at(t.nucleus_id, i) != Some(&t.step.nucleus) {
                return Err(format!("step {i}: nucleus id {} does not match", t.nucleus_id));
            }
            if t.side_ids.len() != t.step.side_clauses.len() {
                return Err(format!("step {i}: side id count mismatch"));
            }
            for (&id, side) in t.side_ids.iter().zip(&t.step.side_clauses) {
                if clause_at(id, i) != Some(side) {
                    return Err(format!("step {i}: side id {id} does not match"));
                }
            }
            if !t.step.is_valid() {
                return Err(format!("step {i}: rule violated"));
            }
        }
        let width = self.steps.iter().map(|s| s.step.resolvent.len()).max().unwrap_or(0);
        if width != self.width {
            return Err(format!("recorded width {} differs from {}", self.width, width));
        }
        Ok(())
    }

    /// One line per step; clause ids are printed 1-based.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.steps.iter().enumerate() {
            out.push_str(&t.render(i + 1));
            out.push('\n');
        }
        out
    }
}

impl TracedStep {
    fn render(&self, number: usize) -> String {
        let ids: Vec<String> = self.side_ids.iter().map(|id| (id + 1).to_string()).collect();
        format!(
            "STEP {number}: nucleus={} sides=[{}] resolvent={}",
            self.step.nucleus,
            ids.join(","),
            self.step.resolvent
        )
    }
}

impl fmt::Display for DerivationTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NhrOutcome {
    Refuted(DerivationTrace),
    Saturated { clauses: usize },
}

impl NhrOutcome {
    pub fn is_refuted(&self) -> bool {
        matches!(self, NhrOutcome::Refuted(_))
    }
}

/// Full state after saturation.
#[derive(Clone, Debug)]
pub struct Saturation {
    /// Derived clauses in derivation order (input duplicates excluded).
    pub derived: Vec<Clause>,
    pub steps: Vec<TracedStep>,
    pub num_inputs: usize,
    /// Index into `steps` of the step deriving the empty clause, if any.
    pub empty_at: Option<usize>,
    pub input_has_empty: bool,
}

impl Saturation {
    pub fn derived_set(&self) -> HashSet<Clause> {
        self.derived.iter().cloned().collect()
    }

    pub fn is_refuted(&self) -> bool {
        self.input_has_empty || self.empty_at.is_some()
    }

    /// Minimal backwards slice ending at the empty clause, renumbered.
    pub fn refutation_trace(&self) -> Option<DerivationTrace> {
        if self.input_has_empty {
            return Some(DerivationTrace::new(self.num_inputs, Vec::new(), true));
        }
        let last = self.empty_at?;
        let mut needed = vec![false; self.steps.len()];
        let mut stack = vec![last];
        while let Some(s) = stack.pop() {
            if needed[s] {
                continue;
            }
            needed[s] = true;
            for &id in &self.steps[s].side_ids {
                if id >= self.num_inputs {
                    stack.push(id - self.num_inputs);
                }
            }
        }
        let mut renumber = HashMap::new();
        let mut steps = Vec::new();
        for (old, t) in self.steps.iter().enumerate().filter(|(i, _)| needed[*i]) {
            renumber.insert(old, steps.len());
            let map_id = |id: usize| {
                if id < self.num_inputs {
                    id
                } else {
                    self.num_inputs + renumber[&(id - self.num_inputs)]
                }
            };
            steps.push(TracedStep {
                step: t.step.clone(),
                nucleus_id: t.nucleus_id,
                side_ids: t.side_ids.iter().map(|&id| map_id(id)).collect(),
            });
        }
        Some(DerivationTrace::new(self.num_inputs, steps, false))
    }
}

struct Nucleus {
    id: usize,
    pivots: Vec<Lit>,
    base: Vec<Lit>,
}

struct Search<'a> {
    candidates: &'a [Vec<usize>],
    fresh_after: &'a [bool],
    fresh_from: usize,
    limit: usize,
    /// Visited accumulated sets per position, without and with a fresh side.
    seen: &'a mut [[HashSet<Vec<Lit>>; 2]],
}

struct Saturator<'a> {
    k: usize,
    options: &'a NhrOptions,
    clauses: Vec<Clause>,
    num_inputs: usize,
    /// Negative clauses (inputs and derived) containing ¬x, by x.
    by_pivot: HashMap<u32, Vec<usize>>,
    /// The same clauses keyed by (pivot, remaining literals).
    by_remainder: HashMap<(u32, Vec<Lit>), usize>,
    known: HashMap<Clause, usize>,
    known_negative: Vec<usize>,
    steps: Vec<TracedStep>,
    empty_at: Option<usize>,
    rng: Option<XorShiftRng>,
}

impl Saturator<'_> {
    fn add_negative(&mut self, id: usize) {
        for l in self.clauses[id].iter() {
            self.by_pivot.entry(l.var()).or_default().push(id);
            let rest: Vec<Lit> = self.clauses[id].iter().filter(|&m| m != l).collect();
            self.by_remainder.entry((l.var(), rest)).or_insert(id);
        }
        self.known_negative.push(id);
    }

    fn subsumed(&self, c: &Clause) -> bool {
        self.known_negative.iter().any(|&id| self.clauses[id].is_subset_of(c))
    }

    /// Tries every side combination for `nucleus` in which at least one side
    /// has id `>= fresh_from`; returns newly derived clause ids.
    fn expand(&mut self, nucleus: &Nucleus, fresh_from: usize, limit: usize, out: &mut Vec<(Clause, Vec<usize>)>) {
        let r = nucleus.pivots.len();
        let candidates: Vec<Vec<usize>> = nucleus
            .pivots
            .iter()
            .map(|x| {
                let mut ids: Vec<usize> = self
                    .by_pivot
                    .get(&x.var())
                    .map(|v| v.iter().copied().filter(|&id| id < limit).collect())
                    .unwrap_or_default();
                if let Some(rng) = self.rng.as_mut() {
                    ids.shuffle(rng);
                }
                ids
            })
            .collect();
        // fresh_after[i]: some position >= i has a fresh candidate
        let mut fresh_after = vec![false; r + 1];
        for i in (0..r).rev() {
            fresh_after[i] = fresh_after[i + 1] || candidates[i].iter().any(|&id| id >= fresh_from);
        }
        if !fresh_after[0] {
            return;
        }
        let mut acc = nucleus.base.clone();
        if acc.len() > self.k {
            return;
        }
        let mut chosen = Vec::with_capacity(r);
        let mut seen = vec![[HashSet::new(), HashSet::new()]; r];
        let mut search =
            Search { candidates: &candidates, fresh_after: &fresh_after, fresh_from, limit, seen: &mut seen };
        self.dfs(nucleus, &mut search, false, &mut acc, &mut chosen, out);
    }

    fn dfs(
        &self,
        nucleus: &Nucleus,
        search: &mut Search<'_>,
        used_fresh: bool,
        acc: &mut Vec<Lit>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<(Clause, Vec<usize>)>,
    ) {
        let i = chosen.len();
        if i == nucleus.pivots.len() {
            if used_fresh {
                out.push((Clause::new(acc.iter().copied()).expect("negative"), chosen.clone()));
            }
            return;
        }
        if !used_fresh && !search.fresh_after[i] {
            return;
        }
        // a state reached before (or reached with a fresh side already used)
        // leads only to resolvents produced before
        let mut key = acc.clone();
        key.sort_unstable();
        let seen = &mut search.seen[i];
        if seen[1].contains(&key) || !seen[usize::from(used_fresh)].insert(key.clone()) {
            return;
        }
        let pivot = !nucleus.pivots[i];
        if acc.len() == self.k {
            // only sides whose remainder lies inside `acc` fit: look them up
            for mask in 0u32..1 << key.len() {
                let rest: Vec<Lit> =
                    key.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &l)| l).collect();
                let Some(&id) = self.by_remainder.get(&(pivot.var(), rest)) else { continue };
                if id < search.limit {
                    chosen.push(id);
                    self.dfs(nucleus, search, used_fresh || id >= search.fresh_from, acc, chosen, out);
                    chosen.pop();
                }
            }
            return;
        }
        let candidates = search.candidates;
        let fresh_from = search.fresh_from;
        for &id in &candidates[i] {
            let before = acc.len();
            for l in self.clauses[id].iter() {
                if l != pivot && !acc.contains(&l) {
                    acc.push(l);
                }
            }
            if acc.len() <= self.k {
                chosen.push(id);
                self.dfs(nucleus, search, used_fresh || id >= fresh_from, acc, chosen, out);
                chosen.pop();
            }
            acc.truncate(before);
        }
    }

    fn run(&mut self, nuclei: &[Nucleus]) {
        let mut fresh_from = 0;
        loop {
            let limit = self.clauses.len();
            let mut produced = Vec::new();
            for n in nuclei {
                produced.clear();
                self.expand(n, fresh_from, limit, &mut produced);
                for (resolvent, side_ids) in produced.drain(..) {
                    if self.known.contains_key(&resolvent) || (self.options.subsumption && self.subsumed(&resolvent)) {
                        continue;
                    }
                    let step = NhrStep {
                        nucleus: self.clauses[n.id].clone(),
                        side_clauses: side_ids.iter().map(|&id| self.clauses[id].clone()).collect(),
                        resolvent: resolvent.clone(),
                    };
                    debug_assert!(step.is_valid());
                    let id = self.clauses.len();
                    let empty = resolvent.is_empty();
                    self.known.insert(resolvent.clone(), id);
                    self.clauses.push(resolvent);
                    self.add_negative(id);
                    self.steps.push(TracedStep { step, nucleus_id: n.id, side_ids });
                    if empty && self.empty_at.is_none() {
                        self.empty_at = Some(self.steps.len() - 1);
                        if self.options.stop_on_empty {
                            return;
                        }
                    }
                }
            }
            if self.clauses.len() == limit {
                return;
            }
            fresh_from = limit;
        }
    }
}

/// Width-`k` saturation under negative-hyper-resolution.
pub fn saturate(cnf: &CnfFormula, k: usize, options: &NhrOptions) -> Result<Saturation, NhrError> {
    if k == 0 {
        return Err(NhrError::ZeroWidth);
    }
    // Removing the positive literals of any non-tautological clause leaves a
    // negative remainder, so the shape condition is a range check here.
    for (i, c) in cnf.clauses().iter().enumerate() {
        if c.max_var() > cnf.num_vars() {
            return Err(NhrError::NotNegativeSparse { clause: i, text: c.to_string(), num_vars: cnf.num_vars() });
        }
    }
    let mut sat = Saturator {
        k,
        options,
        clauses: cnf.clauses().to_vec(),
        num_inputs: cnf.len(),
        by_pivot: HashMap::new(),
        by_remainder: HashMap::new(),
        known: HashMap::new(),
        known_negative: Vec::new(),
        steps: Vec::new(),
        empty_at: None,
        rng: options.shuffle_seed.map(XorShiftRng::seed_from_u64),
    };
    let mut nuclei = Vec::new();
    for (id, c) in cnf.clauses().iter().enumerate() {
        sat.known.entry(c.clone()).or_insert(id);
        if c.is_purely_negative() {
            sat.add_negative(id);
        } else {
            nuclei.push(Nucleus { id, pivots: c.positives().collect(), base: c.negatives().collect() });
        }
    }
    let input_has_empty = cnf.clauses().iter().any(Clause::is_empty);
    if !(input_has_empty && options.stop_on_empty) {
        if let Some(rng) = sat.rng.as_mut() {
            nuclei.shuffle(rng);
        }
        sat.run(&nuclei);
    }
    let derived = sat.clauses[sat.num_inputs..].to_vec();
    Ok(Saturation { derived, steps: sat.steps, num_inputs: sat.num_inputs, empty_at: sat.empty_at, input_has_empty })
}

/// Searches for a refutation in which every derived clause has at most `k` literals.
pub fn refute_width_k(cnf: &CnfFormula, k: usize) -> Result<NhrOutcome, NhrError> {
    refute_width_k_with(cnf, k, &NhrOptions::default())
}

pub fn refute_width_k_with(cnf: &CnfFormula, k: usize, options: &NhrOptions) -> Result<NhrOutcome, NhrError> {
    let sat = saturate(cnf, k, options)?;
    Ok(match sat.refutation_trace() {
        Some(trace) => NhrOutcome::Refuted(trace),
        None => NhrOutcome::Saturated { clauses: sat.derived.len() },
    })
}
