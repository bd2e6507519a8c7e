use rand::{Rng, SeedableRng};
use rand_xorshift::XorShiftRng;

use super::{Branching, LearningScheme, Reason, RestartPolicy, SolverConfig, SolverStats, TrailEntry, TrailState};
use crate::cnf::{BoolVar, Clause, CnfFormula, Lit};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// Total model indexed by variable; slot 0 is unused.
    Sat(Vec<bool>),
    Unsat,
    /// Conflict limit reached.
    Unknown,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SolveResult::Unsat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    pub result: SolveResult,
    pub stats: SolverStats,
}

/// A learned clause; the asserting literal comes first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Learned {
    pub lits: Vec<Lit>,
    pub backjump_level: u32,
}

impl Learned {
    pub fn clause(&self) -> Clause {
        Clause::new(self.lits.iter().copied()).expect("learned clauses are not tautologies")
    }
}

/// Reported to an observer on every analyzed conflict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictEvent {
    pub learned: Vec<Lit>,
    /// Decision level of each learned literal (all are false at the conflict).
    pub levels: Vec<u32>,
    pub conflict_level: u32,
    pub backjump_level: u32,
    /// Decision literals on the trail at the conflict, oldest first.
    pub decisions: Vec<Lit>,
}

impl ConflictEvent {
    /// Exactly one learned literal sits at the conflict level.
    pub fn is_asserting(&self) -> bool {
        self.levels.iter().filter(|&&l| l == self.conflict_level).count() == 1
    }

    /// Every learned literal negates a decision.
    pub fn negates_decisions_only(&self) -> bool {
        self.learned.iter().all(|&l| self.decisions.contains(&!l))
    }
}

/// Lifted boolean value of a variable.
const UNDEF: u8 = 2;

pub struct Solver {
    config: SolverConfig,
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    num_original: usize,
    /// Clauses watching each literal, indexed by literal code.
    watches: Vec<Vec<usize>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    /// Unassigned variables with positions for O(1) removal.
    free: Vec<BoolVar>,
    free_pos: Vec<usize>,
    activity: Vec<f64>,
    var_inc: f64,
    seen: Vec<bool>,
    rng: XorShiftRng,
    stats: SolverStats,
    /// Set when the input holds an empty clause or contradictory units.
    trivially_unsat: bool,
}

impl Solver {
    pub fn new(cnf: &CnfFormula, config: SolverConfig) -> Solver {
        let n = cnf.num_vars() as usize;
        let mut s = Solver {
            rng: XorShiftRng::seed_from_u64(config.rng_seed),
            config,
            num_vars: n,
            clauses: Vec::with_capacity(cnf.len()),
            num_original: 0,
            watches: vec![Vec::new(); 2 * n + 2],
            assigns: vec![UNDEF; n + 1],
            level: vec![0; n + 1],
            reason: vec![None; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            free: (1..=n as BoolVar).collect(),
            free_pos: (0..=n).map(|v| v.wrapping_sub(1)).collect(),
            activity: vec![0.0; n + 1],
            var_inc: 1.0,
            seen: vec![false; n + 1],
            stats: SolverStats::default(),
            trivially_unsat: false,
        };
        for c in cnf.clauses() {
            s.add_clause(c.lits().to_vec());
        }
        s.num_original = s.clauses.len();
        s
    }

    /// Adds a clause at decision level 0. Units are enqueued immediately.
    fn add_clause(&mut self, lits: Vec<Lit>) -> usize {
        let id = self.clauses.len();
        match lits.len() {
            0 => self.trivially_unsat = true,
            1 => match self.value(lits[0]) {
                UNDEF => self.enqueue(lits[0], Some(id)),
                0 => self.trivially_unsat = true,
                _ => {}
            },
            _ => {
                self.watches[lits[0].code()].push(id);
                self.watches[lits[1].code()].push(id);
            }
        }
        self.clauses.push(lits);
        id
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clause(&self, id: usize) -> &[Lit] {
        &self.clauses[id]
    }

    /// Learned clauses in the order they were added.
    pub fn learned_clauses(&self) -> impl Iterator<Item = &[Lit]> + '_ {
        self.clauses[self.num_original..].iter().map(Vec::as_slice)
    }

    /// 1 true, 0 false, 2 unassigned.
    fn value(&self, lit: Lit) -> u8 {
        match self.assigns[lit.var() as usize] {
            UNDEF => UNDEF,
            v => v ^ u8::from(lit.is_negative()),
        }
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        match self.value(lit) {
            UNDEF => None,
            v => Some(v == 1),
        }
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn level_of(&self, var: BoolVar) -> Option<u32> {
        (self.assigns[var as usize] != UNDEF).then(|| self.level[var as usize])
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    pub fn trail_state(&self) -> TrailState {
        let entries = self
            .trail
            .iter()
            .map(|&lit| {
                let v = lit.var() as usize;
                let reason = self.reason[v].map_or(Reason::Decision, Reason::Clause);
                TrailEntry { lit, level: self.level[v], reason }
            })
            .collect();
        TrailState { entries, decision_level: self.decision_level() }
    }

    /// Whether the input was found contradictory while loading.
    pub fn is_trivially_unsat(&self) -> bool {
        self.trivially_unsat
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<usize>) {
        let v = lit.var() as usize;
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = u8::from(lit.is_positive());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
        let pos = self.free_pos[v];
        let last = *self.free.last().expect("assigned variable was free");
        self.free.swap_remove(pos);
        if last as usize != v {
            self.free_pos[last as usize] = pos;
        }
        if reason.is_some() {
            self.stats.propagations += 1;
        }
    }

    /// Opens a new decision level and assigns `lit`.
    pub fn decide(&mut self, lit: Lit) {
        debug_assert_eq!(self.value(lit), UNDEF);
        self.trail_lim.push(self.trail.len());
        self.stats.decisions += 1;
        self.enqueue(lit, None);
    }

    /// Unit propagation to fixpoint; returns the id of a falsified clause on conflict.
    pub fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let cid = ws[i];
                i += 1;
                let clause = &mut self.clauses[cid];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.assigns[first.var() as usize] != UNDEF
                    && self.assigns[first.var() as usize] ^ u8::from(first.is_negative()) == 1
                {
                    ws[j] = cid;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let a = self.assigns[l.var() as usize];
                    if a == UNDEF || a ^ u8::from(l.is_negative()) == 1 {
                        clause.swap(1, k);
                        self.watches[clause[1].code()].push(cid);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = cid;
                j += 1;
                if self.value(first) == 0 {
                    conflict = Some(cid);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cid));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    /// Undoes every assignment above `level`.
    pub fn backtrack(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level as usize];
        for idx in (start..self.trail.len()).rev() {
            let v = self.trail[idx].var() as usize;
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.free_pos[v] = self.free.len();
            self.free.push(v as BoolVar);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level as usize);
        self.qhead = start;
    }

    /// Derives a learned clause from the falsified clause `conflict`.
    ///
    /// Must be called at decision level ≥ 1, straight after [`Solver::propagate`]
    /// reported the conflict.
    pub fn analyze_conflict(&mut self, conflict: usize) -> Learned {
        assert!(self.decision_level() > 0, "conflicts at level 0 cannot be analyzed");
        let mut lits = match self.config.learning_scheme {
            LearningScheme::OneUip => self.analyze_first_uip(conflict),
            LearningScheme::Decision => self.analyze_decisions(conflict),
        };
        if self.config.minimize_conflict_clause {
            self.minimize(&mut lits);
        }
        for l in &lits {
            self.seen[l.var() as usize] = false;
        }
        // second watch goes to the highest remaining level
        let mut backjump_level = 0;
        if lits.len() > 1 {
            let mut best = 1;
            for i in 2..lits.len() {
                if self.level[lits[i].var() as usize] > self.level[lits[best].var() as usize] {
                    best = i;
                }
            }
            lits.swap(1, best);
            backjump_level = self.level[lits[1].var() as usize];
        }
        debug_assert!(self.level[lits[0].var() as usize] == self.decision_level());
        debug_assert!(lits[1..].iter().all(|l| self.level[l.var() as usize] < self.decision_level()));
        Learned { lits, backjump_level }
    }

    fn analyze_first_uip(&mut self, conflict: usize) -> Vec<Lit> {
        let current = self.decision_level();
        let mut out = vec![Lit::pos(1)];
        let mut path = 0usize;
        let mut clause = conflict;
        let mut pivot: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            for k in 0..self.clauses[clause].len() {
                let q = self.clauses[clause][k];
                if pivot.is_some_and(|p| p.var() == q.var()) {
                    continue;
                }
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v);
                    if self.level[v] == current {
                        path += 1;
                    } else {
                        out.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let p = self.trail[index];
            self.seen[p.var() as usize] = false;
            path -= 1;
            if path == 0 {
                out[0] = !p;
                break;
            }
            pivot = Some(p);
            clause = self.reason[p.var() as usize].expect("current-level literal other than the UIP is implied");
        }
        for l in &out[1..] {
            debug_assert!(self.seen[l.var() as usize]);
        }
        self.seen[out[0].var() as usize] = true;
        out
    }

    fn analyze_decisions(&mut self, conflict: usize) -> Vec<Lit> {
        let current = self.decision_level();
        let mut out = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        let mut visited: Vec<usize> = Vec::new();
        let mut push_clause = |s: &mut Solver, cid: usize, skip: Option<BoolVar>, stack: &mut Vec<usize>| {
            for k in 0..s.clauses[cid].len() {
                let q = s.clauses[cid][k];
                let v = q.var() as usize;
                if Some(q.var()) == skip || s.seen[v] || s.level[v] == 0 {
                    continue;
                }
                s.seen[v] = true;
                visited.push(v);
                stack.push(v);
            }
        };
        push_clause(self, conflict, None, &mut stack);
        while let Some(v) = stack.pop() {
            self.bump(v);
            match self.reason[v] {
                None => {
                    // the trail literal is the decision; its negation is learned
                    let lit = Lit::new(v as BoolVar, self.assigns[v] == 0);
                    out.push(lit);
                }
                Some(r) => push_clause(self, r, Some(v as BoolVar), &mut stack),
            }
        }
        for &v in &visited {
            self.seen[v] = false;
        }
        for l in &out {
            self.seen[l.var() as usize] = true;
        }
        let asserting =
            out.iter().position(|l| self.level[l.var() as usize] == current).expect("current decision reached");
        out.swap(0, asserting);
        out
    }

    /// Drops literals implied by the rest of the clause (recursive check).
    fn minimize(&mut self, lits: &mut Vec<Lit>) {
        let mut keep = vec![lits[0]];
        let mut cleared: Vec<usize> = Vec::new();
        let mut memo: std::collections::HashMap<usize, bool> = std::collections::HashMap::new();
        for &l in &lits[1..] {
            if self.reason[l.var() as usize].is_none() || !self.redundant(l.var() as usize, &mut memo) {
                keep.push(l);
            } else {
                cleared.push(l.var() as usize);
            }
        }
        for v in cleared {
            self.seen[v] = false;
        }
        *lits = keep;
    }

    /// `seen` marks the literals of the clause being minimized.
    fn redundant(&self, v: usize, memo: &mut std::collections::HashMap<usize, bool>) -> bool {
        if let Some(&r) = memo.get(&v) {
            return r;
        }
        let result = match self.reason[v] {
            None => false,
            Some(cid) => self.clauses[cid].iter().all(|q| {
                let u = q.var() as usize;
                u == v || self.level[u] == 0 || self.seen[u] || self.redundant(u, memo)
            }),
        };
        memo.insert(v, result);
        result
    }

    fn bump(&mut self, v: usize) {
        if self.config.branching == Branching::Activity {
            self.activity[v] += self.var_inc;
            if self.activity[v] > 1e100 {
                for a in &mut self.activity {
                    *a *= 1e-100;
                }
                self.var_inc *= 1e-100;
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        if self.free.is_empty() {
            return None;
        }
        match self.config.branching {
            Branching::RandomTrue => {
                let i = self.rng.random_range(0..self.free.len());
                Some(Lit::pos(self.free[i]))
            }
            Branching::Activity => {
                let v = *self
                    .free
                    .iter()
                    .max_by(|a, b| self.activity[**a as usize].total_cmp(&self.activity[**b as usize]).then(b.cmp(a)))
                    .expect("non-empty");
                Some(Lit::neg(v))
            }
        }
    }

    fn model(&self) -> Vec<bool> {
        (0..=self.num_vars).map(|v| v > 0 && self.assigns[v] == 1).collect()
    }

    /// Runs the search loop to completion.
    pub fn solve(&mut self) -> SolveOutcome {
        self.solve_observed(&mut |_| {})
    }

    pub fn solve_observed(&mut self, observer: &mut dyn FnMut(&ConflictEvent)) -> SolveOutcome {
        let result = self.search(observer);
        SolveOutcome { result, stats: self.stats }
    }

    fn search(&mut self, observer: &mut dyn FnMut(&ConflictEvent)) -> SolveResult {
        if self.trivially_unsat {
            self.stats.conflicts += 1;
            return SolveResult::Unsat;
        }
        let mut restart_limit = match self.config.restart_policy {
            RestartPolicy::Geometric { base, .. } => base as f64,
            _ => f64::INFINITY,
        };
        let mut since_restart = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    return SolveResult::Unsat;
                }
                let conflict_level = self.decision_level();
                let learned = self.analyze_conflict(conflict);
                let event = ConflictEvent {
                    levels: learned.lits.iter().map(|l| self.level[l.var() as usize]).collect(),
                    learned: learned.lits.clone(),
                    conflict_level,
                    backjump_level: learned.backjump_level,
                    decisions: self.trail_lim.iter().map(|&i| self.trail[i]).collect(),
                };
                debug_assert!(event.is_asserting());
                debug_assert!(
                    self.config.learning_scheme != LearningScheme::Decision || event.negates_decisions_only()
                );
                observer(&event);
                self.var_inc /= 0.95;
                self.stats.learned_clause_count += 1;
                self.stats.learned_literal_total += learned.lits.len() as u64;
                since_restart += 1;

                let restart = match self.config.restart_policy {
                    RestartPolicy::EveryConflict => true,
                    RestartPolicy::Never => false,
                    RestartPolicy::Geometric { factor, .. } => {
                        let hit = since_restart as f64 >= restart_limit;
                        if hit {
                            restart_limit *= factor;
                        }
                        hit
                    }
                };
                let asserting = learned.lits[0];
                let unit = learned.lits.len() == 1;
                if restart {
                    self.stats.restarts += 1;
                    since_restart = 0;
                    self.backtrack(0);
                } else {
                    self.backtrack(learned.backjump_level);
                }
                let id = self.clauses.len();
                if unit {
                    self.clauses.push(learned.lits);
                    self.enqueue(asserting, Some(id));
                } else {
                    self.watches[learned.lits[0].code()].push(id);
                    self.watches[learned.lits[1].code()].push(id);
                    self.clauses.push(learned.lits);
                    if !restart {
                        self.enqueue(asserting, Some(id));
                    }
                }
                if self.config.conflict_limit.is_some_and(|lim| self.stats.conflicts >= lim) {
                    return SolveResult::Unknown;
                }
            } else {
                match self.pick_branch() {
                    None => return SolveResult::Sat(self.model()),
                    Some(lit) => self.decide(lit),
                }
            }
        }
    }
}

pub fn solve(cnf: &CnfFormula, config: &SolverConfig) -> SolveOutcome {
    Solver::new(cnf, config.clone()).solve()
}

pub fn solve_with_observer(
    cnf: &CnfFormula,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&ConflictEvent),
) -> SolveOutcome {
    Solver::new(cnf, config.clone()).solve_observed(observer)
}
