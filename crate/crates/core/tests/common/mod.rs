#![allow(dead_code)]

use lcsat_core::cdcl::{solve_with_observer, ConflictEvent, LearningScheme, SolveOutcome, SolverConfig};
use lcsat_core::cnf::{Clause, CnfFormula, Lit};
use lcsat_core::csp::{Constraint, CspInstance, Value};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn cnf(clauses: &[&[i64]]) -> CnfFormula {
    CnfFormula::from_clauses(clauses.iter().map(|c| Clause::from_dimacs(c).unwrap()))
}

pub fn clause(lits: &[i64]) -> Clause {
    Clause::from_dimacs(lits).unwrap()
}

/// Random instance with `2..=max_n` variables, domains of size `1..=max_d`
/// and up to four constraints of arity at most three.
pub fn random_csp(r: &mut StdRng, max_n: usize, max_d: usize) -> CspInstance {
    let n = r.random_range(2..=max_n);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let domains: Vec<Vec<Value>> = (0..n).map(|_| (0..r.random_range(1..=max_d) as Value).collect()).collect();
    let m = r.random_range(1..=4);
    let density = r.random_range(0.35..0.95);
    let mut constraints = Vec::new();
    for _ in 0..m {
        let arity = r.random_range(1..=3.min(n));
        let mut vars: Vec<usize> = (0..n).collect();
        vars.shuffle(r);
        let scope: Vec<usize> = vars[..arity].to_vec();
        let mut tuples: Vec<Vec<Value>> = vec![Vec::new()];
        for &v in &scope {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    domains[v].iter().map(move |&x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        let allowed = tuples.into_iter().filter(|_| r.random_bool(density)).collect();
        constraints.push(Constraint::new(scope, allowed));
    }
    CspInstance::new(names, domains, constraints)
}

/// Random k-CNF-ish formula: clause lengths 1..=max_len, no tautologies or duplicates.
pub fn random_cnf(r: &mut StdRng, num_vars: u32, num_clauses: usize, max_len: usize) -> CnfFormula {
    let mut f = CnfFormula::new(num_vars);
    let mut seen = std::collections::HashSet::new();
    while f.len() < num_clauses {
        let len = r.random_range(1..=max_len.min(num_vars as usize));
        let mut vars: Vec<u32> = (1..=num_vars).collect();
        vars.shuffle(r);
        let c = Clause::new(vars[..len].iter().map(|&v| Lit::new(v, r.random_bool(0.5)))).unwrap();
        if seen.insert(c.clone()) {
            f.push(c, lcsat_core::cnf::Origin::Input);
        }
    }
    f
}

/// Backtracking over assignments in variable order, pruning only on a
/// clause whose literals are all assigned false. Returns a model if any.
pub fn oracle_model(f: &CnfFormula) -> Option<Vec<bool>> {
    let n = f.num_vars() as usize;
    // clauses indexed by their largest variable: checkable once it is set
    let mut by_last: Vec<Vec<&Clause>> = vec![Vec::new(); n + 1];
    for c in f.clauses() {
        if c.is_empty() {
            return None;
        }
        by_last[c.max_var() as usize].push(c);
    }
    let mut assign = vec![false; n + 1];
    fn go(v: usize, n: usize, assign: &mut Vec<bool>, by_last: &[Vec<&Clause>]) -> bool {
        if v > n {
            return true;
        }
        for value in [false, true] {
            assign[v] = value;
            let ok = by_last[v].iter().all(|c| c.iter().any(|l| assign[l.var() as usize] == l.is_positive()));
            if ok && go(v + 1, n, assign, by_last) {
                return true;
            }
        }
        false
    }
    go(1, n, &mut assign, &by_last).then_some(assign)
}

/// All models by full truth-table enumeration (small `n` only).
pub fn all_models(f: &CnfFormula) -> Vec<Vec<bool>> {
    let n = f.num_vars() as usize;
    assert!(n <= 20);
    let mut out = Vec::new();
    for bits in 0u32..(1 << n) {
        let m: Vec<bool> = (0..=n).map(|v| v > 0 && bits >> (v - 1) & 1 == 1).collect();
        if f.is_satisfied_by(&m) {
            out.push(m);
        }
    }
    out
}

/// Violations of the per-conflict structural properties seen during one solve.
#[derive(Default, Debug)]
pub struct ConflictAudit {
    pub conflicts: usize,
    pub not_asserting: usize,
    pub decision_violations: usize,
    pub learned: Vec<Vec<Lit>>,
}

pub fn audited_solve(f: &CnfFormula, config: &SolverConfig) -> (SolveOutcome, ConflictAudit) {
    let mut audit = ConflictAudit::default();
    let check_decisions = config.learning_scheme == LearningScheme::Decision;
    let mut observer = |e: &ConflictEvent| {
        audit.conflicts += 1;
        if !e.is_asserting() {
            audit.not_asserting += 1;
        }
        if check_decisions && !e.negates_decisions_only() {
            audit.decision_violations += 1;
        }
        audit.learned.push(e.learned.clone());
    };
    let out = solve_with_observer(f, config, &mut observer);
    (out, audit)
}

/// The three-variable instance with `u ≤ v < w`, `u, v ∈ {0,1}`, `w ∈ {0,1,2}`.
pub fn ordered_triple() -> CspInstance {
    let mut allowed = Vec::new();
    for u in 0..2 {
        for v in 0..2 {
            for w in 0..3 {
                if u <= v && v < w {
                    allowed.push(vec![u, v, w]);
                }
            }
        }
    }
    CspInstance::new(
        vec!["u".into(), "v".into(), "w".into()],
        vec![vec![0, 1], vec![0, 1], vec![0, 1, 2]],
        vec![Constraint::new(vec![0, 1, 2], allowed)],
    )
}

/// The same relation split into `u ≤ v` and `v < w`.
pub fn ordered_triple_binary() -> CspInstance {
    let le = (0..2).flat_map(|u| (0..2).filter(move |&v| u <= v).map(move |v| vec![u, v])).collect();
    let lt = (0..2).flat_map(|v| (0..3).filter(move |&w| v < w).map(move |w| vec![v, w])).collect();
    CspInstance::new(
        vec!["u".into(), "v".into(), "w".into()],
        vec![vec![0, 1], vec![0, 1], vec![0, 1, 2]],
        vec![Constraint::new(vec![0, 1], le), Constraint::new(vec![1, 2], lt)],
    )
}

/// Direct encoding of three Boolean-valued variables (values 1, 2) with
/// no-goods `u1 v1`, `u2 w1` and `u2 v2 w2`. Variables: u1=1 u2=2 v1=3 v2=4 w1=5 w2=6.
pub fn absorption_database() -> CnfFormula {
    cnf(&[&[1, 2], &[3, 4], &[5, 6], &[-1, -2], &[-3, -4], &[-5, -6], &[-1, -3], &[-2, -5], &[-2, -4, -6]])
}

/// CSP variant of [`absorption_database`], values 1 and 2.
pub fn absorption_csp() -> CspInstance {
    let pairs = |forbid: &[Value]| -> Vec<Vec<Value>> {
        (1..=2).flat_map(|a| (1..=2).map(move |b| vec![a, b])).filter(|t| t != forbid).collect()
    };
    let triples: Vec<Vec<Value>> = (1..=2)
        .flat_map(|a| (1..=2).flat_map(move |b| (1..=2).map(move |c| vec![a, b, c])))
        .filter(|t| t != &vec![2, 2, 2])
        .collect();
    CspInstance::new(
        vec!["u".into(), "v".into(), "w".into()],
        vec![vec![1, 2]; 3],
        vec![
            Constraint::new(vec![0, 1], pairs(&[1, 1])),
            Constraint::new(vec![0, 2], pairs(&[2, 1])),
            Constraint::new(vec![0, 1, 2], triples),
        ],
    )
}
