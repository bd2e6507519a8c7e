mod common;

use std::collections::HashSet;

use common::*;
use lcsat_core::cdcl::{LearningScheme, RestartPolicy, SolveResult, Solver, SolverConfig};
use lcsat_core::cnf::{Clause, CnfFormula, Lit, Origin};
use lcsat_core::encode::direct_encode;
use rand::seq::SliceRandom;
use rand::Rng;

fn configs(seed: u64) -> Vec<SolverConfig> {
    let mut out = Vec::new();
    for scheme in [LearningScheme::OneUip, LearningScheme::Decision] {
        for policy in [RestartPolicy::EveryConflict, RestartPolicy::Never] {
            let mut c = SolverConfig::with_scheme(scheme, seed);
            c.restart_policy = policy;
            out.push(c);
        }
    }
    out
}

/// Clause lengths mostly three, some two and four, near the threshold ratio.
fn threshold_cnf(seed: u64) -> CnfFormula {
    let mut r = rng(seed);
    let n: u32 = r.random_range(3..=30);
    let m = (n as f64 * r.random_range(3.0..5.5)) as usize;
    let mut f = CnfFormula::new(n);
    let mut vars: Vec<u32> = (1..=n).collect();
    for _ in 0..m {
        let len = [2, 3, 3, 3, 3, 4][r.random_range(0..6)].min(n as usize);
        vars.shuffle(&mut r);
        let c = Clause::new(vars[..len].iter().map(|&v| Lit::new(v, r.random_bool(0.5)))).unwrap();
        f.push(c, Origin::Input);
    }
    f
}

#[derive(Default)]
struct Tally {
    sat: usize,
    unsat: usize,
    conflicts: usize,
}

fn check_against_oracle(f: &CnfFormula, seed: u64, tally: &mut Tally) {
    let expected = oracle_model(f);
    for config in configs(seed) {
        let (out, audit) = audited_solve(f, &config);
        assert_eq!(audit.not_asserting, 0, "seed {seed} {config:?}");
        assert_eq!(audit.decision_violations, 0, "seed {seed} {config:?}");
        tally.conflicts += audit.conflicts;
        match (&out.result, &expected) {
            (SolveResult::Sat(m), Some(_)) => assert!(f.is_satisfied_by(m), "seed {seed}: model does not satisfy"),
            (SolveResult::Unsat, None) => {}
            (got, want) => panic!("seed {seed} {config:?}: solver {got:?}, oracle sat={}", want.is_some()),
        }
    }
    if expected.is_some() {
        tally.sat += 1;
    } else {
        tally.unsat += 1;
    }
}

#[test]
fn random_cnfs_match_backtracking_oracle() {
    let mut tally = Tally::default();
    for seed in 0..1000 {
        check_against_oracle(&threshold_cnf(seed), seed, &mut tally);
    }
    assert!(tally.sat > 150 && tally.unsat > 150, "sat {} unsat {}", tally.sat, tally.unsat);
    assert!(tally.conflicts > 10_000);
}

#[test]
fn mixed_length_cnfs_match_backtracking_oracle() {
    let mut tally = Tally::default();
    for seed in 0..300 {
        let mut r = rng(50_000 + seed);
        let n = r.random_range(1..=12);
        let m = r.random_range(1..=40);
        let f = random_cnf(&mut r, n, m.min(3usize.pow(n.min(8)) - 1), 5);
        check_against_oracle(&f, seed, &mut tally);
    }
    assert!(tally.sat > 20 && tally.unsat > 20);
}

#[test]
fn csp_direct_encodings_match_backtracking_oracle() {
    let mut tally = Tally::default();
    for seed in 0..200 {
        let inst = random_csp(&mut rng(70_000 + seed), 6, 4);
        for amo in [true, false] {
            let (f, map) = direct_encode(&inst, amo).unwrap();
            check_against_oracle(&f, seed, &mut tally);
            if let SolveResult::Sat(m) = lcsat_core::cdcl::solve(&f, &SolverConfig::default()).result {
                let a = map.decode_model(&m).unwrap();
                assert!(
                    a.len() == inst.num_vars() && inst.is_partial_solution(&a).unwrap(),
                    "seed {seed}: decoded model is not a solution"
                );
            }
        }
    }
    assert!(tally.sat > 40 && tally.unsat > 40, "sat {} unsat {}", tally.sat, tally.unsat);
}

#[test]
fn learned_clauses_are_implied() {
    for seed in 0..200 {
        let mut r = rng(90_000 + seed);
        let n = r.random_range(4..=12);
        let f = random_cnf(&mut r, n, (n as usize) * 4, 3);
        let models = all_models(&f);
        for config in configs(seed) {
            let (_, audit) = audited_solve(&f, &config);
            for learned in &audit.learned {
                for m in &models {
                    assert!(
                        learned.iter().any(|l| m[l.var() as usize] == l.is_positive()),
                        "seed {seed}: learned {learned:?} excludes a model"
                    );
                }
            }
        }
    }
}

#[test]
fn geometric_and_minimizing_configurations_agree() {
    for seed in 0..300 {
        let f = threshold_cnf(120_000 + seed);
        let expected = oracle_model(&f).is_some();
        for (scheme, minimize, policy) in [
            (LearningScheme::OneUip, true, RestartPolicy::EveryConflict),
            (LearningScheme::OneUip, false, RestartPolicy::geometric()),
            (LearningScheme::Decision, true, RestartPolicy::geometric()),
        ] {
            let mut config = SolverConfig::with_scheme(scheme, seed);
            config.minimize_conflict_clause = minimize;
            config.restart_policy = policy;
            let (out, audit) = audited_solve(&f, &config);
            assert_eq!(out.result.is_sat(), expected, "seed {seed}");
            assert_eq!(audit.not_asserting + audit.decision_violations, 0, "seed {seed}");
        }
    }
}

fn permuted(f: &CnfFormula, r: &mut rand::rngs::StdRng) -> CnfFormula {
    let mut clauses: Vec<Clause> = f.clauses().to_vec();
    clauses.shuffle(r);
    let mut g = CnfFormula::new(f.num_vars());
    for c in clauses {
        let mut lits = c.lits().to_vec();
        lits.shuffle(r);
        g.push(Clause::new(lits).unwrap(), Origin::Input);
    }
    g
}

#[test]
fn propagation_fixpoint_is_order_independent() {
    let mut conflicts = 0;
    let mut fixpoints = 0;
    for seed in 0..400 {
        let mut r = rng(150_000 + seed);
        let f = threshold_cnf(150_000 + seed);
        let n = f.num_vars();
        let decisions: Vec<Lit> =
            (0..r.random_range(1..=4)).map(|_| Lit::new(r.random_range(1..=n), r.random_bool(0.5))).collect();
        let run = |g: &CnfFormula| -> Option<HashSet<Lit>> {
            let mut s = Solver::new(g, SolverConfig::default());
            if s.is_trivially_unsat() || s.propagate().is_some() {
                return None;
            }
            for &d in &decisions {
                if s.lit_value(d).is_none() {
                    s.decide(d);
                    if s.propagate().is_some() {
                        return None;
                    }
                }
            }
            Some(s.trail().iter().copied().collect())
        };
        let base = run(&f);
        for _ in 0..4 {
            assert_eq!(run(&permuted(&f, &mut r)), base, "seed {seed}");
        }
        match base {
            Some(_) => fixpoints += 1,
            None => conflicts += 1,
        }
    }
    assert!(conflicts > 20 && fixpoints > 20, "conflicts {conflicts} fixpoints {fixpoints}");
}
