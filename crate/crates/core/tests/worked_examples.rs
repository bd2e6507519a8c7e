mod common;

use std::collections::HashSet;

use common::*;
use lcsat_core::cdcl::{is_absorbed, solve, LearningScheme, LiteralVerdict, SolveResult, Solver, SolverConfig};
use lcsat_core::cnf::{Clause, Lit, Origin};
use lcsat_core::encode::{direct_encode, support_encode, VarMap};
use lcsat_core::hyperres::{expand_to_resolution, negative_hyper_resolve, theoretical_bounds, NhrStep};
use num_bigint::BigUint;

fn dimacs_list<'a>(cs: impl Iterator<Item = &'a Clause>) -> Vec<Vec<i64>> {
    cs.map(|c| c.iter().map(Lit::to_dimacs).collect()).collect()
}

#[test]
fn ordered_triple_variable_numbering() {
    let map = VarMap::for_instance(&ordered_triple());
    let names: Vec<String> = map.entries().map(|(b, n, v)| format!("{b}:{n}{v}")).collect();
    assert_eq!(names, ["1:u0", "2:u1", "3:v0", "4:v1", "5:w0", "6:w1", "7:w2"]);
}

#[test]
fn ordered_triple_direct_encoding() {
    let (cnf, _) = direct_encode(&ordered_triple(), true).unwrap();
    assert_eq!(dimacs_list(cnf.clauses_with(Origin::AtLeastOne)), vec![vec![1, 2], vec![3, 4], vec![5, 6, 7]]);
    assert_eq!(
        dimacs_list(cnf.clauses_with(Origin::AtMostOne)),
        vec![vec![-1, -2], vec![-3, -4], vec![-5, -6], vec![-5, -7], vec![-6, -7]]
    );
    assert_eq!(
        dimacs_list(cnf.clauses_with(Origin::NoGood)),
        vec![
            vec![-1, -3, -5],
            vec![-1, -4, -5],
            vec![-1, -4, -6],
            vec![-2, -3, -5],
            vec![-2, -3, -6],
            vec![-2, -3, -7],
            vec![-2, -4, -5],
            vec![-2, -4, -6],
        ]
    );
    assert_eq!(cnf.len(), 16);
}

#[test]
fn ordered_triple_support_encoding() {
    let (cnf, _) = support_encode(&ordered_triple_binary(), true).unwrap();
    assert_eq!(
        dimacs_list(cnf.clauses_with(Origin::Support)),
        vec![
            vec![-1, 3, 4],
            vec![-2, 4],
            vec![1, -3],
            vec![1, 2, -4],
            vec![-3, 6, 7],
            vec![-4, 7],
            vec![-5],
            vec![3, -6],
            vec![3, 4, -7],
        ]
    );
    let (without, _) = support_encode(&ordered_triple_binary(), false).unwrap();
    assert_eq!(without.count(Origin::AtMostOne), 0);
    assert_eq!(without.len(), 12);
}

#[test]
fn support_clause_with_at_most_one_sides_gives_direct_nogood() {
    // ¬v0 ∨ w1 ∨ w2 against ¬w0∨¬w1 and ¬w0∨¬w2
    let step = NhrStep::new(clause(&[-3, 6, 7]), vec![clause(&[-5, -6]), clause(&[-5, -7])]).unwrap();
    assert_eq!(step.resolvent, clause(&[-3, -5]));
    let expanded = expand_to_resolution(&step);
    assert_eq!(expanded.len(), 2);
    assert_eq!(expanded[1].resolvent, clause(&[-3, -5]).lits());
}

#[test]
fn every_binary_nogood_is_one_step_from_support_clauses() {
    let inst = lcsat_core::bench::generate_chain(lcsat_core::bench::ChainSpec { w: 1, d: 4 }).unwrap();
    let (support, map) = support_encode(&inst, true).unwrap();
    let (direct, _) = direct_encode(&inst, true).unwrap();
    let nogoods: HashSet<Clause> = direct.clauses_with(Origin::NoGood).cloned().collect();
    let mut derived = HashSet::new();
    for c in support.clauses_with(Origin::Support) {
        let neg = c.negatives().next().unwrap();
        let positives: Vec<Lit> = c.positives().collect();
        let Some(&any) = positives.first() else {
            continue;
        };
        let (w, _) = map.lookup(any.var()).unwrap();
        for k in 0..map.values(w).len() {
            let xk = map.bool_var(w, k);
            if positives.iter().any(|p| p.var() == xk) {
                continue;
            }
            let sides: Vec<Clause> = positives.iter().map(|p| Clause::negative([xk, p.var()])).collect();
            let r = negative_hyper_resolve(c, &sides).unwrap();
            assert_eq!(r, Clause::new([neg, Lit::neg(xk)]).unwrap());
            derived.insert(r);
        }
    }
    // supports with an empty list are themselves negative units; every other no-good is reached
    let units: HashSet<Lit> =
        support.clauses_with(Origin::Support).filter(|c| c.len() == 1).map(|c| c.lits()[0]).collect();
    for ng in &nogoods {
        assert!(derived.contains(ng) || ng.iter().any(|l| units.contains(&l)), "missing {ng}");
    }
}

#[test]
fn uniform_remainder_hyper_step_and_expansion() {
    let c0 = [-10, -11];
    let r = 4;
    let mut nucleus: Vec<i64> = (1..=r).collect();
    nucleus.extend(c0);
    let sides: Vec<Clause> = (1..=r).map(|x| clause(&[-x, c0[0], c0[1]])).collect();
    let step = NhrStep::new(clause(&nucleus), sides).unwrap();
    assert_eq!(step.resolvent, clause(&c0));
    let exp = expand_to_resolution(&step);
    assert_eq!(exp.len(), r as usize);
    assert_eq!(exp[0].resolvent, clause(&[1, 2, 3, -10, -11]).lits());
    let widest = exp.iter().map(|s| s.resolvent.len()).max().unwrap();
    assert_eq!(widest - step.resolvent.len(), r as usize - 1);
}

#[test]
fn absorption_database_matches_its_csp() {
    let (cnf, _) = direct_encode(&absorption_csp(), true).unwrap();
    let a: HashSet<&Clause> = cnf.clauses().iter().collect();
    let b = absorption_database();
    let b: HashSet<&Clause> = b.clauses().iter().collect();
    assert_eq!(a, b);
}

#[test]
fn propagation_chain_after_setting_v1() {
    let db = absorption_database();
    let mut s = Solver::new(&db, SolverConfig::default());
    assert_eq!(s.propagate(), None);
    s.decide(Lit::pos(3));
    assert_eq!(s.propagate(), None);
    let got: HashSet<i64> = s.trail().iter().map(|l| l.to_dimacs()).collect();
    // v1, ¬v2, ¬u1, u2, ¬w1, w2
    assert_eq!(got, HashSet::from([3, -4, -1, 2, -5, 6]));
}

#[test]
fn derivable_clause_is_absorbed() {
    let db = absorption_database();
    assert_eq!(
        negative_hyper_resolve(&clause(&[1, 2]), &[clause(&[-1, -3]), clause(&[-2, -5])]),
        Ok(clause(&[-3, -5]))
    );
    let report = is_absorbed(&db, &clause(&[-3, -5])).unwrap();
    assert!(report.absorbed);
    assert_eq!(report.verdict(Lit::neg(5)), Some(LiteralVerdict::AbsorbedImplied));
    assert_eq!(report.verdict(Lit::neg(3)), Some(LiteralVerdict::AbsorbedImplied));
}

#[test]
fn overlapping_derivation_is_not_absorbed() {
    let db = absorption_database();
    assert_eq!(
        negative_hyper_resolve(&clause(&[5, 6]), &[clause(&[-2, -5]), clause(&[-2, -4, -6])]),
        Ok(clause(&[-2, -4]))
    );
    let report = is_absorbed(&db, &clause(&[-2, -4])).unwrap();
    assert!(!report.absorbed);
    assert_eq!(report.verdict(Lit::neg(2)), Some(LiteralVerdict::NotAbsorbedUnassigned));
}

#[test]
fn database_clauses_and_supersets_are_absorbed() {
    let db = absorption_database();
    for c in db.clauses() {
        assert!(is_absorbed(&db, c).unwrap().absorbed, "{c}");
    }
    let mut bigger = db.clone();
    bigger.push(clause(&[1, 4, 6]), Origin::Input);
    bigger.push(clause(&[-1, -6]), Origin::Input);
    assert!(is_absorbed(&bigger, &clause(&[-3, -5])).unwrap().absorbed);
    assert!(is_absorbed(&db, &clause(&[-3, -5, -6])).unwrap().absorbed);
    assert!(is_absorbed(&db, &clause(&[-3, -5, 2])).unwrap().absorbed);
}

#[test]
fn bound_formulas() {
    let b = theoretical_bounds(4, 2, 2, 5);
    assert_eq!(b.thm3, BigUint::from(30u32));
    assert_eq!(b.thm2, BigUint::from(480u32));
    for n in 1..8 {
        assert_eq!(theoretical_bounds(n, 3, n, 11).thm3, BigUint::from(11u32));
    }
    // independent recomputation in machine integers
    let choose = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    let sum: u64 = (1..=3).map(|i| 2u64.pow(i as u32) * choose(8, i)).sum();
    assert_eq!(sum, 576);
    assert_eq!(choose(16, 3), 560);
    assert_eq!(theoretical_bounds(8, 2, 3, 1).thm4, BigUint::from(sum * choose(16, 3)));
    assert_eq!(theoretical_bounds(8, 2, 3, 1).thm4, BigUint::from(322_560u32));
}

#[test]
fn trivial_solver_cases() {
    let out = solve(&lcsat_core::cnf::CnfFormula::new(4), &SolverConfig::default());
    assert!(matches!(out.result, SolveResult::Sat(ref m) if m.len() == 5));
    assert_eq!(out.stats.conflicts, 0);
    let out = solve(&cnf(&[&[1], &[-1]]), &SolverConfig::default());
    assert_eq!(out.result, SolveResult::Unsat);
    assert_eq!((out.stats.decisions, out.stats.restarts), (0, 0));
}

#[test]
fn single_decision_conflict_learns_negated_decision() {
    for scheme in [LearningScheme::OneUip, LearningScheme::Decision] {
        let mut s = Solver::new(&cnf(&[&[-1, 2], &[-1, -2]]), SolverConfig::with_scheme(scheme, 0));
        s.decide(Lit::pos(1));
        let c = s.propagate().unwrap();
        let learned = s.analyze_conflict(c);
        assert_eq!(learned.clause(), clause(&[-1]));
        assert_eq!(learned.backjump_level, 0);
    }
}
