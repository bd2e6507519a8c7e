use std::fmt;

use thiserror::Error;

use super::solver::Solver;
use super::SolverConfig;
use crate::cnf::{Clause, CnfFormula, Lit};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AbsorbError {
    #[error("the tested clause is empty")]
    EmptyClause,
    #[error("the database contains the empty clause")]
    EmptyInDatabase,
    #[error("literal {0} uses a variable outside the database")]
    VarOutOfRange(Lit),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiteralVerdict {
    /// Propagation hit a conflict while falsifying the other literals.
    AbsorbedByConflict,
    /// Propagation set the literal true.
    AbsorbedImplied,
    /// Another literal of the clause became true, so the rest cannot be falsified.
    AbsorbedOtherSatisfied,
    /// The database is refuted by propagation alone.
    AbsorbedLevelZeroConflict,
    /// Everything else falsified, literal left unassigned.
    NotAbsorbedUnassigned,
    /// Everything else falsified, literal propagated false.
    NotAbsorbedFalsified,
}

impl LiteralVerdict {
    pub fn is_absorbed(self) -> bool {
        !matches!(self, LiteralVerdict::NotAbsorbedUnassigned | LiteralVerdict::NotAbsorbedFalsified)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralAbsorption {
    pub lit: Lit,
    pub verdict: LiteralVerdict,
}

/// Operational absorption report: one unit-propagation round per literal,
/// deciding the negations of the other literals in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionReport {
    pub per_literal: Vec<LiteralAbsorption>,
    pub absorbed: bool,
}

impl AbsorptionReport {
    pub fn verdict(&self, lit: Lit) -> Option<LiteralVerdict> {
        self.per_literal.iter().find(|p| p.lit == lit).map(|p| p.verdict)
    }
}

impl fmt::Display for AbsorptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.per_literal {
            let text = match p.verdict {
                LiteralVerdict::AbsorbedByConflict => "absorbed (conflict)",
                LiteralVerdict::AbsorbedImplied => "absorbed (implied)",
                LiteralVerdict::AbsorbedOtherSatisfied => "absorbed (other literal satisfied)",
                LiteralVerdict::AbsorbedLevelZeroConflict => "absorbed (database refuted by propagation)",
                LiteralVerdict::NotAbsorbedUnassigned => "not absorbed (unassigned)",
                LiteralVerdict::NotAbsorbedFalsified => "not absorbed (falsified)",
            };
            writeln!(f, "literal {}: {text}", p.lit)?;
        }
        write!(f, "{} (operational)", if self.absorbed { "ABSORBED" } else { "NOT ABSORBED" })
    }
}

pub fn is_absorbed(db: &CnfFormula, c: &Clause) -> Result<AbsorptionReport, AbsorbError> {
    if c.is_empty() {
        return Err(AbsorbError::EmptyClause);
    }
    if db.clauses().iter().any(Clause::is_empty) {
        return Err(AbsorbError::EmptyInDatabase);
    }
    let mut sized = db.clone();
    if let Some(l) = c.iter().find(|l| l.var() > db.num_vars()) {
        return Err(AbsorbError::VarOutOfRange(l));
    }
    sized.set_num_vars(db.num_vars());
    let mut solver = Solver::new(&sized, SolverConfig::default());
    let refuted = solver.is_trivially_unsat() || solver.propagate().is_some();
    let per_literal = c
        .iter()
        .map(|l| {
            let verdict =
                if refuted { LiteralVerdict::AbsorbedLevelZeroConflict } else { literal_round(&mut solver, c, l) };
            LiteralAbsorption { lit: l, verdict }
        })
        .collect::<Vec<_>>();
    let absorbed = per_literal.iter().all(|p| p.verdict.is_absorbed());
    Ok(AbsorptionReport { per_literal, absorbed })
}

fn literal_round(solver: &mut Solver, c: &Clause, l: Lit) -> LiteralVerdict {
    solver.backtrack(0);
    let verdict = (|| {
        if solver.lit_value(l) == Some(true) {
            return LiteralVerdict::AbsorbedImplied;
        }
        for m in c.iter().filter(|&m| m != l) {
            match solver.lit_value(m) {
                Some(true) => return LiteralVerdict::AbsorbedOtherSatisfied,
                Some(false) => continue,
                None => {}
            }
            solver.decide(!m);
            if solver.propagate().is_some() {
                return LiteralVerdict::AbsorbedByConflict;
            }
            if solver.lit_value(l) == Some(true) {
                return LiteralVerdict::AbsorbedImplied;
            }
        }
        // a later decision may have been satisfied by an earlier propagation
        if c.iter().any(|m| m != l && solver.lit_value(m) == Some(true)) {
            return LiteralVerdict::AbsorbedOtherSatisfied;
        }
        match solver.lit_value(l) {
            Some(true) => LiteralVerdict::AbsorbedImplied,
            Some(false) => LiteralVerdict::NotAbsorbedFalsified,
            None => LiteralVerdict::NotAbsorbedUnassigned,
        }
    })();
    solver.backtrack(0);
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(clauses: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_clauses(clauses.iter().map(|c| Clause::from_dimacs(c).unwrap()))
    }

    #[test]
    fn database_clause_absorbed() {
        let f = cnf(&[&[1, 2, 3], &[-1, -2]]);
        for c in f.clauses() {
            assert!(is_absorbed(&f, c).unwrap().absorbed);
        }
    }

    #[test]
    fn unrelated_clause_not_absorbed() {
        let f = cnf(&[&[1, 2], &[3, 4]]);
        let r = is_absorbed(&f, &Clause::from_dimacs(&[-1, -3]).unwrap()).unwrap();
        assert!(!r.absorbed);
        assert_eq!(r.verdict(Lit::neg(1)), Some(LiteralVerdict::NotAbsorbedUnassigned));
    }

    #[test]
    fn refuted_database_absorbs_everything() {
        let f = cnf(&[&[1], &[-1, 2], &[-2]]);
        let r = is_absorbed(&f, &Clause::from_dimacs(&[1]).unwrap()).unwrap();
        assert_eq!(r.per_literal[0].verdict, LiteralVerdict::AbsorbedLevelZeroConflict);
    }

    #[test]
    fn errors() {
        let f = cnf(&[&[1]]);
        assert_eq!(is_absorbed(&f, &Clause::empty()), Err(AbsorbError::EmptyClause));
        assert!(matches!(is_absorbed(&f, &Clause::from_dimacs(&[5]).unwrap()), Err(AbsorbError::VarOutOfRange(_))));
    }
}
