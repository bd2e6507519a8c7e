use thiserror::Error;

use crate::cnf::{BoolVar, Clause, Lit};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RuleViolation {
    #[error("nucleus {0} has no positive literal")]
    NoPositiveLiteral(Clause),
    #[error("side clause {index} ({clause}) contains a positive literal")]
    PositiveSide { index: usize, clause: Clause },
    #[error("pivot {pivot} is not matched by side clause {index} ({clause})")]
    UnmatchedPivot { index: usize, pivot: BoolVar, clause: Clause },
    #[error("nucleus has {pivots} pivots but {sides} side clauses were given")]
    SideCount { pivots: usize, sides: usize },
}

/// One application of the rule.
///
/// `side_clauses[i]` is resolved against the i-th positive literal of the
/// nucleus, in canonical literal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NhrStep {
    pub nucleus: Clause,
    pub side_clauses: Vec<Clause>,
    pub resolvent: Clause,
}

impl NhrStep {
    pub fn new(nucleus: Clause, side_clauses: Vec<Clause>) -> Result<NhrStep, RuleViolation> {
        let resolvent = negative_hyper_resolve(&nucleus, &side_clauses)?;
        Ok(NhrStep { nucleus, side_clauses, resolvent })
    }

    pub fn pivots(&self) -> Vec<BoolVar> {
        self.nucleus.positives().map(Lit::var).collect()
    }

    /// Re-applies the rule and compares with the stored resolvent.
    pub fn is_valid(&self) -> bool {
        negative_hyper_resolve(&self.nucleus, &self.side_clauses).is_ok_and(|r| r == self.resolvent)
    }
}

/// Resolves `nucleus = C0 ∨ x1 ∨ ... ∨ xr` against side clauses `Ci ∨ ¬xi`,
/// returning `C0 ∨ C1 ∨ ... ∨ Cr`.
pub fn negative_hyper_resolve(nucleus: &Clause, side_clauses: &[Clause]) -> Result<Clause, RuleViolation> {
    let pivots: Vec<Lit> = nucleus.positives().collect();
    if pivots.is_empty() {
        return Err(RuleViolation::NoPositiveLiteral(nucleus.clone()));
    }
    if pivots.len() != side_clauses.len() {
        return Err(RuleViolation::SideCount { pivots: pivots.len(), sides: side_clauses.len() });
    }
    let mut lits: Vec<Lit> = nucleus.negatives().collect();
    for (index, (&x, side)) in pivots.iter().zip(side_clauses).enumerate() {
        if !side.is_purely_negative() {
            return Err(RuleViolation::PositiveSide { index, clause: side.clone() });
        }
        if !side.contains(!x) {
            return Err(RuleViolation::UnmatchedPivot { index, pivot: x.var(), clause: side.clone() });
        }
        lits.extend(side.iter().filter(|&l| l != !x));
    }
    Ok(Clause::new(lits).expect("negative literals never clash"))
}

/// A binary resolution step. Intermediate clauses may hold a literal and its
/// negation (when a side clause mentions a later pivot), so they are kept as
/// sorted literal lists rather than [`Clause`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionStep {
    pub left: Vec<Lit>,
    pub right: Clause,
    pub pivot: BoolVar,
    pub resolvent: Vec<Lit>,
}

/// Replays a hyper step as `r` binary resolutions, pivoting on `x_r` first.
pub fn expand_to_resolution(step: &NhrStep) -> Vec<ResolutionStep> {
    let pivots: Vec<Lit> = step.nucleus.positives().collect();
    let mut current: Vec<Lit> = step.nucleus.lits().to_vec();
    let mut out = Vec::with_capacity(pivots.len());
    for (i, (&x, side)) in pivots.iter().zip(&step.side_clauses).enumerate().rev() {
        let mut next: Vec<Lit> = current.iter().copied().filter(|&l| l != x).collect();
        next.extend(side.iter().filter(|&l| l != !x));
        next.sort_unstable();
        next.dedup();
        debug_assert!(next.len() <= step.resolvent.len() + i);
        out.push(ResolutionStep { left: current, right: side.clone(), pivot: x.var(), resolvent: next.clone() });
        current = next;
    }
    debug_assert_eq!(current, step.resolvent.lits());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(lits: &[i64]) -> Clause {
        Clause::from_dimacs(lits).unwrap()
    }

    #[test]
    fn binary_case_is_plain_resolution() {
        let r = negative_hyper_resolve(&c(&[-1, 2]), &[c(&[-2, -3])]).unwrap();
        assert_eq!(r, c(&[-1, -3]));
    }

    #[test]
    fn shared_remainder_collapses() {
        // every C_i equals C_0 = ¬4 ∨ ¬5
        let sides = vec![c(&[-1, -4, -5]), c(&[-2, -4, -5]), c(&[-3, -4, -5])];
        let step = NhrStep::new(c(&[1, 2, 3, -4, -5]), sides).unwrap();
        assert_eq!(step.resolvent, c(&[-4, -5]));
        let exp = expand_to_resolution(&step);
        assert_eq!(exp.len(), 3);
        // first intermediate keeps x1, x2 and C_0
        assert_eq!(exp[0].resolvent, c(&[1, 2, -4, -5]).lits());
        assert_eq!(exp[2].resolvent, step.resolvent.lits());
    }

    #[test]
    fn violations() {
        assert!(matches!(negative_hyper_resolve(&c(&[-1]), &[]), Err(RuleViolation::NoPositiveLiteral(_))));
        assert!(matches!(
            negative_hyper_resolve(&c(&[1]), &[c(&[-1, 2])]),
            Err(RuleViolation::PositiveSide { index: 0, .. })
        ));
        assert!(matches!(
            negative_hyper_resolve(&c(&[1, 2]), &[c(&[-1]), c(&[-3])]),
            Err(RuleViolation::UnmatchedPivot { index: 1, pivot: 2, .. })
        ));
        assert!(matches!(negative_hyper_resolve(&c(&[1, 2]), &[c(&[-1])]), Err(RuleViolation::SideCount { .. })));
    }

    #[test]
    fn side_mentioning_another_pivot() {
        let step = NhrStep::new(c(&[1, 2]), vec![c(&[-1]), c(&[-1, -2])]).unwrap();
        assert_eq!(step.resolvent, c(&[-1]));
        let exp = expand_to_resolution(&step);
        assert_eq!(exp[0].resolvent, vec![Lit::pos(1), Lit::neg(1)]);
        assert_eq!(exp[1].resolvent, vec![Lit::neg(1)]);
    }
}
