//! Literals, clauses and formulas.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// Boolean variable index, starting at 1.
pub type BoolVar = u32;

/// A literal, packed as `2 * var + negated`.
///
/// The packing makes the derived ordering "by variable, positive first",
/// which is the canonical literal order inside a [`Clause`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: BoolVar, positive: bool) -> Lit {
        assert!(var >= 1, "boolean variables start at 1");
        Lit(var << 1 | u32::from(!positive))
    }

    pub fn pos(var: BoolVar) -> Lit {
        Lit::new(var, true)
    }

    pub fn neg(var: BoolVar) -> Lit {
        Lit::new(var, false)
    }

    pub fn var(self) -> BoolVar {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub fn is_negative(self) -> bool {
        !self.is_positive()
    }

    /// Dense index usable for per-literal tables (`2 * var + negated`).
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_dimacs(n: i64) -> Option<Lit> {
        let var = BoolVar::try_from(n.unsigned_abs()).ok().filter(|v| (1..=BoolVar::MAX >> 1).contains(v))?;
        Some(Lit::new(var, n > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var());
        if self.is_positive() {
            v
        } else {
            -v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("clause contains both {0} and its negation")]
pub struct Tautology(pub Lit);

/// A duplicate-free, non-tautological set of literals in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Result<Clause, Tautology> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(Tautology(w[0]));
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Clause {
        Clause::default()
    }

    pub fn from_dimacs(lits: &[i64]) -> Result<Clause, Tautology> {
        Clause::new(lits.iter().map(|&l| Lit::from_dimacs(l).expect("non-zero literal")))
    }

    /// Clause with all literals negative (a no-good over the given variables).
    pub fn negative(vars: impl IntoIterator<Item = BoolVar>) -> Clause {
        Clause::new(vars.into_iter().map(Lit::neg)).expect("negative clauses are never tautologies")
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.binary_search(&lit).is_ok()
    }

    pub fn is_purely_negative(&self) -> bool {
        self.lits.iter().all(|l| l.is_negative())
    }

    pub fn is_purely_positive(&self) -> bool {
        self.lits.iter().all(|l| l.is_positive())
    }

    pub fn positives(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied().filter(|l| l.is_positive())
    }

    pub fn negatives(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied().filter(|l| l.is_negative())
    }

    pub fn max_var(&self) -> BoolVar {
        self.lits.iter().map(|l| l.var()).max().unwrap_or(0)
    }

    pub fn without(&self, lit: Lit) -> Clause {
        Clause { lits: self.lits.iter().copied().filter(|&l| l != lit).collect() }
    }

    pub fn is_subset_of(&self, other: &Clause) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.lits.iter().copied()
    }
}

impl fmt::Display for Clause {
    /// Space-separated DIMACS literals, without the terminating `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lits.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Why a clause is part of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    /// Read from a file or built by hand.
    Input,
    AtLeastOne,
    AtMostOne,
    NoGood,
    Support,
    Learned,
    Derived,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause {clause} uses variable {var}, but the formula has {num_vars} variables")]
    VarOutOfRange { clause: usize, var: BoolVar, num_vars: BoolVar },
    #[error("clause {clause} duplicates clause {first}")]
    DuplicateClause { clause: usize, first: usize },
}

/// A clause sequence over variables `1..=num_vars`, with an origin tag per clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: BoolVar,
    clauses: Vec<Clause>,
    origins: Vec<Origin>,
}

impl CnfFormula {
    pub fn new(num_vars: BoolVar) -> Self {
        CnfFormula { num_vars, clauses: Vec::new(), origins: Vec::new() }
    }

    /// Formula over exactly the variables the clauses mention.
    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let clauses: Vec<Clause> = clauses.into_iter().collect();
        let num_vars = clauses.iter().map(Clause::max_var).max().unwrap_or(0);
        let origins = vec![Origin::Input; clauses.len()];
        CnfFormula { num_vars, clauses, origins }
    }

    pub fn num_vars(&self) -> BoolVar {
        self.num_vars
    }

    pub fn set_num_vars(&mut self, num_vars: BoolVar) {
        self.num_vars = num_vars;
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Appends a clause; grows `num_vars` if the clause needs it.
    pub fn push(&mut self, clause: Clause, origin: Origin) {
        self.num_vars = self.num_vars.max(clause.max_var());
        self.clauses.push(clause);
        self.origins.push(origin);
    }

    pub fn count(&self, origin: Origin) -> usize {
        self.origins.iter().filter(|&&o| o == origin).count()
    }

    pub fn clauses_with(&self, origin: Origin) -> impl Iterator<Item = &Clause> + '_ {
        self.clauses.iter().zip(&self.origins).filter(move |(_, &o)| o == origin).map(|(c, _)| c)
    }

    /// Checks variable range and clause uniqueness.
    pub fn validate(&self) -> Result<(), CnfError> {
        let mut seen = std::collections::HashMap::with_capacity(self.clauses.len());
        for (i, c) in self.clauses.iter().enumerate() {
            let var = c.max_var();
            if var > self.num_vars {
                return Err(CnfError::VarOutOfRange { clause: i, var, num_vars: self.num_vars });
            }
            if let Some(&first) = seen.get(c) {
                return Err(CnfError::DuplicateClause { clause: i, first });
            }
            seen.insert(c, i);
        }
        Ok(())
    }

    /// Whether a total assignment (indexed by variable, slot 0 unused) satisfies every clause.
    pub fn is_satisfied_by(&self, model: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| model[l.var() as usize] == l.is_positive()))
    }
}
