//! Sparse CSP-to-SAT encodings.
//!
//! Every encoding here introduces one Boolean variable per (variable, value)
//! pair, numbered row-major over variable order and then domain order,
//! starting at 1. The clause order is fixed so that encodings and the DIMACS
//! files written from them are reproducible.

use std::collections::HashSet;

use thiserror::Error;

use crate::cnf::{BoolVar, Clause, CnfFormula, Lit, Origin};
use crate::csp::{CspError, CspInstance, PartialAssignment, Value, VarId};

#[derive(Debug, Error)]
pub enum EncodeError {
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error("support encoding is defined for binary CSP instances only (constraint {constraint} has arity {arity})")]
    NotBinary { constraint: usize, arity: usize },
    #[error("clause {clause} is not purely negative")]
    NotNegative { clause: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("no value of `{0}` is true in the model")]
    NoValue(String),
    #[error("model has {found} slots, expected {expected}")]
    ModelSize { expected: usize, found: usize },
}

/// Bijection between Boolean variables and (CSP variable, value) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMap {
    names: Vec<String>,
    values: Vec<Vec<Value>>,
    /// First Boolean variable of each CSP variable.
    offsets: Vec<BoolVar>,
    num_bool_vars: BoolVar,
}

impl VarMap {
    pub fn for_instance(inst: &CspInstance) -> VarMap {
        VarMap::from_parts(inst.variables().to_vec(), inst.domains().to_vec())
    }

    pub fn from_parts(names: Vec<String>, values: Vec<Vec<Value>>) -> VarMap {
        let mut offsets = Vec::with_capacity(values.len());
        let mut next: BoolVar = 1;
        for d in &values {
            offsets.push(next);
            next += d.len() as BoolVar;
        }
        VarMap { names, values, offsets, num_bool_vars: next - 1 }
    }

    pub fn num_bool_vars(&self) -> BoolVar {
        self.num_bool_vars
    }

    pub fn num_csp_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self, var: VarId) -> &[Value] {
        &self.values[var]
    }

    /// Boolean variable for `var = domain[value_index]`.
    pub fn bool_var(&self, var: VarId, value_index: usize) -> BoolVar {
        debug_assert!(value_index < self.values[var].len());
        self.offsets[var] + value_index as BoolVar
    }

    /// Literal `x_{var, value}`.
    pub fn lit(&self, var: VarId, value_index: usize) -> Lit {
        Lit::pos(self.bool_var(var, value_index))
    }

    /// Inverse of [`VarMap::bool_var`].
    pub fn lookup(&self, b: BoolVar) -> Option<(VarId, usize)> {
        if b == 0 || b > self.num_bool_vars {
            return None;
        }
        let var = self.offsets.partition_point(|&o| o <= b) - 1;
        Some((var, (b - self.offsets[var]) as usize))
    }

    /// `(bool var, csp variable name, value)` triples in Boolean order.
    pub fn entries(&self) -> impl Iterator<Item = (BoolVar, &str, Value)> + '_ {
        self.names.iter().enumerate().flat_map(move |(v, name)| {
            self.values[v].iter().enumerate().map(move |(i, &val)| (self.offsets[v] + i as BoolVar, name.as_str(), val))
        })
    }

    /// Human-readable name such as `x_u0`.
    pub fn describe(&self, lit: Lit) -> String {
        match self.lookup(lit.var()) {
            Some((v, i)) => {
                let sign = if lit.is_positive() { "" } else { "¬" };
                format!("{sign}x_{}{}", self.names[v], self.values[v][i])
            }
            None => lit.to_string(),
        }
    }

    /// Reads a CSP assignment off a total Boolean model (slot 0 unused).
    ///
    /// When several values of a variable are true (possible without
    /// at-most-one clauses) the first in domain order wins.
    pub fn decode_model(&self, model: &[bool]) -> Result<PartialAssignment, DecodeError> {
        let expected = self.num_bool_vars as usize + 1;
        if model.len() != expected {
            return Err(DecodeError::ModelSize { expected, found: model.len() });
        }
        let mut out = Vec::with_capacity(self.names.len());
        for v in 0..self.names.len() {
            let value = (0..self.values[v].len())
                .find(|&i| model[self.bool_var(v, i) as usize])
                .ok_or_else(|| DecodeError::NoValue(self.names[v].clone()))?;
            out.push(value);
        }
        Ok(PartialAssignment::total(&out))
    }

    /// Boolean model induced by a total CSP assignment.
    pub fn encode_assignment(&self, f: &PartialAssignment) -> Vec<bool> {
        let mut model = vec![false; self.num_bool_vars as usize + 1];
        for (v, i) in f.iter() {
            model[self.bool_var(v, i) as usize] = true;
        }
        model
    }

    fn at_least_one(&self, var: VarId) -> Clause {
        Clause::new((0..self.values[var].len()).map(|i| self.lit(var, i))).expect("positive clause")
    }
}

/// Free-function form of [`VarMap::decode_model`].
pub fn decode_model(map: &VarMap, model: &[bool]) -> Result<PartialAssignment, DecodeError> {
    map.decode_model(model)
}

fn push_sparse_header(cnf: &mut CnfFormula, map: &VarMap, include_at_most_one: bool) {
    for v in 0..map.num_csp_vars() {
        cnf.push(map.at_least_one(v), Origin::AtLeastOne);
    }
    if include_at_most_one {
        for v in 0..map.num_csp_vars() {
            let d = map.values(v).len();
            for i in 0..d {
                for j in i + 1..d {
                    cnf.push(Clause::negative([map.bool_var(v, i), map.bool_var(v, j)]), Origin::AtMostOne);
                }
            }
        }
    }
}

/// Iterates all value-index tuples over the given domain sizes in lexicographic order.
fn for_each_tuple(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut digits = vec![0usize; sizes.len()];
    loop {
        visit(&digits);
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < sizes[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Direct encoding: at-least-one clauses, optional at-most-one clauses, and
/// one no-good per disallowed tuple of every constraint scope.
pub fn direct_encode(inst: &CspInstance, include_at_most_one: bool) -> Result<(CnfFormula, VarMap), EncodeError> {
    inst.ensure_valid()?;
    let map = VarMap::for_instance(inst);
    let mut cnf = CnfFormula::new(map.num_bool_vars());
    push_sparse_header(&mut cnf, &map, include_at_most_one);
    let mut emitted = HashSet::new();
    for (ci, c) in inst.constraints().iter().enumerate() {
        let sizes: Vec<usize> = c.scope.iter().map(|&v| inst.domain(v).len()).collect();
        let mut result = Ok(());
        for_each_tuple(&sizes, |tuple| {
            if result.is_err() {
                return;
            }
            match inst.allows(ci, tuple) {
                Ok(true) => {}
                Ok(false) => {
                    let nogood = Clause::negative(c.scope.iter().zip(tuple).map(|(&v, &i)| map.bool_var(v, i)));
                    if emitted.insert(nogood.clone()) {
                        cnf.push(nogood, Origin::NoGood);
                    }
                }
                Err(e) => result = Err(e),
            }
        });
        result?;
    }
    Ok((cnf, map))
}

/// Support encoding of a binary instance. Each scope is encoded in both
/// directions; for every source value the clause lists the compatible target
/// values, degenerating to a negative unit when there are none.
pub fn support_encode(inst: &CspInstance, include_at_most_one: bool) -> Result<(CnfFormula, VarMap), EncodeError> {
    inst.ensure_valid()?;
    if let Some((ci, c)) = inst.constraints().iter().enumerate().find(|(_, c)| c.arity() != 2) {
        return Err(EncodeError::NotBinary { constraint: ci, arity: c.arity() });
    }
    let map = VarMap::for_instance(inst);
    let mut cnf = CnfFormula::new(map.num_bool_vars());
    push_sparse_header(&mut cnf, &map, include_at_most_one);
    let mut emitted = HashSet::new();
    for (ci, c) in inst.constraints().iter().enumerate() {
        for (src, dst) in [(0usize, 1usize), (1, 0)] {
            let (v, w) = (c.scope[src], c.scope[dst]);
            for i in 0..inst.domain(v).len() {
                let mut lits = vec![!map.lit(v, i)];
                for j in 0..inst.domain(w).len() {
                    let mut pair = [0usize; 2];
                    pair[src] = i;
                    pair[dst] = j;
                    if inst.allows(ci, &pair)? {
                        lits.push(map.lit(w, j));
                    }
                }
                let clause = Clause::new(lits).expect("support clauses mention two distinct variables");
                if emitted.insert(clause.clone()) {
                    cnf.push(clause, Origin::Support);
                }
            }
        }
    }
    Ok((cnf, map))
}

/// Generic negative sparse encoding: the at-least-one clauses plus any
/// caller-supplied purely negative clauses (no-goods, at-most-one clauses,
/// projected no-goods, ...).
pub fn negative_sparse_encode(
    inst: &CspInstance,
    negative_clauses: impl IntoIterator<Item = Clause>,
) -> Result<(CnfFormula, VarMap), EncodeError> {
    inst.ensure_valid()?;
    let map = VarMap::for_instance(inst);
    let mut cnf = CnfFormula::new(map.num_bool_vars());
    push_sparse_header(&mut cnf, &map, false);
    let mut emitted = HashSet::new();
    for (i, c) in negative_clauses.into_iter().enumerate() {
        if !c.is_purely_negative() {
            return Err(EncodeError::NotNegative { clause: i });
        }
        if emitted.insert(c.clone()) {
            cnf.push(c, Origin::NoGood);
        }
    }
    Ok((cnf, map))
}

/// No-goods on a sub-scope of a constraint: every sub-tuple none of whose
/// extensions to the full scope is allowed. `positions` index into the scope.
pub fn projected_nogoods(
    inst: &CspInstance,
    map: &VarMap,
    constraint: usize,
    positions: &[usize],
) -> Result<Vec<Clause>, EncodeError> {
    inst.ensure_valid()?;
    let c = &inst.constraints()[constraint];
    let sub_vars: Vec<VarId> = positions.iter().map(|&p| c.scope[p]).collect();
    let mut supported = HashSet::new();
    for t in &c.allowed {
        let idx: Vec<usize> =
            positions.iter().map(|&p| inst.value_index(c.scope[p], t[p]).expect("validated")).collect();
        supported.insert(idx);
    }
    let sizes: Vec<usize> = sub_vars.iter().map(|&v| inst.domain(v).len()).collect();
    let mut out = Vec::new();
    for_each_tuple(&sizes, |tuple| {
        if !supported.contains(tuple) {
            out.push(Clause::negative(sub_vars.iter().zip(tuple).map(|(&v, &i)| map.bool_var(v, i))));
        }
    });
    Ok(out)
}
