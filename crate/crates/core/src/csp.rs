//! CSP instances over finite domains with extensional constraints.
//!
//! Variables are addressed by their position in the instance ([`VarId`]) and
//! values by their position in the variable's domain. Names and concrete
//! values only matter at the boundaries (JSON, DIMACS comments, display).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of a variable in [`CspInstance::variables`].
pub type VarId = usize;

/// Concrete domain value.
pub type Value = i64;

#[derive(Debug, Error)]
pub enum CspError {
    #[error("invalid instance: {0}")]
    Invalid(ValidationReport),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable index {0} out of range")]
    VariableOutOfRange(VarId),
    #[error("value {value} is not in the domain of `{var}`")]
    ValueNotInDomain { var: String, value: Value },
    #[error("value index {index} out of range for `{var}`")]
    ValueIndexOutOfRange { var: String, index: usize },
    #[error("variable `{0}` bound twice")]
    DuplicateBinding(String),
    #[error("malformed instance JSON: {0}")]
    Json(String),
}

/// A constraint: ordered scope plus the set of allowed value tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<VarId>,
    pub allowed: Vec<Vec<Value>>,
}

impl Constraint {
    pub fn new(scope: Vec<VarId>, allowed: Vec<Vec<Value>>) -> Self {
        Constraint { scope, allowed }
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }
}

/// One broken instance invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyDomain { var: String },
    DuplicateDomainValue { var: String, value: Value },
    DuplicateVariableName { var: String },
    ScopeVariableOutOfRange { constraint: usize, var: VarId },
    RepeatedScopeVariable { constraint: usize, var: String },
    TupleArity { constraint: usize, tuple: usize, expected: usize, found: usize },
    TupleValueOutOfDomain { constraint: usize, tuple: usize, var: String, value: Value },
    DuplicateTuple { constraint: usize, tuple: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDomain { var } => write!(f, "empty domain: {var}"),
            Violation::DuplicateDomainValue { var, value } => {
                write!(f, "duplicate value {value} in domain of {var}")
            }
            Violation::DuplicateVariableName { var } => write!(f, "duplicate variable name: {var}"),
            Violation::ScopeVariableOutOfRange { constraint, var } => {
                write!(f, "constraint {constraint}: scope variable index {var} out of range")
            }
            Violation::RepeatedScopeVariable { constraint, var } => {
                write!(f, "constraint {constraint}: variable {var} repeated in scope")
            }
            Violation::TupleArity { constraint, tuple, expected, found } => {
                write!(f, "constraint {constraint}: tuple {tuple} has arity {found}, expected {expected}")
            }
            Violation::TupleValueOutOfDomain { constraint, tuple, var, value } => {
                write!(f, "constraint {constraint}: tuple {tuple} value {value} not in domain of {var}")
            }
            Violation::DuplicateTuple { constraint, tuple } => {
                write!(f, "constraint {constraint}: tuple {tuple} is a duplicate")
            }
        }
    }
}

/// Result of [`CspInstance::validate`]; empty means the instance is well formed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Index-space view of a valid instance, built once on demand.
#[derive(Debug)]
pub(crate) struct Compiled {
    pub(crate) value_index: Vec<HashMap<Value, usize>>,
    /// Allowed tuples per constraint, as value indices.
    pub(crate) allowed: Vec<HashSet<Vec<usize>>>,
    /// Constraints whose scope mentions each variable.
    pub(crate) constraints_of: Vec<Vec<usize>>,
}

/// A CSP instance `(V, D, C)`.
///
/// Construction never fails; [`CspInstance::validate`] reports broken
/// invariants and every algorithm rejects invalid instances up front.
#[derive(Debug)]
pub struct CspInstance {
    variables: Vec<String>,
    domains: Vec<Vec<Value>>,
    constraints: Vec<Constraint>,
    compiled: OnceLock<Result<Compiled, ValidationReport>>,
}

impl Clone for CspInstance {
    fn clone(&self) -> Self {
        CspInstance::new(self.variables.clone(), self.domains.clone(), self.constraints.clone())
    }
}

impl PartialEq for CspInstance {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables && self.domains == other.domains && self.constraints == other.constraints
    }
}

impl Eq for CspInstance {}

impl CspInstance {
    pub fn new(variables: Vec<String>, domains: Vec<Vec<Value>>, constraints: Vec<Constraint>) -> Self {
        assert_eq!(variables.len(), domains.len(), "one domain per variable");
        CspInstance { variables, domains, constraints, compiled: OnceLock::new() }
    }

    /// Convenience constructor for instances whose variables share one domain.
    pub fn uniform<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        domain: &[Value],
        constraints: Vec<Constraint>,
    ) -> Self {
        let variables: Vec<String> = names.into_iter().map(Into::into).collect();
        let domains = vec![domain.to_vec(); variables.len()];
        CspInstance::new(variables, domains, constraints)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn domain(&self, var: VarId) -> &[Value] {
        &self.domains[var]
    }

    pub fn domains(&self) -> &[Vec<Value>] {
        &self.domains
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn max_domain_size(&self) -> usize {
        self.domains.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.variables[var]
    }

    /// Returns a copy of this instance with one more constraint appended.
    pub fn with_constraint(&self, constraint: Constraint) -> CspInstance {
        let mut constraints = self.constraints.clone();
        constraints.push(constraint);
        CspInstance::new(self.variables.clone(), self.domains.clone(), constraints)
    }

    /// Checks every instance invariant and lists the violations found.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut names = HashSet::new();
        for (i, name) in self.variables.iter().enumerate() {
            if !names.insert(name.as_str()) {
                violations.push(Violation::DuplicateVariableName { var: name.clone() });
            }
            if self.domains[i].is_empty() {
                violations.push(Violation::EmptyDomain { var: name.clone() });
            }
            let mut seen = HashSet::new();
            for &value in &self.domains[i] {
                if !seen.insert(value) {
                    violations.push(Violation::DuplicateDomainValue { var: name.clone(), value });
                }
            }
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            let mut scope_ok = true;
            let mut in_scope = HashSet::new();
            for &v in &c.scope {
                if v >= self.variables.len() {
                    violations.push(Violation::ScopeVariableOutOfRange { constraint: ci, var: v });
                    scope_ok = false;
                } else if !in_scope.insert(v) {
                    violations
                        .push(Violation::RepeatedScopeVariable { constraint: ci, var: self.variables[v].clone() });
                }
            }
            let mut seen = HashSet::new();
            for (ti, tuple) in c.allowed.iter().enumerate() {
                if tuple.len() != c.scope.len() {
                    violations.push(Violation::TupleArity {
                        constraint: ci,
                        tuple: ti,
                        expected: c.scope.len(),
                        found: tuple.len(),
                    });
                    continue;
                }
                if scope_ok {
                    for (&v, &value) in c.scope.iter().zip(tuple) {
                        if !self.domains[v].contains(&value) {
                            violations.push(Violation::TupleValueOutOfDomain {
                                constraint: ci,
                                tuple: ti,
                                var: self.variables[v].clone(),
                                value,
                            });
                        }
                    }
                }
                if !seen.insert(tuple) {
                    violations.push(Violation::DuplicateTuple { constraint: ci, tuple: ti });
                }
            }
        }
        ValidationReport { violations }
    }

    pub(crate) fn compiled(&self) -> Result<&Compiled, CspError> {
        self.compiled
            .get_or_init(|| {
                let report = self.validate();
                if !report.is_ok() {
                    return Err(report);
                }
                let value_index: Vec<HashMap<Value, usize>> =
                    self.domains.iter().map(|d| d.iter().enumerate().map(|(i, &v)| (v, i)).collect()).collect();
                let mut constraints_of = vec![Vec::new(); self.variables.len()];
                let allowed = self
                    .constraints
                    .iter()
                    .enumerate()
                    .map(|(ci, c)| {
                        for &v in &c.scope {
                            constraints_of[v].push(ci);
                        }
                        c.allowed
                            .iter()
                            .map(|t| c.scope.iter().zip(t).map(|(&v, val)| value_index[v][val]).collect())
                            .collect()
                    })
                    .collect();
                Ok(Compiled { value_index, allowed, constraints_of })
            })
            .as_ref()
            .map_err(|r| CspError::Invalid(r.clone()))
    }

    /// Ensures the instance is valid, returning the violations otherwise.
    pub fn ensure_valid(&self) -> Result<(), CspError> {
        self.compiled().map(|_| ())
    }

    /// Position of `value` in the domain of `var`.
    pub fn value_index(&self, var: VarId, value: Value) -> Option<usize> {
        match self.compiled() {
            Ok(c) => c.value_index.get(var)?.get(&value).copied(),
            Err(_) => self.domains.get(var)?.iter().position(|&v| v == value),
        }
    }

    /// Whether the constraint's allowed set contains the given value-index tuple.
    pub fn allows(&self, constraint: usize, tuple: &[usize]) -> Result<bool, CspError> {
        Ok(self.compiled()?.allowed[constraint].contains(tuple))
    }

    /// Builds a partial assignment from `(name, value)` pairs.
    pub fn assignment<S: AsRef<str>>(&self, bindings: &[(S, Value)]) -> Result<PartialAssignment, CspError> {
        let mut out = Vec::with_capacity(bindings.len());
        for (name, value) in bindings {
            let name = name.as_ref();
            let var = self.var_id(name).ok_or_else(|| CspError::UnknownVariable(name.to_string()))?;
            let idx = self.domains[var]
                .iter()
                .position(|v| v == value)
                .ok_or_else(|| CspError::ValueNotInDomain { var: name.to_string(), value: *value })?;
            out.push((var, idx));
        }
        PartialAssignment::new(out).map_err(|v| CspError::DuplicateBinding(self.variables[v].clone()))
    }

    /// Concrete value bound to `var` by `f`, if any.
    pub fn value_of(&self, f: &PartialAssignment, var: VarId) -> Option<Value> {
        f.get(var).map(|i| self.domains[var][i])
    }

    /// Renders an assignment as `{u=0, v=1}`.
    pub fn display_assignment(&self, f: &PartialAssignment) -> String {
        let parts: Vec<String> =
            f.iter().map(|(v, i)| format!("{}={}", self.variables[v], self.domains[v][i])).collect();
        format!("{{{}}}", parts.join(", "))
    }

    fn check_assignment(&self, f: &PartialAssignment) -> Result<(), CspError> {
        for (v, i) in f.iter() {
            if v >= self.num_vars() {
                return Err(CspError::VariableOutOfRange(v));
            }
            if i >= self.domains[v].len() {
                return Err(CspError::ValueIndexOutOfRange { var: self.variables[v].clone(), index: i });
            }
        }
        Ok(())
    }

    /// True iff every constraint whose scope lies inside `Dom(f)` is satisfied.
    pub fn is_partial_solution(&self, f: &PartialAssignment) -> Result<bool, CspError> {
        let compiled = self.compiled()?;
        self.check_assignment(f)?;
        let mut tuple = Vec::new();
        for (ci, c) in self.constraints.iter().enumerate() {
            tuple.clear();
            let mut bound = true;
            for &v in &c.scope {
                match f.get(v) {
                    Some(i) => tuple.push(i),
                    None => {
                        bound = false;
                        break;
                    }
                }
            }
            if bound && !compiled.allowed[ci].contains(&tuple) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks only the constraints that mention `var` and are fully bound by `f`.
    ///
    /// If `f` without `var` is a partial solution, this decides whether `f` is.
    pub(crate) fn consistent_at(&self, compiled: &Compiled, f: &PartialAssignment, var: VarId) -> bool {
        let mut tuple = Vec::new();
        'constraints: for &ci in &compiled.constraints_of[var] {
            tuple.clear();
            for &v in &self.constraints[ci].scope {
                match f.get(v) {
                    Some(i) => tuple.push(i),
                    None => continue 'constraints,
                }
            }
            if !compiled.allowed[ci].contains(&tuple) {
                return false;
            }
        }
        true
    }

    /// All solutions in lexicographic order (variable order, then domain
    /// order), truncated at `limit`. Plain enumeration of every total
    /// assignment; intended as a test oracle on small instances.
    pub fn enumerate_solutions(&self, limit: usize) -> Result<Vec<PartialAssignment>, CspError> {
        let compiled = self.compiled()?;
        let n = self.num_vars();
        let mut out = Vec::new();
        if limit == 0 {
            return Ok(out);
        }
        let mut digits = vec![0usize; n];
        let mut tuple = Vec::new();
        loop {
            let ok = self.constraints.iter().enumerate().all(|(ci, c)| {
                tuple.clear();
                tuple.extend(c.scope.iter().map(|&v| digits[v]));
                compiled.allowed[ci].contains(&tuple)
            });
            if ok {
                out.push(PartialAssignment::total(&digits));
                if out.len() >= limit {
                    break;
                }
            }
            // odometer increment, last variable fastest
            let mut pos = n;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < self.domains[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let raw = RawInstance {
            variables: self.variables.clone(),
            domains: self.variables.iter().cloned().zip(self.domains.iter().cloned()).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| RawConstraint {
                    scope: c.scope.iter().map(|&v| self.variables[v].clone()).collect(),
                    allowed: c.allowed.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<CspInstance, CspError> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| CspError::Json(e.to_string()))?;
        let mut domains = Vec::with_capacity(raw.variables.len());
        for name in &raw.variables {
            let d = raw
                .domains
                .get(name)
                .ok_or_else(|| CspError::Json(format!("no domain given for variable `{name}`")))?;
            domains.push(d.clone());
        }
        let index: HashMap<&str, VarId> = raw.variables.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut constraints = Vec::with_capacity(raw.constraints.len());
        for c in raw.constraints {
            let scope = c
                .scope
                .iter()
                .map(|s| index.get(s.as_str()).copied().ok_or_else(|| CspError::UnknownVariable(s.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            constraints.push(Constraint::new(scope, c.allowed));
        }
        Ok(CspInstance::new(raw.variables, domains, constraints))
    }
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    variables: Vec<String>,
    domains: BTreeMap<String, Vec<Value>>,
    constraints: Vec<RawConstraint>,
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    scope: Vec<String>,
    allowed: Vec<Vec<Value>>,
}

/// A mapping from a subset of the variables to value indices.
///
/// Bindings are kept sorted by variable, which makes the representation
/// canonical: equal assignments hash and compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialAssignment {
    bindings: Vec<(VarId, usize)>,
}

impl PartialAssignment {
    pub fn empty() -> Self {
        PartialAssignment::default()
    }

    /// Fails with the offending variable if it is bound twice.
    pub fn new(mut bindings: Vec<(VarId, usize)>) -> Result<Self, VarId> {
        bindings.sort_unstable();
        if let Some(w) = bindings.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(w[0].0);
        }
        Ok(PartialAssignment { bindings })
    }

    /// Total assignment from one value index per variable.
    pub fn total(values: &[usize]) -> Self {
        PartialAssignment { bindings: values.iter().copied().enumerate().collect() }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, var: VarId) -> Option<usize> {
        self.bindings.binary_search_by_key(&var, |&(v, _)| v).ok().map(|pos| self.bindings[pos].1)
    }

    pub fn contains_var(&self, var: VarId) -> bool {
        self.get(var).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, usize)> + '_ {
        self.bindings.iter().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.iter().map(|&(v, _)| v)
    }

    pub fn bindings(&self) -> &[(VarId, usize)] {
        &self.bindings
    }

    /// `self` with `var` bound to `value`; replaces an existing binding.
    pub fn with(&self, var: VarId, value: usize) -> Self {
        let mut bindings = self.bindings.clone();
        match bindings.binary_search_by_key(&var, |&(v, _)| v) {
            Ok(pos) => bindings[pos].1 = value,
            Err(pos) => bindings.insert(pos, (var, value)),
        }
        PartialAssignment { bindings }
    }

    pub fn without(&self, var: VarId) -> Self {
        PartialAssignment { bindings: self.bindings.iter().copied().filter(|&(v, _)| v != var).collect() }
    }

    /// Restriction to the variables accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(VarId) -> bool) -> Self {
        PartialAssignment { bindings: self.bindings.iter().copied().filter(|&(v, _)| keep(v)).collect() }
    }

    /// `self` extends `f`: it binds every variable of `f` to the same value.
    pub fn extends(&self, f: &PartialAssignment) -> bool {
        f.bindings.iter().all(|&(v, i)| self.get(v) == Some(i))
    }
}
