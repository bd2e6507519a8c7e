//! DIMACS CNF reading and writing.
//!
//! Variable maps travel as comment lines `c map <bool> <cspvar> <value>`
//! placed before the problem line.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{BoolVar, Clause, CnfFormula, Lit, Origin};
use crate::csp::Value;
use crate::encode::VarMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line: {text}")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: missing problem line before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: second problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: cannot parse `{token}` as a literal")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range (formula has {num_vars} variables)")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: BoolVar },
    #[error("line {line}: clause is not terminated by 0")]
    MissingTerminator { line: usize },
    #[error("line {line}: clause contains a literal and its negation")]
    Tautology { line: usize },
    #[error("line {line}: clause duplicates the clause on line {first}")]
    DuplicateClause { line: usize, first: usize },
    #[error("line {line}: header declares {declared} clauses, found {found}")]
    ClauseCount { line: usize, declared: usize, found: usize },
    #[error("line {line}: malformed map comment: {text}")]
    MalformedMap { line: usize, text: String },
}

/// Renders a formula (and optionally its variable map) in DIMACS format.
pub fn write_dimacs(cnf: &CnfFormula, map: Option<&VarMap>) -> String {
    let mut out = String::new();
    if let Some(map) = map {
        for (b, name, value) in map.entries() {
            let _ = writeln!(out, "c map {b} {name} {value}");
        }
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.num_vars(), cnf.len());
    for c in cnf.clauses() {
        if c.is_empty() {
            out.push_str("0\n");
        } else {
            let _ = writeln!(out, "{c} 0");
        }
    }
    out
}

/// Parses DIMACS text; the map is returned when `c map` comments are present.
pub fn parse_dimacs(text: &str) -> Result<(CnfFormula, Option<VarMap>), DimacsError> {
    let mut header: Option<(BoolVar, usize)> = None;
    let mut header_line = 0;
    let mut map_entries: Vec<(usize, BoolVar, String, Value)> = Vec::new();
    let mut clauses: Vec<(Clause, usize)> = Vec::new();
    let mut seen: HashMap<Clause, usize> = HashMap::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                let mut parts = rest.split_whitespace();
                if parts.next() == Some("map") {
                    let fields: Vec<&str> = parts.collect();
                    let bad = || DimacsError::MalformedMap { line, text: trimmed.to_string() };
                    if fields.len() != 3 {
                        return Err(bad());
                    }
                    let b: BoolVar = fields[0].parse().map_err(|_| bad())?;
                    let v: Value = fields[2].parse().map_err(|_| bad())?;
                    map_entries.push((line, b, fields[1].to_string(), v));
                }
                continue;
            }
        }
        if trimmed.starts_with('%') {
            // some generators end files with "%\n0"
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            let bad = || DimacsError::MalformedHeader { line, text: trimmed.to_string() };
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(bad());
            }
            let nv: BoolVar = fields[2].parse().map_err(|_| bad())?;
            let nc: usize = fields[3].parse().map_err(|_| bad())?;
            header = Some((nv, nc));
            header_line = line;
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(DimacsError::MissingHeader { line });
        };
        for token in trimmed.split_whitespace() {
            let n: i64 = token.parse().map_err(|_| DimacsError::BadToken { line, token: token.to_string() })?;
            if pending.is_empty() {
                pending_line = line;
            }
            if n == 0 {
                let lits = std::mem::take(&mut pending);
                let clause = Clause::new(lits).map_err(|_| DimacsError::Tautology { line: pending_line })?;
                if let Some(&first) = seen.get(&clause) {
                    return Err(DimacsError::DuplicateClause { line: pending_line, first });
                }
                seen.insert(clause.clone(), pending_line);
                clauses.push((clause, pending_line));
                continue;
            }
            if n.unsigned_abs() > u64::from(num_vars) {
                return Err(DimacsError::LiteralOutOfRange { line, lit: n, num_vars });
            }
            pending.push(Lit::from_dimacs(n).expect("non-zero literal within range"));
        }
    }

    if !pending.is_empty() {
        return Err(DimacsError::MissingTerminator { line: pending_line });
    }
    let Some((num_vars, declared)) = header else {
        return Err(DimacsError::MissingHeader { line: last_line.max(1) });
    };
    if declared != clauses.len() {
        return Err(DimacsError::ClauseCount { line: header_line, declared, found: clauses.len() });
    }

    let mut cnf = CnfFormula::new(num_vars);
    for (c, _) in clauses {
        cnf.push(c, Origin::Input);
    }
    let map = if map_entries.is_empty() { None } else { Some(build_map(map_entries, num_vars)?) };
    Ok((cnf, map))
}

/// Rebuilds a [`VarMap`]; entries must number the Booleans `1..=n` with each
/// CSP variable's values contiguous.
fn build_map(mut entries: Vec<(usize, BoolVar, String, Value)>, num_vars: BoolVar) -> Result<VarMap, DimacsError> {
    entries.sort_by_key(|e| e.1);
    let mut names: Vec<String> = Vec::new();
    let mut values: Vec<Vec<Value>> = Vec::new();
    for (i, (line, b, name, value)) in entries.iter().enumerate() {
        let bad = || DimacsError::MalformedMap { line: *line, text: format!("c map {b} {name} {value}") };
        if *b as usize != i + 1 || *b > num_vars {
            return Err(bad());
        }
        if names.last() == Some(name) {
            let vals = values.last_mut().expect("parallel vectors");
            if vals.contains(value) {
                return Err(bad());
            }
            vals.push(*value);
        } else {
            if names.contains(name) {
                return Err(bad());
            }
            names.push(name.clone());
            values.push(vec![*value]);
        }
    }
    Ok(VarMap::from_parts(names, values))
}
