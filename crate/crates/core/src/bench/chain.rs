use crate::csp::{Constraint, CspInstance, Value};

use super::BenchError;

/// Chain family: groups of `w` variables over `{0..d-1}` where each group's
/// sum must be strictly smaller than the next group's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainSpec {
    pub w: u32,
    pub d: u32,
}

impl ChainSpec {
    pub fn new(w: u32, d: u32) -> Result<ChainSpec, BenchError> {
        let spec = ChainSpec { w, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.w < 1 {
            return Err(BenchError::InvalidChain(format!("w must be at least 1, got {}", self.w)));
        }
        if self.d < 2 {
            return Err(BenchError::InvalidChain(format!("d must be at least 2, got {}", self.d)));
        }
        Ok(())
    }

    /// Enough groups that the sums would have to climb past `w·(d-1)`.
    pub fn groups(&self) -> u64 {
        u64::from(self.d - 1) * u64::from(self.w) + 2
    }

    pub fn num_vars(&self) -> u64 {
        self.groups() * u64::from(self.w)
    }

    pub fn num_constraints(&self) -> u64 {
        self.groups() - 1
    }

    pub fn arity(&self) -> u32 {
        2 * self.w
    }
}

/// Tuples of length `len` over `0..d` in lexicographic order, paired with their sums.
fn tuples_with_sums(len: usize, d: Value) -> Vec<(Vec<Value>, Value)> {
    let mut out = vec![(Vec::new(), 0)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|(t, s)| {
                (0..d).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    (t, s + v)
                })
            })
            .collect();
    }
    out
}

pub fn generate_chain(spec: ChainSpec) -> Result<CspInstance, BenchError> {
    spec.validate()?;
    let w = spec.w as usize;
    let d = Value::from(spec.d);
    let groups = spec.groups() as usize;
    let names: Vec<String> = (0..groups).flat_map(|g| (0..w).map(move |i| format!("g{g}_{i}"))).collect();
    let half = tuples_with_sums(w, d);
    let mut allowed = Vec::new();
    for (a, sa) in &half {
        for (b, sb) in &half {
            if sa < sb {
                let mut t = a.clone();
                t.extend_from_slice(b);
                allowed.push(t);
            }
        }
    }
    let constraints =
        (0..groups - 1).map(|g| Constraint::new((g * w..(g + 2) * w).collect(), allowed.clone())).collect();
    let domain: Vec<Value> = (0..d).collect();
    Ok(CspInstance::uniform(names, &domain, constraints))
}
