//! Python bindings for `lcsat_core`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lcsat_core::bench::{config_for_scheme, generate_chain, run_experiment, ChainSpec, Encoding, ExperimentSpec};
use lcsat_core::cdcl::{self, Branching, RestartPolicy, SolveResult};
use lcsat_core::cnf::{Clause, CnfFormula, Origin};
use lcsat_core::consistency::{k_consistency_closure, solve_via_closure, ClosureSolveOutcome};
use lcsat_core::csp::CspInstance;
use lcsat_core::dimacs::{parse_dimacs, write_dimacs};
use lcsat_core::encode::{direct_encode, support_encode, VarMap};
use lcsat_core::hyperres::{refute_width_k_with, theoretical_bounds, NhrOptions, NhrOutcome};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn restart_policy(name: &str) -> PyResult<RestartPolicy> {
    match name {
        "every" => Ok(RestartPolicy::EveryConflict),
        "never" => Ok(RestartPolicy::Never),
        "geometric" => Ok(RestartPolicy::geometric()),
        _ => Err(value_error(format!("unknown restart policy `{name}` (expected every, never or geometric)"))),
    }
}

/// A CSP instance with explicit allowed-tuple constraints.
#[pyclass(name = "CspInstance", module = "lcsat")]
struct PyCsp {
    inner: CspInstance,
}

#[pymethods]
impl PyCsp {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = CspInstance::from_json(text).map_err(value_error)?;
        inner.ensure_valid().map_err(value_error)?;
        Ok(PyCsp { inner })
    }

    /// The chain instance with groups of `w` variables over `0..d`.
    #[staticmethod]
    fn chain(w: u32, d: u32) -> PyResult<Self> {
        let spec = ChainSpec::new(w, d).map_err(value_error)?;
        Ok(PyCsp { inner: generate_chain(spec).map_err(value_error)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn num_vars(&self) -> usize {
        self.inner.num_vars()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.variables().to_vec()
    }

    /// True when the k-consistency closure is empty.
    fn closure_is_empty(&self, k: usize) -> PyResult<bool> {
        Ok(k_consistency_closure(&self.inner, k).map_err(value_error)?.empty)
    }

    /// Number of partial assignments surviving the k-consistency closure.
    fn closure_size(&self, k: usize) -> PyResult<usize> {
        Ok(k_consistency_closure(&self.inner, k).map_err(value_error)?.surviving.len())
    }

    /// A solution found by fixing values under the closure, or `None` when
    /// the closure is empty or the search gets stuck.
    fn solve_via_closure(&self, k: usize) -> PyResult<Option<Vec<(String, i64)>>> {
        match solve_via_closure(&self.inner, k).map_err(value_error)? {
            ClosureSolveOutcome::Solution(f) => {
                Ok(Some(f.iter().map(|(v, i)| (self.inner.name(v).to_string(), self.inner.domain(v)[i])).collect()))
            }
            _ => Ok(None),
        }
    }

    #[pyo3(signature = (at_most_one = true))]
    fn direct_encode(&self, at_most_one: bool) -> PyResult<PyCnf> {
        let (inner, map) = direct_encode(&self.inner, at_most_one).map_err(value_error)?;
        Ok(PyCnf { inner, map: Some(map) })
    }

    #[pyo3(signature = (at_most_one = true))]
    fn support_encode(&self, at_most_one: bool) -> PyResult<PyCnf> {
        let (inner, map) = support_encode(&self.inner, at_most_one).map_err(value_error)?;
        Ok(PyCnf { inner, map: Some(map) })
    }

    fn __repr__(&self) -> String {
        format!("CspInstance(vars={}, constraints={})", self.inner.num_vars(), self.inner.constraints().len())
    }
}

/// A CNF formula, optionally carrying the variable map of its encoding.
#[pyclass(name = "Cnf", module = "lcsat")]
struct PyCnf {
    inner: CnfFormula,
    map: Option<VarMap>,
}

#[pymethods]
impl PyCnf {
    /// Builds a formula from DIMACS-style literal lists.
    #[new]
    fn new(num_vars: u32, clauses: Vec<Vec<i64>>) -> PyResult<Self> {
        let mut inner = CnfFormula::new(num_vars);
        for lits in clauses {
            if lits.contains(&0) {
                return Err(value_error("literal 0 is not allowed"));
            }
            inner.push(Clause::from_dimacs(&lits).map_err(value_error)?, Origin::Input);
        }
        inner.validate().map_err(value_error)?;
        Ok(PyCnf { inner, map: None })
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        let (inner, map) = parse_dimacs(text).map_err(value_error)?;
        Ok(PyCnf { inner, map })
    }

    fn to_dimacs(&self) -> String {
        write_dimacs(&self.inner, self.map.as_ref())
    }

    #[getter]
    fn num_vars(&self) -> u32 {
        self.inner.num_vars()
    }

    #[getter]
    fn clauses(&self) -> Vec<Vec<i64>> {
        self.inner.clauses().iter().map(|c| c.iter().map(|l| l.to_dimacs()).collect()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Width-bounded negative-hyper-resolution. Returns the rendered
    /// refutation lines, or `None` if saturation finds no empty clause.
    #[pyo3(signature = (width, subsumption = false))]
    fn refute(&self, width: usize, subsumption: bool) -> PyResult<Option<Vec<String>>> {
        let options = NhrOptions { subsumption, ..NhrOptions::default() };
        match refute_width_k_with(&self.inner, width, &options).map_err(value_error)? {
            NhrOutcome::Refuted(trace) => Ok(Some(trace.render().lines().map(String::from).collect())),
            NhrOutcome::Saturated { .. } => Ok(None),
        }
    }

    /// Runs the CDCL solver. Returns a dict with `result`, the statistics and,
    /// for satisfiable input, `model` as a list of DIMACS literals.
    #[pyo3(signature = (scheme = "1uip", restart = "every", seed = 0, branching = "random", minimize = false))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        scheme: &str,
        restart: &str,
        seed: u64,
        branching: &str,
        minimize: bool,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut config = config_for_scheme(scheme).map_err(value_error)?;
        config.minimize_conflict_clause |= minimize;
        config.restart_policy = restart_policy(restart)?;
        config.rng_seed = seed;
        config.branching = match branching {
            "random" => Branching::RandomTrue,
            "activity" => Branching::Activity,
            _ => return Err(value_error(format!("unknown branching `{branching}` (expected random or activity)"))),
        };
        let out = cdcl::solve(&self.inner, &config);
        let d = PyDict::new(py);
        match &out.result {
            SolveResult::Sat(model) => {
                d.set_item("result", "SAT")?;
                let lits: Vec<i64> = (1..model.len()).map(|v| if model[v] { v as i64 } else { -(v as i64) }).collect();
                d.set_item("model", lits)?;
            }
            SolveResult::Unsat => d.set_item("result", "UNSAT")?,
            SolveResult::Unknown => d.set_item("result", "UNKNOWN")?,
        }
        d.set_item("restarts", out.stats.restarts)?;
        d.set_item("conflicts", out.stats.conflicts)?;
        d.set_item("decisions", out.stats.decisions)?;
        d.set_item("propagations", out.stats.propagations)?;
        Ok(d)
    }

    /// Operational absorption test for a clause given as DIMACS literals.
    fn is_absorbed(&self, clause: Vec<i64>) -> PyResult<bool> {
        if clause.contains(&0) {
            return Err(value_error("literal 0 is not allowed"));
        }
        let c = Clause::from_dimacs(&clause).map_err(value_error)?;
        Ok(cdcl::is_absorbed(&self.inner, &c).map_err(value_error)?.absorbed)
    }

    /// Reads a model (DIMACS literals) back into `(variable, value)` pairs.
    fn decode(&self, model: Vec<i64>) -> PyResult<Vec<(String, i64)>> {
        let map = self.map.as_ref().ok_or_else(|| value_error("formula has no variable map"))?;
        let mut bits = vec![false; map.num_bool_vars() as usize + 1];
        for l in model {
            let v = l.unsigned_abs() as usize;
            if v == 0 || v >= bits.len() {
                return Err(value_error(format!("literal {l} out of range")));
            }
            bits[v] = l > 0;
        }
        let f = map.decode_model(&bits).map_err(value_error)?;
        Ok(f.iter().map(|(v, i)| (map.names()[v].clone(), map.values(v)[i])).collect())
    }

    fn __repr__(&self) -> String {
        format!("Cnf(vars={}, clauses={})", self.inner.num_vars(), self.inner.len())
    }
}

/// Evaluates the restart and derivation-size bound formulas exactly.
#[pyfunction]
fn bounds<'py>(py: Python<'py>, n: u64, d: u64, k: u64, m: u64) -> PyResult<Bound<'py, PyDict>> {
    let b = theoretical_bounds(n, d, k, m);
    let out = PyDict::new(py);
    out.set_item("thm2", b.thm2)?;
    out.set_item("thm3", b.thm3)?;
    out.set_item("thm3_halfprob", b.thm3_halfprob)?;
    out.set_item("thm4", b.thm4)?;
    Ok(out)
}

/// Solves one chain instance once per seed; returns one dict per run.
#[pyfunction]
#[pyo3(signature = (w, d, seeds, encoding = "direct", scheme = "1uip", restart = "every"))]
fn bench_chain<'py>(
    py: Python<'py>,
    w: u32,
    d: u32,
    seeds: Vec<u64>,
    encoding: &str,
    scheme: &str,
    restart: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut config = config_for_scheme(scheme).map_err(value_error)?;
    config.restart_policy = restart_policy(restart)?;
    let encoding: Encoding = encoding.parse().map_err(value_error)?;
    let spec = ExperimentSpec::chain(w, d, encoding, config, seeds);
    let rows = py.detach(|| run_experiment(&spec)).map_err(value_error)?;
    rows.into_iter()
        .map(|r| {
            let row = PyDict::new(py);
            row.set_item("w", r.w)?;
            row.set_item("d", r.d)?;
            row.set_item("n", r.n)?;
            row.set_item("clause_count", r.clause_count)?;
            row.set_item("scheme", r.scheme)?;
            row.set_item("seed", r.seed)?;
            row.set_item("verdict", r.verdict.to_string())?;
            row.set_item("restarts", r.restarts)?;
            row.set_item("conflicts", r.conflicts)?;
            row.set_item("decisions", r.decisions)?;
            Ok(row)
        })
        .collect()
}

#[pymodule]
mod lcsat {
    #[pymodule_export]
    use super::{bench_chain, bounds, PyCnf, PyCsp};
}
