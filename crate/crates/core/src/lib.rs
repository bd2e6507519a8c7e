//! Constraint satisfaction, its sparse SAT encodings, and three ways of
//! refuting them: k-consistency closure on the CSP side, width-bounded
//! negative-hyper-resolution on the clause side, and a restart-heavy
//! clause-learning solver whose behaviour the first two predict.
//!
//! ```
//! use lcsat_core::bench::{generate_chain, ChainSpec};
//! use lcsat_core::consistency::k_consistency_closure;
//! use lcsat_core::encode::direct_encode;
//! use lcsat_core::hyperres::refute_width_k;
//!
//! let inst = generate_chain(ChainSpec { w: 1, d: 2 }).unwrap();
//! assert!(k_consistency_closure(&inst, 1).unwrap().empty);
//! let (cnf, _) = direct_encode(&inst, true).unwrap();
//! assert!(refute_width_k(&cnf, 1).unwrap().is_refuted());
//! ```

pub mod bench;
pub mod cdcl;
pub mod cnf;
pub mod consistency;
pub mod csp;
pub mod dimacs;
pub mod encode;
pub mod hyperres;

pub use cnf::{BoolVar, Clause, CnfFormula, Lit};
pub use csp::{Constraint, CspInstance, PartialAssignment};
