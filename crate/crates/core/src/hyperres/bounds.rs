use std::fmt;

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, Zero};

/// Closed-form restart and size bounds for given `n`, `d`, `k`, `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub n: u64,
    pub d: u64,
    pub k: u64,
    pub m: u64,
    /// Expected restarts, 1UIP-style learning: `m·n·k²·C(n,k)`.
    pub thm2: BigUint,
    /// Expected restarts, decision learning: `m·C(n,k)`.
    pub thm3: BigUint,
    /// Restarts for success probability above one half: `(m + ⌈√m⌉)·C(n,k)`.
    pub thm3_halfprob: BigUint,
    /// Derivation-length bound: `(Σ_{i=1..k} d^i·C(n,i))·C(n·d,k)`.
    pub thm4: BigUint,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={} d={} k={} m={}", self.n, self.d, self.k, self.m)?;
        writeln!(f, "thm2={}", self.thm2)?;
        writeln!(f, "thm3={}", self.thm3)?;
        writeln!(f, "thm3_halfprob={}", self.thm3_halfprob)?;
        write!(f, "thm4={}", self.thm4)
    }
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc·(n-i) is divisible by (i+1) after multiplying
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn ceil_sqrt(m: u64) -> u64 {
    let r = m.sqrt();
    if r * r == m {
        r
    } else {
        r + 1
    }
}

/// Evaluates the bound formulas. Inputs of zero are accepted and simply
/// propagate through the arithmetic.
pub fn theoretical_bounds(n: u64, d: u64, k: u64, m: u64) -> BoundsReport {
    let c_nk = binomial(n, k);
    let big = BigUint::from;
    let thm2 = big(m) * big(n) * big(k) * big(k) * &c_nk;
    let thm3 = big(m) * &c_nk;
    let thm3_halfprob = big(m + ceil_sqrt(m)) * &c_nk;
    let mut partial_assignments = BigUint::zero();
    let mut d_pow = BigUint::one();
    for i in 1..=k {
        d_pow *= big(d);
        partial_assignments += &d_pow * binomial(n, i);
    }
    let thm4 = partial_assignments * binomial(n * d, k);
    BoundsReport { n, d, k, m, thm2, thm3, thm3_halfprob, thm4 }
}
