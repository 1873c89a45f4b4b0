//! Exact sparse multivariate polynomial arithmetic over the integers and
//! over prime/extension fields, plus the univariate-in-Y Sylvester resultant.

mod field;
mod poly;
mod resultant;
pub(crate) mod smallfield;

pub use field::{poly_eval, substitute_y_power, FieldDesc, FieldElem, FieldPoly};
pub(crate) use poly::reduce_bigint;
pub use poly::SparsePoly;
pub use resultant::{bareiss_det, sylvester_resultant_y};

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
    UnknownVariable(String),
    ZeroPolynomial,
    /// Resultant input without positive degree in Y.
    NotUnivariatePositive(String),
    NotPrime(u64),
    /// `primitive_root_of_unity` with f not dividing p - 1.
    OrderDoesNotDivide {
        f: u64,
        p: u64,
    },
    VariableMismatch,
    ParseError(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            AlgebraError::UnknownVariable(v) => write!(f, "unknown variable {v}"),
            AlgebraError::ZeroPolynomial => write!(f, "zero polynomial input"),
            AlgebraError::NotUnivariatePositive(v) => {
                write!(f, "polynomial has no positive degree in {v}")
            }
            AlgebraError::NotPrime(p) => write!(f, "{p} is not prime"),
            AlgebraError::OrderDoesNotDivide { f: ord, p } => {
                write!(f, "{ord} does not divide {p} - 1")
            }
            AlgebraError::VariableMismatch => write!(f, "variable lists differ"),
            AlgebraError::ParseError(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for AlgebraError {}

/// Deterministic trial-division primality test; desk scale only.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in the inclusive range `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Distinct prime divisors of `n > 1`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    mod_pow(a, p - 2, p)
}

/// Multiplicative order of `a` modulo prime `p`.
pub fn mod_order(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    let mut ord = p - 1;
    for r in prime_divisors(p - 1) {
        while ord.is_multiple_of(r) && mod_pow(a, ord / r, p) == 1 {
            ord /= r;
        }
    }
    ord
}

/// Least element of `F_p` with exact multiplicative order `f`.
///
/// Fails unless `f | p - 1`.
pub fn primitive_root_of_unity(p: u64, f: u64) -> Result<u64, AlgebraError> {
    if !is_prime(p) {
        return Err(AlgebraError::NotPrime(p));
    }
    if f == 0 || !(p - 1).is_multiple_of(f) {
        return Err(AlgebraError::OrderDoesNotDivide { f, p });
    }
    for x in 1..p {
        if mod_pow(x, f, p) == 1 && mod_order(x, p) == f {
            return Ok(x);
        }
    }
    unreachable!("F_p^x is cyclic, an order-f element exists whenever f | p-1")
}
