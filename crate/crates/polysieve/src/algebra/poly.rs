//! Sparse multivariate polynomials with exact integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::AlgebraError;

/// A polynomial stored as a map from exponent vector to nonzero coefficient.
///
/// Invariants: no duplicate exponent vectors (map keys), no zero coefficient
/// is ever stored, exponents are non-negative by construction. Coefficients
/// are arbitrary precision; the coefficient-reduction pipeline feeds in
/// values comparable to `B^{(mde)^{n+2}}`.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SparsePoly {
    pub fn zero(vars: &[&str]) -> Self {
        SparsePoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(vec![0; p.vars.len()], c);
        }
        p
    }

    /// The monomial `c * prod(var_i ^ exps_i)`.
    pub fn monomial(vars: &[&str], c: impl Into<BigInt>, exps: &[u32]) -> Self {
        assert_eq!(vars.len(), exps.len());
        let mut p = Self::zero(vars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(exps.to_vec(), c);
        }
        p
    }

    pub fn variable(vars: &[&str], name: &str) -> Self {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .expect("declared variable");
        let mut exps = vec![0u32; vars.len()];
        exps[idx] = 1;
        Self::monomial(vars, 1, &exps)
    }

    pub fn from_terms(vars: &[&str], terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(&e, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, exps: &[u32], c: BigInt) {
        if c.is_zero() {
            return;
        }
        assert_eq!(exps.len(), self.vars.len());
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps.to_vec()) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "variable lists must agree");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars.iter().map(|s| s.as_str()).collect::<Vec<_>>());
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "variable lists must agree");
        let mut out = SparsePoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(&e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let vars: Vec<&str> = self.vars.iter().map(|s| s.as_str()).collect();
        let mut acc = Self::constant(&vars, 1);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with exact integer coefficients.
    pub fn partial_derivative(&self, var: &str) -> Result<Self, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let mut out = SparsePoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[idx] -= 1;
            out.add_term(&e2, c * BigInt::from(e[idx]));
        }
        Ok(out)
    }

    pub fn eval_int(&self, point: &[BigInt]) -> Result<BigInt, AlgebraError> {
        if point.len() != self.vars.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &exp) in point.iter().zip(e) {
                for _ in 0..exp {
                    t *= x;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_i64(&self, point: &[i64]) -> Result<BigInt, AlgebraError> {
        let pt: Vec<BigInt> = point.iter().map(|&x| BigInt::from(x)).collect();
        self.eval_int(&pt)
    }

    /// Evaluation with all inputs and output reduced mod `p` (prime field).
    pub fn eval_mod_p(&self, point: &[u64], p: u64) -> Result<u64, AlgebraError> {
        if point.len() != self.vars.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = reduce_bigint(c, p);
            for (&x, &exp) in point.iter().zip(e) {
                t = super::mulmod(t, super::mod_pow(x % p, exp as u64, p), p);
            }
            acc = (acc + t) % p;
        }
        Ok(acc)
    }

    pub fn degree_in(&self, var: &str) -> Result<u32, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        Ok(self.terms.keys().map(|e| e[idx]).max().unwrap_or(0))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// `Some(d)` if every term has total degree exactly `d` (zero counts as
    /// homogeneous of any degree; returns `None` only for mixed degrees).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => Some(0),
            Some(d) => {
                if degs.all(|x| x == d) {
                    Some(d)
                } else {
                    None
                }
            }
        }
    }

    /// Max absolute value of any coefficient (the polynomial height).
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// View as univariate in `var`: coefficient polynomials (in the full
    /// variable list, with `var`-exponent zeroed) indexed by `var`-degree.
    pub fn coefficients_in(&self, var: &str) -> Result<Vec<SparsePoly>, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let deg = self.degree_in(var)? as usize;
        let mut out: Vec<SparsePoly> = (0..=deg)
            .map(|_| SparsePoly {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            })
            .collect();
        for (e, c) in &self.terms {
            let d = e[idx] as usize;
            let mut e2 = e.clone();
            e2[idx] = 0;
            out[d].add_term(&e2, c.clone());
        }
        Ok(out)
    }

    /// Remove a variable that no term uses (column deletion).
    pub fn drop_unused_var(&self, var: &str) -> Result<SparsePoly, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        if self.terms.keys().any(|e| e[idx] != 0) {
            return Err(AlgebraError::UnknownVariable(format!("{var} still in use")));
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, v)| v.clone())
            .collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.remove(idx);
            terms.insert(e2, c.clone());
        }
        Ok(SparsePoly { vars, terms })
    }

    /// Rename the full variable list (arity must match).
    pub fn with_vars(&self, vars: &[&str]) -> SparsePoly {
        assert_eq!(vars.len(), self.vars.len());
        SparsePoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: self.terms.clone(),
        }
    }

    /// Text format: header `vars <name>...`, then one `coefficient e1 .. ev`
    /// line per term. Terms are emitted in ascending exponent order.
    pub fn to_text(&self) -> String {
        let mut s = String::from("vars");
        for v in &self.vars {
            s.push(' ');
            s.push_str(v);
        }
        s.push('\n');
        for (e, c) in &self.terms {
            s.push_str(&c.to_string());
            for x in e {
                s.push(' ');
                s.push_str(&x.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SparsePoly, AlgebraError> {
        let mut lines = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| AlgebraError::ParseError("empty polynomial text".into()))?;
        let mut it = header.split_whitespace();
        if it.next() != Some("vars") {
            return Err(AlgebraError::ParseError("missing `vars` header".into()));
        }
        let vars: Vec<String> = it.map(|s| s.to_string()).collect();
        if vars.is_empty() {
            return Err(AlgebraError::ParseError("no variables declared".into()));
        }
        let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        let mut poly = SparsePoly::zero(&var_refs);
        for line in lines {
            let mut toks = line.split_whitespace();
            let coeff: BigInt =
                toks.next().unwrap().parse().map_err(|_| {
                    AlgebraError::ParseError(format!("bad coefficient in `{line}`"))
                })?;
            let exps: Result<Vec<u32>, _> = toks.map(|t| t.parse::<u32>()).collect();
            let exps =
                exps.map_err(|_| AlgebraError::ParseError(format!("bad exponent in `{line}`")))?;
            if exps.len() != vars.len() {
                return Err(AlgebraError::ParseError(format!(
                    "term `{line}` has {} exponents, expected {}",
                    exps.len(),
                    vars.len()
                )));
            }
            poly.add_term(&exps, coeff);
        }
        Ok(poly)
    }
}

pub(crate) fn reduce_bigint(c: &BigInt, p: u64) -> u64 {
    let m = c % BigInt::from(p);
    let m = if m.is_negative() {
        m + BigInt::from(p)
    } else {
        m
    };
    let (_, digits) = m.to_u64_digits();
    *digits.first().unwrap_or(&0)
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(
                    f,
                    " {} ",
                    if c.sign() == num_bigint::Sign::Minus {
                        "-"
                    } else {
                        "+"
                    }
                )?;
            } else {
                if c.sign() == num_bigint::Sign::Minus {
                    write!(f, "-")?;
                }
                first = false;
            }
            let a = c.abs();
            let monomial: Vec<String> = self
                .vars
                .iter()
                .zip(e)
                .filter(|(_, &x)| x > 0)
                .map(|(v, &x)| {
                    if x == 1 {
                        v.clone()
                    } else {
                        format!("{v}^{x}")
                    }
                })
                .collect();
            if monomial.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "{}", monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
