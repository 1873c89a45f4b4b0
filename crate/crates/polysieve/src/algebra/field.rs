//! Prime fields `F_p` and extensions `F_{p^k}` in polynomial representation.
//!
//! Extensions always use the lexicographically least irreducible monic
//! modulus (least value of `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`), so any two
//! runs construct the same field and the same element encodings.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use super::poly::reduce_bigint;
use super::{is_prime, mod_pow, mulmod, prime_divisors, AlgebraError, SparsePoly};

/// Description of `F_{p^k}` as `F_p[X]/(modulus)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldDesc {
    p: u64,
    k: u32,
    /// Monic, length `k + 1`, coefficients ascending, `modulus[k] == 1`.
    modulus: Vec<u64>,
}

/// An element of `F_{p^k}`: `k` coefficients in `[0, p)`, ascending powers.
///
/// Elements do not carry their field; operations take the `FieldDesc`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct FieldElem {
    pub coeffs: Vec<u64>,
}

impl FieldDesc {
    pub fn prime(p: u64) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        Ok(FieldDesc {
            p,
            k: 1,
            modulus: vec![0, 1],
        })
    }

    /// `F_{p^k}` with the lexicographically least irreducible modulus.
    pub fn extension(p: u64, k: u32) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        assert!(k >= 1, "extension degree must be at least 1");
        if k == 1 {
            return Self::prime(p);
        }
        let mut low = vec![0u64; k as usize];
        loop {
            let mut modulus = low.clone();
            modulus.push(1);
            if poly_is_irreducible(&modulus, p) {
                return Ok(FieldDesc { p, k, modulus });
            }
            // increment the coefficient vector as a base-p counter
            let mut i = 0;
            loop {
                low[i] += 1;
                if low[i] < p {
                    break;
                }
                low[i] = 0;
                i += 1;
                assert!(i < k as usize, "no irreducible of degree {k} found");
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, x: u64) -> FieldElem {
        let mut coeffs = vec![0; self.k as usize];
        coeffs[0] = x % self.p;
        FieldElem { coeffs }
    }

    pub fn from_i64(&self, x: i64) -> FieldElem {
        let p = self.p as i64;
        self.from_u64(x.rem_euclid(p) as u64)
    }

    pub fn from_bigint(&self, x: &BigInt) -> FieldElem {
        self.from_u64(reduce_bigint(x, self.p))
    }

    pub fn is_zero(&self, a: &FieldElem) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, self.p)) % self.p;
            }
        }
        self.reduce(&mut prod);
        FieldElem {
            coeffs: prod[..k].to_vec(),
        }
    }

    /// Reduce a coefficient vector mod the (monic) modulus, in place.
    fn reduce(&self, v: &mut Vec<u64>) {
        let k = self.k as usize;
        while v.len() > k {
            let top = v.pop().unwrap();
            if top == 0 {
                continue;
            }
            let deg = v.len() - k; // X^{k+deg} = -low(X) * X^deg
            for i in 0..k {
                let sub = mulmod(top, self.modulus[i], self.p);
                let slot = &mut v[deg + i];
                *slot = (*slot + self.p - sub) % self.p;
            }
        }
        while v.len() < k {
            v.push(0);
        }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> FieldElem {
        assert!(!self.is_zero(a), "inverse of zero");
        self.pow(a, self.order() - 2)
    }

    /// Multiplicative order of a nonzero element.
    pub fn elem_order(&self, a: &FieldElem) -> u64 {
        assert!(!self.is_zero(a));
        let q1 = self.order() - 1;
        let mut ord = q1;
        for r in prime_divisors(q1) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == self.one() {
                ord /= r;
            }
        }
        ord
    }

    /// All field elements, in ascending packed-index order.
    pub fn elements(&self) -> Vec<FieldElem> {
        let q = self.order();
        (0..q).map(|i| self.elem_from_index(i)).collect()
    }

    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        let mut coeffs = vec![0u64; self.k as usize];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem { coeffs }
    }

    pub fn elem_index(&self, a: &FieldElem) -> u64 {
        let mut idx = 0u64;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn format_elem(&self, a: &FieldElem) -> String {
        if self.k == 1 {
            return a.coeffs[0].to_string();
        }
        let parts: Vec<String> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => c.to_string(),
                1 if c == 1 => "t".to_string(),
                1 => format!("{c}t"),
                _ if c == 1 => format!("t^{i}"),
                _ => format!("{c}t^{i}"),
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{{{}^{}}}", self.p, self.k)
        }
    }
}

/// Exact evaluation of an integer polynomial at a point of `F_{p^k}`.
pub fn poly_eval(
    f: &SparsePoly,
    point: &[FieldElem],
    field: &FieldDesc,
) -> Result<FieldElem, AlgebraError> {
    if point.len() != f.num_vars() {
        return Err(AlgebraError::DimensionMismatch {
            expected: f.num_vars(),
            got: point.len(),
        });
    }
    let mut acc = field.zero();
    for (e, c) in f.terms() {
        let mut t = field.from_bigint(c);
        for (x, &exp) in point.iter().zip(e) {
            if exp > 0 {
                t = field.mul(&t, &field.pow(x, exp as u64));
            }
        }
        acc = field.add(&acc, &t);
    }
    Ok(acc)
}

/// Sparse polynomial with coefficients in `F_{p^k}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldPoly {
    pub field: FieldDesc,
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, FieldElem>,
}

impl FieldPoly {
    pub fn zero(field: &FieldDesc, vars: &[&str]) -> Self {
        FieldPoly {
            field: field.clone(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &FieldElem)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: &[u32], c: FieldElem) {
        if self.field.is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps.to_vec()) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Reduction of an integer polynomial into the field.
    pub fn from_int_poly(f: &SparsePoly, field: &FieldDesc) -> Self {
        let var_refs: Vec<&str> = f.vars().iter().map(|s| s.as_str()).collect();
        let mut out = Self::zero(field, &var_refs);
        for (e, c) in f.terms() {
            out.add_term(e, field.from_bigint(c));
        }
        out
    }

    pub fn eval(&self, point: &[FieldElem]) -> Result<FieldElem, AlgebraError> {
        if point.len() != self.vars.len() {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &exp) in point.iter().zip(e) {
                if exp > 0 {
                    t = f.mul(&t, &f.pow(x, exp as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }
}

/// Substitute `Y -> alpha * Z^e` into a polynomial with distinguished first
/// variable `Y`, producing a polynomial over the field in `(Z, rest...)`.
pub fn substitute_y_power(
    f: &SparsePoly,
    alpha: &FieldElem,
    e: u32,
    field: &FieldDesc,
) -> Result<FieldPoly, AlgebraError> {
    if f.var_index("Y") != Some(0) {
        return Err(AlgebraError::UnknownVariable("Y".to_string()));
    }
    let mut vars: Vec<String> = f.vars().to_vec();
    vars[0] = "Z".to_string();
    let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    let mut out = FieldPoly::zero(field, &var_refs);
    for (exps, c) in f.terms() {
        let a = exps[0];
        let mut e2 = exps.to_vec();
        e2[0] = a * e;
        let coeff = field.mul(&field.from_bigint(c), &field.pow(alpha, a as u64));
        out.add_term(&e2, coeff);
    }
    Ok(out)
}

fn poly_mod_mul(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    // multiply then reduce mod the monic `modulus`
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
        }
    }
    let k = modulus.len() - 1;
    while prod.len() > k {
        let top = prod.pop().unwrap();
        if top == 0 {
            continue;
        }
        let deg = prod.len() - k;
        for i in 0..k {
            let sub = mulmod(top, modulus[i], p);
            prod[deg + i] = (prod[deg + i] + p - sub) % p;
        }
    }
    while prod.len() < k {
        prod.push(0);
    }
    prod
}

/// Rabin irreducibility test for a monic polynomial over `F_p`.
fn poly_is_irreducible(modulus: &[u64], p: u64) -> bool {
    let k = (modulus.len() - 1) as u64;
    if k == 1 {
        return true;
    }
    // x^{p^k} == x mod f, and gcd-degree test via x^{p^{k/r}} != x
    let frob = |times: u64| -> Vec<u64> {
        // compute X^{p^times} mod modulus by repeated exponentiation
        let klen = modulus.len() - 1;
        let mut cur = vec![0u64; klen];
        if klen == 1 {
            cur[0] = 0; // X reduces to a constant; handled by k == 1 above
        } else {
            cur[1] = 1;
        }
        for _ in 0..times {
            // raise to p-th power
            let mut acc = vec![0u64; klen];
            acc[0] = 1;
            let mut base = cur.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = poly_mod_mul(&acc, &base, modulus, p);
                }
                base = poly_mod_mul(&base, &base, modulus, p);
                e >>= 1;
            }
            cur = acc;
        }
        cur
    };
    let x_poly = {
        let mut v = vec![0u64; modulus.len() - 1];
        v[1] = 1;
        v
    };
    if frob(k) != x_poly {
        return false;
    }
    for r in prime_divisors(k) {
        let g = frob(k / r);
        // require x^{p^{k/r}} - x to be a unit mod f, i.e. gcd = 1; a cheap
        // sufficient check at desk scale: the difference must be nonzero and
        // coprime to f, tested by polynomial gcd
        let mut diff = g.clone();
        diff[1] = (diff[1] + p - 1) % p;
        if poly_gcd_is_nontrivial(&diff, modulus, p) {
            return false;
        }
    }
    true
}

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
    v
}

/// Remainder of `f` by nonzero trimmed `g` over `F_p`, ascending coefficients.
fn poly_rem(mut f: Vec<u64>, g: &[u64], p: u64) -> Vec<u64> {
    let dg = g.len() - 1;
    let lg_inv = mod_pow(g[dg], p - 2, p);
    f = poly_trim(f);
    while f.len() > dg && !(f.len() == 1 && f[0] == 0) {
        let df = f.len() - 1;
        let factor = mulmod(f[df], lg_inv, p);
        let shift = df - dg;
        for (i, &gc) in g.iter().enumerate() {
            let sub = mulmod(factor, gc, p);
            f[shift + i] = (f[shift + i] + p - sub) % p;
        }
        f.pop();
        f = poly_trim(f);
    }
    if f.is_empty() {
        f.push(0);
    }
    f
}

fn poly_gcd_is_nontrivial(a: &[u64], modulus: &[u64], p: u64) -> bool {
    let mut f = poly_trim(modulus.to_vec());
    let mut g = poly_trim(a.to_vec());
    while !(g.len() == 1 && g[0] == 0) {
        let r = poly_rem(f, &g, p);
        f = g;
        g = r;
    }
    f.len() > 1
}
