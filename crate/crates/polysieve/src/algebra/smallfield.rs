//! Table-driven arithmetic for small fields `F_{p^k}` with `k <= 2`.
//!
//! Point searches enumerate up to ~10^8 field points, so the generic
//! `FieldElem` path (heap-allocated coefficient vectors) is far too slow.
//! Here an element is a single `u64` packing the two coordinates
//! (`c0 | c1 << 32`); addition is component-wise and multiplication goes
//! through discrete log/exp tables built once per field.

use super::{mulmod, prime_divisors, FieldDesc, FieldElem};

pub type Packed = u64;

pub struct SmallField {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    modulus: Vec<u64>,
    /// packed index (c0 + c1 p) -> discrete log; entry for 0 is unused
    log: Vec<u32>,
    /// discrete log -> packed element; doubled so `log a + log b` needs no mod
    exp: Vec<Packed>,
}

#[inline]
pub fn pack(c0: u64, c1: u64) -> Packed {
    c0 | (c1 << 32)
}

#[inline]
pub fn lo(a: Packed) -> u64 {
    a & 0xffff_ffff
}

#[inline]
pub fn hi(a: Packed) -> u64 {
    a >> 32
}

impl SmallField {
    pub fn new(desc: &FieldDesc) -> SmallField {
        let p = desc.p();
        let k = desc.k();
        assert!(k <= 2, "table engine supports k <= 2");
        assert!(p < (1 << 31), "p must fit in 31 bits");
        let q = desc.order();
        let modulus = desc.modulus().to_vec();
        let mut sf = SmallField {
            p,
            k,
            q,
            modulus,
            log: vec![0; q as usize],
            exp: Vec::new(),
        };
        sf.build_tables();
        sf
    }

    fn raw_mul(&self, a: Packed, b: Packed) -> Packed {
        // schoolbook multiply in the polynomial representation; only used
        // while building the tables
        let p = self.p;
        let (a0, a1) = (lo(a), hi(a));
        let (b0, b1) = (lo(b), hi(b));
        if self.k == 1 {
            return pack(mulmod(a0, b0, p), 0);
        }
        let c0 = mulmod(a0, b0, p);
        let c1 = (mulmod(a0, b1, p) + mulmod(a1, b0, p)) % p;
        let c2 = mulmod(a1, b1, p);
        // X^2 = -(m1 X + m0)
        let m0 = self.modulus[0];
        let m1 = self.modulus[1];
        let r0 = (c0 + p - mulmod(c2, m0, p)) % p;
        let r1 = (c1 + p - mulmod(c2, m1, p)) % p;
        pack(r0, r1)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        let q1 = q - 1;
        let rs = prime_divisors(q1);
        // find a generator of the multiplicative group, least packed index first
        let mut gen = 0;
        'outer: for idx in 1..q {
            let g = self.unindex(idx);
            for &r in &rs {
                if self.raw_pow(g, q1 / r) == pack(1, 0) {
                    continue 'outer;
                }
            }
            gen = g;
            break;
        }
        assert!(gen != 0, "multiplicative group is cyclic");
        let mut exp = vec![0u64; 2 * q1 as usize];
        let mut cur = pack(1, 0);
        #[allow(clippy::needless_range_loop)]
        for j in 0..q1 as usize {
            exp[j] = cur;
            let idx = self.index(cur) as usize;
            self.log[idx] = j as u32;
            cur = self.raw_mul(cur, gen);
        }
        for j in 0..q1 as usize {
            exp[q1 as usize + j] = exp[j];
        }
        self.exp = exp;
    }

    fn raw_pow(&self, a: Packed, mut e: u64) -> Packed {
        let mut base = a;
        let mut acc = pack(1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn index(&self, a: Packed) -> u64 {
        lo(a) + hi(a) * self.p
    }

    #[inline]
    pub fn unindex(&self, idx: u64) -> Packed {
        pack(idx % self.p, idx / self.p)
    }

    #[inline]
    pub fn zero(&self) -> Packed {
        0
    }

    #[inline]
    pub fn one(&self) -> Packed {
        pack(1, 0)
    }

    #[inline]
    pub fn add(&self, a: Packed, b: Packed) -> Packed {
        let p = self.p;
        let mut c0 = lo(a) + lo(b);
        if c0 >= p {
            c0 -= p;
        }
        let mut c1 = hi(a) + hi(b);
        if c1 >= p {
            c1 -= p;
        }
        pack(c0, c1)
    }

    #[inline]
    pub fn mul(&self, a: Packed, b: Packed) -> Packed {
        if a == 0 || b == 0 {
            return 0;
        }
        let la = self.log[self.index(a) as usize] as usize;
        let lb = self.log[self.index(b) as usize] as usize;
        self.exp[la + lb]
    }

    #[cfg(test)]
    pub fn inv(&self, a: Packed) -> Packed {
        assert!(a != 0);
        let q1 = (self.q - 1) as usize;
        let la = self.log[self.index(a) as usize] as usize;
        self.exp[(q1 - la) % q1]
    }

    /// Embed a base-field residue.
    #[allow(clippy::wrong_self_convention)]
    #[inline]
    pub fn from_base(&self, x: u64) -> Packed {
        pack(x % self.p, 0)
    }

    pub fn to_elem(&self, a: Packed) -> FieldElem {
        let mut coeffs = vec![lo(a)];
        if self.k == 2 {
            coeffs.push(hi(a));
        }
        FieldElem { coeffs }
    }

    #[cfg(test)]
    #[allow(clippy::wrong_self_convention)]
    pub fn from_elem(&self, e: &FieldElem) -> Packed {
        let c0 = e.coeffs[0];
        let c1 = if e.coeffs.len() > 1 { e.coeffs[1] } else { 0 };
        pack(c0, c1)
    }
}

/// Integer polynomial compiled against a `SmallField` for bulk evaluation.
///
/// Evaluation expects per-variable power tables maintained by the caller:
/// `pows[v][e]` must hold `x_v^e` for the current point.
pub struct CompiledPoly {
    /// (packed coefficient, [(var, exp)] for nonzero exps)
    pub terms: Vec<(Packed, Vec<(usize, u32)>)>,
    pub max_deg: Vec<u32>,
}

impl CompiledPoly {
    pub fn compile(f: &super::SparsePoly, sf: &SmallField) -> CompiledPoly {
        let nv = f.num_vars();
        let mut max_deg = vec![0u32; nv];
        let mut terms = Vec::new();
        for (e, c) in f.terms() {
            let cp = sf.from_base(super::poly::reduce_bigint(c, sf.p));
            if cp == 0 {
                continue;
            }
            let mut factors = Vec::new();
            for (v, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    factors.push((v, exp));
                    max_deg[v] = max_deg[v].max(exp);
                }
            }
            terms.push((cp, factors));
        }
        CompiledPoly { terms, max_deg }
    }

    #[inline]
    pub fn eval(&self, sf: &SmallField, pows: &[Vec<Packed>]) -> Packed {
        let mut acc = 0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(v, e) in factors {
                t = sf.mul(t, pows[v][e as usize]);
                if t == 0 {
                    break;
                }
            }
            acc = sf.add(acc, t);
        }
        acc
    }
}

/// Power tables for one evaluation point, updated coordinate by coordinate.
pub fn make_pow_tables(sf: &SmallField, max_deg: &[u32]) -> Vec<Vec<Packed>> {
    max_deg
        .iter()
        .map(|&d| {
            let mut v = vec![sf.one(); d as usize + 1];
            v[0] = sf.one();
            v
        })
        .collect()
}

#[inline]
pub fn set_coord(sf: &SmallField, pows: &mut [Vec<Packed>], var: usize, x: Packed) {
    let table = &mut pows[var];
    let mut cur = sf.one();
    for slot in table.iter_mut() {
        *slot = cur;
        cur = sf.mul(cur, x);
    }
}
