//! Exact brute-force counters: fiber counts `nu_p`, the box count `N(F,B)`,
//! the smoothed count `S(F,B)`, projective point enumeration, and the
//! Schwartz-Zippel box count.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{mod_pow, mulmod, AlgebraError, FieldDesc, FieldElem, SparsePoly};
use crate::sieve::SmoothWeightSpec;
use crate::structured::StructuredF;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSpec {
    /// Half-width; the box is `[-b, b]^n`.
    pub b: i64,
    pub n: usize,
}

impl BoxSpec {
    pub fn new(b: i64, n: usize) -> BoxSpec {
        assert!(b >= 0, "box half-width must be non-negative");
        BoxSpec { b, n }
    }

    /// Visit every lattice point of the box in lexicographic order.
    pub fn for_each(&self, mut f: impl FnMut(&[i64])) {
        let mut pt = vec![-self.b; self.n];
        if self.n == 0 {
            f(&pt);
            return;
        }
        loop {
            f(&pt);
            let mut i = self.n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if pt[i] < self.b {
                    pt[i] += 1;
                    for slot in pt.iter_mut().skip(i + 1) {
                        *slot = -self.b;
                    }
                    break;
                }
            }
        }
    }

    pub fn volume(&self) -> u64 {
        (2 * self.b as u64 + 1).pow(self.n as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountError {
    ZeroArgument,
    ZeroPolynomial,
    NonHomogeneous,
    Algebra(AlgebraError),
}

impl fmt::Display for CountError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountError::ZeroArgument => write!(f, "argument must be nonzero"),
            CountError::ZeroPolynomial => write!(f, "polynomial must not be identically zero"),
            CountError::NonHomogeneous => write!(f, "inputs must be homogeneous"),
            CountError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CountError {}

impl From<AlgebraError> for CountError {
    fn from(e: AlgebraError) -> Self {
        CountError::Algebra(e)
    }
}

/// Values `f_i(k) mod p` for `i = 1..=d`.
pub fn forms_mod_p(f: &StructuredF, k: &[i64], p: u64) -> Vec<u64> {
    let kp: Vec<u64> = k.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
    f.forms()
        .iter()
        .map(|fi| fi.eval_mod_p(&kp, p).unwrap())
        .collect()
}

/// Number of distinct `y` in `F_p` with `F(y, k) = 0`; always at most `md`.
pub fn nu_p(f: &StructuredF, k: &[i64], p: u64) -> u32 {
    assert_eq!(k.len(), f.box_dim(), "k must have length n");
    let cs = forms_mod_p(f, k, p);
    nu_p_from_forms(f, &cs, p)
}

/// Fiber count given precomputed `f_i(k) mod p` values.
pub fn nu_p_from_forms(f: &StructuredF, cs: &[u64], p: u64) -> u32 {
    let m = f.m();
    let mut count = 0;
    for y in 0..p {
        let t = mod_pow(y, m as u64, p);
        // Horner in t: t^d + c_1 t^{d-1} + ... + c_d
        let mut acc = 1u64;
        for &c in cs {
            acc = (mulmod(acc, t, p) + c) % p;
        }
        if acc == 0 {
            count += 1;
        }
    }
    count
}

/// The full table of `nu_p` over `F_p^n`, row-major: entry for `a` sits at
/// index `a_1 p^{n-1} + ... + a_n`. This is the input array of the bulk
/// transform and the lookup table behind the pairwise sieve terms.
pub fn nu_array(f: &StructuredF, p: u64) -> Vec<u32> {
    use crate::algebra::smallfield::{make_pow_tables, set_coord, CompiledPoly, SmallField};
    let n = f.box_dim();
    let desc = FieldDesc::prime(p).unwrap();
    let sf = SmallField::new(&desc);
    let compiled: Vec<CompiledPoly> = f
        .forms()
        .iter()
        .map(|fi| CompiledPoly::compile(fi, &sf))
        .collect();
    let mut max_deg = vec![0u32; n];
    for c in &compiled {
        for (v, &d) in c.max_deg.iter().enumerate() {
            max_deg[v] = max_deg[v].max(d);
        }
    }
    // y^m for all y, reused across every fiber
    let ym: Vec<u64> = (0..p).map(|y| mod_pow(y, f.m() as u64, p)).collect();
    let total = (p as usize).pow(n as u32);
    let mut out = vec![0u32; total];
    let mut pows = make_pow_tables(&sf, &max_deg);
    for v in 0..n {
        set_coord(&sf, &mut pows, v, sf.zero());
    }
    let mut a = vec![0u64; n];
    let mut cs = vec![0u64; compiled.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        for (ci, c) in compiled.iter().enumerate() {
            cs[ci] = c.eval(&sf, &pows);
        }
        let mut count = 0u32;
        for &t in &ym {
            let mut acc = 1u64;
            for &c in &cs {
                acc = (mulmod(acc, t, p) + c) % p;
            }
            if acc == 0 {
                count += 1;
            }
        }
        *slot = count;
        // odometer over a, last coordinate fastest (row-major)
        if idx + 1 < total {
            let mut v = n;
            loop {
                v -= 1;
                a[v] += 1;
                if a[v] < p {
                    set_coord(&sf, &mut pows, v, sf.from_base(a[v]));
                    break;
                }
                a[v] = 0;
                set_coord(&sf, &mut pows, v, sf.zero());
            }
        }
    }
    out
}

/// Coefficients of `F(Y, x)` as a univariate in `Y` (ascending, length
/// `md + 1`, exact integers).
pub fn y_coefficients(f: &StructuredF, x: &[i64]) -> Vec<BigInt> {
    let md = f.y_degree() as usize;
    let m = f.m() as usize;
    let d = f.d() as usize;
    let mut coeffs = vec![BigInt::zero(); md + 1];
    coeffs[md] = BigInt::from(1);
    for i in 1..=d {
        coeffs[m * (d - i)] += f.form(i as u32).eval_i64(x).unwrap();
    }
    coeffs
}

fn eval_univariate(coeffs: &[BigInt], y: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * y + c;
    }
    acc
}

/// All distinct integer roots of `F(Y, x)`, ascending.
///
/// `F` is monic in `Y`, so a nonzero integer root divides the lowest nonzero
/// coefficient; `y = 0` is a root exactly when `f_d(x) = 0`.
pub fn integer_roots_y(f: &StructuredF, x: &[i64]) -> Vec<i64> {
    let coeffs = y_coefficients(f, x);
    let v = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if v > 0 {
        roots.push(0);
    }
    let tail = &coeffs[v..];
    if tail.len() > 1 {
        let c0 = tail[0].abs();
        let c0 = c0
            .to_u64()
            .expect("constant term exceeds u64; box too large for divisor search");
        for t in divisors(c0) {
            for y in [t as i64, -(t as i64)] {
                if eval_univariate(tail, &BigInt::from(y)).is_zero() {
                    roots.push(y);
                }
            }
        }
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

fn divisors(n: u64) -> Vec<u64> {
    debug_assert!(n > 0);
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out
}

/// Does `F(Y, x) = 0` have an integer solution?
pub fn solvable(f: &StructuredF, x: &[i64]) -> bool {
    !integer_roots_y(f, x).is_empty()
}

/// Exact `N(F, B)`: lattice points of the box whose fiber has an integer
/// point.
pub fn count_n(f: &StructuredF, bx: &BoxSpec) -> u64 {
    assert_eq!(bx.n, f.box_dim());
    let mut count = 0;
    bx.for_each(|x| {
        if solvable(f, x) {
            count += 1;
        }
    });
    count
}

/// Oracle route for `count_n`: exhaustive scan of `y` up to the Cauchy bound
/// `1 + max |coeff|` instead of the divisor search.
pub fn count_n_by_scan(f: &StructuredF, bx: &BoxSpec) -> u64 {
    assert_eq!(bx.n, f.box_dim());
    let mut count = 0;
    bx.for_each(|x| {
        let coeffs = y_coefficients(f, x);
        let bound = coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap()
            .to_i64()
            .expect("Cauchy bound exceeds i64")
            + 1;
        let mut found = false;
        let mut y = -bound;
        while y <= bound {
            if eval_univariate(&coeffs, &BigInt::from(y)).is_zero() {
                found = true;
                break;
            }
            y += 1;
        }
        if found {
            count += 1;
        }
    });
    count
}

/// All integer solutions `(y, x)` with `x` in the box, in lexicographic `x`
/// order then ascending `y` (deterministic row order for matrices built on
/// top of this list).
pub fn solutions_in_box(f: &StructuredF, bx: &BoxSpec) -> Vec<(i64, Vec<i64>)> {
    let mut out = Vec::new();
    bx.for_each(|x| {
        for y in integer_roots_y(f, x) {
            out.push((y, x.to_vec()));
        }
    });
    out
}

/// Smoothed count `S(F, B)`: sum of the weight over solvable fibers, with a
/// compensated-summation error bound. Dominate-from-above holds exactly:
/// the weight is 1 on the inner box, so `S >= N`.
pub fn count_s(f: &StructuredF, bx: &BoxSpec, w: &SmoothWeightSpec) -> (f64, f64) {
    assert_eq!(bx.n, f.box_dim());
    let support = BoxSpec::new(w.support_halfwidth_int(), bx.n);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_accum = 0.0f64;
    support.for_each(|k| {
        if solvable(f, k) {
            let xs: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            let val = w.eval(&xs);
            if val != 0.0 {
                // Kahan step
                let t = val - comp;
                let s = sum + t;
                comp = (s - sum) - t;
                sum = s;
                abs_accum += val.abs();
            }
        }
    });
    (sum, abs_accum * f64::EPSILON * 4.0)
}

/// One representative per projective common zero, normalized so the first
/// nonzero coordinate is 1, enumerated chart by chart.
pub fn projective_points(
    polys: &[SparsePoly],
    field: &FieldDesc,
) -> Result<Vec<Vec<FieldElem>>, CountError> {
    let nv = match polys.first() {
        Some(p0) => p0.num_vars(),
        None => return Err(CountError::ZeroPolynomial),
    };
    for p in polys {
        if p.homogeneous_degree().is_none() {
            return Err(CountError::NonHomogeneous);
        }
    }
    let q = field.order();
    let mut out = Vec::new();
    for chart in 0..nv {
        let free = nv - chart - 1;
        let total = q.checked_pow(free as u32).expect("desk-scale enumeration");
        for idx in 0..total {
            let mut point = vec![field.zero(); nv];
            point[chart] = field.one();
            let mut rem = idx;
            for v in 0..free {
                point[chart + 1 + v] = field.elem_from_index(rem % q);
                rem /= q;
            }
            let mut ok = true;
            for p in polys {
                if !field.is_zero(&crate::algebra::poly_eval(p, &point, field)?) {
                    ok = false;
                    break;
                }
            }
            if ok {
                out.push(point);
            }
        }
    }
    Ok(out)
}

/// All of `P^{nv-1}(F_q)` in normalized representatives.
pub fn projective_space(nv: usize, field: &FieldDesc) -> Vec<Vec<FieldElem>> {
    let q = field.order();
    let mut out = Vec::new();
    for chart in 0..nv {
        let free = nv - chart - 1;
        let total = q.pow(free as u32);
        for idx in 0..total {
            let mut point = vec![field.zero(); nv];
            point[chart] = field.one();
            let mut rem = idx;
            for v in 0..free {
                point[chart + 1 + v] = field.elem_from_index(rem % q);
                rem /= q;
            }
            out.push(point);
        }
    }
    out
}

/// Exact number of integer zeros of a nonzero polynomial in the box.
pub fn schwartz_zippel_count(f: &SparsePoly, bx: &BoxSpec) -> Result<u64, CountError> {
    if f.is_zero() {
        return Err(CountError::ZeroPolynomial);
    }
    assert_eq!(bx.n, f.num_vars());
    let mut count = 0;
    bx.for_each(|x| {
        if f.eval_i64(x).unwrap().is_zero() {
            count += 1;
        }
    });
    Ok(count)
}

/// Number of distinct prime divisors of a nonzero integer.
pub fn omega(n: i64) -> Result<u32, CountError> {
    if n == 0 {
        return Err(CountError::ZeroArgument);
    }
    Ok(crate::algebra::prime_divisors(n.unsigned_abs()).len() as u32)
}

pub fn omega_big(n: &BigInt) -> Result<u32, CountError> {
    if n.is_zero() {
        return Err(CountError::ZeroArgument);
    }
    let v = n
        .abs()
        .to_u64()
        .expect("omega operand exceeds u64 at desk scale");
    Ok(crate::algebra::prime_divisors(v).len() as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn nu_p_examples() {
        let fa = fixtures::f_a();
        assert_eq!(nu_p(&fa, &[1, 0, 0], 5), 2); // y = 1, 4
        assert_eq!(nu_p(&fa, &[0, 0, 0], 7), 1); // only y = 0
        assert_eq!(nu_p(&fa, &[1, 1, 1], 5), 0); // 3 is a non-residue mod 5
    }

    #[test]
    fn nu_p_bounded_by_md() {
        for f in [fixtures::f_a(), fixtures::f_b(), fixtures::f_c()] {
            let md = f.y_degree();
            for p in [3u64, 5, 7, 11, 13] {
                let bx = BoxSpec::new(2, f.box_dim());
                bx.for_each(|k| {
                    assert!(nu_p(&f, k, p) <= md);
                });
            }
        }
    }

    #[test]
    fn count_n_examples() {
        let fa = fixtures::f_a();
        assert_eq!(count_n(&fa, &BoxSpec::new(0, 3)), 1);
        assert_eq!(count_n(&fa, &BoxSpec::new(1, 3)), 7);
        // 1 + 6 + 6 + 24 from square sums 0, 1, 4, 9
        assert_eq!(count_n(&fa, &BoxSpec::new(2, 3)), 37);
    }

    #[test]
    fn smoothed_count_dominates() {
        // the weight is 1 on the inner box, so S covers every counted fiber
        let fa = fixtures::f_a();
        let w = crate::sieve::SmoothWeightSpec::new(2.0, 8);
        let (s, err) = count_s(&fa, &BoxSpec::new(2, 3), &w);
        assert!(s + err >= 37.0);
    }

    #[test]
    fn divisor_route_matches_scan() {
        for f in [
            fixtures::f_a(),
            fixtures::f_b(),
            fixtures::f_c(),
            fixtures::f_d(),
        ] {
            for b in 0..=3 {
                let bx = BoxSpec::new(b, f.box_dim());
                assert_eq!(count_n(&f, &bx), count_n_by_scan(&f, &bx), "B={b}");
            }
        }
    }

    #[test]
    fn roots_are_roots() {
        let fb = fixtures::f_b();
        let bx = BoxSpec::new(2, 3);
        bx.for_each(|x| {
            for y in integer_roots_y(&fb, x) {
                let coeffs = y_coefficients(&fb, x);
                assert!(eval_univariate(&coeffs, &BigInt::from(y)).is_zero());
            }
        });
    }

    #[test]
    fn schwartz_zippel_examples() {
        let v2 = ["X1", "X2"];
        let x1 = SparsePoly::variable(&v2, "X1");
        assert_eq!(schwartz_zippel_count(&x1, &BoxSpec::new(3, 2)).unwrap(), 7);
        let sum_sq =
            SparsePoly::monomial(&v2, 1, &[2, 0]).add(&SparsePoly::monomial(&v2, 1, &[0, 2]));
        assert_eq!(
            schwartz_zippel_count(&sum_sq, &BoxSpec::new(5, 2)).unwrap(),
            1
        );
        let x1x2 = SparsePoly::monomial(&v2, 1, &[1, 1]);
        assert_eq!(
            schwartz_zippel_count(&x1x2, &BoxSpec::new(2, 2)).unwrap(),
            9
        );
        assert!(schwartz_zippel_count(&SparsePoly::zero(&v2), &BoxSpec::new(2, 2)).is_err());
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(12).unwrap(), 2);
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(30).unwrap(), 3);
        assert_eq!(omega(-30).unwrap(), 3);
        assert!(omega(0).is_err());
    }

    #[test]
    fn projective_point_examples() {
        let f3 = FieldDesc::prime(3).unwrap();
        let v = ["Z", "X1"];
        let conic =
            SparsePoly::monomial(&v, 1, &[2, 0]).add(&SparsePoly::monomial(&v, -1, &[0, 2]));
        let pts = projective_points(&[conic], &f3).unwrap();
        assert_eq!(pts.len(), 2);
        // all of P^1(F_3)
        assert_eq!(projective_space(2, &f3).len(), 4);
        // no common zero
        let x1 = SparsePoly::variable(&v, "X1");
        let z = SparsePoly::variable(&v, "Z");
        assert!(projective_points(&[z, x1], &f3).unwrap().is_empty());
        // non-homogeneous input rejected
        let mixed = SparsePoly::monomial(&v, 1, &[2, 0]).add(&SparsePoly::monomial(&v, 1, &[0, 1]));
        assert!(matches!(
            projective_points(&[mixed], &f3),
            Err(CountError::NonHomogeneous)
        ));
    }
}
