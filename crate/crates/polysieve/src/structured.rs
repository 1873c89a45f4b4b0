//! The structured polynomial `F(Y,X) = Y^{md} + Y^{m(d-1)} f_1 + ... + f_d`
//! with `deg f_i = m*e*i`, its validation, and good-reduction certification.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::smallfield::{make_pow_tables, set_coord, CompiledPoly, Packed, SmallField};
use crate::algebra::{is_prime, FieldDesc, FieldElem, SparsePoly};

/// Default bound on the residue degree searched for singular witnesses.
///
/// A heuristic cutoff: at desk-scale degrees, witnesses have so far always
/// appeared by degree 2. Certificates record the searched range rather than
/// claiming completeness.
pub const DEFAULT_K_MAX: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidateError {
    MNotAtLeastTwo,
    BadShape(String),
    DegreeMismatch {
        form: usize,
        expected: u32,
        found: u32,
    },
    ZeroLastForm,
    VariableCount {
        form: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for ValidateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidateError::MNotAtLeastTwo => write!(f, "m must be at least 2"),
            ValidateError::BadShape(s) => write!(f, "bad shape: {s}"),
            ValidateError::DegreeMismatch {
                form,
                expected,
                found,
            } => write!(
                f,
                "f_{form} must be homogeneous of degree {expected}, found degree {found}"
            ),
            ValidateError::ZeroLastForm => write!(f, "f_d must not be identically zero"),
            ValidateError::VariableCount {
                form,
                expected,
                found,
            } => write!(
                f,
                "f_{form} declares {found} variables, expected {expected}"
            ),
        }
    }
}

impl std::error::Error for ValidateError {}

/// A validated structured polynomial; the leading `Y^{md}` coefficient is 1
/// and never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredF {
    m: u32,
    d: u32,
    e: u32,
    n: u32,
    forms: Vec<SparsePoly>,
}

impl StructuredF {
    /// Check every shape invariant and build the instance.
    pub fn validate(
        m: u32,
        d: u32,
        e: u32,
        n: u32,
        forms: Vec<SparsePoly>,
    ) -> Result<StructuredF, ValidateError> {
        if m < 2 {
            return Err(ValidateError::MNotAtLeastTwo);
        }
        if d < 1 || e < 1 || n < 1 {
            return Err(ValidateError::BadShape(format!("d={d} e={e} n={n}")));
        }
        if forms.len() != d as usize {
            return Err(ValidateError::BadShape(format!(
                "expected {d} forms, got {}",
                forms.len()
            )));
        }
        for (i, f) in forms.iter().enumerate() {
            let idx = i + 1;
            if f.num_vars() != n as usize {
                return Err(ValidateError::VariableCount {
                    form: idx,
                    expected: n as usize,
                    found: f.num_vars(),
                });
            }
            let expected = m * e * idx as u32;
            match f.homogeneous_degree() {
                Some(deg) if f.is_zero() || deg == expected => {}
                Some(deg) => {
                    return Err(ValidateError::DegreeMismatch {
                        form: idx,
                        expected,
                        found: deg,
                    })
                }
                None => {
                    return Err(ValidateError::DegreeMismatch {
                        form: idx,
                        expected,
                        found: f.total_degree(),
                    })
                }
            }
        }
        if forms[d as usize - 1].is_zero() {
            return Err(ValidateError::ZeroLastForm);
        }
        Ok(StructuredF { m, d, e, n, forms })
    }

    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Total degree in Y.
    pub fn y_degree(&self) -> u32 {
        self.m * self.d
    }

    /// Degree of the unweighted form `F(Z^e, X)`.
    pub fn unweighted_degree(&self) -> u32 {
        self.m * self.d * self.e
    }

    /// `f_i` for `1 <= i <= d`.
    pub fn form(&self, i: u32) -> &SparsePoly {
        &self.forms[i as usize - 1]
    }

    pub fn forms(&self) -> &[SparsePoly] {
        &self.forms
    }

    /// `f_d`, the constant-in-Y form.
    pub fn last_form(&self) -> &SparsePoly {
        &self.forms[self.d as usize - 1]
    }

    pub fn x_vars(&self) -> Vec<String> {
        (1..=self.n).map(|i| format!("X{i}")).collect()
    }

    /// Height of the full coefficient data (leading 1 included).
    pub fn height(&self) -> BigInt {
        let mut h = BigInt::one();
        for f in &self.forms {
            h = h.max(f.height());
        }
        h
    }

    /// `F` as a sparse polynomial in `(Y, X1..Xn)`.
    pub fn as_poly_y(&self) -> SparsePoly {
        self.build_poly("Y", 1)
    }

    /// The homogeneous polynomial `F(Z^e, X)` in `(Z, X1..Xn)`.
    pub fn unweighted_form(&self) -> SparsePoly {
        self.build_poly("Z", self.e)
    }

    fn build_poly(&self, first: &str, stretch: u32) -> SparsePoly {
        let mut names: Vec<String> = vec![first.to_string()];
        names.extend(self.x_vars());
        let vars: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let nv = vars.len();
        let mut exps = vec![0u32; nv];
        exps[0] = self.m * self.d * stretch;
        let mut acc = SparsePoly::monomial(&vars, 1, &exps);
        for (i, f) in self.forms.iter().enumerate() {
            let ypow = self.m * (self.d - (i as u32 + 1)) * stretch;
            for (e, c) in f.terms() {
                let mut e2 = vec![ypow];
                e2.extend_from_slice(e);
                acc = acc.add(&SparsePoly::monomial(&vars, c.clone(), &e2));
            }
        }
        acc
    }

    /// `F(Z^e, X)` together with its `n + 1` partials: the system that must
    /// have no projective common zero for good reduction.
    pub fn jacobian_system(&self) -> Vec<SparsePoly> {
        let u = self.unweighted_form();
        let mut sys = vec![u.clone()];
        sys.push(u.partial_derivative("Z").unwrap());
        for i in 1..=self.n {
            sys.push(u.partial_derivative(&format!("X{i}")).unwrap());
        }
        sys
    }

    /// Number of integer variables of the box (`n`).
    pub fn box_dim(&self) -> usize {
        self.n as usize
    }

    /// Serialize in the instance file format: header `m d e n`, then each
    /// form as a sparse-polynomial text block separated by blank lines.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {} {}\n", self.m, self.d, self.e, self.n);
        for f in &self.forms {
            s.push('\n');
            s.push_str(&f.to_text());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<StructuredF, String> {
        let mut lines = text.lines().map(|l| l.trim());
        let header = lines
            .by_ref()
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .ok_or("empty instance file")?;
        let nums: Result<Vec<u32>, _> = header.split_whitespace().map(|t| t.parse()).collect();
        let nums = nums.map_err(|_| format!("bad header `{header}`"))?;
        let [m, d, e, n] = nums[..] else {
            return Err(format!("header must be `m d e n`, got `{header}`"));
        };
        let rest: Vec<&str> = lines.collect();
        let mut blocks: Vec<String> = Vec::new();
        let mut cur = String::new();
        for l in rest {
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if l.starts_with("vars") && !cur.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
            cur.push_str(l);
            cur.push('\n');
        }
        if !cur.is_empty() {
            blocks.push(cur);
        }
        let forms: Result<Vec<SparsePoly>, _> =
            blocks.iter().map(|b| SparsePoly::from_text(b)).collect();
        let forms = forms.map_err(|e| e.to_string())?;
        StructuredF::validate(m, d, e, n, forms).map_err(|e| e.to_string())
    }
}

/// What `smoothness_mod_p` concluded and how.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodReductionCert {
    pub p: u64,
    /// Extension degrees examined (quadric determinant route is exact over
    /// the closure and reports the requested bound).
    pub k_searched: u32,
    pub method: CertMethod,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertMethod {
    /// Exact degeneracy test of the quadratic form (mde = 2, p odd).
    GramDeterminant,
    /// Projective point search over `F_{p^k}`, `k <= k_searched`.
    PointSearch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Smooth,
    /// A projective point (normalized, first nonzero coordinate 1) over
    /// `F_{p^k}` where the polynomial and every partial vanish.
    Singular {
        k: u32,
        point: Vec<FieldElem>,
    },
}

impl GoodReductionCert {
    pub fn is_smooth(&self) -> bool {
        matches!(self.verdict, Verdict::Smooth)
    }
}

/// Decide whether the reduction of `V(F(Z^e,X))` mod `p` is singular, by
/// direct singular-point search (or the exact Gram route for quadrics).
///
/// `p = 2` is allowed here (the search is well defined) but is excluded from
/// certification in [`smooth_over_c_certificate`] and from sieving sets.
pub fn smoothness_mod_p(f: &StructuredF, p: u64, k_max: u32) -> GoodReductionCert {
    assert!(is_prime(p), "p must be prime");
    if f.unweighted_degree() == 2 && p != 2 {
        let d = doubled_gram(&f.unweighted_form());
        let det = crate::algebra::bareiss_det(&d);
        if crate::algebra::reduce_bigint(&det, p) != 0 {
            return GoodReductionCert {
                p,
                k_searched: k_max,
                method: CertMethod::GramDeterminant,
                verdict: Verdict::Smooth,
            };
        }
        // degenerate: a radical vector over F_p is a singular point
        let point = gram_kernel_vector(&d, p).expect("degenerate form has a radical vector");
        let desc = FieldDesc::prime(p).unwrap();
        let elems: Vec<FieldElem> = point.iter().map(|&c| desc.from_u64(c)).collect();
        verify_witness(f, p, 1, &elems);
        return GoodReductionCert {
            p,
            k_searched: k_max,
            method: CertMethod::GramDeterminant,
            verdict: Verdict::Singular { k: 1, point: elems },
        };
    }
    let system = f.jacobian_system();
    for k in 1..=k_max {
        let desc = FieldDesc::extension(p, k).unwrap();
        let witness = if k <= 2 {
            let sf = SmallField::new(&desc);
            projective_common_zero(&system, &sf)
                .map(|pt| pt.iter().map(|&x| sf.to_elem(x)).collect::<Vec<_>>())
        } else {
            projective_common_zero_generic(&system, &desc)
        };
        if let Some(elems) = witness {
            verify_witness(f, p, k, &elems);
            return GoodReductionCert {
                p,
                k_searched: k,
                method: CertMethod::PointSearch,
                verdict: Verdict::Singular { k, point: elems },
            };
        }
    }
    GoodReductionCert {
        p,
        k_searched: k_max,
        method: CertMethod::PointSearch,
        verdict: Verdict::Smooth,
    }
}

fn verify_witness(f: &StructuredF, p: u64, k: u32, point: &[FieldElem]) {
    let desc = FieldDesc::extension(p, k).unwrap();
    for poly in f.jacobian_system() {
        let v = crate::algebra::poly_eval(&poly, point, &desc).unwrap();
        assert!(
            desc.is_zero(&v),
            "singular witness failed re-evaluation at p={p}, k={k}"
        );
    }
}

/// First normalized projective point where every polynomial vanishes, in
/// chart-then-coordinate enumeration order; `None` if there is none.
pub(crate) fn projective_common_zero(polys: &[SparsePoly], sf: &SmallField) -> Option<Vec<Packed>> {
    let nv = polys[0].num_vars();
    // cheap polynomials first; all must vanish anyway
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by_key(|&i| polys[i].num_terms());
    let compiled: Vec<CompiledPoly> = order
        .iter()
        .map(|&i| CompiledPoly::compile(&polys[i], sf))
        .collect();
    let mut max_deg = vec![0u32; nv];
    for c in &compiled {
        for (v, &d) in c.max_deg.iter().enumerate() {
            max_deg[v] = max_deg[v].max(d);
        }
    }
    let mut pows = make_pow_tables(sf, &max_deg);
    for chart in 0..nv {
        for (v, val) in (0..chart)
            .map(|v| (v, sf.zero()))
            .chain([(chart, sf.one())])
        {
            set_coord(sf, &mut pows, v, val);
        }
        let free = nv - chart - 1;
        if let Some(pt) = enumerate_chart(sf, &compiled, &mut pows, chart, free) {
            return Some(pt);
        }
    }
    None
}

fn enumerate_chart(
    sf: &SmallField,
    compiled: &[CompiledPoly],
    pows: &mut [Vec<Packed>],
    chart: usize,
    free: usize,
) -> Option<Vec<Packed>> {
    let nv = chart + 1 + free;
    let q = sf.q;
    let mut idxs = vec![0u64; free];
    for v in 0..free {
        set_coord(sf, pows, chart + 1 + v, sf.zero());
    }
    'point: loop {
        let mut ok = true;
        for c in compiled {
            if c.eval(sf, pows) != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            let mut pt = vec![sf.zero(); nv];
            pt[chart] = sf.one();
            for v in 0..free {
                pt[chart + 1 + v] = sf.unindex(idxs[v]);
            }
            return Some(pt);
        }
        // odometer increment, last coordinate fastest
        let mut v = free;
        loop {
            if v == 0 {
                break 'point;
            }
            v -= 1;
            idxs[v] += 1;
            if idxs[v] < q {
                set_coord(sf, pows, chart + 1 + v, sf.unindex(idxs[v]));
                break;
            }
            idxs[v] = 0;
            set_coord(sf, pows, chart + 1 + v, sf.zero());
        }
    }
    None
}

/// Slow fallback for extension degrees beyond the table engine (`k > 2`).
pub(crate) fn projective_common_zero_generic(
    polys: &[SparsePoly],
    desc: &FieldDesc,
) -> Option<Vec<FieldElem>> {
    let nv = polys[0].num_vars();
    let q = desc.order();
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by_key(|&i| polys[i].num_terms());
    for chart in 0..nv {
        let free = nv - chart - 1;
        let total = q.checked_pow(free as u32).expect("desk-scale chart");
        for idx in 0..total {
            let mut point = vec![desc.zero(); nv];
            point[chart] = desc.one();
            let mut rem = idx;
            for v in 0..free {
                point[chart + 1 + v] = desc.elem_from_index(rem % q);
                rem /= q;
            }
            if order.iter().all(|&i| {
                desc.is_zero(&crate::algebra::poly_eval(&polys[i], &point, desc).unwrap())
            }) {
                return Some(point);
            }
        }
    }
    None
}

/// Doubled Gram matrix of a quadratic form (integer entries for any integer
/// quadratic form; the factor 2 is harmless at odd p).
pub(crate) fn doubled_gram(q: &SparsePoly) -> Vec<Vec<BigInt>> {
    let nv = q.num_vars();
    assert_eq!(q.homogeneous_degree(), Some(2));
    let mut m = vec![vec![BigInt::from(0); nv]; nv];
    for (e, c) in q.terms() {
        let nz: Vec<usize> = (0..nv).filter(|&i| e[i] > 0).collect();
        match nz.len() {
            1 => {
                let i = nz[0];
                m[i][i] = c * BigInt::from(2);
            }
            2 => {
                let (i, j) = (nz[0], nz[1]);
                m[i][j] = c.clone();
                m[j][i] = c.clone();
            }
            _ => unreachable!("degree-2 form"),
        }
    }
    m
}

/// A nonzero kernel vector of a symmetric integer matrix mod p, if singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn gram_kernel_vector(m: &[Vec<BigInt>], p: u64) -> Option<Vec<u64>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| crate::algebra::reduce_bigint(c, p))
                .collect()
        })
        .collect();
    // Gauss-Jordan over F_p, tracking pivot columns
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if let Some(r) = (row..n).find(|&r| a[r][col] != 0) {
            a.swap(row, r);
            let inv = crate::algebra::mod_inv(a[row][col], p);
            for c in 0..n {
                a[row][c] = crate::algebra::mulmod(a[row][c], inv, p);
            }
            for r2 in 0..n {
                if r2 != row && a[r2][col] != 0 {
                    let f = a[r2][col];
                    for c in 0..n {
                        let sub = crate::algebra::mulmod(f, a[row][c], p);
                        a[r2][c] = (a[r2][c] + p - sub) % p;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
    }
    if row == n {
        return None;
    }
    let free = (0..n).find(|c| !pivots.contains(c)).unwrap();
    let mut v = vec![0u64; n];
    v[free] = 1;
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = (p - a[r][free]) % p;
    }
    Some(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyError {
    EmptyPrimeList,
    EvenPrime,
}

impl fmt::Display for CertifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyError::EmptyPrimeList => write!(f, "no trial primes supplied"),
            CertifyError::EvenPrime => write!(f, "trial primes must be odd"),
        }
    }
}

impl std::error::Error for CertifyError {}

/// One smooth reduction certifies smoothness over the complex numbers: if
/// the hypersurface were singular, every reduction would be singular. Returns
/// the first certifying prime, or `Ok(None)` when every trial prime reports
/// singular (inconclusive).
pub fn smooth_over_c_certificate(
    f: &StructuredF,
    trial_primes: &[u64],
    k_max: u32,
) -> Result<Option<u64>, CertifyError> {
    if trial_primes.is_empty() {
        return Err(CertifyError::EmptyPrimeList);
    }
    if trial_primes.contains(&2) {
        return Err(CertifyError::EvenPrime);
    }
    for &p in trial_primes {
        if smoothness_mod_p(f, p, k_max).is_smooth() {
            return Ok(Some(p));
        }
    }
    Ok(None)
}
