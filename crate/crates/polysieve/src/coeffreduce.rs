//! Coefficient reduction: build the solution matrix over the monomial set,
//! take its exact rank, and either bound the coefficient vector through the
//! cofactor null vector or produce a secondary curve whose zero set covers
//! every solvable fiber.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{sylvester_resultant_y, SparsePoly};
use crate::counting::{schwartz_zippel_count, solutions_in_box, BoxSpec};
use crate::structured::StructuredF;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReduceError {
    /// Every null-space vector was proportional to the coefficient vector
    /// even though the rank left room; inconsistent input data.
    NoIndependentVector,
    /// The resultant of the instance against the secondary polynomial
    /// vanished identically (the hypersurface is reducible).
    ResultantVanishes,
}

impl fmt::Display for ReduceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReduceError::NoIndependentVector => {
                write!(
                    f,
                    "no null-space vector independent of the coefficient vector"
                )
            }
            ReduceError::ResultantVanishes => write!(f, "secondary resultant is identically zero"),
        }
    }
}

impl std::error::Error for ReduceError {}

/// The monomials `Y^{d_Y} X_1^{d_1} ... X_n^{d_n}` with
/// `d_Y e + sum d_i = D e`, ordered by descending `d_Y` then ascending
/// exponent vector so the `Y^D` slot comes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialSet {
    pub cap_d: u32,
    pub e: u32,
    pub n: u32,
    /// Each entry is `(d_Y, d_1..d_n)`, length `n + 1`.
    pub monomials: Vec<Vec<u32>>,
}

pub fn monomial_set(cap_d: u32, e: u32, n: u32) -> MonomialSet {
    assert!(cap_d >= 1 && e >= 1 && n >= 1);
    let target = cap_d * e;
    let mut monomials = Vec::new();
    for d_y in (0..=cap_d).rev() {
        let rest = target - d_y * e;
        let mut exps = vec![0u32; n as usize];
        compositions(rest, 0, &mut exps, &mut |x| {
            let mut m = Vec::with_capacity(n as usize + 1);
            m.push(d_y);
            m.extend_from_slice(x);
            monomials.push(m);
        });
    }
    MonomialSet {
        cap_d,
        e,
        n,
        monomials,
    }
}

fn compositions(total: u32, idx: usize, exps: &mut Vec<u32>, out: &mut impl FnMut(&[u32])) {
    if idx + 1 == exps.len() {
        exps[idx] = total;
        out(exps);
        return;
    }
    for v in 0..=total {
        exps[idx] = v;
        compositions(total - v, idx + 1, exps, out);
    }
}

impl MonomialSet {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Evaluate one monomial at an integer point `(y, x)`.
    pub fn eval(&self, mono: &[u32], y: i64, x: &[i64]) -> BigInt {
        let mut acc = BigInt::from(y).pow(mono[0]);
        for (i, &e) in mono[1..].iter().enumerate() {
            acc *= BigInt::from(x[i]).pow(e);
        }
        acc
    }

    /// The coefficient vector of `F` against this monomial set (leading
    /// `Y^{md}` entry 1).
    pub fn coefficient_vector(&self, f: &StructuredF) -> Vec<BigInt> {
        let poly = f.as_poly_y();
        let mut a = vec![BigInt::zero(); self.len()];
        for (exps, c) in poly.terms() {
            let pos = self
                .monomials
                .iter()
                .position(|m| m[..] == exps[..])
                .expect("instance monomial outside the degree-balanced set");
            a[pos] = c.clone();
        }
        a
    }
}

/// `N x |E|` matrix of monomial evaluations, arbitrary-precision entries.
pub fn solution_matrix(solutions: &[(i64, Vec<i64>)], eset: &MonomialSet) -> Vec<Vec<BigInt>> {
    solutions
        .iter()
        .map(|(y, x)| eset.monomials.iter().map(|m| eset.eval(m, *y, x)).collect())
        .collect()
}

/// Echelon data from fraction-free elimination: the exact rank and the
/// indices of the original rows that carry the pivots.
struct Echelon {
    rank: usize,
    pivot_rows: Vec<usize>,
}

fn fraction_free_echelon(mat: &[Vec<BigInt>]) -> Echelon {
    let rows = mat.len();
    if rows == 0 {
        return Echelon {
            rank: 0,
            pivot_rows: Vec::new(),
        };
    }
    let cols = mat[0].len();
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut row_of: Vec<usize> = (0..rows).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut pivot_rows = Vec::new();
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        row_of.swap(rank, pr);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                debug_assert!((&num % &prev).is_zero());
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        pivot_rows.push(row_of[rank]);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    Echelon { rank, pivot_rows }
}

/// Exact rank; when the rank is exactly one below the column count, also the
/// cofactor-built integer null vector (content-reduced, `C b = 0` verified).
pub fn rank_and_nullvector(mat: &[Vec<BigInt>]) -> (usize, Option<Vec<BigInt>>) {
    let ech = fraction_free_echelon(mat);
    let cols = if mat.is_empty() { 0 } else { mat[0].len() };
    if cols == 0 || ech.rank != cols - 1 {
        return (ech.rank, None);
    }
    // independent rows, one fewer than the column count
    let sub: Vec<&Vec<BigInt>> = ech.pivot_rows.iter().map(|&r| &mat[r]).collect();
    let mut b = Vec::with_capacity(cols);
    for j in 0..cols {
        let minor: Vec<Vec<BigInt>> = sub
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let det = crate::algebra::bareiss_det(&minor);
        b.push(if j % 2 == 0 { det } else { -det });
    }
    let content = b.iter().fold(BigInt::zero(), |acc, v| acc.gcd(&v.abs()));
    if content > BigInt::one() {
        for v in b.iter_mut() {
            *v = &*v / &content;
        }
    }
    debug_assert!(b.iter().any(|v| !v.is_zero()));
    for row in mat {
        let dot: BigInt = row.iter().zip(&b).map(|(r, v)| r * v).sum();
        assert!(dot.is_zero(), "cofactor vector must annihilate every row");
    }
    (ech.rank, Some(b))
}

/// Integer basis of the null space via fraction-free Gauss-Jordan; one
/// vector per free column, in column order.
pub fn nullspace_basis(mat: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    if rows == 0 {
        // everything is free
        return (0..cols)
            .map(|j| {
                let mut v = vec![BigInt::zero(); cols];
                v[j] = BigInt::one();
                v
            })
            .collect();
    }
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        for r in 0..rows {
            if r == rank {
                continue;
            }
            for c in 0..cols {
                if c == col {
                    continue;
                }
                let num = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                debug_assert!((&num % &prev).is_zero());
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // after full elimination each pivot row reads d * x_pivot + sum over free
    // columns; null vector for free column j: x_j = d, x_pivot = -entry
    let mut basis = Vec::new();
    for j in 0..cols {
        if pivot_cols.contains(&j) {
            continue;
        }
        let mut v = vec![BigInt::zero(); cols];
        v[j] = prev.clone();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            // row r: m[r][pc] * x_pc + m[r][j] * x_j = 0, and after
            // Gauss-Jordan m[r][pc] = prev for every pivot row
            debug_assert_eq!(m[r][pc].abs(), prev.abs());
            let scale = &v[j] / &m[r][pc];
            v[pc] = -(&m[r][j] * &scale);
        }
        let content = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(&x.abs()));
        if content > BigInt::one() {
            for x in v.iter_mut() {
                *x = &*x / &content;
            }
        }
        basis.push(v);
    }
    basis
}

#[derive(Debug, Clone)]
pub enum ReduceDecision {
    /// The coefficient vector is pinned by the data: either trivially
    /// (fewer solutions than monomials) or through the cofactor null vector,
    /// which must be proportional to the coefficients.
    CoeffBounded {
        /// `None` in the trivial small-solution-count branch.
        null_vector: Option<Vec<BigInt>>,
        proportional_to_coeffs: bool,
        /// Hadamard-style bound `(2B)^{De(|E|-1)} (|E|-1)!`.
        height_bound: BigInt,
        bound_ok: bool,
    },
    /// A second polynomial vanishing on every recorded solution, together
    /// with the eliminant in `X` and its zero count in the box.
    SecondaryCurve {
        h: SparsePoly,
        r: SparsePoly,
        zero_count: u64,
    },
}

/// Run the reduction dichotomy for an instance over the box `[-B, B]^n`.
pub fn reduce_decision(f: &StructuredF, b: i64) -> Result<ReduceDecision, ReduceError> {
    let bx = BoxSpec::new(b, f.box_dim());
    let solutions = solutions_in_box(f, &bx);
    let eset = monomial_set(f.y_degree(), f.e(), f.n());
    let a = eset.coefficient_vector(f);
    let height_bound = hadamard_bound(b, &eset);

    if solutions.len() < eset.len() {
        return Ok(ReduceDecision::CoeffBounded {
            null_vector: None,
            proportional_to_coeffs: true,
            height_bound,
            bound_ok: true,
        });
    }
    let c = solution_matrix(&solutions, &eset);
    let (rank, cof) = rank_and_nullvector(&c);
    assert!(
        rank < eset.len(),
        "coefficient vector lies in the null space, full rank impossible"
    );
    if rank == eset.len() - 1 {
        let bvec = cof.expect("rank = |E| - 1 yields the cofactor vector");
        let proportional = is_proportional(&bvec, &a);
        let bmax = bvec.iter().map(|v| v.abs()).max().unwrap();
        let amax = a.iter().map(|v| v.abs()).max().unwrap();
        let bound_ok = amax <= bmax && bmax <= height_bound;
        return Ok(ReduceDecision::CoeffBounded {
            null_vector: Some(bvec),
            proportional_to_coeffs: proportional,
            height_bound,
            bound_ok,
        });
    }
    // rank <= |E| - 2: a second, independent null vector exists
    let basis = nullspace_basis(&c);
    let bvec = basis
        .into_iter()
        .find(|v| !is_proportional(v, &a))
        .ok_or(ReduceError::NoIndependentVector)?;
    let h = poly_from_vector(&bvec, &eset);
    let fpoly = f.as_poly_y();
    let r = if h.degree_in("Y").unwrap() > 0 {
        sylvester_resultant_y(&fpoly, &h).expect("both positive degree in Y")
    } else {
        h.drop_unused_var("Y").unwrap()
    };
    if r.is_zero() {
        return Err(ReduceError::ResultantVanishes);
    }
    for (y, x) in &solutions {
        let mut pt = vec![*y];
        pt.extend_from_slice(x);
        assert!(
            h.eval_i64(&pt).unwrap().is_zero(),
            "secondary polynomial must vanish on every recorded solution"
        );
    }
    let zero_count = schwartz_zippel_count(&r, &bx).expect("nonzero resultant");
    Ok(ReduceDecision::SecondaryCurve { h, r, zero_count })
}

fn hadamard_bound(b: i64, eset: &MonomialSet) -> BigInt {
    let entry = BigInt::from(2 * b.max(1)).pow(eset.cap_d * eset.e);
    let k = eset.len() as u32 - 1;
    let mut bound = entry.pow(k);
    for i in 1..=k {
        bound *= BigInt::from(i);
    }
    bound
}

fn is_proportional(u: &[BigInt], v: &[BigInt]) -> bool {
    // cross-multiplication test, valid for any pair of vectors
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if &u[i] * &v[j] != &u[j] * &v[i] {
                return false;
            }
        }
    }
    true
}

fn poly_from_vector(b: &[BigInt], eset: &MonomialSet) -> SparsePoly {
    let mut names: Vec<String> = vec!["Y".to_string()];
    names.extend((1..=eset.n).map(|i| format!("X{i}")));
    let var_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut h = SparsePoly::zero(&var_refs);
    for (coef, mono) in b.iter().zip(&eset.monomials) {
        if !coef.is_zero() {
            h = h.add(&SparsePoly::monomial(&var_refs, coef.clone(), mono));
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prng::SplitMix64;

    #[test]
    fn monomial_set_sizes() {
        assert_eq!(monomial_set(2, 1, 3).len(), 10);
        // d_Y = 2: 1; d_Y = 1: degree-2 monomials in 3 vars = 6;
        // d_Y = 0: degree-4 monomials in 3 vars = 15
        assert_eq!(monomial_set(2, 2, 3).len(), 22);
        for (d, e, n) in [(2u32, 1u32, 3u32), (2, 2, 3), (3, 1, 2), (4, 2, 2)] {
            let set = monomial_set(d, e, n);
            assert!(set.len() as u64 <= ((d * e) as u64).pow(n + 1).max(set.len() as u64));
            // every monomial satisfies the weighted degree equation
            for m in &set.monomials {
                assert_eq!(m[0] * e + m[1..].iter().sum::<u32>(), d * e);
            }
        }
        // the (De)^{n+1} cardinality bound holds where it applies
        assert!(monomial_set(2, 2, 3).len() as u64 <= 4u64.pow(4));
    }

    #[test]
    fn structured_coefficients_annihilated() {
        // C a = 0 for the true coefficient vector
        let fa = fixtures::f_a();
        let eset = monomial_set(fa.y_degree(), fa.e(), fa.n());
        let a = eset.coefficient_vector(&fa);
        assert_eq!(a[0], BigInt::one()); // Y^{md} leads
        let sols = solutions_in_box(&fa, &BoxSpec::new(2, 3));
        assert_eq!(sols.len(), 73);
        // the origin row evaluates every positive-degree monomial to zero
        let origin = solution_matrix(&[(0, vec![0, 0, 0])], &eset);
        assert!(origin[0].iter().all(|v| v.is_zero()));
        let c = solution_matrix(&sols, &eset);
        for row in &c {
            let dot: BigInt = row.iter().zip(&a).map(|(r, v)| r * v).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn rank_examples() {
        let id3: Vec<Vec<BigInt>> = (0..3)
            .map(|i| (0..3).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        assert_eq!(rank_and_nullvector(&id3), (3, None));

        let m: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(1), BigInt::from(2)],
            vec![BigInt::from(2), BigInt::from(4)],
        ];
        let (rank, b) = rank_and_nullvector(&m);
        assert_eq!(rank, 1);
        let b = b.unwrap();
        // (2, -1) up to sign
        assert_eq!((b[0].clone() * 1 + b[1].clone() * 2), BigInt::zero());
    }

    #[test]
    fn cofactor_vector_on_random_rank_deficient() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..20 {
            // build a matrix with known null vector by making one column a
            // combination of the others
            let rows = 6;
            let cols = 4;
            let mut m: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| {
                    (0..cols - 1)
                        .map(|_| BigInt::from(rng.range_i64(-5, 5)))
                        .collect()
                })
                .collect();
            let c0 = rng.range_i64(-3, 3);
            let c1 = rng.range_i64(-3, 3);
            let c2 = rng.range_i64(-3, 3);
            for row in m.iter_mut() {
                let extra = &row[0] * c0 + &row[1] * c1 + &row[2] * c2;
                row.push(extra);
            }
            let (rank, b) = rank_and_nullvector(&m);
            if rank == cols - 1 {
                let b = b.unwrap();
                for row in &m {
                    let dot: BigInt = row.iter().zip(&b).map(|(r, v)| r * v).sum();
                    assert!(dot.is_zero());
                }
            }
        }
    }

    #[test]
    fn nullspace_annihilates() {
        let mut rng = SplitMix64::new(123);
        for _ in 0..20 {
            let rows = 3;
            let cols = 6;
            let m: Vec<Vec<BigInt>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| BigInt::from(rng.range_i64(-4, 4)))
                        .collect()
                })
                .collect();
            let basis = nullspace_basis(&m);
            assert!(basis.len() >= cols - rows);
            for v in &basis {
                assert!(v.iter().any(|x| !x.is_zero()));
                for row in &m {
                    let dot: BigInt = row.iter().zip(v).map(|(r, x)| r * x).sum();
                    assert!(dot.is_zero());
                }
            }
        }
    }

    #[test]
    fn reduce_decision_f_a() {
        let fa = fixtures::f_a();
        match reduce_decision(&fa, 2).unwrap() {
            ReduceDecision::CoeffBounded {
                null_vector,
                proportional_to_coeffs,
                bound_ok,
                ..
            } => {
                assert!(null_vector.is_some());
                assert!(proportional_to_coeffs);
                assert!(bound_ok);
            }
            ReduceDecision::SecondaryCurve { h, r, zero_count } => {
                assert!(!r.is_zero());
                assert!(!h.is_zero());
                let c = 4u64; // recorded constant against C B^{n-1}
                assert!(zero_count <= c * 4);
            }
        }
    }

    /// Force the low-rank branch with a synthetic solution list confined to
    /// a line, and check the secondary polynomial and eliminant semantics.
    #[test]
    fn secondary_curve_machinery() {
        use crate::algebra::sylvester_resultant_y;
        let fa = fixtures::f_a(); // Y^2 - (X1^2 + X2^2 + X3^2)
        let eset = monomial_set(fa.y_degree(), fa.e(), fa.n());
        let a = eset.coefficient_vector(&fa);
        // points (t, t, 0, 0) solve F and lie on many extra quadrics
        let solutions: Vec<(i64, Vec<i64>)> = (-3..=3).map(|t| (t, vec![t, 0, 0])).collect();
        let c = solution_matrix(&solutions, &eset);
        let ech_rank = rank_and_nullvector(&c).0;
        assert!(ech_rank <= eset.len() - 2, "rank {ech_rank}");
        let basis = nullspace_basis(&c);
        let b = basis.iter().find(|v| !is_proportional(v, &a)).unwrap();
        let h = poly_from_vector(b, &eset);
        for (y, x) in &solutions {
            let mut pt = vec![*y];
            pt.extend_from_slice(x);
            assert!(h.eval_i64(&pt).unwrap().is_zero());
        }
        let r = if h.degree_in("Y").unwrap() > 0 {
            sylvester_resultant_y(&fa.as_poly_y(), &h).unwrap()
        } else {
            h.drop_unused_var("Y").unwrap()
        };
        assert!(!r.is_zero());
        // vanishing of the eliminant picks up exactly the fibers where the
        // two polynomials share a root, checked over a small box
        let desc = crate::algebra::FieldDesc::extension(5, 2).unwrap();
        let fy = fa.as_poly_y();
        for x1 in -2i64..=2 {
            for x2 in -2i64..=2 {
                for x3 in -2i64..=2 {
                    let x = [x1, x2, x3];
                    let rv = r.eval_i64(&x).unwrap();
                    let share_integer =
                        crate::counting::integer_roots_y(&fa, &x)
                            .into_iter()
                            .any(|y| {
                                let mut pt = vec![y];
                                pt.extend_from_slice(&x);
                                h.eval_i64(&pt).unwrap().is_zero()
                            });
                    if share_integer {
                        assert!(rv.is_zero(), "shared integer root at {x:?}");
                    }
                    // mod-5 cross-check by root enumeration over F_25
                    let rv5 = crate::algebra::reduce_bigint(&rv, 5);
                    let mut share5 = false;
                    for yel in desc.elements() {
                        let pt: Vec<_> = std::iter::once(yel)
                            .chain(x.iter().map(|&c| desc.from_i64(c)))
                            .collect();
                        if desc.is_zero(&crate::algebra::poly_eval(&fy, &pt, &desc).unwrap())
                            && desc.is_zero(&crate::algebra::poly_eval(&h, &pt, &desc).unwrap())
                        {
                            share5 = true;
                            break;
                        }
                    }
                    if share5 {
                        assert_eq!(rv5, 0, "shared root mod 5 at {x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn reduce_decision_trivial_when_box_tiny() {
        // B = 0: only the origin solves, far fewer solutions than monomials
        let fa = fixtures::f_a();
        match reduce_decision(&fa, 0).unwrap() {
            ReduceDecision::CoeffBounded { null_vector, .. } => assert!(null_vector.is_none()),
            _ => panic!("expected the trivial branch"),
        }
    }
}
