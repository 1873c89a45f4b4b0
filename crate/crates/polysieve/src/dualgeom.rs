//! Tangency witnesses, per-prime badness censuses, the dual degree formula,
//! and the exact dual form for quadrics.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::algebra::{FieldElem, SparsePoly};
use crate::structured::StructuredF;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualError {
    ZeroVector,
    NotAQuadric { degree: u32 },
    DegenerateForm,
    TooFewProbes { got: usize },
    BadReduction(u64),
}

impl fmt::Display for DualError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualError::ZeroVector => write!(f, "u must be nonzero"),
            DualError::NotAQuadric { degree } => {
                write!(f, "closed-form dual requires degree 2, found {degree}")
            }
            DualError::DegenerateForm => write!(f, "quadratic form is degenerate"),
            DualError::TooFewProbes { got } => {
                write!(f, "census needs at least 3 probe primes, got {got}")
            }
            DualError::BadReduction(p) => write!(f, "probe prime {p} has bad reduction"),
        }
    }
}

impl std::error::Error for DualError {}

/// A verified tangency: a projective point over `F_{p^k}` where the
/// hypersurface, the hyperplane, and every listed Jacobian minor vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TangencyWitness {
    pub u: Vec<i64>,
    pub p: u64,
    /// Residue degree of the witness point.
    pub k: u32,
    /// Coordinates `(z, x_1..x_n)`, normalized first nonzero coordinate 1.
    pub point: Vec<FieldElem>,
}

/// The `n + 2` polynomials whose common projective zero detects tangency of
/// the hyperplane `<X, u> = 0` against `V(F(Z^e, X))`:
/// the hypersurface itself, the `n` consecutive 2x2 Jacobian minors with the
/// `u`-column, and the hyperplane.
pub fn tangency_polys(f: &StructuredF, u: &[i64]) -> Result<Vec<SparsePoly>, DualError> {
    if u.iter().all(|&c| c == 0) {
        return Err(DualError::ZeroVector);
    }
    assert_eq!(u.len(), f.box_dim());
    let unweighted = f.unweighted_form();
    let names: Vec<String> = unweighted.vars().to_vec();
    let var_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let n = f.box_dim();

    let dz = unweighted.partial_derivative("Z").unwrap();
    let dx: Vec<SparsePoly> = (1..=n)
        .map(|i| unweighted.partial_derivative(&format!("X{i}")).unwrap())
        .collect();

    let mut out = Vec::with_capacity(n + 2);
    out.push(unweighted);
    // H_1 = det [ dF/dZ  0 ; dF/dX1  u_1 ] = u_1 dF/dZ
    out.push(dz.scale(&BigInt::from(u[0])));
    // H_i = det [ dF/dX_{i-1}  u_{i-1} ; dF/dX_i  u_i ]
    for i in 2..=n {
        let a = dx[i - 2].scale(&BigInt::from(u[i - 1]));
        let b = dx[i - 1].scale(&BigInt::from(u[i - 2]));
        out.push(a.sub(&b));
    }
    // H_{n+1} = <X, u>
    let mut hyper = SparsePoly::zero(&var_refs);
    for (i, &ui) in u.iter().enumerate() {
        let mut e = vec![0u32; n + 1];
        e[i + 1] = 1;
        hyper = hyper.add(&SparsePoly::monomial(&var_refs, ui, &e));
    }
    out.push(hyper);
    Ok(out)
}

/// Degree of the dual hypersurface: `mde (mde - 1)^{n-1}`.
pub fn dual_degree(m: u32, d: u32, e: u32, n: u32) -> u64 {
    let deg = (m * d * e) as u64;
    deg * (deg - 1).pow(n - 1)
}

/// Exact dual quadratic form for `mde = 2`, from the adjugate of the doubled
/// Gram matrix, content-normalized with a positive leading coefficient.
/// Variables `(U_Y, U_1..U_n)`.
pub fn quadric_dual(f: &StructuredF) -> Result<SparsePoly, DualError> {
    if f.unweighted_degree() != 2 {
        return Err(DualError::NotAQuadric {
            degree: f.unweighted_degree(),
        });
    }
    let gram = crate::structured::doubled_gram(&f.unweighted_form());
    let det = crate::algebra::bareiss_det(&gram);
    if det.is_zero() {
        return Err(DualError::DegenerateForm);
    }
    let nv = gram.len();
    let adj = adjugate(&gram);
    let names: Vec<String> = std::iter::once("U_Y".to_string())
        .chain((1..nv).map(|i| format!("U{i}")))
        .collect();
    let var_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut dual = SparsePoly::zero(&var_refs);
    for i in 0..nv {
        for j in i..nv {
            let c = if i == j {
                adj[i][j].clone()
            } else {
                &adj[i][j] + &adj[j][i]
            };
            if c.is_zero() {
                continue;
            }
            let mut e = vec![0u32; nv];
            e[i] += 1;
            e[j] += 1;
            dual = dual.add(&SparsePoly::monomial(&var_refs, c, &e));
        }
    }
    // normalize: divide by coefficient content, sign fixed so the highest
    // exponent vector (the U_Y^2 term for nondegenerate duals) is positive
    let content = dual
        .terms()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(&c.abs()));
    let mut dual = if content > BigInt::from(1) {
        SparsePoly::from_terms(
            &var_refs,
            dual.terms().map(|(e, c)| (e.to_vec(), c / &content)),
        )
    } else {
        dual
    };
    if let Some((_, c)) = dual.terms().last() {
        if c.is_negative() {
            dual = dual.neg();
        }
    }
    Ok(dual)
}

#[allow(clippy::needless_range_loop)]
fn adjugate(m: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = m.len();
    let mut adj = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let cof = crate::algebra::bareiss_det(&minor);
            adj[j][i] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    adj
}

/// Rank over the rationals of a symmetric integer matrix.
#[allow(clippy::needless_range_loop)]
pub fn rational_rank(m: &[Vec<BigInt>]) -> usize {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n {
        if let Some(r) = (row..n).find(|&r| !a[r][col].is_zero()) {
            a.swap(row, r);
            for r2 in row + 1..n {
                if a[r2][col].is_zero() {
                    continue;
                }
                let (pr, pc) = (a[row][col].clone(), a[r2][col].clone());
                for c in 0..n {
                    a[r2][c] = &a[r2][c] * &pr - &a[row][c] * &pc;
                }
            }
            rank += 1;
            row += 1;
        }
    }
    rank
}

/// True when the dual restricted to `U_Y = 0` has no linear factor over the
/// rationals: a quadratic form factors into linear forms only when its rank
/// is at most 2.
pub fn dual_hyperplane_section_has_no_linear_factor(f: &StructuredF) -> Result<bool, DualError> {
    let dual = quadric_dual(f)?;
    let section = restrict_uy_zero(&dual);
    let gram = crate::structured::doubled_gram(&section);
    Ok(rational_rank(&gram) >= 3)
}

/// Substitute `U_Y = 0` and drop the variable.
pub fn restrict_uy_zero(dual: &SparsePoly) -> SparsePoly {
    let keep: Vec<(Vec<u32>, BigInt)> = dual
        .terms()
        .filter(|(e, _)| e[0] == 0)
        .map(|(e, c)| (e.to_vec(), c.clone()))
        .collect();
    let names: Vec<String> = dual.vars().to_vec();
    let var_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    SparsePoly::from_terms(&var_refs, keep)
        .drop_unused_var("U_Y")
        .unwrap()
}

/// All odd good-reduction primes up to `prime_bound` for which `u` is bad.
pub fn bad_prime_census(
    f: &StructuredF,
    u: &[i64],
    prime_bound: u64,
    k_max: u32,
) -> Result<Vec<u64>, DualError> {
    if u.iter().all(|&c| c == 0) {
        return Err(DualError::ZeroVector);
    }
    let mut out = Vec::new();
    for p in crate::algebra::primes_in(3, prime_bound) {
        match crate::expsum::classify(f, u, p, k_max) {
            Ok(crate::expsum::Classification::Bad(_)) => out.push(p),
            Ok(_) => {}
            Err(_) => {} // bad reduction: excluded from the census by definition
        }
    }
    Ok(out)
}

/// Count `u` in `[-R, R]^n` whose primitive part is bad for every probe
/// prime (the empirical stand-in for the vanishing of the dual section).
/// `u = 0` is always counted.
///
/// Classification is invariant under scaling, so the test runs on the
/// primitive vector `u / gcd(u)`; a primitive vector is nonzero mod every
/// prime, which keeps multiples of a probe prime classifiable.
pub fn bad_locus_census(
    f: &StructuredF,
    r: i64,
    probe_primes: &[u64],
    k_max: u32,
) -> Result<u64, DualError> {
    if probe_primes.len() < 3 {
        return Err(DualError::TooFewProbes {
            got: probe_primes.len(),
        });
    }
    let n = f.box_dim();
    // classification lookup tables, one per probe, indexed by residue
    let mut tables = Vec::new();
    for &p in probe_primes {
        let t = crate::expsum::classification_table(f, p, k_max)
            .map_err(|_| DualError::BadReduction(p))?;
        let compact: Vec<bool> = t
            .iter()
            .map(|c| matches!(c, crate::expsum::Classification::Bad(_)))
            .collect();
        tables.push((p, compact));
    }
    // per-probe residue lookup for every coordinate value in [-r, r]
    let res_tabs: Vec<Vec<usize>> = tables
        .iter()
        .map(|(p, _)| (-r..=r).map(|c| c.rem_euclid(*p as i64) as usize).collect())
        .collect();
    let off = r;
    let mut count = 0u64;
    let bx = crate::counting::BoxSpec::new(r, n);
    bx.for_each(|u| {
        let g = u.iter().fold(0u64, |acc, &c| acc.gcd(&c.unsigned_abs()));
        if g == 0 {
            count += 1; // u = 0
            return;
        }
        let mut bad_everywhere = true;
        for ((p, table), res) in tables.iter().zip(&res_tabs) {
            let mut idx = 0usize;
            if g == 1 {
                for &c in u {
                    idx = idx * *p as usize + res[(c + off) as usize];
                }
            } else {
                for &c in u {
                    idx = idx * *p as usize + res[(c / g as i64 + off) as usize];
                }
            }
            if !table[idx] {
                bad_everywhere = false;
                break;
            }
        }
        if bad_everywhere {
            count += 1;
        }
    });
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tangency_poly_shape() {
        let fa = fixtures::f_a();
        let hs = tangency_polys(&fa, &[1, 0, 0]).unwrap();
        assert_eq!(hs.len(), 5); // n + 2
                                 // H_{n+1} = X1 for u = e_1
        let names: Vec<&str> = ["Z", "X1", "X2", "X3"].to_vec();
        assert_eq!(hs[4], SparsePoly::variable(&names, "X1"));
        // H_1 = u_1 dF/dZ = 2Z
        assert_eq!(hs[1], SparsePoly::monomial(&names, 2, &[1, 0, 0, 0]));
        assert!(tangency_polys(&fa, &[0, 0, 0]).is_err());
    }

    #[test]
    fn dual_degree_values() {
        assert_eq!(dual_degree(2, 1, 1, 3), 2);
        assert_eq!(dual_degree(2, 2, 1, 3), 36);
        assert_eq!(dual_degree(2, 1, 2, 4), 108);
    }

    #[test]
    fn quadric_duals() {
        let names = ["U_Y", "U1", "U2", "U3"];
        let dual_a = quadric_dual(&fixtures::f_a()).unwrap();
        let want_a = SparsePoly::monomial(&names, 1, &[2, 0, 0, 0])
            .add(&SparsePoly::monomial(&names, -1, &[0, 2, 0, 0]))
            .add(&SparsePoly::monomial(&names, -1, &[0, 0, 2, 0]))
            .add(&SparsePoly::monomial(&names, -1, &[0, 0, 0, 2]));
        assert_eq!(dual_a, want_a);
        let dual_d = quadric_dual(&fixtures::f_d()).unwrap();
        let want_d = SparsePoly::monomial(&names, 1, &[2, 0, 0, 0])
            .add(&SparsePoly::monomial(&names, -1, &[0, 2, 0, 0]))
            .add(&SparsePoly::monomial(&names, -1, &[0, 0, 2, 0]))
            .add(&SparsePoly::monomial(&names, 1, &[0, 0, 0, 2]));
        assert_eq!(dual_d, want_d);
        // not a quadric
        assert!(matches!(
            quadric_dual(&fixtures::f_c()),
            Err(DualError::NotAQuadric { degree: 4 })
        ));
    }

    #[test]
    fn dual_section_irreducible() {
        assert!(dual_hyperplane_section_has_no_linear_factor(&fixtures::f_a()).unwrap());
        assert!(dual_hyperplane_section_has_no_linear_factor(&fixtures::f_d()).unwrap());
    }

    #[test]
    fn locus_census_monotone_in_r() {
        let probes = [3u64, 5, 7, 11, 13, 17];
        let fd = fixtures::f_d();
        let c5 = bad_locus_census(&fd, 5, &probes, 2).unwrap();
        let c10 = bad_locus_census(&fd, 10, &probes, 2).unwrap();
        assert!(c5 <= c10);
        assert!(c5 >= 1); // u = 0 always counted
                          // fewer than 3 probes is rejected
        assert!(matches!(
            bad_locus_census(&fd, 5, &[3, 5], 2),
            Err(DualError::TooFewProbes { got: 2 })
        ));
    }

    #[test]
    fn census_examples() {
        let fa = fixtures::f_a();
        // dual form at (0, u) = u1^2 + u2^2 + u3^2; primes <= 50 dividing it
        assert_eq!(
            bad_prime_census(&fa, &[1, 0, 0], 50, 2).unwrap(),
            Vec::<u64>::new()
        );
        assert_eq!(bad_prime_census(&fa, &[1, 2, 0], 50, 2).unwrap(), vec![5]);
        assert_eq!(bad_prime_census(&fa, &[3, 4, 0], 50, 2).unwrap(), vec![5]);
    }
}
