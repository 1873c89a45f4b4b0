//! Bundled reference instances used by the verification suites and the CLI.

use crate::algebra::SparsePoly;
use crate::structured::StructuredF;

fn x3() -> [&'static str; 3] {
    ["X1", "X2", "X3"]
}

fn diag_form(coeffs: [i64; 3], deg: u32) -> SparsePoly {
    let vars = x3();
    let mut f = SparsePoly::zero(&vars);
    for (i, &c) in coeffs.iter().enumerate() {
        let mut e = [0u32; 3];
        e[i] = deg;
        f = f.add(&SparsePoly::monomial(&vars, c, &e));
    }
    f
}

/// `F_A`: the definite quadric, `Y^2 - (X1^2 + X2^2 + X3^2)`.
pub fn f_a() -> StructuredF {
    StructuredF::validate(2, 1, 1, 3, vec![diag_form([-1, -1, -1], 2)]).unwrap()
}

/// `F_B`: two forms, `Y^4 + Y^2 (X1^2+X2^2+X3^2) + (X1^4+X2^4+X3^4)`.
pub fn f_b() -> StructuredF {
    StructuredF::validate(
        2,
        2,
        1,
        3,
        vec![diag_form([1, 1, 1], 2), diag_form([1, 1, 1], 4)],
    )
    .unwrap()
}

/// `F_C`: weighted shape with e = 2, `Y^2 - (X1^4 + X2^4 + X3^4)`; its
/// unweighted form is the Fermat quartic.
pub fn f_c() -> StructuredF {
    StructuredF::validate(2, 1, 2, 3, vec![diag_form([-1, -1, -1], 4)]).unwrap()
}

/// `F_D`: the indefinite quadric, `Y^2 - X1^2 - X2^2 + X3^2`.
pub fn f_d() -> StructuredF {
    StructuredF::validate(2, 1, 1, 3, vec![diag_form([-1, -1, 1], 2)]).unwrap()
}

/// Look up a bundled instance by name (`F_A`, `F_B`, `F_C`, `F_D`).
pub fn by_name(name: &str) -> Option<StructuredF> {
    match name {
        "F_A" => Some(f_a()),
        "F_B" => Some(f_b()),
        "F_C" => Some(f_c()),
        "F_D" => Some(f_d()),
        _ => None,
    }
}

pub const NAMES: [&str; 4] = ["F_A", "F_B", "F_C", "F_D"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for name in NAMES {
            assert!(by_name(name).is_some());
        }
        assert!(by_name("F_X").is_none());
    }
}
