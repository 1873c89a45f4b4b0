//! Full sieve runs on the reference instances: every verdict must hold and
//! the report invariants must be internally consistent.

use polysieve::fixtures;
use polysieve::sieve::{sieve_bound, SieveParameters};

#[test]
fn full_reports_on_reference_instances() {
    for (name, f, b) in [
        ("F_A", fixtures::f_a(), 12i64),
        ("F_C", fixtures::f_c(), 8),
    ] {
        let mut params = SieveParameters::desk(&f, b, 11.0);
        params.threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        let rep = sieve_bound(&f, &params).unwrap();
        assert_eq!(rep.primes, vec![11, 13, 17, 19], "{name}");
        assert!(rep.verdict_n_le_s, "{name}: N <= S");
        assert!(rep.verdict_per_k, "{name}: per-fiber lower bound");
        assert!(rep.verdict_chain, "{name}: weighted chain");
        assert!(rep.verdict_poisson, "{name}: dual-side agreement on every pair");
        assert_eq!(rep.pairs.len(), 6);
        // the pairwise term never exceeds its elementary bound
        let md1 = (f.y_degree() - 1) as f64;
        for pair in &rep.pairs {
            assert!(pair.t_direct.abs() <= md1 * md1 * rep.s2_volume_over_p * rep.p_count as f64);
        }
        // bad-bad mass against Q^n is recorded and finite
        assert!(rep.c_badbad.is_finite() && rep.c_badbad >= 0.0);
        // S1 counts the f_d vanishing locus; for these diagonal forms only
        // the origin vanishes, with weight exactly 1
        assert!((rep.s1_fd_zero - 1.0).abs() < 1e-12, "{name}");
    }
}
