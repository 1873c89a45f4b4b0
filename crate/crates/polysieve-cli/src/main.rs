//! Command-line driver: exact counts, sieve runs, exponential-sum tables,
//! tangency classification, censuses, coefficient reduction, and the
//! verification suites.
//!
//! Reports are plain `key = value` text with a stable field order; for a
//! fixed configuration and seed the bytes are identical across runs. Every
//! numeric claim names its tolerance source (exact, err_budget, quadrature).

use std::process::ExitCode;

use polysieve::counting::{self, BoxSpec};
use polysieve::expsum::{self, Classification};
use polysieve::sieve::{self, SmoothWeightSpec};
use polysieve::structured::StructuredF;
use polysieve::{dualgeom, fixtures, verify};

mod config;
use config::{parse_args, RawConfig};

const USAGE: &str = "\
usage: polysieve <command> [flags]

commands:
  count     exact N(F,B) and smoothed S(F,B)
            --instance NAME|PATH --B INT
  sieve     desk-scale sieve run (--Q) or scale summary (--kappa / neither)
            --instance NAME|PATH --B INT [--Q REAL | --kappa REAL] [--m INT]
            [--trunc INT] [--k-max INT] [--alpha REAL] [--M INT]
            [--threads INT] [--seed INT] [--out PATH]
  expsum    exponential-sum table data for one prime
            --instance NAME|PATH --p PRIME [--u V1,V2,..] [--dump PATH]
  classify  type of a frequency vector against one prime
            --instance NAME|PATH --p PRIME --u V1,V2,.. [--k-max INT]
  census    bad primes of one vector (--u --bound) or the bad-locus count
            over a box (--R --probes P1,P2,..)
  reduce    coefficient-reduction decision over [-B,B]^n
            --instance NAME|PATH --B INT
  verify    run the named invariant suites
            [--only PREFIX] [--seed INT] [--inject-fault CHECK_ID]

  any command accepts --config PATH (key = value lines); flags override.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() {
        eprint!("{USAGE}");
        return ExitCode::from(2);
    }
    let cfg = match parse_args(&args[1..]) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match args[0].as_str() {
        "count" => cmd_count(&cfg),
        "sieve" => cmd_sieve(&cfg),
        "expsum" => cmd_expsum(&cfg),
        "classify" => cmd_classify(&cfg),
        "census" => cmd_census(&cfg),
        "reduce" => cmd_reduce(&cfg),
        "verify" => cmd_verify(&cfg),
        other => {
            eprintln!("error: unknown command `{other}`\n{USAGE}");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(all_verdicts_hold) => {
            if all_verdicts_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_instance(cfg: &RawConfig) -> Result<(String, StructuredF), String> {
    let spec = cfg
        .get("instance")
        .ok_or("missing --instance (bundled name F_A..F_D or a file path)")?;
    if let Some(f) = fixtures::by_name(spec) {
        return Ok((spec.to_string(), f));
    }
    let text =
        std::fs::read_to_string(spec).map_err(|e| format!("cannot read instance {spec}: {e}"))?;
    let f = StructuredF::from_text(&text)?;
    Ok((spec.to_string(), f))
}

fn required_b(cfg: &RawConfig) -> Result<i64, String> {
    let b = cfg.get_i64("B")?.ok_or("missing --B")?;
    if b < 0 {
        return Err(format!("B = {b} must be non-negative"));
    }
    Ok(b)
}

/// Collect report lines and emit them to stdout or `--out`.
struct Report {
    lines: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Report {
        Report {
            lines: vec![format!("polysieve {command} report")],
        }
    }

    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("{key} = {value}"));
    }

    fn section(&mut self, name: &str) {
        self.lines.push(format!("[{name}]"));
    }

    fn emit(&self, cfg: &RawConfig) -> Result<(), String> {
        let text = self.lines.join("\n") + "\n";
        match cfg.get("out") {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| format!("cannot write {path}: {e}"))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn cmd_count(cfg: &RawConfig) -> Result<bool, String> {
    let (name, f) = load_instance(cfg)?;
    let b = required_b(cfg)?;
    let bx = BoxSpec::new(b, f.box_dim());
    let n_exact = counting::count_n(&f, &bx);
    let m_decay = cfg
        .get_u64("M")?
        .unwrap_or(sieve::default_m_decay(f.n()) as u64) as u32;
    let w = SmoothWeightSpec::new((b.max(1)) as f64, m_decay);
    let (s_smooth, s_err) = counting::count_s(&f, &bx, &w);
    let mut rep = Report::new("count");
    rep.push("instance", &name);
    rep.push("B", b);
    rep.push("N", format!("{n_exact}  # tolerance: exact"));
    rep.push(
        "S",
        format!("{s_smooth:.9}  # tolerance: compensated summation, err <= {s_err:.3e}"),
    );
    let ok = (n_exact as f64) <= s_smooth + s_err + 1e-9;
    rep.push("verdict_n_le_s", verdict(ok));
    rep.emit(cfg)?;
    Ok(ok)
}

fn cmd_sieve(cfg: &RawConfig) -> Result<bool, String> {
    let (name, f) = load_instance(cfg)?;
    let b = required_b(cfg)?;
    let q_flag = cfg.get_f64("Q")?;
    let kappa_flag = cfg.get_f64("kappa")?;
    if q_flag.is_some() && kappa_flag.is_some() {
        return Err("give either --Q (desk mode) or --kappa (scale mode), not both".into());
    }
    let seed = cfg.get_u64("seed")?.unwrap_or(0);

    let Some(q) = q_flag else {
        // scale mode: the box is far beyond enumeration; report term sizes
        let bf = b as f64;
        let summary = match kappa_flag {
            Some(kappa) => {
                let q = bf.powf(kappa);
                sieve::ScaleSummary {
                    b: bf,
                    n: f.n(),
                    q,
                    kappa,
                    p_estimate: q / q.ln(),
                    term_fd_zero: bf.powf(f.n() as f64 - 1.0),
                    term_volume_over_p: bf.powf(f.n() as f64) / (q / q.ln()),
                    term_volume_over_q: bf.powf(f.n() as f64) / q,
                    term_q_power: q.powf(f.n() as f64),
                    predicted_bound: bf.powf(f.n() as f64 - 1.0 + 1.0 / (f.n() as f64 + 1.0))
                        * bf.ln().powf(f.n() as f64 / (f.n() as f64 + 1.0)),
                }
            }
            None => sieve::scale_summary(bf, f.n()).map_err(|e| e.to_string())?,
        };
        let mut rep = Report::new("sieve-scale");
        rep.push("instance", &name);
        rep.push("B", b);
        rep.push("mode", "scale");
        rep.push("Q", format!("{:.6}", summary.q));
        rep.push("kappa", format!("{:.6}", summary.kappa));
        rep.push("P_estimate", format!("{:.3}", summary.p_estimate));
        rep.section("term_sizes");
        rep.push("fd_zero_locus", format!("{:.4e}", summary.term_fd_zero));
        rep.push(
            "volume_over_P",
            format!("{:.4e}", summary.term_volume_over_p),
        );
        rep.push(
            "volume_over_Q",
            format!("{:.4e}", summary.term_volume_over_q),
        );
        rep.push("Q_power_n", format!("{:.4e}", summary.term_q_power));
        rep.push(
            "predicted_bound",
            format!("{:.4e}", summary.predicted_bound),
        );
        rep.emit(cfg)?;
        return Ok(true);
    };

    let mut params = sieve::SieveParameters::desk(&f, b, q);
    params.seed = seed;
    if let Some(m) = cfg.get_u64("m")? {
        params.m_filter = m as u32;
    }
    if let Some(t) = cfg.get_i64("trunc")? {
        params.trunc = t;
    }
    if let Some(k) = cfg.get_u64("k-max")? {
        params.k_max = k as u32;
    }
    if let Some(a) = cfg.get_f64("alpha")? {
        params.alpha = a;
    }
    if let Some(m) = cfg.get_u64("M")? {
        params.m_decay = m as u32;
    }
    if let Some(t) = cfg.get_u64("threads")? {
        params.threads = t as usize;
    }
    let report = sieve::sieve_bound(&f, &params).map_err(|e| e.to_string())?;

    let mut rep = Report::new("sieve");
    rep.push("instance", &name);
    rep.push("B", report.b);
    rep.push("Q", format!("{:.6}", report.q_scale));
    rep.push("m_filter", params.m_filter);
    rep.push("k_max", params.k_max);
    rep.push("alpha", format!("{:.6}", params.alpha));
    rep.push("M_decay", params.m_decay);
    rep.push("seed", seed);
    rep.push(
        "primes",
        report
            .primes
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    rep.push("P", report.p_count);
    rep.push("thin_set_warning", report.thin_warning);
    rep.push(
        "P_hypothesis_ratio",
        format!(
            "{:.4}  # P / max(log ||f_d||, log B); small values weaken the lower bound",
            report.p_hypothesis_ratio
        ),
    );
    rep.section("counts");
    rep.push("N", format!("{}  # tolerance: exact", report.exact_n));
    rep.push(
        "S",
        format!(
            "{:.9}  # tolerance: compensated summation, err <= {:.3e}",
            report.smoothed_s, report.smoothed_s_err
        ),
    );
    rep.section("terms");
    rep.push("S1_fd_zero", format!("{:.9}", report.s1_fd_zero));
    rep.push(
        "S2_volume_over_P",
        format!("{:.9}", report.s2_volume_over_p),
    );
    rep.push("S3_pair_sum", format!("{:.9}", report.s3_pair_sum));
    rep.push(
        "C_measured",
        format!("{:.6}  # S <= C (S1 + S2 + S3)", report.c_measured),
    );
    rep.section("pairs");
    for pair in &report.pairs {
        rep.push(
            &format!("T_{}_{}", pair.p, pair.q),
            format!(
                "direct {:.9}; dual {:.9}; trunc {}; tail {:.3e}; err {:.3e}; agree {}",
                pair.t_direct,
                pair.poisson.value,
                pair.poisson.trunc,
                pair.poisson.tail_bound,
                pair.poisson.err_budget,
                verdict(pair.agree),
            ),
        );
    }
    rep.section("classification_mass");
    let labels = ["zero", "good", "bad"];
    for a in 0..3 {
        for b2 in a..3 {
            rep.push(
                &format!("mass_{}_{}", labels[a], labels[b2]),
                format!("{:.6e}", report.class_mass[a][b2]),
            );
        }
    }
    rep.push(
        "C_badbad_vs_Q_n",
        format!("{:.6e}  # bad-bad mass / Q^n, recorded", report.c_badbad),
    );
    rep.section("per_fiber_bound");
    rep.push("checked", report.per_k_checked);
    rep.push("violations", report.per_k_violations);
    rep.push(
        "P_eff",
        report
            .p_eff
            .map(|v| v.to_string())
            .unwrap_or_else(|| "none".into()),
    );
    rep.push("chain_lhs", format!("{:.9}", report.chain_lhs));
    rep.push("chain_rhs", format!("{:.9}", report.chain_rhs));
    rep.section("verdicts");
    rep.push(
        "n_le_s",
        format!("{}  # exact", verdict(report.verdict_n_le_s)),
    );
    rep.push(
        "per_fiber_lower_bound",
        format!(
            "{}  # exact integer inequality",
            verdict(report.verdict_per_k)
        ),
    );
    rep.push(
        "weighted_chain",
        format!(
            "{}  # tolerance: 1e-12 relative",
            verdict(report.verdict_chain)
        ),
    );
    rep.push(
        "poisson_agreement",
        format!(
            "{}  # tolerance: tail_bound + err_budget",
            verdict(report.verdict_poisson)
        ),
    );
    rep.emit(cfg)?;
    Ok(report.verdict_n_le_s
        && report.verdict_per_k
        && report.verdict_chain
        && report.verdict_poisson)
}

fn cmd_expsum(cfg: &RawConfig) -> Result<bool, String> {
    let (name, f) = load_instance(cfg)?;
    let p = cfg.get_u64("p")?.ok_or("missing --p")?;
    let table = expsum::g_table(&f, p);
    let mut rep = Report::new("expsum");
    rep.push("instance", &name);
    rep.push("p", p);
    rep.push("entries", table.values.len());
    rep.push("err_budget", format!("{:.6e}", table.err_budget));
    rep.push("max_abs", format!("{:.9}", table.max_abs()));
    if let Some(u) = cfg.get_vec_i64("u")? {
        if u.len() != f.box_dim() {
            return Err(format!("u must have {} coordinates", f.box_dim()));
        }
        let g = table.lookup(&u);
        let direct = expsum::g_direct(&f, &u, p);
        rep.push("u", format!("{u:?}"));
        rep.push(
            "g_table",
            format!("{:.9} + {:.9}i  # tolerance: err_budget", g.re, g.im),
        );
        rep.push(
            "g_direct",
            format!(
                "{:.9} + {:.9}i  # oracle: direct summation",
                direct.re, direct.im
            ),
        );
    }
    if let Some(path) = cfg.get("dump") {
        let mut out = Vec::new();
        table.write_to(&mut out).map_err(|e| e.to_string())?;
        std::fs::write(path, out).map_err(|e| format!("cannot write {path}: {e}"))?;
        rep.push("dump", path);
    }
    rep.emit(cfg)?;
    Ok(true)
}

fn cmd_classify(cfg: &RawConfig) -> Result<bool, String> {
    let (name, f) = load_instance(cfg)?;
    let p = cfg.get_u64("p")?.ok_or("missing --p")?;
    let u = cfg.get_vec_i64("u")?.ok_or("missing --u")?;
    if u.len() != f.box_dim() {
        return Err(format!("u must have {} coordinates", f.box_dim()));
    }
    let k_max = cfg.get_u64("k-max")?.unwrap_or(2) as u32;
    let class = expsum::classify(&f, &u, p, k_max).map_err(|e| e.to_string())?;
    let mut rep = Report::new("classify");
    rep.push("instance", &name);
    rep.push("p", p);
    rep.push("u", format!("{u:?}"));
    rep.push("k_max", k_max);
    rep.push("class", class.label());
    if let Classification::Bad(w) = &class {
        let desc = polysieve::algebra::FieldDesc::extension(p, w.k).unwrap();
        let coords: Vec<String> = w.point.iter().map(|c| desc.format_elem(c)).collect();
        rep.push("witness_degree", w.k);
        rep.push("witness_point", format!("[{}]", coords.join(": ")));
    }
    rep.emit(cfg)?;
    Ok(true)
}

fn cmd_census(cfg: &RawConfig) -> Result<bool, String> {
    let (name, f) = load_instance(cfg)?;
    let k_max = cfg.get_u64("k-max")?.unwrap_or(2) as u32;
    let mut rep = Report::new("census");
    rep.push("instance", &name);
    if let Some(u) = cfg.get_vec_i64("u")? {
        let bound = cfg.get_u64("bound")?.ok_or("missing --bound")?;
        let primes = dualgeom::bad_prime_census(&f, &u, bound, k_max).map_err(|e| e.to_string())?;
        rep.push("u", format!("{u:?}"));
        rep.push("prime_bound", bound);
        rep.push("bad_prime_count", primes.len());
        rep.push(
            "bad_primes",
            primes
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
    } else {
        let r = cfg
            .get_i64("R")?
            .ok_or("census needs --u/--bound or --R/--probes")?;
        let probes = cfg
            .get_vec_u64("probes")?
            .unwrap_or_else(|| vec![3, 5, 7, 11, 13, 17]);
        let count = dualgeom::bad_locus_census(&f, r, &probes, k_max).map_err(|e| e.to_string())?;
        rep.push("R", r);
        rep.push(
            "probes",
            probes
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        rep.push("count", count);
        rep.push(
            "count_over_R_envelope",
            format!(
                "{:.6}  # count / R^(n - 2 + 1/3)",
                count as f64 / (r as f64).powf(4.0 / 3.0)
            ),
        );
    }
    rep.emit(cfg)?;
    Ok(true)
}

fn cmd_reduce(cfg: &RawConfig) -> Result<bool, String> {
    use polysieve::coeffreduce::{reduce_decision, ReduceDecision};
    let (name, f) = load_instance(cfg)?;
    let b = required_b(cfg)?;
    let decision = reduce_decision(&f, b).map_err(|e| e.to_string())?;
    let mut rep = Report::new("reduce");
    rep.push("instance", &name);
    rep.push("B", b);
    let ok = match decision {
        ReduceDecision::CoeffBounded {
            null_vector,
            proportional_to_coeffs,
            height_bound,
            bound_ok,
        } => {
            rep.push("branch", "coefficient_bounded");
            match null_vector {
                Some(v) => {
                    rep.push(
                        "null_vector",
                        v.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(","),
                    );
                    rep.push("proportional_to_coefficients", proportional_to_coeffs);
                    rep.push("height_bound", height_bound);
                    rep.push("bound_check", verdict(bound_ok));
                    proportional_to_coeffs && bound_ok
                }
                None => {
                    rep.push("reason", "fewer solutions than monomials");
                    true
                }
            }
        }
        ReduceDecision::SecondaryCurve { h, r, zero_count } => {
            rep.push("branch", "secondary_curve");
            rep.push("H", h);
            rep.push("R_terms", r.num_terms());
            rep.push("zero_count", format!("{zero_count}  # tolerance: exact"));
            true
        }
    };
    rep.push("verdict_certificate", verdict(ok));
    rep.emit(cfg)?;
    Ok(ok)
}

fn cmd_verify(cfg: &RawConfig) -> Result<bool, String> {
    let filter = cfg.get("only").unwrap_or("");
    let seed = cfg.get_u64("seed")?.unwrap_or(0);
    let fault = cfg.get("inject-fault");
    let results = verify::run(filter, seed, fault);
    if results.is_empty() {
        return Err(format!("no checks match prefix `{filter}`"));
    }
    let mut all_ok = true;
    for r in &results {
        println!(
            "{} {} - {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.id,
            r.detail
        );
        all_ok &= r.passed;
    }
    println!(
        "{} checks, {} failed",
        results.len(),
        results.iter().filter(|r| !r.passed).count()
    );
    Ok(all_ok)
}
