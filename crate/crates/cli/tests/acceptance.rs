//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::Command;
use std::time::Instant;

use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tlcalc::dsl::{parse, to_source};
use tlcalc_core::protocols::{
    check_tl_relations, cnot_verify, random_triples, swap_verify, teleport_verify, tight_densecode_verify,
    tight_swap_verify, tight_teleport_verify, verify_all, IdentityReport, TL_MAX_STRANDS,
};
use tlcalc_core::rewrite::{candidate_steps, normalize, normalize_by};
use tlcalc_core::sample::{registry_for, sample, sample_with_arity, SampleConfig};
use tlcalc_core::{evaluate, Diagram};

const CATALOG_TOL: f64 = 1e-9;
const TL_TOL: f64 = 1e-12;
const TELEPORT_TOL: f64 = 1e-9;
const SWAP_TOL: f64 = 1e-9;
const TIGHT_TOL: f64 = 1e-9;
const PATH_TOL: f64 = 1e-10;
const CNOT_TOL: f64 = 1e-12;
const REWRITE_TOL: f64 = 1e-9;
const PROPERTY_TOL: f64 = 1e-9;

const SEEDS: u64 = 20;
const STATES: u64 = 5;
const REWRITE_CASES: u64 = 200;
const ORDERS: u64 = 10;
const PAIRS: u64 = 100;
const ROUND_TRIPS: u32 = 500;

struct Outcome {
    passed: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome, String>;

fn summarize(reports: &[IdentityReport]) -> Outcome {
    let failed: Vec<&IdentityReport> = reports.iter().filter(|r| !r.passed).collect();
    let worst = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let mut detail = format!("{} checks, max residual {worst:.2e}", reports.len());
    if let Some(r) = failed.first() {
        detail.push_str(&format!(
            "; {} failed, first {} d={} seed={:?} {:?} residual {:.2e}",
            failed.len(),
            r.identity_id,
            r.d,
            r.seed,
            r.params,
            r.residual
        ));
    }
    Outcome {
        passed: failed.is_empty() && !reports.is_empty(),
        detail,
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn catalog() -> Result<Outcome, String> {
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let mut all = Vec::new();
    for d in 2..=5 {
        all.extend(verify_all(d, &seeds, CATALOG_TOL).map_err(err)?);
    }
    Ok(summarize(&all))
}

fn tl_algebra() -> Result<Outcome, String> {
    let mut all = Vec::new();
    for d in 2..=5 {
        for n in 2..=TL_MAX_STRANDS {
            all.extend(check_tl_relations(n, d, TL_TOL).map_err(err)?);
        }
    }
    Ok(summarize(&all))
}

fn teleportation() -> Result<Outcome, String> {
    let mut all = Vec::new();
    for d in 2..=5 {
        for n in 1..=d * d {
            for s in 0..STATES {
                all.push(teleport_verify(d, n, s, TELEPORT_TOL).map_err(err)?);
            }
        }
    }
    Ok(summarize(&all))
}

fn swapping() -> Result<Outcome, String> {
    let mut all = Vec::new();
    for l in 1..=4 {
        for n in 1..=4 {
            for m in 1..=4 {
                all.push(swap_verify(2, l, n, m, SWAP_TOL).map_err(err)?);
            }
        }
    }
    for (l, n, m) in random_triples(3, 0, 20) {
        all.push(swap_verify(3, l, n, m, SWAP_TOL).map_err(err)?);
    }
    Ok(summarize(&all))
}

fn tight_teleportation() -> Result<Outcome, String> {
    let mut all = Vec::new();
    for d in 2..=5 {
        for s in 0..SEEDS {
            all.push(tight_teleport_verify(d, s, TIGHT_TOL).map_err(err)?);
        }
    }
    let mut out = summarize(&all);
    let gap = all.iter().map(|r| r.path_gap).fold(0.0, f64::max);
    out.passed &= gap < PATH_TOL;
    out.detail.push_str(&format!(", max path gap {gap:.2e}"));
    Ok(out)
}

fn dense_coding() -> Result<Outcome, String> {
    let all = (2..=5)
        .map(|d| tight_densecode_verify(d, TIGHT_TOL))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    Ok(summarize(&all))
}

fn tight_swapping() -> Result<Outcome, String> {
    let mut all = Vec::new();
    for d in 2..=3 {
        for s in 0..SEEDS {
            all.push(tight_swap_verify(d, s, TIGHT_TOL).map_err(err)?);
        }
    }
    Ok(summarize(&all))
}

fn cnot() -> Result<Outcome, String> {
    Ok(summarize(&[cnot_verify(CNOT_TOL).map_err(err)?]))
}

fn rewrite_cfg() -> SampleConfig {
    SampleConfig {
        max_decorations: 6,
        ..SampleConfig::default()
    }
}

fn rewrite_soundness() -> Result<Outcome, String> {
    let cfg = rewrite_cfg();
    let (mut steps, mut worst) = (0usize, 0.0f64);
    let mut problems = Vec::new();
    for case in 0..REWRITE_CASES {
        let d = 2 + (case % 2) as usize;
        let reg = registry_for(&cfg, d, case);
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let x = loop {
            let x = sample(&mut rng, &cfg, 6);
            if x.strands().len() <= 6 && x.decoration_count() <= 6 {
                break x;
            }
        };
        let value = evaluate(&x, d, &reg).map_err(err)?;
        for step in candidate_steps(&x) {
            if let Ok(y) = step.apply(&x, &reg) {
                steps += 1;
                worst = worst.max(evaluate(&y, d, &reg).map_err(err)?.max_abs_diff(&value));
            }
        }
        let (n, _) = normalize(&x, &reg).map_err(err)?;
        worst = worst.max(evaluate(&n, d, &reg).map_err(err)?.max_abs_diff(&value));
        let (again, trace) = normalize(&n, &reg).map_err(err)?;
        if again != n || !trace.steps.is_empty() {
            problems.push(format!("case {case}: normalize not idempotent"));
        }
        for k in 0..ORDERS {
            let mut order = ChaCha8Rng::seed_from_u64(case * 1000 + k);
            let (other, _) = normalize_by(&x, &reg, |s| order.random_range(0..s.len())).map_err(err)?;
            if !other.approx_eq(&n, REWRITE_TOL) {
                problems.push(format!("case {case}: order {k} reached a different normal form"));
            }
        }
    }
    Ok(Outcome {
        passed: worst < REWRITE_TOL && problems.is_empty(),
        detail: format!(
            "{REWRITE_CASES} diagrams, {steps} single steps, {ORDERS} orders each, max drift {worst:.2e}{}",
            problems.first().map(|p| format!("; {p}")).unwrap_or_default()
        ),
    })
}

fn functoriality() -> Result<Outcome, String> {
    let cfg = SampleConfig::default();
    let mut worst = 0.0f64;
    let mut structural = 0;
    for case in 0..PAIRS {
        let d = 2 + (case % 2) as usize;
        let reg = registry_for(&cfg, d, case);
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let (u, m, l) = (rng.random_range(0..=3), rng.random_range(0..=3), rng.random_range(0..=3));
        let a = sample_with_arity(&mut rng, u, m, &cfg);
        let b = sample_with_arity(&mut rng, m, l, &cfg);
        let ev = |x: &Diagram| evaluate(x, d, &reg).map_err(err);
        let (ea, eb) = (ev(&a)?, ev(&b)?);
        let ab = a.compose(&b).map_err(err)?;
        worst = worst.max(ev(&ab)?.max_abs_diff(&eb.matmul(&ea)));
        worst = worst.max(ev(&a.tensor(&b))?.max_abs_diff(&ea.kron(&eb)));
        worst = worst.max(ev(&a.dagger())?.max_abs_diff(&ea.adjoint()));
        worst = worst.max(ev(&ab.dagger())?.max_abs_diff(&ev(&b.dagger().compose(&a.dagger()).map_err(err)?)?));
        let id_laws = Diagram::identity(u).compose(&a).map_err(err)? == a && a.compose(&Diagram::identity(m)).map_err(err)? == a;
        if a.dagger().dagger() != a || !id_laws {
            structural += 1;
        }
    }
    Ok(Outcome {
        passed: worst < PROPERTY_TOL && structural == 0,
        detail: format!("{PAIRS} composable pairs, max residual {worst:.2e}, {structural} structural failures"),
    })
}

fn cli_contract() -> Result<Outcome, String> {
    let mut runner = TestRunner::new(Config {
        cases: ROUND_TRIPS,
        failure_persistence: None,
        ..Config::default()
    });
    let round_trip = runner.run(&common::expr(), |e| {
        let back = parse(&to_source(&e)).map_err(|x| proptest::test_runner::TestCaseError::fail(x.to_string()))?;
        proptest::prop_assert_eq!(back, e);
        Ok(())
    });
    let bin = env!("CARGO_BIN_EXE_tlcalc");
    let code = |args: &[&str], tol: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(args).env_remove("TLCALC_TOLERANCE");
        if let Some(t) = tol {
            cmd.env("TLCALC_TOLERANCE", t);
        }
        cmd.output().map(|o| o.status.code())
    };
    let fixtures: [(&[&str], Option<&str>, i32); 4] = [
        (&["verify", "all", "--dim", "2", "--seed", "1"], None, 0),
        (&["verify", "trace_pair", "--dim", "3"], Some("1e-300"), 1),
        (&["eval", "cup ; id(3)"], None, 2),
        (&["eval", "id(12)", "--dim", "5"], None, 3),
    ];
    let mut bad = Vec::new();
    for (args, tol, want) in fixtures {
        let got = code(args, tol).map_err(err)?;
        if got != Some(want) {
            bad.push(format!("{} -> {got:?}, expected {want}", args.join(" ")));
        }
    }
    Ok(Outcome {
        passed: round_trip.is_ok() && bad.is_empty(),
        detail: format!(
            "{ROUND_TRIPS} round trips {}, exit codes {}",
            if round_trip.is_ok() { "ok".to_string() } else { format!("failed: {round_trip:?}") },
            if bad.is_empty() { "0/1/2/3 ok".to_string() } else { bad.join("; ") }
        ),
    })
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("identity catalog, d=2..5, 20 seeds", catalog),
        ("TL relations, 2..6 strands, d=2..5", tl_algebra),
        ("teleportation, all outcomes, d=2..5", teleportation),
        ("entanglement swapping, d=2 all triples, d=3 random", swapping),
        ("tight teleportation, 20 seeds, d=2..5", tight_teleportation),
        ("tight dense coding, d=2..5", dense_coding),
        ("tight swapping, 20 seeds, d=2..3", tight_swapping),
        ("CNOT truth table and unitarity", cnot),
        ("rewrite soundness, idempotence, confluence", rewrite_soundness),
        ("functoriality and dagger", functoriality),
        ("DSL round trip and exit codes", cli_contract),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (passed, detail) = match check() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {detail} ({:.2}s)",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
