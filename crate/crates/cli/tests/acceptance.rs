//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p aplcm-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use aplcm_core::bounds::{bound_value, hypothesis};
use aplcm_core::lcm_engine::{lcm_prefix, lcm_suffix, record, IncrementalState};
use aplcm_core::numeric::{factorial, gcd, max_power_dividing, max_power_dividing_factorial, pow, Nat};
use aplcm_core::verifier::{LemmaVerdict, SweepConfig};
use aplcm_core::{sweep, BoundParams, Family, IntRange, LemmaId, Progression, Status};
use num_bigint::BigUint;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn coprime_pairs(u0_max: u64, r_lo: u64, r_hi: u64) -> Vec<Progression> {
    let mut out = Vec::new();
    for u0 in 1..=u0_max {
        for r in r_lo..=r_hi {
            if gcd(&Nat::from(u0), &Nat::from(r)) == Nat::from(1u8) {
                out.push(Progression::new(u0, r).unwrap());
            }
        }
    }
    out
}

fn small_grid(checks: Vec<LemmaId>) -> SweepConfig {
    SweepConfig {
        u0_range: IntRange::new(1, 8),
        r_range: IntRange::new(1, 8),
        n_range: Some(IntRange::new(1, 40)),
        n_window: None,
        a_range: IntRange::single(2),
        l_range: IntRange::single(2),
        alpha_range: IntRange::single(2),
        families: vec![],
        checks,
    }
}

fn parameter_grid(families: Vec<Family>, checks: Vec<LemmaId>) -> SweepConfig {
    SweepConfig {
        u0_range: IntRange::new(1, 7),
        r_range: IntRange::new(2, 6),
        n_range: None,
        n_window: Some(20),
        a_range: IntRange::new(2, 3),
        l_range: IntRange::new(2, 3),
        alpha_range: IntRange::new(2, 4),
        families,
        checks,
    }
}

/// Every `(a, l, alpha, r)` of the parameter grid that satisfies the side
/// conditions, enumerated independently of the sweep planner.
fn admissible_params() -> Vec<(u64, u64, u64, u64)> {
    let mut out = Vec::new();
    for a in 2..=3 {
        for l in 2..=3 {
            for alpha in a..=4 {
                for r in a.max(l - 1)..=6 {
                    out.push((a, l, alpha, r));
                }
            }
        }
    }
    out
}

fn count_verified(verdicts: &[LemmaVerdict], lemma: LemmaId) -> usize {
    verdicts
        .iter()
        .filter(|v| v.lemma == lemma && v.status == Status::Verified)
        .count()
}

fn no_failures(verdicts: &[LemmaVerdict]) -> Result<(), String> {
    match verdicts.iter().find(|v| v.status == Status::Failed) {
        Some(v) => Err(format!("{} failed at {:?}: {:?}", v.lemma, v.instance, v.witness)),
        None => Ok(()),
    }
}

fn exact_quotient_grid(lemma: LemmaId) -> Outcome {
    let outcome = sweep(&small_grid(vec![lemma])).map_err(|e| e.to_string())?;
    let expected = coprime_pairs(8, 1, 8).len() * 40;
    no_failures(&outcome.verdicts)?;
    ensure(outcome.failed == 0, || format!("{} failures", outcome.failed))?;
    let verified = count_verified(&outcome.verdicts, lemma);
    ensure(verified == expected, || format!("verified {verified}, expected {expected}"))?;
    Ok(format!("{verified} cells verified"))
}

fn criterion_quotient_integral() -> Outcome {
    exact_quotient_grid(LemmaId::L2_1)
}

fn criterion_chain_of_lower_bounds() -> Outcome {
    exact_quotient_grid(LemmaId::L2_2)
}

fn criterion_parameter_grid() -> Outcome {
    let checks = vec![LemmaId::L2_3, LemmaId::Ineq2_5, LemmaId::DivFactorial, LemmaId::DivCofactor];
    let outcome = sweep(&parameter_grid(vec![Family::NewT13], checks)).map_err(|e| e.to_string())?;
    ensure(outcome.failed == 0, || format!("{} failures", outcome.failed))?;
    no_failures(&outcome.verdicts)?;
    if let Some(r) = outcome.reports.iter().find(|r| r.failed()) {
        return Err(format!("bound fails at u0={} r={} n={}", r.prog.u0(), r.prog.r(), r.n));
    }

    let mut expected_cells = BTreeSet::new();
    let mut expected_units = 0usize;
    for (a, l, alpha, r) in admissible_params() {
        for p in coprime_pairs(7, r, r) {
            expected_units += 1;
            let start = l * alpha * r;
            for n in start..=start + 20 {
                expected_cells.insert((p.u0(), r, n, a, l, alpha));
            }
        }
    }
    let held: BTreeSet<_> = outcome
        .reports
        .iter()
        .filter(|r| r.holds == Some(true))
        .map(|r| {
            (r.prog.u0(), r.prog.r(), r.n, r.params.a().unwrap(), r.params.l().unwrap(), r.params.alpha().unwrap())
        })
        .collect();
    ensure(held == expected_cells, || {
        format!("bound held on {} cells, expected {}", held.len(), expected_cells.len())
    })?;
    for lemma in [LemmaId::L2_3, LemmaId::DivFactorial, LemmaId::DivCofactor] {
        let got = count_verified(&outcome.verdicts, lemma);
        ensure(got == expected_cells.len(), || format!("{lemma}: {got} verified, expected {}", expected_cells.len()))?;
    }
    let got = count_verified(&outcome.verdicts, LemmaId::Ineq2_5);
    ensure(got == expected_units, || format!("ineq_2_5: {got} verified, expected {expected_units}"))?;
    Ok(format!(
        "{} bound cells and {} lemma verdicts verified",
        expected_cells.len(),
        outcome.verdicts.iter().filter(|v| v.status == Status::Verified).count()
    ))
}

fn criterion_two_factor_case_matches() -> Outcome {
    let outcome = sweep(&parameter_grid(vec![Family::HkT12, Family::NewT13], vec![])).map_err(|e| e.to_string())?;
    let mut hk = BTreeMap::new();
    for r in outcome.reports.iter().filter(|r| r.params.family() == Family::HkT12) {
        hk.insert((r.prog.u0(), r.prog.r(), r.n, r.params.a(), r.params.alpha()), r);
    }
    let mut compared = 0;
    for new in outcome
        .reports
        .iter()
        .filter(|r| r.params.family() == Family::NewT13 && r.params.l() == Some(2))
    {
        let key = (new.prog.u0(), new.prog.r(), new.n, new.params.a(), new.params.alpha());
        let Some(old) = hk.get(&key) else {
            return Err(format!("no matching two-factor cell for {key:?}"));
        };
        ensure(
            old.hypothesis_ok == new.hypothesis_ok && old.bound == new.bound && old.holds == new.holds,
            || format!("mismatch at {key:?}"),
        )?;
        compared += 1;
    }
    ensure(compared > 0 && compared == hk.len(), || format!("compared {compared} of {}", hk.len()))?;
    Ok(format!("{compared} cells identical"))
}

fn criterion_dominance() -> Outcome {
    let mut compared = 0;
    for (a, l, alpha, r) in admissible_params().into_iter().filter(|p| p.1 == 3) {
        let new = BoundParams::new_t13(a, l, alpha).map_err(|e| e.to_string())?;
        let old = BoundParams::hk_t12(a, alpha).map_err(|e| e.to_string())?;
        let factor = pow(&Nat::from(r), alpha - 1);
        for p in coprime_pairs(7, r, r) {
            let start = l * alpha * r;
            for n in start..=start + 20 {
                ensure(hypothesis(&new, &p, n) && hypothesis(&old, &p, n), || {
                    format!("hypotheses not both met at u0={} r={r} n={n}", p.u0())
                })?;
                let b_new = bound_value(&new, &p, n).map_err(|e| e.to_string())?;
                let b_old = bound_value(&old, &p, n).map_err(|e| e.to_string())?;
                ensure(b_new > b_old, || format!("no strict improvement at u0={} r={r} n={n}", p.u0()))?;
                ensure(b_new == &b_old * &factor, || format!("ratio is not r^(alpha-1) at u0={} r={r} n={n}", p.u0()))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} cells, ratio exactly r^(alpha-1)"))
}

fn criterion_consecutive_integers() -> Outcome {
    let config = SweepConfig {
        u0_range: IntRange::single(1),
        r_range: IntRange::single(1),
        n_range: Some(IntRange::new(1, 59)),
        n_window: None,
        a_range: IntRange::single(2),
        l_range: IntRange::single(2),
        alpha_range: IntRange::single(2),
        families: vec![Family::Nair],
        checks: vec![],
    };
    let outcome = sweep(&config).map_err(|e| e.to_string())?;
    ensure(outcome.failed == 0 && outcome.verified == 59, || {
        format!("verified {}, failed {}", outcome.verified, outcome.failed)
    })?;
    let p = Progression::new(1, 1).unwrap();
    for n in 1..=59u64 {
        let l_n = lcm_prefix(&p, n);
        let naive = (1..=n + 1).fold(BigUint::from(1u8), |acc, m| {
            let m = BigUint::from(m);
            let g = num_integer::Integer::gcd(&acc, &m);
            acc * m / g
        });
        ensure(l_n == naive, || format!("lcm(1..{}) mismatch", n + 1))?;
        ensure(l_n >= BigUint::from(1u8) << n, || format!("lcm(1..{}) < 2^{n}", n + 1))?;
    }
    Ok("59 of 59 verified".into())
}

fn criterion_oracles() -> Outcome {
    let mut chains = 0;
    for p in coprime_pairs(8, 1, 8) {
        let mut state = IncrementalState::start(p);
        for n in 1..=40 {
            state = state.extend();
            let fold = (0..=n).fold(BigUint::from(1u8), |acc, k| {
                let t = p.term(k);
                let g = num_integer::Integer::gcd(&acc, &t);
                acc * t / g
            });
            ensure(state.n() == n && *state.l_n() == fold, || format!("u0={} r={} n={n}", p.u0(), p.r()))?;
            chains += 1;
        }
    }
    let mut valuations = 0;
    for base in 2u64..=12 {
        for m in 0u64..=50 {
            let b = Nat::from(base);
            let direct = max_power_dividing(&b, &factorial(m)).map_err(|e| e.to_string())?;
            let fast = max_power_dividing_factorial(&b, m).map_err(|e| e.to_string())?;
            ensure(direct == fast, || format!("base={base} m={m}: {fast} vs {direct}"))?;
            valuations += 1;
        }
    }
    Ok(format!("{chains} lcm chains, {valuations} factorial valuations"))
}

fn criterion_fixtures() -> Outcome {
    let p = Progression::new(1, 2).unwrap();
    let rec = record(&p, 12).map_err(|e| e.to_string())?;
    ensure(rec.l_n == Nat::from(1673196525u64), || format!("L_12 = {}", rec.l_n))?;
    ensure(rec.k_n == 4, || format!("k_12 = {}", rec.k_n))?;
    ensure(rec.c_n_kn.to_string() == "239028075/128", || format!("C = {}", rec.c_n_kn))?;
    ensure(rec.a_n_kn == Nat::from(896u32), || format!("A = {}", rec.a_n_kn))?;
    ensure(lcm_suffix(&p, 12, 4).unwrap() == rec.l_n, || "L_12,4 differs from L_12".into())?;
    ensure(p.shift_index(10) == 4, || "k_10 != 4".into())?;

    let t13 = BoundParams::new_t13(2, 3, 2).unwrap();
    let bound = bound_value(&t13, &p, 12).map_err(|e| e.to_string())?;
    ensure(bound == Nat::from(4251528u64), || format!("bound = {bound}"))?;

    let q = Progression::new(3, 2).unwrap();
    let rec = record(&q, 8).map_err(|e| e.to_string())?;
    ensure(
        rec.k_n == 2 && rec.l_n_kn == Nat::from(14549535u64) && rec.c_n_kn.to_string() == "969969/16"
            && rec.a_n_kn == Nat::from(240u32),
        || format!("(3,2,8) record {rec:?}"),
    )?;

    let rec = record(&Progression::new(5, 2).unwrap(), 3).map_err(|e| e.to_string())?;
    ensure(
        rec.k_n == 0 && rec.l_n == Nat::from(3465u32) && rec.c_n_kn.to_string() == "1155/2"
            && rec.a_n_kn == Nat::from(6u32),
        || format!("(5,2,3) record {rec:?}"),
    )?;
    let rec = record(&Progression::new(1, 1).unwrap(), 5).map_err(|e| e.to_string())?;
    ensure(
        rec.k_n == 3 && rec.l_n == Nat::from(60u32) && rec.a_n_kn == Nat::from(1u8),
        || format!("(1,1,5) record {rec:?}"),
    )?;
    Ok("all fixtures match".into())
}

fn criterion_parallel_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    for jobs in ["1", "4"] {
        let rows = dir.path().join(format!("rows-{jobs}.jsonl"));
        let verdicts = dir.path().join(format!("verdicts-{jobs}.jsonl"));
        let started = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_aplcm"))
            .args(["--jobs", jobs, "sweep", "--u0", "1..7", "--r", "2..6", "--a", "2..3", "--l", "2..3"])
            .args(["--alpha-max", "4", "--families", "hk,new", "--n-window", "20", "--checks", "all"])
            .arg("--output")
            .arg(&rows)
            .arg("--verdicts")
            .arg(&verdicts)
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = started.elapsed();
        ensure(out.status.success(), || {
            format!("--jobs {jobs} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
        let rows = std::fs::read(&rows).map_err(|e| e.to_string())?;
        let verdicts = std::fs::read(&verdicts).map_err(|e| e.to_string())?;
        runs.push((out.stdout, rows, verdicts, elapsed));
    }
    let (one, four) = (&runs[0], &runs[1]);
    ensure(one.0 == four.0, || "summary differs".into())?;
    ensure(one.1 == four.1, || "bound rows differ".into())?;
    ensure(one.2 == four.2, || "verdict rows differ".into())?;
    Ok(format!(
        "{} bytes identical; jobs=1 {:.2?}, jobs=4 {:.2?}",
        one.1.len() + one.2.len(),
        one.3,
        four.3
    ))
}

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, title: "L_n / C_{n,0} is a positive integer", budget: Duration::from_secs(10), run: criterion_quotient_integral },
    Criterion { id: 2, title: "L_n >= L_{n,k_n} >= C_{n,k_n} >= u0 (r+1)^n", budget: Duration::from_secs(10), run: criterion_chain_of_lower_bounds },
    Criterion { id: 3, title: "three-parameter bound and its supporting checks", budget: Duration::from_secs(300), run: criterion_parameter_grid },
    Criterion { id: 4, title: "l = 2 coincides with the two-parameter family", budget: Duration::from_secs(60), run: criterion_two_factor_case_matches },
    Criterion { id: 5, title: "l = 3 improves on l = 2 by exactly r^(alpha-1)", budget: Duration::from_secs(60), run: criterion_dominance },
    Criterion { id: 6, title: "lcm(1..n) >= 2^(n-1) for n <= 60", budget: Duration::from_secs(10), run: criterion_consecutive_integers },
    Criterion { id: 7, title: "incremental lcm and Legendre match brute force", budget: Duration::from_secs(30), run: criterion_oracles },
    Criterion { id: 8, title: "pinned fixtures", budget: Duration::from_secs(5), run: criterion_fixtures },
    Criterion { id: 9, title: "sweep output is identical for --jobs 1 and --jobs 4", budget: Duration::from_secs(300), run: criterion_parallel_determinism },
];

fn main() -> ExitCode {
    let mut failed = 0;
    for c in CRITERIA {
        let started = Instant::now();
        let result = (c.run)();
        let elapsed = started.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}, but took {elapsed:.2?} (budget {:?})", c.budget)),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS  criterion {}: {} ({detail}; {elapsed:.2?})", c.id, c.title),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {}: {} ({why})", c.id, c.title);
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
