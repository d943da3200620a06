//! One PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hofix_core::bisim::{lemma1_sweep, value_bisim, Behaviour, LtsSpec};
use hofix_core::engine::{
    final_coalgebra, solve_hob, terminal_sequence, EngineConfig, FinalOutcome, OuterStatus, SeqStatus, SolutionReport,
};
use hofix_core::functor::{parse, Backend, Constants, FunctorInstance};
use hofix_core::laws::check_laws;
use hofix_core::mediator::{adjunction_sweep, solve_lifted};
use hofix_core::order::{chain, discrete, iso_check, lift, one, FinPoset};
use hofix_core::relation::Relation;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err(e: hofix_core::Error) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:?}, limit {limit:?}"))
}

fn flat(names: &[&str]) -> FinPoset {
    lift(&discrete(names).unwrap())
}

fn solve(text: &str, constants: &Constants) -> Result<SolutionReport, String> {
    let e = parse(text, constants).map_err(err)?;
    solve_hob(&e, constants, EngineConfig::default()).map_err(err)
}

fn pointed_sequence(text: &str) -> Result<hofix_core::engine::TerminalSequence, String> {
    let c = Constants::new();
    let e = parse(text, &c).map_err(err)?;
    let inst = FunctorInstance::new(e, Backend::PointedStrict, Arc::new(one()), Arc::new(one()), c).map_err(err)?;
    terminal_sequence(&inst, 8).map_err(err)
}

fn deterministic_family() -> Outcome {
    let start = Instant::now();
    let r = solve("(V -!> Id) + W", &Constants::new())?;
    within(start, Duration::from_secs(1))?;
    let n = match r.chain.status {
        OuterStatus::Solved(n) => n,
        ref s => return Err(format!("status {s:?}")),
    };
    check(n <= 1, format!("solved at {n}"))?;
    check(r.z.len() == 1, format!("|Z| = {}", r.z.len()))?;
    let w = r.witness.as_ref().ok_or("no witness")?;
    w.verify().map_err(err)?;
    Ok(format!("Solved({n}), |Z| = 1, witness verified"))
}

fn upset_pair() -> Outcome {
    let start = Instant::now();
    let us = pointed_sequence("Us(Id)")?;
    check(us.status == SeqStatus::Stabilized(0), format!("Us(Id) status {:?}", us.status))?;
    check(us.carrier().len() == 1, "Us(Id) carrier is not 1")?;
    let u = pointed_sequence("U(Id)")?;
    check(!u.is_stabilized(), "U(Id) stabilized")?;
    for (n, x) in u.stages.iter().enumerate() {
        check(
            iso_check(x, &chain(n + 1)).map_err(err)?.is_some(),
            format!("U(Id) stage {n} is not a {}-chain", n + 1),
        )?;
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("Us(Id) stabilized at 0 with carrier 1; U(Id) stages 0..{} are chains", u.stages.len() - 1))
}

fn atom_family() -> Outcome {
    let a = flat(&["a", "b"]);
    let c = Constants::new().with("A", a.clone()).map_err(err)?;
    let r = solve("(V -!> Id) + W + A", &c)?;
    check(matches!(r.chain.status, OuterStatus::Truncated(_)), format!("status {:?}", r.chain.status))?;
    let sizes = r.param_sizes();
    check(sizes.len() >= 3, format!("only {} parameters", sizes.len()))?;
    check(sizes[0] < sizes[1] && sizes[1] < sizes[2], format!("sizes {sizes:?}"))?;
    check(iso_check(&r.chain.params[1], &a).map_err(err)?.is_some(), "Z1 is not isomorphic to A")?;
    for (i, v) in r.chain.vertical.iter().enumerate() {
        v.verify().map_err(|e| format!("vertical ep {i}: {e}"))?;
    }
    Ok(format!("Truncated, sizes {sizes:?}, Z1 ≅ A, {} vertical eps verified", r.chain.vertical.len()))
}

fn ho_ccs() -> Outcome {
    let start = Instant::now();
    let c = Constants::new().with("C", flat(&["a", "b"])).map_err(err)?;
    let r = solve("Us(C * W * Id + C * (V -> Id) + Id)", &c)?;
    check(r.chain.rows.len() >= 2, format!("{} outer levels", r.chain.rows.len()))?;
    let mut eps = 0;
    for v in &r.chain.vertical {
        v.verify().map_err(|e| format!("vertical: {e}"))?;
        eps += 1;
    }
    let mut lambek = 0;
    for (n, row) in r.chain.rows.iter().enumerate() {
        for ep in row.seq.eps.iter().chain(&row.columns) {
            ep.verify().map_err(|e| format!("row {n}: {e}"))?;
            eps += 1;
        }
        if row.seq.is_stabilized() {
            match final_coalgebra(&row.seq, &row.instance).map_err(err)? {
                FinalOutcome::Exact(f) => check(f.lambek_check(), format!("row {n} fails Lambek"))?,
                FinalOutcome::Approximant { .. } => return Err(format!("row {n} stabilized without a final")),
            }
            lambek += 1;
        }
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} outer levels, sizes {:?}, {eps} eps verified, {lambek} stabilized rows pass Lambek",
        r.chain.rows.len(),
        r.param_sizes()
    ))
}

fn lazy_example() -> Outcome {
    let c = Constants::new();
    let e = parse("Lift((V -> Id) + W)", &c).map_err(err)?;
    let rep = solve_lifted(&e, &c, &one(), &one(), 8, 512).map_err(err)?;
    // Hand count: X0 = 1, X1 = lift(1 + 1) = 3, X2 = lift(3 + 1) = 5.
    check(rep.sizes_h.len() >= 3 && rep.sizes_h[..3] == [1, 3, 5], format!("first sizes {:?}", rep.sizes_h))?;
    for w in rep.sizes_h.windows(2) {
        check(w[1] == w[0] + 2, format!("sizes {:?} break the +2 recurrence", rep.sizes_h))?;
    }
    check(rep.sizes_h == rep.sizes_g, format!("backends differ: {:?} vs {:?}", rep.sizes_h, rep.sizes_g))?;
    for s in &rep.stages {
        let iso = s.iso.as_ref().ok_or(format!("no iso at stage {}", s.stage))?;
        iso.verify().map_err(err)?;
    }
    check(rep.stages.len() == rep.sizes_h.len(), "not every computed stage compared")?;
    let sweep = adjunction_sweep(4, 4).map_err(err)?;
    check(sweep.failures == 0, format!("{} adjunction failures", sweep.failures))?;
    Ok(format!(
        "sizes {:?}, {} stagewise isos, adjunction holds on {} pairs",
        rep.sizes_h,
        rep.stages.len(),
        sweep.pairs
    ))
}

fn lemma1() -> Outcome {
    let start = Instant::now();
    let s = lemma1_sweep(2, 2).map_err(err)?;
    within(start, Duration::from_secs(60))?;
    check(s.instances == 36 * 2, format!("{} instances", s.instances))?;
    check(s.relations_checked == 36 * 2 * 16, format!("{} relations", s.relations_checked))?;
    check(s.failures == 0, format!("{} instances disagree", s.failures))?;
    Ok(format!("{} instances, {} relations, predicates agree everywhere", s.instances, s.relations_checked))
}

fn identity_bisimulation() -> Outcome {
    let values: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
    let l = LtsSpec::new(values.clone(), values, (0..4).map(Behaviour::Output).collect()).map_err(err)?;
    let r = value_bisim(&l, &l).map_err(err)?;
    check(r == Relation::identity(4), format!("got {r:?}"))?;
    Ok("greatest bisimulation is the identity on 4 states".into())
}

fn property_suites() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_hofix"))
        .args(["check-laws", "--seed", "42"])
        .output()
        .map_err(|e| e.to_string())?;
    let transcript = String::from_utf8_lossy(&out.stdout).into_owned();
    check(
        out.status.code() == Some(0),
        format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)),
    )?;
    let again = check_laws(42).map_err(err)?;
    check(again.transcript() == transcript, "transcript differs between runs")?;
    check(again.ok(), format!("{} failures", again.failures()))?;
    let samples: usize = again.suites.iter().map(|s| s.samples).sum();
    Ok(format!("{} suites, {samples} samples, zero failures, deterministic", again.suites.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("deterministic family", deterministic_family),
        ("upset pair", upset_pair),
        ("atom-extended family", atom_family),
        ("HO-CCS family", ho_ccs),
        ("lazy example", lazy_example),
        ("quotient bisimulation equivalence", lemma1),
        ("identity bisimulation", identity_bisimulation),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail} ({:.2?})", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
