//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! A criterion passes only when every case was checked and none failed.
//! Cases outside the evaluable fragment are counted as unsupported and turn
//! the line into FAIL. The process exits nonzero when some criterion found
//! a wrong answer (a counterexample); with `R2WB_STRICT=1` any FAIL line does.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use r2wb::chain::tc_assign;
use r2wb::fine::{lambda_op, mu};
use r2wb::query::{le2, lh, lh2, pred2, succ2_enum, LimitScheme, PredResult, ReachValue};
use r2wb::verify::{self, SuiteReport};
use r2wb::Ordinal;

const SEED: u64 = 0;
/// Criterion 1: family size and sampled pairs.
const MIN_FAMILY: usize = 10_000;
const ORDER_PAIRS: usize = 100_000;
const ORDER_BUDGET: Duration = Duration::from_secs(60);
/// Criterion 3.
const R1_SAMPLES: usize = 10_000;
const R1_DEPTH: u32 = 6;
/// Criterion 6.
const CLOSURE_SEEDS: usize = 1_000;
/// Criterion 8.
const PROBES: usize = 200;
const PROBE_SIZE: usize = 12;
/// Criterion 9.
const ROUND_TRIP_TERMS: usize = 10_000;
const NORM_BATCH: usize = 500;
/// Tolerance on every failure and unsupported count.
const ALLOWED_FAILURES: usize = 0;
const ALLOWED_UNSUPPORTED: usize = 0;

fn p(s: &str) -> Ordinal {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

struct Outcome {
    id: u8,
    title: &'static str,
    report: SuiteReport,
    extra_ok: bool,
    detail: String,
}

impl Outcome {
    fn new(id: u8, title: &'static str, report: SuiteReport) -> Self {
        Outcome {
            id,
            title,
            report,
            extra_ok: true,
            detail: String::new(),
        }
    }

    #[allow(clippy::absurd_extreme_comparisons)]
    fn passed(&self) -> bool {
        self.extra_ok
            && self.report.checked > 0
            && self.report.failures <= ALLOWED_FAILURES
            && self.report.unsupported <= ALLOWED_UNSUPPORTED
    }

    #[allow(clippy::absurd_extreme_comparisons)]
    fn wrong(&self) -> bool {
        self.report.failures > ALLOWED_FAILURES
    }

    fn print(&self) {
        let r = &self.report;
        println!(
            "criterion {} [{}] {}: checked={} failures={} unsupported={}{}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            r.checked,
            r.failures,
            r.unsupported,
            if self.detail.is_empty() { String::new() } else { format!(" ({})", self.detail) }
        );
        for n in &r.notes {
            println!("    note: {n}");
        }
        for w in r.witnesses.iter().take(5) {
            println!("    {w}");
        }
    }
}

fn named(suite: &str) -> SuiteReport {
    SuiteReport {
        suite: suite.to_string(),
        ..Default::default()
    }
}

fn check(rep: &mut SuiteReport, ok: bool, what: String) {
    rep.checked += 1;
    if !ok {
        rep.failures += 1;
        rep.witnesses.push(what);
    }
}

fn pinned_values(family: &[Ordinal]) -> SuiteReport {
    let mut rep = named("pinned");
    let greatest = |s: &str| pred2(&p(s)).ok().and_then(|r| r.greatest().cloned());
    let reach = |r: Result<ReachValue, _>| r.ok();

    check(&mut rep, greatest("v[w]*v[17]") == Some(p("v[w]")), "pred2(v[w]*v[17])".into());
    check(
        &mut rep,
        reach(lh(&p("v[w]*v[17]"))) == Some(ReachValue::Finite(p("v[w]*v[17]+v[17]"))),
        "lh(v[w]*v[17])".into(),
    );
    check(&mut rep, greatest("v[w]*v[17]+v[17]") == Some(p("v[18]")), "pred2(v[w]*v[17]+v[17])".into());

    let e0w = p("th_0(th_1(0))*w");
    check(
        &mut rep,
        le2(&e0w, &p("th_0(th_1(0))*(w+1)")).unwrap_or(false),
        "le2(e0*w, e0*(w+1))".into(),
    );
    let below: Vec<&Ordinal> = family.iter().filter(|b| **b < e0w).collect();
    let mut pairs = 0;
    for b in &below {
        match pred2(b) {
            Ok(PredResult::None) => {}
            Ok(r) => {
                pairs += 1;
                check(&mut rep, false, format!("pred2({b}) = {r} below e0*w"));
            }
            Err(e) => {
                rep.checked += 1;
                rep.unsupported += usize::from(e.is_unsupported());
                rep.failures += usize::from(!e.is_unsupported());
            }
        }
    }
    rep.checked += usize::from(pairs == 0);
    rep.notes.push(format!("{} family terms below e0*w have no <2-predecessor", below.len()));

    check(&mut rep, reach(lh2(&Ordinal::zero())) == Some(ReachValue::Finite(Ordinal::zero())), "lh2(0)".into());
    for s in ["v[1]", "v[w+1]"] {
        check(&mut rep, reach(lh(&p(s))) == Some(ReachValue::Infinity), format!("lh({s})"));
    }
    check(
        &mut rep,
        succ2_enum(&p("v[w]"), 3).ok() == Some(vec![p("v[w]"), p("v[w]*2"), p("v[w]*3")]),
        "Succ2(v[w]) prefix".into(),
    );
    check(
        &mut rep,
        matches!(pred2(&p("v[w]")), Ok(PredResult::Limit(LimitScheme::UpsilonChain { ref lambda })) if *lambda == p("w")),
        "Pred2(v[w]) scheme".into(),
    );
    for k in 1..8u64 {
        let v = Ordinal::upsilon(&Ordinal::nat(k)).expect("finite index");
        if family.contains(&v) {
            check(&mut rep, le2(&v, &p("v[w]")).ok() == Some(k >= 2), format!("v[{k}] in Pred2(v[w])"));
        }
    }
    for (tau, want) in [
        ("th_0(th_1(0))", "th_0(th_1(0))"),
        ("th_0(th_1(0)+w)", "th_0(th_1(0)+w)+1"),
        ("th_0(th_1(0)+w^2)", "th_0(th_1(0)+w^2)+2"),
    ] {
        check(&mut rep, lambda_op(&p(tau)).ok() == Some(p(want)), format!("lambda({tau})"));
    }
    check(&mut rep, mu(&p("v[1]"), None).ok() == Some(p("v[2]")), "mu(v[1])".into());

    rep.merge(verify::golden_suite(&verify::golden_dir()));
    rep
}

fn cli(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_r2wb"))
        .args(args)
        .output()
        .expect("run r2wb");
    (out.status.code(), out.stdout)
}

fn cli_round_trip(family: &[Ordinal], rng: &mut StdRng) -> SuiteReport {
    let mut rep = named("cli");
    let sample: Vec<String> = family
        .choose_multiple(rng, ROUND_TRIP_TERMS.min(family.len()))
        .map(|t| t.to_string())
        .collect();
    for batch in sample.chunks(NORM_BATCH) {
        let mut args = vec!["norm"];
        args.extend(batch.iter().map(String::as_str));
        let (code, out) = cli(&args);
        let text = String::from_utf8_lossy(&out);
        let lines: Vec<&str> = text.lines().collect();
        if code != Some(0) || lines.len() != batch.len() {
            rep.checked += batch.len();
            rep.failures += batch.len();
            rep.witnesses.push(format!("norm batch exited {code:?} with {} lines", lines.len()));
            continue;
        }
        for (want, got) in batch.iter().zip(lines) {
            let parsed = got.parse::<Ordinal>().ok().map(|t| t.to_string());
            check(&mut rep, got == want && parsed.as_deref() == Some(want), format!("{want} printed as {got}"));
        }
    }
    let transcripts: [(&[&str], &str); 3] = [
        (&["lh", "v[w]*v[17]"], "v[w]*v[17]+v[17]\n"),
        (&["pred2", "v[w]*v[17]+v[17]"], "v[18]\n"),
        (&["cmp", "0", "1"], "<\n"),
    ];
    for (args, want) in transcripts {
        let (code, out) = cli(args);
        check(
            &mut rep,
            code == Some(0) && out == want.as_bytes(),
            format!("`r2wb {}` gave {:?}", args.join(" "), String::from_utf8_lossy(&out)),
        );
    }
    rep
}

fn main() -> ExitCode {
    let mut rng = StdRng::seed_from_u64(SEED);
    let family = verify::family_terms(&verify::default_family());
    let mut outcomes = Vec::new();

    let start = Instant::now();
    let order = verify::order_suite(&family, ORDER_PAIRS, &mut rng);
    let elapsed = start.elapsed();
    let mut o = Outcome::new(1, "order isomorphism", order);
    o.extra_ok = family.len() >= MIN_FAMILY && elapsed <= ORDER_BUDGET;
    o.detail = format!("{} terms, {:.1}s of {}s", family.len(), elapsed.as_secs_f64(), ORDER_BUDGET.as_secs());
    outcomes.push(o);

    outcomes.push(Outcome::new(2, "tracking-sequence round trips", verify::ts_suite(&family)));
    outcomes.push(Outcome::new(
        3,
        "R1/R2 agreement",
        verify::r1_suite(R1_SAMPLES, R1_DEPTH, &mut rng),
    ));
    outcomes.push(Outcome::new(4, "pinned values", pinned_values(&family)));
    outcomes.push(Outcome::new(
        5,
        "maximal <2-chain",
        verify::upsilon_chain_suite(&verify::chain_indices(), &family),
    ));
    let mut closure = verify::me_suite(&family);
    closure.merge(verify::closure_suite(&family, CLOSURE_SEEDS, &mut rng));
    outcomes.push(Outcome::new(6, "termination and closure", closure));
    outcomes.push(Outcome::new(7, "theta closed form", verify::theta_suite(&family)));
    let points: Vec<Ordinal> = family.iter().filter(|t| tc_assign(t).is_ok()).cloned().collect();
    outcomes.push(Outcome::new(
        8,
        "forest and convexity probes",
        verify::probe_suite(&points, PROBES, PROBE_SIZE, &mut rng),
    ));
    outcomes.push(Outcome::new(9, "command line", cli_round_trip(&family, &mut rng)));

    for o in &outcomes {
        o.print();
    }
    let passed = outcomes.iter().filter(|o| o.passed()).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());

    let strict = std::env::var("R2WB_STRICT").is_ok_and(|v| v == "1");
    let broken = outcomes.iter().any(|o| o.wrong() || (strict && !o.passed()));
    if broken {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
