//! Verification suites shared by the command line `verify` verb and the
//! acceptance tests.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::chain::{cmp_tc, me_counted, tc_assign, TrackingChain, ME_STEP_LIMIT};
use crate::closed::{close, is_closed};
use crate::error::ChainError;
use crate::fine::GoldenRecord;
use crate::notation::{enumerate_terms, TermUniverse};
use crate::ord::Ordinal;
use crate::query::{in_index_class, le1, le2, lh, substructure, succ2_enum, ReachValue};
use crate::r1::{sampled_agreement, R1Term};
use crate::ts::{eval_o_ts, lambda_ts};

/// Witnesses kept per suite; further failures are only counted.
const WITNESS_LIMIT: usize = 12;

fn p(s: &str) -> Ordinal {
    s.parse().expect("built-in term")
}

/// υ-indices used by the built-in families.
pub fn default_upsilon_indices() -> Vec<Ordinal> {
    ["1", "2", "3", "w", "w+1", "w*2", "w^2"].iter().map(|s| p(s)).collect()
}

/// All terms of length ≤ 18 below ϑ₀(ϑ₁(ϑ₂(0))).
pub fn default_family() -> TermUniverse {
    TermUniverse {
        bound: Some(p("th_0(th_1(th_2(0)))")),
        max_length: 18,
        max_width: usize::MAX,
        upsilon_indices: default_upsilon_indices(),
        max_level: 2,
    }
}

/// Terms of length ≤ 10 and at most two summands below υ_{ω²+1}.
pub fn upsilon_family() -> TermUniverse {
    TermUniverse {
        bound: Some(p("v[w^2+1]")),
        max_length: 10,
        max_width: 2,
        upsilon_indices: default_upsilon_indices(),
        max_level: 2,
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checked: usize,
    pub unsupported: usize,
    pub failures: usize,
    pub witnesses: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            ..Default::default()
        }
    }

    fn fail(&mut self, w: String) {
        self.failures += 1;
        if self.witnesses.len() < WITNESS_LIMIT {
            self.witnesses.push(w);
        }
    }

    fn unsupported(&mut self, w: String) {
        self.unsupported += 1;
        if self.witnesses.len() < WITNESS_LIMIT {
            self.witnesses.push(format!("unsupported: {w}"));
        }
    }

    /// Records an error: Unsupported is tallied separately, anything else fails.
    fn error(&mut self, ctx: &str, e: &ChainError) {
        if e.is_unsupported() {
            self.unsupported(format!("{ctx}: {e}"));
        } else {
            self.fail(format!("{ctx}: {e}"));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.unsupported == 0 && self.checked > 0
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.unsupported += other.unsupported;
        self.failures += other.failures;
        for w in other.witnesses {
            if self.witnesses.len() < WITNESS_LIMIT {
                self.witnesses.push(w);
            }
        }
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: checked={} failures={} unsupported={}",
            self.suite, self.checked, self.failures, self.unsupported
        )?;
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        for w in &self.witnesses {
            write!(f, "\n  {w}")?;
        }
        Ok(())
    }
}

/// Round trip o(tc(a)) = a on every term and tc-order agreement on sampled pairs.
pub fn order_suite<R: Rng>(terms: &[Ordinal], pairs: usize, rng: &mut R) -> SuiteReport {
    let mut rep = SuiteReport::new("order");
    let mut assigned: Vec<(Ordinal, TrackingChain)> = Vec::new();
    for t in terms {
        rep.checked += 1;
        let c = match tc_assign(t) {
            Ok(c) => c,
            Err(e) => {
                rep.error(&format!("tc({t})"), &e);
                continue;
            }
        };
        match c.value() {
            Ok(v) if v == *t => assigned.push((t.clone(), c)),
            Ok(v) => rep.fail(format!("o(tc({t})) = o({c}) = {v}")),
            Err(e) => rep.error(&format!("o({c})"), &e),
        }
    }
    rep.notes.push(format!("{} terms, {} assigned", terms.len(), assigned.len()));
    if assigned.len() >= 2 {
        for _ in 0..pairs {
            let (a, ca) = assigned.choose(rng).unwrap();
            let (b, cb) = assigned.choose(rng).unwrap();
            rep.checked += 1;
            if cmp_tc(ca, cb) != a.cmp(b) {
                rep.fail(format!("cmp_tc({ca}, {cb}) disagrees with {a} vs {b}"));
            }
        }
        rep.notes.push(format!("{pairs} sampled pairs"));
    }
    rep
}

/// o(λ-ts(a)) = a, λ-ts(o(s)) = s, and lexicographic monotonicity, on the
/// additive principal members of `terms`.
pub fn ts_suite(terms: &[Ordinal]) -> SuiteReport {
    let mut rep = SuiteReport::new("ts");
    let mut principal: Vec<&Ordinal> = terms
        .iter()
        .filter(|t| t.is_principal() && !t.is_one() && t.is_countable())
        .collect();
    principal.sort();
    let mut prev: Option<(&Ordinal, crate::ts::TrackingSequence)> = None;
    for a in principal {
        rep.checked += 1;
        let s = match lambda_ts(a) {
            Ok(s) => s,
            Err(e) => {
                rep.error(&format!("ts({a})"), &e.into());
                prev = None;
                continue;
            }
        };
        match eval_o_ts(&s) {
            Ok(v) if v == *a => match lambda_ts(&v) {
                Ok(back) if back == s => {}
                Ok(back) => rep.fail(format!("ts(o({s})) = {back}")),
                Err(e) => rep.error(&format!("ts({v})"), &e.into()),
            },
            Ok(v) => rep.fail(format!("o(ts({a})) = o({s}) = {v}")),
            Err(e) => rep.error(&format!("o({s})"), &e.into()),
        }
        if let Some((pa, ps)) = &prev {
            if *ps >= s {
                rep.fail(format!("ts({pa}) = {ps} is not below ts({a}) = {s}"));
            }
        }
        prev = Some((a, s));
    }
    rep
}

/// R1 reach formula against the chain-based lh on random CNF terms.
pub fn r1_suite<R: Rng>(samples: usize, depth: u32, rng: &mut R) -> SuiteReport {
    let mut rep = SuiteReport::new("r1");
    let report = sampled_agreement(rng, depth, samples);
    rep.checked = report.rows.len();
    for row in report.mismatches() {
        rep.fail(format!("{}\t{}\t{}\tMISMATCH", row.term, row.r1_lh, row.r2_lh));
    }
    rep
}

/// Location of the golden corpus: `R2WB_GOLDEN_DIR` or the copy shipped with the crate.
pub fn golden_dir() -> PathBuf {
    std::env::var_os("R2WB_GOLDEN_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden"))
}

pub const GOLDEN_FILE: &str = "operators.tsv";

/// Recomputes every record of the operator corpus.
pub fn golden_suite(dir: &Path) -> SuiteReport {
    let mut rep = SuiteReport::new("golden");
    let path = dir.join(GOLDEN_FILE);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            rep.fail(format!("{}: {e}", path.display()));
            return rep;
        }
    };
    for (k, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        rep.checked += 1;
        match GoldenRecord::parse_line(line) {
            Ok(r) => {
                if let Some(now) = r.recheck() {
                    rep.fail(format!("line {}: {line} now gives {now}", k + 1));
                }
            }
            Err(e) => rep.fail(format!("line {}: {e}", k + 1)),
        }
    }
    rep
}

/// The υ-indices 1..8, ω..ω+8 and ω·2..ω·2+5.
pub fn chain_indices() -> Vec<Ordinal> {
    let mut out = Vec::new();
    for base in [Ordinal::zero(), Ordinal::omega(), Ordinal::omega().mul_nat(2)] {
        let top = if base == Ordinal::omega().mul_nat(2) { 5 } else { 8 };
        let start = if base.is_zero() { 1 } else { 0 };
        for k in start..=top {
            out.push(base.add(&Ordinal::nat(k)));
        }
    }
    out
}

/// ≤1 along all υ-constants, ≤2 exactly along the index class, and no
/// ≤2-successors outside it.
pub fn upsilon_chain_suite(indices: &[Ordinal], probes: &[Ordinal]) -> SuiteReport {
    let mut rep = SuiteReport::new("upsilon-chain");
    let ups = |i: &Ordinal| Ordinal::upsilon(i).expect("countable index");
    for iota in indices {
        let top = ups(iota);
        for xi in indices.iter().filter(|x| *x < iota) {
            let low = ups(xi);
            rep.checked += 1;
            match le1(&low, &top) {
                Ok(true) => {}
                Ok(false) => rep.fail(format!("not {low} <1 {top}")),
                Err(e) => rep.error(&format!("le1({low}, {top})"), &e),
            }
            rep.checked += 1;
            match le2(&low, &top) {
                Ok(v) if v == in_index_class(xi) => {}
                Ok(v) => rep.fail(format!("le2({low}, {top}) = {v}")),
                Err(e) => rep.error(&format!("le2({low}, {top})"), &e),
            }
        }
        if !in_index_class(iota) {
            rep.checked += 1;
            match succ2_enum(&top, 2) {
                Ok(v) if v == vec![top.clone()] => {}
                Ok(v) => rep.fail(format!("Succ2({top}) starts {v:?}")),
                Err(e) => rep.error(&format!("succ2({top})"), &e),
            }
            for b in probes.iter().filter(|b| **b > top) {
                rep.checked += 1;
                match le2(&top, b) {
                    Ok(false) => {}
                    Ok(true) => rep.fail(format!("{top} <2 {b}")),
                    Err(e) => rep.error(&format!("le2({top}, {b})"), &e),
                }
            }
        }
    }
    rep
}

/// me terminates on every chain whose terminal index is not a υ-constant.
pub fn me_suite(terms: &[Ordinal]) -> SuiteReport {
    let mut rep = SuiteReport::new("me");
    let mut max_steps = 0;
    for t in terms {
        let c = match tc_assign(t) {
            Ok(c) if !c.is_zero() => c,
            _ => continue,
        };
        let n = c.row_count();
        if c.alpha(n, c.row_len(n)).is_upsilon() {
            continue;
        }
        rep.checked += 1;
        match me_counted(&c) {
            Ok((_, steps)) => max_steps = max_steps.max(steps),
            Err(e) => rep.error(&format!("me({c})"), &e),
        }
    }
    rep.notes.push(format!("max steps {max_steps} (limit {ME_STEP_LIMIT})"));
    rep
}

/// Closure of random singletons: finite, idempotent, and closed when re-checked.
pub fn closure_suite<R: Rng>(terms: &[Ordinal], seeds: usize, rng: &mut R) -> SuiteReport {
    let mut rep = SuiteReport::new("closure");
    let mut largest = 0;
    for _ in 0..seeds {
        let t = terms.choose(rng).expect("nonempty family");
        rep.checked += 1;
        let c = match tc_assign(t) {
            Ok(c) => c,
            Err(e) => {
                rep.error(&format!("tc({t})"), &e);
                continue;
            }
        };
        let once = match close([&c]) {
            Ok(cl) => cl,
            Err(e) => {
                rep.error(&format!("close({{{c}}})"), &e);
                continue;
            }
        };
        largest = largest.max(once.chains.len());
        match close(once.chains.iter()) {
            Ok(twice) if twice.chains == once.chains => {}
            Ok(twice) => rep.fail(format!(
                "close({{{c}}}) not idempotent: {} then {} chains",
                once.chains.len(),
                twice.chains.len()
            )),
            Err(e) => rep.error(&format!("re-close({{{c}}})"), &e),
        }
        match is_closed(once.chains.iter()) {
            Ok(true) => {}
            Ok(false) => rep.fail(format!("close({{{c}}}) fails a clause")),
            Err(e) => rep.error(&format!("is_closed({{{c}}})"), &e),
        }
    }
    rep.notes.push(format!("largest closure {largest}"));
    rep
}

/// ϑ₀(1+a) is the (1+a)-th non-epsilon additive principal number, i.e. ω^(1+a) below ε₀.
pub fn theta_suite(terms: &[Ordinal]) -> SuiteReport {
    let mut rep = SuiteReport::new("theta");
    for a in terms.iter().filter(|a| R1Term::try_from(*a).is_ok()) {
        rep.checked += 1;
        let arg = Ordinal::one().add(a);
        match Ordinal::theta(0, None, &arg) {
            Ok(v) => {
                let ok = v.is_principal() && !v.is_epsilon() && v.log().ok() == Some(arg.clone());
                if !ok {
                    rep.fail(format!("th_0({arg}) = {v}"));
                }
            }
            Err(e) => rep.fail(format!("th_0({arg}): {e}")),
        }
    }
    rep
}

/// Forest laws, the pattern condition for ≤2 inside ≤1, and ≤1-convexity
/// on random substructures drawn from `points`.
pub fn probe_suite<R: Rng>(points: &[Ordinal], count: usize, size: usize, rng: &mut R) -> SuiteReport {
    let mut rep = SuiteReport::new("probes");
    for _ in 0..count {
        let k = rng.gen_range(2..=size);
        let pts: Vec<Ordinal> = points.choose_multiple(rng, k).cloned().collect();
        rep.checked += 1;
        let s = match substructure(&pts) {
            Ok(s) => s,
            Err(e) => {
                rep.error("substructure", &e);
                continue;
            }
        };
        let x = &s.points;
        let n = s.len();
        for a in 0..n {
            let reach = match lh(&x[a]) {
                Ok(r) => r,
                Err(e) => {
                    rep.error(&format!("lh({})", x[a]), &e);
                    continue;
                }
            };
            for b in a..n {
                if s.r2[a][b] && !s.r1[a][b] {
                    rep.fail(format!("{} <2 {} but not <1", x[a], x[b]));
                }
                let within = match &reach {
                    ReachValue::Infinity => true,
                    ReachValue::Finite(r) => x[b] <= *r,
                };
                if s.r1[a][b] != within {
                    rep.fail(format!("le1({}, {}) = {} but lh = {reach}", x[a], x[b], s.r1[a][b]));
                }
                for c in b..n {
                    for (rel, name) in [(&s.r1, "1"), (&s.r2, "2")] {
                        if rel[a][c] && rel[b][c] && !rel[a][b] {
                            rep.fail(format!("forest law fails for ≤{name} at {}, {}, {}", x[a], x[b], x[c]));
                        }
                    }
                    if s.r2[a][c] && s.r1[a][b] && s.r1[b][c] && !s.r2[a][b] {
                        rep.fail(format!("pattern law fails at {}, {}, {}", x[a], x[b], x[c]));
                    }
                    if s.r1[a][c] && !s.r1[a][b] {
                        rep.fail(format!("≤1 not convex at {}, {}, {}", x[a], x[b], x[c]));
                    }
                }
            }
        }
    }
    rep
}

/// Enumerates a family.
pub fn family_terms(u: &TermUniverse) -> Vec<Ordinal> {
    enumerate_terms(u)
}
