//! Tracking chains: validation, units, bases, critical indices, maximal
//! extension, reference sequences, evaluation, the ordering <_TC and the
//! assignment tc.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::components::{kappa, least_upsilon_bound, nu, EnumContext};
use crate::error::{ChainError, OpError, SyntaxError};
use crate::fine::{chi, lambda_op, mu, varrho};
use crate::notation::upsilon_seg;
use crate::ord::Ordinal;
use crate::ts::{lambda_ts, split_top_level, strip_parens, ts_rel as ts_tau, TrackingSequence};

/// Raw rows of a chain candidate.
pub type Rows = Vec<Vec<Ordinal>>;

/// Upper bound on maximal-extension steps before giving up.
pub const ME_STEP_LIMIT: usize = 10_000;

/// An index pair (i, j); j = 0 marks the sentinel forms (i, 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IndexPair {
    pub i: usize,
    pub j: usize,
}

impl IndexPair {
    pub const BASE: IndexPair = IndexPair { i: 1, j: 0 };

    pub fn new(i: usize, j: usize) -> Self {
        IndexPair { i, j }
    }
}

impl fmt::Display for IndexPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// How a unit τ*_i was selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnitKind {
    /// A proper entry (l, j) of the chain.
    Entry,
    /// The descent marker s_l, stored by position l (1-based).
    Descent(usize),
    /// The default (1, 0) with unit 1+υ_λ.
    Base,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unit {
    pub pair: IndexPair,
    #[serde(serialize_with = "crate::ts::ser_display")]
    pub tau: Ordinal,
    pub kind: UnitKind,
}

/// A descent s_l of the υ-segments of the τ_{i,1}, with (λ_l, t_l).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Descent {
    /// Row s_l (1-based) where the segment drops.
    pub row: usize,
    #[serde(serialize_with = "crate::ts::ser_display")]
    pub lambda: Ordinal,
    /// Finite part t_l of the new segment.
    pub depth: u64,
}

/// A tracking chain together with its derived data. Values returned by
/// [`validate`] satisfy all seven chain conditions.
#[derive(Debug, Clone)]
pub struct TrackingChain {
    rows: Rows,
    taus: Rows,
    lambda: Ordinal,
    t: u64,
    descents: Vec<Descent>,
    units: Vec<Unit>,
}

impl PartialEq for TrackingChain {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl Eq for TrackingChain {}

impl std::hash::Hash for TrackingChain {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.rows.hash(h)
    }
}

impl PartialOrd for TrackingChain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TrackingChain {
    /// The ordering <_TC.
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_tc(self, other)
    }
}

fn seg_key(a: &Ordinal) -> Result<(Ordinal, u64), OpError> {
    let s = upsilon_seg(a)?;
    Ok((s.lambda, s.offset))
}

fn upsilon_at(lambda: &Ordinal, k: u64) -> Result<Ordinal, OpError> {
    Ok(Ordinal::upsilon(&lambda.add(&Ordinal::nat(k)))?)
}

/// Derives the associated chain, segment data and units without checking
/// the chain conditions.
fn analyze(rows: Rows) -> Result<TrackingChain, ChainError> {
    if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
        return Err(ChainError::Malformed("empty chain or row".into()));
    }
    if let Some(a) = rows.iter().flatten().find(|a| !a.is_countable()) {
        return Err(ChainError::Malformed(format!("uncountable index {a}")));
    }
    let taus: Rows = rows
        .iter()
        .map(|r| r.iter().map(|a| a.end()).collect())
        .collect();
    let (lambda, _) = least_upsilon_bound(&rows[0][0])?;
    let mut t = 0u64;
    while (t as usize) < rows[0].len() && rows[0][t as usize] == upsilon_at(&lambda, t + 1)? {
        t += 1;
    }
    let floor = Ordinal::upsilon(&lambda)?;
    let mut descents = Vec::new();
    if let Some(s1) = (0..rows.len()).find(|&i| taus[i][0] < floor) {
        let (l, m) = seg_key(&taus[s1][0])?;
        descents.push(Descent { row: s1 + 1, lambda: l, depth: m });
        let mut prev = seg_key(&taus[s1][0])?;
        for i in s1 + 1..rows.len() {
            let cur = seg_key(&taus[i][0])?;
            if cur < prev {
                descents.push(Descent {
                    row: i + 1,
                    lambda: cur.0.clone(),
                    depth: cur.1,
                });
            }
            prev = cur;
        }
    }
    let mut c = TrackingChain {
        rows,
        taus,
        lambda,
        t,
        descents,
        units: Vec::new(),
    };
    c.units = (1..=c.row_count()).map(|i| c.compute_unit(i)).collect::<Result<_, _>>()?;
    Ok(c)
}

impl TrackingChain {
    /// ((0)).
    pub fn zero() -> Self {
        analyze(vec![vec![Ordinal::zero()]]).expect("((0)) is well formed")
    }

    pub fn rows(&self) -> &Rows {
        &self.rows
    }

    pub fn into_rows(self) -> Rows {
        self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.len() == 1 && self.rows[0].len() == 1 && self.rows[0][0].is_zero()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// m_i, 1-based.
    pub fn row_len(&self, i: usize) -> usize {
        self.rows[i - 1].len()
    }

    /// α_{i,j}, 1-based.
    pub fn alpha(&self, i: usize, j: usize) -> &Ordinal {
        &self.rows[i - 1][j - 1]
    }

    /// τ_{i,j} = end(α_{i,j}).
    pub fn tau(&self, i: usize, j: usize) -> &Ordinal {
        &self.taus[i - 1][j - 1]
    }

    pub fn taus(&self) -> &Rows {
        &self.taus
    }

    /// The last index pair (n, m_n).
    pub fn last_pair(&self) -> IndexPair {
        IndexPair::new(self.row_count(), self.row_len(self.row_count()))
    }

    /// υseg(α⃗) = (λ, t).
    pub fn upsilon_segment(&self) -> (Ordinal, u64) {
        (self.lambda.clone(), self.t)
    }

    pub fn descents(&self) -> &[Descent] {
        &self.descents
    }

    /// dom(α⃗) in lexicographic order.
    pub fn dom(&self) -> Vec<IndexPair> {
        let mut out = Vec::new();
        for i in 1..=self.row_count() {
            for j in 1..=self.row_len(i) {
                out.push(IndexPair::new(i, j));
            }
        }
        out
    }

    pub fn in_dom(&self, p: IndexPair) -> bool {
        p.i >= 1 && p.i <= self.row_count() && p.j >= 1 && p.j <= self.row_len(p.i)
    }

    fn compute_unit(&self, i: usize) -> Result<Unit, ChainError> {
        let t1 = self.tau(i, 1);
        for l in (1..i).rev() {
            for j in (1..self.row_len(l)).rev() {
                if self.tau(l, j) <= t1 {
                    return Ok(Unit {
                        pair: IndexPair::new(l, j),
                        tau: self.tau(l, j).clone(),
                        kind: UnitKind::Entry,
                    });
                }
            }
        }
        if let Some((k, d)) = self.descents.iter().enumerate().rev().find(|(_, d)| d.row <= i) {
            let floor = upsilon_at(&d.lambda, d.depth)?;
            return Ok(Unit {
                pair: IndexPair::new(d.row, 0),
                tau: Ordinal::one().add(&floor),
                kind: UnitKind::Descent(k + 1),
            });
        }
        Ok(Unit {
            pair: IndexPair::BASE,
            tau: Ordinal::one().add(&Ordinal::upsilon(&self.lambda)?),
            kind: UnitKind::Base,
        })
    }

    /// The i-th unit τ*_i with its index pair i*.
    pub fn unit(&self, i: usize) -> &Unit {
        &self.units[i - 1]
    }

    /// The base τ'_{i,j}.
    pub fn base(&self, i: usize, j: usize) -> &Ordinal {
        if j == 1 {
            &self.unit(i).tau
        } else {
            self.tau(i, j - 1)
        }
    }

    /// The i-th maximal base τ'_i.
    pub fn max_base(&self, i: usize) -> &Ordinal {
        self.base(i, self.row_len(i))
    }

    /// The i-th critical index ρ_i.
    pub fn critical_index(&self, i: usize) -> Result<Ordinal, OpError> {
        let mi = self.row_len(i);
        if mi == 1 {
            let unit = &self.unit(i).tau;
            let t = self.tau(i, 1);
            // a first row ending below its unit: the quotient does not exist
            let q = if t < unit {
                t.clone()
            } else {
                Ordinal::left_div(unit, t)?
            };
            return Ok(q.log()?.succ());
        }
        let tb = self.max_base(i);
        let t = self.tau(i, mi);
        if *t < mu(tb, None)? {
            let r = varrho(tb, t)?;
            return Ok(if chi(tb, t)?.0 { r.succ() } else { r.add(tb) });
        }
        Ok(lambda_op(tb)?.succ())
    }

    /// The initial chain α⃗↾(i, j); j = 0 follows the sentinel conventions.
    pub fn restrict(&self, i: usize, j: usize) -> Rows {
        if j == 0 {
            if i <= 1 {
                return Vec::new();
            }
            let m = self.row_len(i - 1);
            return self.restrict(i - 1, m - 1);
        }
        let mut out: Rows = self.rows[..i - 1].to_vec();
        out.push(self.rows[i - 1][..j].to_vec());
        out
    }

    /// α⃗↾i.
    pub fn restrict_row(&self, i: usize) -> Rows {
        self.rows[..i].to_vec()
    }

    /// Reference sequence rs_{i,j}(α⃗), 0 ≤ j ≤ m_i.
    pub fn rs(&self, i: usize, j: usize) -> Result<Vec<Ordinal>, ChainError> {
        if i < 1 || i > self.row_count() || j > self.row_len(i) {
            return Err(ChainError::Range(format!("rs at ({i},{j})")));
        }
        let sigma: Vec<Ordinal> = self.taus[i - 1][..j].to_vec();
        let u = self.unit(i);
        let mut out = match u.kind {
            UnitKind::Entry => self.rs(u.pair.i, u.pair.j)?,
            UnitKind::Descent(l) => {
                let d = &self.descents[l - 1];
                (1..=d.depth)
                    .map(|k| upsilon_at(&d.lambda, k))
                    .collect::<Result<_, _>>()?
            }
            UnitKind::Base => Vec::new(),
        };
        out.extend(sigma);
        Ok(out)
    }

    /// Reference index pair ref_{i,j}(α⃗).
    pub fn ref_pair(&self, i: usize, j: usize) -> IndexPair {
        if j >= 2 {
            return IndexPair::new(i, j - 1);
        }
        if i <= 1 {
            return IndexPair::BASE;
        }
        self.ref_pair(i - 1, self.row_len(i - 1))
    }

    /// Evaluation reference sequence ers_{i,j}(α⃗).
    pub fn ers(&self, i: usize, j: usize) -> Result<Vec<Ordinal>, ChainError> {
        if i == 1 && j == 0 {
            return Ok(Vec::new());
        }
        if !self.in_dom(IndexPair::new(i, j)) {
            return Err(ChainError::Range(format!("ers at ({i},{j})")));
        }
        let r = self.ref_pair(i, j);
        if r == IndexPair::BASE {
            return Ok(Vec::new());
        }
        self.rs(r.i, r.j)
    }

    /// Evaluations τ̃, α̃ and the initial values o_{i,j}.
    pub fn evaluate(&self) -> Result<Evaluation, ChainError> {
        if self.is_zero() {
            let z = vec![vec![Ordinal::zero()]];
            return Ok(Evaluation {
                tilde_tau: z.clone(),
                tilde_alpha: z.clone(),
                initial: z,
            });
        }
        let mut tt = Vec::new();
        let mut ta = Vec::new();
        let mut init: Rows = Vec::new();
        let mut prev = Ordinal::zero();
        for i in 1..=self.row_count() {
            let (mut rt, mut ra, mut ro) = (Vec::new(), Vec::new(), Vec::new());
            for j in 1..=self.row_len(i) {
                let ctx = EnumContext::new(&self.ers(i, j)?)?;
                let (t, a) = if j == 1 {
                    (kappa(&ctx, self.tau(i, j))?, kappa(&ctx, self.alpha(i, j))?)
                } else {
                    (nu(&ctx, self.tau(i, j))?, nu(&ctx, self.alpha(i, j))?)
                };
                let o = if j == 1 {
                    prev.add(&a)
                } else {
                    let last_t: &Ordinal = rt.last().unwrap();
                    let o_prev: &Ordinal = ro.last().unwrap();
                    o_prev.add(&last_t.lsub(&a).map_err(|_| {
                        ChainError::Invariant(format!(
                            "τ̃ = {last_t} is not a left part of α̃ = {a} at ({i},{j})"
                        ))
                    })?)
                };
                rt.push(t);
                ra.push(a);
                ro.push(o);
            }
            prev = ro.last().unwrap().clone();
            tt.push(rt);
            ta.push(ra);
            init.push(ro);
        }
        Ok(Evaluation {
            tilde_tau: tt,
            tilde_alpha: ta,
            initial: init,
        })
    }

    /// o(α⃗).
    pub fn value(&self) -> Result<Ordinal, ChainError> {
        Ok(self.evaluate()?.value())
    }
}

/// Rows as nested arrays of term strings.
pub fn rows_as_strings(r: &[Vec<Ordinal>]) -> Vec<Vec<String>> {
    r.iter()
        .map(|row| row.iter().map(|a| a.to_string()).collect())
        .collect()
}

impl Serialize for TrackingChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        rows_as_strings(&self.rows).serialize(s)
    }
}

/// τ̃_{i,j}, α̃_{i,j} and o_{i,j}, stored row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub tilde_tau: Rows,
    pub tilde_alpha: Rows,
    pub initial: Rows,
}

impl Evaluation {
    pub fn tilde_tau(&self, i: usize, j: usize) -> &Ordinal {
        &self.tilde_tau[i - 1][j - 1]
    }

    pub fn initial(&self, i: usize, j: usize) -> &Ordinal {
        &self.initial[i - 1][j - 1]
    }

    pub fn value(&self) -> Ordinal {
        self.initial.last().unwrap().last().unwrap().clone()
    }
}

fn fail(cond: u8, msg: impl Into<String>) -> ChainError {
    ChainError::Condition {
        cond,
        msg: msg.into(),
    }
}

/// Checks all chain conditions and returns the validated chain.
pub fn validate(rows: Rows) -> Result<TrackingChain, ChainError> {
    let c = analyze(rows)?;
    if c.is_zero() {
        return Ok(c);
    }
    for p in c.dom() {
        check_step(&c, p.i, p.j)?;
    }
    Ok(c)
}

/// The conditions that become checkable once α_{i,j} is appended.
fn check_step(c: &TrackingChain, i: usize, j: usize) -> Result<(), ChainError> {
    let a = c.alpha(i, j);
    if a.is_zero() {
        return Err(fail(2, format!("zero index at ({i},{j})")));
    }
    if (i, j) == (1, 1) {
        let (lambda, m) = least_upsilon_bound(a)?;
        if m != 0 {
            return Err(fail(2, format!("{a} lies in no interval [υ_λ, υ_(λ+1)]")));
        }
        if !lambda.is_zero() && *a == Ordinal::upsilon(&lambda)? && (c.row_count() > 1 || c.row_len(1) > 1) {
            return Err(fail(2, format!("chain starting at {a} must be (({a}))")));
        }
    }
    if j >= 2 {
        let t = c.tau(i, j - 1);
        if !t.is_epsilon() {
            return Err(fail(3, format!("τ_({i},{}) = {t} is not an epsilon number", j - 1)));
        }
        let bound = match mu(t, None) {
            Ok(b) => b,
            Err(OpError::Undefined { .. }) => {
                return Err(fail(3, format!("μ is undefined at {t}")));
            }
            Err(e) => return Err(e.into()),
        };
        if *a > bound {
            return Err(fail(3, format!("α_({i},{j}) = {a} exceeds μ = {bound}")));
        }
        let lower = if j == 2 {
            &c.unit(i).tau
        } else {
            c.tau(i, j - 2)
        };
        if lower >= t {
            return Err(fail(5, format!("bases not increasing at ({i},{})", j - 1)));
        }
    }
    if j == 1 && i >= 2 {
        let (bound_a, bound_t) = if i == 2 {
            let b = c.upsilon_segment();
            (b.clone(), b)
        } else {
            (seg_key(c.alpha(i - 1, 1))?, seg_key(c.tau(i - 1, 1))?)
        };
        if seg_key(a)? > bound_a || seg_key(c.tau(i, 1))? > bound_t {
            return Err(fail(4, format!("υ-segments increase at row {i}")));
        }
        let rho = c.critical_index(i - 1)?;
        if *a >= rho {
            return Err(fail(6, format!("α_({i},1) = {a} ≥ ρ_{} = {rho}", i - 1)));
        }
        let mp = c.row_len(i - 1);
        let tm = c.tau(i - 1, mp);
        if c.max_base(i - 1) < tm && tm.is_epsilon() && a == tm {
            return Err(fail(6, format!("α_({i},1) repeats τ_({},{mp})", i - 1)));
        }
        let prefix = analyze(c.restrict(i, 1))?;
        if let Some(p) = cml(&prefix)? {
            if c.tau(i, 1) == c.tau(p.i, p.j) {
                return Err(fail(7, format!("τ_({i},1) equals τ at cml {p}")));
            }
        }
    }
    Ok(())
}

/// The critical main line index pair, if any.
pub fn cml(c: &TrackingChain) -> Result<Option<IndexPair>, ChainError> {
    let mut found = None;
    'outer: for i in (1..=c.row_count()).rev() {
        for j in (1..c.row_len(i)).rev() {
            if c.alpha(i, j + 1) < &mu(c.tau(i, j), None)? {
                found = Some(IndexPair::new(i, j));
                break 'outer;
            }
        }
    }
    let p = match found {
        Some(p) => p,
        None => return Ok(None),
    };
    if !chi(c.tau(p.i, p.j), c.tau(p.i, p.j + 1))?.0 {
        return Ok(None);
    }
    let target = c.rows();
    let mut t = analyze(c.restrict(p.i, p.j + 1))?;
    for _ in 0..ME_STEP_LIMIT {
        if t.rows() == target {
            return Ok(Some(p));
        }
        match ec(&t)? {
            Some(next) if is_prefix(&next, target) => t = analyze(next)?,
            _ => return Ok(None),
        }
    }
    Err(ChainError::Invariant("cml reachability did not terminate".into()))
}

fn is_prefix(a: &Rows, b: &Rows) -> bool {
    if a.len() > b.len() {
        return false;
    }
    let k = a.len();
    a[..k - 1] == b[..k - 1] && b[k - 1].starts_with(&a[k - 1])
}

/// The extension candidate ec(α⃗); `None` when none exists.
pub fn ec(c: &TrackingChain) -> Result<Option<Rows>, OpError> {
    let n = c.row_count();
    let m = c.row_len(n);
    let t = c.tau(n, m);
    let tb = c.max_base(n);
    if t.is_upsilon() || c.is_zero() {
        return Ok(None);
    }
    let mut rows = c.rows().clone();
    if m == 1 {
        if tb == t {
            return Ok(None);
        }
        if tb < t && t.is_epsilon() {
            rows[n - 1].push(mu(t, None)?);
        } else {
            let q = if t < tb {
                t.clone()
            } else {
                Ordinal::left_div(tb, t)?
            };
            rows.push(vec![q.log()?]);
        }
        return Ok(Some(rows));
    }
    if t.is_one() {
        return Ok(None);
    }
    if tb < t && t.is_epsilon() {
        let mb = mu(tb, None)?;
        if *t == mb {
            let lb = lambda_op(tb)?;
            if mb < lb {
                rows.push(vec![lb]);
                return Ok(Some(rows));
            }
        }
        rows[n - 1].push(mu(t, None)?);
        return Ok(Some(rows));
    }
    if *t < mu(tb, None)? {
        rows.push(vec![varrho(tb, t)?]);
    } else {
        rows.push(vec![lambda_op(tb)?]);
    }
    Ok(Some(rows))
}

/// The maximal extension me(α⃗).
pub fn me(c: &TrackingChain) -> Result<TrackingChain, ChainError> {
    me_counted(c).map(|(t, _)| t)
}

/// me(α⃗) together with the number of extension steps taken.
pub fn me_counted(c: &TrackingChain) -> Result<(TrackingChain, usize), ChainError> {
    let mut t = c.clone();
    for steps in 0..ME_STEP_LIMIT {
        let cand = match ec(&t)? {
            None => return Ok((t, steps)),
            Some(r) => r,
        };
        match validate(cand) {
            Ok(next) => t = next,
            Err(ChainError::Condition { .. }) | Err(ChainError::Malformed(_)) => return Ok((t, steps)),
            Err(e) => return Err(e),
        }
    }
    Err(ChainError::Invariant("maximal extension did not terminate".into()))
}

/// me⁺(α⃗): the extension candidate of me(α⃗) if it exists, else me(α⃗).
/// The result need not be a tracking chain.
pub fn me_plus(c: &TrackingChain) -> Result<Rows, ChainError> {
    let m = me(c)?;
    Ok(match ec(&m)? {
        Some(r) => r,
        None => m.into_rows(),
    })
}

/// α⃗[ξ]; the result is a candidate and must be validated by the caller.
pub fn modify_last(rows: &Rows, xi: &Ordinal) -> Rows {
    let mut out = rows.clone();
    let n = out.len();
    let mn = out[n - 1].len();
    if !xi.is_zero() || (n == 1 && mn == 1) {
        out[n - 1][mn - 1] = xi.clone();
    } else if mn > 1 {
        out[n - 1].pop();
    } else if n > 1 {
        out.pop();
    }
    out
}

/// Whether a sequence is (υ_λ) for limit λ or (υ_{λ+1},…,υ_{λ+m}), m > 0.
pub fn is_upsilon_sequence(v: &[Ordinal]) -> bool {
    let idx: Option<Vec<&Ordinal>> = v.iter().map(|a| a.upsilon_index()).collect();
    let idx = match idx {
        Some(x) if !x.is_empty() => x,
        _ => return false,
    };
    if idx.len() == 1 && idx[0].is_limit() {
        return true;
    }
    let (lambda, k) = crate::notation::split_limit(idx[0]);
    k == 1
        && idx
            .iter()
            .enumerate()
            .all(|(p, i)| **i == lambda.add(&Ordinal::nat(p as u64 + 1)))
}

/// Whether a chain consists of a single υ-sequence row.
pub fn is_upsilon_chain(c: &TrackingChain) -> bool {
    c.row_count() == 1 && is_upsilon_sequence(&c.rows()[0])
}

/// The ordering <_TC.
pub fn cmp_tc(a: &TrackingChain, b: &TrackingChain) -> Ordering {
    if a.rows == b.rows {
        return Ordering::Equal;
    }
    if tc_less(a, b) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn tc_less(a: &TrackingChain, b: &TrackingChain) -> bool {
    let (n, l) = (a.row_count(), b.row_count());
    let r = (0..n.min(l)).take_while(|&k| a.rows[k] == b.rows[k]).count();
    let (i, j) = if r < n.min(l) {
        let q = a.rows[r]
            .iter()
            .zip(&b.rows[r])
            .take_while(|(x, y)| x == y)
            .count();
        if q > 0 {
            (r + 1, q)
        } else if r > 0 {
            (r, a.row_len(r))
        } else {
            (1, 0)
        }
    } else {
        (r, a.row_len(r))
    };
    let (mi, ki) = (a.row_len(i), b.row_len(i));
    if (i, j) == (n, a.row_len(n)) && (i, j) != (l, b.row_len(l)) {
        return true;
    }
    if j < mi.min(ki) && a.alpha(i, j + 1) < b.alpha(i, j + 1) {
        return true;
    }
    if j == mi && mi < ki && i < n && a.alpha(i + 1, 1) < a.tau(i, j) {
        return true;
    }
    if j == ki && ki < mi && i < l && a.tau(i, j) < b.alpha(i + 1, 1) {
        return true;
    }
    j == ki && ki == mi && i < n.min(l) && a.alpha(i + 1, 1) < b.alpha(i + 1, 1)
}

/// ts[τ⃗↾(i,j)](β) relative to a chain, given its evaluation.
pub fn ts_rel(
    c: &TrackingChain,
    ev: &Evaluation,
    at: IndexPair,
    beta: &Ordinal,
) -> Result<TrackingSequence, ChainError> {
    if at != IndexPair::BASE && (!c.in_dom(IndexPair::new(at.i, at.j.max(1))) || at.j >= c.row_len(at.i)) {
        return Err(ChainError::Range(format!("relative ts at {at}")));
    }
    if !beta.is_principal() {
        return Err(ChainError::Range(format!("{beta} is not additively principal")));
    }
    for p in c.dom().into_iter().rev() {
        if p > at || p.j >= c.row_len(p.i) {
            continue;
        }
        let tt = ev.tilde_tau(p.i, p.j);
        if tt <= beta {
            let t = c.tau(p.i, p.j);
            let q = Ordinal::left_div(tt, beta)?;
            return Ok(ts_tau(t, &t.mul(&q))?);
        }
    }
    let seg = upsilon_seg(beta)?;
    let floor = seg.floor();
    let tau = if floor.is_zero() { Ordinal::one() } else { floor };
    Ok(ts_tau(&tau, beta)?)
}

/// The tracking chain tc(α).
pub fn tc_assign(a: &Ordinal) -> Result<TrackingChain, ChainError> {
    if a.is_zero() {
        return Ok(TrackingChain::zero());
    }
    if !a.is_countable() {
        return Err(ChainError::Range(format!("{a} is uncountable")));
    }
    if let Some(c) = tc_memo().lock().unwrap().get(a) {
        return Ok(c.clone());
    }
    let parts = a.anf();
    let mut sum = parts[0].clone();
    let mut c = match tc_memo().lock().unwrap().get(&sum) {
        Some(c) => c.clone(),
        None => validate(vec![lambda_ts(&sum)?.into_parts()])
            .map_err(|e| invariant("tc of a principal", e))?,
    };
    remember(&sum, &c);
    for beta in &parts[1..] {
        sum = sum.add(beta);
        let known = tc_memo().lock().unwrap().get(&sum).cloned();
        c = match known {
            Some(k) => k,
            None => tc_step(&c, beta)?,
        };
        remember(&sum, &c);
    }
    Ok(c)
}

fn tc_memo() -> &'static Mutex<HashMap<Ordinal, TrackingChain>> {
    static MEMO: OnceLock<Mutex<HashMap<Ordinal, TrackingChain>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

fn remember(a: &Ordinal, c: &TrackingChain) {
    let mut m = tc_memo().lock().unwrap();
    if m.len() > 1 << 20 {
        m.clear();
    }
    m.insert(a.clone(), c.clone());
}

fn invariant(what: &str, e: ChainError) -> ChainError {
    match e {
        ChainError::Op(o) => ChainError::Op(o),
        other => ChainError::Invariant(format!("{what}: {other}")),
    }
}

/// Memo of relative tracking sequences used by one tc step.
struct RelTs<'a> {
    c: &'a TrackingChain,
    ev: &'a Evaluation,
    beta: &'a Ordinal,
    memo: HashMap<IndexPair, Vec<Ordinal>>,
}

impl RelTs<'_> {
    fn get(&mut self, p: IndexPair) -> Result<&[Ordinal], ChainError> {
        if !self.memo.contains_key(&p) {
            let v = ts_rel(self.c, self.ev, p, self.beta)?.into_parts();
            self.memo.insert(p, v);
        }
        Ok(&self.memo[&p])
    }

    fn first(&mut self, p: IndexPair) -> Result<Ordinal, ChainError> {
        Ok(self.get(p)?[0].clone())
    }
}

fn tc_step(c: &TrackingChain, beta: &Ordinal) -> Result<TrackingChain, ChainError> {
    let ev = c.evaluate()?;
    let n = c.row_count();
    let next_first = |k: usize| -> Ordinal {
        if k < n {
            c.alpha(k + 1, 1).clone()
        } else {
            Ordinal::zero()
        }
    };
    let mut rel = RelTs {
        c,
        ev: &ev,
        beta,
        memo: HashMap::new(),
    };

    let mut start = IndexPair::BASE;
    'search: for p in c.dom().into_iter().rev() {
        if p.j < c.row_len(p.i) && c.alpha(p.i, p.j + 1) < &mu(c.tau(p.i, p.j), None)? {
            start = p;
            break 'search;
        }
    }

    let mut candidates = Vec::new();
    if start == IndexPair::BASE {
        candidates.push(IndexPair::BASE);
    }
    candidates.extend(c.dom().into_iter().filter(|p| *p >= start));
    candidates.push(IndexPair::new(n + 1, 1));

    let mut rhos: HashMap<usize, Ordinal> = HashMap::new();
    let mut chosen = None;
    for cand in candidates {
        let k0 = cand.i;
        let mut ok = true;
        for k in k0..=n {
            let rho = match rhos.get(&k) {
                Some(r) => r.clone(),
                None => {
                    let r = c.critical_index(k)?;
                    rhos.insert(k, r.clone());
                    r
                }
            };
            let b1 = rel.first(IndexPair::new(k, c.row_len(k) - 1))?;
            if next_first(k).add(&b1) < rho {
                ok = false;
                break;
            }
        }
        if ok {
            'cond2: for k in k0..=n {
                for l in 1..=c.row_len(k).saturating_sub(2) {
                    if cand >= IndexPair::new(k, l) {
                        continue;
                    }
                    let b1 = rel.first(IndexPair::new(k, l))?;
                    if c.tau(k, l + 1).add(&b1) <= lambda_op(c.tau(k, l))? {
                        ok = false;
                        break 'cond2;
                    }
                }
            }
        }
        if ok {
            chosen = Some(cand);
            break;
        }
    }
    let stop = chosen.ok_or_else(|| ChainError::Invariant("no (k0,l0) found".into()))?;

    let (i0, j0) = (start.i, start.j);
    let (t0, tt0) = if start == IndexPair::BASE {
        (Ordinal::one(), Ordinal::one())
    } else {
        (c.tau(i0, j0).clone(), ev.tilde_tau(i0, j0).clone())
    };
    let case_1_2 = || -> Rows {
        let r = c.restrict(i0, j0 + 1);
        modify_last(&r, &c.alpha(i0, j0 + 1).succ())
    };

    let rows: Rows = if stop == start {
        match beta.cmp(&tt0) {
            Ordering::Less => {
                let b = rel.get(start)?.to_vec();
                let mut r = c.restrict(i0, j0 + 1);
                let head = varrho(&t0, c.tau(i0, j0 + 1))?.add(&b[0]);
                let mut row = vec![head];
                row.extend(b[1..].iter().cloned());
                r.push(row);
                r
            }
            Ordering::Equal => case_1_2(),
            Ordering::Greater => {
                let find_r0 = |b: &[Ordinal]| {
                    (0..b.len()).find(|&k| if k == 0 { t0.is_one() } else { b[k - 1] == t0 })
                };
                let mut b = rel.get(IndexPair::BASE)?.to_vec();
                let mut r0 = find_r0(&b);
                if r0.is_none() {
                    // a non-epsilon multiple of a υ-constant: its υ-prefixed
                    // sequence exposes the quotient
                    b = lambda_ts(beta)?.into_parts();
                    r0 = find_r0(&b);
                }
                let r0 = r0.ok_or_else(|| {
                    ChainError::Invariant(format!(
                        "no entry {t0} in ts({beta}) = {}",
                        TrackingSequence::new(b.clone()).unwrap()
                    ))
                })?;
                let mut r: Rows = c.rows()[..i0.saturating_sub(1)].to_vec();
                let mut row: Vec<Ordinal> = if i0 >= 1 && j0 >= 1 {
                    c.rows()[i0 - 1][..j0].to_vec()
                } else {
                    Vec::new()
                };
                row.push(c.alpha(i0, j0 + 1).add(&b[r0]));
                row.extend(b[r0 + 1..].iter().cloned());
                r.push(row);
                r
            }
        }
    } else {
        let (k0, l0) = (stop.i, stop.j);
        let tn = c.tau(n, c.row_len(n));
        if k0 == n + 1
            && rel.first(IndexPair::new(n, c.row_len(n) - 1))? == *tn
            && tn.is_epsilon()
            && tn > c.max_base(n)
        {
            let mut r = c.rows().clone();
            r[n - 1].push(Ordinal::one());
            r
        } else {
            let via_2_2 = if k0 <= n && l0 >= 1 && l0 + 2 <= c.row_len(k0) {
                let b = rel.get(stop)?.to_vec();
                let head = c.tau(k0, l0 + 1).add(&b[0]);
                if head <= lambda_op(c.tau(k0, l0))? {
                    let mut r = c.restrict(k0, l0 + 1);
                    let mut row = vec![head];
                    row.extend(b[1..].iter().cloned());
                    r.push(row);
                    Some(r)
                } else {
                    None
                }
            } else {
                None
            };
            let cand = match via_2_2 {
                Some(r) => r,
                None => {
                    if k0 == 0 || k0 <= i0 {
                        return Err(ChainError::Invariant(format!(
                            "case 2.3 with k0 = {k0} ≤ i0 = {i0}"
                        )));
                    }
                    let k = k0 - 1;
                    let b = rel.get(IndexPair::new(k, c.row_len(k) - 1))?.to_vec();
                    let mut r = c.restrict_row(k);
                    let mut row = vec![next_first(k).add(&b[0])];
                    row.extend(b[1..].iter().cloned());
                    r.push(row);
                    r
                }
            };
            match validate(cand.clone()) {
                Err(ChainError::Condition { cond: 7, .. }) => {
                    if *beta != tt0 {
                        return Err(ChainError::Invariant(format!(
                            "condition 7 fallback with β = {beta} ≠ τ̃ = {tt0}"
                        )));
                    }
                    case_1_2()
                }
                _ => cand,
            }
        }
    };
    validate(rows.clone()).map_err(|e| {
        invariant(
            &format!("tc step {} + {beta} → {}", Chain(c.rows()), Chain(&rows)),
            e,
        )
    })
}

/// Display adapter for raw rows.
pub struct Chain<'a>(pub &'a Rows);

impl fmt::Display for Chain<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, row) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (p, a) in row.iter().enumerate() {
                if p > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for TrackingChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Chain(&self.rows).fmt(f)
    }
}

/// Parses the text form `((a,b),(c))` into rows without validating.
pub fn parse_rows(s: &str) -> Result<Rows, ChainError> {
    let offset = |t: &str| t.as_ptr() as usize - s.as_ptr() as usize;
    let inner = strip_parens(s)
        .ok_or_else(|| ChainError::Malformed(format!("at byte 0: {s}: missing outer parentheses")))?;
    split_top_level(inner)
        .into_iter()
        .map(|row| {
            let body = strip_parens(row).ok_or_else(|| {
                ChainError::Malformed(format!("at byte {}: {row}: row needs parentheses", offset(row)))
            })?;
            split_top_level(body)
                .into_iter()
                .map(|t| {
                    let t = t.trim();
                    t.parse::<Ordinal>().map_err(|e| {
                        ChainError::Malformed(match e {
                            SyntaxError::Parse(pe) => {
                                format!("parse error at byte {}: {}", offset(t) + pe.pos, pe.msg)
                            }
                            SyntaxError::Term(te) => format!("at byte {}: {t}: {te}", offset(t)),
                        })
                    })
                })
                .collect()
        })
        .collect()
}

impl FromStr for TrackingChain {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        validate(parse_rows(s)?)
    }
}
