//! Structure queries on R2: greatest predecessors, reach, successor sets,
//! the relations ≤1 and ≤2, and finite substructures.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::chain::{cml, me, modify_last, tc_assign, validate, IndexPair, TrackingChain, UnitKind};
use crate::components::{dp, kappa, EnumContext};
use crate::error::{ChainError, OpError};
use crate::fine::{chi, mu, varrho};
use crate::notation::{split_limit, upsilon_floor};
use crate::ord::Ordinal;

/// How the <_i-predecessors of a point accumulate when there is no greatest one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum LimitScheme {
    /// Pred_1(υ_λ) = ⋃_{0<ξ<λ} Pred_1(υ_ξ).
    UpsilonUnion {
        #[serde(serialize_with = "crate::ts::ser_display")]
        lambda: Ordinal,
    },
    /// Pred_1(α) = ⋃_{ξ<bound} Pred_1(o(α⃗[ξ])).
    IndexUnion {
        chain: TrackingChain,
        #[serde(serialize_with = "crate::ts::ser_display")]
        bound: Ordinal,
    },
    /// Pred_2(υ_λ) = {υ_ι : ι ∈ I, ι < λ}.
    UpsilonChain {
        #[serde(serialize_with = "crate::ts::ser_display")]
        lambda: Ordinal,
    },
}

/// Outcome of pred_1 / pred_2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredResult {
    Greatest {
        #[serde(serialize_with = "crate::ts::ser_display")]
        value: Ordinal,
    },
    None,
    Limit(LimitScheme),
}

impl PredResult {
    fn of(value: Ordinal) -> Self {
        if value.is_zero() {
            PredResult::None
        } else {
            PredResult::Greatest { value }
        }
    }

    pub fn greatest(&self) -> Option<&Ordinal> {
        match self {
            PredResult::Greatest { value } => Some(value),
            _ => None,
        }
    }
}

impl fmt::Display for PredResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredResult::Greatest { value } => write!(f, "{value}"),
            PredResult::None => write!(f, "none"),
            PredResult::Limit(LimitScheme::UpsilonUnion { lambda }) => {
                write!(f, "limit: union of Pred1(v[x]) for 0<x<{lambda}")
            }
            PredResult::Limit(LimitScheme::IndexUnion { chain, bound }) => {
                write!(f, "limit: union of Pred1(o({chain}[x])) for x<{bound}")
            }
            PredResult::Limit(LimitScheme::UpsilonChain { lambda }) => {
                write!(f, "limit: v[i] for i in I below {lambda}")
            }
        }
    }
}

/// A reach value lh / lh_2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReachValue {
    Finite(Ordinal),
    Infinity,
}

impl ReachValue {
    pub fn finite(&self) -> Option<&Ordinal> {
        match self {
            ReachValue::Finite(a) => Some(a),
            ReachValue::Infinity => None,
        }
    }
}

impl fmt::Display for ReachValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReachValue::Finite(a) => write!(f, "{a}"),
            ReachValue::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ReachValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ReachValue::Finite(a) => s.serialize_str(&a.to_string()),
            ReachValue::Infinity => s.serialize_str("inf"),
        }
    }
}

/// The index class I: ι > 1 and ι not the successor of a limit.
pub fn in_index_class(iota: &Ordinal) -> bool {
    if *iota <= Ordinal::one() {
        return false;
    }
    match iota.pred() {
        Some(p) => !p.is_limit(),
        None => true,
    }
}

fn upsilon(i: &Ordinal) -> Result<Ordinal, ChainError> {
    Ok(Ordinal::upsilon(i)?)
}

/// Whether a is υ_λ for a limit λ.
fn limit_upsilon(a: &Ordinal) -> Option<&Ordinal> {
    a.upsilon_index().filter(|i| i.is_limit())
}

/// Evaluates a candidate that the theory guarantees to be a tracking chain.
fn value_of(rows: crate::chain::Rows) -> Result<Ordinal, ChainError> {
    let c = validate(rows).map_err(|e| match e {
        ChainError::Op(o) => ChainError::Op(o),
        other => ChainError::Invariant(format!("expected a tracking chain: {other}")),
    })?;
    c.value()
}

/// pred_1(α) with the two limit schemes.
pub fn pred1(a: &Ordinal) -> Result<PredResult, ChainError> {
    if a.is_zero() {
        return Ok(PredResult::None);
    }
    let c = tc_assign(a)?;
    let n = c.row_count();
    let m = c.row_len(n);
    let (lambda, _) = c.upsilon_segment();
    if let Some(l) = limit_upsilon(a) {
        return Ok(PredResult::Limit(LimitScheme::UpsilonUnion { lambda: l.clone() }));
    }
    if (n, m) == (1, 1) && *c.alpha(1, 1) > upsilon(&lambda)? {
        return Ok(PredResult::of(upsilon(&lambda)?));
    }
    if m == 1 && n > 1 {
        let ev = c.evaluate()?;
        return Ok(PredResult::of(ev.initial(n - 1, c.row_len(n - 1)).clone()));
    }
    if m > 1 {
        let last = c.alpha(n, m);
        if let Some(xi) = last.pred() {
            let modified = modify_last(c.rows(), &xi);
            let v = if chi(c.tau(n, m - 1), &xi)?.0 {
                let mc = validate(modified).map_err(|e| ChainError::Invariant(e.to_string()))?;
                me(&mc)?.value()?
            } else {
                value_of(modified)?
            };
            return Ok(PredResult::of(v));
        }
        return Ok(PredResult::Limit(LimitScheme::IndexUnion {
            chain: c.clone(),
            bound: last.clone(),
        }));
    }
    Ok(PredResult::None)
}

/// pred_2(α) with the υ-chain limit scheme.
pub fn pred2(a: &Ordinal) -> Result<PredResult, ChainError> {
    if a.is_zero() {
        return Ok(PredResult::None);
    }
    if let Some(l) = limit_upsilon(a) {
        return Ok(PredResult::Limit(LimitScheme::UpsilonChain { lambda: l.clone() }));
    }
    let c = tc_assign(a)?;
    let n = c.row_count();
    let m = c.row_len(n);
    if m > 2 {
        return Ok(PredResult::of(c.evaluate()?.initial(n, m - 1).clone()));
    }
    let unit = c.unit(n);
    let (lambda, _) = c.upsilon_segment();
    let v = match unit.kind {
        UnitKind::Entry => c.evaluate()?.initial(unit.pair.i, unit.pair.j + 1).clone(),
        UnitKind::Base => {
            if unit.tau < *a {
                upsilon(&lambda)?
            } else {
                Ordinal::zero()
            }
        }
        UnitKind::Descent(l) => {
            let d = &c.descents()[l - 1];
            if d.depth == 0 {
                upsilon(&d.lambda)?
            } else {
                upsilon(&d.lambda.add(&Ordinal::nat(d.depth + 1)))?
            }
        }
    };
    Ok(PredResult::of(v))
}

/// Whether α is ≤2-minimal relative to υ_ξ for some ξ: m_n ≤ 2 and τ*_n = 1+υ_ξ.
pub fn is_upsilon_le2_minimal(a: &Ordinal) -> Result<bool, ChainError> {
    let c = tc_assign(a)?;
    let n = c.row_count();
    if c.row_len(n) > 2 {
        return Ok(false);
    }
    let u = &c.unit(n).tau;
    let core = if u.is_one() { Ordinal::zero() } else { u.clone() };
    Ok(core.is_zero() || core.is_upsilon() && split_limit(core.upsilon_index().unwrap()).1 == 0)
}

/// The least ι ∈ I with υ_ι ≥ a.
fn least_index_point_above(a: &Ordinal) -> Result<Ordinal, ChainError> {
    let floor = upsilon_floor(a)?;
    if upsilon(&floor)? == *a && in_index_class(&floor) {
        return Ok(floor);
    }
    let mut iota = floor.succ();
    while !in_index_class(&iota) {
        iota = iota.succ();
    }
    Ok(iota)
}

/// a ≤2 b.
pub fn le2(a: &Ordinal, b: &Ordinal) -> Result<bool, ChainError> {
    let mut b = b.clone();
    loop {
        match a.cmp(&b) {
            Ordering::Equal => return Ok(true),
            Ordering::Greater => return Ok(false),
            Ordering::Less => {}
        }
        match pred2(&b)? {
            PredResult::None => return Ok(false),
            PredResult::Greatest { value } => b = value,
            PredResult::Limit(LimitScheme::UpsilonChain { lambda }) => {
                let iota = least_index_point_above(a)?;
                if iota >= lambda {
                    return Ok(false);
                }
                b = upsilon(&iota)?;
            }
            PredResult::Limit(_) => unreachable!("pred2 has only the υ-chain limit"),
        }
    }
}

/// a ≤1 b.
pub fn le1(a: &Ordinal, b: &Ordinal) -> Result<bool, ChainError> {
    let mut b = b.clone();
    loop {
        match a.cmp(&b) {
            Ordering::Equal => return Ok(true),
            Ordering::Greater => return Ok(false),
            Ordering::Less => {}
        }
        match pred1(&b)? {
            PredResult::None => return Ok(false),
            PredResult::Greatest { value } => b = value,
            PredResult::Limit(LimitScheme::UpsilonUnion { .. }) => {
                b = upsilon(&upsilon_floor(a)?.succ())?;
            }
            PredResult::Limit(LimitScheme::IndexUnion { chain, .. }) => {
                b = least_modified_above(&chain, a)?;
            }
            PredResult::Limit(LimitScheme::UpsilonChain { .. }) => {
                unreachable!("pred1 has no υ-chain limit")
            }
        }
    }
}

/// The least o(α⃗[ξ]), ξ below the limit last index of α⃗, that is ≥ a.
fn least_modified_above(c: &TrackingChain, a: &Ordinal) -> Result<Ordinal, ChainError> {
    let n = c.row_count();
    let m = c.row_len(n);
    let at = |xi: &Ordinal| value_of(modify_last(c.rows(), xi));
    let v0 = at(&Ordinal::zero())?;
    if v0 >= *a {
        return Ok(v0);
    }
    let ta = tc_assign(a)?;
    let prefix = &c.rows()[n - 1][..m - 1];
    let extends = ta.row_count() >= n
        && ta.rows()[..n - 1] == c.rows()[..n - 1]
        && ta.rows()[n - 1].starts_with(prefix);
    if extends && ta.row_len(n) >= m {
        let zeta = ta.alpha(n, m);
        let v = at(zeta)?;
        if v >= *a {
            return Ok(v);
        }
        return at(&zeta.succ());
    }
    at(&Ordinal::one())
}

/// The greatest branching point gbo(α⃗).
pub fn gbo(c: &TrackingChain) -> Result<IndexPair, ChainError> {
    let mut cur = c.clone();
    loop {
        if cur.is_zero() {
            return Ok(IndexPair::new(1, 1));
        }
        let n = cur.row_count();
        let m = cur.row_len(n);
        let star = if m == 1 {
            cur.clone()
        } else {
            let mu_b = mu(cur.tau(n, m - 1), None)?;
            validate(modify_last(cur.rows(), &mu_b))
                .map_err(|e| ChainError::Invariant(format!("α* of {cur}: {e}")))?
        };
        match cml(&star)? {
            Some(p) => cur = validate(cur.restrict(p.i, p.j + 1))?,
            None => return Ok(cur.last_pair()),
        }
    }
}

enum UpsilonCase {
    Zero,
    SuccessorOfLimit,
    Limit,
    Higher { base: Ordinal },
}

fn upsilon_case(a: &Ordinal) -> Option<UpsilonCase> {
    if a.is_zero() {
        return Some(UpsilonCase::Zero);
    }
    let i = a.upsilon_index()?;
    let (lambda, k) = split_limit(i);
    Some(match k {
        0 => UpsilonCase::Limit,
        1 => UpsilonCase::SuccessorOfLimit,
        _ => UpsilonCase::Higher {
            base: Ordinal::upsilon(&lambda.add(&Ordinal::nat(k - 1))).expect("countable"),
        },
    })
}

/// lh(α), the maximal ≤1-successor.
pub fn lh(a: &Ordinal) -> Result<ReachValue, ChainError> {
    match upsilon_case(a) {
        Some(UpsilonCase::Zero) => return Ok(ReachValue::Finite(Ordinal::zero())),
        Some(_) => return Ok(ReachValue::Infinity),
        None => {}
    }
    let c = tc_assign(a)?;
    let p = gbo(&c)?;
    let col = if p.j > 2 { p.j - 1 } else { 1 };
    let ev = c.evaluate()?;
    let o = ev.initial(p.i, col);
    if o.is_upsilon() {
        return Ok(ReachValue::Infinity);
    }
    let ctx = EnumContext::new(&c.ers(p.i, col)?)?;
    Ok(ReachValue::Finite(o.add(&dp(&ctx, c.tau(p.i, col))?)))
}

/// τ̃ and η_max for a chain with m_n > 1.
fn second_successor_data(c: &TrackingChain) -> Result<(Ordinal, Ordinal), ChainError> {
    let n = c.row_count();
    let m = c.row_len(n);
    let tau = c.tau(n, m - 1);
    let ev = c.evaluate()?;
    let tt = ev.tilde_tau(n, m - 1).clone();
    let r = c.ref_pair(n, m);
    let ctx = EnumContext::new(&c.rs(r.i, r.j)?)?;
    let rho = varrho(tau, c.tau(n, m))?;
    let x = kappa(&ctx, &rho)?.add(&dp(&ctx, &rho)?);
    let (nu, _) = div_rem(&x, &tt)?;
    let eta = if chi(tau, c.tau(n, m))?.0 {
        nu.monus_one()
    } else {
        nu
    };
    Ok((tt, eta))
}

/// a = p·q + r with r < p, for additively principal p.
pub fn div_rem(a: &Ordinal, p: &Ordinal) -> Result<(Ordinal, Ordinal), OpError> {
    if !p.is_principal() {
        return Err(OpError::Domain {
            op: "div_rem",
            msg: format!("{p} is not additively principal"),
        });
    }
    let t = p.log()?;
    let mut q = Vec::new();
    let mut r = Vec::new();
    for part in a.anf() {
        let e = part.log()?;
        if e >= t {
            q.push(Ordinal::omega_pow(&t.lsub(&e)?));
        } else {
            r.push(part);
        }
    }
    Ok((Ordinal::sum_of(q), Ordinal::sum_of(r)))
}

/// lh_2(α), the maximal ≤2-successor.
pub fn lh2(a: &Ordinal) -> Result<ReachValue, ChainError> {
    match upsilon_case(a) {
        Some(UpsilonCase::Zero) | Some(UpsilonCase::SuccessorOfLimit) => {
            return Ok(ReachValue::Finite(a.clone()))
        }
        Some(_) => return Ok(ReachValue::Infinity),
        None => {}
    }
    let c = tc_assign(a)?;
    if c.row_len(c.row_count()) == 1 {
        return Ok(ReachValue::Finite(a.clone()));
    }
    let (tt, eta) = second_successor_data(&c)?;
    Ok(ReachValue::Finite(a.add(&tt.mul(&eta))))
}

/// The first `budget` elements of Succ_2(α) in increasing order.
pub fn succ2_enum(a: &Ordinal, budget: usize) -> Result<Vec<Ordinal>, ChainError> {
    let progression = |start: &Ordinal, step: &Ordinal, from: u64, max: Option<&Ordinal>| {
        (0..budget as u64)
            .map(|k| Ordinal::nat(k + from))
            .take_while(|eta| max.is_none_or(|m| eta <= m))
            .map(|eta| start.add(&step.mul(&eta)))
            .collect::<Vec<_>>()
    };
    match upsilon_case(a) {
        Some(UpsilonCase::Zero) | Some(UpsilonCase::SuccessorOfLimit) => {
            return Ok(vec![a.clone()].into_iter().take(budget).collect())
        }
        Some(UpsilonCase::Limit) => return Ok(progression(&Ordinal::zero(), a, 1, None)),
        Some(UpsilonCase::Higher { base }) => return Ok(progression(a, &base, 0, None)),
        None => {}
    }
    let c = tc_assign(a)?;
    if c.row_len(c.row_count()) == 1 {
        return Ok(vec![a.clone()].into_iter().take(budget).collect());
    }
    let (tt, eta) = second_successor_data(&c)?;
    Ok(progression(a, &tt, 0, Some(&eta)))
}

/// A finite substructure of R2 with its ≤1 / ≤2 matrices (row ≤ column).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteSubstructure {
    #[serde(serialize_with = "ser_points")]
    pub points: Vec<Ordinal>,
    pub r1: Vec<Vec<bool>>,
    pub r2: Vec<Vec<bool>>,
}

fn ser_points<S: serde::Serializer>(v: &[Ordinal], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|a| a.to_string()))
}

/// Builds the substructure on the given points (sorted, deduplicated).
pub fn substructure(points: &[Ordinal]) -> Result<FiniteSubstructure, ChainError> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let k = pts.len();
    let mut r1 = vec![vec![false; k]; k];
    let mut r2 = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i..k {
            r1[i][j] = le1(&pts[i], &pts[j])?;
            r2[i][j] = r1[i][j] && le2(&pts[i], &pts[j])?;
        }
    }
    Ok(FiniteSubstructure { points: pts, r1, r2 })
}

impl FiniteSubstructure {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Whether `map` (indices into `y`) is a covering of `x` into `y`.
pub fn is_covering(
    x: &FiniteSubstructure,
    y: &FiniteSubstructure,
    map: &[usize],
) -> Result<bool, ChainError> {
    if map.len() != x.len() || map.iter().any(|&t| t >= y.len()) {
        return Err(ChainError::Range("malformed covering map".into()));
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let (hi, hj) = (map[i], map[j]);
            if hi >= hj {
                return Ok(false);
            }
            if x.r1[i][j] && !y.r1[hi][hj] || x.r2[i][j] && !y.r2[hi][hj] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Ordinal {
        parse(s).unwrap()
    }

    fn fin(s: &str) -> ReachValue {
        ReachValue::Finite(p(s))
    }

    #[test]
    fn index_class() {
        assert!(in_index_class(&p("2")));
        assert!(in_index_class(&p("w")));
        assert!(!in_index_class(&p("w+1")));
        assert!(in_index_class(&p("w+2")));
        assert!(!in_index_class(&p("1")));
        assert!(!in_index_class(&p("0")));
    }

    #[test]
    fn worked_values() {
        assert_eq!(pred2(&p("v[w]*v[17]")).unwrap().greatest(), Some(&p("v[w]")));
        assert_eq!(lh(&p("v[w]*v[17]")).unwrap(), fin("v[w]*v[17]+v[17]"));
        assert_eq!(pred2(&p("v[w]*v[17]+v[17]")).unwrap().greatest(), Some(&p("v[18]")));
    }

    #[test]
    fn upsilon_reach() {
        assert_eq!(lh2(&p("0")).unwrap(), fin("0"));
        assert_eq!(lh(&p("0")).unwrap(), fin("0"));
        assert_eq!(lh(&p("v[1]")).unwrap(), ReachValue::Infinity);
        assert_eq!(lh2(&p("v[1]")).unwrap(), fin("v[1]"));
        assert_eq!(lh(&p("v[w+1]")).unwrap(), ReachValue::Infinity);
        assert_eq!(lh2(&p("v[w]")).unwrap(), ReachValue::Infinity);
        assert_eq!(
            succ2_enum(&p("v[w]"), 3).unwrap(),
            vec![p("v[w]"), p("v[w]*2"), p("v[w]*3")]
        );
        assert_eq!(
            succ2_enum(&p("v[3]"), 2).unwrap(),
            vec![p("v[3]"), p("v[3]+v[2]")]
        );
    }

    #[test]
    fn below_epsilon_zero() {
        assert_eq!(lh(&p("1")).unwrap(), fin("1"));
        assert_eq!(lh(&p("w")).unwrap(), fin("w+1"));
        assert_eq!(lh(&p("w^w")).unwrap(), fin("w^w+w+1"));
        assert_eq!(pred1(&p("w+1")).unwrap().greatest(), Some(&p("w")));
        assert_eq!(pred1(&p("w+2")).unwrap(), PredResult::None);
        assert_eq!(pred1(&p("w*2")).unwrap(), PredResult::None);
        assert!(le1(&p("w"), &p("w+1")).unwrap());
        assert!(!le1(&p("w"), &p("w+2")).unwrap());
        assert!(!le2(&p("w"), &p("w*2")).unwrap());
        assert_eq!(succ2_enum(&p("w"), 4).unwrap(), vec![p("w")]);
    }

    #[test]
    fn least_second_order_pair() {
        let e = "th_0(th_1(0))";
        let a = p(&format!("{e}*w"));
        let b = p(&format!("{e}*w+{e}"));
        assert!(le2(&a, &b).unwrap());
        assert_eq!(pred2(&b).unwrap().greatest(), Some(&a));
        assert_eq!(lh2(&a).unwrap(), ReachValue::Finite(b.clone()));
    }

    #[test]
    fn upsilon_chain() {
        assert!(le2(&p("v[2]"), &p("v[w]")).unwrap());
        assert!(!le2(&p("v[1]"), &p("v[w]")).unwrap());
        assert!(le2(&p("v[2]"), &p("v[3]")).unwrap());
        assert!(le1(&p("v[1]"), &p("v[2]")).unwrap());
        assert!(le1(&p("v[1]"), &p("v[w]")).unwrap());
        assert!(!le2(&p("v[w+1]"), &p("v[w+2]")).unwrap());
        assert!(le2(&p("v[w+2]"), &p("v[w+3]")).unwrap());
        assert!(matches!(pred2(&p("v[w]")).unwrap(), PredResult::Limit(_)));
        assert!(matches!(pred1(&p("v[w]")).unwrap(), PredResult::Limit(_)));
    }

    #[test]
    fn gbo_and_division() {
        let c = tc_assign(&p("w+1")).unwrap();
        assert_eq!(gbo(&c).unwrap(), IndexPair::new(2, 1));
        assert_eq!(gbo(&TrackingChain::zero()).unwrap(), IndexPair::new(1, 1));
        let (q, r) = div_rem(&p("w^3+w^2*2+w+4"), &p("w^2")).unwrap();
        assert_eq!((q, r), (p("w+2"), p("w+4")));
    }

    #[test]
    fn substructures_and_coverings() {
        let pts: Vec<Ordinal> = ["w", "w+1", "w*2", "v[2]", "v[3]"].iter().map(|s| p(s)).collect();
        let s = substructure(&pts).unwrap();
        assert!(s.r1[0][1]);
        assert!(s.r2[3][4]);
        let id: Vec<usize> = (0..s.len()).collect();
        assert!(is_covering(&s, &s, &id).unwrap());
        let x = substructure(&[p("v[2]"), p("v[3]")]).unwrap();
        let y = substructure(&[p("w"), p("w*2")]).unwrap();
        assert!(!is_covering(&x, &y, &[0, 1]).unwrap());
        assert!(is_covering(&y, &x, &[0, 1]).unwrap());
        assert!(is_covering(&x, &s, &[9, 0]).is_err());
    }
}
