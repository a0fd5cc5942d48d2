//! Tracking sequences: membership tests, the λ-ts assignment, lSeq and the
//! evaluation o.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{OpError, SyntaxError};
use crate::fine::{h_beta, mu, top_parameter, upsilon_above};
use crate::notation::{split_limit, upsilon_seg};
use crate::ord::{Node, Ordinal};
use crate::syntax::parse;

/// A nonempty sequence of terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrackingSequence(Vec<Ordinal>);

impl TrackingSequence {
    pub fn new(parts: Vec<Ordinal>) -> Option<Self> {
        (!parts.is_empty()).then_some(TrackingSequence(parts))
    }

    pub fn single(a: Ordinal) -> Self {
        TrackingSequence(vec![a])
    }

    pub fn parts(&self) -> &[Ordinal] {
        &self.0
    }

    pub fn into_parts(self) -> Vec<Ordinal> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &Ordinal {
        self.0.last().expect("nonempty")
    }

    pub fn prefix(&self) -> &[Ordinal] {
        &self.0[..self.0.len() - 1]
    }

    pub fn push(&mut self, a: Ordinal) {
        self.0.push(a);
    }
}

impl fmt::Display for TrackingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for TrackingSequence {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|a| a.to_string()))
    }
}

/// Splits `s` at commas that are not nested in brackets or parentheses.
pub(crate) fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Strips one pair of enclosing parentheses, if they enclose all of `s`.
pub(crate) fn strip_parens(s: &str) -> Option<&str> {
    let s = s.trim();
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

impl FromStr for TrackingSequence {
    type Err = SyntaxError;

    /// `(a,b,…)`; a bare term is read as a singleton.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = strip_parens(s).unwrap_or(s);
        let parts = split_top_level(inner)
            .into_iter()
            .map(parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TrackingSequence(parts))
    }
}

/// The largest epsilon number ≤ a, if any.
pub fn epsilon_floor(a: &Ordinal) -> Option<Ordinal> {
    let lead = a.lead()?;
    match lead.node() {
        Node::Theta { .. } | Node::Upsilon(_) => Some(lead),
        Node::Pow(e) if e.is_zero() => None,
        Node::Pow(e) => epsilon_floor(e),
        _ => None,
    }
}

fn base_of(tau: &Ordinal) -> Result<Ordinal, OpError> {
    let t = if tau.is_zero() { Ordinal::one() } else { tau.clone() };
    if !t.is_epsilon_or_one() {
        return Err(OpError::domain("ts", format!("base {tau} ∉ 𝔼 ∪ {{1}}")));
    }
    Ok(t)
}

/// ts^τ(x) for principal x ∈ [τ, τ^∞].
pub fn ts_rel(tau: &Ordinal, x: &Ordinal) -> Result<TrackingSequence, OpError> {
    let tau = base_of(tau)?;
    let top = upsilon_above(&tau)?;
    if !x.is_principal() || *x < tau || *x > top {
        return Err(OpError::domain("ts", format!("{x} ∉ ℙ ∩ [{tau}, {top}]")));
    }
    if *x == tau || *x == top {
        return Ok(TrackingSequence::single(x.clone()));
    }
    let e = match epsilon_floor(x) {
        Some(e) if e > tau => e,
        _ => return Ok(TrackingSequence::single(x.clone())),
    };
    if e == *x {
        return match top_parameter(x) {
            Some(p) if p > tau => Err(OpError::unsupported("ts", format!("{tau}; {x}"))),
            _ => Ok(TrackingSequence::single(x.clone())),
        };
    }
    let e_omega = Ordinal::omega_pow(&e.mul(&Ordinal::omega()));
    if *x < e_omega {
        let q = Ordinal::left_div(&e, x)?;
        if q <= mu(&e, None)? {
            let mut head = ts_rel(&tau, &e)?;
            head.push(q);
            return Ok(head);
        }
    }
    Err(OpError::unsupported("ts", format!("{tau}; {x}")))
}

/// λ-ts(a) for additive principal a; this is also the extended ts.
pub fn lambda_ts(a: &Ordinal) -> Result<TrackingSequence, OpError> {
    if !a.is_principal() || !a.is_countable() {
        return Err(OpError::domain("lambda-ts", format!("{a} ∉ ℙ")));
    }
    let seg = upsilon_seg(a)?;
    if seg.offset == 0 {
        return ts_rel(&Ordinal::upsilon(&seg.lambda)?, a);
    }
    let mut out: Vec<Ordinal> = (1..=seg.offset)
        .map(|k| Ordinal::upsilon(&seg.lambda.add(&Ordinal::nat(k))))
        .collect::<Result<_, _>>()?;
    let gamma = seg.floor();
    if *a == gamma {
        return Ok(TrackingSequence(out));
    }
    let gamma_omega = Ordinal::omega_pow(&gamma.mul(&Ordinal::omega()));
    if *a < gamma_omega {
        out.push(Ordinal::left_div(&gamma, a)?);
    } else {
        out.extend(ts_rel(&gamma, a)?.into_parts());
    }
    Ok(TrackingSequence(out))
}

/// Classic-style τ-tracking-sequence test. The first entry may equal τ^∞,
/// in which case later entries are bounded through μ^τ_{τ^∞} = (τ^∞)^∞.
pub fn is_ts(tau: &Ordinal, s: &TrackingSequence) -> Result<bool, OpError> {
    let tau = base_of(tau)?;
    let top = upsilon_above(&tau)?;
    let v = s.parts();
    let n = v.len();
    if v[0] > top || (v[0] < top && v.iter().any(|a| *a >= top)) {
        return Ok(false);
    }
    let mut prev = &tau;
    for a in &v[..n - 1] {
        if !a.is_epsilon() || a <= prev {
            return Ok(false);
        }
        prev = a;
    }
    let last = &v[n - 1];
    if !last.is_principal() || (n == 1 && *last < tau) || (n > 1 && *last <= Ordinal::one()) {
        return Ok(false);
    }
    for w in v.windows(2) {
        if w[1] > mu(&w[0], Some(&tau))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The (λ, m) split witnessing membership in λ-RS or λ-TS.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaWitness {
    #[serde(serialize_with = "crate::ts::ser_display")]
    pub lambda: Ordinal,
    /// Length m of the υ-prefix υ_{λ+1},…,υ_{λ+m}.
    pub prefix_len: u64,
}

pub(crate) fn ser_display<T: fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn upsilon_prefix_len(v: &[Ordinal]) -> Option<(Ordinal, u64)> {
    let first = v.first()?.upsilon_index()?;
    let (lambda, k) = split_limit(first);
    if k != 1 {
        return None;
    }
    let mut m = 1u64;
    while (m as usize) < v.len()
        && v[m as usize].upsilon_index() == Some(&lambda.add(&Ordinal::nat(m + 1)))
    {
        m += 1;
    }
    Some((lambda, m))
}

/// λ-RS membership.
pub fn is_lambda_rs(v: &[Ordinal]) -> Result<Option<LambdaWitness>, OpError> {
    if v.is_empty() {
        return Ok(None);
    }
    let (lambda, m) = match upsilon_prefix_len(v) {
        Some(p) => p,
        None => {
            let seg = upsilon_seg(&v[0])?;
            if seg.offset != 0 {
                return Ok(None);
            }
            (seg.lambda, 0)
        }
    };
    let rest = &v[m as usize..];
    if let Some(a1) = rest.first() {
        let lo = Ordinal::upsilon(&lambda.add(&Ordinal::nat(m)))?;
        let hi = Ordinal::upsilon(&lambda.add(&Ordinal::nat(m + 1)))?;
        if !(*a1 > lo && *a1 < hi) {
            return Ok(None);
        }
        for w in rest.windows(2) {
            if w[1] <= w[0] {
                return Ok(None);
            }
        }
        if rest.iter().any(|a| !a.is_epsilon()) {
            return Ok(None);
        }
        for w in rest.windows(2) {
            if w[1] > mu(&w[0], None)? {
                return Ok(None);
            }
        }
    }
    Ok(Some(LambdaWitness { lambda, prefix_len: m }))
}

/// λ-TS membership.
pub fn is_lambda_ts(s: &TrackingSequence) -> Result<Option<LambdaWitness>, OpError> {
    let beta = s.last();
    let prefix = s.prefix();
    if !beta.is_principal() || !beta.is_countable() {
        return Ok(None);
    }
    if prefix.is_empty() {
        let seg = upsilon_seg(beta)?;
        let lambda = match seg.offset {
            0 => seg.lambda,
            1 if *beta == seg.floor() => seg.lambda,
            _ => return Ok(None),
        };
        return Ok(Some(LambdaWitness { lambda, prefix_len: 0 }));
    }
    let w = match is_lambda_rs(prefix)? {
        Some(w) => w,
        None => return Ok(None),
    };
    let last = prefix.last().unwrap();
    if *beta <= Ordinal::one() || *beta > mu(last, None)? {
        return Ok(None);
    }
    Ok(Some(w))
}

/// Decomposition of a λ-TS used by lSeq and o.
struct Shape {
    /// α⃗: the υ-prefix followed by α_1,…,α_n.
    alphas: Vec<Ordinal>,
    /// Length of the υ-prefix.
    m: usize,
    /// α_0 = 1+υ_{λ+m}.
    alpha0: Ordinal,
    beta: Ordinal,
}

impl Shape {
    fn of(s: &TrackingSequence) -> Result<Shape, OpError> {
        let w = is_lambda_ts(s)?
            .ok_or_else(|| OpError::domain("o", format!("{s} ∉ λ-TS")))?;
        let prefix = s.prefix().to_vec();
        let m = if prefix.is_empty() { 0 } else { w.prefix_len as usize };
        let floor = Ordinal::upsilon(&w.lambda.add(&Ordinal::nat(m as u64)))?;
        Ok(Shape {
            alpha0: Ordinal::one().add(&floor),
            alphas: prefix,
            m,
            beta: s.last().clone(),
        })
    }

    /// α_i for 0 ≤ i ≤ n, counting from the end of the υ-prefix.
    fn alpha(&self, i: usize) -> &Ordinal {
        if i == 0 {
            &self.alpha0
        } else {
            &self.alphas[self.m + i - 1]
        }
    }

    fn tail_len(&self) -> usize {
        self.alphas.len() - self.m
    }

    fn components(&self) -> Result<Vec<TrackingSequence>, OpError> {
        let n = self.tail_len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 1..=n {
            out.push(ts_rel(self.alpha(i - 1), self.alpha(i))?);
        }
        let an = self.alpha(n);
        if self.beta <= *an {
            out.push(TrackingSequence::single(self.beta.clone()));
            return Ok(out);
        }
        let f = self.beta.mnf()?;
        let mut last = ts_rel(an, &f[0])?;
        if f.len() > 1 && f[0].is_epsilon() && f[0] > *an && f[1] <= mu(&f[0], None)? {
            last.push(f[1].clone());
        }
        out.push(last);
        Ok(out)
    }
}

/// lSeq(α⃗⌢β) = (m_1,…,m_{n+1}), compared lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LSeq(pub Vec<usize>);

pub fn lseq(s: &TrackingSequence) -> Result<LSeq, OpError> {
    let shape = Shape::of(s)?;
    Ok(LSeq(shape.components()?.iter().map(|c| c.len()).collect()))
}

/// o(α⃗⌢β) for α⃗⌢β ∈ λ-TS.
pub fn eval_o_ts(s: &TrackingSequence) -> Result<Ordinal, OpError> {
    let shape = Shape::of(s)?;
    let beta = &shape.beta;
    let f = beta.mnf()?;
    let an = shape.alpha(shape.tail_len()).clone();

    if shape.alphas.is_empty() && *beta == shape.alpha0 {
        return Ok(beta.clone());
    }
    if !shape.alphas.is_empty() && f[0] <= *shape.alphas.last().unwrap() {
        let head = TrackingSequence(shape.alphas.clone());
        return Ok(eval_o_ts(&head)?.mul(beta));
    }
    if f.len() > 1 && f[0].is_epsilon() && f[0] > an && f[1] <= mu(&f[0], None)? {
        let rest = Ordinal::product_of(f[1..].iter().skip(1).cloned());
        let next = h_beta(&shape.alphas, &f[0], &f[1])?;
        return Ok(eval_descending(s, next)?.mul(&rest));
    }
    let comps = shape.components()?;
    let n0 = comps.iter().rposition(|c| c.len() > 1);
    match n0 {
        None => Ok(beta.clone()),
        Some(idx) => {
            let c = comps[idx].parts();
            let gamma = &c[c.len() - 2];
            let keep = &shape.alphas[..shape.m + idx];
            let next = h_beta(keep, gamma, &f[0])?;
            Ok(eval_descending(s, next)?.mul(beta))
        }
    }
}

/// Recursive call of o guarded by the lSeq measure.
fn eval_descending(from: &TrackingSequence, next: Vec<Ordinal>) -> Result<Ordinal, OpError> {
    let next = TrackingSequence::new(next)
        .ok_or_else(|| OpError::domain("o", "empty recursive argument"))?;
    if let (Ok(a), Ok(b)) = (lseq(&next), lseq(from)) {
        if a >= b {
            return Err(OpError::domain(
                "o",
                format!("lSeq did not decrease from {from} to {next}"),
            ));
        }
    }
    eval_o_ts(&next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Ordinal {
        parse(s).unwrap()
    }

    fn seq(s: &str) -> TrackingSequence {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(seq("(v[1],w)").to_string(), "(v[1],w)");
        assert_eq!(seq("(th_0[v[2]](th_1(0)+1))").len(), 1);
        assert_eq!(seq("w^2").to_string(), "(w^2)");
    }

    #[test]
    fn ts_membership() {
        let one = Ordinal::one();
        assert!(is_ts(&one, &seq("(v[1])")).unwrap());
        assert!(is_ts(&one, &seq("(v[1],v[2])")).unwrap());
        assert!(!is_ts(&one, &seq("(v[2],v[1])")).unwrap());
        assert!(is_ts(&one, &seq("(th_0(th_1(0)),w)")).unwrap());
        assert!(!is_ts(&one, &seq("(th_0(th_1(0)),w^2)")).unwrap());
    }

    #[test]
    fn lambda_membership() {
        let w = is_lambda_ts(&seq("(v[w])")).unwrap().unwrap();
        assert_eq!(w.lambda, p("w"));
        assert!(is_lambda_rs(&[p("v[w]")]).unwrap().is_none());
        let r = is_lambda_rs(&[p("v[1]"), p("v[2]"), p("v[3]")]).unwrap().unwrap();
        assert_eq!((r.lambda, r.prefix_len), (p("0"), 3));
        assert!(is_lambda_rs(&[]).unwrap().is_none());
        assert!(is_lambda_ts(&seq("(v[1],w)")).unwrap().is_some());
        assert!(is_lambda_ts(&seq("(v[1],v[1]*w)")).unwrap().is_some());
        assert!(is_lambda_ts(&seq("(v[1],v[2]*w)")).unwrap().is_none());
    }

    #[test]
    fn lambda_ts_examples() {
        assert_eq!(lambda_ts(&p("v[w]")).unwrap(), seq("(v[w])"));
        assert_eq!(lambda_ts(&p("v[1]*w")).unwrap(), seq("(v[1],w)"));
        assert_eq!(lambda_ts(&p("v[3]")).unwrap(), seq("(v[1],v[2],v[3])"));
        assert_eq!(lambda_ts(&p("v[w]*w")).unwrap(), seq("(v[w]*w)"));
        assert_eq!(lambda_ts(&p("w^w")).unwrap(), seq("(w^w)"));
        assert_eq!(lambda_ts(&p("th_0(th_1(0))*w")).unwrap(), seq("(th_0(th_1(0)),w)"));
        assert!(lambda_ts(&p("th_0(th_1(0))*w^2")).unwrap_err().is_unsupported());
        assert_eq!(
            lambda_ts(&p("w^(v[1]*w)")).unwrap(),
            seq("(v[1],w^(v[1]*w))")
        );
    }

    #[test]
    fn relative_ts() {
        assert_eq!(ts_rel(&p("v[1]"), &p("v[1]*w")).unwrap(), seq("(v[1]*w)"));
        assert_eq!(ts_rel(&p("1"), &p("v[1]")).unwrap(), seq("(v[1])"));
        assert!(ts_rel(&p("v[1]"), &p("w")).is_err());
    }

    #[test]
    fn lseq_examples() {
        assert_eq!(lseq(&seq("(1)")).unwrap(), LSeq(vec![1]));
        assert_eq!(lseq(&seq("(v[w])")).unwrap(), LSeq(vec![1]));
        assert_eq!(lseq(&seq("(v[1],w)")).unwrap(), LSeq(vec![1]));
        assert_eq!(lseq(&seq("(th_0(th_1(0))*w)")).unwrap(), LSeq(vec![2]));
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(eval_o_ts(&seq("(v[1],v[2],v[3])")).unwrap(), p("v[3]"));
        assert_eq!(eval_o_ts(&seq("(v[1],w)")).unwrap(), p("v[1]*w"));
        assert_eq!(eval_o_ts(&seq("(v[w])")).unwrap(), p("v[w]"));
        assert_eq!(eval_o_ts(&seq("(1)")).unwrap(), p("1"));
        assert_eq!(eval_o_ts(&seq("(th_0(th_1(0)),w)")).unwrap(), p("th_0(th_1(0))*w"));
        assert_eq!(eval_o_ts(&seq("(v[1],v[1]*w)")).unwrap(), p("w^(v[1]*2+1)"));
    }
}
