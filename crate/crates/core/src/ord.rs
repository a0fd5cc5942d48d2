//! Canonical ordinal terms: Cantor normal form over ω-powers, collapsing
//! functions ϑ_i (level 0 optionally relativized to an υ-constant) and the
//! υ-constants themselves.
//!
//! Every constructor normalizes eagerly, so structural equality is equality of
//! denoted ordinals and [`Ordinal::cmp`] is the ordinal order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::TermError;

/// An immutable, canonical ordinal term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ordinal(Arc<Node>);

/// Shape of a canonical term.
#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Zero,
    /// Strictly decreasing principal parts with positive coefficients; never a
    /// single part with coefficient one.
    Sum(Vec<(Ordinal, u64)>),
    /// ω^e for an exponent that is not an epsilon number, so the value is an
    /// additive principal that is not an epsilon number.
    Pow(Ordinal),
    /// ϑ_level(arg). Only kept when the value is an epsilon number or an Ω_i:
    /// level 0 requires arg ≥ Ω_1, level i > 0 requires arg = 0 or arg ≥ Ω_{i+1}.
    /// `rel` is 1 or an υ-constant, and is 1 whenever level > 0.
    Theta {
        level: u32,
        rel: Ordinal,
        arg: Ordinal,
    },
    /// υ_index, index countable and nonzero.
    Upsilon(Ordinal),
}

/// Borrowed Cantor normal form of a term.
#[derive(Clone, Copy)]
enum Parts<'a> {
    Empty,
    One(&'a Ordinal),
    Many(&'a [(Ordinal, u64)]),
}

impl<'a> Parts<'a> {
    fn len(&self) -> usize {
        match self {
            Parts::Empty => 0,
            Parts::One(_) => 1,
            Parts::Many(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> (&'a Ordinal, u64) {
        match self {
            Parts::Empty => unreachable!("empty term has no parts"),
            Parts::One(p) => (p, 1),
            Parts::Many(v) => (&v[i].0, v[i].1),
        }
    }
}

/// Flags describing the principal classes a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PrincipalClass {
    pub additive: bool,
    pub multiplicative: bool,
    pub epsilon: bool,
    pub epsilon_or_one: bool,
    pub upsilon: bool,
}

impl Ordinal {
    fn from_node(node: Node) -> Self {
        Ordinal(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn zero() -> Self {
        Self::from_node(Node::Zero)
    }

    pub fn one() -> Self {
        Self::from_node(Node::Pow(Self::zero()))
    }

    pub fn nat(n: u64) -> Self {
        match n {
            0 => Self::zero(),
            1 => Self::one(),
            _ => Self::from_node(Node::Sum(vec![(Self::one(), n)])),
        }
    }

    pub fn omega() -> Self {
        Self::from_node(Node::Pow(Self::one()))
    }

    /// Ω_i; Ω_0 is 1.
    pub fn big_omega(i: u32) -> Self {
        if i == 0 {
            Self::one()
        } else {
            Self::from_node(Node::Theta {
                level: i,
                rel: Self::one(),
                arg: Self::zero(),
            })
        }
    }

    fn from_parts(mut parts: Vec<(Ordinal, u64)>) -> Self {
        parts.retain(|(_, c)| *c > 0);
        match parts.len() {
            0 => Self::zero(),
            1 if parts[0].1 == 1 => parts.pop().unwrap().0,
            _ => Self::from_node(Node::Sum(parts)),
        }
    }

    fn parts(&self) -> Parts<'_> {
        match self.node() {
            Node::Zero => Parts::Empty,
            Node::Sum(v) => Parts::Many(v),
            _ => Parts::One(self),
        }
    }

    /// Cantor normal form as (principal, coefficient) pairs, decreasing.
    pub fn cnf(&self) -> Vec<(Ordinal, u64)> {
        let p = self.parts();
        (0..p.len()).map(|i| (p.get(i).0.clone(), p.get(i).1)).collect()
    }

    /// Additive normal form: weakly decreasing additive principal summands.
    pub fn anf(&self) -> Vec<Ordinal> {
        let p = self.parts();
        let mut out = Vec::new();
        for i in 0..p.len() {
            let (q, c) = p.get(i);
            for _ in 0..c {
                out.push(q.clone());
            }
        }
        out
    }

    pub fn sum_of<I: IntoIterator<Item = Ordinal>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(&x))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Zero)
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Pow(e) if e.is_zero())
    }

    pub fn is_principal(&self) -> bool {
        matches!(
            self.node(),
            Node::Pow(_) | Node::Theta { .. } | Node::Upsilon(_)
        )
    }

    pub fn is_epsilon(&self) -> bool {
        matches!(self.node(), Node::Theta { .. } | Node::Upsilon(_))
    }

    /// Member of 𝔼 ∪ {1}.
    pub fn is_epsilon_or_one(&self) -> bool {
        self.is_one() || self.is_epsilon()
    }

    pub fn is_mult_principal(&self) -> bool {
        match self.node() {
            Node::Pow(e) => e.is_zero() || e.is_principal(),
            Node::Theta { .. } | Node::Upsilon(_) => true,
            _ => false,
        }
    }

    pub fn upsilon_index(&self) -> Option<&Ordinal> {
        match self.node() {
            Node::Upsilon(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_upsilon(&self) -> bool {
        self.upsilon_index().is_some()
    }

    pub fn class(&self) -> PrincipalClass {
        PrincipalClass {
            additive: self.is_principal(),
            multiplicative: self.is_mult_principal(),
            epsilon: self.is_epsilon(),
            epsilon_or_one: self.is_epsilon_or_one(),
            upsilon: self.is_upsilon(),
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.node() {
            Node::Zero => Some(0),
            Node::Pow(e) if e.is_zero() => Some(1),
            Node::Sum(v) if v.len() == 1 && v[0].0.is_one() => Some(v[0].1),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn is_successor(&self) -> bool {
        let p = self.parts();
        p.len() > 0 && p.get(p.len() - 1).0.is_one()
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// Predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut v = self.cnf();
        let last = v.len() - 1;
        v[last].1 -= 1;
        Some(Self::from_parts(v))
    }

    /// ι ∸ 1: the predecessor of a successor, the ordinal itself otherwise.
    pub fn monus_one(&self) -> Ordinal {
        self.pred().unwrap_or_else(|| self.clone())
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Self::one())
    }

    /// Index i such that Ω_i ≤ self < Ω_{i+1}; 0 for countable terms.
    pub fn level(&self) -> u32 {
        match self.node() {
            Node::Zero | Node::Upsilon(_) => 0,
            Node::Sum(v) => v[0].0.level(),
            Node::Pow(e) => e.level(),
            Node::Theta { level, .. } => *level,
        }
    }

    pub fn is_countable(&self) -> bool {
        self.level() == 0
    }

    /// Leading principal part.
    pub fn lead(&self) -> Option<Ordinal> {
        let p = self.parts();
        (p.len() > 0).then(|| p.get(0).0.clone())
    }

    /// The least additive component.
    pub fn end(&self) -> Ordinal {
        let p = self.parts();
        if p.len() == 0 {
            Self::zero()
        } else {
            p.get(p.len() - 1).0.clone()
        }
    }

    /// Exponent of the leading ω-power: ω^log(a) ≤ a < ω^(log(a)+1).
    pub fn log(&self) -> Result<Ordinal, TermError> {
        match self.node() {
            Node::Zero => Err(TermError::LogOfZero),
            Node::Pow(e) => Ok(e.clone()),
            Node::Theta { .. } | Node::Upsilon(_) => Ok(self.clone()),
            Node::Sum(v) => v[0].0.log(),
        }
    }

    /// log(end(a)); 0 for a = 0.
    pub fn logend(&self) -> Ordinal {
        if self.is_zero() {
            Self::zero()
        } else {
            self.end().log().expect("end of a nonzero term is nonzero")
        }
    }

    /// ω^e with fixed points collapsed.
    pub fn omega_pow(e: &Ordinal) -> Ordinal {
        if e.is_epsilon() {
            e.clone()
        } else {
            Self::from_node(Node::Pow(e.clone()))
        }
    }

    /// Enumeration of the additive principals that are not epsilon numbers:
    /// ω^(x+1) if x = ε+n for an epsilon ε and n < ω, ω^x otherwise.
    pub fn omega_prime(x: &Ordinal) -> Ordinal {
        let p = x.parts();
        let eps_plus_finite = p.len() > 0
            && p.get(0).0.is_epsilon()
            && p.get(0).1 == 1
            && (p.len() == 1 || (p.len() == 2 && p.get(1).0.is_one()));
        if eps_plus_finite {
            Self::omega_pow(&x.succ())
        } else {
            Self::omega_pow(x)
        }
    }

    pub fn add(&self, other: &Ordinal) -> Ordinal {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let a = self.parts();
        let b = other.parts();
        let (blead, bcoef) = b.get(0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut merged = false;
        for i in 0..a.len() {
            let (p, c) = a.get(i);
            match p.cmp(blead) {
                Ordering::Greater => out.push((p.clone(), c)),
                Ordering::Equal => {
                    out.push((p.clone(), c + bcoef));
                    merged = true;
                    break;
                }
                Ordering::Less => break,
            }
        }
        let start = if merged { 1 } else { 0 };
        for i in start..b.len() {
            let (q, d) = b.get(i);
            out.push((q.clone(), d));
        }
        Self::from_parts(out)
    }

    pub fn mul(&self, other: &Ordinal) -> Ordinal {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let a = self.parts();
        let (alead, acoef) = a.get(0);
        let gamma = alead.log().expect("nonzero");
        let b = other.parts();
        let mut result = Self::zero();
        for i in 0..b.len() {
            let (q, d) = b.get(i);
            let piece = if q.is_one() {
                let mut v = vec![(alead.clone(), acoef * d)];
                for j in 1..a.len() {
                    let (p, c) = a.get(j);
                    v.push((p.clone(), c));
                }
                Self::from_parts(v)
            } else {
                let f = q.log().expect("nonzero");
                Self::from_parts(vec![(Self::omega_pow(&gamma.add(&f)), d)])
            };
            result = result.add(&piece);
        }
        result
    }

    /// a·n for a natural number n.
    pub fn mul_nat(&self, n: u64) -> Ordinal {
        self.mul(&Self::nat(n))
    }

    /// Left subtraction -self + b: the unique c with self + c = b.
    pub fn lsub(&self, b: &Ordinal) -> Result<Ordinal, TermError> {
        let a = self.parts();
        let bp = b.parts();
        for k in 0..a.len() {
            if k >= bp.len() {
                return Err(TermError::NotSubtractable);
            }
            let (p, c) = a.get(k);
            let (q, d) = bp.get(k);
            match p.cmp(q) {
                Ordering::Greater => return Err(TermError::NotSubtractable),
                Ordering::Less => return Ok(Self::tail(&bp, k, None)),
                Ordering::Equal => {
                    if c < d {
                        return Ok(Self::tail(&bp, k, Some(d - c)));
                    }
                    if c > d {
                        return Err(TermError::NotSubtractable);
                    }
                    if k + 1 == a.len() {
                        return Ok(Self::tail(&bp, k + 1, None));
                    }
                }
            }
        }
        Ok(b.clone())
    }

    fn tail(p: &Parts<'_>, from: usize, first_coef: Option<u64>) -> Ordinal {
        let mut v = Vec::new();
        for i in from..p.len() {
            let (q, d) = p.get(i);
            let d = if i == from { first_coef.unwrap_or(d) } else { d };
            v.push((q.clone(), d));
        }
        Self::from_parts(v)
    }

    /// (1/g)·a: the least δ with g·δ = a.
    pub fn left_div(g: &Ordinal, a: &Ordinal) -> Result<Ordinal, TermError> {
        if g.is_zero() {
            return Err(TermError::NoLeftQuotient);
        }
        if a.is_zero() {
            return Ok(Self::zero());
        }
        let gp = g.parts();
        let (glead, gcoef) = gp.get(0);
        let gamma = glead.log()?;
        let ap = a.parts();
        let mut out = Vec::new();
        let mut idx = 0;
        while idx < ap.len() {
            let (p, c) = ap.get(idx);
            let e = p.log()?;
            if e <= gamma {
                break;
            }
            let f = gamma.lsub(&e)?;
            out.push((Self::omega_pow(&f), c));
            idx += 1;
        }
        if idx < ap.len() {
            let (p, c) = ap.get(idx);
            if p != glead || c % gcoef != 0 {
                return Err(TermError::NoLeftQuotient);
            }
            out.push((Self::one(), c / gcoef));
        }
        let d = Self::from_parts(out);
        if &g.mul(&d) == a {
            Ok(d)
        } else {
            Err(TermError::NoLeftQuotient)
        }
    }

    /// Multiplicative normal form of an additive principal: weakly decreasing
    /// multiplicatively principal factors.
    pub fn mnf(&self) -> Result<Vec<Ordinal>, TermError> {
        match self.node() {
            Node::Pow(e) if e.is_zero() => Ok(vec![self.clone()]),
            Node::Pow(e) => Ok(e.anf().iter().map(Self::omega_pow).collect()),
            Node::Theta { .. } | Node::Upsilon(_) => Ok(vec![self.clone()]),
            _ => Err(TermError::NotPrincipal(self.to_string())),
        }
    }

    pub fn product_of<I: IntoIterator<Item = Ordinal>>(items: I) -> Self {
        items.into_iter().fold(Self::one(), |acc, x| acc.mul(&x))
    }

    /// υ_index. υ_0 = 0; indices must be countable.
    pub fn upsilon(index: &Ordinal) -> Result<Ordinal, TermError> {
        if index.is_zero() {
            return Ok(Self::zero());
        }
        if !index.is_countable() {
            return Err(TermError::UpsilonIndex(index.to_string()));
        }
        Ok(Self::from_node(Node::Upsilon(index.clone())))
    }

    /// Index ξ of the relativizer region: 0 for 1, ξ for υ_ξ.
    fn rel_index(rel: &Ordinal) -> Ordinal {
        rel.upsilon_index().cloned().unwrap_or_else(Self::zero)
    }

    /// ϑ_level^rel(arg). `rel` defaults to 1 and must be 1 for level > 0.
    pub fn theta(level: u32, rel: Option<&Ordinal>, arg: &Ordinal) -> Result<Ordinal, TermError> {
        let rel = rel.cloned().unwrap_or_else(Self::one);
        if !(rel.is_one() || rel.is_upsilon()) {
            return Err(TermError::Relativizer(rel.to_string()));
        }
        if level > 0 {
            if !rel.is_one() {
                return Err(TermError::Relativizer(rel.to_string()));
            }
            if arg.is_zero() {
                return Ok(Self::big_omega(level));
            }
            if arg.level() <= level {
                let x = Self::big_omega(level).add(&Self::minus_one_left(arg));
                return Ok(Self::omega_prime(&x));
            }
            return Ok(Self::from_node(Node::Theta {
                level,
                rel,
                arg: arg.clone(),
            }));
        }
        if arg.is_zero() {
            return Ok(rel);
        }
        let ceiling = Self::upsilon(&Self::rel_index(&rel).succ())?;
        if arg.is_countable() {
            let x = rel.add(&Self::minus_one_left(arg));
            let v = Self::omega_prime(&x);
            if v >= ceiling {
                return Err(TermError::ParameterRange(arg.to_string()));
            }
            return Ok(v);
        }
        let mut atoms = Vec::new();
        arg.collect_k(0, &mut atoms);
        if atoms.iter().any(|a| *a >= ceiling) {
            return Err(TermError::ParameterRange(arg.to_string()));
        }
        Ok(Self::from_node(Node::Theta {
            level: 0,
            rel,
            arg: arg.clone(),
        }))
    }

    /// -1+η.
    fn minus_one_left(eta: &Ordinal) -> Ordinal {
        match eta.as_nat() {
            Some(n) if n > 0 => Self::nat(n - 1),
            _ => eta.clone(),
        }
    }

    /// Maximal subterms below Ω_{i+1}, descending through sums and through
    /// collapsing terms of higher level.
    fn collect_k(&self, i: u32, out: &mut Vec<Ordinal>) {
        match self.node() {
            Node::Zero => {}
            Node::Sum(v) => {
                for (p, _) in v {
                    p.collect_k(i, out);
                }
            }
            _ if self.level() <= i => out.push(self.clone()),
            Node::Pow(e) => e.collect_k(i, out),
            Node::Theta { arg, .. } => arg.collect_k(i, out),
            Node::Upsilon(_) => out.push(self.clone()),
        }
    }

    fn theta_same_cmp(&self, other: &Ordinal, i: u32, a: &Ordinal, b: &Ordinal) -> Ordering {
        match a.cmp(b) {
            Ordering::Equal => Ordering::Equal,
            Ordering::Less => {
                let mut k = Vec::new();
                a.collect_k(i, &mut k);
                if k.iter().all(|x| x < other) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            Ordering::Greater => {
                let mut k = Vec::new();
                b.collect_k(i, &mut k);
                if k.iter().any(|x| self <= x) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    fn eps_cmp(&self, other: &Ordinal) -> Ordering {
        let (la, lb) = (self.level(), other.level());
        if la != lb {
            return la.cmp(&lb);
        }
        match (self.node(), other.node()) {
            (Node::Upsilon(a), Node::Upsilon(b)) => a.cmp(b),
            (Node::Upsilon(a), Node::Theta { rel, .. }) => {
                if *a <= Self::rel_index(rel) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (Node::Theta { .. }, Node::Upsilon(_)) => other.eps_cmp(self).reverse(),
            (
                Node::Theta {
                    level: i,
                    rel: r,
                    arg: a,
                },
                Node::Theta { rel: s, arg: b, .. },
            ) => {
                if *i == 0 && r != s {
                    Self::rel_index(r).cmp(&Self::rel_index(s))
                } else {
                    self.theta_same_cmp(other, *i, a, b)
                }
            }
            _ => unreachable!("eps_cmp on non-epsilon terms"),
        }
    }

    fn principal_cmp(&self, other: &Ordinal) -> Ordering {
        match (self.node(), other.node()) {
            (Node::Pow(e), Node::Pow(f)) => e.cmp(f),
            (Node::Pow(e), _) => {
                if *e < *other {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            (_, Node::Pow(_)) => other.principal_cmp(self).reverse(),
            _ => self.eps_cmp(other),
        }
    }

    /// Number of nested υ-constants along the deepest index path.
    pub fn upsilon_rank(&self) -> usize {
        match self.node() {
            Node::Zero => 0,
            Node::Sum(v) => v.iter().map(|(p, _)| p.upsilon_rank()).max().unwrap_or(0),
            Node::Pow(e) => e.upsilon_rank(),
            Node::Theta { rel, arg, .. } => rel.upsilon_rank().max(arg.upsilon_rank()),
            Node::Upsilon(i) => 1 + i.upsilon_rank(),
        }
    }

    /// All υ-constants occurring hereditarily.
    pub fn upsilon_constants(&self, out: &mut Vec<Ordinal>) {
        match self.node() {
            Node::Zero => {}
            Node::Sum(v) => v.iter().for_each(|(p, _)| p.upsilon_constants(out)),
            Node::Pow(e) => e.upsilon_constants(out),
            Node::Theta { rel, arg, .. } => {
                rel.upsilon_constants(out);
                arg.upsilon_constants(out);
            }
            Node::Upsilon(i) => {
                out.push(self.clone());
                i.upsilon_constants(out);
            }
        }
    }

    /// True if no epsilon number other than υ-constants occurs hereditarily.
    pub fn is_upsilon_fragment(&self) -> bool {
        match self.node() {
            Node::Zero => true,
            Node::Sum(v) => v.iter().all(|(p, _)| p.is_upsilon_fragment()),
            Node::Pow(e) => e.is_upsilon_fragment(),
            Node::Theta { .. } => false,
            Node::Upsilon(i) => i.is_upsilon_fragment(),
        }
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let a = self.parts();
        let b = other.parts();
        let n = a.len().min(b.len());
        for k in 0..n {
            let (p, c) = a.get(k);
            let (q, d) = b.get(k);
            let o = p.principal_cmp(q).then(c.cmp(&d));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }
    fn n(k: u64) -> Ordinal {
        Ordinal::nat(k)
    }
    fn wp(e: &Ordinal) -> Ordinal {
        Ordinal::omega_pow(e)
    }
    fn eps0() -> Ordinal {
        Ordinal::theta(0, None, &Ordinal::big_omega(1)).unwrap()
    }

    #[test]
    fn zero_is_least() {
        assert!(n(0) < n(1));
        assert!(n(0) < w());
    }

    #[test]
    fn finite_arithmetic() {
        assert_eq!(n(3).add(&n(4)), n(7));
        assert_eq!(n(3).mul(&n(4)), n(12));
        assert_eq!(n(1).add(&w()), w());
        assert_eq!(w().add(&n(1)).to_string(), "w+1");
    }

    #[test]
    fn cnf_identities() {
        let ww = wp(&w());
        assert_eq!(wp(&w().succ()), ww.mul(&w()));
        assert_eq!(ww.add(&w()).add(&ww), ww.mul_nat(2));
        assert_eq!(w().mul_nat(2).mul(&w()), wp(&n(2)));
        assert_eq!(Ordinal::upsilon(&w()).unwrap().mul_nat(2).to_string(), "v[w]*2");
    }

    #[test]
    fn epsilon_zero_is_fixed_point() {
        let e = eps0();
        assert!(e > wp(&w()));
        assert_eq!(wp(&e), e);
        assert_eq!(e.log().unwrap(), e);
        assert!(e.is_epsilon());
    }

    #[test]
    fn closed_form_small_values() {
        assert_eq!(Ordinal::theta(0, None, &n(1)).unwrap(), w());
        assert_eq!(Ordinal::theta(0, None, &n(0)).unwrap(), n(1));
        let e = eps0();
        assert_eq!(Ordinal::theta(0, None, &e).unwrap(), wp(&e.succ()));
    }

    #[test]
    fn veblen_landmarks() {
        let om = Ordinal::big_omega(1);
        let e = eps0();
        let eps_eps = Ordinal::theta(0, None, &om.add(&e)).unwrap();
        assert!(eps_eps > e);
        let phi2 = Ordinal::theta(0, None, &om.mul_nat(2)).unwrap();
        assert!(phi2 > eps_eps);
        let om2 = Ordinal::theta(1, None, &om).unwrap();
        assert_eq!(om2, wp(&om.mul_nat(2)));
        let gamma0 = Ordinal::theta(0, None, &om2).unwrap();
        assert!(gamma0 > phi2);
        let next = Ordinal::theta(0, None, &om.add(&phi2)).unwrap();
        assert!(phi2 < next && next < gamma0);
    }

    #[test]
    fn decompositions() {
        let x = wp(&w()).add(&w());
        assert_eq!(x.end(), w());
        assert_eq!(x.logend(), n(1));
        assert!(n(0).log().is_err());
        let x = wp(&w()).add(&w()).add(&n(1));
        assert_eq!(x.anf(), vec![wp(&w()), w(), n(1)]);
        assert_eq!(wp(&w().succ()).mnf().unwrap(), vec![wp(&w()), w()]);
    }

    #[test]
    fn left_division() {
        assert_eq!(Ordinal::left_div(&w(), &wp(&n(2))).unwrap(), w());
        assert!(Ordinal::left_div(&w(), &w().succ()).is_err());
        let uw = Ordinal::upsilon(&w()).unwrap();
        let u17 = Ordinal::upsilon(&n(17)).unwrap();
        assert_eq!(Ordinal::left_div(&uw, &uw.mul(&u17)).unwrap(), u17);
        let a = w().mul_nat(2).add(&n(1));
        assert_eq!(Ordinal::left_div(&a, &a.mul_nat(3)).unwrap(), n(3));
    }

    #[test]
    fn left_subtraction() {
        let a = w().add(&n(3));
        let b = wp(&n(2)).add(&w());
        assert_eq!(a.lsub(&b).unwrap(), b);
        assert_eq!(w().lsub(&w().mul_nat(3)).unwrap(), w().mul_nat(2));
        assert!(b.lsub(&a).is_err());
    }

    #[test]
    fn upsilon_order() {
        let u1 = Ordinal::upsilon(&n(1)).unwrap();
        let u2 = Ordinal::upsilon(&n(2)).unwrap();
        assert!(eps0() < u1 && u1 < u2);
        let t = Ordinal::theta(0, Some(&u1), &Ordinal::big_omega(1)).unwrap();
        assert!(u1 < t && t < u2);
        assert!(Ordinal::upsilon(&Ordinal::big_omega(1)).is_err());
    }
}
