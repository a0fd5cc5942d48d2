//! υ-hierarchy services, term length and bounded term enumeration.

use std::collections::HashSet;

use crate::error::TermError;
use crate::ord::{Node, Ordinal};

/// υ-segment (λ, m): λ a limit or 0, lexicographically least with α < υ_{λ+m+1}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpsilonSegment {
    pub lambda: Ordinal,
    /// Finite offset m above λ.
    pub offset: u64,
}

impl UpsilonSegment {
    /// λ+m.
    pub fn index(&self) -> Ordinal {
        self.lambda.add(&Ordinal::nat(self.offset))
    }

    /// υ_{λ+m}.
    pub fn floor(&self) -> Ordinal {
        Ordinal::upsilon(&self.index()).expect("countable index")
    }
}

pub fn upsilon(index: &Ordinal) -> Result<Ordinal, TermError> {
    Ordinal::upsilon(index)
}

/// Splits ι into (λ, m) with λ ∈ Lim ∪ {0} and m < ω.
pub fn split_limit(iota: &Ordinal) -> (Ordinal, u64) {
    let cnf = iota.cnf();
    match cnf.last() {
        Some((p, c)) if p.is_one() => {
            let m = *c;
            (iota.lsub_finite_tail(), m)
        }
        _ => (iota.clone(), 0),
    }
}

impl Ordinal {
    fn lsub_finite_tail(&self) -> Ordinal {
        let mut cnf = self.cnf();
        if matches!(cnf.last(), Some((p, _)) if p.is_one()) {
            cnf.pop();
        }
        Ordinal::sum_of(cnf.into_iter().map(|(p, c)| p.mul_nat(c)))
    }
}

/// The largest ι with υ_ι ≤ α (0 below υ_1). Fails for uncountable α.
pub fn upsilon_floor(a: &Ordinal) -> Result<Ordinal, TermError> {
    if !a.is_countable() {
        return Err(TermError::UpsilonIndex(a.to_string()));
    }
    let lead = match a.lead() {
        None => return Ok(Ordinal::zero()),
        Some(p) => p,
    };
    match lead.node() {
        Node::Upsilon(i) => Ok(i.clone()),
        Node::Theta { rel, .. } => Ok(rel.upsilon_index().cloned().unwrap_or_else(Ordinal::zero)),
        Node::Pow(e) => upsilon_floor(e),
        _ => unreachable!("lead is principal"),
    }
}

pub fn upsilon_seg(a: &Ordinal) -> Result<UpsilonSegment, TermError> {
    let iota = upsilon_floor(a)?;
    let (lambda, m) = split_limit(&iota);
    Ok(UpsilonSegment { lambda, offset: m })
}

/// Length of the collapsing-function representation of a term.
pub fn term_length(a: &Ordinal) -> u64 {
    match a.node() {
        Node::Zero => 0,
        Node::Sum(v) => v.iter().map(|(p, c)| term_length(p) * c).sum(),
        Node::Upsilon(_) => 1,
        Node::Theta { arg, .. } => {
            if arg.is_zero() {
                1
            } else {
                term_length(arg) + 4
            }
        }
        Node::Pow(e) => {
            if e.is_zero() {
                1
            } else {
                term_length(&collapse_argument(e)) + 4
            }
        }
    }
}

/// For a non-epsilon exponent e, the argument η with ϑ(η) = ω^e, where ϑ is
/// the collapsing function responsible for the region of e.
pub fn collapse_argument(e: &Ordinal) -> Ordinal {
    let cnf = e.cnf();
    let eps_plus_succ = cnf[0].0.is_epsilon()
        && cnf[0].1 == 1
        && cnf.len() == 2
        && cnf[1].0.is_one();
    let x = if eps_plus_succ { e.pred().unwrap() } else { e.clone() };
    let level = x.level();
    let base = if level > 0 {
        Ordinal::big_omega(level)
    } else {
        match upsilon_floor(&x).expect("countable") {
            i if i.is_zero() => Ordinal::one(),
            i => Ordinal::upsilon(&i).unwrap(),
        }
    };
    let y = base.lsub(&x).expect("exponent lies above its base");
    Ordinal::one().add(&y)
}

/// Budgets for [`enumerate_terms`].
#[derive(Debug, Clone)]
pub struct TermUniverse {
    /// Exclusive upper bound on emitted terms (uncountable terms are always
    /// dropped from the output when a bound is set).
    pub bound: Option<Ordinal>,
    /// Maximal term length.
    pub max_length: u64,
    /// Maximal number of additive summands, counted with multiplicity.
    pub max_width: usize,
    /// υ-constants available as parameters.
    pub upsilon_indices: Vec<Ordinal>,
    /// Highest level i for which Ω_i and ϑ_i are used; 0 means no collapsing
    /// beyond the ω-power closed form.
    pub max_level: u32,
}

impl TermUniverse {
    pub fn below(bound: Ordinal, max_length: u64) -> Self {
        TermUniverse {
            bound: Some(bound),
            max_length,
            max_width: usize::MAX,
            upsilon_indices: Vec::new(),
            max_level: 0,
        }
    }
}

/// All canonical terms within the budgets, sorted increasingly.
pub fn enumerate_terms(u: &TermUniverse) -> Vec<Ordinal> {
    let max = u.max_length as usize;
    let mut by_len: Vec<Vec<Ordinal>> = vec![Vec::new(); max + 1];
    let mut principals: Vec<Vec<Ordinal>> = vec![Vec::new(); max + 1];
    let mut seen: HashSet<Ordinal> = HashSet::new();
    by_len[0].push(Ordinal::zero());
    seen.insert(Ordinal::zero());
    let ups: Vec<Ordinal> = u
        .upsilon_indices
        .iter()
        .filter_map(|i| Ordinal::upsilon(i).ok())
        .filter(|v| !v.is_zero())
        .collect();
    // Countable terms at or above the bound only produce larger countable
    // terms, so they are never needed.
    let useless = |t: &Ordinal| match &u.bound {
        Some(b) => t.is_countable() && t >= b,
        None => false,
    };
    let mut rels = vec![Ordinal::one()];
    rels.extend(ups.iter().cloned());

    for n in 1..=max {
        let mut fresh: Vec<Ordinal> = Vec::new();
        if n == 1 {
            fresh.push(Ordinal::one());
            fresh.extend(ups.iter().cloned());
            for i in 1..=u.max_level {
                fresh.push(Ordinal::big_omega(i));
            }
        }
        if n >= 5 {
            for eta in by_len[n - 4].iter() {
                if eta.is_zero() {
                    continue;
                }
                for rel in &rels {
                    if !eta.is_countable() && u.max_level == 0 {
                        continue;
                    }
                    if let Ok(t) = Ordinal::theta(0, Some(rel), eta) {
                        fresh.push(t);
                    }
                }
                for i in 1..=u.max_level {
                    if let Ok(t) = Ordinal::theta(i, None, eta) {
                        fresh.push(t);
                    }
                }
            }
        }
        for t in fresh {
            if term_length(&t) as usize == n && !useless(&t) && seen.insert(t.clone()) {
                principals[n].push(t.clone());
                by_len[n].push(t);
            }
        }
        for k in 1..n {
            let rest_len = n - k;
            let (ps, rest) = (&principals[k], &by_len[rest_len]);
            let mut new_sums = Vec::new();
            for p in ps {
                for r in rest {
                    if r.is_zero() {
                        continue;
                    }
                    if r.lead().is_some_and(|l| l <= *p) && r.anf().len() < u.max_width {
                        new_sums.push(p.add(r));
                    }
                }
            }
            for s in new_sums {
                if !useless(&s) && seen.insert(s.clone()) {
                    by_len[n].push(s);
                }
            }
        }
    }
    let mut out: Vec<Ordinal> = by_len
        .into_iter()
        .flatten()
        .filter(|t| match &u.bound {
            Some(b) => t.is_countable() && t < b,
            None => true,
        })
        .collect();
    out.sort();
    out
}
