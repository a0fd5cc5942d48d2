//! Closure of finite sets of tracking chains.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::chain::{is_upsilon_chain, modify_last, validate, Rows, TrackingChain};
use crate::error::{ChainError, OpError};
use crate::fine::{bar, lambda_op, mu, varrho};
use crate::ord::Ordinal;

/// Hard cap on closure size; exceeding it is reported as an error.
pub const CLOSURE_LIMIT: usize = 50_000;

/// A closed set together with candidates the clauses produced that turned
/// out not to be tracking chains.
#[derive(Debug, Clone, Default)]
pub struct Closure {
    pub chains: BTreeSet<TrackingChain>,
    pub rejected: Vec<(Rows, ChainError)>,
}

impl Closure {
    pub fn values(&self) -> Result<Vec<Ordinal>, ChainError> {
        self.chains.iter().map(|c| c.value()).collect()
    }
}

/// Whether the chain ends with α_{n,m_n} = μ_τ for τ = τ_{n,m_n-1}; returns
/// that base.
pub fn principal_base(c: &TrackingChain) -> Result<Option<Ordinal>, OpError> {
    let n = c.row_count();
    let m = c.row_len(n);
    if m < 2 {
        return Ok(None);
    }
    let base = c.tau(n, m - 1);
    Ok((*c.alpha(n, m) == mu(base, None)?).then(|| base.clone()))
}

/// Whether every ν-index is given by μ.
pub fn is_convex(c: &TrackingChain) -> Result<bool, OpError> {
    for i in 1..=c.row_count() {
        for j in 2..=c.row_len(i) {
            if *c.alpha(i, j) != mu(c.tau(i, j - 1), None)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn is_higher_epsilon(t: &Ordinal, than: &Ordinal) -> bool {
    t.is_epsilon() && t > than
}

fn extend_last_row(c: &TrackingChain, x: Ordinal) -> Rows {
    let mut r = c.rows().clone();
    r.last_mut().unwrap().push(x);
    r
}

fn push_row(c: &TrackingChain, x: Ordinal) -> Rows {
    let mut r = c.rows().clone();
    r.push(vec![x]);
    r
}

fn replace_last_row(c: &TrackingChain, x: Ordinal) -> Rows {
    let mut r = c.restrict_row(c.row_count() - 1);
    r.push(vec![x]);
    r
}

fn partial_sums(x: &Ordinal) -> Vec<Ordinal> {
    let parts = x.anf();
    (1..=parts.len())
        .map(|l| Ordinal::sum_of(parts[..l].iter().cloned()))
        .collect()
}

/// Candidate generation for one chain. Candidates tagged `true` are dropped
/// when they are υ-sequences.
fn candidates(c: &TrackingChain) -> Result<Vec<(Rows, bool)>, ChainError> {
    let mut out: Vec<(Rows, bool)> = Vec::new();
    if c.is_zero() {
        return Ok(out);
    }
    let n = c.row_count();
    let m = c.row_len(n);
    let tau = c.tau(n, m).clone();
    let tb = c.max_base(n).clone();

    for p in c.dom() {
        if p != c.last_pair() {
            out.push((c.restrict(p.i, p.j), false));
        }
    }

    if m > 1 {
        for s in partial_sums(c.alpha(n, m)) {
            out.push((modify_last(c.rows(), &s), false));
        }
        let mu_b = mu(&tb, None)?;
        out.push((modify_last(c.rows(), &mu_b), true));
        if tau < mu_b {
            if is_higher_epsilon(&tau, &tb) {
                out.push((extend_last_row(c, mu(&tau, None)?), false));
            } else {
                let r = varrho(&tb, &tau)?;
                if !r.is_zero() {
                    out.push((push_row(c, r), false));
                }
            }
        }
    } else {
        let xs = partial_sums(c.alpha(n, 1));
        let first = xs[0].clone();
        let lifted = n > 1 && {
            let mp = c.row_len(n - 1);
            mp > 1 && first == *c.tau(n - 1, mp) && is_higher_epsilon(&first, c.tau(n - 1, mp - 1))
        };
        if lifted {
            let mut r = c.restrict_row(n - 1);
            r.last_mut().unwrap().push(mu(&first, None)?);
            out.push((r, false));
        } else {
            out.push((replace_last_row(c, first), false));
        }
        for s in xs.into_iter().skip(1) {
            out.push((replace_last_row(c, s), false));
        }
    }

    if is_higher_epsilon(&tau, &tb) {
        if m == 1 {
            out.push((extend_last_row(c, mu(&tau, None)?), true));
        } else {
            let mu_b = mu(&tb, None)?;
            if tau == mu_b && tau == lambda_op(&tb)? {
                out.push((extend_last_row(c, mu(&tau, None)?), true));
            }
        }
    }

    if let Some(r) = unfold_one(c, &tau, &tb)? {
        out.push((r, false));
    }

    if let Some(base) = principal_base(c)? {
        let lower = c.base(n, m - 1);
        match bar(&base) {
            Ok(b) if b > *lower && b < base => out.push((push_row(c, b), false)),
            Ok(_) | Err(OpError::Undefined { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// The chain α⃗⁺ of the ≤1-unfolding clause, if the clause applies.
fn unfold_one(c: &TrackingChain, tau: &Ordinal, tb: &Ordinal) -> Result<Option<Rows>, ChainError> {
    let n = c.row_count();
    let m = c.row_len(n);
    let base_value = if m == 1 {
        if tau.is_epsilon() && tau >= tb {
            return Ok(None);
        }
        let q = if tau < tb {
            tau.clone()
        } else {
            Ordinal::left_div(tb, tau)?
        };
        q.log()?
    } else {
        let mu_b = mu(tb, None)?;
        if *tau != mu_b {
            return Ok(None);
        }
        let lb = lambda_op(tb)?;
        if is_higher_epsilon(tau, tb) && *tau >= lb {
            return Ok(None);
        }
        lb
    };
    let parts = base_value.anf();
    let mut xi = base_value.clone();
    if !xi.is_zero() {
        if let Err(ChainError::Condition { cond: 7, .. }) = validate(push_row(c, xi.clone())) {
            xi = Ordinal::sum_of(parts[..parts.len() - 1].iter().cloned());
        }
    }
    if xi.is_zero() {
        return Ok(None);
    }
    let direct = push_row(c, xi);
    if validate(direct.clone()).is_ok() {
        return Ok(Some(direct));
    }
    Ok(Some(extend_last_row(c, mu(tau, None)?)))
}

/// The least closed superset of `seed`.
pub fn close<'a>(seed: impl IntoIterator<Item = &'a TrackingChain>) -> Result<Closure, ChainError> {
    let mut result = Closure::default();
    let mut seen: HashSet<Rows> = HashSet::new();
    let mut queue: VecDeque<TrackingChain> = VecDeque::new();
    for c in seed {
        if seen.insert(c.rows().clone()) {
            queue.push_back(c.clone());
        }
    }
    while let Some(c) = queue.pop_front() {
        for (rows, skip_upsilon) in candidates(&c)? {
            if seen.contains(&rows) {
                continue;
            }
            seen.insert(rows.clone());
            match validate(rows.clone()) {
                Ok(next) => {
                    if skip_upsilon && is_upsilon_chain(&next) {
                        continue;
                    }
                    queue.push_back(next);
                }
                Err(e) if e.is_unsupported() => return Err(e),
                Err(e) => result.rejected.push((rows, e)),
            }
        }
        result.chains.insert(c);
        if result.chains.len() > CLOSURE_LIMIT {
            return Err(ChainError::Invariant(format!(
                "closure exceeds {CLOSURE_LIMIT} chains"
            )));
        }
    }
    Ok(result)
}

/// Whether a set already equals its closure.
pub fn is_closed<'a>(set: impl IntoIterator<Item = &'a TrackingChain> + Clone) -> Result<bool, ChainError> {
    let given: BTreeSet<TrackingChain> = set.clone().into_iter().cloned().collect();
    Ok(close(set)?.chains == given)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::tc_assign;
    use crate::syntax::parse;

    fn tc(s: &str) -> TrackingChain {
        tc_assign(&parse(s).unwrap()).unwrap()
    }

    fn closed_values(seed: &[&str]) -> Vec<String> {
        let cs: Vec<TrackingChain> = seed.iter().map(|s| tc(s)).collect();
        let cl = close(cs.iter()).unwrap();
        cl.values().unwrap().iter().map(|v| v.to_string()).collect()
    }

    #[test]
    fn trivial_sets() {
        assert!(close(std::iter::empty()).unwrap().chains.is_empty());
        assert_eq!(closed_values(&["0"]), vec!["0"]);
    }

    #[test]
    fn initial_chains_and_kappa_indices() {
        assert_eq!(closed_values(&["w+1"]), vec!["w", "w+1"]);
        assert_eq!(closed_values(&["w*2+3"]), vec!["w", "w+1", "w*2", "w*2+1", "w*2+2", "w*2+3"]);
    }

    #[test]
    fn upsilon_sequences_are_not_extended() {
        assert_eq!(closed_values(&["v[1]"]), vec!["v[1]"]);
        assert_eq!(closed_values(&["v[2]"]), vec!["v[1]", "v[2]"]);
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        for seed in [&["w^w+w"][..], &["v[1]*w+2", "v[2]+v[1]"], &["v[w]+v[3]*w"]] {
            let cs: Vec<TrackingChain> = seed.iter().map(|s| tc(s)).collect();
            let once = close(cs.iter()).unwrap();
            assert!(cs.iter().all(|c| once.chains.contains(c)));
            let twice = close(once.chains.iter()).unwrap();
            assert_eq!(once.chains, twice.chains);
            assert!(is_closed(once.chains.iter()).unwrap());
        }
    }

    #[test]
    fn epsilon_bases_need_bar() {
        let c = tc("th_0(th_1(0))+w");
        assert!(close([&c]).unwrap_err().is_unsupported());
    }

    #[test]
    fn principal_and_convex() {
        let c = tc("v[2]");
        assert_eq!(principal_base(&c).unwrap(), Some(parse("v[1]").unwrap()));
        assert!(is_convex(&c).unwrap());
        let d = tc("v[1]*w");
        assert_eq!(principal_base(&d).unwrap(), None);
        assert!(!is_convex(&d).unwrap());
    }
}
