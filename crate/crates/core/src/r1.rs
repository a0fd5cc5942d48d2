//! Reach below ε₀ computed directly on Cantor normal forms, and the harness
//! comparing it with the chain-based `lh`.
//!
//! Nothing here touches tracking chains; terms are converted into a private
//! CNF representation and the recursion runs on that.

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::ChainError;
use crate::ord::Ordinal;
use crate::query::{lh, ReachValue};

/// A CNF term below ε₀: (exponent, coefficient) pairs, exponents strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct R1Term(Vec<(R1Term, u64)>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0} is not below epsilon_0")]
pub struct OutOfRange(pub String);

impl R1Term {
    pub fn zero() -> Self {
        R1Term(Vec::new())
    }

    pub fn one() -> Self {
        R1Term(vec![(R1Term::zero(), 1)])
    }

    pub fn omega_pow(e: R1Term) -> Self {
        R1Term(vec![(e, 1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn cmp_terms(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let c = a.0.cmp_terms(&b.0).then(a.1.cmp(&b.1));
            if c.is_ne() {
                return c;
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    /// Ordinal sum.
    pub fn add(&self, other: &Self) -> Self {
        let Some((head, _)) = other.0.first() else {
            return self.clone();
        };
        let mut out: Vec<(R1Term, u64)> = self
            .0
            .iter()
            .take_while(|(e, _)| e.cmp_terms(head).is_gt())
            .cloned()
            .collect();
        let mut rest = other.0.clone();
        if let Some((e, c)) = self.0.get(out.len()) {
            if e.cmp_terms(head).is_eq() {
                rest[0].1 += c;
            }
        }
        out.extend(rest);
        R1Term(out)
    }

    /// The exponent of the last CNF summand.
    pub fn last_exponent(&self) -> Option<&R1Term> {
        self.0.last().map(|(e, _)| e)
    }

    /// Additive principal parts ω^e, with multiplicity.
    pub fn principal_parts(&self) -> Vec<R1Term> {
        self.0
            .iter()
            .flat_map(|(e, c)| std::iter::repeat_n(R1Term::omega_pow(e.clone()), *c as usize))
            .collect()
    }

    pub fn to_ordinal(&self) -> Ordinal {
        Ordinal::sum_of(
            self.0
                .iter()
                .map(|(e, c)| Ordinal::omega_pow(&e.to_ordinal()).mul_nat(*c)),
        )
    }
}

impl TryFrom<&Ordinal> for R1Term {
    type Error = OutOfRange;

    fn try_from(a: &Ordinal) -> Result<Self, OutOfRange> {
        let mut parts = Vec::new();
        for (p, c) in a.cnf() {
            if p.is_epsilon() || !p.is_countable() || p.is_upsilon() {
                return Err(OutOfRange(a.to_string()));
            }
            let e = p.log().map_err(|_| OutOfRange(a.to_string()))?;
            parts.push((R1Term::try_from(&e)?, c));
        }
        Ok(R1Term(parts))
    }
}

impl fmt::Display for R1Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_ordinal())
    }
}

/// lh(α) = α + lh(ρ_1) + … + lh(ρ_m) where ρ_1+…+ρ_m is the additive
/// decomposition of the last CNF exponent of α.
pub fn r1_lh_term(a: &R1Term) -> R1Term {
    let Some(last) = a.last_exponent() else {
        return R1Term::zero();
    };
    last.principal_parts()
        .iter()
        .fold(a.clone(), |acc, rho| acc.add(&r1_lh_term(rho)))
}

/// r1_lh on ordinals; fails for 0 and for arguments ≥ ε₀.
pub fn r1_lh(a: &Ordinal) -> Result<Ordinal, OutOfRange> {
    if a.is_zero() {
        return Err(OutOfRange(a.to_string()));
    }
    Ok(r1_lh_term(&R1Term::try_from(a)?).to_ordinal())
}

/// A random CNF term with nesting depth ≤ `depth`, nonzero.
pub fn random_term<R: Rng>(rng: &mut R, depth: u32, width: usize) -> R1Term {
    loop {
        let t = random_inner(rng, depth, width);
        if !t.is_zero() {
            return t;
        }
    }
}

fn random_inner<R: Rng>(rng: &mut R, depth: u32, width: usize) -> R1Term {
    if depth == 0 {
        return R1Term::zero();
    }
    let k = rng.gen_range(0..=width);
    let mut exps: Vec<R1Term> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                random_inner(rng, depth - 1, width)
            } else {
                R1Term::zero()
            }
        })
        .collect();
    exps.sort_by(|a, b| b.cmp_terms(a));
    exps.dedup();
    R1Term(exps.into_iter().map(|e| (e, rng.gen_range(1..=3))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementRow {
    pub term: String,
    pub r1_lh: String,
    pub r2_lh: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AgreementReport {
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &AgreementRow> {
        self.rows.iter().filter(|r| !r.ok)
    }

    pub fn to_tsv(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                let flag = if r.ok { "ok" } else { "MISMATCH" };
                format!("{}\t{}\t{}\t{}\n", r.term, r.r1_lh, r.r2_lh, flag)
            })
            .collect()
    }
}

/// Compares r1_lh with the chain-based lh on the given terms (each < ε₀).
pub fn agreement_check(terms: &[Ordinal]) -> AgreementReport {
    let rows = terms
        .iter()
        .filter_map(|a| {
            let expected = r1_lh(a).ok()?;
            let (r2, ok) = match lh(a) {
                Ok(ReachValue::Finite(v)) => {
                    let ok = v == expected;
                    (v.to_string(), ok)
                }
                Ok(ReachValue::Infinity) => ("inf".to_string(), false),
                Err(e) => (format!("error: {e}"), false),
            };
            Some(AgreementRow {
                term: a.to_string(),
                r1_lh: expected.to_string(),
                r2_lh: r2,
                ok,
            })
        })
        .collect();
    AgreementReport { rows }
}

/// Samples `samples` random terms of depth ≤ `depth` and runs the comparison.
pub fn sampled_agreement<R: Rng>(rng: &mut R, depth: u32, samples: usize) -> AgreementReport {
    let terms: Vec<Ordinal> = (0..samples)
        .map(|_| random_term(rng, depth, 3).to_ordinal())
        .collect();
    agreement_check(&terms)
}

/// Agreement on a single term.
pub fn check_one(a: &Ordinal) -> Result<bool, ChainError> {
    let expected = r1_lh(a).map_err(|e| ChainError::Range(e.to_string()))?;
    Ok(lh(a)? == ReachValue::Finite(expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use rand::SeedableRng;

    fn p(s: &str) -> Ordinal {
        parse(s).unwrap()
    }

    #[test]
    fn recursion() {
        assert_eq!(r1_lh(&p("1")).unwrap(), p("1"));
        assert_eq!(r1_lh(&p("w")).unwrap(), p("w+1"));
        assert_eq!(r1_lh(&p("w^w")).unwrap(), p("w^w+w+1"));
        assert_eq!(r1_lh(&p("w^(w+2)")).unwrap(), p("w^(w+2)+w+3"));
        assert!(r1_lh(&p("0")).is_err());
        assert!(r1_lh(&p("th_0(th_1(0))")).is_err());
    }

    #[test]
    fn cnf_round_trip() {
        for s in ["0", "1", "w*3+2", "w^(w^2+w)*2+w^3+1"] {
            let a = p(s);
            assert_eq!(R1Term::try_from(&a).unwrap().to_ordinal(), a);
        }
        let a = R1Term::try_from(&p("w^2+w")).unwrap();
        let b = R1Term::try_from(&p("w^2*2+1")).unwrap();
        assert_eq!(a.add(&b).to_ordinal(), p("w^2*3+1"));
    }

    #[test]
    fn agreement_smoke() {
        let mut rng = seeded_rng();
        let rep = sampled_agreement(&mut rng, 4, 200);
        assert!(rep.rows.len() == 200);
        assert_eq!(rep.mismatches().count(), 0, "{}", rep.to_tsv());
        assert!(check_one(&p("w")).unwrap());
    }

    fn seeded_rng() -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(7)
    }
}
