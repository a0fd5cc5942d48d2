mod common;

use common::{family, low_family, p};
use proptest::prelude::*;
use r2wb::query::{le1, le2, lh, lh2, pred1, pred2, succ2_enum, LimitScheme, PredResult, ReachValue};
use r2wb::{ChainError, Ordinal};

/// Unwraps a query result inside a property; unsupported cases are rejected.
fn known<T>(r: Result<T, ChainError>) -> Result<T, TestCaseError> {
    match r {
        Ok(v) => Ok(v),
        Err(e) if e.is_unsupported() => Err(TestCaseError::reject(e.to_string())),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

/// Points on which pred1, pred2, lh and lh2 all evaluate.
fn points() -> &'static [Ordinal] {
    static P: std::sync::OnceLock<Vec<Ordinal>> = std::sync::OnceLock::new();
    P.get_or_init(|| {
        let mut all: Vec<Ordinal> = family().iter().chain(low_family()).cloned().collect();
        all.extend(["v[w]", "v[w*2]", "v[w^2]"].map(p));
        all.sort();
        all.dedup();
        all.into_iter()
            .filter(|t| t.is_countable())
            .filter(|t| pred1(t).is_ok() && pred2(t).is_ok() && lh(t).is_ok() && lh2(t).is_ok())
            .collect()
    })
}

fn is_limit_upsilon(a: &Ordinal) -> bool {
    a.upsilon_index().is_some_and(|i| i.is_limit())
}

#[test]
fn enough_points() {
    assert!(points().len() > 300, "{}", points().len());
}

#[test]
fn pred2_has_a_limit_exactly_at_limit_upsilons() {
    for b in points() {
        let limit = matches!(pred2(b).unwrap(), PredResult::Limit(LimitScheme::UpsilonChain { .. }));
        assert_eq!(limit, is_limit_upsilon(b), "{b}");
    }
}

#[test]
fn greatest_predecessors_are_greatest() {
    let pts = points();
    for b in pts {
        for (rel, pred) in [(1, pred1(b).unwrap()), (2, pred2(b).unwrap())] {
            let Some(a) = pred.greatest() else { continue };
            assert!(a < b);
            let le = |x: &Ordinal| if rel == 1 { le1(x, b) } else { le2(x, b) };
            assert!(le(a).unwrap(), "{a} ≤{rel} {b}");
            for x in pts.iter().filter(|x| *x > a && *x < b) {
                assert!(!le(x).unwrap(), "{x} ≤{rel} {b} above pred{rel} = {a}");
            }
        }
    }
}

#[test]
fn second_successors_are_enumerated_up_to_lh2() {
    for a in points() {
        let succ = succ2_enum(a, 32).unwrap();
        assert_eq!(succ.first(), Some(a), "{a}");
        assert!(succ.windows(2).all(|w| w[0] < w[1]));
        for x in succ.iter().take(6) {
            assert!(le2(a, x).unwrap(), "{a} ≤2 {x}");
        }
        match lh2(a).unwrap() {
            ReachValue::Finite(top) if succ.len() < 32 => assert_eq!(succ.last(), Some(&top), "{a}"),
            ReachValue::Finite(top) => assert!(succ.iter().all(|x| *x <= top)),
            ReachValue::Infinity => assert_eq!(succ.len(), 32, "{a}"),
        }
    }
}

fn pair() -> impl Strategy<Value = (Ordinal, Ordinal)> {
    let pts = points().to_vec();
    (prop::sample::select(pts.clone()), prop::sample::select(pts))
        .prop_map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
}

fn triple() -> impl Strategy<Value = [Ordinal; 3]> {
    let pts = points().to_vec();
    prop::collection::vec(prop::sample::select(pts), 3).prop_map(|mut v| {
        v.sort();
        [v[0].clone(), v[1].clone(), v[2].clone()]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 1 << 14, ..ProptestConfig::with_cases(1024) })]

    #[test]
    fn le1_is_the_interval_up_to_lh((a, b) in pair()) {
        let reach = lh(&a).unwrap();
        let within = match &reach {
            ReachValue::Finite(top) => b <= *top,
            ReachValue::Infinity => true,
        };
        prop_assert_eq!(known(le1(&a, &b))?, within, "lh({}) = {}", a, reach);
    }

    #[test]
    fn le2_refines_le1((a, b) in pair()) {
        if known(le2(&a, &b))? {
            prop_assert!(known(le1(&a, &b))?);
        }
    }

    #[test]
    fn relations_form_forests([a, b, c] in triple()) {
        for le in [le1, le2] {
            if known(le(&a, &c))? && known(le(&b, &c))? {
                prop_assert!(known(le(&a, &b))?, "{} {} {}", a, b, c);
            }
            if known(le(&a, &b))? && known(le(&b, &c))? {
                prop_assert!(known(le(&a, &c))?, "{} {} {}", a, b, c);
            }
        }
    }

    #[test]
    fn le2_is_convex_below_its_targets([a, b, c] in triple()) {
        // a ≤2 c and a ≤ b ≤ c force a ≤1 b
        if known(le2(&a, &c))? {
            prop_assert!(known(le1(&a, &b))?, "{} {} {}", a, b, c);
        }
    }
}
