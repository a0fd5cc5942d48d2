mod common;

use std::collections::{BTreeSet, HashMap};

use common::{family, low_family, p};
use proptest::prelude::*;
use r2wb::chain::{me, me_counted, parse_rows, tc_assign, validate, Chain, TrackingChain, ME_STEP_LIMIT};
use r2wb::closed::close;
use r2wb::ts::lambda_ts;
use r2wb::Ordinal;

/// Family terms whose chain is both assigned and evaluable.
fn assigned() -> &'static [(Ordinal, TrackingChain)] {
    static A: std::sync::OnceLock<Vec<(Ordinal, TrackingChain)>> = std::sync::OnceLock::new();
    A.get_or_init(|| {
        let mut all: Vec<Ordinal> = family().iter().chain(low_family()).cloned().collect();
        all.sort();
        all.dedup();
        all.into_iter()
            .filter(|t| t.is_countable())
            .filter_map(|t| tc_assign(&t).ok().map(|c| (t, c)))
            .filter(|(_, c)| c.evaluate().is_ok())
            .collect()
    })
}

#[test]
fn assignment_is_an_order_isomorphism() {
    let rows = assigned();
    assert!(rows.len() > 300, "only {} chains", rows.len());
    for (a, c) in rows {
        assert_eq!(&c.value().unwrap(), a, "o({c})");
    }
    for w in rows.windows(2) {
        assert!(w[0].1 < w[1].1, "tc({}) = {} vs tc({}) = {}", w[0].0, w[0].1, w[1].0, w[1].1);
    }
}

#[test]
fn text_form_round_trips() {
    for (_, c) in assigned() {
        let text = c.to_string();
        let rows = parse_rows(&text).unwrap();
        assert_eq!(Chain(&rows).to_string(), text);
        assert_eq!(&validate(rows).unwrap(), c);
    }
}

#[test]
fn reference_sequences_track_the_evaluation() {
    let mut checked = 0;
    for (_, c) in assigned() {
        let ev = c.evaluate().unwrap();
        // ts(τ̃) → position, over positions whose row starts above its unit
        let mut seen: HashMap<Vec<Ordinal>, (usize, usize)> = HashMap::new();
        for pair in c.dom() {
            let (i, j) = (pair.i, pair.j);
            let first = c.tau(i, 1);
            if !(first.is_epsilon() && *first > c.unit(i).tau) || c.tau(i, j).is_one() {
                continue;
            }
            let Ok(ts) = lambda_ts(ev.tilde_tau(i, j)) else { continue };
            assert_eq!(ts.parts(), c.rs(i, j).unwrap().as_slice(), "{c} at ({i},{j})");
            if let Some(prev) = seen.insert(ts.into_parts(), (i, j)) {
                panic!("{c}: ({i},{j}) and {prev:?} share ts(τ̃)");
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn maximal_extension_is_idempotent() {
    for (a, c) in assigned() {
        let Ok((m, steps)) = me_counted(c) else { continue };
        assert!(steps <= ME_STEP_LIMIT);
        let Ok(v) = m.value() else { continue };
        assert!(v >= *a, "me({c}) = {m}");
        assert_eq!(me(&m).unwrap(), m, "me(me({c}))");
    }
}

#[test]
fn closure_of_upsilon_points() {
    let seed: Vec<TrackingChain> = ["v[2]", "v[w+1]*w"].iter().map(|s| tc_assign(&p(s)).unwrap()).collect();
    let cl = close(seed.iter()).unwrap();
    assert!(seed.iter().all(|c| cl.chains.contains(c)));
}

fn seed_strategy() -> impl Strategy<Value = Vec<TrackingChain>> {
    let pool: Vec<TrackingChain> = assigned().iter().map(|(_, c)| c.clone()).collect();
    prop::collection::vec(prop::sample::select(pool), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_a_closure_operator(seed in seed_strategy(), extra in seed_strategy()) {
        let Ok(cl) = close(seed.iter()) else { return Ok(()) };
        prop_assert!(seed.iter().all(|c| cl.chains.contains(c)));
        let again = close(cl.chains.iter()).unwrap();
        prop_assert_eq!(&again.chains, &cl.chains);
        let bigger: Vec<TrackingChain> = seed.iter().chain(&extra).cloned().collect();
        if let Ok(cl2) = close(bigger.iter()) {
            let small: BTreeSet<_> = cl.chains.iter().collect();
            prop_assert!(small.iter().all(|c| cl2.chains.contains(c)));
        }
    }
}
