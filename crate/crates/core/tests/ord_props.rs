mod common;

use std::cmp::Ordering;

use common::{family, p};
use proptest::prelude::*;
use proptest::sample::select;
use r2wb::notation::{enumerate_terms, term_length, upsilon_seg, TermUniverse};
use r2wb::Ordinal;

fn term() -> impl Strategy<Value = Ordinal> {
    select(family().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compare_is_a_total_order(a in term(), b in term(), c in term()) {
        prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
        if a <= b && b <= c {
            prop_assert!(a <= c);
        }
    }

    #[test]
    fn arithmetic_laws(a in term(), b in term(), c in term()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&b) >= b);
    }

    #[test]
    fn normal_forms_fold_back(a in term()) {
        prop_assert_eq!(Ordinal::sum_of(a.anf()), a.clone());
        if a.is_principal() {
            prop_assert_eq!(Ordinal::product_of(a.mnf().unwrap()), a.clone());
        }
        if !a.is_zero() {
            prop_assert_eq!(Some(a.end()), a.anf().last().cloned());
            prop_assert_eq!(a.logend(), a.end().log().unwrap());
        }
    }

    #[test]
    fn left_division_and_subtraction(a in term(), b in term()) {
        if a <= b {
            prop_assert_eq!(a.add(&a.lsub(&b).unwrap()), b.clone());
        }
        if a.is_principal() && !b.is_zero() {
            if let Ok(q) = Ordinal::left_div(&a, &b) {
                prop_assert_eq!(a.mul(&q), b);
            }
        }
    }

    #[test]
    fn printing_round_trips(a in term()) {
        let s = a.to_string();
        prop_assert_eq!(p(&s), a.clone());
        prop_assert_eq!(p(&s).to_string(), s);
    }

    #[test]
    fn upsilon_is_increasing(i in 0u64..6, j in 0u64..6, lim in select(vec!["0", "w", "w*2"])) {
        let base = p(lim);
        let (a, b) = (base.add(&Ordinal::nat(i)), base.add(&Ordinal::nat(j)));
        prop_assert_eq!(Ordinal::upsilon(&a).unwrap().cmp(&Ordinal::upsilon(&b).unwrap()), a.cmp(&b));
    }

    #[test]
    fn segments_bracket_their_term(a in term()) {
        let g = upsilon_seg(&a).unwrap();
        let lo = Ordinal::upsilon(&g.index()).unwrap();
        let hi = Ordinal::upsilon(&g.index().succ()).unwrap();
        prop_assert!(lo <= a && a < hi, "{} not in [{}, {})", a, lo, hi);
    }

    #[test]
    fn length_grows_with_subterms(a in term(), b in term()) {
        // a is a subterm of a+b exactly when no summand of a is absorbed.
        if b.lead().is_none_or(|l| !a.is_zero() && l <= a.end()) {
            let s = a.add(&b);
            prop_assert!(term_length(&s) >= term_length(&a));
        }
        if !a.is_zero() {
            let w = Ordinal::omega_pow(&a);
            if !w.is_epsilon() {
                prop_assert!(term_length(&w) > term_length(&a) || a.is_one());
            }
        }
    }
}

#[test]
fn epsilon_free_collapse_is_an_omega_power() {
    for a in family().iter().filter(|a| a.is_countable() && *a < &p("th_0(th_1(0))")) {
        let arg = Ordinal::one().add(a);
        let t = Ordinal::theta(0, None, &arg).unwrap();
        assert_eq!(t, Ordinal::omega_pow(&arg), "{a}");
    }
}

#[test]
fn enumeration_is_sorted() {
    assert!(family().windows(2).all(|w| w[0] < w[1]));
    let u = TermUniverse::below(p("w^w"), 12);
    let v = enumerate_terms(&u);
    assert!(v.iter().all(|t| term_length(t) <= 12 && *t < p("w^w")));
}
