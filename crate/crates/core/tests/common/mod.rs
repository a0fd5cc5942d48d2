#![allow(dead_code)]

use std::sync::OnceLock;

use r2wb::notation::{enumerate_terms, TermUniverse};
use r2wb::Ordinal;

pub fn p(s: &str) -> Ordinal {
    s.parse().unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// Mixed family: ordinary terms, ε-numbers and a few υ-constants.
pub fn family() -> &'static [Ordinal] {
    static F: OnceLock<Vec<Ordinal>> = OnceLock::new();
    F.get_or_init(|| {
        enumerate_terms(&TermUniverse {
            bound: Some(p("v[w+3]")),
            max_length: 10,
            max_width: 2,
            upsilon_indices: ["1", "2", "3", "w", "w+1", "w+2"].iter().map(|s| p(s)).collect(),
            max_level: 1,
        })
    })
}

/// Terms below ε₀·ω² with small width.
pub fn low_family() -> &'static [Ordinal] {
    static F: OnceLock<Vec<Ordinal>> = OnceLock::new();
    F.get_or_init(|| {
        enumerate_terms(&TermUniverse {
            bound: Some(p("th_0(th_1(0))*w^2")),
            max_length: 14,
            max_width: 3,
            upsilon_indices: Vec::new(),
            max_level: 1,
        })
    })
}
