//! The small event structures used throughout the examples and tests.

use crate::pes::{validate_pes, Caps, Pes, RawPes};

pub fn build(raw: RawPes) -> Pes {
    validate_pes(&raw, &Caps::default()).expect("fixture is a valid PES")
}

/// No events.
pub fn p0() -> Pes {
    build(RawPes::new("P0"))
}

/// A single `a`.
pub fn pa() -> Pes {
    build(RawPes::new("PA").event("a", "a"))
}

/// `a` and `b` concurrently.
pub fn par() -> Pes {
    build(RawPes::new("PAR").event("a", "a").event("b", "b"))
}

/// `a` then `b`.
pub fn seq() -> Pes {
    build(
        RawPes::new("SEQ")
            .event("a", "a")
            .event("b", "b")
            .cause("a", "b"),
    )
}

/// The choice between `a` then `b` and `b` then `a`.
pub fn ch() -> Pes {
    build(
        RawPes::new("CH")
            .event("a1", "a")
            .event("b1", "b")
            .event("b2", "b")
            .event("a2", "a")
            .cause("a1", "b1")
            .cause("b2", "a2")
            .conflict("a1", "b2"),
    )
}

/// A silent event followed by `a`.
pub fn tau() -> Pes {
    build(
        RawPes::new("TAU")
            .event("t", "tau")
            .event("a", "a")
            .cause("t", "a"),
    )
}

pub fn all() -> Vec<Pes> {
    vec![p0(), pa(), par(), seq(), ch(), tau()]
}
