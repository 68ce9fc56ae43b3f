//! Pomset isomorphism, posetal maps and their one-event extensions.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pes::{EventSet, Pes};

/// A set of events viewed with the order and labels inherited from its PES.
#[derive(Clone, Copy, Debug)]
pub struct Pomset<'a> {
    pub pes: &'a Pes,
    pub events: EventSet,
}

impl<'a> Pomset<'a> {
    pub fn new(pes: &'a Pes, events: EventSet) -> Self {
        Pomset { pes, events }
    }

    fn visible_or_all(&self, erase_tau: bool) -> EventSet {
        if erase_tau {
            self.pes.hat(self.events)
        } else {
            self.events
        }
    }
}

/// Whether a posetal map covers every event (`Strong`) or only the visible
/// ones (`Weak`, used by the branching equivalences).
///
/// `WeakPaired` maps cover the visible events like `Weak` ones, and in
/// addition remember which silent events were matched with each other.
/// Without that record, pointwise containment would relate triples whose
/// silent events were never matched, and no relation containing an identity
/// map could be downward closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MapMode {
    Strong,
    Weak,
    WeakPaired,
}

impl MapMode {
    pub fn erases_tau(self) -> bool {
        self != MapMode::Strong
    }

    fn views(self, p1: &Pes, c1: EventSet, p2: &Pes, c2: EventSet) -> (EventSet, EventSet) {
        if self.erases_tau() {
            (p1.hat(c1), p2.hat(c2))
        } else {
            (c1, c2)
        }
    }
}

type Pairs = [(usize, usize)];

/// Calls `visit` on every label- and order-preserving bijection between the
/// two sets until it returns `false`. Returns whether the search was cut short.
fn search_bijections(
    p1: &Pes,
    xs: &[usize],
    p2: &Pes,
    ys: &[usize],
    visit: &mut dyn FnMut(&Pairs) -> bool,
) -> bool {
    fn go(
        p1: &Pes,
        xs: &[usize],
        p2: &Pes,
        ys: &[usize],
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        visit: &mut dyn FnMut(&Pairs) -> bool,
    ) -> bool {
        let k = pairs.len();
        if k == xs.len() {
            return !visit(pairs);
        }
        let x = xs[k];
        for (j, &y) in ys.iter().enumerate() {
            if used[j] || p1.label(x) != p2.label(y) {
                continue;
            }
            let coherent = pairs
                .iter()
                .all(|&(a, b)| p1.leq(a, x) == p2.leq(b, y) && p1.leq(x, a) == p2.leq(y, b));
            if !coherent {
                continue;
            }
            used[j] = true;
            pairs.push((x, y));
            let stop = go(p1, xs, p2, ys, used, pairs, visit);
            pairs.pop();
            used[j] = false;
            if stop {
                return true;
            }
        }
        false
    }
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    let mut pairs = Vec::with_capacity(xs.len());
    go(p1, xs, p2, ys, &mut used, &mut pairs, visit)
}

/// Cheap isomorphism invariant: sorted (label, #below, #above) per event.
fn signature(p: &Pes, set: EventSet) -> Vec<(&str, usize, usize)> {
    let mut sig: Vec<_> = set
        .iter()
        .map(|e| {
            (
                p.label(e).name(),
                p.below(e).intersection(set).len(),
                p.above(e).intersection(set).len(),
            )
        })
        .collect();
    sig.sort_unstable();
    sig
}

/// Decides `X̂ ∼ Ŷ` (or `X ∼ Y` when `erase_tau` is false) by exhaustive
/// search over label-respecting bijections.
pub fn pomset_isomorphic(x1: &Pomset, x2: &Pomset, erase_tau: bool) -> bool {
    let s1 = x1.visible_or_all(erase_tau);
    let s2 = x2.visible_or_all(erase_tau);
    if s1.len() != s2.len() || signature(x1.pes, s1) != signature(x2.pes, s2) {
        return false;
    }
    let xs: Vec<usize> = s1.iter().collect();
    let ys: Vec<usize> = s2.iter().collect();
    search_bijections(x1.pes, &xs, x2.pes, &ys, &mut |_| false)
}

/// Memoized [`pomset_isomorphic`] for a fixed pair of event structures.
pub struct IsoCache<'a> {
    p1: &'a Pes,
    p2: &'a Pes,
    erase_tau: bool,
    memo: RefCell<HashMap<(EventSet, EventSet), bool>>,
}

impl<'a> IsoCache<'a> {
    pub fn new(p1: &'a Pes, p2: &'a Pes, erase_tau: bool) -> Self {
        IsoCache {
            p1,
            p2,
            erase_tau,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// `x` is a subset of the first PES, `y` of the second.
    pub fn isomorphic(&self, x: EventSet, y: EventSet) -> bool {
        if let Some(&known) = self.memo.borrow().get(&(x, y)) {
            return known;
        }
        let answer = pomset_isomorphic(
            &Pomset::new(self.p1, x),
            &Pomset::new(self.p2, y),
            self.erase_tau,
        );
        self.memo.borrow_mut().insert((x, y), answer);
        answer
    }
}

/// An isomorphism `f` between two configurations (or their visible parts).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PosetalMap {
    pub mode: MapMode,
    pub domain: EventSet,
    pub codomain: EventSet,
    /// Mapped pairs sorted by their first component.
    pub pairs: Vec<(usize, usize)>,
}

impl PosetalMap {
    pub fn empty(mode: MapMode) -> Self {
        PosetalMap {
            mode,
            domain: EventSet::EMPTY,
            codomain: EventSet::EMPTY,
            pairs: Vec::new(),
        }
    }

    pub fn apply(&self, e: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == e).map(|p| p.1)
    }

    /// Inverse map, for swapping the roles of the two event structures.
    pub fn inverse(&self) -> PosetalMap {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        PosetalMap {
            mode: self.mode,
            domain: self.codomain,
            codomain: self.domain,
            pairs,
        }
    }

    /// Checks every posetal-map invariant against the two event structures.
    pub fn is_valid(&self, p1: &Pes, p2: &Pes) -> bool {
        if !p1.is_configuration(self.domain) || !p2.is_configuration(self.codomain) {
            return false;
        }
        let (d, c) = self.mode.views(p1, self.domain, p2, self.codomain);
        let lefts = EventSet::from_events(self.pairs.iter().map(|p| p.0));
        let rights = EventSet::from_events(self.pairs.iter().map(|p| p.1));
        let n = self.pairs.len();
        let covered = if self.mode == MapMode::WeakPaired {
            d.is_subset(lefts)
                && c.is_subset(rights)
                && lefts.is_subset(self.domain)
                && rights.is_subset(self.codomain)
                && lefts.minus(d).len() == rights.minus(c).len()
        } else {
            lefts == d && rights == c
        };
        if !covered || lefts.len() != n || rights.len() != n {
            return false;
        }
        if !self.pairs.windows(2).all(|w| w[0].0 < w[1].0) {
            return false;
        }
        self.pairs.iter().all(|&(a, b)| {
            p1.label(a) == p2.label(b)
                && self
                    .pairs
                    .iter()
                    .all(|&(x, y)| p1.leq(a, x) == p2.leq(b, y))
        })
    }
}

/// All posetal maps between `c1` and `c2` in the given mode, in search order.
pub fn enumerate_isomorphisms(
    p1: &Pes,
    c1: EventSet,
    p2: &Pes,
    c2: EventSet,
    mode: MapMode,
) -> Vec<PosetalMap> {
    let (s1, s2) = mode.views(p1, c1, p2, c2);
    if s1.len() != s2.len() || signature(p1, s1) != signature(p2, s2) {
        return Vec::new();
    }
    let xs: Vec<usize> = s1.iter().collect();
    let ys: Vec<usize> = s2.iter().collect();
    let mut out = Vec::new();
    search_bijections(p1, &xs, p2, &ys, &mut |pairs| {
        let mut pairs = pairs.to_vec();
        if mode == MapMode::WeakPaired {
            let taus1: Vec<usize> = c1.minus(s1).iter().collect();
            let taus2: Vec<usize> = c2.minus(s2).iter().collect();
            silent_matchings(p1, p2, &taus1, &taus2, &mut pairs, &mut |all| {
                let mut all = all.to_vec();
                all.sort_unstable();
                out.push(PosetalMap {
                    mode,
                    domain: c1,
                    codomain: c2,
                    pairs: all,
                });
            });
        } else {
            pairs.sort_unstable();
            out.push(PosetalMap {
                mode,
                domain: c1,
                codomain: c2,
                pairs,
            });
        }
        true
    });
    out
}

/// Extends `pairs` by every order-coherent partial matching of the silent
/// events `taus1` with `taus2`.
fn silent_matchings(
    p1: &Pes,
    p2: &Pes,
    taus1: &[usize],
    taus2: &[usize],
    pairs: &mut Vec<(usize, usize)>,
    visit: &mut dyn FnMut(&Pairs),
) {
    let Some((&x, rest)) = taus1.split_first() else {
        visit(pairs);
        return;
    };
    silent_matchings(p1, p2, rest, taus2, pairs, visit);
    for &y in taus2 {
        if pairs.iter().any(|p| p.1 == y) {
            continue;
        }
        let coherent = pairs
            .iter()
            .all(|&(a, b)| p1.leq(a, x) == p2.leq(b, y) && p1.leq(x, a) == p2.leq(y, b));
        if coherent {
            pairs.push((x, y));
            silent_matchings(p1, p2, rest, taus2, pairs, visit);
            pairs.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("labels differ")]
    LabelMismatch,
    #[error("causal order not preserved")]
    OrderViolation,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

/// `f[e1 ↦ e2]` on `C1 ∪ {e1} → C2 ∪ {e2}`.
///
/// In weak mode two silent events extend the configurations but leave the
/// stored pairs untouched; in paired mode they are recorded like any other.
pub fn extend_map(
    p1: &Pes,
    p2: &Pes,
    f: &PosetalMap,
    e1: usize,
    e2: usize,
) -> Result<PosetalMap, ExtendError> {
    if e1 >= p1.len() || e2 >= p2.len() {
        return Err(ExtendError::Precondition("event out of range"));
    }
    if f.domain.contains(e1) || f.codomain.contains(e2) {
        return Err(ExtendError::Precondition("event already mapped"));
    }
    let domain = f.domain.with(e1);
    let codomain = f.codomain.with(e2);
    if !p1.is_configuration(domain) || !p2.is_configuration(codomain) {
        return Err(ExtendError::Precondition(
            "extension is not a configuration",
        ));
    }
    if p1.label(e1) != p2.label(e2) {
        return Err(ExtendError::LabelMismatch);
    }
    let mut pairs = f.pairs.clone();
    let silent = f.mode == MapMode::Weak && p1.is_tau(e1);
    if !silent {
        let coherent = f
            .pairs
            .iter()
            .all(|&(a, b)| p1.leq(a, e1) == p2.leq(b, e2) && p1.leq(e1, a) == p2.leq(e2, b));
        if !coherent {
            return Err(ExtendError::OrderViolation);
        }
        let at = pairs.partition_point(|p| p.0 < e1);
        pairs.insert(at, (e1, e2));
    }
    Ok(PosetalMap {
        mode: f.mode,
        domain,
        codomain,
        pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// `f[e ↦ τ]`: a weak map absorbing a silent event on one side.
pub fn absorb_silent(
    p: &Pes,
    f: &PosetalMap,
    side: Side,
    e: usize,
) -> Result<PosetalMap, ExtendError> {
    if !f.mode.erases_tau() {
        return Err(ExtendError::Precondition(
            "silent absorption needs a weak map",
        ));
    }
    if !p.is_tau(e) {
        return Err(ExtendError::LabelMismatch);
    }
    let cfg = match side {
        Side::Left => f.domain,
        Side::Right => f.codomain,
    };
    if cfg.contains(e) || !p.is_configuration(cfg.with(e)) {
        return Err(ExtendError::Precondition(
            "extension is not a configuration",
        ));
    }
    let mut g = f.clone();
    match side {
        Side::Left => g.domain = cfg.with(e),
        Side::Right => g.codomain = cfg.with(e),
    }
    Ok(g)
}

/// `(C1, f, C2)`. The configurations are those of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PosetalTriple {
    pub f: PosetalMap,
}

impl PosetalTriple {
    pub fn new(f: PosetalMap) -> Self {
        PosetalTriple { f }
    }

    pub fn empty(mode: MapMode) -> Self {
        PosetalTriple::new(PosetalMap::empty(mode))
    }

    pub fn c1(&self) -> EventSet {
        self.f.domain
    }

    pub fn c2(&self) -> EventSet {
        self.f.codomain
    }
}

/// Pointwise containment: both configurations, and `t1`'s map is the part of
/// `t2`'s map touching `t1`'s configurations. For strong maps this is plain
/// graph containment.
pub fn triple_leq(t1: &PosetalTriple, t2: &PosetalTriple) -> bool {
    t1.c1().is_subset(t2.c1())
        && t1.c2().is_subset(t2.c2())
        && t1
            .f
            .pairs
            .iter()
            .all(|p| t2.f.pairs.binary_search(p).is_ok())
        && t2
            .f
            .pairs
            .iter()
            .filter(|&&(a, b)| t1.c1().contains(a) || t1.c2().contains(b))
            .all(|p| t1.f.pairs.binary_search(p).is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pes::{validate_pes, Caps, RawPes};

    fn build(raw: RawPes) -> Pes {
        validate_pes(&raw, &Caps::default()).unwrap()
    }

    fn par() -> Pes {
        build(RawPes::new("PAR").event("a", "a").event("b", "b"))
    }

    fn seq() -> Pes {
        build(
            RawPes::new("SEQ")
                .event("a", "a")
                .event("b", "b")
                .cause("a", "b"),
        )
    }

    fn ch() -> Pes {
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

    fn all(p: &Pes) -> EventSet {
        p.all_events()
    }

    #[test]
    fn antichain_is_not_a_chain() {
        let (p, c) = (par(), ch());
        let chain = EventSet::from_events([0, 1]);
        assert!(!pomset_isomorphic(
            &Pomset::new(&p, all(&p)),
            &Pomset::new(&c, chain),
            false
        ));
        assert!(!pomset_isomorphic(
            &Pomset::new(&p, all(&p)),
            &Pomset::new(&c, chain),
            true
        ));
    }

    #[test]
    fn reflexive_under_both_flags() {
        for p in [par(), seq(), ch()] {
            for x in all(&p).nonempty_subsets() {
                for erase in [false, true] {
                    assert!(pomset_isomorphic(
                        &Pomset::new(&p, x),
                        &Pomset::new(&p, x),
                        erase
                    ));
                }
            }
        }
    }

    #[test]
    fn erased_silent_event_matches_empty() {
        let t = build(
            RawPes::new("TAU")
                .event("t", "tau")
                .event("a", "a")
                .cause("t", "a"),
        );
        let empty = Pomset::new(&t, EventSet::EMPTY);
        let silent = Pomset::new(&t, EventSet::singleton(0));
        assert!(pomset_isomorphic(&silent, &empty, true));
        assert!(!pomset_isomorphic(&silent, &empty, false));
    }

    #[test]
    fn isomorphism_enumeration() {
        let p0 = build(RawPes::new("P0"));
        let maps =
            enumerate_isomorphisms(&p0, EventSet::EMPTY, &p0, EventSet::EMPTY, MapMode::Strong);
        assert_eq!(maps, vec![PosetalMap::empty(MapMode::Strong)]);

        let p = par();
        let aa = build(RawPes::new("AA").event("x", "a").event("y", "a"));
        let aa2 = build(RawPes::new("AA2").event("u", "a").event("v", "a"));
        assert_eq!(
            enumerate_isomorphisms(&aa, all(&aa), &aa2, all(&aa2), MapMode::Strong).len(),
            2
        );
        // PAR's {a,b} has distinct labels, so only the label-respecting one survives.
        assert!(enumerate_isomorphisms(&p, all(&p), &aa, all(&aa), MapMode::Strong).is_empty());

        let s = seq();
        let b_only = build(RawPes::new("B").event("b", "b"));
        assert!(enumerate_isomorphisms(
            &s,
            EventSet::singleton(0),
            &b_only,
            EventSet::singleton(0),
            MapMode::Strong
        )
        .is_empty());
        for m in enumerate_isomorphisms(&aa, all(&aa), &aa2, all(&aa2), MapMode::Strong) {
            assert!(m.is_valid(&aa, &aa2));
        }
    }

    #[test]
    fn extensions() {
        let s = seq();
        let f = PosetalMap::empty(MapMode::Strong);
        let g = extend_map(&s, &s, &f, 0, 0).unwrap();
        assert_eq!(g.pairs, vec![(0, 0)]);

        let c = ch();
        let a1 = c.event_by_id("a1").unwrap();
        let b1 = c.event_by_id("b1").unwrap();
        let f = extend_map(&c, &s, &PosetalMap::empty(MapMode::Strong), a1, 0).unwrap();
        let g = extend_map(&c, &s, &f, b1, 1).unwrap();
        assert_eq!(g.pairs, vec![(a1, 0), (b1, 1)]);
        assert!(g.is_valid(&c, &s));

        let f = PosetalMap::empty(MapMode::Strong);
        assert_eq!(
            extend_map(&s, &s, &f, 0, 1),
            Err(ExtendError::Precondition(
                "extension is not a configuration"
            ))
        );
        let p = par();
        assert_eq!(
            extend_map(&p, &p, &f, 0, 1),
            Err(ExtendError::LabelMismatch)
        );
        // PAR {a} then b is concurrent; SEQ {a} then b is caused.
        let f = extend_map(&p, &s, &f, 0, 0).unwrap();
        assert_eq!(
            extend_map(&p, &s, &f, 1, 1),
            Err(ExtendError::OrderViolation)
        );
        assert_eq!(
            extend_map(&p, &s, &f, 0, 1),
            Err(ExtendError::Precondition("event already mapped"))
        );
    }

    #[test]
    fn weak_silent_extension_keeps_pairs() {
        let t = build(
            RawPes::new("TAU")
                .event("t", "tau")
                .event("a", "a")
                .cause("t", "a"),
        );
        let f = PosetalMap::empty(MapMode::Weak);
        let g = extend_map(&t, &t, &f, 0, 0).unwrap();
        assert!(g.pairs.is_empty());
        assert_eq!(g.domain, EventSet::singleton(0));
        let h = absorb_silent(&t, &f, Side::Left, 0).unwrap();
        assert_eq!(h.domain, EventSet::singleton(0));
        assert_eq!(h.codomain, EventSet::EMPTY);
        assert!(h.is_valid(&t, &t));
        assert_eq!(
            absorb_silent(&t, &h, Side::Left, 1),
            Err(ExtendError::LabelMismatch)
        );
    }

    #[test]
    fn pointwise_containment() {
        let c = ch();
        let s = build(
            RawPes::new("XY")
                .event("x", "a")
                .event("y", "a")
                .event("z", "b")
                .cause("y", "z"),
        );
        let empty = PosetalTriple::empty(MapMode::Strong);
        let small = PosetalTriple::new(
            extend_map(&c, &s, &PosetalMap::empty(MapMode::Strong), 0, 0).unwrap(),
        );
        let f = extend_map(&c, &s, &PosetalMap::empty(MapMode::Strong), 0, 1).unwrap();
        let big = PosetalTriple::new(extend_map(&c, &s, &f, 1, 2).unwrap());
        assert!(triple_leq(&empty, &small) && triple_leq(&empty, &big));
        assert!(triple_leq(&big, &big));
        assert!(!triple_leq(&small, &big));
    }

    #[test]
    fn paired_maps_remember_silent_matches() {
        let tt = build(RawPes::new("TT").event("t1", "tau").event("t2", "tau"));
        let both = all(&tt);
        // No pairing, four single pairings, two full pairings.
        let maps = enumerate_isomorphisms(&tt, both, &tt, both, MapMode::WeakPaired);
        assert_eq!(maps.len(), 7);
        assert!(maps.iter().all(|m| m.is_valid(&tt, &tt)));
        assert_eq!(
            enumerate_isomorphisms(&tt, both, &tt, both, MapMode::Weak).len(),
            1
        );

        let f = PosetalMap::empty(MapMode::WeakPaired);
        let g = extend_map(&tt, &tt, &f, 0, 0).unwrap();
        assert_eq!(g.pairs, vec![(0, 0)]);
        let id = PosetalTriple::new(extend_map(&tt, &tt, &g, 1, 1).unwrap());
        let crossed = PosetalTriple::new(PosetalMap {
            mode: MapMode::WeakPaired,
            domain: EventSet::singleton(1),
            codomain: EventSet::singleton(0),
            pairs: Vec::new(),
        });
        assert!(crossed.f.is_valid(&tt, &tt));
        // t2 on the left is matched with t2, not left unmatched.
        assert!(!triple_leq(&crossed, &id));
        let unmatched = PosetalTriple::new(PosetalMap {
            pairs: Vec::new(),
            ..id.f.clone()
        });
        assert!(triple_leq(&crossed, &unmatched));
        assert!(triple_leq(&PosetalTriple::new(g), &id));
    }
}
