//! Greatest-fixpoint checkers for the eight equivalences.
//!
//! Starting from every candidate pair (or posetal triple), states that fail
//! their transfer conditions are removed until nothing changes. For the
//! hereditary flavors, states with a removed sub-triple are removed too, and
//! both prunings alternate until a joint fixpoint.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso::{
    absorb_silent, extend_map, pomset_isomorphic, Pomset, PosetalMap, PosetalTriple, Side,
};
use crate::kind::{Flavor, Mode, RelationKind};
use crate::pes::{EventSet, Pes};
use crate::product::{with_config, CheckOptions, Product, State};

/// A set of related states, canonically ordered.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub states: Vec<State>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, s: &State) -> bool {
        self.states.binary_search(s).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: RelationKind,
    pub equivalent: bool,
    /// The greatest relation, when it contains the initial state.
    pub witness: Option<Relation>,
}

struct Fixpoint<'p, 'a> {
    prod: &'p Product<'a>,
}

impl Fixpoint<'_, '_> {
    fn holds(&self, x: usize, alive: &[bool]) -> bool {
        let pos = self.prod.kind.is_posetal();
        [Side::Left, Side::Right].into_iter().all(|side| {
            if pos {
                self.triple_transfer(x, side, alive)
            } else {
                self.pair_transfer(x, side, alive)
            }
        })
    }

    fn pair_transfer(&self, x: usize, side: Side, alive: &[bool]) -> bool {
        let prod = self.prod;
        let other_side = side.other();
        let own = prod.cfg_of(x, side);
        let other = prod.cfg_of(x, other_side);
        let related = |o: usize, t: usize| alive[prod.pair_index(side, o, t)];
        let answered_from = |o0: usize, xs: EventSet, own_next: usize| {
            prod.moves(other_side, o0)
                .any(|(ys, t)| prod.pomsets_match(side, xs, ys) && related(own_next, t))
        };
        match prod.kind.mode {
            Mode::Strong => prod
                .moves(side, own)
                .all(|(xs, own_next)| answered_from(other, xs, own_next)),
            Mode::Branching => {
                let moves_ok = prod.moves(side, own).all(|(xs, own_next)| {
                    (prod.is_silent(side, xs) && related(own_next, other))
                        || prod
                            .tau_closure(other_side, other)
                            .iter()
                            .any(|&o0| related(own, o0) && answered_from(o0, xs, own_next))
                });
                moves_ok
                    && (!prod.terminating(side, own)
                        || prod
                            .tau_closure(other_side, other)
                            .iter()
                            .any(|&o0| related(own, o0) && prod.terminating(other_side, o0)))
            }
        }
    }

    fn triple_transfer(&self, x: usize, side: Side, alive: &[bool]) -> bool {
        let prod = self.prod;
        let other_side = side.other();
        let own = prod.cfg_of(x, side);
        let other = prod.cfg_of(x, other_side);
        let f = prod.map_of(x);
        let member = |g: &PosetalMap| prod.triple_index(g).is_some_and(|i| alive[i]);
        let single = |xs: EventSet| xs.iter().next().expect("single event");
        // f[e ↦ e'] with the arguments put back in (left, right) order.
        let extend = |g: &PosetalMap, e: usize, e2: usize| match side {
            Side::Left => extend_map(prod.p1, prod.p2, g, e, e2),
            Side::Right => extend_map(prod.p1, prod.p2, g, e2, e),
        };
        let answered_from = |g: &PosetalMap, o0: usize, e: usize| {
            prod.moves(other_side, o0)
                .any(|(ys, _)| extend(g, e, single(ys)).is_ok_and(|h| member(&h)))
        };
        match prod.kind.mode {
            Mode::Strong => prod
                .moves(side, own)
                .all(|(xs, _)| answered_from(f, other, single(xs))),
            Mode::Branching => {
                let stutter =
                    |o0: usize| with_config(f, other_side, prod.space(other_side).configs[o0]);
                let moves_ok = prod.moves(side, own).all(|(xs, _)| {
                    let e = single(xs);
                    let absorbed = prod.is_silent(side, xs)
                        && absorb_silent(prod.pes(side), f, side, e).is_ok_and(|h| member(&h));
                    absorbed
                        || prod.tau_closure(other_side, other).iter().any(|&o0| {
                            let g = stutter(o0);
                            member(&g) && answered_from(&g, o0, e)
                        })
                });
                moves_ok
                    && (!prod.terminating(side, own)
                        || prod
                            .tau_closure(other_side, other)
                            .iter()
                            .any(|&o0| member(&stutter(o0)) && prod.terminating(other_side, o0)))
            }
        }
    }
}

/// Removes failing states until a fixpoint; returns the surviving mask.
fn fixpoint(prod: &Product) -> Vec<bool> {
    let mut alive = vec![true; prod.len()];
    let subs = prod.kind.is_hereditary().then(|| prod.sub_triples());
    let fp = Fixpoint { prod };
    loop {
        let mut changed = false;
        loop {
            let mut pass_changed = false;
            for x in 0..prod.len() {
                if alive[x] && !fp.holds(x, &alive) {
                    alive[x] = false;
                    pass_changed = true;
                }
            }
            if !pass_changed {
                break;
            }
            changed = true;
        }
        if let Some(subs) = &subs {
            for x in 0..prod.len() {
                if alive[x] && subs[x].iter().any(|&y| !alive[y]) {
                    alive[x] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            return alive;
        }
    }
}

/// The largest relation closed under the transfer (and, for hhp, downward
/// closure) conditions of `kind`.
pub fn greatest_relation(
    p1: &Pes,
    p2: &Pes,
    kind: RelationKind,
    opts: &CheckOptions,
) -> Result<Relation> {
    let prod = Product::new(p1, p2, kind, opts)?;
    let alive = fixpoint(&prod);
    let mut states: Vec<State> = prod
        .states
        .into_iter()
        .zip(alive)
        .filter_map(|(s, a)| a.then_some(s))
        .collect();
    states.sort();
    Ok(Relation { kind, states })
}

/// `(∅, ∅)`, or the empty triple for hp/hhp.
pub fn initial_state(kind: RelationKind) -> State {
    if kind.is_posetal() {
        State::Triple(PosetalTriple::empty(kind.map_mode()))
    } else {
        State::Pair(EventSet::EMPTY, EventSet::EMPTY)
    }
}

/// Equivalent iff the empty pair (or triple) survives in the greatest relation.
pub fn check(p1: &Pes, p2: &Pes, kind: RelationKind, opts: &CheckOptions) -> Result<Verdict> {
    let relation = greatest_relation(p1, p2, kind, opts)?;
    let equivalent = relation.contains(&initial_state(kind));
    Ok(Verdict {
        kind,
        equivalent,
        witness: equivalent.then_some(relation),
    })
}

/// Re-checks every closure condition of `kind` on an arbitrary set of
/// states, directly from the definitions.
pub fn verify_witness(
    p1: &Pes,
    p2: &Pes,
    kind: RelationKind,
    states: &[State],
    opts: &CheckOptions,
) -> Result<bool> {
    let set: BTreeSet<State> = states.iter().cloned().collect();
    for s in &set {
        well_formed(p1, p2, kind, s)?;
    }
    let checker = Direct {
        p1,
        p2,
        kind,
        erase: kind.mode == Mode::Branching || (opts.erase_tau_in_strong && !kind.is_posetal()),
        set: &set,
    };
    Ok(set.iter().all(|s| checker.closed(s)))
}

fn well_formed(p1: &Pes, p2: &Pes, kind: RelationKind, s: &State) -> Result<()> {
    let bad = |why: &str| Err(Error::MalformedElement(format!("{s:?}: {why}")));
    if !p1.is_configuration(s.c1()) || !p2.is_configuration(s.c2()) {
        return bad("not a pair of configurations");
    }
    match s {
        State::Pair(..) if kind.is_posetal() => bad("expected a posetal triple"),
        State::Triple(_) if !kind.is_posetal() => bad("expected a configuration pair"),
        State::Triple(t) if t.f.mode != kind.map_mode() || !t.f.is_valid(p1, p2) => {
            bad("not an isomorphism of the right mode")
        }
        _ => Ok(()),
    }
}

/// Literal evaluation of the definitions over a `BTreeSet`, independent of
/// the indexed fixpoint machinery.
struct Direct<'a> {
    p1: &'a Pes,
    p2: &'a Pes,
    kind: RelationKind,
    erase: bool,
    set: &'a BTreeSet<State>,
}

impl Direct<'_> {
    fn pes(&self, side: Side) -> &Pes {
        match side {
            Side::Left => self.p1,
            Side::Right => self.p2,
        }
    }

    fn pair(&self, side: Side, own: EventSet, other: EventSet) -> State {
        match side {
            Side::Left => State::Pair(own, other),
            Side::Right => State::Pair(other, own),
        }
    }

    fn moves(&self, side: Side, c: EventSet) -> Vec<EventSet> {
        let p = self.pes(side);
        match self.kind.flavor {
            Flavor::Pomset => p
                .pomset_transitions(c)
                .into_iter()
                .map(|t| t.pomset)
                .collect(),
            Flavor::Step => p
                .step_transitions(c)
                .into_iter()
                .map(|t| t.pomset)
                .collect(),
            Flavor::Hp | Flavor::Hhp => p.enabled(c).iter().map(EventSet::singleton).collect(),
        }
    }

    fn closed(&self, s: &State) -> bool {
        let transfer = [Side::Left, Side::Right].into_iter().all(|side| match s {
            State::Pair(..) => self.pair_side(s, side),
            State::Triple(t) => self.triple_side(&t.f, side),
        });
        transfer && (!self.kind.is_hereditary() || self.downward_closed(s))
    }

    fn pair_side(&self, s: &State, side: Side) -> bool {
        let other_side = side.other();
        let (p, q) = (self.pes(side), self.pes(other_side));
        let own = s.config(side);
        let other = s.config(other_side);
        let iso = |x: EventSet, y: EventSet| {
            pomset_isomorphic(&Pomset::new(p, x), &Pomset::new(q, y), self.erase)
        };
        let matched = |o0: EventSet, x: EventSet| {
            self.moves(other_side, o0).into_iter().any(|y| {
                iso(x, y)
                    && self
                        .set
                        .contains(&self.pair(side, own.union(x), o0.union(y)))
            })
        };
        let stutters = q.tau_closure(other);
        self.moves(side, own)
            .into_iter()
            .all(|x| match self.kind.mode {
                Mode::Strong => matched(other, x),
                Mode::Branching => {
                    (p.is_tau_pomset(x) && self.set.contains(&self.pair(side, own.union(x), other)))
                        || stutters.iter().any(|&o0| {
                            self.set.contains(&self.pair(side, own, o0)) && matched(o0, x)
                        })
                }
            })
            && (self.kind.mode == Mode::Strong
                || !p.terminates(own)
                || stutters
                    .iter()
                    .any(|&o0| q.terminates(o0) && self.set.contains(&self.pair(side, own, o0))))
    }

    fn triple_side(&self, f: &PosetalMap, side: Side) -> bool {
        let other_side = side.other();
        let (p, q) = (self.pes(side), self.pes(other_side));
        let own = match side {
            Side::Left => f.domain,
            Side::Right => f.codomain,
        };
        let other = match side {
            Side::Left => f.codomain,
            Side::Right => f.domain,
        };
        let has = |g: &PosetalMap| {
            self.set
                .contains(&State::Triple(PosetalTriple::new(g.clone())))
        };
        let extend = |g: &PosetalMap, e: usize, e2: usize| match side {
            Side::Left => extend_map(self.p1, self.p2, g, e, e2),
            Side::Right => extend_map(self.p1, self.p2, g, e2, e),
        };
        let matched = |g: &PosetalMap, o0: EventSet, e: usize| {
            q.enabled(o0)
                .iter()
                .any(|e2| extend(g, e, e2).is_ok_and(|h| has(&h)))
        };
        let stutters = q.tau_closure(other);
        p.enabled(own).iter().all(|e| match self.kind.mode {
            Mode::Strong => matched(f, other, e),
            Mode::Branching => {
                (p.is_tau(e) && absorb_silent(p, f, side, e).is_ok_and(|h| has(&h)))
                    || stutters.iter().any(|&o0| {
                        let g = with_config(f, other_side, o0);
                        has(&g) && matched(&g, o0, e)
                    })
            }
        }) && (self.kind.mode == Mode::Strong
            || !p.terminates(own)
            || stutters
                .iter()
                .any(|&o0| q.terminates(o0) && has(&with_config(f, other_side, o0))))
    }

    /// Every valid triple pointwise below `s` is in the set.
    fn downward_closed(&self, s: &State) -> bool {
        let State::Triple(t) = s else { return true };
        let subconfigs = |p: &Pes, c: EventSet| -> Vec<EventSet> {
            std::iter::once(EventSet::EMPTY)
                .chain(c.nonempty_subsets())
                .filter(|d| p.is_configuration(*d))
                .collect()
        };
        for d1 in subconfigs(self.p1, t.c1()) {
            for d2 in subconfigs(self.p2, t.c2()) {
                // The only map below f on (d1, d2) is f cut down to them, and
                // only if no pair of f crosses the cut.
                let inside = |&&(a, b): &&(usize, usize)| d1.contains(a) && d2.contains(b);
                let touching = |&&(a, b): &&(usize, usize)| d1.contains(a) || d2.contains(b);
                if t.f.pairs.iter().filter(touching).count()
                    != t.f.pairs.iter().filter(inside).count()
                {
                    continue;
                }
                let g = PosetalMap {
                    mode: t.f.mode,
                    domain: d1,
                    codomain: d2,
                    pairs: t.f.pairs.iter().filter(inside).copied().collect(),
                };
                if g.is_valid(self.p1, self.p2)
                    && !self.set.contains(&State::Triple(PosetalTriple::new(g)))
                {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn opts() -> CheckOptions {
        CheckOptions::default()
    }

    fn kind(flavor: Flavor, mode: Mode) -> RelationKind {
        RelationKind::new(flavor, mode)
    }

    #[test]
    fn empty_structures_relate_only_the_empty_state() {
        let p0 = fixtures::p0();
        for k in RelationKind::ALL {
            let r = greatest_relation(&p0, &p0, k, &opts()).unwrap();
            assert_eq!(r.states, vec![initial_state(k)], "{k}");
        }
    }

    #[test]
    fn par_vs_ch_pomset_strong() {
        let r = greatest_relation(
            &fixtures::par(),
            &fixtures::ch(),
            kind(Flavor::Pomset, Mode::Strong),
            &opts(),
        )
        .unwrap();
        assert!(!r.contains(&initial_state(r.kind)));
    }

    #[test]
    fn tau_vs_pa_branching_hp_relates_the_empty_triple() {
        let r = greatest_relation(
            &fixtures::tau(),
            &fixtures::pa(),
            kind(Flavor::Hp, Mode::Branching),
            &opts(),
        )
        .unwrap();
        assert!(r.contains(&initial_state(r.kind)));
    }

    #[test]
    fn verdicts() {
        let (par, ch, tau, pa) = (
            fixtures::par(),
            fixtures::ch(),
            fixtures::tau(),
            fixtures::pa(),
        );
        assert!(
            check(&par, &par, kind(Flavor::Step, Mode::Strong), &opts())
                .unwrap()
                .equivalent
        );
        assert!(
            !check(&par, &ch, kind(Flavor::Step, Mode::Strong), &opts())
                .unwrap()
                .equivalent
        );
        let v = check(&tau, &pa, kind(Flavor::Pomset, Mode::Strong), &opts()).unwrap();
        assert!(!v.equivalent && v.witness.is_none());
    }

    #[test]
    fn erasing_in_strong_mode_is_observable() {
        let (tau, pa) = (fixtures::tau(), fixtures::pa());
        let k = kind(Flavor::Pomset, Mode::Strong);
        let erased = CheckOptions {
            erase_tau_in_strong: true,
            ..opts()
        };
        assert!(!check(&tau, &pa, k, &opts()).unwrap().equivalent);
        // TAU's {t} erases to the empty pomset, which PA cannot produce as a nonempty move.
        assert!(!check(&tau, &pa, k, &erased).unwrap().equivalent);
        let tau_only = fixtures::build(crate::pes::RawPes::new("T").event("t", "tau"));
        let other = fixtures::build(crate::pes::RawPes::new("U").event("u", "tau"));
        assert!(check(&tau_only, &other, k, &erased).unwrap().equivalent);
    }

    #[test]
    fn witness_checks() {
        let par = fixtures::par();
        let k = kind(Flavor::Pomset, Mode::Strong);
        let v = check(&par, &par, k, &opts()).unwrap();
        assert!(verify_witness(&par, &par, k, &v.witness.unwrap().states, &opts()).unwrap());

        let seq = fixtures::seq();
        let lone = [initial_state(k)];
        assert!(!verify_witness(&seq, &seq, k, &lone, &opts()).unwrap());
        assert!(verify_witness(&seq, &seq, k, &[], &opts()).unwrap());

        let bogus = [State::Pair(EventSet::singleton(1), EventSet::EMPTY)];
        assert!(matches!(
            verify_witness(&seq, &seq, k, &bogus, &opts()),
            Err(Error::MalformedElement(_))
        ));
    }

    #[test]
    fn hereditary_witness_is_downward_closed() {
        let ch = fixtures::ch();
        for mode in [Mode::Strong, Mode::Branching] {
            let k = kind(Flavor::Hhp, mode);
            let v = check(&ch, &ch, k, &opts()).unwrap();
            let w = v.witness.unwrap();
            assert!(verify_witness(&ch, &ch, k, &w.states, &opts()).unwrap());
            // Dropping the empty triple breaks downward closure for every other member.
            let without_root: Vec<State> = w
                .states
                .iter()
                .filter(|s| **s != initial_state(k))
                .cloned()
                .collect();
            assert!(!verify_witness(&ch, &ch, k, &without_root, &opts()).unwrap());
        }
    }
}
