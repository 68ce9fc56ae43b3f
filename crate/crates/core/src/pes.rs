//! Finite labelled prime event structures with silent events.
//!
//! Events are identified by their declaration index. Sets of events, and in
//! particular configurations, are bitmasks over those indices, which gives
//! the canonical ordering for free: configurations sort by their mask.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard upper bound imposed by the bitmask representation.
pub const MAX_REPRESENTABLE_EVENTS: usize = 64;

/// A set of events of one PES, as a bitmask over declaration indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventSet(u64);

impl EventSet {
    pub const EMPTY: EventSet = EventSet(0);

    pub fn from_bits(bits: u64) -> Self {
        EventSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(e: usize) -> Self {
        EventSet(1 << e)
    }

    pub fn from_events<I: IntoIterator<Item = usize>>(events: I) -> Self {
        events.into_iter().fold(EventSet::EMPTY, |s, e| s.with(e))
    }

    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    #[must_use]
    pub fn with(self, e: usize) -> Self {
        EventSet(self.0 | 1 << e)
    }

    #[must_use]
    pub fn union(self, other: EventSet) -> Self {
        EventSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: EventSet) -> Self {
        EventSet(self.0 & other.0)
    }

    #[must_use]
    pub fn minus(self, other: EventSet) -> Self {
        EventSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: EventSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: EventSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(e)
            }
        })
    }

    /// All nonempty subsets, in increasing mask order.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = EventSet> {
        let full = self.0;
        // Walk submasks upwards: next = ((sub | !full) + 1) & full.
        let mut sub: u64 = 0;
        let mut done = full == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            sub = (sub | !full).wrapping_add(1) & full;
            if sub == full {
                done = true;
            }
            Some(EventSet(sub))
        })
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// An action label. The silent label is written `tau`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    name: String,
    is_tau: bool,
}

impl Label {
    pub const TAU_NAME: &'static str = "tau";

    /// Builds a label; the reserved name `tau` yields the silent label.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        let is_tau = name == Self::TAU_NAME;
        Label { name, is_tau }
    }

    pub fn tau() -> Self {
        Label::new(Self::TAU_NAME)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_tau(&self) -> bool {
        self.is_tau
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Size limits that turn state-space blow-ups into clean errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    pub max_events: usize,
    pub max_configurations: usize,
    pub max_positions: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_events: 12,
            max_configurations: 4096,
            max_positions: 200_000,
        }
    }
}

impl Caps {
    pub(crate) fn check(&self, what: &'static str, count: usize, limit: usize) -> Result<()> {
        if count > limit {
            Err(Error::CapExceeded { what, count, limit })
        } else {
            Ok(())
        }
    }
}

/// Termination policy as written by the user, with event names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum RawTermination {
    #[default]
    Maximal,
    None,
    Explicit(Vec<Vec<String>>),
}

/// The termination predicate of a validated PES.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    /// A configuration terminates iff it has no outgoing transition.
    Maximal,
    None,
    Explicit(BTreeSet<EventSet>),
}

/// Unvalidated declarations: immediate causes and generating conflicts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawPes {
    pub name: String,
    /// `(event id, label name)` in declaration order.
    pub events: Vec<(String, String)>,
    /// `(cause, effect)` pairs.
    pub causes: Vec<(String, String)>,
    pub conflicts: Vec<(String, String)>,
    pub termination: RawTermination,
}

impl RawPes {
    pub fn new(name: impl Into<String>) -> Self {
        RawPes {
            name: name.into(),
            ..RawPes::default()
        }
    }

    pub fn event(mut self, id: &str, label: &str) -> Self {
        self.events.push((id.to_string(), label.to_string()));
        self
    }

    pub fn cause(mut self, before: &str, after: &str) -> Self {
        self.causes.push((before.to_string(), after.to_string()));
        self
    }

    pub fn conflict(mut self, a: &str, b: &str) -> Self {
        self.conflicts.push((a.to_string(), b.to_string()));
        self
    }

    pub fn termination(mut self, termination: RawTermination) -> Self {
        self.termination = termination;
        self
    }
}

/// A validated prime event structure. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pes {
    name: String,
    ids: Vec<String>,
    labels: Vec<Label>,
    declared_causes: Vec<(usize, usize)>,
    declared_conflicts: Vec<(usize, usize)>,
    /// `below[e]` = ⌈e⌉, including `e`.
    below: Vec<EventSet>,
    above: Vec<EventSet>,
    conflict: Vec<EventSet>,
    termination: Termination,
}

/// Derived relation tables, one row per event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relations {
    /// `leq[e]` is the set of `e'` with `e' ≤ e`.
    pub leq: Vec<EventSet>,
    pub conflict: Vec<EventSet>,
    pub consistent: Vec<EventSet>,
    pub concurrent: Vec<EventSet>,
}

/// Builds a PES from declarations, closing causality transitively and
/// conflict symmetrically and hereditarily.
pub fn validate_pes(raw: &RawPes, caps: &Caps) -> Result<Pes> {
    let n = raw.events.len();
    caps.check(
        "event count",
        n,
        caps.max_events.min(MAX_REPRESENTABLE_EVENTS),
    )?;

    let mut index = HashMap::new();
    for (i, (id, _)) in raw.events.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::DuplicateEvent(id.clone()));
        }
    }
    let lookup = |id: &str| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEvent(id.to_string()))
    };
    let ids: Vec<String> = raw.events.iter().map(|(id, _)| id.clone()).collect();
    let labels = raw
        .events
        .iter()
        .map(|(_, l)| Label::new(l.as_str()))
        .collect();

    let mut declared_causes = Vec::new();
    for (a, b) in &raw.causes {
        let (a, b) = (lookup(a)?, lookup(b)?);
        if a == b {
            return Err(Error::CausalityCycle(ids[a].clone()));
        }
        declared_causes.push((a, b));
    }
    let mut declared_conflicts = Vec::new();
    for (a, b) in &raw.conflicts {
        declared_conflicts.push((lookup(a)?, lookup(b)?));
    }

    // Reflexive-transitive closure (Warshall over the "below" rows).
    let mut below: Vec<EventSet> = (0..n).map(EventSet::singleton).collect();
    for &(a, b) in &declared_causes {
        below[b] = below[b].with(a);
    }
    for k in 0..n {
        for e in 0..n {
            if below[e].contains(k) {
                below[e] = below[e].union(below[k]);
            }
        }
    }
    for (e, down) in below.iter().enumerate() {
        for d in down.iter() {
            if d != e && below[d].contains(e) {
                return Err(Error::CausalityCycle(ids[e].clone()));
            }
        }
    }
    let mut above = vec![EventSet::EMPTY; n];
    for (e, down) in below.iter().enumerate() {
        for d in down.iter() {
            above[d] = above[d].with(e);
        }
    }

    for &(a, b) in &declared_conflicts {
        if a == b {
            return Err(Error::SelfConflict(ids[a].clone()));
        }
        if below[b].contains(a) || below[a].contains(b) {
            return Err(Error::ConflictWithCause(ids[a].clone(), ids[b].clone()));
        }
    }
    // Hereditary closure: a ♯ b, a ≤ a', b ≤ b' gives a' ♯ b'.
    let mut conflict = vec![EventSet::EMPTY; n];
    for &(a, b) in &declared_conflicts {
        for x in above[a].iter() {
            conflict[x] = conflict[x].union(above[b]);
        }
        for y in above[b].iter() {
            conflict[y] = conflict[y].union(above[a]);
        }
    }
    if let Some(e) = (0..n).find(|&e| conflict[e].contains(e)) {
        return Err(Error::SelfConflict(ids[e].clone()));
    }
    for e in 0..n {
        if let Some(d) = conflict[e]
            .intersection(below[e].union(above[e]))
            .iter()
            .next()
        {
            return Err(Error::ConflictWithCause(ids[e].clone(), ids[d].clone()));
        }
    }

    let termination = match &raw.termination {
        RawTermination::Maximal => Termination::Maximal,
        RawTermination::None => Termination::None,
        RawTermination::Explicit(sets) => {
            let mut out = BTreeSet::new();
            for set in sets {
                let mut s = EventSet::EMPTY;
                for id in set {
                    s = s.with(lookup(id)?);
                }
                out.insert(s);
            }
            Termination::Explicit(out)
        }
    };

    let pes = Pes {
        name: raw.name.clone(),
        ids,
        labels,
        declared_causes,
        declared_conflicts,
        below,
        above,
        conflict,
        termination,
    };
    if let Termination::Explicit(sets) = &pes.termination {
        if let Some(bad) = sets.iter().find(|s| !pes.is_configuration(**s)) {
            return Err(Error::NotAConfiguration(pes.names(*bad).join(",")));
        }
    }
    Ok(pes)
}

impl Pes {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn all_events(&self) -> EventSet {
        EventSet::from_events(0..self.len())
    }

    pub fn id(&self, e: usize) -> &str {
        &self.ids[e]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn event_by_id(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn label(&self, e: usize) -> &Label {
        &self.labels[e]
    }

    pub fn is_tau(&self, e: usize) -> bool {
        self.labels[e].is_tau()
    }

    pub fn declared_causes(&self) -> &[(usize, usize)] {
        &self.declared_causes
    }

    pub fn declared_conflicts(&self) -> &[(usize, usize)] {
        &self.declared_conflicts
    }

    pub fn termination(&self) -> &Termination {
        &self.termination
    }

    /// ⌈e⌉: all causes of `e`, including `e`.
    pub fn below(&self, e: usize) -> EventSet {
        self.below[e]
    }

    pub fn above(&self, e: usize) -> EventSet {
        self.above[e]
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    pub fn in_conflict(&self, a: usize, b: usize) -> bool {
        self.conflict[a].contains(b)
    }

    pub fn conflicts_of(&self, e: usize) -> EventSet {
        self.conflict[e]
    }

    pub fn concurrent(&self, a: usize, b: usize) -> bool {
        !self.leq(a, b) && !self.leq(b, a) && !self.in_conflict(a, b)
    }

    pub fn relations(&self) -> Relations {
        let all = self.all_events();
        let n = self.len();
        let consistent: Vec<EventSet> = (0..n).map(|e| all.minus(self.conflict[e])).collect();
        let concurrent = (0..n)
            .map(|e| consistent[e].minus(self.below[e]).minus(self.above[e]))
            .collect();
        Relations {
            leq: self.below.clone(),
            conflict: self.conflict.clone(),
            consistent,
            concurrent,
        }
    }

    /// The visible part Ĉ of a set of events.
    pub fn hat(&self, set: EventSet) -> EventSet {
        EventSet::from_events(set.iter().filter(|&e| !self.is_tau(e)))
    }

    pub fn tau_events(&self) -> EventSet {
        EventSet::from_events((0..self.len()).filter(|&e| self.is_tau(e)))
    }

    pub fn is_conflict_free(&self, set: EventSet) -> bool {
        set.iter().all(|e| self.conflict[e].is_disjoint(set))
    }

    pub fn is_downward_closed(&self, set: EventSet) -> bool {
        set.iter().all(|e| self.below[e].is_subset(set))
    }

    pub fn is_configuration(&self, set: EventSet) -> bool {
        set.is_subset(self.all_events())
            && self.is_conflict_free(set)
            && self.is_downward_closed(set)
    }

    /// Events that can extend configuration `c` one at a time.
    pub fn enabled(&self, c: EventSet) -> EventSet {
        EventSet::from_events((0..self.len()).filter(|&e| {
            !c.contains(e)
                && self.below[e].minus(EventSet::singleton(e)).is_subset(c)
                && self.conflict[e].is_disjoint(c)
        }))
    }

    /// Events pairwise concurrent, i.e. an antichain without conflicts.
    pub fn is_pairwise_concurrent(&self, set: EventSet) -> bool {
        set.iter()
            .all(|e| set.iter().all(|d| d == e || self.concurrent(e, d)))
    }

    pub fn is_tau_pomset(&self, set: EventSet) -> bool {
        set.iter().all(|e| self.is_tau(e))
    }

    pub fn names(&self, set: EventSet) -> Vec<&str> {
        set.iter().map(|e| self.ids[e].as_str()).collect()
    }

    /// `{a,b}` rendering with event identifiers.
    pub fn show(&self, set: EventSet) -> String {
        format!("{{{}}}", self.names(set).join(","))
    }

    /// Declarations equivalent to this PES, for re-validation and printing.
    pub fn to_raw(&self) -> RawPes {
        RawPes {
            name: self.name.clone(),
            events: (0..self.len())
                .map(|e| (self.ids[e].clone(), self.labels[e].name().to_string()))
                .collect(),
            causes: self
                .declared_causes
                .iter()
                .map(|&(a, b)| (self.ids[a].clone(), self.ids[b].clone()))
                .collect(),
            conflicts: self
                .declared_conflicts
                .iter()
                .map(|&(a, b)| (self.ids[a].clone(), self.ids[b].clone()))
                .collect(),
            termination: match &self.termination {
                Termination::Maximal => RawTermination::Maximal,
                Termination::None => RawTermination::None,
                Termination::Explicit(sets) => RawTermination::Explicit(
                    sets.iter()
                        .map(|s| self.names(*s).into_iter().map(String::from).collect())
                        .collect(),
                ),
            },
        }
    }

    /// All configurations, sorted by mask. Includes the empty configuration.
    pub fn enumerate_configurations(&self, caps: &Caps) -> Result<Vec<EventSet>> {
        let mut seen = HashSet::new();
        seen.insert(EventSet::EMPTY);
        let mut stack = vec![EventSet::EMPTY];
        while let Some(c) = stack.pop() {
            for e in self.enabled(c).iter() {
                let next = c.with(e);
                if seen.insert(next) {
                    caps.check("configuration count", seen.len(), caps.max_configurations)?;
                    stack.push(next);
                }
            }
        }
        let mut configs: Vec<EventSet> = seen.into_iter().collect();
        configs.sort();
        Ok(configs)
    }

    /// Nonempty `X` disjoint from `c` with `c ∪ X` a configuration, by mask order.
    pub fn pomset_transitions(&self, c: EventSet) -> Vec<Transition> {
        let conflicting = c
            .iter()
            .fold(EventSet::EMPTY, |s, e| s.union(self.conflict[e]));
        let candidates = self.all_events().minus(c).minus(conflicting);
        candidates
            .nonempty_subsets()
            .filter(|x| self.is_configuration(c.union(*x)))
            .map(|x| Transition {
                source: c,
                pomset: x,
                target: c.union(x),
                kind: TransitionKind::Pomset,
            })
            .collect()
    }

    /// Pomset transitions whose events are pairwise concurrent.
    pub fn step_transitions(&self, c: EventSet) -> Vec<Transition> {
        self.pomset_transitions(c)
            .into_iter()
            .filter(|t| self.is_pairwise_concurrent(t.pomset))
            .map(|t| Transition {
                kind: TransitionKind::Step,
                ..t
            })
            .collect()
    }

    /// Transitions carrying only silent events.
    pub fn tau_transitions(&self, c: EventSet) -> Vec<Transition> {
        self.pomset_transitions(c)
            .into_iter()
            .filter(|t| self.is_tau_pomset(t.pomset))
            .map(|t| Transition {
                kind: TransitionKind::TauStar,
                ..t
            })
            .collect()
    }

    /// Configurations reachable from `c` by zero or more silent transitions.
    pub fn tau_closure(&self, c: EventSet) -> BTreeSet<EventSet> {
        let mut out = BTreeSet::new();
        out.insert(c);
        let mut stack = vec![c];
        let taus = self.tau_events();
        while let Some(d) = stack.pop() {
            for e in self.enabled(d).intersection(taus).iter() {
                if out.insert(d.with(e)) {
                    stack.push(d.with(e));
                }
            }
        }
        out
    }

    pub fn terminates(&self, c: EventSet) -> bool {
        match &self.termination {
            Termination::Maximal => self.enabled(c).is_empty(),
            Termination::None => false,
            Termination::Explicit(sets) => sets.contains(&c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransitionKind {
    Pomset,
    Step,
    TauStar,
}

/// `source --pomset--> target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: EventSet,
    pub pomset: EventSet,
    pub target: EventSet,
    pub kind: TransitionKind,
}

/// Configurations of one PES with their outgoing pomset transitions, indexed.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    pub configs: Vec<EventSet>,
    index: HashMap<EventSet, usize>,
    /// Per configuration: `(X, target index, is_step)`.
    pub transitions: Vec<Vec<(EventSet, usize, bool)>>,
    /// Per configuration: indices of its τ-closure, itself included.
    pub tau_closure: Vec<Vec<usize>>,
    pub terminating: Vec<bool>,
}

impl ConfigSpace {
    pub fn new(pes: &Pes, caps: &Caps) -> Result<Self> {
        let configs = pes.enumerate_configurations(caps)?;
        let index: HashMap<EventSet, usize> =
            configs.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let transitions = configs
            .iter()
            .map(|&c| {
                pes.pomset_transitions(c)
                    .into_iter()
                    .map(|t| {
                        (
                            t.pomset,
                            index[&t.target],
                            pes.is_pairwise_concurrent(t.pomset),
                        )
                    })
                    .collect()
            })
            .collect();
        let tau_closure = configs
            .iter()
            .map(|&c| pes.tau_closure(c).into_iter().map(|d| index[&d]).collect())
            .collect();
        let terminating = configs.iter().map(|&c| pes.terminates(c)).collect();
        Ok(ConfigSpace {
            configs,
            index,
            transitions,
            tau_closure,
            terminating,
        })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn index_of(&self, c: EventSet) -> Option<usize> {
        self.index.get(&c).copied()
    }
}
