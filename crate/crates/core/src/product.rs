//! The candidate state space shared by the fixpoint checker and the games:
//! configuration pairs for pomset/step, posetal triples for hp/hhp.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::iso::{enumerate_isomorphisms, IsoCache, PosetalMap, PosetalTriple, Side};
use crate::kind::{Flavor, Mode, RelationKind};
use crate::pes::{Caps, ConfigSpace, EventSet, Pes};

/// Knobs shared by both engines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub caps: Caps,
    /// Compare strong pomset/step challenges up to τ-erasure instead of on
    /// full labels.
    pub erase_tau_in_strong: bool,
}

/// A related pair `(C1, C2)` or triple `(C1, f, C2)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum State {
    Pair(EventSet, EventSet),
    Triple(PosetalTriple),
}

impl State {
    pub fn c1(&self) -> EventSet {
        match self {
            State::Pair(c1, _) => *c1,
            State::Triple(t) => t.c1(),
        }
    }

    pub fn c2(&self) -> EventSet {
        match self {
            State::Pair(_, c2) => *c2,
            State::Triple(t) => t.c2(),
        }
    }

    pub fn config(&self, side: Side) -> EventSet {
        match side {
            Side::Left => self.c1(),
            Side::Right => self.c2(),
        }
    }

    pub fn map(&self) -> Option<&PosetalMap> {
        match self {
            State::Pair(..) => None,
            State::Triple(t) => Some(&t.f),
        }
    }

    /// The same state seen from the other event structure.
    pub fn swapped(&self) -> State {
        match self {
            State::Pair(a, b) => State::Pair(*b, *a),
            State::Triple(t) => State::Triple(PosetalTriple::new(t.f.inverse())),
        }
    }

    /// Human-readable rendering with event identifiers.
    pub fn show(&self, p1: &Pes, p2: &Pes) -> String {
        match self {
            State::Pair(c1, c2) => format!("({}, {})", p1.show(*c1), p2.show(*c2)),
            State::Triple(t) => {
                let pairs: Vec<String> =
                    t.f.pairs
                        .iter()
                        .map(|&(a, b)| format!("{}->{}", p1.id(a), p2.id(b)))
                        .collect();
                format!(
                    "({}, [{}], {})",
                    p1.show(t.c1()),
                    pairs.join(","),
                    p2.show(t.c2())
                )
            }
        }
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Pair(a, b) => write!(f, "({a:?}, {b:?})"),
            State::Triple(t) => write!(f, "({:?}, {:?}, {:?})", t.c1(), t.f.pairs, t.c2()),
        }
    }
}

/// `f` with the configuration on `side` replaced.
pub(crate) fn with_config(f: &PosetalMap, side: Side, cfg: EventSet) -> PosetalMap {
    let mut g = f.clone();
    match side {
        Side::Left => g.domain = cfg,
        Side::Right => g.codomain = cfg,
    }
    g
}

pub(crate) struct Product<'a> {
    pub p1: &'a Pes,
    pub p2: &'a Pes,
    pub s1: ConfigSpace,
    pub s2: ConfigSpace,
    pub kind: RelationKind,
    pub iso: IsoCache<'a>,
    pub states: Vec<State>,
    /// Configuration indices `(i1, i2)` of every state.
    pub cfg: Vec<(usize, usize)>,
    triple_index: HashMap<PosetalMap, usize>,
}

impl<'a> Product<'a> {
    pub fn new(p1: &'a Pes, p2: &'a Pes, kind: RelationKind, opts: &CheckOptions) -> Result<Self> {
        let caps = &opts.caps;
        let s1 = ConfigSpace::new(p1, caps)?;
        let s2 = ConfigSpace::new(p2, caps)?;
        let erase = match kind.mode {
            Mode::Branching => true,
            Mode::Strong => opts.erase_tau_in_strong && !kind.is_posetal(),
        };
        let mut states = Vec::new();
        let mut cfg = Vec::new();
        let mut triple_index = HashMap::new();
        if kind.is_posetal() {
            for (i1, &c1) in s1.configs.iter().enumerate() {
                for (i2, &c2) in s2.configs.iter().enumerate() {
                    for f in enumerate_isomorphisms(p1, c1, p2, c2, kind.map_mode()) {
                        triple_index.insert(f.clone(), states.len());
                        states.push(State::Triple(PosetalTriple::new(f)));
                        cfg.push((i1, i2));
                        caps.check("candidate states", states.len(), caps.max_positions)?;
                    }
                }
            }
        } else {
            caps.check("candidate states", s1.len() * s2.len(), caps.max_positions)?;
            for (i1, &c1) in s1.configs.iter().enumerate() {
                for (i2, &c2) in s2.configs.iter().enumerate() {
                    states.push(State::Pair(c1, c2));
                    cfg.push((i1, i2));
                }
            }
        }
        Ok(Product {
            p1,
            p2,
            s1,
            s2,
            kind,
            iso: IsoCache::new(p1, p2, erase),
            states,
            cfg,
            triple_index,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn pes(&self, side: Side) -> &'a Pes {
        match side {
            Side::Left => self.p1,
            Side::Right => self.p2,
        }
    }

    pub fn space(&self, side: Side) -> &ConfigSpace {
        match side {
            Side::Left => &self.s1,
            Side::Right => &self.s2,
        }
    }

    /// Configuration index of state `x` on `side`.
    pub fn cfg_of(&self, x: usize, side: Side) -> usize {
        match side {
            Side::Left => self.cfg[x].0,
            Side::Right => self.cfg[x].1,
        }
    }

    /// Index of the pair whose `side` configuration is `own` and whose other
    /// configuration is `other`.
    pub fn pair_index(&self, side: Side, own: usize, other: usize) -> usize {
        let n2 = self.s2.len();
        match side {
            Side::Left => own * n2 + other,
            Side::Right => other * n2 + own,
        }
    }

    pub fn triple_index(&self, f: &PosetalMap) -> Option<usize> {
        self.triple_index.get(f).copied()
    }

    pub fn state_index(&self, s: &State) -> Option<usize> {
        match s {
            State::Pair(c1, c2) => {
                let i1 = self.s1.index_of(*c1)?;
                let i2 = self.s2.index_of(*c2)?;
                (!self.kind.is_posetal()).then(|| self.pair_index(Side::Left, i1, i2))
            }
            State::Triple(t) => {
                if self.kind.is_posetal() {
                    self.triple_index(&t.f)
                } else {
                    None
                }
            }
        }
    }

    pub fn map_of(&self, x: usize) -> &PosetalMap {
        self.states[x].map().expect("posetal state")
    }

    /// Moves of the kind's flavor from configuration `i` on `side`:
    /// `(X, target index)`. hp flavors move one event at a time.
    pub fn moves(&self, side: Side, i: usize) -> impl Iterator<Item = (EventSet, usize)> + '_ {
        let flavor = self.kind.flavor;
        self.space(side).transitions[i]
            .iter()
            .filter(move |(x, _, step)| match flavor {
                Flavor::Pomset => true,
                Flavor::Step => *step,
                Flavor::Hp | Flavor::Hhp => x.len() == 1,
            })
            .map(|&(x, t, _)| (x, t))
    }

    /// `X ∼ Y` where `x` was played on `side` and `y` on the other side.
    pub fn pomsets_match(&self, side: Side, x: EventSet, y: EventSet) -> bool {
        match side {
            Side::Left => self.iso.isomorphic(x, y),
            Side::Right => self.iso.isomorphic(y, x),
        }
    }

    pub fn is_silent(&self, side: Side, x: EventSet) -> bool {
        self.pes(side).is_tau_pomset(x)
    }

    pub fn terminating(&self, side: Side, i: usize) -> bool {
        self.space(side).terminating[i]
    }

    pub fn tau_closure(&self, side: Side, i: usize) -> &[usize] {
        &self.space(side).tau_closure[i]
    }

    /// For hhp: every strictly smaller triple of each state.
    pub fn sub_triples(&self) -> Vec<Vec<usize>> {
        let mut subs = vec![Vec::new(); self.len()];
        for (x, sx) in self.states.iter().enumerate() {
            let State::Triple(tx) = sx else { continue };
            for (y, sy) in self.states.iter().enumerate() {
                let State::Triple(ty) = sy else { continue };
                if x != y && crate::iso::triple_leq(ty, tx) {
                    subs[x].push(y);
                }
            }
        }
        subs
    }

    pub fn initial(&self) -> usize {
        // ∅ has mask 0 and sorts first on both sides; the unique empty map comes first.
        0
    }
}

/// All candidate states of a kind, in canonical order.
pub fn candidate_states(
    p1: &Pes,
    p2: &Pes,
    kind: RelationKind,
    opts: &CheckOptions,
) -> Result<Vec<State>> {
    Ok(Product::new(p1, p2, kind, opts)?.states)
}
