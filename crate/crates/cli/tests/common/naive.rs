//! A deliberately naive checker written straight from the definitions. It
//! uses only the basic accessors of `Pes` and recomputes configurations,
//! transitions, isomorphisms and maps by brute force over bitmasks.

use std::collections::BTreeSet;

use pesbisim::{EventSet, Flavor, Mode, Pes, RelationKind};

type Map = Vec<(usize, usize)>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct St {
    pub c1: u64,
    pub c2: u64,
    /// `None` for configuration pairs.
    pub f: Option<Map>,
}

fn bits(s: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| s >> i & 1 == 1)
}

fn is_config(p: &Pes, s: u64) -> bool {
    bits(s).all(|e| p.below(e).bits() & !s == 0)
        && bits(s).all(|a| bits(s).all(|b| !p.in_conflict(a, b)))
}

fn tau_mask(p: &Pes) -> u64 {
    bits((1u64 << p.len()) - 1)
        .filter(|&e| p.label(e).is_tau())
        .fold(0, |m, e| m | 1 << e)
}

/// Label- and order-preserving bijection between `xs` and `ys`?
fn iso(p: &Pes, x: u64, q: &Pes, y: u64) -> bool {
    fn go(p: &Pes, xs: &[usize], q: &Pes, ys: &mut Vec<usize>, k: usize) -> bool {
        if k == xs.len() {
            return (0..xs.len()).all(|i| {
                p.label(xs[i]).name() == q.label(ys[i]).name()
                    && (0..xs.len()).all(|j| p.leq(xs[i], xs[j]) == q.leq(ys[i], ys[j]))
            });
        }
        for i in k..ys.len() {
            ys.swap(k, i);
            if go(p, xs, q, ys, k + 1) {
                return true;
            }
            ys.swap(k, i);
        }
        false
    }
    let xs: Vec<usize> = bits(x).collect();
    let mut ys: Vec<usize> = bits(y).collect();
    xs.len() == ys.len() && go(p, &xs, q, &mut ys, 0)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Maps {
    Strong,
    Weak,
    Paired,
}

pub struct Naive<'a> {
    p: [&'a Pes; 2],
    kind: RelationKind,
    maps: Maps,
    taus: [u64; 2],
    pub candidates: Vec<St>,
}

impl<'a> Naive<'a> {
    pub fn new(p1: &'a Pes, p2: &'a Pes, kind: RelationKind) -> Self {
        let maps = match (kind.mode, kind.flavor) {
            (Mode::Strong, _) => Maps::Strong,
            (Mode::Branching, Flavor::Hhp) => Maps::Paired,
            (Mode::Branching, _) => Maps::Weak,
        };
        let mut n = Naive {
            p: [p1, p2],
            kind,
            maps,
            taus: [tau_mask(p1), tau_mask(p2)],
            candidates: Vec::new(),
        };
        let configs =
            |p: &Pes| -> Vec<u64> { (0..1u64 << p.len()).filter(|&s| is_config(p, s)).collect() };
        for c1 in configs(p1) {
            for c2 in configs(p2) {
                if matches!(kind.flavor, Flavor::Hp | Flavor::Hhp) {
                    for f in n.maps_between(c1, c2) {
                        n.candidates.push(St { c1, c2, f: Some(f) });
                    }
                } else {
                    n.candidates.push(St { c1, c2, f: None });
                }
            }
        }
        n
    }

    fn posetal(&self) -> bool {
        matches!(self.kind.flavor, Flavor::Hp | Flavor::Hhp)
    }

    fn erase(&self) -> bool {
        self.kind.mode == Mode::Branching
    }

    fn valid_map(&self, c1: u64, c2: u64, f: &Map) -> bool {
        let (p, q) = (self.p[0], self.p[1]);
        let dom = f.iter().fold(0u64, |m, &(a, _)| m | 1 << a);
        let cod = f.iter().fold(0u64, |m, &(_, b)| m | 1 << b);
        let (v1, v2) = (c1 & !self.taus[0], c2 & !self.taus[1]);
        let covered = match self.maps {
            Maps::Strong => dom == c1 && cod == c2,
            Maps::Weak => dom == v1 && cod == v2,
            Maps::Paired => dom & !c1 == 0 && cod & !c2 == 0 && v1 & !dom == 0 && v2 & !cod == 0,
        };
        covered
            && dom.count_ones() as usize == f.len()
            && cod.count_ones() as usize == f.len()
            && f.iter().all(|&(a, b)| {
                p.label(a).name() == q.label(b).name()
                    && f.iter().all(|&(x, y)| p.leq(a, x) == q.leq(b, y))
            })
    }

    /// Every partial injection from `c1` into `c2`, filtered by validity.
    fn maps_between(&self, c1: u64, c2: u64) -> Vec<Map> {
        fn go(xs: &[usize], ys: &[usize], used: u64, cur: &mut Map, out: &mut Vec<Map>) {
            let Some((&x, rest)) = xs.split_first() else {
                out.push(cur.clone());
                return;
            };
            go(rest, ys, used, cur, out);
            for &y in ys {
                if used >> y & 1 == 0 {
                    cur.push((x, y));
                    go(rest, ys, used | 1 << y, cur, out);
                    cur.pop();
                }
            }
        }
        let xs: Vec<usize> = bits(c1).collect();
        let ys: Vec<usize> = bits(c2).collect();
        let mut all = Vec::new();
        go(&xs, &ys, 0, &mut Vec::new(), &mut all);
        all.into_iter()
            .filter(|f| self.valid_map(c1, c2, f))
            .collect()
    }

    fn moves(&self, side: usize, c: u64) -> Vec<u64> {
        let p = self.p[side];
        let free = ((1u64 << p.len()) - 1) & !c;
        (1..=free)
            .filter(|x| x & !free == 0 && is_config(p, c | x))
            .filter(|&x| match self.kind.flavor {
                Flavor::Pomset => true,
                Flavor::Step => bits(x).all(|a| bits(x).all(|b| a == b || p.concurrent(a, b))),
                Flavor::Hp | Flavor::Hhp => x.count_ones() == 1,
            })
            .collect()
    }

    fn tau_reach(&self, side: usize, c: u64) -> Vec<u64> {
        let mut seen = vec![c];
        let mut i = 0;
        while i < seen.len() {
            let d = seen[i];
            for e in bits(self.taus[side]) {
                let next = d | 1 << e;
                if next != d && is_config(self.p[side], next) && !seen.contains(&next) {
                    seen.push(next);
                }
            }
            i += 1;
        }
        seen
    }

    fn terminates(&self, side: usize, c: u64) -> bool {
        self.p[side].terminates(EventSet::from_bits(c))
    }

    fn same_pomset(&self, side: usize, x: u64, y: u64) -> bool {
        let (own, other) = (self.p[side], self.p[1 - side]);
        let (mx, my) = if self.erase() {
            (x & !self.taus[side], y & !self.taus[1 - side])
        } else {
            (x, y)
        };
        iso(own, mx, other, my)
    }

    /// Builds a state from the configurations seen from `side`.
    fn st(&self, side: usize, own: u64, other: u64, f: Option<Map>) -> St {
        let f = f.map(|mut f| {
            f.sort_unstable();
            f
        });
        if side == 0 {
            St {
                c1: own,
                c2: other,
                f,
            }
        } else {
            St {
                c1: other,
                c2: own,
                f,
            }
        }
    }

    fn extend(&self, side: usize, f: &Map, e: usize, e2: usize) -> Map {
        let mut g = f.clone();
        if !(self.maps == Maps::Weak && self.taus[side] >> e & 1 == 1) {
            g.push(if side == 0 { (e, e2) } else { (e2, e) });
        }
        g
    }

    fn transfer(&self, s: &St, side: usize, r: &BTreeSet<St>) -> bool {
        let (own, other) = if side == 0 {
            (s.c1, s.c2)
        } else {
            (s.c2, s.c1)
        };
        let f = s.f.clone();
        let has = |st: St| r.contains(&st);
        let matched_from = |o0: u64, x: u64| {
            self.moves(1 - side, o0).into_iter().any(|y| {
                if let Some(f) = &f {
                    let (e, e2) = (x.trailing_zeros() as usize, y.trailing_zeros() as usize);
                    has(self.st(side, own | x, o0 | y, Some(self.extend(side, f, e, e2))))
                } else {
                    self.same_pomset(side, x, y) && has(self.st(side, own | x, o0 | y, None))
                }
            })
        };
        let moves_ok =
            self.moves(side, own)
                .into_iter()
                .all(|x| match self.kind.mode {
                    Mode::Strong => matched_from(other, x),
                    Mode::Branching => {
                        (x & !self.taus[side] == 0 && has(self.st(side, own | x, other, f.clone())))
                            || self.tau_reach(1 - side, other).into_iter().any(|o0| {
                                has(self.st(side, own, o0, f.clone())) && matched_from(o0, x)
                            })
                    }
                });
        let term_ok = self.kind.mode == Mode::Strong
            || !self.terminates(side, own)
            || self
                .tau_reach(1 - side, other)
                .into_iter()
                .any(|o0| self.terminates(1 - side, o0) && has(self.st(side, own, o0, f.clone())));
        moves_ok && term_ok
    }

    fn below(&self, t: &St, s: &St) -> bool {
        let (Some(g), Some(f)) = (&t.f, &s.f) else {
            return false;
        };
        t.c1 & !s.c1 == 0
            && t.c2 & !s.c2 == 0
            && f.iter()
                .filter(|&&(a, b)| t.c1 >> a & 1 == 1 || t.c2 >> b & 1 == 1)
                .all(|p| t.c1 >> p.0 & 1 == 1 && t.c2 >> p.1 & 1 == 1 && g.contains(p))
            && g.iter().all(|p| f.contains(p))
    }

    fn holds(&self, s: &St, r: &BTreeSet<St>) -> bool {
        self.transfer(s, 0, r)
            && self.transfer(s, 1, r)
            && (self.kind.flavor != Flavor::Hhp
                || self
                    .candidates
                    .iter()
                    .all(|t| !self.below(t, s) || r.contains(t)))
    }

    /// Whether `set` satisfies every closure condition with respect to itself.
    pub fn closed(&self, set: &BTreeSet<St>) -> bool {
        set.iter().all(|s| self.holds(s, set))
    }

    pub fn greatest(&self) -> BTreeSet<St> {
        let mut r: BTreeSet<St> = self.candidates.iter().cloned().collect();
        loop {
            let failing: Vec<St> = r.iter().filter(|s| !self.holds(s, &r)).cloned().collect();
            if failing.is_empty() {
                return r;
            }
            for s in failing {
                r.remove(&s);
            }
        }
    }

    pub fn equivalent(&self) -> bool {
        let init = St {
            c1: 0,
            c2: 0,
            f: self.posetal().then(Vec::new),
        };
        self.greatest().contains(&init)
    }
}

/// Converts a library state into the naive representation.
pub fn from_state(s: &pesbisim::State) -> St {
    St {
        c1: s.c1().bits(),
        c2: s.c2().bits(),
        f: s.map().map(|f| f.pairs.clone()),
    }
}
