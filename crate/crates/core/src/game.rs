//! Spoiler/Duplicator games for the eight equivalences.
//!
//! The arena has one Spoiler position per candidate state, so every state of
//! the relational checker has a game counterpart. Every Spoiler move followed
//! by a Duplicator answer strictly grows a configuration, so the arena is
//! acyclic and is solved by backward induction.
//!
//! Spoiler positions are stored in the (first PES, second PES) orientation;
//! the side a challenge was played on is kept in the challenge itself.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::iso::{absorb_silent, extend_map, Side};
use crate::kind::RelationKind;
use crate::oracle::Verdict;
use crate::pes::{EventSet, Pes};
use crate::product::{with_config, CheckOptions, Product, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    Spoiler,
    Duplicator,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Spoiler => Player::Duplicator,
            Player::Duplicator => Player::Spoiler,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Spoiler => "Spoiler",
            Player::Duplicator => "Duplicator",
        })
    }
}

/// What Spoiler asks Duplicator to answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Challenge {
    /// A transition `C --pomset--> target` on `side`.
    Move {
        side: Side,
        pomset: EventSet,
        target: EventSet,
    },
    /// The configuration on `side` terminates; the other must as well.
    Terminate { side: Side },
}

impl Challenge {
    pub fn side(&self) -> Side {
        match self {
            Challenge::Move { side, .. } | Challenge::Terminate { side } => *side,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Position {
    Spoiler(State),
    Duplicator {
        state: State,
        challenge: Challenge,
    },
    /// Duplicator has met a termination challenge. Spoiler has no move here.
    Accepted,
}

impl Position {
    pub fn owner(&self) -> Player {
        match self {
            Position::Spoiler(_) | Position::Accepted => Player::Spoiler,
            Position::Duplicator { .. } => Player::Duplicator,
        }
    }

    pub fn state(&self) -> Option<&State> {
        match self {
            Position::Spoiler(s) | Position::Duplicator { state: s, .. } => Some(s),
            Position::Accepted => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    SpoilerChallengeLeft,
    SpoilerChallengeRight,
    SpoilerTerminationChallenge,
    /// hhp only: retreat to a pointwise-smaller triple.
    SpoilerBacktrack,
    DuplicatorAbsorbTau,
    DuplicatorMatch,
    DuplicatorTauStep,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::SpoilerChallengeLeft => "spoiler-challenge-left",
            Rule::SpoilerChallengeRight => "spoiler-challenge-right",
            Rule::SpoilerTerminationChallenge => "spoiler-termination-challenge",
            Rule::SpoilerBacktrack => "spoiler-backtrack",
            Rule::DuplicatorAbsorbTau => "duplicator-absorb-tau",
            Rule::DuplicatorMatch => "duplicator-match",
            Rule::DuplicatorTauStep => "duplicator-tau-step",
        })
    }
}

/// An arena edge. `played` is the event set the mover contributes: the
/// challenge pomset, the matching pomset, or the silent events stepped over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub rule: Rule,
    pub target: usize,
    pub played: EventSet,
}

pub struct Arena {
    pub kind: RelationKind,
    pub p1: Pes,
    pub p2: Pes,
    pub positions: Vec<Position>,
    pub moves: Vec<Vec<Move>>,
    pub initial: usize,
    /// hhp only: for each Spoiler position, the strictly smaller triples.
    pub below: Vec<Vec<usize>>,
}

impl Arena {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }

    pub fn pes(&self, side: Side) -> &Pes {
        match side {
            Side::Left => &self.p1,
            Side::Right => &self.p2,
        }
    }

    /// Spoiler's backtracking options at `pos` (empty outside hhp games).
    pub fn backtracks(&self, pos: usize) -> &[usize] {
        self.below.get(pos).map_or(&[], Vec::as_slice)
    }

    /// Every legal choice at `pos`: arena edges, then backtracks.
    pub fn choices(&self, pos: usize) -> Vec<Choice> {
        let edges = (0..self.moves[pos].len()).map(Choice::Edge);
        let back = self.backtracks(pos).iter().map(|&t| Choice::Backtrack(t));
        edges.chain(back).collect()
    }

    pub fn target(&self, pos: usize, choice: Choice) -> usize {
        match choice {
            Choice::Edge(i) => self.moves[pos][i].target,
            Choice::Backtrack(t) => t,
        }
    }

    pub fn rule(&self, pos: usize, choice: Choice) -> Rule {
        match choice {
            Choice::Edge(i) => self.moves[pos][i].rule,
            Choice::Backtrack(_) => Rule::SpoilerBacktrack,
        }
    }

    pub fn describe_position(&self, pos: usize) -> String {
        match &self.positions[pos] {
            Position::Spoiler(s) => format!("[{}]", s.show(&self.p1, &self.p2)),
            Position::Duplicator { state, challenge } => {
                let c = match challenge {
                    Challenge::Move { side, pomset, .. } => {
                        format!("{} {}", side_name(*side), self.pes(*side).show(*pomset))
                    }
                    Challenge::Terminate { side } => format!("{} terminates", side_name(*side)),
                };
                format!("<{}, {}>", state.show(&self.p1, &self.p2), c)
            }
            Position::Accepted => "accepted".to_string(),
        }
    }

    pub fn describe_choice(&self, pos: usize, choice: Choice) -> String {
        let Choice::Edge(i) = choice else {
            return format!(
                "backtrack to {}",
                self.describe_position(self.target(pos, choice))
            );
        };
        let m = self.moves[pos][i];
        let answering = match &self.positions[pos] {
            Position::Duplicator { challenge, .. } => challenge.side().other(),
            _ => Side::Left,
        };
        match m.rule {
            Rule::SpoilerChallengeLeft => format!("challenge left with {}", self.p1.show(m.played)),
            Rule::SpoilerChallengeRight => {
                format!("challenge right with {}", self.p2.show(m.played))
            }
            Rule::SpoilerTerminationChallenge => {
                let Position::Duplicator { challenge, .. } = &self.positions[m.target] else {
                    unreachable!("termination challenges lead to Duplicator")
                };
                format!(
                    "challenge termination of the {} side",
                    side_name(challenge.side())
                )
            }
            Rule::SpoilerBacktrack => unreachable!("backtracks are not edges"),
            Rule::DuplicatorAbsorbTau => "absorb the silent challenge".to_string(),
            Rule::DuplicatorMatch if self.positions[m.target] == Position::Accepted => {
                format!("terminate on the {} side", side_name(answering))
            }
            Rule::DuplicatorMatch => {
                format!(
                    "answer {} with {}",
                    side_name(answering),
                    self.pes(answering).show(m.played)
                )
            }
            Rule::DuplicatorTauStep => {
                format!(
                    "step silently {} by {}",
                    side_name(answering),
                    self.pes(answering).show(m.played)
                )
            }
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

/// A choice at a position: an arena edge by index, or (hhp) a backtrack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    Edge(usize),
    Backtrack(usize),
}

struct Builder {
    positions: Vec<Position>,
    index: HashMap<Position, usize>,
    moves: Vec<Vec<Move>>,
    limit: usize,
}

impl Builder {
    fn intern(&mut self, p: Position) -> Result<usize> {
        if let Some(&i) = self.index.get(&p) {
            return Ok(i);
        }
        let i = self.positions.len();
        if i + 1 > self.limit {
            return Err(Error::CapExceeded {
                what: "arena positions",
                count: i + 1,
                limit: self.limit,
            });
        }
        self.index.insert(p.clone(), i);
        self.positions.push(p);
        self.moves.push(Vec::new());
        Ok(i)
    }
}

/// Builds the game arena of `kind` over every candidate state.
pub fn build_arena(p1: &Pes, p2: &Pes, kind: RelationKind, opts: &CheckOptions) -> Result<Arena> {
    let prod = Product::new(p1, p2, kind, opts)?;
    let mut b = Builder {
        positions: Vec::new(),
        index: HashMap::new(),
        moves: Vec::new(),
        limit: opts.caps.max_positions,
    };
    for s in &prod.states {
        b.intern(Position::Spoiler(s.clone()))?;
    }
    let branching = kind.is_branching();

    // Spoiler challenges.
    for x in 0..prod.len() {
        for side in [Side::Left, Side::Right] {
            let own = prod.cfg_of(x, side);
            let rule = match side {
                Side::Left => Rule::SpoilerChallengeLeft,
                Side::Right => Rule::SpoilerChallengeRight,
            };
            for (xs, next) in prod.moves(side, own) {
                let challenge = Challenge::Move {
                    side,
                    pomset: xs,
                    target: prod.space(side).configs[next],
                };
                let d = b.intern(Position::Duplicator {
                    state: prod.states[x].clone(),
                    challenge,
                })?;
                b.moves[x].push(Move {
                    rule,
                    target: d,
                    played: xs,
                });
            }
        }
        if branching {
            for side in [Side::Left, Side::Right] {
                if prod.terminating(side, prod.cfg_of(x, side)) {
                    let d = b.intern(Position::Duplicator {
                        state: prod.states[x].clone(),
                        challenge: Challenge::Terminate { side },
                    })?;
                    b.moves[x].push(Move {
                        rule: Rule::SpoilerTerminationChallenge,
                        target: d,
                        played: EventSet::EMPTY,
                    });
                }
            }
        }
    }

    // Duplicator answers. Positions appended from here on are never Duplicator's.
    let duplicator_positions: Vec<usize> = (prod.len()..b.positions.len()).collect();
    for d in duplicator_positions {
        let Position::Duplicator { state, challenge } = b.positions[d].clone() else {
            unreachable!("only Duplicator positions follow the Spoiler block")
        };
        let x = prod.state_index(&state).expect("state from the universe");
        let side = challenge.side();
        let other_side = side.other();
        let own = prod.cfg_of(x, side);
        let other = prod.cfg_of(x, other_side);
        let other_space = prod.space(other_side);
        let mut answers = Vec::new();

        let with_own = |own_cfg: usize, other_cfg: usize| prod.pair_index(side, own_cfg, other_cfg);
        match challenge {
            Challenge::Move { pomset, target, .. } => {
                let own_next = prod
                    .space(side)
                    .index_of(target)
                    .expect("target is a configuration");
                if kind.is_posetal() {
                    let f = prod.map_of(x);
                    let e = pomset.iter().next().expect("single event");
                    if branching && prod.is_silent(side, pomset) {
                        let g =
                            absorb_silent(prod.pes(side), f, side, e).expect("silent absorption");
                        answers.push((
                            Rule::DuplicatorAbsorbTau,
                            index_of(&prod, &g),
                            EventSet::EMPTY,
                        ));
                    }
                    for (ys, _) in prod.moves(other_side, other) {
                        let e2 = ys.iter().next().expect("single event");
                        let ext = match side {
                            Side::Left => extend_map(p1, p2, f, e, e2),
                            Side::Right => extend_map(p1, p2, f, e2, e),
                        };
                        if let Ok(g) = ext {
                            answers.push((Rule::DuplicatorMatch, index_of(&prod, &g), ys));
                        }
                    }
                } else {
                    if branching && prod.is_silent(side, pomset) {
                        answers.push((
                            Rule::DuplicatorAbsorbTau,
                            with_own(own_next, other),
                            EventSet::EMPTY,
                        ));
                    }
                    for (ys, next) in prod.moves(other_side, other) {
                        if prod.pomsets_match(side, pomset, ys) {
                            answers.push((Rule::DuplicatorMatch, with_own(own_next, next), ys));
                        }
                    }
                }
            }
            Challenge::Terminate { .. } => {
                if prod.terminating(other_side, other) {
                    let acc = b.intern(Position::Accepted)?;
                    answers.push((Rule::DuplicatorMatch, acc, EventSet::EMPTY));
                }
            }
        }
        if branching {
            for &o0 in prod.tau_closure(other_side, other) {
                if o0 == other {
                    continue;
                }
                let target = if kind.is_posetal() {
                    index_of(
                        &prod,
                        &with_config(prod.map_of(x), other_side, other_space.configs[o0]),
                    )
                } else {
                    with_own(own, o0)
                };
                let silent = other_space.configs[o0].minus(other_space.configs[other]);
                answers.push((Rule::DuplicatorTauStep, target, silent));
            }
        }
        b.moves[d] = answers
            .into_iter()
            .map(|(rule, target, played)| Move {
                rule,
                target,
                played,
            })
            .collect();
    }

    let below = if kind.is_hereditary() {
        let mut below = prod.sub_triples();
        below.resize(b.positions.len(), Vec::new());
        below
    } else {
        Vec::new()
    };
    Ok(Arena {
        kind,
        p1: p1.clone(),
        p2: p2.clone(),
        positions: b.positions,
        moves: b.moves,
        initial: prod.initial(),
        below,
    })
}

fn index_of(prod: &Product, f: &crate::iso::PosetalMap) -> usize {
    prod.triple_index(f)
        .expect("valid triple is a candidate state")
}

/// Positions in an order where every edge goes forward.
pub fn topological_order(arena: &Arena) -> Result<Vec<usize>> {
    let n = arena.len();
    let mut indegree = vec![0usize; n];
    for ms in &arena.moves {
        for m in ms {
            indegree[m.target] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).rev().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        order.push(i);
        for m in &arena.moves[i] {
            indegree[m.target] -= 1;
            if indegree[m.target] == 0 {
                ready.push(m.target);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err(Error::ArenaCycle)
    }
}

/// Winners and winning strategies. A strategy entry exists for every
/// position owned by its winner that has a move to make.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub strategy: Vec<Option<Choice>>,
}

impl Solution {
    pub fn winner_at(&self, pos: usize) -> Player {
        self.winner[pos]
    }

    fn owned_by(
        &self,
        arena: &Arena,
        player: Player,
    ) -> impl Iterator<Item = (usize, Choice)> + '_ {
        let owners: Vec<Player> = arena.positions.iter().map(Position::owner).collect();
        self.strategy
            .iter()
            .enumerate()
            .filter_map(move |(i, c)| c.filter(|_| owners[i] == player).map(|c| (i, c)))
    }

    pub fn spoiler_strategy(&self, arena: &Arena) -> Vec<(usize, Choice)> {
        self.owned_by(arena, Player::Spoiler).collect()
    }

    pub fn duplicator_strategy(&self, arena: &Arena) -> Vec<(usize, Choice)> {
        self.owned_by(arena, Player::Duplicator).collect()
    }
}

/// One backward-induction sweep. `forced` Spoiler positions count as lost
/// for Duplicator; existing strategy entries of Spoiler-won positions are kept.
fn induct(
    arena: &Arena,
    order: &[usize],
    forced: &[bool],
    strategy: &mut [Option<Choice>],
) -> Vec<Player> {
    let mut winner = vec![Player::Duplicator; arena.len()];
    for &pos in order.iter().rev() {
        let moves = &arena.moves[pos];
        let spoiler_won = |t: usize, w: &[Player]| w[t] == Player::Spoiler;
        match arena.positions[pos].owner() {
            Player::Spoiler => {
                if forced.get(pos).copied().unwrap_or(false) {
                    winner[pos] = Player::Spoiler;
                    continue;
                }
                match moves.iter().position(|m| spoiler_won(m.target, &winner)) {
                    Some(i) => {
                        winner[pos] = Player::Spoiler;
                        if strategy[pos].is_none() {
                            strategy[pos] = Some(Choice::Edge(i));
                        }
                    }
                    None => {
                        winner[pos] = Player::Duplicator;
                        strategy[pos] = None;
                    }
                }
            }
            Player::Duplicator => {
                match moves.iter().position(|m| !spoiler_won(m.target, &winner)) {
                    Some(i) => {
                        winner[pos] = Player::Duplicator;
                        strategy[pos] = Some(Choice::Edge(i));
                    }
                    None => {
                        winner[pos] = Player::Spoiler;
                        strategy[pos] = None;
                    }
                }
            }
        }
    }
    winner
}

/// Backward induction: Duplicator wins where Spoiler runs out of challenges.
pub fn solve(arena: &Arena) -> Result<Solution> {
    let order = topological_order(arena)?;
    let mut strategy = vec![None; arena.len()];
    let winner = induct(arena, &order, &[], &mut strategy);
    Ok(Solution { winner, strategy })
}

/// Backward induction plus downward closure: a triple is lost for Duplicator
/// as soon as some pointwise-smaller triple is, and Spoiler wins there by
/// backtracking to it.
pub fn solve_hereditary(arena: &Arena) -> Result<Solution> {
    let order = topological_order(arena)?;
    let mut strategy = vec![None; arena.len()];
    let mut forced = vec![false; arena.len()];
    loop {
        let winner = induct(arena, &order, &forced, &mut strategy);
        let mut demoted = false;
        for pos in 0..arena.len() {
            if winner[pos] == Player::Spoiler || forced[pos] {
                continue;
            }
            if let Some(&t) = arena
                .backtracks(pos)
                .iter()
                .find(|&&t| winner[t] == Player::Spoiler)
            {
                forced[pos] = true;
                strategy[pos] = Some(Choice::Backtrack(t));
                demoted = true;
            }
        }
        if !demoted {
            return Ok(Solution { winner, strategy });
        }
    }
}

/// Result of deciding an equivalence by its game.
pub struct GameOutcome {
    pub arena: Arena,
    pub solution: Solution,
    pub equivalent: bool,
}

impl GameOutcome {
    pub fn verdict(&self) -> Verdict {
        Verdict {
            kind: self.arena.kind,
            equivalent: self.equivalent,
            witness: None,
        }
    }

    /// The winner's strategy restricted to positions reachable from the
    /// initial position when the winner follows it.
    pub fn winning_strategy(&self) -> Vec<(usize, Choice)> {
        let arena = &self.arena;
        let winner = self.solution.winner_at(arena.initial);
        let mut seen = vec![false; arena.len()];
        let mut stack = vec![arena.initial];
        let mut out = Vec::new();
        while let Some(pos) = stack.pop() {
            if std::mem::replace(&mut seen[pos], true) {
                continue;
            }
            if arena.positions[pos].owner() == winner {
                if let Some(c) = self.solution.strategy[pos] {
                    out.push((pos, c));
                    stack.push(arena.target(pos, c));
                }
            } else {
                stack.extend(arena.choices(pos).into_iter().map(|c| arena.target(pos, c)));
            }
        }
        out.sort_by_key(|&(p, _)| p);
        out
    }
}

/// Decides `kind` by solving its game from the empty state.
pub fn game_check(
    p1: &Pes,
    p2: &Pes,
    kind: RelationKind,
    opts: &CheckOptions,
) -> Result<GameOutcome> {
    let arena = build_arena(p1, p2, kind, opts)?;
    let solution = if kind.is_hereditary() {
        solve_hereditary(&arena)?
    } else {
        solve(&arena)?
    };
    let equivalent = solution.winner_at(arena.initial) == Player::Duplicator;
    Ok(GameOutcome {
        arena,
        solution,
        equivalent,
    })
}

/// Plays `player`'s strategy against every possible opponent behaviour from
/// `start`; true iff `player` wins all plays.
pub fn strategy_is_winning(
    arena: &Arena,
    solution: &Solution,
    player: Player,
    start: usize,
) -> bool {
    match player {
        Player::Spoiler => {
            // Spoiler must force a finite play ending with Duplicator stuck.
            #[derive(Clone, Copy, PartialEq)]
            enum Mark {
                Open,
                Active,
                Won,
            }
            let mut mark = vec![Mark::Open; arena.len()];
            // Iterative DFS: (position, children, next child).
            let children = |pos: usize| -> Option<Vec<usize>> {
                match arena.positions[pos].owner() {
                    Player::Spoiler => solution.strategy[pos].map(|c| vec![arena.target(pos, c)]),
                    Player::Duplicator => Some(arena.moves[pos].iter().map(|m| m.target).collect()),
                }
            };
            let Some(first) = children(start) else {
                return false;
            };
            mark[start] = Mark::Active;
            let mut stack = vec![(start, first, 0usize)];
            while let Some((pos, kids, next)) = stack.last_mut() {
                if *next == kids.len() {
                    mark[*pos] = Mark::Won;
                    stack.pop();
                    continue;
                }
                let child = kids[*next];
                *next += 1;
                match mark[child] {
                    Mark::Won => {}
                    Mark::Active => return false,
                    Mark::Open => {
                        let Some(grand) = children(child) else {
                            return false;
                        };
                        mark[child] = Mark::Active;
                        stack.push((child, grand, 0));
                    }
                }
            }
            true
        }
        Player::Duplicator => {
            // Duplicator must never be stuck; infinite plays are hers.
            let mut seen = vec![false; arena.len()];
            let mut stack = vec![start];
            while let Some(pos) = stack.pop() {
                if std::mem::replace(&mut seen[pos], true) {
                    continue;
                }
                match arena.positions[pos].owner() {
                    Player::Duplicator => match solution.strategy[pos] {
                        Some(c) => stack.push(arena.target(pos, c)),
                        None => return false,
                    },
                    Player::Spoiler => {
                        stack.extend(arena.choices(pos).into_iter().map(|c| arena.target(pos, c)));
                    }
                }
            }
            true
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("move {index} is not legal here ({available} moves available)")]
    IllegalMove { index: usize, available: usize },
    #[error("the play is already over")]
    Finished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayStep {
    pub actor: Player,
    pub by_machine: bool,
    pub rule: Rule,
    pub from: usize,
    pub to: usize,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ending {
    pub winner: Player,
    pub reason: String,
}

/// An interactive play: one side chosen externally, the other by the solver.
pub struct Play<'a> {
    arena: &'a Arena,
    solution: &'a Solution,
    human: Player,
    pos: usize,
    steps: Vec<PlayStep>,
}

impl<'a> Play<'a> {
    pub fn new(arena: &'a Arena, solution: &'a Solution, human: Player) -> Self {
        Play {
            arena,
            solution,
            human,
            pos: arena.initial,
            steps: Vec::new(),
        }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn steps(&self) -> &[PlayStep] {
        &self.steps
    }

    pub fn to_move(&self) -> Player {
        self.arena.positions[self.pos].owner()
    }

    pub fn legal(&self) -> Vec<Choice> {
        self.arena.choices(self.pos)
    }

    pub fn ending(&self) -> Option<Ending> {
        if !self.legal().is_empty() {
            return None;
        }
        let stuck = self.to_move();
        let reason = if self.arena.positions[self.pos] == Position::Accepted {
            "termination matched — Duplicator wins"
        } else if stuck == Player::Spoiler {
            "Spoiler has no moves — Duplicator wins"
        } else {
            "Duplicator stuck — Spoiler wins"
        }
        .to_string();
        Some(Ending {
            winner: stuck.opponent(),
            reason,
        })
    }

    fn take(&mut self, choice: Choice, by_machine: bool) {
        let to = self.arena.target(self.pos, choice);
        self.steps.push(PlayStep {
            actor: self.to_move(),
            by_machine,
            rule: self.arena.rule(self.pos, choice),
            from: self.pos,
            to,
            description: self.arena.describe_choice(self.pos, choice),
        });
        self.pos = to;
    }

    /// Applies the external player's `index`-th legal choice.
    pub fn choose(&mut self, index: usize) -> Result<(), ReplayError> {
        if self.ending().is_some() {
            return Err(ReplayError::Finished);
        }
        let legal = self.legal();
        let choice = *legal.get(index).ok_or(ReplayError::IllegalMove {
            index,
            available: legal.len(),
        })?;
        self.take(choice, false);
        Ok(())
    }

    /// Lets the machine move until it is the external player's turn or the
    /// play is over. The machine follows its strategy where it has one and
    /// otherwise takes its first legal move.
    pub fn run_machine(&mut self) {
        while self.to_move() != self.human && self.ending().is_none() {
            let choice = self.solution.strategy[self.pos].unwrap_or_else(|| self.legal()[0]);
            self.take(choice, true);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub steps: Vec<PlayStep>,
    /// `None` when the external moves ran out before the play ended.
    pub ending: Option<Ending>,
}

/// Replays externally chosen move indices for `human` against the solver.
pub fn replay(
    arena: &Arena,
    solution: &Solution,
    human: Player,
    moves: &[usize],
) -> Result<Transcript, ReplayError> {
    let mut play = Play::new(arena, solution, human);
    play.run_machine();
    for &m in moves {
        play.choose(m)?;
        play.run_machine();
    }
    Ok(Transcript {
        steps: play.steps.clone(),
        ending: play.ending(),
    })
}
