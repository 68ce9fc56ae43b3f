//! The machine-readable result of `check`.

use pesbisim::game::{GameOutcome, Player, Rule};
use pesbisim::oracle::Relation;
use pesbisim::{Caps, Flavor, Mode, Pes};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Oracle,
    Game,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: u32,
    pub left: String,
    pub right: String,
    pub relation: Flavor,
    pub mode: Mode,
    pub symbol: String,
    pub engine: Engine,
    /// The oracle's verdict when it ran, the game's otherwise.
    pub equivalent: bool,
    pub oracle: Option<OracleSummary>,
    pub game: Option<GameSummary>,
    pub caps: Caps,
    pub erase_tau_strong: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub equivalent: bool,
    /// Size of the greatest relation (0 when inequivalent).
    pub relation_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameSummary {
    pub equivalent: bool,
    pub winner: Player,
    pub positions: usize,
    pub moves: usize,
    /// Positions where the winner's strategy prescribes a move, among those
    /// reachable when the winner follows it.
    pub strategy_length: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub oracle_ms: Option<f64>,
    pub game_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<StrategyStep>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyStep {
    pub player: Player,
    pub position: String,
    pub rule: Rule,
    #[serde(rename = "move")]
    pub choice: String,
}

pub fn oracle_summary(equivalent: bool, witness: Option<&Relation>) -> OracleSummary {
    OracleSummary {
        equivalent,
        relation_size: witness.map_or(0, Relation::len),
    }
}

pub fn game_summary(g: &GameOutcome) -> GameSummary {
    GameSummary {
        equivalent: g.equivalent,
        winner: g.solution.winner_at(g.arena.initial),
        positions: g.arena.len(),
        moves: g.arena.edge_count(),
        strategy_length: g.winning_strategy().len(),
    }
}

pub fn relation_lines(p1: &Pes, p2: &Pes, r: &Relation) -> Vec<String> {
    r.states.iter().map(|s| s.show(p1, p2)).collect()
}

pub fn strategy_steps(g: &GameOutcome) -> Vec<StrategyStep> {
    let arena = &g.arena;
    g.winning_strategy()
        .into_iter()
        .map(|(pos, choice)| StrategyStep {
            player: arena.positions[pos].owner(),
            position: arena.describe_position(pos),
            rule: arena.rule(pos, choice),
            choice: arena.describe_choice(pos, choice),
        })
        .collect()
}
