use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::iso::MapMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Pomset,
    Step,
    Hp,
    Hhp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Branching,
}

/// One of the eight equivalences: ∼p ∼s ∼hp ∼hhp ≈bp ≈bs ≈bhp ≈bhhp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationKind {
    pub flavor: Flavor,
    pub mode: Mode,
}

impl RelationKind {
    pub const ALL: [RelationKind; 8] = [
        RelationKind::new(Flavor::Pomset, Mode::Strong),
        RelationKind::new(Flavor::Step, Mode::Strong),
        RelationKind::new(Flavor::Hp, Mode::Strong),
        RelationKind::new(Flavor::Hhp, Mode::Strong),
        RelationKind::new(Flavor::Pomset, Mode::Branching),
        RelationKind::new(Flavor::Step, Mode::Branching),
        RelationKind::new(Flavor::Hp, Mode::Branching),
        RelationKind::new(Flavor::Hhp, Mode::Branching),
    ];

    pub const fn new(flavor: Flavor, mode: Mode) -> Self {
        RelationKind { flavor, mode }
    }

    /// hp and hhp relate posetal triples rather than configuration pairs.
    pub fn is_posetal(self) -> bool {
        matches!(self.flavor, Flavor::Hp | Flavor::Hhp)
    }

    pub fn is_hereditary(self) -> bool {
        self.flavor == Flavor::Hhp
    }

    pub fn is_branching(self) -> bool {
        self.mode == Mode::Branching
    }

    pub fn map_mode(self) -> MapMode {
        match (self.mode, self.flavor) {
            (Mode::Strong, _) => MapMode::Strong,
            (Mode::Branching, Flavor::Hhp) => MapMode::WeakPaired,
            (Mode::Branching, _) => MapMode::Weak,
        }
    }

    pub fn symbol(self) -> &'static str {
        match (self.mode, self.flavor) {
            (Mode::Strong, Flavor::Pomset) => "∼p",
            (Mode::Strong, Flavor::Step) => "∼s",
            (Mode::Strong, Flavor::Hp) => "∼hp",
            (Mode::Strong, Flavor::Hhp) => "∼hhp",
            (Mode::Branching, Flavor::Pomset) => "≈bp",
            (Mode::Branching, Flavor::Step) => "≈bs",
            (Mode::Branching, Flavor::Hp) => "≈bhp",
            (Mode::Branching, Flavor::Hhp) => "≈bhhp",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Pomset => "pomset",
            Flavor::Step => "step",
            Flavor::Hp => "hp",
            Flavor::Hhp => "hhp",
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Branching => "branching",
        })
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.mode, self.flavor)
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pomset" => Ok(Flavor::Pomset),
            "step" => Ok(Flavor::Step),
            "hp" => Ok(Flavor::Hp),
            "hhp" => Ok(Flavor::Hhp),
            _ => Err(format!("unknown relation '{s}'")),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strong" => Ok(Mode::Strong),
            "branching" => Ok(Mode::Branching),
            _ => Err(format!("unknown mode '{s}'")),
        }
    }
}
