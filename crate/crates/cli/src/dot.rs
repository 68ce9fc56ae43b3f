//! Graphviz export of configuration graphs and solved arenas.

use std::fmt::Write as _;

use pesbisim::game::{Arena, Choice, Player, Position, Solution};
use pesbisim::pes::ConfigSpace;
use pesbisim::Pes;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Every configuration and every pomset transition between them. Terminating
/// configurations get a double border.
pub fn configs_dot(pes: &Pes, space: &ConfigSpace) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(pes.name())).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for (i, &c) in space.configs.iter().enumerate() {
        let border = if space.terminating[i] {
            ", peripheries=2"
        } else {
            ""
        };
        writeln!(out, "  c{i} [label={}{border}];", quote(&pes.show(c))).unwrap();
    }
    for (i, ts) in space.transitions.iter().enumerate() {
        for &(x, j, _) in ts {
            writeln!(out, "  c{i} -> c{j} [label={}];", quote(&pes.show(x))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// The arena with Spoiler positions as boxes and Duplicator positions as
/// diamonds, coloured by winner. Backtracking moves are dashed.
pub fn arena_dot(arena: &Arena, solution: &Solution) -> String {
    let mut out = String::new();
    let title = format!(
        "{} {} {}",
        arena.p1.name(),
        arena.kind.symbol(),
        arena.p2.name()
    );
    writeln!(out, "digraph {} {{", quote(&title)).unwrap();
    for (i, p) in arena.positions.iter().enumerate() {
        let shape = match p {
            Position::Duplicator { .. } => "diamond",
            Position::Spoiler(_) | Position::Accepted => "box",
        };
        let color = match solution.winner_at(i) {
            Player::Duplicator => "blue",
            Player::Spoiler => "red",
        };
        let initial = if i == arena.initial {
            ", penwidth=2"
        } else {
            ""
        };
        writeln!(
            out,
            "  p{i} [shape={shape}, color={color}, label={}{initial}];",
            quote(&arena.describe_position(i))
        )
        .unwrap();
    }
    for pos in 0..arena.len() {
        for choice in arena.choices(pos) {
            let style = if matches!(choice, Choice::Backtrack(_)) {
                ", style=dashed"
            } else {
                ""
            };
            writeln!(
                out,
                "  p{pos} -> p{} [label={}{style}];",
                arena.target(pos, choice),
                quote(&arena.rule(pos, choice).to_string())
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}
