//! Plain-text interactive play: numbered menus on stdout, choices on stdin.

use std::io::{self, BufRead, Write};

use pesbisim::game::{Arena, Play, Player, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SessionEnd {
    Finished { winner: Player },
    InputClosed,
}

fn report_machine_moves(play: &Play, from: usize, out: &mut dyn Write) -> io::Result<()> {
    for step in &play.steps()[from..] {
        writeln!(out, "{} (machine): {}", step.actor, step.description)?;
    }
    Ok(())
}

pub fn play_session(
    arena: &Arena,
    solution: &Solution,
    human: Player,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> io::Result<SessionEnd> {
    let mut play = Play::new(arena, solution, human);
    writeln!(
        out,
        "{} {} {}: you play {human}",
        arena.p1.name(),
        arena.kind.symbol(),
        arena.p2.name()
    )?;
    play.run_machine();
    report_machine_moves(&play, 0, out)?;
    loop {
        if let Some(end) = play.ending() {
            writeln!(out, "{}", end.reason)?;
            if end.winner != human {
                writeln!(out, "machine moves played:")?;
                for step in play.steps().iter().filter(|s| s.by_machine) {
                    writeln!(out, "  {}: {}", step.rule, step.description)?;
                }
            }
            return Ok(SessionEnd::Finished { winner: end.winner });
        }
        writeln!(
            out,
            "position: {}",
            arena.describe_position(play.position())
        )?;
        let legal = play.legal();
        for (i, &c) in legal.iter().enumerate() {
            writeln!(out, "  [{i}] {}", arena.describe_choice(play.position(), c))?;
        }
        let index = loop {
            write!(out, "> ")?;
            out.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                writeln!(out)?;
                return Ok(SessionEnd::InputClosed);
            }
            match line.trim().parse::<usize>() {
                Ok(i) if i < legal.len() => break i,
                _ => writeln!(
                    out,
                    "invalid choice '{}'; enter a number from 0 to {}",
                    line.trim(),
                    legal.len() - 1
                )?,
            }
        };
        let before = play.steps().len();
        play.choose(index)
            .expect("index checked against the legal moves");
        writeln!(out, "{human}: {}", play.steps()[before].description)?;
        play.run_machine();
        report_machine_moves(&play, before + 1, out)?;
    }
}
