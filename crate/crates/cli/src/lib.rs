//! Command-line front end: `check`, `play` and `export`.
//!
//! Exit codes: 0 equivalent (or success), 1 inequivalent, 2 usage, parse or
//! validation error, 3 cap exceeded, 4 the two engines disagree.

pub mod dot;
pub mod format;
pub mod repl;
pub mod report;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pesbisim::game::{game_check, Player};
use pesbisim::oracle::check;
use pesbisim::pes::ConfigSpace;
use pesbisim::{validate_pes, Caps, CheckOptions, Flavor, Mode, Pes, RelationKind};

use crate::report::{Engine, Report, Timing, Witness};

pub const EXIT_EQUIVALENT: i32 = 0;
pub const EXIT_INEQUIVALENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "pesbisim",
    version,
    about = "Truly concurrent bisimilarity for prime event structures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether two event structures are equivalent.
    Check(CheckArgs),
    /// Play the bisimulation game against the solver.
    Play(PlayArgs),
    /// Print a Graphviz digraph of configurations or of the game arena.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelArg {
    Pomset,
    Step,
    Hp,
    Hhp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strong,
    Branching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Spoiler,
    Duplicator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum What {
    Arena,
    Configs,
}

#[derive(Debug, Args)]
pub struct KindArgs {
    #[arg(long, value_enum, default_value = "pomset")]
    pub rel: RelArg,
    #[arg(long, value_enum, default_value = "strong")]
    pub mode: ModeArg,
}

impl KindArgs {
    fn kind(&self) -> RelationKind {
        let flavor = match self.rel {
            RelArg::Pomset => Flavor::Pomset,
            RelArg::Step => Flavor::Step,
            RelArg::Hp => Flavor::Hp,
            RelArg::Hhp => Flavor::Hhp,
        };
        let mode = match self.mode {
            ModeArg::Strong => Mode::Strong,
            ModeArg::Branching => Mode::Branching,
        };
        RelationKind::new(flavor, mode)
    }
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, default_value_t = Caps::default().max_events)]
    pub max_events: usize,
    #[arg(long, default_value_t = Caps::default().max_configurations)]
    pub max_configs: usize,
    /// Also bounds the number of candidate states of the fixpoint engine.
    #[arg(long, default_value_t = Caps::default().max_positions)]
    pub max_positions: usize,
    /// Compare strong pomset and step moves up to erasure of silent events.
    #[arg(long)]
    pub erase_tau_strong: bool,
}

impl LimitArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            caps: Caps {
                max_events: self.max_events,
                max_configurations: self.max_configs,
                max_positions: self.max_positions,
            },
            erase_tau_in_strong: self.erase_tau_strong,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub engine: Engine,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Include the greatest relation and the winning strategy.
    #[arg(long)]
    pub witness: bool,
    /// Include wall-clock timings (makes the output nondeterministic).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub limits: LimitArgs,
    pub left: PathBuf,
    pub right: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub kind: KindArgs,
    /// The role you play; the solver takes the other.
    #[arg(long = "as", value_enum, default_value = "spoiler")]
    pub role: Side,
    #[command(flatten)]
    pub limits: LimitArgs,
    pub left: PathBuf,
    pub right: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum, default_value = "arena")]
    pub what: What,
    #[command(flatten)]
    pub kind: KindArgs,
    #[command(flatten)]
    pub limits: LimitArgs,
    /// One file for `configs`, two for `arena`.
    #[arg(required = true, num_args = 1..=2)]
    pub files: Vec<PathBuf>,
}

/// A failure that ends the command with a message and an exit code.
struct Failure {
    code: i32,
    message: String,
}

fn core_failure(context: &str, e: pesbisim::Error) -> Failure {
    Failure {
        code: if e.is_cap_exceeded() {
            EXIT_CAP
        } else {
            EXIT_USAGE
        },
        message: format!("{context}: {e}"),
    }
}

/// Reads, parses and validates a `.pes` file.
pub fn load_pes(path: &Path, caps: &Caps) -> Result<Pes, (i32, String)> {
    load(path, caps).map_err(|f| (f.code, f.message))
}

fn load(path: &Path, caps: &Caps) -> Result<Pes, Failure> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{shown}: cannot read: {e}"),
    })?;
    let doc = format::parse_pes(&text).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("{shown}:{e}"),
    })?;
    validate_pes(&doc.to_raw(), caps).map_err(|e| core_failure(&shown, e))
}

fn run_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = a.limits.options();
    let p1 = load(&a.left, &opts.caps)?;
    let p2 = load(&a.right, &opts.caps)?;
    let kind = a.kind.kind();
    let context = format!("{} vs {}", p1.name(), p2.name());

    let run_oracle = a.engine != Engine::Game;
    let run_game = a.engine != Engine::Oracle;
    let started = Instant::now();
    let oracle = run_oracle
        .then(|| check(&p1, &p2, kind, &opts))
        .transpose()
        .map_err(|e| core_failure(&context, e))?;
    let oracle_ms = run_oracle.then(|| started.elapsed().as_secs_f64() * 1000.0);
    let started = Instant::now();
    let game = run_game
        .then(|| game_check(&p1, &p2, kind, &opts))
        .transpose()
        .map_err(|e| core_failure(&context, e))?;
    let game_ms = run_game.then(|| started.elapsed().as_secs_f64() * 1000.0);

    let equivalent = oracle
        .as_ref()
        .map_or_else(|| game.as_ref().unwrap().equivalent, |v| v.equivalent);
    let disagree = matches!((&oracle, &game), (Some(v), Some(g)) if v.equivalent != g.equivalent);
    let witness = a.witness.then(|| Witness {
        relation: oracle
            .as_ref()
            .and_then(|v| v.witness.as_ref())
            .map(|r| report::relation_lines(&p1, &p2, r)),
        strategy: game.as_ref().map(report::strategy_steps),
    });
    let rep = Report {
        format: report::FORMAT_VERSION,
        left: p1.name().to_string(),
        right: p2.name().to_string(),
        relation: kind.flavor,
        mode: kind.mode,
        symbol: kind.symbol().to_string(),
        engine: a.engine,
        equivalent,
        oracle: oracle
            .as_ref()
            .map(|v| report::oracle_summary(v.equivalent, v.witness.as_ref())),
        game: game.as_ref().map(report::game_summary),
        caps: opts.caps,
        erase_tau_strong: opts.erase_tau_in_strong,
        timing: a.timing.then_some(Timing { oracle_ms, game_ms }),
        witness,
    };
    let io = |e: std::io::Error| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write output: {e}"),
    };
    if a.json {
        let text = serde_json::to_string_pretty(&rep).expect("report serializes");
        writeln!(out, "{text}").map_err(io)?;
    } else {
        write_text_report(&rep, out).map_err(io)?;
    }
    Ok(if disagree {
        EXIT_DISAGREEMENT
    } else if equivalent {
        EXIT_EQUIVALENT
    } else {
        EXIT_INEQUIVALENT
    })
}

fn write_text_report(rep: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    let verdict = if rep.equivalent {
        "equivalent"
    } else {
        "not equivalent"
    };
    writeln!(out, "{} {} {}: {verdict}", rep.left, rep.symbol, rep.right)?;
    if let Some(o) = &rep.oracle {
        let v = if o.equivalent {
            "equivalent"
        } else {
            "not equivalent"
        };
        writeln!(
            out,
            "  oracle: {v} (greatest relation: {} states)",
            o.relation_size
        )?;
    }
    if let Some(g) = &rep.game {
        writeln!(
            out,
            "  game: {} wins ({} positions, {} moves, strategy size {})",
            g.winner, g.positions, g.moves, g.strategy_length
        )?;
    }
    if let (Some(o), Some(g)) = (&rep.oracle, &rep.game) {
        if o.equivalent != g.equivalent {
            writeln!(out, "  engines disagree")?;
        }
    }
    if let Some(t) = &rep.timing {
        for (name, ms) in [("oracle", t.oracle_ms), ("game", t.game_ms)] {
            if let Some(ms) = ms {
                writeln!(out, "  {name} time: {ms:.3} ms")?;
            }
        }
    }
    if let Some(w) = &rep.witness {
        if let Some(r) = &w.relation {
            writeln!(out, "relation:")?;
            for s in r {
                writeln!(out, "  {s}")?;
            }
        }
        if let Some(steps) = &w.strategy {
            writeln!(out, "strategy:")?;
            for s in steps {
                writeln!(
                    out,
                    "  {} at {}: {} ({})",
                    s.player, s.position, s.choice, s.rule
                )?;
            }
        }
    }
    Ok(())
}

fn run_play(a: &PlayArgs, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = a.limits.options();
    let p1 = load(&a.left, &opts.caps)?;
    let p2 = load(&a.right, &opts.caps)?;
    let context = format!("{} vs {}", p1.name(), p2.name());
    let g = game_check(&p1, &p2, a.kind.kind(), &opts).map_err(|e| core_failure(&context, e))?;
    let human = match a.role {
        Side::Spoiler => Player::Spoiler,
        Side::Duplicator => Player::Duplicator,
    };
    let end =
        repl::play_session(&g.arena, &g.solution, human, input, out).map_err(|e| Failure {
            code: EXIT_USAGE,
            message: format!("i/o error: {e}"),
        })?;
    match end {
        repl::SessionEnd::Finished { .. } => Ok(0),
        repl::SessionEnd::InputClosed => Err(Failure {
            code: EXIT_USAGE,
            message: "input ended before the play was over".into(),
        }),
    }
}

fn run_export(a: &ExportArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = a.limits.options();
    let text = match (a.what, a.files.as_slice()) {
        (What::Configs, [file]) => {
            let p = load(file, &opts.caps)?;
            let space = ConfigSpace::new(&p, &opts.caps).map_err(|e| core_failure(p.name(), e))?;
            dot::configs_dot(&p, &space)
        }
        (What::Arena, [left, right]) => {
            let p1 = load(left, &opts.caps)?;
            let p2 = load(right, &opts.caps)?;
            let context = format!("{} vs {}", p1.name(), p2.name());
            let g = game_check(&p1, &p2, a.kind.kind(), &opts)
                .map_err(|e| core_failure(&context, e))?;
            dot::arena_dot(&g.arena, &g.solution)
        }
        (What::Configs, _) => {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--what configs takes exactly one file".into(),
            })
        }
        (What::Arena, _) => {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--what arena takes exactly two files".into(),
            })
        }
    };
    out.write_all(text.as_bytes()).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: format!("cannot write output: {e}"),
    })?;
    Ok(0)
}

/// Runs one command line. Returns the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    let result = match &cli.command {
        Command::Check(a) => run_check(a, out),
        Command::Play(a) => run_play(a, input, out),
        Command::Export(a) => run_export(a, out),
    };
    let _ = out.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
