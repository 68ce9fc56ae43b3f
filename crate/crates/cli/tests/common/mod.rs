#![allow(dead_code)]

pub mod naive;

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn render(&self) -> String {
        format!(
            "exit: {}\n--- stdout\n{}--- stderr\n{}",
            self.code, self.stdout, self.stderr
        )
    }
}

/// Runs the binary inside the fixtures directory, so file names in messages
/// are relative and stable.
pub fn run_cli(args: &[&str], stdin: &str) -> Outcome {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pesbisim"))
        .args(args)
        .current_dir(fixtures_dir())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary starts");
    // The binary may exit before reading everything, so a broken pipe is fine.
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    let out = child.wait_with_output().unwrap();
    Outcome {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub struct GoldenCase {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub stdin: &'static str,
    pub code: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], code: i32) -> GoldenCase {
    GoldenCase {
        name,
        args,
        stdin: "",
        code,
    }
}

pub fn golden_cases() -> Vec<GoldenCase> {
    vec![
        case(
            "check_par_ch_pomset_strong",
            &[
                "check", "--rel", "pomset", "--mode", "strong", "PAR.pes", "CH.pes",
            ],
            1,
        ),
        case(
            "check_tau_pa_pomset_branching",
            &[
                "check",
                "--rel",
                "pomset",
                "--mode",
                "branching",
                "TAU.pes",
                "PA.pes",
            ],
            0,
        ),
        case(
            "check_par_par_hp_strong_witness",
            &[
                "check",
                "--rel",
                "hp",
                "--mode",
                "strong",
                "--witness",
                "PAR.pes",
                "PAR.pes",
            ],
            0,
        ),
        case(
            "check_stop_pa_step_branching",
            &[
                "check",
                "--rel",
                "step",
                "--mode",
                "branching",
                "STOP.pes",
                "PA.pes",
            ],
            1,
        ),
        case(
            "check_tau_pa_oracle_only",
            &["check", "--engine", "oracle", "TAU.pes", "PA.pes"],
            1,
        ),
        case(
            "check_tau_pa_game_only",
            &[
                "check",
                "--engine",
                "game",
                "--rel",
                "hp",
                "--mode",
                "branching",
                "TAU.pes",
                "PA.pes",
            ],
            0,
        ),
        case(
            "json_ch_ch_hhp_branching",
            &[
                "check",
                "--json",
                "--rel",
                "hhp",
                "--mode",
                "branching",
                "CH.pes",
                "CH.pes",
            ],
            0,
        ),
        case(
            "json_par_ch_step_strong_witness",
            &[
                "check",
                "--json",
                "--witness",
                "--rel",
                "step",
                "PAR.pes",
                "CH.pes",
            ],
            1,
        ),
        case(
            "json_seq_seq_hhp_strong_witness",
            &[
                "check",
                "--json",
                "--witness",
                "--rel",
                "hhp",
                "SEQ.pes",
                "SEQ.pes",
            ],
            0,
        ),
        case(
            "parse_undeclared_event",
            &["check", "PAR.pes", "undeclared.pes"],
            2,
        ),
        case("parse_syntax_error", &["check", "syntax.pes", "PAR.pes"], 2),
        case(
            "parse_duplicate_terminating",
            &["check", "twice.pes", "PAR.pes"],
            2,
        ),
        case(
            "validate_causality_cycle",
            &["check", "cycle.pes", "PAR.pes"],
            2,
        ),
        case(
            "validate_conflict_with_cause",
            &["check", "PAR.pes", "related.pes"],
            2,
        ),
        case(
            "usage_unknown_relation",
            &["check", "--rel", "bisim", "PAR.pes", "PAR.pes"],
            2,
        ),
        case("usage_missing_argument", &["check", "PAR.pes"], 2),
        case("usage_missing_file", &["check", "PAR.pes", "absent.pes"], 2),
        case(
            "cap_configurations",
            &["check", "--max-configs", "3", "PAR.pes", "PAR.pes"],
            3,
        ),
        case(
            "cap_events",
            &["check", "--max-events", "3", "PAR.pes", "CH.pes"],
            3,
        ),
        case(
            "cap_positions",
            &[
                "check",
                "--max-positions",
                "10",
                "--rel",
                "hp",
                "PAR.pes",
                "CH.pes",
            ],
            3,
        ),
        case(
            "export_configs_par",
            &["export", "--what", "configs", "PAR.pes"],
            0,
        ),
        case(
            "export_configs_ch",
            &["export", "--what", "configs", "CH.pes"],
            0,
        ),
        case(
            "export_configs_stop",
            &["export", "--what", "configs", "STOP.pes"],
            0,
        ),
        case(
            "export_arena_p0",
            &["export", "--what", "arena", "P0.pes", "P0.pes"],
            0,
        ),
        case(
            "export_arena_par_ch_hp",
            &[
                "export", "--what", "arena", "--rel", "hp", "PAR.pes", "CH.pes",
            ],
            0,
        ),
        case(
            "export_arena_tau_pa_hhp_branching",
            &[
                "export",
                "--what",
                "arena",
                "--rel",
                "hhp",
                "--mode",
                "branching",
                "TAU.pes",
                "PA.pes",
            ],
            0,
        ),
        case(
            "export_configs_cap",
            &[
                "export",
                "--what",
                "configs",
                "--max-configs",
                "2",
                "PAR.pes",
            ],
            3,
        ),
        GoldenCase {
            name: "play_spoiler_par_ch",
            args: &["play", "--as", "spoiler", "PAR.pes", "CH.pes"],
            stdin: "2\n",
            code: 0,
        },
        GoldenCase {
            name: "play_duplicator_p0",
            args: &["play", "--as", "duplicator", "P0.pes", "P0.pes"],
            stdin: "",
            code: 0,
        },
        GoldenCase {
            name: "play_duplicator_loses_par_ch",
            args: &[
                "play",
                "--as",
                "duplicator",
                "--rel",
                "step",
                "PAR.pes",
                "CH.pes",
            ],
            stdin: "0\n0\n0\n",
            code: 0,
        },
        GoldenCase {
            name: "play_invalid_choices_reprompt",
            args: &["play", "--as", "spoiler", "SEQ.pes", "SEQ.pes"],
            stdin: "7\nx\n0\n0\n",
            code: 0,
        },
        GoldenCase {
            name: "play_input_ends",
            args: &["play", "--as", "spoiler", "SEQ.pes", "SEQ.pes"],
            stdin: "0\n",
            code: 2,
        },
    ]
}

/// Compares against `tests/golden/<name>.txt`, or rewrites it when
/// `UPDATE_GOLDEN` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(format!("{name}.txt"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return Ok(());
    }
    let expected =
        std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!(
            "{name}: output differs from {}\n--- expected\n{expected}--- actual\n{actual}",
            path.display()
        ))
    }
}

/// Runs one golden case: exit code and combined output must both match.
pub fn run_golden(c: &GoldenCase) -> Result<Outcome, String> {
    let out = run_cli(c.args, c.stdin);
    if out.code != c.code {
        return Err(format!(
            "{}: exit {} (expected {})\n{}",
            c.name,
            out.code,
            c.code,
            out.render()
        ));
    }
    check_golden(c.name, &out.render())?;
    Ok(out)
}
