//! Random small event structures for property tests and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::pes::{validate_pes, Caps, Pes, RawPes};

/// Shape of generated structures.
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    pub max_events: usize,
    pub tau_probability: f64,
    pub cause_probability: f64,
    pub conflict_probability: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_events: 5,
            tau_probability: 0.2,
            cause_probability: 0.25,
            conflict_probability: 0.15,
        }
    }
}

const ALPHABET: [&str; 3] = ["a", "b", "c"];

fn random_label<R: Rng>(rng: &mut R, params: &GenParams) -> &'static str {
    if rng.gen_bool(params.tau_probability) {
        "tau"
    } else {
        ALPHABET[rng.gen_range(0..ALPHABET.len())]
    }
}

/// A random PES with at most `params.max_events` events and maximal
/// termination. Causes only run from lower to higher index, so they are
/// acyclic; a conflict is kept only if the structure stays valid.
pub fn random_pes<R: Rng>(rng: &mut R, name: &str, params: &GenParams) -> Pes {
    let n = rng.gen_range(0..=params.max_events);
    let labels: Vec<&str> = (0..n).map(|_| random_label(rng, params)).collect();
    with_labels(rng, name, &labels, params)
}

/// A random structure over events with the given labels.
fn with_labels<R: Rng>(rng: &mut R, name: &str, labels: &[&str], params: &GenParams) -> Pes {
    let n = labels.len();
    let ids: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut raw = RawPes::new(name);
    for (id, label) in ids.iter().zip(labels) {
        raw = raw.event(id, label);
    }
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(params.cause_probability) {
                raw = raw.cause(&ids[i], &ids[j]);
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(params.conflict_probability) {
                let candidate = raw.clone().conflict(&ids[i], &ids[j]);
                if validate_pes(&candidate, &Caps::default()).is_ok() {
                    raw = candidate;
                }
            }
        }
    }
    validate_pes(&raw, &Caps::default()).expect("generated structures are valid")
}

/// The same structure with fresh identifiers and shuffled declarations.
pub fn renamed<R: Rng>(rng: &mut R, pes: &Pes) -> Pes {
    let raw = pes.to_raw();
    let mut fresh: Vec<usize> = (0..raw.events.len()).collect();
    fresh.shuffle(rng);
    let rename = |id: &str| {
        let i = raw
            .events
            .iter()
            .position(|(e, _)| e == id)
            .expect("declared id");
        format!("x{}", fresh[i])
    };
    let mut out = RawPes::new(format!("{}'", raw.name));
    let mut events = raw.events.clone();
    events.shuffle(rng);
    for (id, label) in &events {
        out = out.event(&rename(id), label);
    }
    let mut causes = raw.causes.clone();
    causes.shuffle(rng);
    for (a, b) in &causes {
        out = out.cause(&rename(a), &rename(b));
    }
    let mut conflicts = raw.conflicts.clone();
    conflicts.shuffle(rng);
    for (a, b) in &conflicts {
        if rng.gen_bool(0.5) {
            out = out.conflict(&rename(b), &rename(a));
        } else {
            out = out.conflict(&rename(a), &rename(b));
        }
    }
    out = out.termination(raw.termination.clone());
    validate_pes(&out, &Caps::default()).expect("renaming preserves validity")
}

/// A small perturbation: one relabelled event, one dropped declaration, or
/// one extra event. Often, but not always, changes the behaviour.
pub fn mutated<R: Rng>(rng: &mut R, pes: &Pes, params: &GenParams) -> Pes {
    let mut raw = pes.to_raw();
    raw.name = format!("{}~", raw.name);
    match rng.gen_range(0..3) {
        0 if !raw.events.is_empty() => {
            let i = rng.gen_range(0..raw.events.len());
            raw.events[i].1 = random_label(rng, params).to_string();
        }
        1 if !raw.causes.is_empty() || !raw.conflicts.is_empty() => {
            let k = rng.gen_range(0..raw.causes.len() + raw.conflicts.len());
            if k < raw.causes.len() {
                raw.causes.remove(k);
            } else {
                raw.conflicts.remove(k - raw.causes.len());
            }
        }
        _ => {
            let id = format!("m{}", raw.events.len());
            raw.events
                .push((id.clone(), random_label(rng, params).to_string()));
            if let Some((other, _)) = raw.events.first().filter(|_| rng.gen_bool(0.5)).cloned() {
                if other != id {
                    raw.causes.push((other, id));
                }
            }
        }
    }
    // Dropping a cause can expose a conflict between now-unrelated events
    // that the closure previously forbade; fall back to the original then.
    validate_pes(&raw, &Caps::default()).unwrap_or_else(|_| pes.clone())
}

/// Same labels, freshly drawn causality and conflict.
pub fn restructured<R: Rng>(rng: &mut R, pes: &Pes, params: &GenParams) -> Pes {
    let mut labels: Vec<&str> = (0..pes.len()).map(|e| pes.label(e).name()).collect();
    labels.shuffle(rng);
    with_labels(rng, &format!("{}*", pes.name()), &labels, params)
}

/// How a pair in the corpus was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOrigin {
    Independent,
    Renamed,
    Mutated,
    Restructured,
}

#[derive(Clone, Debug)]
pub struct PesPair {
    pub left: Pes,
    pub right: Pes,
    pub origin: PairOrigin,
}

/// A mixed corpus of `count` pairs: independent structures, renamed copies
/// (equivalent under every kind), small mutations, and restructurings.
pub fn pair_corpus<R: Rng>(rng: &mut R, count: usize, params: &GenParams) -> Vec<PesPair> {
    (0..count)
        .map(|i| {
            let left = random_pes(rng, &format!("L{i}"), params);
            let (right, origin) = match i % 4 {
                0 => (
                    random_pes(rng, &format!("R{i}"), params),
                    PairOrigin::Independent,
                ),
                1 => (renamed(rng, &left), PairOrigin::Renamed),
                2 => (mutated(rng, &left, params), PairOrigin::Mutated),
                _ => (restructured(rng, &left, params), PairOrigin::Restructured),
            };
            PesPair {
                left,
                right,
                origin,
            }
        })
        .collect()
}
