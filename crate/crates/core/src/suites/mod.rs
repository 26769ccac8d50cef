//! The invariant suites behind `mcg verify`. Each one is a list of named
//! checks with a short detail line, sized to finish in seconds.

mod algebra;
pub mod samples;
mod sites;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Nat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        Self { suite: suite.to_string(), checks: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Records `r`; `Ok` carries the detail for a pass.
    pub fn record(&mut self, name: &str, r: Result<String, String>) {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    /// highest PaperTower level the suites build (at most 4; level 4 only
    /// gets the (A) check and the rank witness for (B))
    pub paper_max_level: usize,
    pub toy_levels: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { paper_max_level: 3, toy_levels: crate::tower::toy::DEFAULT_TOY_LEVELS, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite {0:?}")]
pub struct UnknownSuite(pub String);

pub const SUITES: &[(&str, &str)] = &[
    ("words", "rank round trip, reduction, associativity, restriction, suffixes"),
    ("tower-AB", "requirements (A) and (B) and the level sizes of the paper tower"),
    ("tower-regularity", "nonempty words act without fixed points"),
    ("tower-action", "phi is an action: phi(w1 w2) = phi(w1) phi(w2)"),
    ("tower-injectivity", "distinct words of W_2 act differently below m_3"),
    ("coding", "# and pairing round trips, injectivity of chi on Sym(8)"),
    ("surgery", "random spaced triples: bijectivity, fixed points, cases, locality"),
    ("dpipeline", "the three scenario families on both towers"),
    ("mcg", "membership round trips, monotonicity, maxmap, fixed points, maximality"),
];

pub fn run(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport, UnknownSuite> {
    Ok(match name {
        "words" => algebra::words(cfg),
        "tower-AB" => algebra::tower_ab(cfg),
        "tower-regularity" => algebra::tower_regularity(cfg),
        "tower-action" => algebra::tower_action(cfg),
        "tower-injectivity" => algebra::tower_injectivity(cfg),
        "coding" => algebra::coding(cfg),
        "surgery" => sites::surgery(cfg),
        "dpipeline" => sites::dpipeline(cfg),
        "mcg" => sites::mcg(cfg),
        other => return Err(UnknownSuite(other.to_string())),
    })
}

/// A uniform-enough natural below `n` (`n > 0`).
pub fn random_below<R: Rng>(rng: &mut R, n: &Nat) -> Nat {
    let digits: Vec<u32> = (0..n.bits().div_ceil(32) + 1).map(|_| rng.gen()).collect();
    Nat::new(digits) % n
}

/// Folds a list of per-item outcomes into one check result.
fn tally(what: &str, total: usize, failures: Vec<String>) -> Result<String, String> {
    if failures.is_empty() {
        Ok(format!("{total} {what}"))
    } else {
        Err(format!("{} of {total} {what} failed; first: {}", failures.len(), failures[0]))
    }
}
