//! The interval partition `I_n = [m_n, m_{n+1})` of ℕ together with regular
//! actions of the groups `G_n` on each interval, and lazy pointwise
//! evaluation of the action `φ` of 𝔽(^ℕ2).

pub mod cache;
pub mod paper;
pub mod perm;
pub mod toy;

use crate::words::{Word, WordError};
use crate::Nat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub use paper::PaperTower;
pub use perm::{Perm, PermError};
pub use toy::ToyTower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    Paper,
    Toy,
}

impl fmt::Display for TowerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TowerKind::Paper => "paper",
            TowerKind::Toy => "toy",
        })
    }
}

impl std::str::FromStr for TowerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(TowerKind::Paper),
            "toy" => Ok(TowerKind::Toy),
            _ => Err(format!("unknown tower kind {s:?} (expected paper or toy)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("requirement (A) fails at level {0}")]
    RequirementAViolated(usize),
    #[error("requirement (B) fails at level {n}: {detail}")]
    RequirementBViolated { n: usize, detail: String },
    #[error("level {n} exceeds the feasibility cap {cap}")]
    LevelTooLarge { n: usize, cap: usize },
    #[error("point {0} lies beyond the built levels")]
    PointBeyondBuiltLevels(String),
    #[error("word prefix of length {have} is too short for level {need}")]
    PrefixTooShort { need: usize, have: usize },
    #[error("word at level {have}, expected level {want}")]
    WrongLevel { want: usize, have: usize },
    #[error("points lie in different intervals ({0} vs {1})")]
    DifferentLevels(usize, usize),
    #[error("invalid tower configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A built prefix of the tower: levels `0..num_levels()`.
///
/// Offsets are positions inside an interval, so the point `m_n + off` of `I_n`
/// corresponds to offset `off` at level `n`.
pub trait Tower: Send + Sync {
    fn kind(&self) -> TowerKind;

    fn num_levels(&self) -> usize;

    /// `m_n` for `n < num_levels()`.
    fn start(&self, n: usize) -> &Nat;

    /// `|I_n|`. May be computed on first use.
    fn size(&self, n: usize) -> &Nat;

    /// Whether `off < |I_n|`, ideally without forcing [`Tower::size`].
    fn offset_in_range(&self, n: usize, off: &Nat) -> bool {
        off < self.size(n)
    }

    /// The action of `w` (a word at level `n`) on offset `off` of `I_n`.
    fn act(&self, n: usize, w: &Word, off: &Nat) -> Result<Nat, TowerError>;

    /// The word `w ∈ W_n` with `w · off = off2`, if one exists.
    fn diffword(&self, n: usize, off: &Nat, off2: &Nat) -> Result<Option<Word>, TowerError>;

    /// Number of leading code bits the level-`n` action depends on.
    fn code_resolution(&self, n: usize) -> usize;

    /// `m_{N}` where `N = num_levels()`: the first point beyond the tower.
    fn end(&self) -> Nat {
        let top = self.num_levels() - 1;
        self.start(top) + self.size(top)
    }
}

pub type TowerRef = Arc<dyn Tower>;

/// `(n, m − m_n)` with `m ∈ I_n`.
pub fn interval_of(t: &dyn Tower, m: &Nat) -> Result<(usize, Nat), TowerError> {
    let levels = t.num_levels();
    // the largest n with m_n <= m
    let mut lo = 0usize;
    let mut hi = levels;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t.start(mid) <= m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let off = m - t.start(lo);
    if lo == levels - 1 && !t.offset_in_range(lo, &off) {
        return Err(TowerError::PointBeyondBuiltLevels(m.to_string()));
    }
    Ok((lo, off))
}

pub fn level_of(t: &dyn Tower, m: &Nat) -> Result<usize, TowerError> {
    interval_of(t, m).map(|(n, _)| n)
}

/// `φ(w)(m)` for a word whose generators carry prefixes of length at least
/// the level of `m`.
pub fn phi_eval(t: &dyn Tower, w: &Word, m: &Nat) -> Result<Nat, TowerError> {
    let (n, off) = interval_of(t, m)?;
    if w.is_empty() || n == 0 {
        return Ok(m.clone());
    }
    if w.level() < n {
        return Err(TowerError::PrefixTooShort { need: n, have: w.level() });
    }
    let r = w.restrict(n)?;
    if r.is_empty() {
        return Ok(m.clone());
    }
    Ok(t.start(n) + t.act(n, &r, &off)?)
}

pub fn phi_eval_inverse(t: &dyn Tower, w: &Word, m: &Nat) -> Result<Nat, TowerError> {
    phi_eval(t, &w.invert(), m)
}

/// `w(m, m')`: the word of `W_n` carrying `m` to `m'` inside `I_n`.
pub fn diffword_points(t: &dyn Tower, m: &Nat, m2: &Nat) -> Result<Option<Word>, TowerError> {
    let (n, off) = interval_of(t, m)?;
    let (n2, off2) = interval_of(t, m2)?;
    if n != n2 {
        return Err(TowerError::DifferentLevels(n, n2));
    }
    t.diffword(n, &off, &off2)
}

/// The saturation `Isat(M)`: every interval meeting `M`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Saturation {
    pub levels: BTreeSet<usize>,
}

impl Saturation {
    pub fn contains_level(&self, n: usize) -> bool {
        self.levels.contains(&n)
    }

    pub fn contains(&self, t: &dyn Tower, m: &Nat) -> Result<bool, TowerError> {
        Ok(self.levels.contains(&level_of(t, m)?))
    }

    /// The union as a list of maximal half-open intervals `[lo, hi)`.
    pub fn intervals(&self, t: &dyn Tower) -> Vec<(Nat, Nat)> {
        let mut out: Vec<(Nat, Nat)> = Vec::new();
        for &n in &self.levels {
            let lo = t.start(n).clone();
            let hi = t.start(n) + t.size(n);
            match out.last_mut() {
                Some(last) if last.1 == lo => last.1 = hi,
                _ => out.push((lo, hi)),
            }
        }
        out
    }
}

pub fn isat<'a>(t: &dyn Tower, points: impl IntoIterator<Item = &'a Nat>) -> Result<Saturation, TowerError> {
    let mut levels = BTreeSet::new();
    for m in points {
        levels.insert(level_of(t, m)?);
    }
    Ok(Saturation { levels })
}

/// Construction parameters shared by the CLI and the suites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerSpec {
    pub kind: TowerKind,
    pub max_level: usize,
    pub toy_sizes: Option<Vec<Nat>>,
}

impl TowerSpec {
    pub fn paper(max_level: usize) -> Self {
        Self { kind: TowerKind::Paper, max_level, toy_sizes: None }
    }

    pub fn toy(max_level: usize) -> Self {
        Self { kind: TowerKind::Toy, max_level, toy_sizes: None }
    }

    pub fn build(&self) -> Result<TowerRef, TowerError> {
        Ok(match self.kind {
            TowerKind::Paper => Arc::new(PaperTower::build(self.max_level)?),
            TowerKind::Toy => Arc::new(match &self.toy_sizes {
                Some(s) => ToyTower::with_sizes(s.clone())?,
                None => ToyTower::new(self.max_level)?,
            }),
        })
    }
}
