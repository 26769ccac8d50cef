//! Graph coding of injections as binary sequences (`χ`), the bijection
//! `# : 2^{<ω} → ℕ`, Cantor pairing, and `ξ = φ ∘ χ`.

use crate::map::{Eval, OutOfWindow, PointMap};
use crate::surgery::PartialInjection;
use crate::tower::{interval_of, phi_eval, TowerError, TowerRef};
use crate::words::{GeneratorCode, Sign, Word};
use crate::Nat;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("bit {position} (pair ({i}, {j})) is not determined")]
    InsufficientData { position: u64, i: u64, j: u64 },
    #[error("code has {have} bits, level {level} needs {need}")]
    PrefixTooShort { level: usize, need: usize, have: usize },
    #[error("bad bit string {0:?}")]
    Parse(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Window(#[from] OutOfWindow),
}

/// A finite binary sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPrefix {
    bits: Vec<bool>,
}

impl BitPrefix {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn truncate(&self, k: usize) -> Self {
        Self::new(self.bits[..k.min(self.len())].to_vec())
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    /// `self ⊆ other` as sequences.
    pub fn is_prefix_of(&self, other: &BitPrefix) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// `self ⊊ other`.
    pub fn is_proper_prefix_of(&self, other: &BitPrefix) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// Whether the 1-bits could belong to the graph of an injection: at most
    /// one 1 per row and per column.
    pub fn graph_consistent(&self) -> bool {
        self.decode_graph().is_some()
    }

    /// The partial injection formed by the 1-bits, if they are consistent.
    pub fn decode_graph(&self) -> Option<PartialInjection> {
        let mut f = PartialInjection::new();
        for (p, &b) in self.bits.iter().enumerate() {
            if b {
                let (i, j) = unpair(p as u64);
                f.insert(Nat::from(i), Nat::from(j)).ok()?;
            }
        }
        Some(f)
    }
}

impl fmt::Display for BitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitPrefix {
    type Err = CodingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CodingError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitPrefix::new)
    }
}

impl Serialize for BitPrefix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitPrefix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Cantor pairing `(i+j)(i+j+1)/2 + j`.
pub fn pair(i: u64, j: u64) -> u64 {
    let s = i + j;
    s * (s + 1) / 2 + j
}

pub fn unpair(p: u64) -> (u64, u64) {
    // largest s with s(s+1)/2 <= p
    let mut s = (((8.0 * p as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while s * (s + 1) / 2 > p {
        s -= 1;
    }
    while (s + 1) * (s + 2) / 2 <= p {
        s += 1;
    }
    let j = p - s * (s + 1) / 2;
    (s - j, j)
}

/// `#(s) = 2^{|s|} − 1 + binval(s)`, first bit most significant.
pub fn hash_seq(s: &BitPrefix) -> Nat {
    let mut v = Nat::zero();
    for &b in s.bits() {
        v <<= 1;
        if b {
            v += 1u32;
        }
    }
    (Nat::one() << s.len()) - 1u32 + v
}

pub fn unhash_seq(n: &Nat) -> BitPrefix {
    let shifted = n + 1u32;
    let len = shifted.bits() as usize - 1;
    let v = shifted - (Nat::one() << len);
    let bits = (0..len).map(|i| v.bit((len - 1 - i) as u64)).collect();
    BitPrefix::new(bits)
}

/// Bit `p` of `χ(f)`: whether `f(i) = j` for `(i, j) = unpair(p)`.
pub fn chi_bit(f: &dyn PointMap, p: u64) -> Result<bool, CodingError> {
    let (i, j) = unpair(p);
    let (ni, nj) = (Nat::from(i), Nat::from(j));
    if let Some(v) = f.apply(&ni)? {
        return Ok(v == nj);
    }
    // f(i) undetermined: a known preimage of j still settles the bit
    if let Some(u) = f.preimage(&nj)? {
        return Ok(u == ni);
    }
    Err(CodingError::InsufficientData { position: p, i, j })
}

pub fn chi_prefix(f: &dyn PointMap, k: usize) -> Result<BitPrefix, CodingError> {
    (0..k as u64).map(|p| chi_bit(f, p)).collect::<Result<Vec<_>, _>>().map(BitPrefix::new)
}

/// The longest determined prefix of `χ(f)`, up to `max` bits.
pub fn chi_longest(f: &dyn PointMap, max: usize) -> BitPrefix {
    let mut out = BitPrefix::default();
    for p in 0..max as u64 {
        match chi_bit(f, p) {
            Ok(b) => out.push(b),
            Err(_) => break,
        }
    }
    out
}

/// The single-generator word whose level-`n` restriction `φ` sees: the code
/// truncated to what the tower reads at level `n` and padded to `n` bits.
pub fn code_word(tower: &TowerRef, code: &BitPrefix, n: usize) -> Result<Word, CodingError> {
    let need = tower.code_resolution(n);
    if code.len() < need {
        return Err(CodingError::PrefixTooShort { level: n, need, have: code.len() });
    }
    let mut bits = code.bits()[..n.min(code.len())].to_vec();
    bits.resize(n, false);
    Ok(Word::single(GeneratorCode::new(bits), Sign::Pos))
}

/// `φ(x)(m)` for a generator given by a finite code prefix.
pub fn phi_code_eval(tower: &TowerRef, code: &BitPrefix, m: &Nat, sign: Sign) -> Result<Nat, CodingError> {
    let (n, _) = interval_of(tower.as_ref(), m)?;
    if n == 0 {
        return Ok(m.clone());
    }
    let mut w = code_word(tower, code, n)?;
    if sign == Sign::Neg {
        w = w.invert();
    }
    Ok(phi_eval(tower.as_ref(), &w, m)?)
}

/// `ξ(f)(m) = φ(χ(f))(m)`.
pub fn xi_eval(tower: &TowerRef, f: &dyn PointMap, m: &Nat) -> Result<Nat, CodingError> {
    let (n, _) = interval_of(tower.as_ref(), m)?;
    let code = chi_prefix(f, tower.code_resolution(n))?;
    phi_code_eval(tower, &code, m, Sign::Pos)
}

/// `φ(x)` for a generator known through a finite prefix of its code.
#[derive(Clone)]
pub struct CodeMap {
    pub tower: TowerRef,
    pub code: BitPrefix,
}

impl CodeMap {
    pub fn new(tower: TowerRef, code: BitPrefix) -> Self {
        Self { tower, code }
    }

    /// `ξ(f)`, with as much of `χ(f)` as the built levels can use.
    pub fn xi(tower: TowerRef, f: &dyn PointMap) -> Self {
        let top = tower.num_levels() - 1;
        let code = chi_longest(f, tower.code_resolution(top));
        Self { tower, code }
    }

    fn eval(&self, m: &Nat, sign: Sign) -> Eval {
        phi_code_eval(&self.tower, &self.code, m, sign).map(Some).map_err(|e| OutOfWindow(e.to_string()))
    }
}

impl PointMap for CodeMap {
    fn apply(&self, m: &Nat) -> Eval {
        self.eval(m, Sign::Pos)
    }

    fn preimage(&self, m: &Nat) -> Eval {
        self.eval(m, Sign::Neg)
    }

    fn describe(&self) -> String {
        format!("phi<{}>", self.code)
    }
}
