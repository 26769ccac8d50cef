//! Reduced words in the free groups 𝔽(ⁿ2), restriction homomorphisms between
//! levels, and the ranked word sets `W_n` (reduced words of length at most `n`).

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("letters live at different levels ({0} vs {1})")]
    MixedLevels(usize, usize),
    #[error("cannot restrict a level-{level} word to level {target}")]
    LevelTooHigh { level: usize, target: usize },
    #[error("index {index} out of range for W_{level}")]
    IndexOutOfRange { level: usize, index: u64 },
    #[error("word of length {len} is not in W_{level}")]
    NotInWn { level: usize, len: usize },
    #[error("W_{0} is too large to rank with 64-bit indices")]
    Overflow(usize),
    #[error("level-0 generators do not exist (𝔽 of the empty alphabet is trivial)")]
    TrivialLevel,
    #[error("cannot parse word: {0}")]
    Parse(String),
}

/// A generator of 𝔽(ⁿ2): a binary sequence of length `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorCode {
    bits: Vec<bool>,
}

impl GeneratorCode {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_str_bits(s: &str) -> Result<Self, WordError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(WordError::Parse(format!("bad bit {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }

    /// The code of value `v` written with `level` bits, most significant first.
    pub fn from_value(level: usize, v: u64) -> Self {
        Self::new((0..level).map(|i| (v >> (level - 1 - i)) & 1 == 1).collect())
    }

    pub fn level(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(self.bits[..n.min(self.bits.len())].to_vec())
    }

    /// Binary value, most significant bit first. Only meaningful for short codes.
    pub fn value(&self) -> u64 {
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }
}

impl fmt::Display for GeneratorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: GeneratorCode,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: GeneratorCode, sign: Sign) -> Self {
        Self { gen, sign }
    }

    pub fn pos(bits: &str) -> Self {
        Self::new(GeneratorCode::from_str_bits(bits).expect("bit string"), Sign::Pos)
    }

    pub fn neg(bits: &str) -> Self {
        Self::new(GeneratorCode::from_str_bits(bits).expect("bit string"), Sign::Neg)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.gen.clone(), self.sign.flip())
    }

    pub fn cancels(&self, other: &Letter) -> bool {
        self.gen == other.gen && self.sign != other.sign
    }

    /// Position in the letter order of level `n`: codes lexicographically,
    /// `+` before `−`.
    pub(crate) fn index(&self) -> u64 {
        2 * self.gen.value() + (self.sign == Sign::Neg) as u64
    }

    pub(crate) fn from_index(level: usize, idx: u64) -> Self {
        let sign = if idx & 1 == 1 { Sign::Neg } else { Sign::Pos };
        Self::new(GeneratorCode::from_value(level, idx >> 1), sign)
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gen.cmp(&other.gen).then(self.sign.cmp(&other.sign))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign == Sign::Pos { '+' } else { '-' };
        write!(f, "{s}{}", self.gen)
    }
}

/// A reduced word of 𝔽(ⁿ2). The empty word is the neutral element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    level: usize,
    letters: Vec<Letter>,
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Length first, then lexicographic on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters.len().cmp(&other.letters.len()).then_with(|| self.letters.cmp(&other.letters))
    }
}

impl Word {
    pub fn empty(level: usize) -> Self {
        Self { level, letters: Vec::new() }
    }

    /// Free reduction of `letters`, all of which must sit at `level`.
    pub fn reduce(level: usize, letters: impl IntoIterator<Item = Letter>) -> Result<Self, WordError> {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if l.gen.level() != level {
                return Err(WordError::MixedLevels(level, l.gen.level()));
            }
            if level == 0 {
                return Err(WordError::TrivialLevel);
            }
            if stack.last().is_some_and(|top| top.cancels(&l)) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Ok(Self { level, letters: stack })
    }

    /// Reduces a letter sequence whose level is read off the first letter.
    pub fn from_letters(letters: Vec<Letter>) -> Result<Self, WordError> {
        let level = letters.first().map_or(0, |l| l.gen.level());
        Self::reduce(level, letters)
    }

    pub fn single(gen: GeneratorCode, sign: Sign) -> Self {
        let level = gen.level();
        Self { level, letters: vec![Letter::new(gen, sign)] }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn signs(&self) -> Vec<Sign> {
        self.letters.iter().map(|l| l.sign).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| !p[0].cancels(&p[1]))
    }

    pub fn multiply(&self, other: &Word) -> Result<Word, WordError> {
        if self.level != other.level {
            return Err(WordError::MixedLevels(self.level, other.level));
        }
        let mut letters = self.letters.clone();
        for l in &other.letters {
            if letters.last().is_some_and(|top| top.cancels(l)) {
                letters.pop();
            } else {
                letters.push(l.clone());
            }
        }
        Ok(Word { level: self.level, letters })
    }

    pub fn invert(&self) -> Word {
        Word { level: self.level, letters: self.letters.iter().rev().map(Letter::inverse).collect() }
    }

    /// The homomorphism `r_n`, truncating every generator to its first `n` bits.
    pub fn restrict(&self, n: usize) -> Result<Word, WordError> {
        if n > self.level {
            return Err(WordError::LevelTooHigh { level: self.level, target: n });
        }
        if n == 0 {
            return Ok(Word::empty(0));
        }
        Word::reduce(n, self.letters.iter().map(|l| Letter::new(l.gen.truncate(n), l.sign)))
    }

    /// Text form: letters joined by `·`, each a sign and a bit string; `e` for
    /// the neutral element.
    pub fn parse_at(s: &str, level: usize) -> Result<Word, WordError> {
        let w: Word = s.parse()?;
        if w.is_empty() {
            return Ok(Word::empty(level));
        }
        if w.level != level {
            return Err(WordError::MixedLevels(level, w.level));
        }
        Ok(w)
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Word::empty(0));
        }
        let mut letters = Vec::new();
        for part in s.split(['·', '.', '*']) {
            let part = part.trim();
            let (sign, bits) = match part.chars().next() {
                Some('+') => (Sign::Pos, &part[1..]),
                Some('-') => (Sign::Neg, &part[1..]),
                _ => return Err(WordError::Parse(format!("letter {part:?} lacks a sign"))),
            };
            letters.push(Letter::new(GeneratorCode::from_str_bits(bits)?, sign));
        }
        Word::from_letters(letters)
    }
}

#[derive(Serialize, Deserialize)]
struct WordRepr {
    level: usize,
    word: String,
}

/// As `{"level": n, "word": "+01·-10"}`, so the empty word keeps its level.
impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        WordRepr { level: self.level, word: self.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = WordRepr::deserialize(d)?;
        Word::parse_at(&r.word, r.level).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn alphabet_size(n: usize) -> Result<u64, WordError> {
    if n >= 62 {
        return Err(WordError::Overflow(n));
    }
    Ok(1u64 << (n + 1))
}

/// Number of reduced words of length exactly `t` over `a` signed letters.
fn count_of_length(a: u64, t: usize) -> Option<u64> {
    if t == 0 {
        return Some(1);
    }
    let mut c = a;
    for _ in 1..t {
        c = c.checked_mul(a - 1)?;
    }
    Some(c)
}

/// `|W_n|`.
pub fn w_count(n: usize) -> Result<u64, WordError> {
    if n == 0 {
        return Ok(1);
    }
    let a = alphabet_size(n)?;
    let mut total = 0u64;
    for t in 0..=n {
        total = count_of_length(a, t).and_then(|c| total.checked_add(c)).ok_or(WordError::Overflow(n))?;
    }
    Ok(total)
}

/// Rank of `w` in the (length, lex) enumeration of `W_n`, `n = level(w)`.
pub fn w_rank(w: &Word) -> Result<u64, WordError> {
    let idx: Vec<u64> = w.letters.iter().map(Letter::index).collect();
    rank_indices(w.level, &idx)
}

/// [`w_rank`] on a word given by letter indices (`2·code + [sign = −]`).
pub(crate) fn rank_indices(n: usize, idx: &[u64]) -> Result<u64, WordError> {
    let t = idx.len();
    if t > n {
        return Err(WordError::NotInWn { level: n, len: t });
    }
    if t == 0 {
        return Ok(0);
    }
    let a = alphabet_size(n)?;
    let overflow = || WordError::Overflow(n);
    let mut rank = 0u64;
    for s in 0..t {
        rank += count_of_length(a, s).ok_or_else(overflow)?;
    }
    let mut prev: Option<u64> = None;
    for (p, &c) in idx.iter().enumerate() {
        let below = match prev {
            None => c,
            Some(q) => c - ((q ^ 1) < c) as u64,
        };
        let weight = (a - 1).checked_pow((t - 1 - p) as u32).ok_or_else(overflow)?;
        rank = below.checked_mul(weight).and_then(|x| rank.checked_add(x)).ok_or_else(overflow)?;
        prev = Some(c);
    }
    Ok(rank)
}

/// Inverse of [`w_rank`] on `W_n`.
pub fn w_unrank(n: usize, index: u64) -> Result<Word, WordError> {
    let idx = unrank_indices(n, index)?;
    Ok(Word { level: n, letters: idx.into_iter().map(|c| Letter::from_index(n, c)).collect() })
}

pub(crate) fn unrank_indices(n: usize, index: u64) -> Result<Vec<u64>, WordError> {
    let total = w_count(n)?;
    if index >= total {
        return Err(WordError::IndexOutOfRange { level: n, index });
    }
    if index == 0 {
        return Ok(Vec::new());
    }
    let a = alphabet_size(n)?;
    let mut rest = index;
    let mut t = 0usize;
    loop {
        let c = count_of_length(a, t).ok_or(WordError::Overflow(n))?;
        if rest < c {
            break;
        }
        rest -= c;
        t += 1;
    }
    let mut idx = Vec::with_capacity(t);
    let mut prev: Option<u64> = None;
    for p in 0..t {
        let weight = (a - 1).pow((t - 1 - p) as u32);
        let below = rest / weight;
        rest %= weight;
        let c = match prev {
            Some(q) if below >= (q ^ 1) => below + 1,
            _ => below,
        };
        idx.push(c);
        prev = Some(c);
    }
    Ok(idx)
}

/// All of `W_n` in rank order. Intended for small `n`.
pub fn enumerate_wn(n: usize) -> Result<Vec<Word>, WordError> {
    (0..w_count(n)?).map(|i| w_unrank(n, i)).collect()
}
