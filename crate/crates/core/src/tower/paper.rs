//! The faithful tower: `G_n = S_l` with `l = |W_n|`, acting on itself by left
//! multiplication through Lehmer ranking, so `|I_n| = l!`.

use super::perm::Perm;
use super::{Tower, TowerError, TowerKind};
use crate::bignum::factorial;
use crate::words::{rank_indices, unrank_indices, w_count, w_unrank, Word};
use crate::Nat;
use std::collections::HashSet;
use std::sync::OnceLock;

/// Highest buildable level; `|W_5|` is about 10⁹.
pub const PAPER_LEVEL_CAP: usize = 4;

pub struct PaperLevel {
    n: usize,
    l: usize,
    m: Nat,
    size: OnceLock<Nat>,
    gens: Vec<Perm>,
    invs: Vec<Perm>,
}

impl PaperLevel {
    fn base() -> Self {
        let size = OnceLock::new();
        let _ = size.set(Nat::from(2u32));
        Self { n: 0, l: 2, m: Nat::from(0u32), size, gens: Vec::new(), invs: Vec::new() }
    }

    /// Assembles a level from generator images, re-checking (A) and (B).
    pub fn from_generators(n: usize, m: Nat, gens: Vec<Perm>) -> Result<Self, TowerError> {
        if n == 0 {
            return Ok(Self::base());
        }
        let l = w_count(n)? as usize;
        if gens.len() != 1 << n || gens.iter().any(|g| g.size() != l) {
            return Err(TowerError::BadConfig(format!("level {n} needs {} generators of size {l}", 1 << n)));
        }
        let invs = gens.iter().map(Perm::inverse).collect();
        let level = Self { n, l, m, size: OnceLock::new(), gens, invs };
        if n <= 3 {
            let _ = level.size.set(factorial(l as u64));
        }
        level.check_a()?;
        level.check_b_witness()?;
        Ok(level)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Carrier size of `G_n = S_l`.
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> &Nat {
        &self.m
    }

    pub fn group_order(&self) -> &Nat {
        self.size.get_or_init(|| factorial(self.l as u64))
    }

    /// Generator images in lex order of their codes.
    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    fn letter_perm(&self, idx: u64) -> &Perm {
        let v = (idx >> 1) as usize;
        if idx & 1 == 0 {
            &self.gens[v]
        } else {
            &self.invs[v]
        }
    }

    /// `c_n(w)` as a permutation of `[0, l)`.
    pub fn c_eval(&self, w: &Word) -> Result<Perm, TowerError> {
        if w.level() != self.n && !w.is_empty() {
            return Err(TowerError::WrongLevel { want: self.n, have: w.level() });
        }
        let mut acc = Perm::identity(self.l);
        for letter in w.letters() {
            acc = acc.compose(self.letter_perm(letter.index()));
        }
        Ok(acc)
    }

    /// `c_n(w)(i)` without composing whole permutations.
    pub fn c_apply(&self, w: &Word, i: usize) -> Result<usize, TowerError> {
        if w.level() != self.n && !w.is_empty() {
            return Err(TowerError::WrongLevel { want: self.n, have: w.level() });
        }
        Ok(w.letters().iter().rev().fold(i, |p, l| self.letter_perm(l.index()).apply(p)))
    }

    /// (A): `m_n < |I_n| − 1`.
    pub fn check_a(&self) -> Result<(), TowerError> {
        let ok = match self.size.get() {
            Some(s) => &self.m + 1u32 < *s,
            None => (self.m.bits() as f64) + 2.0 < log2_factorial_lower(self.l),
        };
        if ok {
            Ok(())
        } else {
            Err(TowerError::RequirementAViolated(self.n))
        }
    }

    /// (B) via the witness `c(w_i)(0) = i`, which makes `c_n` injective on `W_n`.
    pub fn check_b_witness(&self) -> Result<(), TowerError> {
        for i in 0..self.l {
            let idx = unrank_indices(self.n, i as u64)?;
            let p = idx.iter().rev().fold(0usize, |p, &c| self.letter_perm(c).apply(p));
            if p != i {
                return Err(TowerError::RequirementBViolated { n: self.n, detail: format!("c(w_{i})(0) = {p}") });
            }
        }
        Ok(())
    }

    /// (B) by composing `c_n(w)` densely for every `w ∈ W_n` and comparing.
    pub fn check_b_exhaustive(&self) -> Result<(), TowerError> {
        let mut seen: HashSet<Perm> = HashSet::with_capacity(self.l);
        for i in 0..self.l {
            let w = w_unrank(self.n, i as u64)?;
            if !seen.insert(self.c_eval(&w)?) {
                return Err(TowerError::RequirementBViolated {
                    n: self.n,
                    detail: format!("c({w}) repeats an earlier image"),
                });
            }
        }
        Ok(())
    }
}

/// `log₂(l!)` from below, via Stirling with a safety margin.
fn log2_factorial_lower(l: usize) -> f64 {
    if l < 2 {
        return 0.0;
    }
    let x = l as f64;
    let ln = x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln();
    ln / std::f64::consts::LN_2 - 1.0
}

/// `c_0(x)` extended to a permutation: the partial map `i ↦ j` with
/// `w_j = x·w_i ∈ W_n`, completed by matching the unmatched domain points to
/// the unmatched range points in increasing order.
pub fn generator_image(n: usize, code: u64, words: &[(u8, [u64; 4])]) -> Perm {
    let l = words.len();
    let cx = 2 * code;
    let mut images = vec![u32::MAX; l];
    let mut hit = vec![false; l];
    let mut buf = [0u64; 5];
    for (i, (len, idx)) in words.iter().enumerate() {
        let w = &idx[..*len as usize];
        let j = if w.first() == Some(&(cx ^ 1)) {
            Some(rank_indices(n, &w[1..]))
        } else if w.len() < n {
            buf[0] = cx;
            buf[1..=w.len()].copy_from_slice(w);
            Some(rank_indices(n, &buf[..=w.len()]))
        } else {
            None
        };
        if let Some(j) = j {
            let j = j.expect("reduced word of W_n") as usize;
            images[i] = j as u32;
            hit[j] = true;
        }
    }
    let free_range = hit.iter().enumerate().filter(|(_, &h)| !h).map(|(j, _)| j as u32);
    let free_dom: Vec<usize> = (0..l).filter(|&i| images[i] == u32::MAX).collect();
    for (i, j) in free_dom.into_iter().zip(free_range) {
        images[i] = j;
    }
    Perm::from_images_unchecked(images)
}

pub(crate) fn packed_words(n: usize) -> Result<Vec<(u8, [u64; 4])>, TowerError> {
    let l = w_count(n)?;
    (0..l)
        .map(|i| {
            let idx = unrank_indices(n, i)?;
            let mut a = [0u64; 4];
            a[..idx.len()].copy_from_slice(&idx);
            Ok((idx.len() as u8, a))
        })
        .collect()
}

pub struct PaperTower {
    levels: Vec<PaperLevel>,
}

impl PaperTower {
    /// Builds levels `0..=max_level`.
    pub fn build(max_level: usize) -> Result<Self, TowerError> {
        if max_level > PAPER_LEVEL_CAP {
            return Err(TowerError::LevelTooLarge { n: max_level, cap: PAPER_LEVEL_CAP });
        }
        let mut t = Self { levels: vec![PaperLevel::base()] };
        for n in 1..=max_level {
            let words = packed_words(n)?;
            let gens = (0..1u64 << n).map(|v| generator_image(n, v, &words)).collect();
            let m = t.next_start();
            t.levels.push(PaperLevel::from_generators(n, m, gens)?);
        }
        Ok(t)
    }

    /// Reassembles a tower from already-checked levels, e.g. a cache.
    pub fn from_levels(levels: Vec<PaperLevel>) -> Result<Self, TowerError> {
        if levels.first().map(|l| l.n) != Some(0) {
            return Err(TowerError::BadConfig("tower must start at level 0".into()));
        }
        let mut t = Self { levels: vec![] };
        for (k, lv) in levels.into_iter().enumerate() {
            let expect = if k == 0 { Nat::from(0u32) } else { t.next_start() };
            if lv.n != k || lv.m != expect {
                return Err(TowerError::BadConfig(format!("level {k} has inconsistent start")));
            }
            t.levels.push(lv);
        }
        Ok(t)
    }

    fn next_start(&self) -> Nat {
        let last = self.levels.last().expect("level 0 exists");
        &last.m + last.group_order()
    }

    pub fn level(&self, n: usize) -> &PaperLevel {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[PaperLevel] {
        &self.levels
    }

    pub fn c_eval(&self, n: usize, w: &Word) -> Result<Perm, TowerError> {
        self.levels.get(n).ok_or(TowerError::LevelTooLarge { n, cap: self.levels.len() - 1 })?.c_eval(w)
    }
}

impl Tower for PaperTower {
    fn kind(&self) -> TowerKind {
        TowerKind::Paper
    }

    fn num_levels(&self) -> usize {
        self.levels.len()
    }

    fn start(&self, n: usize) -> &Nat {
        &self.levels[n].m
    }

    fn size(&self, n: usize) -> &Nat {
        self.levels[n].group_order()
    }

    fn offset_in_range(&self, n: usize, off: &Nat) -> bool {
        let lv = &self.levels[n];
        match lv.size.get() {
            Some(s) => off < s,
            None if (off.bits() as f64) + 1.0 < log2_factorial_lower(lv.l) => true,
            None => off < lv.group_order(),
        }
    }

    fn act(&self, n: usize, w: &Word, off: &Nat) -> Result<Nat, TowerError> {
        if w.is_empty() {
            return Ok(off.clone());
        }
        let lv = &self.levels[n];
        let c = lv.c_eval(w)?;
        let g = Perm::unrank(lv.l, off)?;
        Ok(c.compose(&g).rank())
    }

    fn diffword(&self, n: usize, off: &Nat, off2: &Nat) -> Result<Option<Word>, TowerError> {
        if off == off2 {
            return Ok(Some(Word::empty(n)));
        }
        if n == 0 {
            return Ok(None);
        }
        let lv = &self.levels[n];
        let g = Perm::unrank(lv.l, off)?;
        let g2 = Perm::unrank(lv.l, off2)?;
        let t = g2.compose(&g.inverse());
        let cand = w_unrank(n, t.apply(0) as u64)?;
        if lv.c_eval(&cand)? == t {
            Ok(Some(cand))
        } else {
            Ok(None)
        }
    }

    fn code_resolution(&self, n: usize) -> usize {
        n
    }
}

impl Default for PaperTower {
    fn default() -> Self {
        Self { levels: vec![PaperLevel::base()] }
    }
}
