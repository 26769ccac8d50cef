//! Brute-force model of the paper tower: words as raw letter-index lists,
//! permutations as dense image vectors, factorial-base ranking done by hand.
//! Shares nothing with the library beyond `Nat`.

use mcg_core::Nat;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::HashMap;

/// Letter index `2·code + [sign = −]`.
pub type Letters = Vec<u64>;

/// All reduced words of length `≤ n` over `2^n` codes, by length then
/// lexicographically on letter indices.
pub fn enumerate(n: usize) -> Vec<Letters> {
    let a = if n == 0 { 0 } else { 2u64 << n };
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Letters> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for c in 0..a {
                if w.last().is_some_and(|&p| p ^ 1 == c) {
                    continue;
                }
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

pub fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&i| a[i as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Vec<u32> {
    let mut v = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        v[j as usize] = i as u32;
    }
    v
}

pub fn unrank(l: usize, r: &Nat) -> Vec<u32> {
    let mut digits = vec![0u32; l];
    let mut k = r.clone();
    for i in (0..l).rev() {
        let (q, d) = k.div_rem(&Nat::from((l - i) as u64));
        digits[i] = d.to_u32().unwrap();
        k = q;
    }
    assert!(k.is_zero(), "rank too large");
    let mut free: Vec<u32> = (0..l as u32).collect();
    digits.iter().map(|&d| free.remove(d as usize)).collect()
}

pub fn rank(p: &[u32]) -> Nat {
    let l = p.len();
    let mut r = Nat::zero();
    for i in 0..l {
        let d = p[i + 1..].iter().filter(|&&q| q < p[i]).count();
        r = r * Nat::from((l - i) as u64) + Nat::from(d as u64);
    }
    r
}

pub struct Level {
    pub words: Vec<Letters>,
    /// generator images, then their inverses, by letter index
    perms: Vec<Vec<u32>>,
}

impl Level {
    pub fn new(n: usize) -> Self {
        let words = enumerate(n);
        if n == 0 {
            return Self { words, perms: Vec::new() };
        }
        let index: HashMap<&Letters, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let l = words.len();
        let mut perms = Vec::new();
        for code in 0..1u64 << n {
            let x = 2 * code;
            let mut img = vec![None; l];
            for (i, w) in words.iter().enumerate() {
                let prod: Letters = if w.first() == Some(&(x ^ 1)) {
                    w[1..].to_vec()
                } else {
                    std::iter::once(x).chain(w.iter().copied()).collect()
                };
                img[i] = index.get(&prod).copied();
            }
            let mut hit = vec![false; l];
            for j in img.iter().flatten() {
                hit[*j] = true;
            }
            let mut free = (0..l).filter(|&j| !hit[j]);
            let g: Vec<u32> = img.iter().map(|j| j.unwrap_or_else(|| free.next().unwrap()) as u32).collect();
            let gi = inverse(&g);
            perms.push(g);
            perms.push(gi);
        }
        Self { words, perms }
    }

    pub fn l(&self) -> usize {
        self.words.len()
    }

    /// `c(w)`, the letters composed left to right, so the last acts first.
    pub fn c(&self, w: &[u64]) -> Vec<u32> {
        let mut acc: Vec<u32> = (0..self.l() as u32).collect();
        for &c in w {
            acc = compose(&acc, &self.perms[c as usize]);
        }
        acc
    }

    /// The action of `w` on the offset `off` of this level's interval.
    pub fn act(&self, w: &[u64], off: &Nat) -> Nat {
        if self.perms.is_empty() {
            return off.clone();
        }
        rank(&compose(&self.c(w), &unrank(self.l(), off)))
    }

    /// Every word of the level taking `off` to `off2`.
    pub fn diffwords(&self, off: &Nat, off2: &Nat) -> Vec<&Letters> {
        self.words.iter().filter(|w| &self.act(w, off) == off2).collect()
    }
}

/// `m_0, m_1, …` for levels `0..=top`: `|I_0| = 2`, `|I_n| = |W_n|!`.
pub fn starts(levels: &[Level]) -> Vec<Nat> {
    let mut m = vec![Nat::zero()];
    for (n, lv) in levels.iter().enumerate().take(levels.len() - 1) {
        let size = if n == 0 { Nat::from(2u32) } else { (1..=lv.l() as u64).map(Nat::from).product() };
        m.push(&m[n] + size);
    }
    m
}
