//! Permutations of `[0, size)` with lexicographic Lehmer ranking.

use crate::bignum::{div_rem_small, from_limbs};
use crate::Nat;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("rank does not fit in S_{size}")]
    RankOutOfRange { size: usize },
    #[error("images do not form a bijection of [0, {0})")]
    NotABijection(usize),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(size: usize) -> Self {
        Self { images: (0..size as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        Self { images }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn has_fixed_point(&self) -> bool {
        self.images.iter().enumerate().any(|(i, &j)| i as u32 == j)
    }

    /// `self ∘ other`, i.e. `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.size(), other.size(), "composing permutations of different sizes");
        Perm { images: other.images.iter().map(|&j| self.images[j as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.size()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        Perm { images: inv }
    }

    /// Lehmer digits: `d_i = #{j > i : p(j) < p(i)}`.
    pub fn lehmer(&self) -> Vec<u32> {
        let n = self.size();
        let mut fen = Fenwick::new(n);
        let mut digits = vec![0u32; n];
        for i in (0..n).rev() {
            let v = self.images[i] as usize;
            digits[i] = fen.prefix(v) as u32;
            fen.add(v, 1);
        }
        digits
    }

    /// Lexicographic rank in `S_size`.
    pub fn rank(&self) -> Nat {
        let n = self.size();
        let digits = self.lehmer();
        // radix of digit i is n - i
        mixed_radix(&digits, n, 0, n).0
    }

    pub fn unrank(size: usize, r: &Nat) -> Result<Perm, PermError> {
        let mut digits = vec![0u32; size];
        let mut limbs = r.to_u64_digits();
        for i in (0..size).rev() {
            if limbs.is_empty() {
                break;
            }
            let radix = (size - i) as u64;
            digits[i] = div_rem_small(&mut limbs, radix) as u32;
        }
        if !limbs.is_empty() {
            return Err(PermError::RankOutOfRange { size });
        }
        Ok(Self::from_lehmer(&digits))
    }

    pub fn from_lehmer(digits: &[u32]) -> Perm {
        let n = digits.len();
        let mut fen = Fenwick::new(n);
        for v in 0..n {
            fen.add(v, 1);
        }
        let mut images = Vec::with_capacity(n);
        for &d in digits {
            let v = fen.find_kth(d as usize);
            fen.add(v, -1);
            images.push(v as u32);
        }
        Perm { images }
    }
}

/// Value and radix product of digits `lo..hi`, digit `i` having radix `n - i`.
fn mixed_radix(digits: &[u32], n: usize, lo: usize, hi: usize) -> (Nat, Nat) {
    if hi - lo <= 4096 {
        let mut limbs: Vec<u64> = Vec::new();
        let mut radix_limbs: Vec<u64> = vec![1];
        for i in lo..hi {
            let b = (n - i) as u64;
            crate::bignum::mul_add_small(&mut limbs, b, digits[i] as u64);
            crate::bignum::mul_add_small(&mut radix_limbs, b, 0);
            while limbs.last() == Some(&0) {
                limbs.pop();
            }
        }
        return (from_limbs(limbs), from_limbs(radix_limbs));
    }
    let mid = lo + (hi - lo) / 2;
    let (vl, rl) = mixed_radix(digits, n, lo, mid);
    let (vr, rr) = mixed_radix(digits, n, mid, hi);
    let v = if vl.is_zero() { vr } else { vl * &rr + vr };
    (v, rl * rr)
}

struct Fenwick {
    tree: Vec<i64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0; n + 1] }
    }

    fn add(&mut self, i: usize, delta: i64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `[0, i)`.
    fn prefix(&self, i: usize) -> i64 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `k`.
    fn find_kth(&self, k: usize) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0usize;
        let mut rem = k as i64;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= rem {
                pos = next;
                rem -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
