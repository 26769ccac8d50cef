//! Lazily evaluated injections of ℕ.
//!
//! A [`PointMap`] answers `apply` and `preimage` pointwise. `Ok(None)` means the
//! map is genuinely undefined there (a partial injection off its domain);
//! `Err` means the answer lies outside what the finite representation can
//! reach, e.g. beyond the built tower levels.

use crate::tower::{phi_eval, TowerError, TowerRef};
use crate::words::Word;
use crate::Nat;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("outside the evaluation window: {0}")]
pub struct OutOfWindow(pub String);

impl From<TowerError> for OutOfWindow {
    fn from(e: TowerError) -> Self {
        OutOfWindow(e.to_string())
    }
}

pub type Eval = Result<Option<Nat>, OutOfWindow>;

pub trait PointMap: Send + Sync {
    fn apply(&self, m: &Nat) -> Eval;

    fn preimage(&self, m: &Nat) -> Eval;

    fn describe(&self) -> String;

    /// Whether the map is known to be `id_ℕ`.
    fn is_identity(&self) -> bool {
        false
    }

    /// `apply`, treating an undefined value as leaving the window.
    fn total(&self, m: &Nat) -> Result<Nat, OutOfWindow> {
        self.apply(m)?.ok_or_else(|| OutOfWindow(format!("{} undefined at {m}", self.describe())))
    }

    fn total_preimage(&self, m: &Nat) -> Result<Nat, OutOfWindow> {
        self.preimage(m)?.ok_or_else(|| OutOfWindow(format!("{} has no preimage of {m}", self.describe())))
    }
}

pub type MapRef = Arc<dyn PointMap>;

impl fmt::Debug for dyn PointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `φ(w)` on a tower.
#[derive(Clone)]
pub struct PhiMap {
    pub tower: TowerRef,
    pub word: Word,
}

impl PhiMap {
    pub fn new(tower: TowerRef, word: Word) -> Self {
        Self { tower, word }
    }
}

impl PointMap for PhiMap {
    fn apply(&self, m: &Nat) -> Eval {
        Ok(Some(phi_eval(self.tower.as_ref(), &self.word, m)?))
    }

    fn preimage(&self, m: &Nat) -> Eval {
        Ok(Some(phi_eval(self.tower.as_ref(), &self.word.invert(), m)?))
    }

    fn describe(&self) -> String {
        format!("phi({})", self.word)
    }

    fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

pub struct Inverted(pub MapRef);

impl PointMap for Inverted {
    fn apply(&self, m: &Nat) -> Eval {
        self.0.preimage(m)
    }

    fn preimage(&self, m: &Nat) -> Eval {
        self.0.apply(m)
    }

    fn describe(&self) -> String {
        format!("({})^-1", self.0.describe())
    }
}

/// `outer ∘ inner`.
pub struct Composed {
    pub outer: MapRef,
    pub inner: MapRef,
}

impl PointMap for Composed {
    fn apply(&self, m: &Nat) -> Eval {
        match self.inner.apply(m)? {
            Some(x) => self.outer.apply(&x),
            None => Ok(None),
        }
    }

    fn preimage(&self, m: &Nat) -> Eval {
        match self.outer.preimage(m)? {
            Some(x) => self.inner.preimage(&x),
            None => Ok(None),
        }
    }

    fn describe(&self) -> String {
        format!("{} o {}", self.outer.describe(), self.inner.describe())
    }
}

/// `base` with its value at `point` changed to `value`; the point that used to
/// map to `value` takes over the old image, so injectivity survives.
pub struct Perturbed {
    base: MapRef,
    point: Nat,
    value: Nat,
    /// `base⁻¹(value)`, if any.
    displaced: Option<Nat>,
    /// `base(point)`, if any.
    old: Option<Nat>,
}

impl Perturbed {
    pub fn new(base: MapRef, point: Nat, value: Nat) -> Result<Self, OutOfWindow> {
        let displaced = base.preimage(&value)?;
        let old = base.apply(&point)?;
        Ok(Self { base, point, value, displaced, old })
    }

    pub fn point(&self) -> &Nat {
        &self.point
    }
}

impl PointMap for Perturbed {
    fn apply(&self, m: &Nat) -> Eval {
        if *m == self.point {
            return Ok(Some(self.value.clone()));
        }
        if self.displaced.as_ref() == Some(m) {
            return Ok(self.old.clone());
        }
        self.base.apply(m)
    }

    fn preimage(&self, m: &Nat) -> Eval {
        if *m == self.value {
            return Ok(Some(self.point.clone()));
        }
        if self.old.as_ref() == Some(m) {
            return Ok(self.displaced.clone());
        }
        self.base.preimage(m)
    }

    fn describe(&self) -> String {
        format!("{}[{}->{}]", self.base.describe(), self.point, self.value)
    }
}

/// A permutation of the window `[0, len)`; points beyond it are out of window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowPerm {
    images: Vec<u64>,
    inverse: Vec<u64>,
}

impl WindowPerm {
    pub fn new(images: Vec<u64>) -> Option<Self> {
        let mut inverse = vec![u64::MAX; images.len()];
        for (i, &j) in images.iter().enumerate() {
            let slot = inverse.get_mut(j as usize)?;
            if *slot != u64::MAX {
                return None;
            }
            *slot = i as u64;
        }
        Some(Self { images, inverse })
    }

    /// `m ↦ m + k mod len`.
    pub fn rotation(len: u64, k: u64) -> Self {
        Self::new((0..len).map(|i| (i + k) % len).collect()).expect("rotation is a bijection")
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    fn lookup(table: &[u64], m: &Nat) -> Eval {
        crate::bignum::to_u64(m)
            .and_then(|i| table.get(i as usize))
            .map(|&j| Some(Nat::from(j)))
            .ok_or_else(|| OutOfWindow(format!("{m} beyond window [0, {})", table.len())))
    }
}

impl PointMap for WindowPerm {
    fn apply(&self, m: &Nat) -> Eval {
        Self::lookup(&self.images, m)
    }

    fn preimage(&self, m: &Nat) -> Eval {
        Self::lookup(&self.inverse, m)
    }

    fn describe(&self) -> String {
        format!("perm of [0, {})", self.images.len())
    }

    fn is_identity(&self) -> bool {
        false
    }
}
