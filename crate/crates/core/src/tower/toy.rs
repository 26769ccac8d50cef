//! A cheap stand-in tower with cyclic `G_n = ℤ/s_n`, used to run the
//! D-pipeline across many levels. Generators act by shifts determined by their
//! first four bits, so the group is abelian and requirement (B) fails.

use super::{Tower, TowerError, TowerKind};
use crate::words::{GeneratorCode, Letter, Sign, Word};
use crate::Nat;
use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Number of leading bits a toy generator's shift depends on.
pub const TOY_CODE_BITS: usize = 4;
const DIGEST_BASE: u32 = 7;

pub const DEFAULT_TOY_LEVELS: usize = 20;

pub struct ToyTower {
    sizes: Vec<Nat>,
    starts: Vec<Nat>,
}

fn classes(n: usize) -> usize {
    1 << n.min(TOY_CODE_BITS)
}

/// Smallest size at which every digest difference decodes uniquely.
fn min_size(n: usize) -> Nat {
    Nat::from(DIGEST_BASE).pow(classes(n) as u32) * 2u32 + 1u32
}

impl ToyTower {
    /// Levels `0..=max_level` with the default sizes.
    pub fn new(max_level: usize) -> Result<Self, TowerError> {
        let mut sizes = vec![Nat::from(2u32)];
        let mut m = Nat::from(2u32);
        for n in 1..=max_level {
            let grow = &m * 2u32 + (Nat::from(1u32) << (n + 2));
            let s = grow.max(min_size(n));
            m += &s;
            sizes.push(s);
        }
        Self::with_sizes(sizes)
    }

    /// Explicit interval sizes `s_0, s_1, …`, validated against (A).
    pub fn with_sizes(sizes: Vec<Nat>) -> Result<Self, TowerError> {
        if sizes.is_empty() {
            return Err(TowerError::BadConfig("toy tower needs at least one level".into()));
        }
        let mut starts = Vec::with_capacity(sizes.len());
        let mut m = Nat::zero();
        for (n, s) in sizes.iter().enumerate() {
            if !(&m + 1u32 < *s) {
                return Err(TowerError::RequirementAViolated(n));
            }
            if n > 0 && *s < min_size(n) {
                return Err(TowerError::BadConfig(format!("toy level {n} needs size at least {}", min_size(n))));
            }
            starts.push(m.clone());
            m += s;
        }
        Ok(Self { sizes, starts })
    }

    pub fn sizes(&self) -> &[Nat] {
        &self.sizes
    }

    fn class_of(n: usize, code: &GeneratorCode) -> u32 {
        GeneratorCode::new(code.bits()[..n.min(TOY_CODE_BITS)].to_vec()).value() as u32
    }

    /// The shift `Σ ±7^class` of a level-`n` word.
    pub fn digest(n: usize, w: &Word) -> BigInt {
        let mut d = BigInt::zero();
        for l in w.letters() {
            let v = BigInt::from(DIGEST_BASE).pow(Self::class_of(n, &l.gen));
            match l.sign {
                Sign::Pos => d += v,
                Sign::Neg => d -= v,
            }
        }
        d
    }

    /// The canonical word with a given shift: letters sorted by class, codes
    /// padded with zeros, at most three copies per class.
    fn canonical(n: usize, shift: &BigInt) -> Option<Word> {
        let mut rest = shift.clone();
        let base = BigInt::from(DIGEST_BASE);
        let mut letters = Vec::new();
        for v in 0..classes(n) {
            let (q, mut r) = rest.div_mod_floor(&base);
            let mut q = q;
            if r > BigInt::from(3) {
                r -= &base;
                q += 1;
            }
            rest = q;
            let e: i64 = r.try_into().expect("balanced digit");
            let sign = if e > 0 { Sign::Pos } else { Sign::Neg };
            let mut bits = GeneratorCode::from_value(n.min(TOY_CODE_BITS), v as u64).bits().to_vec();
            bits.resize(n, false);
            for _ in 0..e.unsigned_abs() {
                letters.push(Letter::new(GeneratorCode::new(bits.clone()), sign));
            }
        }
        if !rest.is_zero() || letters.len() > n {
            return None;
        }
        Some(Word::reduce(n, letters).expect("letters share one level"))
    }
}

fn to_nat(x: BigInt) -> Nat {
    x.to_biguint().expect("non-negative")
}

impl Tower for ToyTower {
    fn kind(&self) -> TowerKind {
        TowerKind::Toy
    }

    fn num_levels(&self) -> usize {
        self.sizes.len()
    }

    fn start(&self, n: usize) -> &Nat {
        &self.starts[n]
    }

    fn size(&self, n: usize) -> &Nat {
        &self.sizes[n]
    }

    fn act(&self, n: usize, w: &Word, off: &Nat) -> Result<Nat, TowerError> {
        if w.is_empty() || n == 0 {
            return Ok(off.clone());
        }
        if w.level() != n {
            return Err(TowerError::WrongLevel { want: n, have: w.level() });
        }
        let s = BigInt::from_biguint(BigSign::Plus, self.sizes[n].clone());
        let x = BigInt::from_biguint(BigSign::Plus, off.clone()) + Self::digest(n, w);
        Ok(to_nat(x.mod_floor(&s)))
    }

    fn diffword(&self, n: usize, off: &Nat, off2: &Nat) -> Result<Option<Word>, TowerError> {
        if off == off2 {
            return Ok(Some(Word::empty(n)));
        }
        if n == 0 {
            return Ok(None);
        }
        let s = BigInt::from_biguint(BigSign::Plus, self.sizes[n].clone());
        let mut d = (BigInt::from_biguint(BigSign::Plus, off2.clone())
            - BigInt::from_biguint(BigSign::Plus, off.clone()))
        .mod_floor(&s);
        if &d * 2 > s {
            d -= &s;
        }
        debug_assert!(d.abs() <= s);
        Ok(Self::canonical(n, &d))
    }

    fn code_resolution(&self, n: usize) -> usize {
        n.min(TOY_CODE_BITS)
    }
}
