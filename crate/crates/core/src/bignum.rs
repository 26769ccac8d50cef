//! Arbitrary-precision helpers shared by the tower and the CLI.

use crate::Nat;
use num_traits::{One, Zero};

/// Product of `lo..hi` by binary splitting.
pub fn range_product(lo: u64, hi: u64) -> Nat {
    if hi <= lo {
        return Nat::one();
    }
    if hi - lo <= 16 {
        let mut acc = Nat::one();
        for k in lo..hi {
            acc *= k;
        }
        return acc;
    }
    let mid = lo + (hi - lo) / 2;
    range_product(lo, mid) * range_product(mid, hi)
}

pub fn factorial(n: u64) -> Nat {
    range_product(1, n + 1)
}

/// Divides the little-endian limb vector in place and returns the remainder.
pub(crate) fn div_rem_small(limbs: &mut Vec<u64>, divisor: u64) -> u64 {
    debug_assert!(divisor > 0);
    let mut rem: u128 = 0;
    for limb in limbs.iter_mut().rev() {
        let cur = (rem << 64) | (*limb as u128);
        *limb = (cur / divisor as u128) as u64;
        rem = cur % divisor as u128;
    }
    while limbs.last() == Some(&0) {
        limbs.pop();
    }
    rem as u64
}

/// `limbs = limbs * factor + addend`.
pub(crate) fn mul_add_small(limbs: &mut Vec<u64>, factor: u64, addend: u64) {
    let mut carry = addend as u128;
    for limb in limbs.iter_mut() {
        let cur = (*limb as u128) * (factor as u128) + carry;
        *limb = cur as u64;
        carry = cur >> 64;
    }
    if carry > 0 {
        limbs.push(carry as u64);
    }
}

pub(crate) fn from_limbs(limbs: Vec<u64>) -> Nat {
    if limbs.is_empty() {
        return Nat::zero();
    }
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    Nat::new(digits)
}

pub fn to_u64(n: &Nat) -> Option<u64> {
    let d = n.to_u64_digits();
    match d.len() {
        0 => Some(0),
        1 => Some(d[0]),
        _ => None,
    }
}

/// Serde adapter writing naturals as decimal strings.
pub mod dec {
    use crate::Nat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Nat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nat, D::Error> {
        let s = String::deserialize(d)?;
        Nat::parse_bytes(s.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("bad natural"))
    }
}

/// Serde adapter for sequences of naturals.
pub mod dec_vec {
    use crate::Nat;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ns: &[Nat], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(ns.len()))?;
        for n in ns {
            seq.serialize_element(&n.to_str_radix(10))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Nat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| Nat::parse_bytes(s.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("bad natural")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), Nat::from(1u32));
        assert_eq!(factorial(5), Nat::from(120u32));
        assert_eq!(factorial(20), Nat::from(2432902008176640000u64));
    }

    #[test]
    fn limb_arithmetic_matches_bigint() {
        let n = factorial(40);
        let mut limbs = n.to_u64_digits();
        let r = div_rem_small(&mut limbs, 37);
        assert_eq!(r, 0);
        assert_eq!(from_limbs(limbs.clone()), &n / 37u32);
        mul_add_small(&mut limbs, 37, 5);
        assert_eq!(from_limbs(limbs), &n + 5u32);
    }
}
