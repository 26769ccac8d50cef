//! The orders used to thin transmutation sites, and the predicate 𝒯.

use crate::coding::unhash_seq;
use crate::map::PointMap;
use crate::tower::{interval_of, Tower, TowerError};
use crate::words::Word;
use crate::{Nat, TriBool};

/// A binary relation on points, evaluated under a window.
pub type Relation<'a> = dyn Fn(&Nat, &Nat) -> TriBool + 'a;

/// `m ⊴ m'`: the `#`-preimages of the two level indices are strictly nested.
pub fn order_interval(t: &dyn Tower, m: &Nat, m2: &Nat) -> TriBool {
    let (n, n2) = match (interval_of(t, m), interval_of(t, m2)) {
        (Ok((n, _)), Ok((n2, _))) => (n, n2),
        (Err(e), _) | (_, Err(e)) => return TriBool::unknown(e.to_string()),
    };
    let s = unhash_seq(&Nat::from(n));
    let s2 = unhash_seq(&Nat::from(n2));
    s.is_proper_prefix_of(&s2).into()
}

/// `w(m, h(m))`, or `None` when `h(m)` is undefined, lies on another level, or
/// is not reached by any word of `W_n`.
pub fn point_word(t: &dyn Tower, h: &dyn PointMap, m: &Nat) -> Result<Option<(usize, Word)>, String> {
    let (n, off) = interval_of(t, m).map_err(|e| e.to_string())?;
    let Some(hm) = h.apply(m).map_err(|e| e.0)? else { return Ok(None) };
    let (n2, off2) = match interval_of(t, &hm) {
        Ok(x) => x,
        Err(TowerError::PointBeyondBuiltLevels(_)) => return Ok(None),
        Err(e) => return Err(e.to_string()),
    };
    if n != n2 {
        return Ok(None);
    }
    Ok(t.diffword(n, &off, &off2).map_err(|e| e.to_string())?.map(|w| (n, w)))
}

/// `m0 ⊴_h m1`: `m0 < m1`, both diffwords exist, and the deeper one restricts
/// to the shallower.
pub fn order_h(t: &dyn Tower, h: &dyn PointMap, m0: &Nat, m1: &Nat) -> TriBool {
    if m0 >= m1 {
        return TriBool::False;
    }
    let w0 = match point_word(t, h, m0) {
        Ok(Some(w)) => w,
        Ok(None) => return TriBool::False,
        Err(e) => return TriBool::unknown(e),
    };
    let w1 = match point_word(t, h, m1) {
        Ok(Some(w)) => w,
        Ok(None) => return TriBool::False,
        Err(e) => return TriBool::unknown(e),
    };
    if w1.0 < w0.0 {
        return TriBool::False;
    }
    match w1.1.restrict(w0.0) {
        Ok(r) => (r == w0.1).into(),
        Err(e) => TriBool::unknown(e.to_string()),
    }
}

/// 𝒯 on a finite window `d` (sorted ascending):
/// `(∀n ∈ d)(∃n' > n)(∀n'' > n') n' ≺ n''`, with `n` stopping short of the
/// last two elements so that the inner quantifier is never vacuous.
pub fn tangled(d: &[Nat], ord: &Relation) -> TriBool {
    let k = d.len();
    if k < 3 {
        return TriBool::unknown(format!("window of {k} points is too short to decide tangledness"));
    }
    let mut all = TriBool::True;
    for i in 0..k - 2 {
        let mut some = TriBool::False;
        for j in i + 1..k - 1 {
            let mut every = TriBool::True;
            for l in j + 1..k {
                every = every.and(ord(&d[j], &d[l]));
                if every.is_false() {
                    break;
                }
            }
            some = some.or(every);
            if some.is_true() {
                break;
            }
        }
        all = all.and(some);
        if all.is_false() {
            break;
        }
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::PhiMap;
    use crate::tower::{PaperTower, TowerRef};
    use std::sync::Arc;

    fn ns(xs: &[u64]) -> Vec<Nat> {
        xs.iter().map(|&x| Nat::from(x)).collect()
    }

    #[test]
    fn interval_order_examples() {
        let t = PaperTower::build(3).unwrap();
        let (a, b, c) = (Nat::from(1u32), Nat::from(5u32), Nat::from(200u32));
        assert_eq!(order_interval(&t, &a, &b), TriBool::True);
        assert_eq!(order_interval(&t, &b, &c), TriBool::False);
        assert_eq!(order_interval(&t, &b, &Nat::from(6u32)), TriBool::False);
        assert!(order_interval(&t, &b, &t.end()).is_unknown());
    }

    #[test]
    fn h_order_examples() {
        let t: TowerRef = Arc::new(PaperTower::build(3).unwrap());
        let h = PhiMap::new(t.clone(), "+010·-111".parse().unwrap());
        let (m0, m1) = (Nat::from(122u32), Nat::from(4000u32));
        assert_eq!(order_h(t.as_ref(), &h, &m0, &m1), TriBool::True);
        // +0·-1 is not a word of W_1, so level-1 points carry no diffword
        assert_eq!(order_h(t.as_ref(), &h, &Nat::from(7u32), &m1), TriBool::False);
        assert_eq!(order_h(t.as_ref(), &h, &m0, &m0), TriBool::False);
        assert_eq!(order_h(t.as_ref(), &h, &m1, &m0), TriBool::False);
        // a map dropping m1 to a lower level has no diffword there
        let low = crate::surgery::PartialInjection::from_pairs([(122u32, 130u32), (4000, 3)]).unwrap();
        assert_eq!(order_h(t.as_ref(), &low, &m0, &m1), TriBool::False);
    }

    fn brute_tangled(d: &[Nat], ord: &dyn Fn(usize, usize) -> bool) -> bool {
        let k = d.len();
        (0..k - 2).all(|i| (i + 1..k - 1).any(|j| (j + 1..k).all(|l| ord(j, l))))
    }

    #[test]
    fn tangled_examples() {
        let d = ns(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(tangled(&d, &|a, b| (a < b).into()), TriBool::True);
        assert_eq!(tangled(&d, &|_, _| TriBool::False), TriBool::False);
        assert!(tangled(&d[..2], &|a, b| (a < b).into()).is_unknown());
        // even points related to everything above them, odd points to nothing
        let alt = |a: &Nat, b: &Nat| (a < b && !a.bit(0)).into();
        let direct = brute_tangled(&d, &|j, l| j < l && j % 2 == 0);
        assert_eq!(tangled(&d, &alt), TriBool::from(direct));
        assert!(direct);
        let alt2 = |a: &Nat, b: &Nat| (a < b && (a.bit(0) || *b == Nat::from(5u32))).into();
        let direct2 = brute_tangled(&d, &|j, l| j < l && (j % 2 == 1 || l == 5));
        assert_eq!(tangled(&d, &alt2), TriBool::from(direct2));
    }
}
