//! The first stages of the site construction: `D_0`, `D_1`, the spacing test
//! and `D_2`, plus the catching predicate λ.

use super::orders::order_h;
use crate::coding::{chi_bit, hash_seq, BitPrefix, CodingError};
use crate::map::{OutOfWindow, PointMap};
use crate::surgery::spaced;
use crate::tower::Tower;
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};

/// A point admitted to a stage, with the rule that admitted it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elem {
    #[serde(with = "crate::bignum::dec")]
    pub point: Nat,
    pub level: usize,
    pub rule: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub elements: Vec<Elem>,
    /// skipped candidates and evaluation failures, in scan order
    pub notes: Vec<String>,
}

impl Stage {
    pub fn points(&self) -> Vec<Nat> {
        self.elements.iter().map(|e| e.point.clone()).collect()
    }
}

/// The first `budget` values `#(χ(f)↾k)`. Stops early, returning the error,
/// where a `χ` bit is not determined by `f`.
pub fn d0(f: &dyn PointMap, budget: usize) -> (Vec<Nat>, Option<CodingError>) {
    let mut out = Vec::with_capacity(budget);
    let mut prefix = BitPrefix::default();
    for k in 0..budget {
        if k > 0 {
            match chi_bit(f, (k - 1) as u64) {
                Ok(b) => prefix.push(b),
                Err(e) => return (out, Some(e)),
            }
        }
        out.push(hash_seq(&prefix));
    }
    (out, None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum D1Entry {
    Point {
        #[serde(with = "crate::bignum::dec")]
        index: Nat,
        elem: Elem,
        /// the point is `m_{n+1}` itself, i.e. it sits in `I_{n+1}`
        boundary: bool,
    },
    Unknown {
        #[serde(with = "crate::bignum::dec")]
        index: Nat,
        reason: String,
    },
    /// the exclusions used up the whole interval
    Violation {
        #[serde(with = "crate::bignum::dec")]
        index: Nat,
        reason: String,
    },
}

impl D1Entry {
    pub fn elem(&self) -> Option<&Elem> {
        match self {
            D1Entry::Point { elem, .. } => Some(elem),
            _ => None,
        }
    }
}

pub fn d1_points(entries: &[D1Entry]) -> Vec<Nat> {
    entries.iter().filter_map(|e| e.elem().map(|x| x.point.clone())).collect()
}

/// For each `n` in `d0`, the least point of `(m_n, m_{n+1}]` whose `f`-image
/// is not `≤ m_n`. Points where `f` is undefined are not excluded.
pub fn d1(t: &dyn Tower, f: &dyn PointMap, d0: &[Nat], scan: u64) -> Vec<D1Entry> {
    let mut out = Vec::with_capacity(d0.len());
    for idx in d0 {
        let n = match crate::bignum::to_u64(idx) {
            Some(n) if (n as usize) + 1 < t.num_levels() => n as usize,
            _ => {
                out.push(D1Entry::Unknown { index: idx.clone(), reason: format!("level {idx} + 1 is not built") });
                continue;
            }
        };
        let (mn, hi) = (t.start(n).clone(), t.start(n + 1).clone());
        let mut c = &mn + 1u32;
        let mut excluded = 0u64;
        let entry = loop {
            if c > hi {
                break D1Entry::Violation {
                    index: idx.clone(),
                    reason: format!("(m_{n}, m_{}] exhausted after {excluded} exclusions", n + 1),
                };
            }
            if excluded >= scan {
                break D1Entry::Unknown { index: idx.clone(), reason: format!("scan budget {scan} exhausted") };
            }
            match f.apply(&c) {
                Ok(Some(v)) if v <= mn => excluded += 1,
                Ok(v) => {
                    let boundary = c == hi;
                    let rule = match v {
                        Some(_) => format!("least of (m_{n}, m_{}] after {excluded} exclusions", n + 1),
                        None => format!("least of (m_{n}, m_{}] after {excluded} exclusions; f undefined", n + 1),
                    };
                    let level = if boundary { n + 1 } else { n };
                    break D1Entry::Point { index: idx.clone(), elem: Elem { point: c, level, rule }, boundary };
                }
                Err(e) => break D1Entry::Unknown { index: idx.clone(), reason: e.0 },
            }
            c += 1u32;
        };
        out.push(entry);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpacingVerdict {
    /// `True` means no witness in the window, which is all a finite search can say
    pub verdict: TriBool,
    #[serde(with = "crate::bignum::dec_vec")]
    pub witnesses: Vec<Nat>,
    pub checked: usize,
}

/// Whether `{m ∈ D_1 : f(m) ≠ m ∧ f(m) ≠ g(m)}` looks finite, with `g = ξ(f)`.
pub fn spacing_works(f: &dyn PointMap, g: &dyn PointMap, d1: &[Nat], threshold: usize) -> SpacingVerdict {
    let mut witnesses = Vec::new();
    let mut checked = 0;
    let mut failure = None;
    for m in d1 {
        let fm = match f.apply(m) {
            Ok(Some(v)) => v,
            Ok(None) => continue,
            Err(e) => {
                failure.get_or_insert(e.0);
                continue;
            }
        };
        match g.apply(m) {
            Ok(gm) => {
                checked += 1;
                if fm != *m && gm.as_ref() != Some(&fm) {
                    witnesses.push(m.clone());
                }
            }
            Err(e) => {
                failure.get_or_insert(e.0);
            }
        }
    }
    let verdict = if witnesses.len() >= threshold.max(1) {
        TriBool::False
    } else if checked == 0 {
        TriBool::unknown(failure.unwrap_or_else(|| "no D_1 point with a computable image".into()))
    } else if witnesses.is_empty() {
        TriBool::True
    } else {
        TriBool::unknown(format!("{} witness(es), below the threshold {threshold}", witnesses.len()))
    };
    SpacingVerdict { verdict, witnesses, checked }
}

fn ap(h: &dyn PointMap, x: Option<Nat>) -> Result<Option<Nat>, OutOfWindow> {
    x.map_or(Ok(None), |x| h.apply(&x))
}

fn pre(h: &dyn PointMap, x: Option<Nat>) -> Result<Option<Nat>, OutOfWindow> {
    x.map_or(Ok(None), |x| h.preimage(&x))
}

/// The values at `m` of `f, g⁻¹f, f⁻¹g⁻¹f, f⁻¹gf` and of their inverses
/// `f⁻¹, f⁻¹g` (the other two inverses are already in the list).
pub fn h_family(g: &dyn PointMap, f: &dyn PointMap, m: &Nat) -> Result<[Option<Nat>; 6], OutOfWindow> {
    let fm = f.apply(m)?;
    let ginv_fm = pre(g, fm.clone())?;
    let a = pre(f, ginv_fm.clone())?;
    let b = pre(f, ap(g, fm.clone())?)?;
    let finv = f.preimage(m)?;
    let finv_g = pre(f, g.apply(m)?)?;
    Ok([fm, ginv_fm, a, b, finv, finv_g])
}

/// `D_2`: `D_1` itself if spacing works, else the recursion picking points
/// off `fix(f)` that clear every `H ∪ H⁻¹` value of the points before them.
/// Each output of the recursion is certified by `spaced`.
pub fn d2(
    t: &dyn Tower,
    f: &dyn PointMap,
    g: &dyn PointMap,
    d1: &[Nat],
    spacing: &SpacingVerdict,
    budget: usize,
) -> Stage {
    let mut stage = Stage::default();
    let level = |m: &Nat| crate::tower::level_of(t, m).unwrap_or(usize::MAX);
    if spacing.verdict.is_true() {
        stage.elements = d1
            .iter()
            .take(budget)
            .map(|m| Elem { point: m.clone(), level: level(m), rule: "spacing works: D_2 = D_1".into() })
            .collect();
        return stage;
    }
    let mut bounds: Vec<Nat> = Vec::new();
    let mut chosen: Vec<Nat> = Vec::new();
    for m in d1 {
        if chosen.len() == budget {
            stage.notes.push(format!("budget {budget} reached"));
            break;
        }
        let fm = match f.apply(m) {
            Ok(Some(v)) => v,
            Ok(None) => {
                stage.notes.push(format!("{m}: not in dom f"));
                continue;
            }
            Err(e) => {
                stage.notes.push(format!("{m}: unknown, {}", e.0));
                continue;
            }
        };
        if fm == *m {
            stage.notes.push(format!("{m}: fixed by f"));
            continue;
        }
        let checks = (g.apply(m), g.apply(&fm));
        match checks {
            (Ok(Some(gm)), _) if gm == fm => {
                stage.notes.push(format!("{m}: f(m) = xi(f)(m)"));
                continue;
            }
            (_, Ok(Some(gf))) if gf == fm => {
                stage.notes.push(format!("{m}: f(m) is a fixed point of xi(f)"));
                continue;
            }
            (Err(e), _) | (_, Err(e)) => {
                stage.notes.push(format!("{m}: unknown, {}", e.0));
                continue;
            }
            _ => {}
        }
        if let Some(b) = bounds.iter().find(|b| *m <= **b) {
            stage.notes.push(format!("{m}: not above {b}, an H-value of an earlier point"));
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(m.clone());
        match spaced(g, &trial, f) {
            TriBool::True => {}
            TriBool::False => {
                stage.notes.push(format!("{m}: breaks spacing"));
                continue;
            }
            TriBool::Unknown(r) => {
                stage.notes.push(format!("{m}: spacing unknown, {r}"));
                continue;
            }
        }
        match h_family(g, f, m) {
            Ok(vals) => bounds.extend(vals.into_iter().flatten()),
            Err(e) => {
                stage.notes.push(format!("{m}: unknown, {}", e.0));
                continue;
            }
        }
        stage.elements.push(Elem {
            point: m.clone(),
            level: level(m),
            rule: format!("point {} of the recursion: off fix(f), clear of earlier H-values", chosen.len()),
        });
        chosen.push(m.clone());
    }
    stage
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lambda {
    pub verdict: TriBool,
    /// fewer than two points: the verdict carries no information
    pub underdetermined: bool,
}

/// `λ(D, f)`: every pair of the window is `⊴_f`-related.
pub fn lambda_check(t: &dyn Tower, d: &[Nat], f: &dyn PointMap) -> Lambda {
    if d.len() < 2 {
        return Lambda { verdict: TriBool::True, underdetermined: true };
    }
    let mut sorted = d.to_vec();
    sorted.sort();
    let mut verdict = TriBool::True;
    'outer: for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            verdict = verdict.and(order_h(t, f, a, b));
            if verdict.is_false() {
                break 'outer;
            }
        }
    }
    Lambda { verdict, underdetermined: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::CodeMap;
    use crate::map::PhiMap;
    use crate::surgery::PartialInjection;
    use crate::tower::{PaperTower, TowerRef, ToyTower};
    use std::sync::Arc;

    fn n(x: u64) -> Nat {
        Nat::from(x)
    }

    #[test]
    fn d0_examples() {
        let f = PartialInjection::from_pairs([(0u32, 0u32)]).unwrap();
        assert_eq!(d0(&f, 2).0, vec![n(0), n(2)]);
        let f = PartialInjection::from_pairs([(0u32, 1u32)]).unwrap();
        assert_eq!(d0(&f, 2).0, vec![n(0), n(1)]);
        // bit 1 asks about f(1) = 0, which {0 -> 1} does not settle
        let (v, e) = d0(&f, 3);
        assert_eq!(v.len(), 2);
        assert!(matches!(e, Some(CodingError::InsufficientData { .. })));
        assert!(d0(&f, 5).0.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn d1_examples() {
        let tr: TowerRef = Arc::new(PaperTower::build(3).unwrap());
        let t = tr.as_ref();
        let f = PartialInjection::from_pairs([(0u32, 5u32)]).unwrap();
        let e = d1(t, &f, &[n(0)], 100);
        assert_eq!(e[0].elem().unwrap().point, n(1));
        // f(1) = 0 excludes 1; the only other candidate is m_1 = 2 itself
        let f = PartialInjection::from_pairs([(1u32, 0u32)]).unwrap();
        let e = d1(t, &f, &[n(0)], 100);
        assert!(matches!(&e[0], D1Entry::Point { boundary: true, elem, .. } if elem.point == n(2)));
        // an injection cannot exhaust an interval; a constant map can
        struct Zero;
        impl PointMap for Zero {
            fn apply(&self, _: &Nat) -> crate::map::Eval {
                Ok(Some(Nat::from(0u32)))
            }
            fn preimage(&self, _: &Nat) -> crate::map::Eval {
                Ok(None)
            }
            fn describe(&self) -> String {
                "0".into()
            }
        }
        assert!(matches!(d1(t, &Zero, &[n(0)], 100)[0], D1Entry::Violation { .. }));
        // n = 2 needs no enumeration of I_2
        let f = PhiMap::new(tr.clone(), "+111".parse().unwrap());
        let e = d1(t, &f, &[n(2), n(3)], 100);
        assert_eq!(e[0].elem().unwrap().point, n(123));
        assert!(matches!(e[1], D1Entry::Unknown { .. }));
    }

    fn fresh_toy() -> (TowerRef, PartialInjection) {
        let t: TowerRef = Arc::new(ToyTower::new(8).unwrap());
        // f moves every small point far up, so it disagrees with ξ(f) everywhere
        let mut f = PartialInjection::new();
        for i in 0..6u32 {
            f.insert(n(i as u64), n(6 + i as u64)).unwrap();
        }
        let (m2, m3) = (t.start(2).clone(), t.start(3).clone());
        f.insert(&m2 + 1u32, &m2 + 50u32).unwrap();
        f.insert(&m3 + 1u32, &m3 + 9u32).unwrap();
        (t, f)
    }

    #[test]
    fn spacing_and_d2_on_a_fresh_map() {
        let (t, f) = fresh_toy();
        let g = CodeMap::xi(t.clone(), &f);
        let (z, _) = d0(&f, 3);
        let d1s = d1_points(&d1(t.as_ref(), &f, &z, 1000));
        assert_eq!(d1s.len(), 3);
        let sw = spacing_works(&f, &g, &d1s, 2);
        assert!(sw.verdict.is_false());
        assert_eq!(sw.witnesses.len(), 3);
        let s = d2(t.as_ref(), &f, &g, &d1s, &sw, 8);
        let pts = s.points();
        assert_eq!(pts[0], d1s[0]);
        assert!(pts.len() >= 2);
        assert_eq!(spaced(&g, &pts, &f), TriBool::True);
        // every H ∪ H⁻¹ value of the first point lies below the second, by brute composition
        let fm = f.total(&pts[0]).unwrap();
        let vals = [
            Some(fm.clone()),
            g.preimage(&fm).unwrap(),
            g.preimage(&fm).unwrap().and_then(|x| f.preimage(&x).unwrap()),
            g.apply(&fm).unwrap().and_then(|x| f.preimage(&x).unwrap()),
            f.preimage(&pts[0]).unwrap(),
            g.apply(&pts[0]).unwrap().and_then(|x| f.preimage(&x).unwrap()),
        ];
        for v in vals.into_iter().flatten() {
            assert!(pts[1] > v);
        }
    }

    #[test]
    fn spacing_verdicts() {
        let (t, f) = fresh_toy();
        let g = CodeMap::xi(t.clone(), &f);
        assert!(spacing_works(&f, &g, &[], 2).verdict.is_unknown());
        // on points where f and ξ(f) agree there are no witnesses
        let same = PhiMap::new(t.clone(), crate::coding::code_word(&t, &g.code, 3).unwrap());
        let pts = vec![t.start(3) + 1u32, t.start(3) + 2u32];
        assert_eq!(spacing_works(&same, &g, &pts, 2).verdict, TriBool::True);
        let sw = SpacingVerdict { verdict: TriBool::True, witnesses: vec![], checked: 2 };
        assert_eq!(d2(t.as_ref(), &same, &g, &pts, &sw, 8).points(), pts);
    }

    #[test]
    fn lambda_examples() {
        let t: TowerRef = Arc::new(ToyTower::new(8).unwrap());
        let x = PhiMap::new(t.clone(), "+0110·-1000".parse().unwrap());
        let pts = vec![t.start(2) + 3u32, t.start(3) + 1u32, t.start(4) + 7u32];
        assert_eq!(lambda_check(t.as_ref(), &pts, &x).verdict, TriBool::True);
        let one = lambda_check(t.as_ref(), &pts[..1], &x);
        assert!(one.verdict.is_true() && one.underdetermined);
        let (_, f) = fresh_toy();
        assert!(lambda_check(t.as_ref(), &pts, &f).verdict.is_false());
    }
}
