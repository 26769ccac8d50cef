//! Partial injections and the surgery `g ⊔_D f`, which grafts `f↾D` onto a
//! permutation `g`.

use crate::map::{Eval, MapRef, OutOfWindow, PointMap, WindowPerm};
use crate::{Nat, TriBool};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("{0} -> {1} breaks injectivity")]
    NotInjective(String, String),
    #[error("site is not spaced for (g, f)")]
    NotSpaced,
    #[error("spacing undetermined: {0}")]
    SpacingUnknown(String),
    #[error("surgery needs g, f different from the identity")]
    IdentityInput,
    #[error("site point {0} is outside dom(f)")]
    OutsideDomain(String),
    #[error(transparent)]
    Window(#[from] OutOfWindow),
}

/// A finite partial injection of ℕ.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PartialInjection {
    fwd: BTreeMap<Nat, Nat>,
    bwd: BTreeMap<Nat, Nat>,
}

impl PartialInjection {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<A: Into<Nat>, B: Into<Nat>>(
        pairs: impl IntoIterator<Item = (A, B)>,
    ) -> Result<Self, SurgeryError> {
        let mut f = Self::new();
        for (a, b) in pairs {
            f.insert(a.into(), b.into())?;
        }
        Ok(f)
    }

    /// Adds `a ↦ b`; re-adding an existing pair is a no-op.
    pub fn insert(&mut self, a: Nat, b: Nat) -> Result<(), SurgeryError> {
        match (self.fwd.get(&a), self.bwd.get(&b)) {
            (Some(x), _) if *x == b => return Ok(()),
            (None, None) => {}
            _ => return Err(SurgeryError::NotInjective(a.to_string(), b.to_string())),
        }
        self.fwd.insert(a.clone(), b.clone());
        self.bwd.insert(b, a);
        Ok(())
    }

    pub fn get(&self, a: &Nat) -> Option<&Nat> {
        self.fwd.get(a)
    }

    pub fn get_inverse(&self, b: &Nat) -> Option<&Nat> {
        self.bwd.get(b)
    }

    pub fn contains(&self, a: &Nat) -> bool {
        self.fwd.contains_key(a)
    }

    pub fn in_range(&self, b: &Nat) -> bool {
        self.bwd.contains_key(b)
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Nat, &Nat)> {
        self.fwd.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Nat> {
        self.fwd.keys()
    }

    pub fn range(&self) -> impl Iterator<Item = &Nat> {
        self.bwd.keys()
    }

    /// `f↾D`; fails if `D ⊄ dom(f)`.
    pub fn restrict_from(f: &dyn PointMap, d: &[Nat]) -> Result<Self, SurgeryError> {
        let mut out = Self::new();
        for m in d {
            let y = f.apply(m)?.ok_or_else(|| SurgeryError::OutsideDomain(m.to_string()))?;
            out.insert(m.clone(), y)?;
        }
        Ok(out)
    }
}

impl PointMap for PartialInjection {
    fn apply(&self, m: &Nat) -> Eval {
        Ok(self.fwd.get(m).cloned())
    }

    fn preimage(&self, m: &Nat) -> Eval {
        Ok(self.bwd.get(m).cloned())
    }

    fn describe(&self) -> String {
        format!("{{{self}}}")
    }
}

impl fmt::Display for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, b)) in self.fwd.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialInjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialInjection({self})")
    }
}

impl Serialize for PartialInjection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (a, b) in &self.fwd {
            seq.serialize_element(&[a.to_string(), b.to_string()])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for PartialInjection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<[String; 2]>::deserialize(d)?;
        let parse = |s: &str| Nat::parse_bytes(s.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom("bad natural"));
        let mut f = PartialInjection::new();
        for [a, b] in raw {
            f.insert(parse(&a)?, parse(&b)?).map_err(serde::de::Error::custom)?;
        }
        Ok(f)
    }
}

/// The four maps `f, g⁻¹∘f, f⁻¹∘g⁻¹∘f, f⁻¹∘g∘f` at `m`, skipping undefined ones.
pub fn h_values(g: &dyn PointMap, f: &dyn PointMap, m: &Nat) -> Result<Vec<Nat>, OutOfWindow> {
    let mut out = Vec::with_capacity(4);
    let Some(fm) = f.apply(m)? else { return Ok(out) };
    out.push(fm.clone());
    if let Some(a) = g.preimage(&fm)? {
        out.push(a.clone());
        if let Some(b) = f.preimage(&a)? {
            out.push(b);
        }
    }
    if let Some(a) = g.apply(&fm)? {
        if let Some(b) = f.preimage(&a)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Whether `D` is `(g, f)`-spaced.
pub fn spaced(g: &dyn PointMap, d: &[Nat], f: &dyn PointMap) -> TriBool {
    let set: BTreeSet<&Nat> = d.iter().collect();
    let mut verdict = TriBool::True;
    for m in d {
        match f.apply(m) {
            Ok(Some(_)) => {}
            Ok(None) => return TriBool::False,
            Err(e) => {
                verdict = verdict.and(TriBool::unknown(e.0));
                continue;
            }
        }
        match h_values(g, f, m) {
            Ok(hs) if hs.iter().any(|h| set.contains(h)) => return TriBool::False,
            Ok(_) => {}
            Err(e) => verdict = verdict.and(TriBool::unknown(e.0)),
        }
    }
    verdict
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// outside the surgery set
    C,
    D,
    /// `f[D]`
    FD,
    /// `(g⁻¹∘f)[D]`
    GinvFD,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::C => "C",
            Case::D => "D",
            Case::FD => "f[D]",
            Case::GinvFD => "(g^-1 o f)[D]",
        })
    }
}

/// `g ⊔_D f`, holding `f↾D` explicitly.
pub struct Grafted {
    g: MapRef,
    site: PartialInjection,
}

impl Grafted {
    pub fn g(&self) -> &MapRef {
        &self.g
    }

    pub fn site(&self) -> &PartialInjection {
        &self.site
    }

    pub fn classify(&self, m: &Nat) -> Result<Case, OutOfWindow> {
        if self.site.contains(m) {
            return Ok(Case::D);
        }
        if self.site.in_range(m) {
            return Ok(Case::FD);
        }
        let gm = self.g.total(m)?;
        Ok(if self.site.in_range(&gm) { Case::GinvFD } else { Case::C })
    }
}

impl PointMap for Grafted {
    fn apply(&self, m: &Nat) -> Eval {
        if let Some(y) = self.site.get(m) {
            // the agreement clause; spacing rules it out, but the formula keeps it
            let gm = self.g.total(m)?;
            return Ok(Some(if gm == *y { gm } else { y.clone() }));
        }
        if let Some(a) = self.site.get_inverse(m) {
            return self.g.apply(a);
        }
        let gm = self.g.total(m)?;
        if self.site.in_range(&gm) {
            return self.g.apply(&gm);
        }
        Ok(Some(gm))
    }

    /// The case analysis of the surjectivity argument, with `m' = g⁻¹(m)`.
    fn preimage(&self, m: &Nat) -> Eval {
        let mp = self.g.total_preimage(m)?;
        if let Some(y) = self.site.get(&mp) {
            return Ok(Some(y.clone()));
        }
        if self.site.in_range(&mp) {
            return self.g.preimage(&mp);
        }
        if let Some(a) = self.site.get_inverse(m) {
            return Ok(Some(a.clone()));
        }
        Ok(Some(mp))
    }

    fn describe(&self) -> String {
        format!("{} graft {}", self.g.describe(), self.site.describe())
    }
}

/// `g ⊔_D f` for `(g, D, f)` in the domain of surgery.
pub fn surgery(g: MapRef, d: &[Nat], f: &dyn PointMap) -> Result<Grafted, SurgeryError> {
    if g.is_identity() || f.is_identity() {
        return Err(SurgeryError::IdentityInput);
    }
    match spaced(g.as_ref(), d, f) {
        TriBool::True => {}
        TriBool::False => return Err(SurgeryError::NotSpaced),
        TriBool::Unknown(r) => return Err(SurgeryError::SpacingUnknown(r)),
    }
    Ok(Grafted { site: PartialInjection::restrict_from(f, d)?, g })
}

/// The four-case map without the spacing check. Only a permutation when `D`
/// happens to be spaced.
pub fn graft_unchecked(g: MapRef, d: &[Nat], f: &dyn PointMap) -> Result<Grafted, SurgeryError> {
    Ok(Grafted { site: PartialInjection::restrict_from(f, d)?, g })
}

/// `D† = f[D] ∪ (g⁻¹∘f)[D]`, sorted.
pub fn d_dagger(g: &dyn PointMap, d: &[Nat], f: &dyn PointMap) -> Result<Vec<Nat>, SurgeryError> {
    let mut out = BTreeSet::new();
    for m in d {
        let fm = f.apply(m)?.ok_or_else(|| SurgeryError::OutsideDomain(m.to_string()))?;
        out.insert(g.total_preimage(&fm)?);
        out.insert(fm);
    }
    Ok(out.into_iter().collect())
}

/// `E = D ∪ D†`, sorted.
pub fn e_set(g: &dyn PointMap, d: &[Nat], f: &dyn PointMap) -> Result<Vec<Nat>, SurgeryError> {
    let mut out: BTreeSet<Nat> = d_dagger(g, d, f)?.into_iter().collect();
    out.extend(d.iter().cloned());
    Ok(out.into_iter().collect())
}

/// A random single cycle `g` on `[0, len)`, a random partial injection `f` on
/// it, and a site of at most `max_site` points grown by rejection: a point
/// of `dom f` is kept only if the site stays `(g, f)`-spaced.
pub fn random_spaced_triple<R: Rng>(
    rng: &mut R,
    len: u64,
    max_site: usize,
) -> (WindowPerm, PartialInjection, Vec<Nat>) {
    let mut order: Vec<u64> = (0..len).collect();
    order.shuffle(rng);
    let mut images = vec![0u64; len as usize];
    for k in 0..len as usize {
        images[order[k] as usize] = order[(k + 1) % len as usize];
    }
    let g = WindowPerm::new(images).expect("a cycle is a permutation");
    let mut f = PartialInjection::new();
    let mut targets: Vec<u64> = (0..len).collect();
    targets.shuffle(rng);
    for (a, b) in (0..len).zip(targets).take(rng.gen_range(1..=(len as usize / 2).max(1))) {
        f.insert(Nat::from(order[a as usize]), Nat::from(b)).expect("distinct targets");
    }
    let mut d: Vec<Nat> = Vec::new();
    for m in f.domain().cloned().collect::<Vec<_>>() {
        d.push(m);
        if !spaced(&g, &d, &f).is_true() {
            d.pop();
        }
        if d.len() >= max_site {
            break;
        }
    }
    (g, f, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn n(x: u64) -> Nat {
        Nat::from(x)
    }

    fn ns(xs: &[u64]) -> Vec<Nat> {
        xs.iter().map(|&x| n(x)).collect()
    }

    fn rot10() -> MapRef {
        Arc::new(WindowPerm::rotation(10, 1))
    }

    #[test]
    fn spaced_examples() {
        let g = rot10();
        let f = PartialInjection::from_pairs([(2u32, 7u32)]).unwrap();
        assert_eq!(spaced(g.as_ref(), &[], &f), TriBool::True);
        assert_eq!(spaced(g.as_ref(), &ns(&[2]), &f), TriBool::True);
        let fixed = PartialInjection::from_pairs([(2u32, 2u32)]).unwrap();
        assert_eq!(spaced(g.as_ref(), &ns(&[2]), &fixed), TriBool::False);
        assert_eq!(spaced(g.as_ref(), &ns(&[3]), &f), TriBool::False);
    }

    #[test]
    fn surgery_example() {
        let f = PartialInjection::from_pairs([(2u32, 7u32)]).unwrap();
        let r = surgery(rot10(), &ns(&[2]), &f).unwrap();
        let images: Vec<u64> = (0..10).map(|m| crate::bignum::to_u64(&r.total(&n(m)).unwrap()).unwrap()).collect();
        assert_eq!(images, vec![1, 2, 7, 4, 5, 6, 8, 3, 9, 0]);
        for m in 0..10 {
            assert_eq!(r.total_preimage(&n(images[m as usize])).unwrap(), n(m));
        }
        assert_eq!(d_dagger(rot10().as_ref(), &ns(&[2]), &f).unwrap(), ns(&[6, 7]));
        assert_eq!(e_set(rot10().as_ref(), &ns(&[2]), &f).unwrap(), ns(&[2, 6, 7]));
        assert_eq!(r.classify(&n(6)).unwrap(), Case::GinvFD);
        assert_eq!(r.classify(&n(7)).unwrap(), Case::FD);
    }

    #[test]
    fn empty_site_is_g() {
        let f = PartialInjection::from_pairs([(2u32, 7u32)]).unwrap();
        let r = surgery(rot10(), &[], &f).unwrap();
        for m in 0..10 {
            assert_eq!(r.total(&n(m)).unwrap(), n((m + 1) % 10));
        }
        let none: Vec<Nat> = vec![];
        assert!(d_dagger(rot10().as_ref(), &none, &f).unwrap().is_empty());
    }

    #[test]
    fn agreement_clause() {
        // f(2) = g(2): the site is not spaced, but the formula still returns g(2)
        let f = PartialInjection::from_pairs([(2u32, 3u32)]).unwrap();
        assert!(matches!(surgery(rot10(), &ns(&[2]), &f), Err(SurgeryError::NotSpaced)));
        let r = graft_unchecked(rot10(), &ns(&[2]), &f).unwrap();
        assert_eq!(r.total(&n(2)).unwrap(), n(3));
        assert_eq!(d_dagger(rot10().as_ref(), &ns(&[2]), &f).unwrap(), ns(&[2, 3]));
    }

    #[test]
    fn fixed_points_can_move_when_g_has_short_cycles() {
        // g = (0 1) on [0, 4): the site {2} with f(2) = 0 is spaced, yet the
        // result fixes 1 and no longer fixes 2
        let g: MapRef = Arc::new(WindowPerm::new(vec![1, 0, 2, 3]).unwrap());
        let f = PartialInjection::from_pairs([(2u32, 0u32)]).unwrap();
        let r = surgery(g.clone(), &ns(&[2]), &f).unwrap();
        let fixed = |p: &dyn PointMap| -> Vec<u64> { (0..4).filter(|&m| p.total(&n(m)).unwrap() == n(m)).collect() };
        assert_eq!(fixed(g.as_ref()), vec![2, 3]);
        assert_eq!(fixed(&r), vec![1, 3]);
    }

    #[test]
    fn partial_injection_rejects_collisions() {
        let mut f = PartialInjection::new();
        f.insert(n(1), n(2)).unwrap();
        f.insert(n(1), n(2)).unwrap();
        assert!(f.insert(n(3), n(2)).is_err());
        assert!(f.insert(n(1), n(4)).is_err());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"[["1","2"]]"#);
        assert_eq!(serde_json::from_str::<PartialInjection>(&json).unwrap(), f);
    }

    fn random_triple(seed: u64, len: u64) -> (WindowPerm, PartialInjection, Vec<Nat>) {
        random_spaced_triple(&mut ChaCha8Rng::seed_from_u64(seed), len, 12)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn surgery_is_a_permutation_with_the_same_fixed_points(seed in any::<u64>()) {
            let len = 200;
            let (g, f, d) = random_triple(seed, len);
            let g: MapRef = Arc::new(g);
            let r = surgery(g.clone(), &d, &f).unwrap();
            let mut seen = vec![false; len as usize];
            for m in 0..len {
                let y = crate::bignum::to_u64(&r.total(&n(m)).unwrap()).unwrap();
                prop_assert!(!seen[y as usize]);
                seen[y as usize] = true;
                prop_assert_eq!(y == m, g.total(&n(m)).unwrap() == n(m));
                prop_assert_eq!(r.total_preimage(&n(y)).unwrap(), n(m));
            }
            for m in &d {
                prop_assert_eq!(r.total(m).unwrap(), f.get(m).unwrap().clone());
            }
            let e: BTreeSet<Nat> = e_set(g.as_ref(), &d, &f).unwrap().into_iter().collect();
            for m in 0..len {
                if !e.contains(&n(m)) {
                    prop_assert_eq!(r.total(&n(m)).unwrap(), g.total(&n(m)).unwrap());
                }
            }
        }

        #[test]
        fn changing_f_off_the_site_changes_nothing(seed in any::<u64>()) {
            let len = 100;
            let (g, f, d) = random_triple(seed, len);
            let g: MapRef = Arc::new(g);
            let r = surgery(g.clone(), &d, &f).unwrap();
            let used: BTreeSet<Nat> = d.iter().cloned().chain(d.iter().map(|m| f.get(m).unwrap().clone())).collect();
            let mut f2 = PartialInjection::new();
            for (a, b) in f.pairs() {
                if used.contains(a) {
                    f2.insert(a.clone(), b.clone()).unwrap();
                }
            }
            let r2 = graft_unchecked(g, &d, &f2).unwrap();
            for m in 0..len {
                prop_assert_eq!(r.total(&n(m)).unwrap(), r2.total(&n(m)).unwrap());
            }
        }
    }
}
