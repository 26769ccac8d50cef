//! Windowed checks of conditions (I)–(IV) on a family of computed sites.

use super::{d1_points, D1Entry, PipelineTrace};
use crate::coding::CodeMap;
use crate::map::{MapRef, PointMap};
use crate::surgery::{e_set, spaced};
use crate::tower::{level_of, TowerRef};
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub a: String,
    pub b: String,
    /// length of the common part of the two `D_0` windows
    pub common_d0: usize,
    #[serde(with = "crate::bignum::dec_vec")]
    pub shared: Vec<Nat>,
    pub verdict: TriBool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteReport {
    pub f: String,
    pub ii: TriBool,
    pub iii: TriBool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionsReport {
    pub i: Vec<PairReport>,
    pub sites: Vec<SiteReport>,
    pub iv: Option<TriBool>,
}

/// (I): past the point where the two `χ`-prefixes part, the `D_0` windows
/// share nothing, so the final sites can only meet on the common part.
fn condition_i(a: &PipelineTrace, b: &PipelineTrace) -> PairReport {
    let common = a.d0.iter().zip(&b.d0).take_while(|(x, y)| x == y).count();
    let tail_a: BTreeSet<&Nat> = a.d0[common..].iter().collect();
    let disjoint = b.d0[common..].iter().all(|x| !tail_a.contains(x));
    let fa: BTreeSet<&Nat> = a.d_final.iter().collect();
    let shared: Vec<Nat> = b.d_final.iter().filter(|m| fa.contains(m)).cloned().collect();
    let diverged = common < a.d0.len().min(b.d0.len());
    let verdict = if !diverged {
        TriBool::unknown("the two codes agree on the whole window")
    } else {
        let allowed: BTreeSet<Nat> = a.d0[..common].iter().cloned().collect();
        let shared_ok = shared.iter().all(|m| {
            a.d1.iter()
                .any(|e| matches!(e, D1Entry::Point { index, elem, .. } if elem.point == *m && allowed.contains(index)))
        });
        (disjoint && shared_ok).into()
    };
    PairReport { a: a.f.clone(), b: b.f.clone(), common_d0: common, shared, verdict }
}

/// (II): each `D_1` point sits in its own interval and `f` does not move it
/// down a level.
fn condition_ii(t: &TowerRef, tr: &PipelineTrace, f: &dyn PointMap) -> TriBool {
    let mut levels = BTreeSet::new();
    let mut verdict = TriBool::True;
    for e in &tr.d1 {
        let D1Entry::Point { index, elem, .. } = e else { continue };
        let n = crate::bignum::to_u64(index).unwrap_or(u64::MAX) as usize;
        let lo = t.start(n);
        let hi = t.start(n + 1);
        if !(elem.point > *lo && elem.point <= *hi) || !levels.insert(n) {
            return TriBool::False;
        }
        match f.apply(&elem.point) {
            Ok(Some(y)) => match level_of(t.as_ref(), &y) {
                Ok(k) if k < n => return TriBool::False,
                Ok(_) => {}
                Err(e) => verdict = verdict.and(TriBool::unknown(e.to_string())),
            },
            Ok(None) => {}
            Err(e) => verdict = verdict.and(TriBool::unknown(e.0)),
        }
    }
    if d1_points(&tr.d1).is_empty() {
        return TriBool::unknown("no D_1 points");
    }
    verdict
}

pub fn check_conditions(t: &TowerRef, family: &[(MapRef, &PipelineTrace)]) -> ConditionsReport {
    let mut pairs = Vec::new();
    for (i, (_, a)) in family.iter().enumerate() {
        for (_, b) in &family[i + 1..] {
            pairs.push(condition_i(a, b));
        }
    }
    let sites = family
        .iter()
        .map(|(f, tr)| {
            let xi = CodeMap::xi(t.clone(), f.as_ref());
            SiteReport {
                f: tr.f.clone(),
                ii: condition_ii(t, tr, f.as_ref()),
                iii: spaced(&xi, &tr.d_final, f.as_ref()),
            }
        })
        .collect();
    ConditionsReport { i: pairs, sites, iv: None }
}

/// (IV): `Y` avoids `E(f_j)` for every participant, `E` taken on the
/// computed final site with `g = ξ(f_j)`.
pub fn condition_iv(t: &TowerRef, y: &[Nat], participants: &[(MapRef, &PipelineTrace)]) -> TriBool {
    let ys: BTreeSet<&Nat> = y.iter().collect();
    let mut verdict = TriBool::True;
    for (f, tr) in participants {
        let xi = CodeMap::xi(t.clone(), f.as_ref());
        match e_set(&xi, &tr.d_final, f.as_ref()) {
            Ok(e) => {
                if e.iter().any(|m| ys.contains(m)) {
                    return TriBool::False;
                }
            }
            Err(e) => verdict = verdict.and(TriBool::unknown(e.to_string())),
        }
    }
    verdict
}
