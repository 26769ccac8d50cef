//! Windowed membership in `Ċ`: the candidate test `φ_can`, recovery of `w^h`,
//! and reconstruction of `h` from the generators its word names.

use super::{word_eval, GeneratorSpec, GeneratorSummary, GroupWordSpec};
use crate::coding::{chi_longest, BitPrefix};
use crate::dpipeline::{order_h, point_word, Budgets, Known};
use crate::map::PointMap;
use crate::tower::TowerRef;
use crate::words::{Sign, Word};
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// The points membership looks at: `m_n + k` for `n ≤ max_level`, `k < offsets`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemberWindow {
    pub max_level: usize,
    pub offsets: u64,
}

impl MemberWindow {
    pub fn points(&self, t: &TowerRef) -> Vec<Nat> {
        let mut out = Vec::new();
        for n in 0..=self.max_level.min(t.num_levels() - 1) {
            for k in 0..self.offsets {
                if Nat::from(k) < *t.size(n) {
                    out.push(t.start(n) + k);
                }
            }
        }
        out
    }
}

fn chain_check(t: &TowerRef, h: &dyn PointMap, n0: usize, max_level: usize) -> (TriBool, Option<Nat>) {
    if max_level >= t.num_levels() {
        return (TriBool::unknown(format!("level {max_level} is not built")), None);
    }
    if n0 >= max_level {
        return (TriBool::unknown("the window holds a single level"), None);
    }
    let mut v = TriBool::True;
    for n in n0..max_level {
        let (a, b) = (t.start(n), t.start(n + 1));
        match order_h(t.as_ref(), h, a, b) {
            TriBool::False => {
                let at = match point_word(t.as_ref(), h, a) {
                    Ok(Some(_)) => b.clone(),
                    _ => a.clone(),
                };
                return (TriBool::False, Some(at));
            }
            other => v = v.and(other),
        }
    }
    (v, None)
}

/// `φ_can`: `m_{n0} ⊴_h m_{n0+1} ⊴_h ⋯` up to `max_level`.
pub fn candidate(t: &TowerRef, h: &dyn PointMap, n0: usize, max_level: usize) -> TriBool {
    chain_check(t, h, n0, max_level).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recovered {
    pub word: Word,
    pub level: usize,
    /// `l(h)`
    pub length: usize,
    /// `i^h_0, …`, left to right
    pub signs: Vec<i8>,
}

/// `w^h = w(m_n, h(m_n))` at `max_level`, checked to restrict to the words
/// found at the levels from `n0` on.
pub fn recover_wh(t: &TowerRef, h: &dyn PointMap, n0: usize, max_level: usize) -> Result<Option<Recovered>, String> {
    let Some((level, word)) = point_word(t.as_ref(), h, t.start(max_level))? else { return Ok(None) };
    for n in n0..max_level {
        let Some((_, w)) = point_word(t.as_ref(), h, t.start(n))? else { return Ok(None) };
        if word.restrict(n).map_err(|e| e.to_string())? != w {
            return Err(format!("incoherent: w^h restricted to level {n} is not {w}"));
        }
    }
    let signs = word.signs().iter().map(|s| s.as_i8()).collect();
    Ok(Some(Recovered { length: word.len(), level, word, signs }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub point: String,
    pub h: Option<String>,
    pub expected: Option<String>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub verdict: TriBool,
    pub window: MemberWindow,
    pub n0: Option<usize>,
    pub recovered: Option<Recovered>,
    pub generators: Vec<GeneratorSummary>,
    pub checked: usize,
    pub counterexample: Option<Counterexample>,
    pub notes: Vec<String>,
}

impl MembershipReport {
    fn new(window: MemberWindow) -> Self {
        Self {
            verdict: TriBool::unknown("not evaluated"),
            window,
            n0: None,
            recovered: None,
            generators: Vec::new(),
            checked: 0,
            counterexample: None,
            notes: Vec::new(),
        }
    }
}

/// The registered injection whose code starts with `x`, if exactly one does.
fn resolve<'a>(registry: &'a [Known], x: &BitPrefix) -> Option<&'a Known> {
    let mut hits = registry.iter().filter(|k| chi_longest(k.map.as_ref(), x.len()) == *x);
    let first = hits.next()?;
    hits.next().is_none().then_some(first)
}

/// Windowed `h ∈ Ċ`. False only comes with a point at which `h` and the
/// reconstruction both evaluate and differ, or at which the candidate chain
/// breaks.
pub fn membership(
    t: &TowerRef,
    h: &dyn PointMap,
    window: MemberWindow,
    budgets: &Budgets,
    registry: &[Known],
) -> MembershipReport {
    let mut r = MembershipReport::new(window);
    let top = window.max_level;

    let mut found = None;
    let mut undecided = None;
    let mut last_break = None;
    for n0 in 1..top.max(1) {
        match chain_check(t, h, n0, top) {
            (TriBool::True, _) => {
                found = Some(n0);
                break;
            }
            (TriBool::False, at) => last_break = at,
            (TriBool::Unknown(why), _) => {
                undecided.get_or_insert(why);
            }
        }
    }
    let Some(n0) = found else {
        r.verdict = match (undecided, last_break) {
            (Some(why), _) => TriBool::unknown(format!("candidate: {why}")),
            (None, Some(at)) => {
                r.counterexample = Some(Counterexample {
                    point: at.to_string(),
                    h: h.apply(&at).ok().flatten().map(|v| v.to_string()),
                    expected: None,
                    reason: "no diffword coheres with the next level here".into(),
                });
                TriBool::False
            }
            (None, None) => TriBool::unknown("the window is too small for the candidate test"),
        };
        return r;
    };
    r.n0 = Some(n0);

    let rec = match recover_wh(t, h, n0, top) {
        Ok(Some(rec)) => rec,
        Ok(None) => {
            r.verdict = TriBool::unknown("w^h has no diffword at the top level");
            return r;
        }
        Err(e) => {
            r.verdict = TriBool::unknown(e);
            return r;
        }
    };

    let res = t.code_resolution(top);
    let mut gens: BTreeMap<BitPrefix, Arc<GeneratorSpec>> = BTreeMap::new();
    let mut letters = Vec::new();
    for l in rec.word.letters() {
        let x = BitPrefix::new(l.gen.bits()[..res.min(l.gen.level())].to_vec());
        let g = gens
            .entry(x.clone())
            .or_insert_with(|| {
                Arc::new(match resolve(registry, &x) {
                    Some(k) => GeneratorSpec::from_injection(t, &k.name, k.map.clone(), budgets, registry),
                    None => GeneratorSpec::from_code(t, x.clone(), budgets, registry),
                })
            })
            .clone();
        letters.push((g, l.sign));
    }
    r.generators = gens.values().map(|g| g.summary()).collect();
    let word = GroupWordSpec::new(letters);
    if word.signs() != rec.word.signs() {
        r.notes.push("generators with equal codes cancelled in the reconstruction".into());
    }
    r.recovered = Some(rec);

    let mut verdict = TriBool::True;
    for m in window.points(t) {
        r.checked += 1;
        let hm = match h.apply(&m) {
            Ok(Some(v)) => v,
            Ok(None) => {
                verdict = verdict.and(TriBool::unknown(format!("h is undefined at {m}")));
                continue;
            }
            Err(e) => {
                verdict = verdict.and(TriBool::unknown(e.0));
                continue;
            }
        };
        match word_eval(&word, &m) {
            Ok(v) if v == hm => {}
            Ok(v) => {
                r.counterexample = Some(Counterexample {
                    point: m.to_string(),
                    h: Some(hm.to_string()),
                    expected: Some(v.to_string()),
                    reason: format!("h differs from {word}"),
                });
                r.verdict = TriBool::False;
                return r;
            }
            Err(e) => verdict = verdict.and(TriBool::unknown(e.to_string())),
        }
    }
    r.verdict = verdict;
    r
}

/// Signs as `±1`, for comparing against [`Recovered::signs`].
pub fn sign_vector(s: &[Sign]) -> Vec<i8> {
    s.iter().map(|s| s.as_i8()).collect()
}
