//! Constructed injections exercising the site pipeline: maps caught by a
//! `φ`-word, maps with fresh values, and a conflict in which a participant
//! competes with `h` for reserved points.

use crate::coding::{BitPrefix, CodeMap};
use crate::dpipeline::{d0, d1, d1_points, Budgets, Known, Pipeline, PipelineTrace};
use crate::injection::identity_map;
use crate::map::{MapRef, Perturbed, PhiMap};
use crate::surgery::PartialInjection;
use crate::tower::{TowerKind, TowerRef};
use crate::words::Word;
use crate::Nat;
use std::sync::Arc;

pub struct Scenario {
    pub name: String,
    pub tower: TowerRef,
    pub f: MapRef,
    /// other injections the pipeline should be able to name
    pub known: Vec<Known>,
}

impl Scenario {
    pub fn pipeline(&self, budgets: Budgets) -> Pipeline {
        let mut p = Pipeline::new(self.tower.clone(), budgets);
        for k in &self.known {
            p.register(k.name.clone(), k.map.clone());
        }
        p
    }

    pub fn run(&self, budgets: Budgets) -> PipelineTrace {
        self.pipeline(budgets).run(&self.name, self.f.clone())
    }
}

fn pattern(p: &str, len: usize) -> String {
    p.chars().cycle().take(len).collect()
}

/// Words whose generators are read at every built level.
pub fn caught_words(t: &TowerRef) -> Vec<Word> {
    let l = t.num_levels() - 1;
    let (a, b) = (pattern("0110", l), pattern("1011", l));
    [format!("+{a}"), format!("-{b}"), format!("+{a}·-{b}")]
        .iter()
        .map(|s| s.parse().expect("well-formed word"))
        .collect()
}

/// `f = φ(w)` outright, so `f` agrees with `φ(w)` on every site point.
pub fn caught_family(t: &TowerRef) -> Vec<Scenario> {
    caught_words(t)
        .into_iter()
        .map(|w| Scenario {
            name: format!("phi-word:{w}"),
            f: Arc::new(PhiMap::new(t.clone(), w)),
            tower: t.clone(),
            known: Vec::new(),
        })
        .collect()
}

fn swap(base: MapRef, a: Nat, b: Nat) -> MapRef {
    Arc::new(Perturbed::new(base, a, b).expect("swaps of total maps stay in window"))
}

/// The identity with `0 ↔ 2` swapped, so that `χ` starts `0, 0`, and each
/// `D_1` point above `I_0` swapped with a fresh partner no diffword reaches.
pub fn fresh(t: &TowerRef) -> Scenario {
    let base = swap(identity_map(), Nat::from(0u32), Nat::from(2u32));
    let (z, _) = d0(base.as_ref(), Budgets::default().d0);
    let mut f = base.clone();
    for m in d1_points(&d1(t.as_ref(), base.as_ref(), &z, 64)) {
        let n = crate::tower::level_of(t.as_ref(), &m).expect("d1 points are on built levels");
        if n == 0 {
            continue;
        }
        let paper_top = t.kind() == TowerKind::Paper && n + 1 > 2;
        let partner = if paper_top { t.start(n) + 12345u32 } else { t.start(n + 1) + 7u32 };
        f = swap(f, m, partner);
    }
    Scenario { name: "fresh".into(), tower: t.clone(), f, known: Vec::new() }
}

/// The conflict on a tower of at least 12 levels. `h = φ(0^ℕ)`, whose code
/// starts `1, 0, 0`, so `D_2(h)` lives in `I_2, I_5, I_11`; `f` has code
/// `0^ℕ` and sends its site into those intervals.
fn conflict_toy(t: &TowerRef) -> Scenario {
    let h: MapRef = Arc::new(CodeMap::new(t.clone(), BitPrefix::new(vec![false; 20])));
    let s = |n: usize, k: u32| t.start(n) + k;
    let mut f = PartialInjection::new();
    let pairs = [
        (Nat::from(0u32), Nat::from(6u32)),
        (Nat::from(1u32), s(2, 5)),
        (Nat::from(2u32), Nat::from(8u32)),
        (Nat::from(3u32), Nat::from(9u32)),
        (Nat::from(4u32), Nat::from(10u32)),
        (Nat::from(5u32), Nat::from(11u32)),
        (s(3, 1), s(5, 7)),
        (s(7, 1), s(11, 3)),
    ];
    for (a, b) in pairs {
        f.insert(a, b).expect("distinct values");
    }
    Scenario { name: "f".into(), tower: t.clone(), f: Arc::new(f), known: vec![Known::new("h", h)] }
}

/// The same conflict squeezed into the paper tower's levels 0–3. Here `h` is
/// `φ(+1000)` with `h(0)` moved into `I_1`, so its code starts `0, 0` and
/// `D_2(h)` lives in `I_1, I_3`; `f` has code `1, 0, 0, 0`.
fn conflict_paper(t: &TowerRef) -> Scenario {
    let x: Word = "+1000".parse().unwrap();
    let base: MapRef = Arc::new(PhiMap::new(t.clone(), x));
    let displaced = base.preimage(&Nat::from(5u32)).ok().flatten();
    let h = swap(base, Nat::from(0u32), Nat::from(5u32));
    let a = if displaced == Some(Nat::from(50u32)) { 51u32 } else { 50 };
    let f = PartialInjection::from_pairs([
        (Nat::from(0u32), Nat::from(0u32)),
        (Nat::from(1u32), Nat::from(a)),
        (t.start(2) + 1u32, t.start(3) + 77u32),
    ])
    .expect("distinct values");
    Scenario { name: "f".into(), tower: t.clone(), f: Arc::new(f), known: vec![Known::new("h", h)] }
}

pub fn conflict(t: &TowerRef) -> Scenario {
    match t.kind() {
        TowerKind::Paper => conflict_paper(t),
        TowerKind::Toy => conflict_toy(t),
    }
}
