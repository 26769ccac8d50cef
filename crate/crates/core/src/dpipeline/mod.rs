//! The site pipeline `D_0 … D_6` with every infinitary step cut down to an
//! explicit budget.
//!
//! Stages 0–2 follow the first construction; 3–6 use the homogenizer. A run
//! needs a registry of known injections, which stands in for `χ⁻¹` when a
//! decoded code prefix has to be named.

pub mod conditions;
pub mod detect;
pub mod homogenize;
pub mod orders;
pub mod semaphore;
pub mod stages;

pub use detect::{detect_hf, detect_wf, participants, HfInfo, HfOutcome, HfSource, Letters, WfOutcome};
pub use homogenize::{homogenize, is_homogeneous, HomCase, Homogenized};
pub use orders::{order_h, order_interval, point_word, tangled, Relation};
pub use semaphore::{semaphore, Semaphore};
pub use stages::{
    d0, d1, d1_points, d2, h_family, lambda_check, spacing_works, D1Entry, Elem, Lambda, SpacingVerdict, Stage,
};

use crate::coding::{BitPrefix, CodeMap};
use crate::map::{MapRef, PointMap};
use crate::surgery::spaced;
use crate::tower::{isat, level_of, Saturation, Tower, TowerRef};
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// number of χ-prefixes fed to `D_0`
    pub d0: usize,
    /// exclusions scanned per `D_1` interval
    pub scan: u64,
    pub d2: usize,
    /// spacing-works witnesses needed for a `False` verdict
    pub witnesses: usize,
    pub homogenize: usize,
    pub semaphore: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { d0: 5, scan: 4096, d2: 8, witnesses: 2, homogenize: 16, semaphore: 8 }
    }
}

impl Budgets {
    pub const STAGES: [&'static str; 6] = ["d0", "scan", "d2", "witnesses", "homogenize", "semaphore"];

    pub fn set(&mut self, stage: &str, n: u64) -> Result<(), String> {
        let n_usize = usize::try_from(n).map_err(|_| format!("budget {n} too large"))?;
        match stage {
            "d0" => self.d0 = n_usize,
            "scan" => self.scan = n,
            "d2" => self.d2 = n_usize,
            "witnesses" => self.witnesses = n_usize,
            "homogenize" => self.homogenize = n_usize,
            "semaphore" => self.semaphore = n_usize,
            _ => return Err(format!("unknown budget stage {stage:?}, expected one of {:?}", Self::STAGES)),
        }
        Ok(())
    }

    /// Everything doubled except `d0`, which would push `D_0` past the built
    /// levels, and the witness threshold, which is not a search bound.
    pub fn doubled(&self) -> Self {
        Self {
            d0: self.d0,
            scan: self.scan * 2,
            d2: self.d2 * 2,
            witnesses: self.witnesses,
            homogenize: self.homogenize * 2,
            semaphore: self.semaphore * 2,
        }
    }
}

/// An injection the pipeline can name when a code prefix points at it.
#[derive(Clone)]
pub struct Known {
    pub name: String,
    pub map: MapRef,
}

impl Known {
    pub fn new(name: impl Into<String>, map: MapRef) -> Self {
        Self { name: name.into(), map }
    }
}

/// Stages 0–2 of one injection.
pub struct Front {
    pub d0: Vec<Nat>,
    pub d0_stop: Option<String>,
    pub d1: Vec<D1Entry>,
    pub xi: CodeMap,
    pub spacing: SpacingVerdict,
    pub d2: Stage,
}

pub fn front(t: &TowerRef, f: &dyn PointMap, b: &Budgets) -> Front {
    let (z, stop) = d0(f, b.d0);
    let e1 = d1(t.as_ref(), f, &z, b.scan);
    let xi = CodeMap::xi(t.clone(), f);
    let p1 = d1_points(&e1);
    let spacing = spacing_works(f, &xi, &p1, b.witnesses);
    let s2 = d2(t.as_ref(), f, &xi, &p1, &spacing, b.d2);
    Front { d0: z, d0_stop: stop.map(|e| e.to_string()), d1: e1, xi, spacing, d2: s2 }
}

/// `f(a) R f(b)`, false where `f` is undefined.
fn on_images<'a>(f: &'a dyn PointMap, rel: impl Fn(&Nat, &Nat) -> TriBool + 'a) -> impl Fn(&Nat, &Nat) -> TriBool + 'a {
    move |a, b| match (f.apply(a), f.apply(b)) {
        (Ok(Some(x)), Ok(Some(y))) => rel(&x, &y),
        (Err(e), _) | (_, Err(e)) => TriBool::unknown(e.0),
        _ => TriBool::False,
    }
}

/// Stages 0–4.
pub struct Middle {
    pub front: Front,
    pub d3: Homogenized,
    pub hf: HfOutcome,
    pub d4: Homogenized,
}

pub fn middle(t: &TowerRef, f: &dyn PointMap, b: &Budgets, registry: &[Known]) -> Middle {
    let fr = front(t, f, b);
    let p2 = fr.d2.points();
    let tw = t.as_ref();
    let h3 = homogenize(&p2, &on_images(f, |x, y| order_interval(tw, x, y)), b.homogenize);
    let hf = detect_hf(tw, f, &h3.points, registry);
    let h4 = match &hf.map {
        Some(h) => {
            let h = h.clone();
            homogenize(&h3.points, &on_images(f, move |x, y| order_h(tw, h.as_ref(), x, y)), b.homogenize)
        }
        None => h3.clone(),
    };
    Middle { front: fr, d3: h3, hf, d4: h4 }
}

fn images(f: &dyn PointMap, d: &[Nat]) -> Vec<Nat> {
    d.iter().filter_map(|m| f.apply(m).ok().flatten()).collect()
}

/// `D†_4(f) = Isat(f[D_4(f)])`.
pub fn dagger4(t: &dyn Tower, f: &dyn PointMap, d4: &[Nat]) -> Saturation {
    let ys = images(f, d4);
    isat(t, ys.iter()).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineTrace {
    pub tower: String,
    pub f: String,
    pub budgets: Budgets,
    #[serde(with = "crate::bignum::dec_vec")]
    pub d0: Vec<Nat>,
    pub d0_stop: Option<String>,
    pub d1: Vec<D1Entry>,
    /// the part of `χ(f)` that `ξ(f)` is evaluated with
    pub xi_code: BitPrefix,
    pub spacing_works: SpacingVerdict,
    pub d2: Stage,
    pub d2_spaced: TriBool,
    pub d3: Homogenized,
    pub h_f: Option<HfInfo>,
    pub h_f_note: Option<String>,
    pub d4: Homogenized,
    pub w_f: WfOutcome,
    pub letters: Option<Letters>,
    #[serde(with = "crate::bignum::dec_vec")]
    pub d2_of_h: Vec<Nat>,
    pub semaphore: Option<Semaphore>,
    #[serde(with = "crate::bignum::dec_vec")]
    pub d5: Vec<Nat>,
    pub d6: Homogenized,
    pub lambda_d2: Lambda,
    #[serde(with = "crate::bignum::dec_vec")]
    pub d_final: Vec<Nat>,
    pub d_final_from: String,
    pub lambda: Lambda,
    pub notes: Vec<String>,
}

const EXEMPTION_NOTE: &str =
    "xi(f) fixes I_0 pointwise; D_2 additionally requires xi(f)(f(m)) != f(m) in place of fixed-point-freeness";

/// Runs the whole pipeline for `f`, registered under `name`.
pub struct Pipeline {
    pub tower: TowerRef,
    pub budgets: Budgets,
    pub registry: Vec<Known>,
}

impl Pipeline {
    pub fn new(tower: TowerRef, budgets: Budgets) -> Self {
        Self { tower, budgets, registry: Vec::new() }
    }

    pub fn register(&mut self, name: impl Into<String>, map: MapRef) -> &mut Self {
        let name = name.into();
        self.registry.retain(|k| k.name != name);
        self.registry.push(Known::new(name, map));
        self
    }

    pub fn run(&self, name: &str, f: MapRef) -> PipelineTrace {
        let t = &self.tower;
        let tw = t.as_ref();
        let b = &self.budgets;
        let mut registry = self.registry.clone();
        if !registry.iter().any(|k| k.name == name) {
            registry.push(Known::new(name, f.clone()));
        }
        let mid = middle(t, f.as_ref(), b, &registry);
        let p2 = mid.front.d2.points();
        let mut notes = vec![EXEMPTION_NOTE.to_string()];

        let mut w_f = WfOutcome { note: Some("h_f absent".into()), ..Default::default() };
        let mut letters = None;
        let mut d2_of_h = Vec::new();
        let mut sem = None;
        let mut d5 = mid.d4.points.clone();
        if let Some(h) = &mid.hf.map {
            w_f = detect_wf(tw, h.as_ref(), &images(f.as_ref(), &mid.d4.points));
            if let Some(w) = &w_f.word {
                let ls = participants(tw, w, &registry, mid.hf.name());
                let mut guards = Vec::new();
                for p in &ls.participants {
                    let k = registry.iter().find(|k| &k.name == p).expect("participants come from the registry");
                    let d4 = if p == name {
                        mid.d4.points.clone()
                    } else {
                        middle(t, k.map.as_ref(), b, &registry).d4.points
                    };
                    guards.push(dagger4(tw, k.map.as_ref(), &d4));
                }
                d2_of_h = front(t, h.as_ref(), b).d2.points();
                let s = semaphore(tw, h.as_ref(), w, &d2_of_h, &guards, b.semaphore);
                let reserved = isat(tw, s.points.iter()).unwrap_or_default();
                d5.retain(|m| match f.apply(m) {
                    Ok(Some(y)) => !reserved.contains(tw, &y).unwrap_or(false),
                    _ => true,
                });
                letters = Some(ls);
                sem = Some(s);
            }
        }
        let fr = f.clone();
        let d6 = homogenize(&d5, &move |a: &Nat, c: &Nat| order_h(tw, fr.as_ref(), a, c), b.homogenize);
        let lambda_d2 = lambda_check(tw, &p2, f.as_ref());
        let (d_final, d_final_from) = if lambda_d2.verdict.is_true() {
            (p2.clone(), "d2")
        } else {
            if lambda_d2.verdict.is_unknown() {
                notes.push("catching on D_2 undecided in the window; using D_6".into());
            }
            (d6.points.clone(), "d6")
        };
        let lambda = lambda_check(tw, &d_final, f.as_ref());
        let d2_spaced = spaced(&mid.front.xi, &p2, f.as_ref());
        PipelineTrace {
            tower: format!("{} ({} levels)", tw.kind(), tw.num_levels()),
            f: name.to_string(),
            budgets: b.clone(),
            d0: mid.front.d0,
            d0_stop: mid.front.d0_stop,
            d1: mid.front.d1,
            xi_code: mid.front.xi.code.clone(),
            spacing_works: mid.front.spacing,
            d2: mid.front.d2,
            d2_spaced,
            d3: mid.d3,
            h_f: mid.hf.info.clone(),
            h_f_note: mid.hf.note.clone(),
            d4: mid.d4,
            w_f,
            letters,
            d2_of_h,
            semaphore: sem,
            d5,
            d6,
            lambda_d2,
            d_final,
            d_final_from: d_final_from.into(),
            lambda,
            notes,
        }
    }
}

impl PipelineTrace {
    pub fn d1_points(&self) -> Vec<Nat> {
        d1_points(&self.d1)
    }

    /// Whether λ calls `f` caught on its final site. A `D_6` too small to
    /// say anything defers to the verdict on `D_2`, which contains it.
    pub fn caught(&self) -> TriBool {
        if self.d_final_from == "d6" && self.lambda.underdetermined {
            return self.lambda_d2.verdict.clone();
        }
        self.lambda.verdict.clone()
    }

    /// The invariants every trace must satisfy; returns the violations found.
    pub fn violations(&self, t: &dyn Tower, f: &dyn PointMap) -> Vec<String> {
        let mut out = Vec::new();
        let chain: [(&str, Vec<Nat>); 6] = [
            ("d1", self.d1_points()),
            ("d2", self.d2.points()),
            ("d3", self.d3.points.clone()),
            ("d4", self.d4.points.clone()),
            ("d5", self.d5.clone()),
            ("d6", self.d6.points.clone()),
        ];
        for pair in chain.windows(2) {
            let outer: BTreeSet<&Nat> = pair[0].1.iter().collect();
            if let Some(m) = pair[1].1.iter().find(|m| !outer.contains(m)) {
                out.push(format!("{m} is in {} but not in {}", pair[1].0, pair[0].0));
            }
        }
        for e in &self.d1 {
            let D1Entry::Point { index, elem, boundary } = e else { continue };
            let n = crate::bignum::to_u64(index).unwrap_or(u64::MAX) as usize;
            if n < t.num_levels() && elem.point == *t.start(n) {
                out.push(format!("d1 point {} equals m_{n}", elem.point));
            }
            if let Ok(Some(y)) = f.apply(&elem.point) {
                if !boundary && level_of(t, &y).is_ok_and(|k| k < n) {
                    out.push(format!("f maps d1 point {} below level {n}", elem.point));
                }
            }
        }
        if !self.spacing_works.verdict.is_true() && self.d2_spaced.is_false() {
            out.push("d2 is not spaced".into());
        }
        if let Some(s) = &self.semaphore {
            if !s.points.windows(2).all(|w| w[0] < w[1]) {
                out.push("semaphore is not strictly increasing".into());
            }
        }
        let d_final: BTreeSet<&Nat> = self.d_final.iter().collect();
        if self.d2.points().iter().filter(|m| d_final.contains(m)).count() != d_final.len() {
            out.push("d_final is not inside d2".into());
        }
        out
    }
}
