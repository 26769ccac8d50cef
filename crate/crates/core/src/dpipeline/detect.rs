//! Reading `h_f`, `w_f` and the participants of a conflict off a site.

use super::orders::point_word;
use super::Known;
use crate::coding::{chi_prefix, unhash_seq, BitPrefix};
use crate::map::{MapRef, PointMap};
use crate::surgery::PartialInjection;
use crate::tower::{level_of, Tower};
use crate::words::Word;
use crate::Nat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum HfSource {
    /// a registered injection whose code starts with the decoded prefix
    Known(String),
    /// no unique registered match: the graph the prefix itself encodes
    Decoded(PartialInjection),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HfInfo {
    pub prefix: BitPrefix,
    pub source: HfSource,
    pub chain_levels: Vec<usize>,
}

#[derive(Clone, Default)]
pub struct HfOutcome {
    pub info: Option<HfInfo>,
    pub map: Option<MapRef>,
    pub note: Option<String>,
}

impl HfOutcome {
    fn absent(note: impl Into<String>) -> Self {
        Self { info: None, map: None, note: Some(note.into()) }
    }

    pub fn name(&self) -> Option<&str> {
        match &self.info.as_ref()?.source {
            HfSource::Known(n) => Some(n),
            HfSource::Decoded(_) => None,
        }
    }
}

/// Registered injections whose `χ` starts with `prefix`.
pub fn registry_matches<'a>(registry: &'a [Known], prefix: &BitPrefix) -> Vec<&'a Known> {
    registry.iter().filter(|k| chi_prefix(k.map.as_ref(), prefix.len()).is_ok_and(|p| p == *prefix)).collect()
}

/// The `h` whose `D_2` saturation would contain `f[d3]`: the levels of the
/// images decode through `#⁻¹` to nested prefixes of `χ(h)`.
pub fn detect_hf(t: &dyn Tower, f: &dyn PointMap, d3: &[Nat], registry: &[Known]) -> HfOutcome {
    let mut levels = BTreeSet::new();
    for m in d3 {
        match f.apply(m) {
            Ok(Some(y)) => match level_of(t, &y) {
                Ok(n) => {
                    levels.insert(n);
                }
                Err(e) => return HfOutcome::absent(e.to_string()),
            },
            Ok(None) => {}
            Err(e) => return HfOutcome::absent(e.0),
        }
    }
    let mut chain: Vec<(usize, BitPrefix)> = levels.iter().map(|&n| (n, unhash_seq(&Nat::from(n)))).collect();
    chain.sort_by_key(|(_, p)| p.len());
    if chain.len() < 2 {
        return HfOutcome::absent("chain of length < 2: h underdetermined");
    }
    if !chain.windows(2).all(|w| w[0].1.is_proper_prefix_of(&w[1].1)) {
        return HfOutcome::absent("f-image levels are not a chain of prefixes");
    }
    let chain_levels = chain.iter().map(|(n, _)| *n).collect();
    let prefix = chain.last().unwrap().1.clone();
    let matches = registry_matches(registry, &prefix);
    if let [k] = matches.as_slice() {
        return HfOutcome {
            info: Some(HfInfo { prefix, source: HfSource::Known(k.name.clone()), chain_levels }),
            map: Some(k.map.clone()),
            note: None,
        };
    }
    let note = format!("{} registered matches for prefix {prefix}", matches.len());
    match prefix.decode_graph() {
        Some(g) => HfOutcome {
            map: Some(Arc::new(g.clone())),
            info: Some(HfInfo { prefix, source: HfSource::Decoded(g), chain_levels }),
            note: Some(note),
        },
        None => HfOutcome::absent(format!("{note}; prefix is not the code of an injection")),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WfOutcome {
    pub word: Option<Word>,
    /// read off a single point
    pub underdetermined: bool,
    pub note: Option<String>,
}

/// The deepest of the words `w(y, h(y))`, `y ∈ ys`, provided they restrict
/// to one another.
pub fn detect_wf(t: &dyn Tower, h: &dyn PointMap, ys: &[Nat]) -> WfOutcome {
    let absent = |note: String| WfOutcome { word: None, underdetermined: false, note: Some(note) };
    let mut words = Vec::new();
    for y in ys {
        match point_word(t, h, y) {
            Ok(Some(w)) => words.push(w),
            Ok(None) => return absent(format!("h has no diffword at {y}")),
            Err(e) => return absent(e),
        }
    }
    if words.is_empty() {
        return absent("no points".into());
    }
    words.sort_by_key(|(n, _)| *n);
    for pair in words.windows(2) {
        let (n0, w0) = &pair[0];
        let coherent = pair[1].1.restrict(*n0).is_ok_and(|r| r == *w0);
        if !coherent {
            return absent(format!("diffwords at levels {n0} and {} do not cohere", pair[1].0));
        }
    }
    let underdetermined = words.len() == 1;
    WfOutcome { word: words.pop().map(|(_, w)| w), underdetermined, note: None }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Letters {
    /// registered injections other than `h_f` named by letters of `w_f`
    pub participants: Vec<String>,
    /// letter codes matching no registered injection, or more than one
    pub unresolved: Vec<String>,
}

/// Resolve the letters of `w` against the registry at the tower's code
/// resolution for the word's level.
pub fn participants(t: &dyn Tower, w: &Word, registry: &[Known], h_name: Option<&str>) -> Letters {
    let r = t.code_resolution(w.level());
    let mut names = BTreeSet::new();
    let mut unresolved = BTreeSet::new();
    for l in w.letters() {
        let code = BitPrefix::new(l.gen.bits()[..r.min(l.gen.bits().len())].to_vec());
        match registry_matches(registry, &code).as_slice() {
            [k] if Some(k.name.as_str()) != h_name => {
                names.insert(k.name.clone());
            }
            [_] => {}
            _ => {
                unresolved.insert(code.to_string());
            }
        }
    }
    Letters { participants: names.into_iter().collect(), unresolved: unresolved.into_iter().collect() }
}
