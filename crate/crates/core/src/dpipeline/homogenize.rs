//! Extraction of a homogeneous subsequence, following the two cases of 𝒯.

use super::orders::{tangled, Relation};
use crate::{Nat, TriBool};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomCase {
    /// 𝒯 holds: follow a chain
    Chain,
    /// 𝒯 fails: collect pairwise incomparable points
    Antichain,
    /// too few points for 𝒯 to say anything; the window is kept as is
    Short,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogenized {
    #[serde(with = "crate::bignum::dec_vec")]
    pub points: Vec<Nat>,
    pub case: HomCase,
    pub tangled: TriBool,
    /// the budget ran out before the window did
    pub truncated: bool,
    /// some comparison could not be evaluated and was read as "unrelated"
    pub unresolved_comparisons: bool,
}

fn related(ord: &Relation, a: &Nat, b: &Nat, unresolved: &mut bool) -> bool {
    match ord(a, b) {
        TriBool::True => true,
        TriBool::False => false,
        TriBool::Unknown(_) => {
            *unresolved = true;
            false
        }
    }
}

/// Whether the points are pairwise comparable, or pairwise incomparable.
pub fn is_homogeneous(points: &[Nat], ord: &Relation) -> bool {
    let mut comparable = 0usize;
    let mut incomparable = 0usize;
    let mut unresolved = false;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if related(ord, a, b, &mut unresolved) || related(ord, b, a, &mut unresolved) {
                comparable += 1;
            } else {
                incomparable += 1;
            }
        }
    }
    comparable == 0 || incomparable == 0
}

/// `H(d, ≺)` on a sorted window, at most `budget` points.
///
/// Both recursions only look forward from the last chosen point. The chain
/// starts at the first point related to all later ones, or at `min d` if there
/// is none. In the antichain case a point is taken when it is unrelated, in
/// both directions, to everything chosen so far.
pub fn homogenize(d: &[Nat], ord: &Relation, budget: usize) -> Homogenized {
    let t = tangled(d, ord);
    let mut unresolved = false;
    if d.len() < 3 {
        let points: Vec<Nat> = d.iter().take(budget).cloned().collect();
        return Homogenized {
            truncated: points.len() < d.len(),
            points,
            case: HomCase::Short,
            tangled: t,
            unresolved_comparisons: false,
        };
    }
    let case = if t.is_true() { HomCase::Chain } else { HomCase::Antichain };
    // a chain starts at the first point related to everything after it
    let start = match case {
        HomCase::Chain => {
            (0..d.len() - 1).find(|&j| d[j + 1..].iter().all(|m| related(ord, &d[j], m, &mut unresolved))).unwrap_or(0)
        }
        _ => 0,
    };
    let mut out: Vec<Nat> = Vec::new();
    let mut truncated = false;
    for m in &d[start..] {
        if out.len() == budget {
            truncated = true;
            break;
        }
        let take = match (case, out.last()) {
            (_, None) => true,
            (HomCase::Chain, Some(last)) => related(ord, last, m, &mut unresolved),
            (_, Some(_)) => {
                out.iter().all(|c| !related(ord, c, m, &mut unresolved) && !related(ord, m, c, &mut unresolved))
            }
        };
        if take {
            out.push(m.clone());
        }
    }
    if t.is_unknown() {
        unresolved = true;
    }
    Homogenized { points: out, case, tangled: t, truncated, unresolved_comparisons: unresolved }
}
