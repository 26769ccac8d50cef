//! The semaphore `ȳ^{h,w}`: agreement points of `h` and `φ(w)` on `D_2(h)`
//! held back from the participants.

use crate::map::PointMap;
use crate::tower::{phi_eval, Saturation, Tower};
use crate::words::Word;
use crate::Nat;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Semaphore {
    #[serde(with = "crate::bignum::dec_vec")]
    pub points: Vec<Nat>,
    /// agreement points denied because a participant had no earlier turn
    #[serde(with = "crate::bignum::dec_vec")]
    pub blocked: Vec<Nat>,
    pub notes: Vec<String>,
}

/// The first `budget` terms of `ȳ`. `d2h` is the computed window of `D_2(h)`
/// and `guards` the sets `D†_4(f_j)` of the participants.
///
/// A participant's earlier turn is a point of `D_2(h)` strictly between the
/// previous term and the candidate that also lies in its `D†_4`.
pub fn semaphore(
    t: &dyn Tower,
    h: &dyn PointMap,
    w: &Word,
    d2h: &[Nat],
    guards: &[Saturation],
    budget: usize,
) -> Semaphore {
    let mut out = Semaphore::default();
    let in_guard = |g: &Saturation, m: &Nat| g.contains(t, m).unwrap_or(false);
    for y in d2h {
        if out.points.len() == budget {
            break;
        }
        let prev = out.points.last();
        if prev.is_some_and(|p| y <= p) {
            continue;
        }
        let agree = match (h.apply(y), phi_eval(t, w, y)) {
            (Ok(Some(a)), Ok(b)) => a == b,
            (Ok(None), _) => false,
            (Err(e), _) => {
                out.notes.push(format!("{y}: {}", e.0));
                continue;
            }
            (_, Err(e)) => {
                out.notes.push(format!("{y}: {e}"));
                continue;
            }
        };
        if !agree {
            continue;
        }
        if let Some(p) = prev {
            let denied = guards.iter().any(|g| in_guard(g, y) && !d2h.iter().any(|m| p < m && m < y && in_guard(g, m)));
            if denied {
                out.blocked.push(y.clone());
                continue;
            }
        }
        out.points.push(y.clone());
    }
    if out.points.is_empty() {
        out.notes.push("no agreement point in the window".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::PhiMap;
    use crate::tower::{TowerRef, ToyTower};
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn setup() -> (TowerRef, PhiMap, Word, Vec<Nat>) {
        let t: TowerRef = Arc::new(ToyTower::new(10).unwrap());
        let w: Word = "+0101".parse().unwrap();
        let h = PhiMap::new(t.clone(), w.clone());
        let d: Vec<Nat> = (1..9).map(|n| t.start(n) + 3u32).collect();
        (t, h, w, d)
    }

    #[test]
    fn no_participants() {
        let (t, h, w, d) = setup();
        let s = semaphore(t.as_ref(), &h, &w, &d[..4], &[], 10);
        assert_eq!(s.points, d[..4].to_vec());
    }

    #[test]
    fn covering_participant_alternates() {
        let (t, h, w, d) = setup();
        let d = &d[..4];
        let guard = Saturation { levels: BTreeSet::from([1, 2, 3, 4]) };
        let s = semaphore(t.as_ref(), &h, &w, d, &[guard], 10);
        assert_eq!(s.points, vec![d[0].clone(), d[2].clone()]);
        assert_eq!(s.blocked, vec![d[1].clone(), d[3].clone()]);
    }

    #[test]
    fn never_agreeing() {
        let (t, _, w, d) = setup();
        let other = PhiMap::new(t.clone(), "-0011".parse().unwrap());
        let s = semaphore(t.as_ref(), &other, &w, &d[..4], &[], 10);
        assert!(s.points.is_empty());
        assert!(!s.notes.is_empty());
    }
}
