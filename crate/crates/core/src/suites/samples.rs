//! Random words, points and `Ċ`-words shared by the suites and the
//! acceptance run.

use super::random_below;
use crate::coding::BitPrefix;
use crate::dpipeline::{Budgets, Known};
use crate::mcg::{GeneratorSpec, GroupWordSpec};
use crate::scenarios::{caught_family, fresh};
use crate::tower::{TowerKind, TowerRef};
use crate::words::{w_count, w_unrank, GeneratorCode, Letter, Sign, Word};
use crate::Nat;
use rand::seq::SliceRandom;
use rand::Rng;
use std::sync::Arc;

/// A reduced word at `level` from up to `max_len` random letters.
pub fn random_word<R: Rng>(rng: &mut R, level: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let letters = (0..len).map(|_| {
        let code = GeneratorCode::from_value(level, rng.gen_range(0..1u64 << level));
        Letter::new(code, if rng.gen() { Sign::Pos } else { Sign::Neg })
    });
    Word::reduce(level, letters).expect("one level")
}

/// A uniform element of `W_n`, `n ≤ 3`, optionally excluding `∅`.
pub fn random_wn<R: Rng>(rng: &mut R, n: usize, nonempty: bool) -> Word {
    let count = w_count(n).expect("small level");
    w_unrank(n, rng.gen_range(u64::from(nonempty)..count)).expect("index in range")
}

/// A point of `I_n`.
pub fn random_point<R: Rng>(rng: &mut R, t: &TowerRef, n: usize) -> Nat {
    t.start(n) + random_below(rng, t.size(n))
}

/// Generators with pairwise distinct codes at the resolution of `top`: the
/// fresh map and one caught map (both registered), then bare codes filling
/// the rest, in and out of `ran χ`.
pub fn generator_pool(t: &TowerRef, top: usize, budgets: &Budgets) -> (Vec<Arc<GeneratorSpec>>, Vec<Known>) {
    let res = t.code_resolution(top);
    let fr = fresh(t);
    let caught = caught_family(t).pop().expect("three caught words");
    let registry = vec![Known::new("fresh", fr.f.clone()), Known::new(caught.name.clone(), caught.f.clone())];
    let mut pool: Vec<Arc<GeneratorSpec>> = registry
        .iter()
        .map(|k| Arc::new(GeneratorSpec::from_injection(t, &k.name, k.map.clone(), budgets, &registry)))
        .collect();
    let taken: Vec<BitPrefix> = pool.iter().map(|g| g.x.truncate(res)).collect();
    for v in 0..1u64 << res {
        let x = BitPrefix::new(GeneratorCode::from_value(res, v).bits().to_vec());
        if !taken.contains(&x) {
            pool.push(Arc::new(GeneratorSpec::from_code(t, x, budgets, &registry)));
        }
    }
    (pool, registry)
}

fn class(g: &GeneratorSpec, res: usize) -> u64 {
    g.x.truncate(res).bits().iter().fold(0, |a, &b| (a << 1) | b as u64)
}

/// A nonempty reduced word over `pool` of length at most `max_len`.
///
/// On the toy tower `φ` only sees exponent sums per class, and diffwords come
/// out class-sorted with at most three copies each; the word is built in that
/// form so that `membership` can read it back letter for letter. On the
/// paper tower any reduced word will do.
pub fn random_group_word<R: Rng>(
    rng: &mut R,
    t: &TowerRef,
    top: usize,
    max_len: usize,
    pool: &[Arc<GeneratorSpec>],
) -> GroupWordSpec {
    let res = t.code_resolution(top);
    loop {
        let w = match t.kind() {
            TowerKind::Toy => {
                let k = rng.gen_range(1..=3);
                let mut gens: Vec<&Arc<GeneratorSpec>> = pool.choose_multiple(rng, k).collect();
                gens.sort_by_key(|g| class(g, res));
                let mut letters = Vec::new();
                for g in gens {
                    let s = if rng.gen() { Sign::Pos } else { Sign::Neg };
                    for _ in 0..rng.gen_range(1..=2) {
                        letters.push(((*g).clone(), s));
                    }
                }
                GroupWordSpec::new(letters)
            }
            TowerKind::Paper => {
                let len = rng.gen_range(1..=max_len);
                GroupWordSpec::new((0..len).map(|_| {
                    let g = pool.choose(rng).expect("nonempty pool").clone();
                    (g, if rng.gen() { Sign::Pos } else { Sign::Neg })
                }))
            }
        };
        if !w.is_empty() && w.len() <= max_len {
            return w;
        }
    }
}
