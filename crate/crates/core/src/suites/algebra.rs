use super::samples::{random_point, random_wn, random_word};
use super::{tally, SuiteConfig, SuiteReport};
use crate::bignum::factorial;
use crate::coding::{chi_prefix, hash_seq, pair, unhash_seq, unpair, BitPrefix};
use crate::map::WindowPerm;
use crate::tower::{phi_eval, PaperTower, Perm, Tower, TowerRef};
use crate::words::{enumerate_wn, w_count, w_rank, w_unrank, Word};
use crate::Nat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;

fn rng(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn paper(cfg: &SuiteConfig, cap: usize) -> Result<PaperTower, String> {
    PaperTower::build(cfg.paper_max_level.min(cap)).map_err(|e| e.to_string())
}

pub fn words(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("words");
    let mut bad = Vec::new();
    let mut total = 0;
    for n in 0..=3 {
        for i in 0..w_count(n).unwrap() {
            total += 1;
            match w_unrank(n, i).and_then(|w| w_rank(&w)) {
                Ok(j) if j == i => {}
                other => bad.push(format!("level {n} index {i}: {other:?}")),
            }
        }
    }
    r.record("rank round trip on W_0..W_3", tally("indices", total, bad));

    let mut g = rng(cfg, 1);
    let mut bad = Vec::new();
    for _ in 0..10_000 {
        let n = g.gen_range(1..=3);
        let (a, b, c) = (random_word(&mut g, n, 6), random_word(&mut g, n, 6), random_word(&mut g, n, 6));
        let again = Word::reduce(n, a.letters().iter().cloned()).unwrap();
        if again != a {
            bad.push(format!("reduce moved {a}"));
        }
        let l = a.multiply(&b).and_then(|ab| ab.multiply(&c)).unwrap();
        let rr = b.multiply(&c).and_then(|bc| a.multiply(&bc)).unwrap();
        if l != rr {
            bad.push(format!("({a})({b})({c})"));
        }
    }
    r.record("reduce idempotent, multiply associative", tally("triples", 10_000, bad));

    let mut bad = Vec::new();
    for _ in 0..10_000 {
        let w = random_word(&mut g, 6, 8);
        let m = g.gen_range(0..=6);
        let n = g.gen_range(0..=m);
        let two = w.restrict(m).and_then(|x| x.restrict(n)).unwrap();
        if two != w.restrict(n).unwrap() {
            bad.push(format!("{w} at {m} then {n}"));
        }
    }
    r.record("restrict composes", tally("words", 10_000, bad));

    let w3 = enumerate_wn(3).unwrap();
    let bad: Vec<String> = w3
        .iter()
        .flat_map(|w| (0..w.len()).map(move |k| (w, k)))
        .filter(|(w, k)| !Word::reduce(3, w.letters()[*k..].iter().cloned()).is_ok_and(|s| s.len() == w.len() - k))
        .map(|(w, k)| format!("{w} from {k}"))
        .collect();
    r.record("suffixes of reduced words are reduced (W_3)", tally("words", w3.len(), bad));
    r
}

pub fn tower_ab(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("tower-AB");
    let t = match paper(cfg, 4) {
        Ok(t) => t,
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    for lv in t.levels().iter().skip(1) {
        let n = lv.n();
        r.record(
            &format!("(A) at level {n}"),
            lv.check_a().map(|_| format!("m_{n} + 1 < |I_{n}|")).map_err(|e| e.to_string()),
        );
        let b = if n <= 3 { lv.check_b_exhaustive() } else { lv.check_b_witness() };
        let how = if n <= 3 { "exhaustive" } else { "rank witness" };
        r.record(
            &format!("(B) at level {n}"),
            b.map(|_| format!("{how} over {} words", lv.l())).map_err(|e| e.to_string()),
        );
    }
    let expect: [(usize, Nat); 3] = [(0, Nat::from(2u32)), (1, Nat::from(120u32)), (2, factorial(65))];
    for (n, size) in expect {
        if n < t.num_levels() {
            let got = t.size(n);
            r.record(
                &format!("|I_{n}|"),
                if *got == size {
                    Ok(format!("{} digits", got.to_string().len()))
                } else {
                    Err(format!("{got} != {size}"))
                },
            );
        }
    }
    r
}

pub fn tower_regularity(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("tower-regularity");
    let t = match paper(cfg, 3) {
        Ok(t) => t,
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    let top = t.num_levels() - 1;
    for n in 1..=top.min(2) {
        let ws = enumerate_wn(n).unwrap();
        let bad: Vec<String> =
            ws.iter().skip(1).filter(|w| t.c_eval(n, w).unwrap().is_identity()).map(|w| w.to_string()).collect();
        r.record(&format!("c_{n}(v) != id for v in W_{n} \\ {{e}}"), tally("words", ws.len() - 1, bad));
    }
    let ws = enumerate_wn(1).unwrap();
    let mut bad = Vec::new();
    for w in ws.iter().skip(1) {
        for off in 0..120u32 {
            let m = t.start(1) + off;
            if phi_eval(&t, w, &m).unwrap() == m {
                bad.push(format!("{w} fixes {m}"));
            }
        }
    }
    r.record("no fixed points on I_1 (all points)", tally("word-point pairs", 4 * 120, bad));
    if top >= 3 {
        let tr: TowerRef = Arc::new(t);
        let mut g = rng(cfg, 2);
        let mut bad = Vec::new();
        for _ in 0..1000 {
            let w = random_wn(&mut g, 3, true);
            let m = random_point(&mut g, &tr, 3);
            if phi_eval(tr.as_ref(), &w, &m).unwrap() == m {
                bad.push(format!("{w} fixes a point of I_3"));
            }
        }
        r.record("no fixed points on I_3 (sampled)", tally("samples", 1000, bad));
    }
    r
}

pub fn tower_action(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("tower-action");
    let t: TowerRef = match paper(cfg, 3) {
        Ok(t) => Arc::new(t),
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    let top = t.num_levels() - 1;
    let mut g = rng(cfg, 3);
    let mut bad = Vec::new();
    for _ in 0..1000 {
        let (a, b) = (random_wn(&mut g, top, false), random_wn(&mut g, top, false));
        let n = g.gen_range(0..=top);
        let m = random_point(&mut g, &t, n);
        let ab = a.multiply(&b).unwrap();
        let lhs = phi_eval(t.as_ref(), &ab, &m).unwrap();
        let rhs = phi_eval(t.as_ref(), &a, &phi_eval(t.as_ref(), &b, &m).unwrap()).unwrap();
        if lhs != rhs {
            bad.push(format!("({a})({b}) at level {n}"));
        }
    }
    r.record("phi(w1 w2) = phi(w1) phi(w2)", tally("triples", 1000, bad));
    r
}

pub fn tower_injectivity(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("tower-injectivity");
    let t = match paper(cfg, 3) {
        Ok(t) if t.num_levels() > 3 => t,
        Ok(_) => {
            r.record("build", Err("needs levels up to 3".into()));
            return r;
        }
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    let ws = enumerate_wn(2).unwrap();
    // the points to try, all below m_3
    let probes: Vec<Nat> = (0..8u32).map(|k| t.start(2) + k).chain((0..120u32).map(|k| t.start(1) + k)).collect();
    let mut sigs: HashMap<Vec<Nat>, &Word> = HashMap::new();
    let mut bad = Vec::new();
    for w in &ws {
        let sig: Vec<Nat> = probes.iter().map(|m| phi_eval(&t, w, m).unwrap()).collect();
        if let Some(prev) = sigs.insert(sig, w) {
            bad.push(format!("{prev} and {w} agree on every probe"));
        }
    }
    r.record("phi separates W_2 below m_3", tally("words", ws.len(), bad));
    r
}

pub fn coding(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("coding");
    let mut g = rng(cfg, 4);
    let mut bad = Vec::new();
    for k in 0..100_000u64 {
        let n = Nat::from(if k % 2 == 0 { k } else { g.gen::<u64>() });
        if hash_seq(&unhash_seq(&n)) != n {
            bad.push(n.to_string());
        }
        let len = g.gen_range(0..40);
        let s = BitPrefix::new((0..len).map(|_| g.gen()).collect());
        if unhash_seq(&hash_seq(&s)) != s {
            bad.push(s.to_string());
        }
    }
    r.record("# round trip", tally("values", 100_000, bad));
    let mut bad = Vec::new();
    for k in 0..100_000u64 {
        let p = if k % 2 == 0 { k } else { g.gen_range(0..1u64 << 40) };
        let (i, j) = unpair(p);
        if pair(i, j) != p {
            bad.push(p.to_string());
        }
        let (i, j) = (g.gen_range(0..1u64 << 20), g.gen_range(0..1u64 << 20));
        if unpair(pair(i, j)) != (i, j) {
            bad.push(format!("({i}, {j})"));
        }
    }
    r.record("pairing round trip", tally("values", 100_000, bad));
    let k = pair(8, 8) as usize;
    let mut seen = HashSet::new();
    let mut bad = Vec::new();
    for rank in 0..40_320u32 {
        let p = Perm::unrank(8, &Nat::from(rank)).unwrap();
        let mut images: Vec<u64> = p.images().iter().map(|&x| x as u64).collect();
        images.extend(8..=16);
        let f = WindowPerm::new(images).unwrap();
        match chi_prefix(&f, k) {
            Ok(c) => {
                if !seen.insert(c) {
                    bad.push(format!("rank {rank} repeats a code"));
                }
            }
            Err(e) => bad.push(format!("rank {rank}: {e}")),
        }
    }
    r.record("chi injective on Sym([0, 8))", tally("permutations", 40_320, bad));
    r
}
