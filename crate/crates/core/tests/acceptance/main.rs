//! The acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Sizes, sample counts and time limits are pinned below.

mod oracle;

use mcg_core::coding::{hash_seq, pair, unhash_seq, unpair, BitPrefix};
use mcg_core::dpipeline::Budgets;
use mcg_core::map::{MapRef, Perturbed, PointMap};
use mcg_core::mcg::{membership, MemberWindow, WordMap};
use mcg_core::scenarios::{caught_family, conflict, fresh};
use mcg_core::suites::random_below;
use mcg_core::suites::samples::{generator_pool, random_group_word, random_word};
use mcg_core::surgery::{random_spaced_triple, surgery};
use mcg_core::tower::{phi_eval, PaperTower, Perm, Tower, TowerKind, TowerRef, ToyTower};
use mcg_core::words::{enumerate_wn, w_count, w_rank, w_unrank, GeneratorCode, Letter, Sign, Word};
use mcg_core::Nat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

const BUILD_LIMIT: Duration = Duration::from_secs(60);
const SURGERY_LIMIT: Duration = Duration::from_secs(30);
const SURGERY_WINDOW: u64 = 10_000;
const SURGERY_TRIPLES: usize = 1000;
const REGULARITY_WORDS: usize = 100;
const I2_SAMPLES: usize = 1000;
const LEVEL3_SAMPLES: usize = 1000;
const TOY_LEVELS: usize = 20;
const TOY_ROUND_TRIPS: usize = 50;
const PAPER_ROUND_TRIPS: usize = 10;
const PERM_65_SAMPLES: usize = 1000;
/// every criterion allows zero violations
const TOLERANCE: usize = 0;

type Outcome = Result<String, String>;

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + salt)
}

fn verdict(what: &str, count: usize, bad: Vec<String>) -> Outcome {
    if bad.len() > TOLERANCE {
        Err(format!("{} of {count} {what} violate; first: {}", bad.len(), bad[0]))
    } else {
        Ok(format!("{count} {what}"))
    }
}

static PAPER3: OnceLock<(Arc<PaperTower>, Duration)> = OnceLock::new();

fn paper3() -> Arc<PaperTower> {
    PAPER3
        .get_or_init(|| {
            let t0 = Instant::now();
            let t = PaperTower::build(3).expect("levels 0-3 build");
            (Arc::new(t), t0.elapsed())
        })
        .0
        .clone()
}

fn paper4() -> TowerRef {
    static T: OnceLock<TowerRef> = OnceLock::new();
    T.get_or_init(|| Arc::new(PaperTower::build(4).expect("levels 0-4 build"))).clone()
}

fn toy() -> TowerRef {
    static T: OnceLock<TowerRef> = OnceLock::new();
    T.get_or_init(|| Arc::new(ToyTower::new(TOY_LEVELS).expect("toy tower"))).clone()
}

/// 65! by schoolbook multiplication on decimal digits.
fn factorial_digits(n: u32) -> String {
    let mut digits = vec![1u32]; // least significant first
    for k in 2..=n {
        let mut carry = 0;
        for d in digits.iter_mut() {
            let x = *d * k + carry;
            *d = x % 10;
            carry = x / 10;
        }
        while carry > 0 {
            digits.push(carry % 10);
            carry /= 10;
        }
    }
    digits.iter().rev().map(|d| char::from(b'0' + *d as u8)).collect()
}

fn tower_soundness() -> Outcome {
    let t = paper3();
    let took = PAPER3.get().unwrap().1;
    let mut bad = Vec::new();
    if took >= BUILD_LIMIT {
        bad.push(format!("build took {took:?}"));
    }
    for lv in t.levels().iter().skip(1) {
        if let Err(e) = lv.check_a() {
            bad.push(e.to_string());
        }
        if let Err(e) = lv.check_b_exhaustive() {
            bad.push(e.to_string());
        }
    }
    if t.level(1).l() != 5 {
        bad.push(format!("|W_1| = {}", t.level(1).l()));
    }
    let sizes = [(0, "2".to_string()), (1, "120".to_string()), (2, factorial_digits(65))];
    for (n, want) in &sizes {
        let got = t.size(*n).to_string();
        if &got != want {
            bad.push(format!("|I_{n}| = {got}, expected {want}"));
        }
    }
    verdict("checks", 3 + 2 * 3 + 1, bad)
        .map(|s| format!("{s}; levels 0-3 built in {:.2?}; |I_2| has {} digits", took, sizes[2].1.len()))
}

fn regularity() -> Outcome {
    let t = paper3();
    let tr: TowerRef = t.clone();
    let mut g = rng(2);
    let mut bad = Vec::new();
    let mut words = 0;
    let mut evals = 0;
    while words < REGULARITY_WORDS {
        let w = random_word(&mut g, 3, 2);
        if w.restrict(1).unwrap().is_empty() {
            continue;
        }
        words += 1;
        for off in 0..120u32 {
            let m = t.start(1) + off;
            evals += 1;
            if phi_eval(t.as_ref(), &w, &m).unwrap() == m {
                bad.push(format!("{w} fixes {m}"));
            }
        }
        for _ in 0..I2_SAMPLES {
            let m = t.start(2) + random_below(&mut g, tr.size(2));
            evals += 1;
            if phi_eval(t.as_ref(), &w, &m).unwrap() == m {
                bad.push(format!("{w} fixes a point of I_2"));
            }
        }
    }
    verdict("evaluations", evals, bad).map(|s| format!("{s} over {words} words, no fixed points in I_1 ∪ I_2"))
}

fn surgery_lemma() -> Outcome {
    let mut g = rng(3);
    let t0 = Instant::now();
    let mut bad = Vec::new();
    for k in 0..SURGERY_TRIPLES {
        let (p, f, d) = random_spaced_triple(&mut g, SURGERY_WINDOW, 12);
        let fix_g: Vec<u64> = (0..SURGERY_WINDOW).filter(|&m| p.images()[m as usize] == m).collect();
        let p: MapRef = Arc::new(p);
        let res = match surgery(p.clone(), &d, &f) {
            Ok(r) => r,
            Err(e) => {
                bad.push(format!("triple {k}: {e}"));
                continue;
            }
        };
        let mut seen = vec![false; SURGERY_WINDOW as usize];
        let mut fix = Vec::new();
        for m in 0..SURGERY_WINDOW {
            let y = match res.total(&Nat::from(m)).map(|y| y.to_u64_digits()) {
                Ok(v) => v.first().copied().unwrap_or(0),
                Err(e) => {
                    bad.push(format!("triple {k} at {m}: {e}"));
                    break;
                }
            };
            if y >= SURGERY_WINDOW || seen[y as usize] {
                bad.push(format!("triple {k}: {m} ↦ {y} repeats or leaves the window"));
                break;
            }
            seen[y as usize] = true;
            if y == m {
                fix.push(m);
            }
        }
        if fix != fix_g {
            bad.push(format!("triple {k}: fix {fix:?} vs fix(g) {fix_g:?}"));
        }
    }
    let took = t0.elapsed();
    if took >= SURGERY_LIMIT {
        bad.push(format!("took {took:?}"));
    }
    verdict("triples", SURGERY_TRIPLES, bad).map(|s| format!("{s} on [0, {SURGERY_WINDOW}) in {took:.2?}"))
}

fn to_word(n: usize, w: &[u64]) -> Word {
    let letters = w
        .iter()
        .map(|&c| Letter::new(GeneratorCode::from_value(n, c >> 1), if c & 1 == 0 { Sign::Pos } else { Sign::Neg }));
    Word::reduce(n, letters).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let t = paper3();
    let levels: Vec<oracle::Level> = (0..=3).map(oracle::Level::new).collect();
    let starts = oracle::starts(&levels);
    let mut bad = Vec::new();
    let mut checks = 0usize;
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            bad.push(what);
        }
    };
    for (n, lv) in levels.iter().enumerate() {
        check(&starts[n] == t.start(n), format!("m_{n}"));
        let ours: Vec<Word> = lv.words.iter().map(|w| to_word(n, w)).collect();
        check(ours == enumerate_wn(n).unwrap(), format!("W_{n} enumeration"));
    }
    let mut g = rng(4);
    for n in 0..=2 {
        let lv = &levels[n];
        for w in &lv.words {
            let word = to_word(n, w);
            if n > 0 {
                let c = t.c_eval(n, &word).unwrap();
                check(c.images() == lv.c(w).as_slice(), format!("c_{n}({word})"));
            }
            let offs: Vec<Nat> = match n {
                0 => vec![Nat::from(0u32), Nat::from(1u32)],
                1 => (0..120u32).map(Nat::from).collect(),
                _ => (0..20).map(|_| random_below(&mut g, t.size(2))).collect(),
            };
            for off in &offs {
                let m = t.start(n) + off;
                let want = t.start(n) + lv.act(w, off);
                check(phi_eval(t.as_ref(), &word, &m).unwrap() == want, format!("phi({word}) at {m}"));
            }
        }
        // diffword against exhaustive search over W_n
        let pairs: Vec<(Nat, Nat)> = match n {
            0 => vec![(0u32, 0u32), (0, 1), (1, 0), (1, 1)]
                .into_iter()
                .map(|(a, b)| (Nat::from(a), Nat::from(b)))
                .collect(),
            1 => (0..120u32).flat_map(|a| (0..120u32).map(move |b| (Nat::from(a), Nat::from(b)))).collect(),
            _ => (0..200)
                .map(|k| {
                    let a = random_below(&mut g, t.size(2));
                    let b = if k % 2 == 0 {
                        let w = &lv.words[g.gen_range(0..lv.l())];
                        lv.act(w, &a)
                    } else {
                        random_below(&mut g, t.size(2))
                    };
                    (a, b)
                })
                .collect(),
        };
        for (a, b) in pairs {
            let found = lv.diffwords(&a, &b);
            let got = t.diffword(n, &a, &b).unwrap();
            let want = match found.as_slice() {
                [] => None,
                [w] => Some(to_word(n, w)),
                _ => {
                    check(false, format!("{} words take {a} to {b} at level {n}", found.len()));
                    continue;
                }
            };
            check(got == want, format!("diffword at level {n} ({a} to {b})"));
        }
    }
    let lv = &levels[3];
    for k in 0..LEVEL3_SAMPLES {
        let w = &lv.words[g.gen_range(0..lv.l())];
        let word = to_word(3, w);
        if k < 50 {
            check(t.c_eval(3, &word).unwrap().images() == lv.c(w).as_slice(), format!("c_3({word})"));
        }
        let off = random_below(&mut g, t.size(3));
        let img = lv.act(w, &off);
        check(
            phi_eval(t.as_ref(), &word, &(t.start(3) + &off)).unwrap() == t.start(3) + &img,
            format!("phi({word}) on I_3"),
        );
        check(t.diffword(3, &off, &img).unwrap() == Some(word.clone()), format!("diffword on I_3 for {word}"));
    }
    verdict("comparisons", checks, bad).map(|s| format!("{s} with the brute-force model"))
}

fn pipeline_scenarios() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for t in [toy(), paper4()] {
        let k = t.kind();
        let b = Budgets::default();
        for s in caught_family(&t) {
            let tr = s.run(b.clone());
            runs += 1;
            if !tr.lambda.verdict.is_true() || tr.d_final != tr.d2.points() {
                bad.push(format!("{k} {}: λ = {}, final site from {}", s.name, tr.lambda.verdict, tr.d_final_from));
            }
            bad.extend(tr.violations(t.as_ref(), s.f.as_ref()).into_iter().map(|v| format!("{k} {}: {v}", s.name)));
        }
        let s = fresh(&t);
        let tr = s.run(b.clone());
        runs += 1;
        if !(tr.caught().is_false() && tr.d2_spaced.is_true() && tr.d2.elements.len() >= 2) {
            bad.push(format!("{k} fresh: caught = {}, D_2 spaced = {}", tr.caught(), tr.d2_spaced));
        }
        bad.extend(tr.violations(t.as_ref(), s.f.as_ref()).into_iter().map(|v| format!("{k} fresh: {v}")));
        let s = conflict(&t);
        let tr = s.run(b.clone());
        runs += 1;
        let sem = tr.semaphore.clone().unwrap_or_default();
        let thinned = tr.d5.len() < tr.d4.points.len() && tr.d5.iter().all(|m| tr.d4.points.contains(m));
        if !thinned || sem.points.is_empty() {
            bad.push(format!(
                "{k} conflict: |D_5| = {}, |D_4| = {}, |ȳ| = {}",
                tr.d5.len(),
                tr.d4.points.len(),
                sem.points.len()
            ));
        }
        bad.extend(tr.violations(t.as_ref(), s.f.as_ref()).into_iter().map(|v| format!("{k} conflict: {v}")));
    }
    verdict("pipeline runs", runs, bad)
        .map(|s| format!("{s} on toy ({} levels) and paper (levels 0-4)", TOY_LEVELS + 1))
}

fn membership_round_trips() -> Outcome {
    let mut bad = Vec::new();
    let mut total = 0;
    for (t, count) in [(toy(), TOY_ROUND_TRIPS), (paper4(), PAPER_ROUND_TRIPS)] {
        let k = t.kind();
        let paper = k == TowerKind::Paper;
        let window = MemberWindow { max_level: if paper { 3 } else { 10 }, offsets: 6 };
        let b = Budgets::default();
        let (pool, registry) = generator_pool(&t, window.max_level, &b);
        let mut g = rng(if paper { 61 } else { 60 });
        for _ in 0..count {
            total += 1;
            let w = random_group_word(&mut g, &t, window.max_level, window.max_level - 1, &pool);
            let h: MapRef = Arc::new(WordMap { tower: t.clone(), word: w.clone() });
            let signs: Vec<i8> = w.signs().iter().map(|s| s.as_i8()).collect();
            let rep = membership(&t, h.as_ref(), window, &b, &registry);
            let rec = rep.recovered.as_ref().map(|r| (r.length, r.signs.clone()));
            if !rep.verdict.is_true() || rec != Some((w.len(), signs)) {
                bad.push(format!("{k} {w}: {} recovered {rec:?}", rep.verdict));
            }
            let again = membership(&t, h.as_ref(), window, &b.doubled(), &registry);
            if again.verdict != rep.verdict {
                bad.push(format!("{k} {w}: {} under doubled budgets", again.verdict));
            }
            let lvl = g.gen_range(1..=window.max_level);
            let at = t.start(lvl) + g.gen_range(1..window.offsets);
            let to = t.start(lvl) + window.offsets + g.gen_range(0..100u64);
            let moved = Perturbed::new(h.clone(), at.clone(), to).unwrap();
            let mut prev = None;
            for budgets in [b.clone(), b.doubled()] {
                let rep = membership(&t, &moved, window, &budgets, &registry);
                if !rep.verdict.is_false() || rep.counterexample.is_none() {
                    bad.push(format!("{k} {w} moved at {at}: {}", rep.verdict));
                }
                if prev.is_some_and(|p| p != rep.verdict) {
                    bad.push(format!("{k} {w} moved at {at}: verdict changed under doubled budgets"));
                }
                prev = Some(rep.verdict);
            }
        }
    }
    verdict("graphs", total, bad)
        .map(|s| format!("{s} ({TOY_ROUND_TRIPS} toy, {PAPER_ROUND_TRIPS} paper), each perturbed once"))
}

fn bijections() -> Outcome {
    let mut g = rng(7);
    let mut bad = Vec::new();
    let mut checks = 0usize;
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            bad.push(what);
        }
    };
    for k in 0..20_000u64 {
        let n = Nat::from(if k < 10_000 { k } else { g.gen::<u64>() });
        check(hash_seq(&unhash_seq(&n)) == n, format!("# at {n}"));
        let s = BitPrefix::new((0..g.gen_range(0..64)).map(|_| g.gen()).collect());
        check(unhash_seq(&hash_seq(&s)) == s, format!("# of {s}"));
    }
    for p in 0..20_000u64 {
        let (i, j) = unpair(p);
        check(pair(i, j) == p, format!("pair at {p}"));
    }
    for i in 0..200 {
        for j in 0..200 {
            check(unpair(pair(i, j)) == (i, j), format!("unpair({i}, {j})"));
        }
    }
    for n in 0..=3 {
        for i in 0..w_count(n).unwrap() {
            check(w_unrank(n, i).and_then(|w| w_rank(&w)).ok() == Some(i), format!("W_{n} index {i}"));
        }
    }
    for size in 0..=8usize {
        let total: u64 = (1..=size as u64).product();
        for r in 0..total {
            let r = Nat::from(r);
            let p = Perm::unrank(size, &r).unwrap();
            check(p.rank() == r, format!("S_{size} rank {r}"));
            check(oracle::unrank(size, &r) == p.images(), format!("S_{size} order at {r}"));
        }
    }
    let order: Nat = (1..=65u64).map(Nat::from).product();
    for _ in 0..PERM_65_SAMPLES {
        let r = random_below(&mut g, &order);
        let p = Perm::unrank(65, &r).unwrap();
        check(p.rank() == r && Perm::from_images(p.images().to_vec()).unwrap().rank() == r, format!("S_65 rank {r}"));
    }
    verdict("round trips", checks, bad)
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 tower soundness", tower_soundness),
        ("2 regularity on I_1 ∪ I_2", regularity),
        ("3 surgery lemma", surgery_lemma),
        ("4 oracle equivalence", oracle_equivalence),
        ("5 D-pipeline scenarios", pipeline_scenarios),
        ("6 membership round trips", membership_round_trips),
        ("7 bijection round trips", bijections),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match out {
            Ok(d) => println!("PASS criterion {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
