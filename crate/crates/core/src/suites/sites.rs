use super::samples::{generator_pool, random_group_word, random_point};
use super::{tally, SuiteConfig, SuiteReport};
use crate::coding::CodeMap;
use crate::dpipeline::{is_homogeneous, order_h, order_interval, Budgets, PipelineTrace};
use crate::map::{MapRef, Perturbed, PointMap};
use crate::mcg::{maxmap_eval, membership, word_eval, GeneratorSpec, MemberWindow, WordMap};
use crate::scenarios::{caught_family, conflict, fresh, Scenario};
use crate::surgery::{e_set, graft_unchecked, random_spaced_triple, surgery as graft, PartialInjection};
use crate::tower::{phi_eval, PaperTower, TowerKind, TowerRef, ToyTower};
use crate::words::Sign;
use crate::{Nat, TriBool};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

fn n(x: u64) -> Nat {
    Nat::from(x)
}

fn towers(cfg: &SuiteConfig) -> Result<Vec<TowerRef>, String> {
    let toy: TowerRef = Arc::new(ToyTower::new(cfg.toy_levels).map_err(|e| e.to_string())?);
    let paper: TowerRef = Arc::new(PaperTower::build(4).map_err(|e| e.to_string())?);
    Ok(vec![toy, paper])
}

pub const SURGERY_WINDOW: u64 = 10_000;

pub fn surgery(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("surgery");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 5);
    let (mut bij, mut cases, mut local) = (Vec::new(), Vec::new(), Vec::new());
    let trials = 1000;
    for k in 0..trials {
        let (g, f, d) = random_spaced_triple(&mut rng, SURGERY_WINDOW, 12);
        let g: MapRef = Arc::new(g);
        let res = match graft(g.clone(), &d, &f) {
            Ok(x) => x,
            Err(e) => {
                bij.push(format!("triple {k}: {e}"));
                continue;
            }
        };
        let mut seen = vec![false; SURGERY_WINDOW as usize];
        let e: BTreeSet<Nat> = e_set(g.as_ref(), &d, &f).unwrap().into_iter().collect();
        for m in 0..SURGERY_WINDOW {
            let y = res.total(&n(m)).unwrap();
            let yi = crate::bignum::to_u64(&y).unwrap() as usize;
            let gm = g.total(&n(m)).unwrap();
            if seen[yi] || (yi as u64 == m) != (gm == n(m)) {
                bij.push(format!("triple {k} at {m}"));
                break;
            }
            seen[yi] = true;
            if !e.contains(&n(m)) && y != gm {
                cases.push(format!("triple {k}: C-point {m} moved off g"));
            }
        }
        for m in &d {
            let fm = f.get(m).unwrap();
            if *fm != g.total(m).unwrap() && res.total(m).unwrap() != *fm {
                cases.push(format!("triple {k}: D-point {m}"));
            }
        }
        if k % 10 == 0 {
            // add pairs to f away from D ∪ f[D]
            let used: BTreeSet<Nat> = d.iter().cloned().chain(d.iter().map(|m| f.get(m).unwrap().clone())).collect();
            let mut f2 = PartialInjection::new();
            for m in &d {
                f2.insert(m.clone(), f.get(m).unwrap().clone()).unwrap();
            }
            for _ in 0..20 {
                let (a, b) = (n(rng.gen_range(0..SURGERY_WINDOW)), n(rng.gen_range(0..SURGERY_WINDOW)));
                if !used.contains(&a) && !used.contains(&b) && !f2.contains(&a) && !f2.in_range(&b) {
                    f2.insert(a, b).unwrap();
                }
            }
            let res2 = graft_unchecked(g.clone(), &d, &f2).unwrap();
            if (0..SURGERY_WINDOW).any(|m| res2.total(&n(m)).unwrap() != res.total(&n(m)).unwrap()) {
                local.push(format!("triple {k}"));
            }
        }
    }
    r.record("bijective on the window, fix = fix(g)", tally("triples", trials, bij));
    r.record("f on D, g on C", tally("triples", trials, cases));
    r.record("changing f off D ∪ f[D] changes nothing", tally("triples", trials / 10, local));
    r
}

/// Homogeneity of `D_3`, `D_4`, `D_6` under the orders they were cut with.
fn homogeneity(t: &TowerRef, s: &Scenario, tr: &PipelineTrace, h: Option<&MapRef>) -> Vec<String> {
    let f = s.f.as_ref();
    let mut bad = Vec::new();
    let fi = |a: &Nat| f.apply(a).ok().flatten();
    let by_interval = |a: &Nat, b: &Nat| match (fi(a), fi(b)) {
        (Some(x), Some(y)) => order_interval(t.as_ref(), &x, &y),
        _ => TriBool::False,
    };
    if !is_homogeneous(&tr.d3.points, &by_interval) {
        bad.push(format!("{}: D_3 not homogeneous", s.name));
    }
    if let Some(h) = h {
        let by_h = |a: &Nat, b: &Nat| match (fi(a), fi(b)) {
            (Some(x), Some(y)) => order_h(t.as_ref(), h.as_ref(), &x, &y),
            _ => TriBool::False,
        };
        if !is_homogeneous(&tr.d4.points, &by_h) {
            bad.push(format!("{}: D_4 not homogeneous", s.name));
        }
    }
    let by_f = |a: &Nat, b: &Nat| order_h(t.as_ref(), f, a, b);
    if !is_homogeneous(&tr.d6.points, &by_f) {
        bad.push(format!("{}: D_6 not homogeneous", s.name));
    }
    bad
}

pub fn dpipeline(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("dpipeline");
    let ts = match towers(cfg) {
        Ok(ts) => ts,
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    let b = Budgets::default();
    for t in &ts {
        let k = t.kind();
        let mut inv = Vec::new();
        let mut total = 0;
        let mut family = Vec::new();
        for s in caught_family(t) {
            let tr = s.run(b.clone());
            if !(tr.lambda.verdict.is_true() && tr.d_final == tr.d2.points()) {
                family.push(format!("{}: λ = {}, d_final from {}", s.name, tr.lambda.verdict, tr.d_final_from));
            }
            inv.extend(tr.violations(t.as_ref(), s.f.as_ref()));
            inv.extend(homogeneity(t, &s, &tr, None));
            total += 1;
        }
        r.record(&format!("{k}: caught family keeps D_2 and λ = True"), tally("maps", 3, family));

        let s = fresh(t);
        let tr = s.run(b.clone());
        inv.extend(tr.violations(t.as_ref(), s.f.as_ref()));
        inv.extend(homogeneity(t, &s, &tr, None));
        total += 1;
        let ok = tr.caught().is_false() && tr.d2_spaced.is_true() && tr.d2.elements.len() >= 2;
        r.record(
            &format!("{k}: fresh map is uncaught with a spaced D_2"),
            if ok {
                Ok(format!("|D_2| = {}, λ(D_final) = {}", tr.d2.elements.len(), tr.lambda.verdict))
            } else {
                Err(format!("caught = {}, D_2 spaced = {}", tr.caught(), tr.d2_spaced))
            },
        );

        let s = conflict(t);
        let tr = s.run(b.clone());
        inv.extend(tr.violations(t.as_ref(), s.f.as_ref()));
        inv.extend(homogeneity(t, &s, &tr, s.known.first().map(|k| &k.map)));
        total += 1;
        let sem = tr.semaphore.clone().unwrap_or_default();
        let mut bad = Vec::new();
        if tr.d5.len() >= tr.d4.points.len() {
            bad.push(format!("D_5 = {:?} does not thin D_4 = {:?}", tr.d5, tr.d4.points));
        }
        if sem.points.is_empty() {
            bad.push("empty semaphore".into());
        }
        if !sem.points.windows(2).all(|p| p[0] < p[1]) {
            bad.push("semaphore not increasing".into());
        }
        if let (Some(w), Some(h)) = (&tr.w_f.word, s.known.first()) {
            for y in &sem.points {
                if h.map.total(y).ok() != phi_eval(t.as_ref(), w, y).ok() {
                    bad.push(format!("h and φ(w_f) differ at {y}"));
                }
            }
        } else {
            bad.push("no w_f".into());
        }
        r.record(&format!("{k}: conflict thins D_4 with a nonempty semaphore"), tally("checks", 1, bad));
        r.record(&format!("{k}: trace invariants"), tally("traces", total, inv));
    }
    r
}

struct RoundTrip {
    fails: Vec<String>,
    flips: Vec<String>,
    perturbed: Vec<String>,
    count: usize,
}

/// Membership of word graphs: verdict, recovered length and signs, the
/// verdict under doubled budgets, and a one-point perturbation.
fn round_trips(t: &TowerRef, words: usize, seed: u64) -> RoundTrip {
    let paper = t.kind() == TowerKind::Paper;
    let window = MemberWindow { max_level: if paper { 3 } else { 10 }, offsets: 6 };
    let b = Budgets::default();
    let (pool, registry) = generator_pool(t, window.max_level, &b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = RoundTrip { fails: Vec::new(), flips: Vec::new(), perturbed: Vec::new(), count: 0 };
    for _ in 0..words {
        // the candidate chain needs two levels that can hold the whole word
        let w = random_group_word(&mut rng, t, window.max_level, window.max_level - 1, &pool);
        out.count += 1;
        let h: MapRef = Arc::new(WordMap { tower: t.clone(), word: w.clone() });
        let rep = membership(t, h.as_ref(), window, &b, &registry);
        let signs: Vec<i8> = w.signs().iter().map(|s| s.as_i8()).collect();
        let rec_ok = rep.recovered.as_ref().is_some_and(|rc| rc.length == w.len() && rc.signs == signs);
        if !rep.verdict.is_true() || !rec_ok {
            out.fails.push(format!("{w}: {} recovered {:?}", rep.verdict, rep.recovered.map(|rc| rc.word.to_string())));
        }
        let again = membership(t, h.as_ref(), window, &b.doubled(), &registry);
        if rep.verdict.known().is_some() && again.verdict.known() != rep.verdict.known() {
            out.flips.push(format!("{w}: {} then {}", rep.verdict, again.verdict));
        }
        // move one point that is not an m_n
        let lvl = rng.gen_range(1..=window.max_level);
        let at = t.start(lvl) + rng.gen_range(1..window.offsets);
        let to = t.start(lvl) + window.offsets + rng.gen_range(0..100u64);
        let bad = Perturbed::new(h.clone(), at, to).expect("in window");
        for budgets in [b.clone(), b.doubled()] {
            let rep = membership(t, &bad, window, &budgets, &registry);
            if !rep.verdict.is_false() || rep.counterexample.is_none() {
                out.perturbed.push(format!("{w}: perturbed graph gave {}", rep.verdict));
            }
        }
    }
    out
}

pub fn mcg(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("mcg");
    let ts = match towers(cfg) {
        Ok(ts) => ts,
        Err(e) => {
            r.record("build", Err(e));
            return r;
        }
    };
    let b = Budgets::default();
    for t in &ts {
        let k = t.kind();
        let words = if k == TowerKind::Paper { 10 } else { 50 };
        let rt = round_trips(t, words, cfg.seed ^ 6);
        r.record(&format!("{k}: word graphs are members, word recovered"), tally("words", rt.count, rt.fails));
        r.record(&format!("{k}: verdicts stable under doubled budgets"), tally("words", rt.count, rt.flips));
        r.record(
            &format!("{k}: one-point perturbations are refuted"),
            tally("perturbations", 2 * rt.count, rt.perturbed),
        );

        let mut bad = Vec::new();
        let mut checked = 0;
        for s in caught_family(t) {
            let g = GeneratorSpec::from_injection(t, &s.name, s.f.clone(), &b, &[]);
            if !g.caught.is_true() {
                bad.push(format!("{} not caught", s.name));
                continue;
            }
            let phi = CodeMap::new(t.clone(), g.x.clone());
            let top = if k == TowerKind::Paper { 3 } else { 10 };
            for m in (MemberWindow { max_level: top, offsets: 20 }).points(t) {
                checked += 1;
                if maxmap_eval(&g, &m).ok() != phi.total(&m).ok() {
                    bad.push(format!("{} at {m}", s.name));
                }
            }
        }
        r.record(&format!("{k}: caught generators are φ(x)"), tally("points", checked, bad));

        let s = fresh(t);
        let g = GeneratorSpec::from_injection(t, "fresh", s.f.clone(), &b, &[]);
        let d = g.trace.as_ref().map(|tr| tr.d_final.clone()).unwrap_or_default();
        let bad: Vec<String> =
            d.iter().filter(|m| maxmap_eval(&g, m).ok() != s.f.total(m).ok()).map(|m| m.to_string()).collect();
        let res = if d.is_empty() { Err("empty final site".to_string()) } else { tally("site points", d.len(), bad) };
        r.record(&format!("{k}: uncaught h agrees with its generator on D(h)"), res);
    }
    r.record("paper: fixed points of words with no surgery on the path", fixed_points(&ts[1], cfg.seed ^ 7));
    r
}

/// Counts fixed points of random `Ċ`-words in `I_2 ∪ I_3`, split by whether a
/// generator left its `φ(x)` somewhere on the path. Points where the free
/// word restricts to `∅`, or to something outside `W_n`, are not counted:
/// codes that differ only past bit `n` can cancel there.
fn fixed_points(t: &TowerRef, seed: u64) -> Result<String, String> {
    let b = Budgets::default();
    let (pool, _) = generator_pool(t, 3, &b);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut plain, mut grafted, mut collapsed, mut points) = (Vec::new(), 0, 0, 0);
    for _ in 0..100 {
        let w = random_group_word(&mut rng, t, 3, 3, &pool);
        let free = w.underlying(3).map_err(|e| e.to_string())?;
        for lvl in [2, 3] {
            let r = free.restrict(lvl).map_err(|e| e.to_string())?;
            for _ in 0..5 {
                let m = random_point(&mut rng, t, lvl);
                if r.is_empty() || r.len() > lvl {
                    collapsed += 1;
                    continue;
                }
                points += 1;
                let Ok(y) = word_eval(&w, &m) else { continue };
                if y != m {
                    continue;
                }
                if path_grafts(&w, &m) {
                    grafted += 1;
                } else {
                    plain.push(format!("{w} fixes a point of I_{lvl}"));
                }
            }
        }
    }
    tally("points", points, plain)
        .map(|s| format!("{s}; {grafted} fixed points on paths through E-sets; {collapsed} points skipped"))
}

fn path_grafts(w: &crate::mcg::GroupWordSpec, m: &Nat) -> bool {
    let mut y = m.clone();
    for (g, s) in w.letters().iter().rev() {
        let via_phi = match s {
            Sign::Pos => g.phi_value(&y),
            Sign::Neg => g.phi_value_inverse(&y),
        };
        let next = match s {
            Sign::Pos => maxmap_eval(g, &y),
            Sign::Neg => crate::mcg::maxmap_eval_inverse(g, &y),
        };
        match (via_phi, next) {
            (Ok(a), Ok(c)) if a == c => y = c,
            _ => return true,
        }
    }
    false
}
