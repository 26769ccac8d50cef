use crate::{Cli, CliError, Cmd, DpipeCmd, Global, TowerArg};
use mcg_core::dpipeline::{Budgets, Known, Pipeline};
use mcg_core::injection::InjectionSpec;
use mcg_core::map::PointMap;
use mcg_core::mcg::{membership, MemberWindow};
use mcg_core::suites::{self, SuiteConfig, SuiteReport, SUITES};
use mcg_core::surgery::{e_set, surgery};
use mcg_core::tower::cache::{level_path, load_tower, save_tower};
use mcg_core::tower::paper::PAPER_LEVEL_CAP;
use mcg_core::tower::{phi_eval, phi_eval_inverse, PaperTower, Tower, TowerRef, ToyTower};
use mcg_core::words::Word;
use mcg_core::Nat;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::sync::Arc;

const PAPER_DEFAULT: usize = 3;
const TOY_DEFAULT: usize = 20;

type Out = Result<(String, u8), CliError>;

pub fn run(cli: &Cli) -> Out {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::TowerBuild => tower_build(g),
        Cmd::Eval { word, point, inverse } => eval(g, word, point, *inverse),
        Cmd::Dpipe { cmd: DpipeCmd::Trace { f, name } } => dpipe(g, f, name),
        Cmd::SurgeryDemo { g: gs, d, f, window } => surgery_demo(g, gs, d, f, *window),
        Cmd::Member { h, window, offsets, known } => {
            let text = std::fs::read_to_string(h).map_err(|e| CliError::parse(format!("{}: {e}", h.display())))?;
            member(g, &text, *window, *offsets, known)
        }
        Cmd::Verify { suite, seed } => verify(g, suite, *seed),
    }
}

fn nat(s: &str) -> Result<Nat, CliError> {
    Nat::parse_bytes(s.trim().as_bytes(), 10).ok_or_else(|| CliError::parse(format!("not a natural number: {s:?}")))
}

fn spec(s: &str) -> Result<InjectionSpec, CliError> {
    s.parse().map_err(CliError::parse)
}

fn budgets(g: &Global) -> Result<Budgets, CliError> {
    let mut b = Budgets::default();
    for kv in &g.budgets {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::parse(format!("expected stage=n, got {kv:?}")))?;
        let n = v.trim().parse().map_err(|_| CliError::parse(format!("bad budget value {v:?}")))?;
        b.set(k.trim(), n).map_err(CliError::parse)?;
    }
    Ok(b)
}

fn paper_level(g: &Global) -> usize {
    g.max_level.unwrap_or(PAPER_DEFAULT)
}

/// The paper tower from the cache when every level file is there.
fn paper(g: &Global) -> Result<PaperTower, CliError> {
    let max = paper_level(g);
    if let Some(dir) = &g.cache_dir {
        if max <= PAPER_LEVEL_CAP {
            if let Some(t) = load_tower(dir, max)? {
                return Ok(t);
            }
        }
    }
    Ok(PaperTower::build(max)?)
}

fn tower(g: &Global) -> Result<TowerRef, CliError> {
    Ok(match g.tower {
        TowerArg::Paper => Arc::new(paper(g)?),
        TowerArg::Toy => Arc::new(match &g.toy_sizes {
            Some(s) => ToyTower::with_sizes(s.iter().map(|x| nat(x)).collect::<Result<_, _>>()?)?,
            None => ToyTower::new(g.max_level.unwrap_or(TOY_DEFAULT))?,
        }),
    })
}

fn emit(g: &Global, v: &Value, text: impl FnOnce() -> String) -> String {
    if g.json {
        let mut s = serde_json::to_string_pretty(v).expect("values serialize");
        s.push('\n');
        s
    } else {
        text()
    }
}

fn size_json(n: &Nat) -> Value {
    let s = n.to_string();
    if s.len() <= 100 {
        json!({ "value": s, "digits": s.len() })
    } else {
        json!({ "digits": s.len() })
    }
}

fn tower_build(g: &Global) -> Out {
    let mut cached = Vec::new();
    // never read the cache here: a rebuild is how a corrupt cache gets replaced
    let t: TowerRef = match (g.tower, &g.cache_dir) {
        (TowerArg::Paper, dir) => {
            let p = PaperTower::build(paper_level(g))?;
            if let Some(dir) = dir {
                save_tower(dir, &p)?;
                cached = (0..p.num_levels())
                    .map(|n| level_path(dir, n).file_name().unwrap().to_string_lossy().into_owned())
                    .collect();
            }
            Arc::new(p)
        }
        _ => tower(g)?,
    };
    let levels: Vec<Value> = (0..t.num_levels())
        .map(|n| json!({ "n": n, "start": t.start(n).to_string(), "size": size_json(t.size(n)) }))
        .collect();
    let v = json!({ "tower": t.kind().to_string(), "levels": levels, "cached": cached });
    Ok((
        emit(g, &v, || {
            let mut s = format!("{} tower, {} levels\n", t.kind(), t.num_levels());
            for n in 0..t.num_levels() {
                let size = t.size(n).to_string();
                let size = if size.len() <= 100 { size } else { format!("<{} digits>", size.len()) };
                s += &format!("  I_{n}: m_{n} = {}, |I_{n}| = {size}\n", t.start(n));
            }
            for c in &cached {
                s += &format!("  wrote {c}\n");
            }
            s
        }),
        0,
    ))
}

fn eval(g: &Global, word: &str, point: &str, inverse: bool) -> Out {
    let w: Word = word.parse().map_err(CliError::parse)?;
    let m = nat(point)?;
    let t = tower(g)?;
    let y = if inverse { phi_eval_inverse(t.as_ref(), &w, &m)? } else { phi_eval(t.as_ref(), &w, &m)? };
    let v = json!({ "word": w.to_string(), "point": m.to_string(), "inverse": inverse, "value": y.to_string() });
    Ok((emit(g, &v, || format!("{y}\n")), 0))
}

fn dpipe(g: &Global, f: &str, name: &str) -> Out {
    let t = tower(g)?;
    let f = spec(f)?.bind(&t).map_err(CliError::parse)?;
    let trace = Pipeline::new(t, budgets(g)?).run(name, f);
    let v = serde_json::to_value(&trace).expect("traces serialize");
    Ok((
        emit(g, &v, || {
            format!(
                "{}: |D_0| = {}, |D_2| = {}, |D_6| = {}, final site from {} ({} points), caught: {}\n",
                trace.f,
                trace.d0.len(),
                trace.d2.points().len(),
                trace.d6.points.len(),
                trace.d_final_from,
                trace.d_final.len(),
                trace.caught()
            )
        }),
        0,
    ))
}

fn surgery_demo(g: &Global, gs: &str, d: &[String], f: &str, window: u64) -> Out {
    let t = tower(g)?;
    let gm = spec(gs)?.bind(&t).map_err(CliError::parse)?;
    let fm = spec(f)?.bind(&t).map_err(CliError::parse)?;
    let d: Vec<Nat> = d.iter().filter(|s| !s.trim().is_empty()).map(|s| nat(s)).collect::<Result<_, _>>()?;
    let res = surgery(gm.clone(), &d, fm.as_ref()).map_err(CliError::other)?;
    let mut points: BTreeSet<Nat> = (0..window).map(Nat::from).collect();
    points.extend(e_set(gm.as_ref(), &d, fm.as_ref()).map_err(CliError::other)?);
    let mut rows = Vec::new();
    for m in &points {
        let case = res.classify(m).map_err(CliError::other)?;
        let y = res.total(m).map_err(CliError::other)?;
        rows.push((m.to_string(), case.to_string(), y.to_string()));
    }
    let v = json!({
        "g": gs,
        "f": f,
        "d": d.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "rows": rows.iter().map(|(p, c, y)| json!({ "point": p, "case": c, "image": y })).collect::<Vec<_>>(),
    });
    Ok((
        emit(g, &v, || {
            let mut s = format!("{:>10}  {:<14}  {}\n", "point", "case", "image");
            for (p, c, y) in &rows {
                s += &format!("{p:>10}  {c:<14}  {y}\n");
            }
            s
        }),
        0,
    ))
}

fn member(g: &Global, h: &str, window: usize, offsets: u64, known: &[String]) -> Out {
    let t = tower(g)?;
    let h = spec(h)?.bind(&t).map_err(CliError::parse)?;
    let mut registry = Vec::new();
    for kv in known {
        let (name, s) = kv.split_once('=').ok_or_else(|| CliError::parse(format!("expected name=spec, got {kv:?}")))?;
        registry.push(Known::new(name.trim(), spec(s)?.bind(&t).map_err(CliError::parse)?));
    }
    let rep = membership(&t, h.as_ref(), MemberWindow { max_level: window, offsets }, &budgets(g)?, &registry);
    let v = serde_json::to_value(&rep).expect("reports serialize");
    Ok((
        emit(g, &v, || {
            let mut s = format!("verdict: {}\n", rep.verdict);
            if let Some(r) = &rep.recovered {
                s += &format!("recovered: length {}, signs {:?}, w = {}\n", r.length, r.signs, r.word);
            }
            if let Some(c) = &rep.counterexample {
                s += &format!("counterexample at {}: {}\n", c.point, c.reason);
            }
            for n in &rep.notes {
                s += &format!("note: {n}\n");
            }
            s
        }),
        0,
    ))
}

fn verify(g: &Global, suite: &str, seed: u64) -> Out {
    let paper_max_level = paper_level(g);
    if paper_max_level > PAPER_LEVEL_CAP {
        return Err(PaperTower::build(paper_max_level)
            .err()
            .map(CliError::from)
            .unwrap_or_else(|| CliError::other("")));
    }
    let cfg = SuiteConfig { paper_max_level, toy_levels: TOY_DEFAULT, seed };
    let names: Vec<&str> = if suite == "all" { SUITES.iter().map(|(n, _)| *n).collect() } else { vec![suite] };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for n in names {
        reports.push(suites::run(n, &cfg).map_err(CliError::parse)?);
    }
    let ok = reports.iter().all(|r| r.passed());
    let v = json!({ "passed": ok, "suites": reports });
    let out = emit(g, &v, || {
        let mut s = String::new();
        for r in &reports {
            for c in &r.checks {
                s += &format!("{} {}: {} ({})\n", if c.passed { "PASS" } else { "FAIL" }, r.suite, c.name, c.detail);
            }
        }
        s
    });
    Ok((out, if ok { 0 } else { 4 }))
}
