use mcg_core::tower::cache::load_tower;
use mcg_core::tower::{phi_eval, PaperTower, Tower};
use mcg_core::words::w_unrank;
use mcg_core::Nat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn mcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcg")).args(args).env_remove("MCG_CACHE_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

const TOY_WORD: &str = "phi-word:+110000000000000000000·-010100000000000000000";

#[test]
fn eval_of_the_empty_word() {
    let o = mcg(&["eval", "--word", "e", "--point", "7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "7\n");
    let back = mcg(&["eval", "--word", "+01·-10", "--point", "10", "--max-level", "2", "--json"]);
    let y = json(&back)["value"].as_str().unwrap().to_string();
    let inv = mcg(&["eval", "--word", "+01·-10", "--point", &y, "--max-level", "2", "--inverse"]);
    assert_eq!(stdout(&inv), "10\n");
}

#[test]
fn tower_build_writes_levels() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = mcg(&["tower-build", "--max-level", "1", "--cache-dir", d, "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["levels"][1]["size"]["value"], "120");
    assert_eq!(v["levels"][1]["start"], "2");
    assert_eq!(v["cached"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("paper-level-0.mcgt").exists());
    assert!(dir.path().join("paper-level-1.mcgt").exists());
    assert!(!dir.path().join("paper-level-2.mcgt").exists());
}

fn sample_agreement(a: &dyn Tower, b: &dyn Tower, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let below = 122u32 + 1000;
    for _ in 0..1000 {
        let w = w_unrank(2, rng.gen_range(0..w_count2())).unwrap();
        let m = Nat::from(rng.gen_range(0..below));
        assert_eq!(phi_eval(a, &w, &m).unwrap(), phi_eval(b, &w, &m).unwrap(), "{w} at {m}");
    }
}

fn w_count2() -> u64 {
    mcg_core::words::w_count(2).unwrap()
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(mcg(&["tower-build", "--max-level", "2", "--cache-dir", d]).status.success());
    let loaded = load_tower(dir.path(), 2).unwrap().unwrap();
    let built = PaperTower::build(2).unwrap();
    sample_agreement(&loaded, &built, 5);
    // evaluation through the cache agrees with a fresh build
    let via_cache = mcg(&["eval", "--word", "+10·+01", "--point", "130", "--max-level", "2", "--cache-dir", d]);
    let direct = mcg(&["eval", "--word", "+10·+01", "--point", "130", "--max-level", "2"]);
    assert_eq!(stdout(&via_cache), stdout(&direct));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mcg"))
        .args(["tower-build", "--max-level", "1"])
        .env("MCG_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("paper-level-1.mcgt").exists());
}

fn corrupt(dir: &Path, f: impl Fn(&mut Vec<u8>)) -> i32 {
    let p = dir.join("paper-level-1.mcgt");
    let mut bytes = std::fs::read(&p).unwrap();
    f(&mut bytes);
    std::fs::write(&p, bytes).unwrap();
    let d = dir.to_str().unwrap();
    mcg(&["eval", "--word", "+1", "--point", "3", "--max-level", "1", "--cache-dir", d]).status.code().unwrap()
}

#[test]
fn corrupt_cache_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let build = || assert!(mcg(&["tower-build", "--max-level", "1", "--cache-dir", d]).status.success());
    build();
    assert_eq!(corrupt(dir.path(), |b| b[0] = b'X'), 5);
    build();
    assert_eq!(corrupt(dir.path(), |b| b.truncate(b.len() - 3)), 5);
    build();
    assert_eq!(corrupt(dir.path(), |b| b.push(0)), 5);
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        &["eval", "--word", "01", "--point", "3"][..],
        &["eval", "--word", "+1", "--point", "x"],
        &["--tower", "toy", "dpipe", "trace", "--f", "0->1,2->1"],
        &["--tower", "toy", "--budget", "d9=3", "dpipe", "trace", "--f", "id"],
        &["--tower", "toy", "--budget", "d2", "dpipe", "trace", "--f", "id"],
        &["verify", "no-such-suite"],
        &["no-such-command"],
        &["member", "--h", "/nonexistent/h"],
    ] {
        assert_eq!(mcg(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn feasibility_cap_exits_3() {
    assert_eq!(mcg(&["tower-build", "--max-level", "5"]).status.code(), Some(3));
    assert_eq!(mcg(&["verify", "tower-AB", "--max-level", "5"]).status.code(), Some(3));
    assert_eq!(mcg(&["eval", "--word", "+1", "--point", "200", "--max-level", "1"]).status.code(), Some(3));
}

#[test]
fn verify_tower_ab_passes() {
    let o = mcg(&["verify", "tower-AB", "--max-level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS tower-AB: (B) at level 3"), "{text}");
    assert!(!text.contains("FAIL"));
    let v = json(&mcg(&["verify", "words", "--json"]));
    assert_eq!(v["passed"], true);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h");
    std::fs::write(&h, TOY_WORD).unwrap();
    let h = h.to_str().unwrap();
    let runs: &[&[&str]] = &[
        &["--tower", "toy", "--json", "dpipe", "trace", "--f", TOY_WORD],
        &["--tower", "toy", "--json", "dpipe", "trace", "--f", "perturb:id@5->9"],
        &["--tower", "toy", "--json", "member", "--h", h, "--window", "8"],
        &["--json", "tower-build", "--max-level", "2"],
        &["--tower", "toy", "--json", "surgery-demo", "--g", "phi-word:+1100", "--d", "3", "--f", "3->9"],
    ];
    for args in runs {
        let (a, b) = (mcg(args), mcg(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn surgery_demo_table() {
    let o = mcg(&[
        "--tower",
        "toy",
        "--json",
        "surgery-demo",
        "--g",
        "phi-word:+1100",
        "--d",
        "3",
        "--f",
        "3->9",
        "--window",
        "12",
    ]);
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    let case = |p: &str| rows.iter().find(|r| r["point"] == p).unwrap()["case"].as_str().unwrap().to_string();
    assert_eq!(case("3"), "D");
    assert_eq!(case("9"), "f[D]");
    let images: std::collections::HashSet<&str> = rows.iter().map(|r| r["image"].as_str().unwrap()).collect();
    assert_eq!(images.len(), rows.len());
    // a site that is not spaced: g already sends 3 to f(3)
    let g3 = json(&mcg(&["--tower", "toy", "--json", "eval", "--word", "+1100", "--point", "3"]));
    let bad = format!("3->{}", g3["value"].as_str().unwrap());
    let o = mcg(&["--tower", "toy", "surgery-demo", "--g", "phi-word:+1100", "--d", "3", "--f", &bad]);
    assert!(!o.status.success());
}

#[test]
fn member_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h");
    std::fs::write(&h, TOY_WORD).unwrap();
    let v = json(&mcg(&["--tower", "toy", "--json", "member", "--h", h.to_str().unwrap(), "--window", "8"]));
    assert_eq!(v["verdict"]["verdict"], "true");
    assert_eq!(v["recovered"]["length"], 2);
    std::fs::write(&h, format!("perturb:{TOY_WORD}@9->21")).unwrap();
    let v = json(&mcg(&["--tower", "toy", "--json", "member", "--h", h.to_str().unwrap(), "--window", "8"]));
    assert_eq!(v["verdict"]["verdict"], "false");
    assert_eq!(v["counterexample"]["point"], "9");
}
