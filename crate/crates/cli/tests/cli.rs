use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn scratch(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn intensio(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intensio"))
        .args(args)
        .env_remove("INTENSIO_CAPS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn composition_model_separates_the_two_diamonds() {
    let m = fixture("composition.json");
    let o = intensio(&["--format", "json", "check", path(&m), "<a . b>p", "<a><b>p", "true"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let worlds: Vec<&Value> = v["results"].as_array().unwrap().iter().map(|r| &r["worlds"]).collect();
    assert_eq!(worlds[0], &serde_json::json!(["w"]));
    assert_eq!(worlds[1], &serde_json::json!([]));
    assert_eq!(worlds[2], &serde_json::json!(["w", "u", "v"]));

    let o = intensio(&["check", path(&m), "<a . b>p", "<a><b>p", "--world", "w"]);
    assert_eq!(o.status.code(), Some(1), "the second formula fails at w");
    let o = intensio(&["check", path(&m), "<a>([b]false | <b>p)", "--world", "w"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reviewer_scenario_holds_at_the_actual_world() {
    let m = fixture("reviewer.json");
    let o = intensio(&["check", path(&m), "[adam]~p & [adam . auth]p", "--world", "bc_p"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("holds at bc_p"));
    let o = intensio(&["check", path(&m), "p & [auth]p & <adam>~p", "--world", "bc_p"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn search_report_is_accepted_by_check() {
    let o = intensio(&[
        "--format",
        "json",
        "search",
        "--theory",
        "rum",
        "--formula",
        "<a . b>p -> <a><b>p",
        "--max-worlds",
        "3",
        "--max-rels",
        "2",
        "--expect-countermodel",
        "--workers",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    assert_eq!(report["verdict"], "countermodel");
    let file = scratch("composition_search.json");
    std::fs::write(&file, &o.stdout).unwrap();
    let again = intensio(&["--format", "json", "check", path(&file)]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(json(&again)["countermodel_confirmed"], true);

    // the bare countermodel document works too, and so does any formula on it
    let inner = scratch("composition_counter.json");
    std::fs::write(&inner, report["countermodel"].to_string()).unwrap();
    assert_eq!(intensio(&["check", path(&inner)]).status.code(), Some(0));
    let o = intensio(&["check", path(&inner), "<a . b>p"]);
    assert_eq!(o.status.code(), Some(0), "holds at the reported world");
}

#[test]
fn search_expectations_set_the_exit_code() {
    let run = |f: &str, flag: &str| {
        intensio(&["search", "--theory", "csl", "--formula", f, flag])
            .status
            .code()
    };
    assert_eq!(run("<a>p -> <a^>p", "--expect-valid"), Some(0));
    assert_eq!(run("<a>p -> <a^>p", "--expect-countermodel"), Some(1));
    assert_eq!(run("<a^>p -> <a>p", "--expect-countermodel"), Some(0));
    assert_eq!(run("<a^>p -> <a>p", "--expect-valid"), Some(1));
}

#[test]
fn errors_have_distinct_exit_codes() {
    let o = intensio(&["parse", "--theory", "sl", "[a + ]p"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at 5"));
    let o = intensio(&["parse", "--theory", "sl", "[a . b]p"]);
    assert_eq!(o.status.code(), Some(2));
    let o = intensio(&["check", path(&fixture("missing.json")), "p"]);
    assert_eq!(o.status.code(), Some(2));

    let capped = Command::new(env!("CARGO_BIN_EXE_intensio"))
        .args(["search", "--theory", "sl", "--formula", "[a][b]p -> [a + b]p | <a>q"])
        .env("INTENSIO_CAPS", "models=5")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(3));
    let bad = Command::new(env!("CARGO_BIN_EXE_intensio"))
        .args(["parse", "--theory", "sl", "p"])
        .env("INTENSIO_CAPS", "models")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn parse_renders_canonically() {
    let o = intensio(&["parse", "--theory", "csl", "<(a+b)^>p->p"]);
    assert_eq!(stdout(&o).trim(), "~(<(a + b)^>p & ~p)");
    let o = intensio(&["parse", "--theory", "ba", "--term", "-(a*b)+c"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-(a * b) + c");
    let o = intensio(&["check", path(&fixture("composition.json")), "~p", "--world", "w"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&intensio(&["--format", "json", "parse", "--theory", "rum", "[a . b]<c>p"]));
    assert_eq!(v["modal_depth"], 2);
}

#[test]
fn translate_round_trips() {
    let nb = intensio(&["translate", path(&fixture("composition.json")), "--to", "nbhd"]);
    assert_eq!(nb.status.code(), Some(0));
    let file = scratch("composition_nbhd.json");
    std::fs::write(&file, &nb.stdout).unwrap();
    let o = intensio(&["--format", "json", "check", path(&file), "<a . b>p"]);
    assert_eq!(json(&o)["results"][0]["worlds"], serde_json::json!(["w"]));
    let rel = intensio(&["translate", path(&file), "--to", "rel"]);
    assert_eq!(rel.status.code(), Some(0));
    // already relational
    assert_eq!(intensio(&["translate", path(&fixture("composition.json")), "--to", "rel"]).status.code(), Some(2));

    let o = intensio(&["translate", path(&fixture("neighborhoods.json")), "--to", "rel"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn dual_complex_then_ultrafilter() {
    let ca = intensio(&["--format", "json", "dual", "--complex", path(&fixture("reviewer.json"))]);
    assert_eq!(ca.status.code(), Some(0));
    let file = scratch("reviewer_algebra.json");
    std::fs::write(&file, &ca.stdout).unwrap();
    let uf = intensio(&["--format", "json", "dual", "--ultrafilter", path(&file)]);
    assert_eq!(uf.status.code(), Some(0));
    let v = json(&uf);
    assert_eq!(v["canonical_morphism"], Value::Null);
    assert_eq!(v["ultrafilters"], 4);

    let o = intensio(&["dual", "--ultrafilter", path(&fixture("sigma.json"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("quasi-embedding"));
    // a mode is required
    assert_eq!(intensio(&["dual", path(&fixture("sigma.json"))]).status.code(), Some(2));
}

#[test]
fn bisim_relates_a_model_to_its_translation() {
    let nb = intensio(&["translate", path(&fixture("composition.json")), "--to", "nbhd"]);
    let file = scratch("composition_bisim.json");
    std::fs::write(&file, &nb.stdout).unwrap();
    let o = intensio(&["--format", "json", "bisim", path(&fixture("composition.json")), path(&file), "--pair", "w", "w"]);
    let v = json(&o);
    assert_eq!(v["pair"]["bisimilar"], true);
    assert_eq!(v["pair"]["separating_depth"], Value::Null);

    let o = intensio(&["--format", "json", "bisim", path(&fixture("composition.json")), path(&file), "--pair", "w", "u"]);
    let v = json(&o);
    assert_eq!(v["pair"]["bisimilar"], false);
    assert_eq!(v["pair"]["separating_depth"], 0);
}

#[test]
fn closure_lists_the_set() {
    let v = json(&intensio(&["--format", "json", "closure", "<a>p -> [b^]q"]));
    let set: Vec<&str> = v["closure"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    for f in ["[b^]q", "<b^>q", "[b]q", "<b>q", "<a>p", "[a]p", "p", "q"] {
        assert!(set.contains(&f), "{f} missing from {set:?}");
    }
}

#[test]
fn suite_on_small_bounds() {
    for theory in ["empty", "sl", "csl"] {
        let o = intensio(&["--format", "json", "suite", "--theory", theory, "--samples", "20"]);
        let v = json(&o);
        assert_eq!(o.status.code(), Some(0), "{theory}: {v}");
        assert_eq!(v["passed"], true);
    }
    // Boolean complement does not respect the kernel of a -> G(a), so the
    // lifted operations of some ultrafilter frames are ill defined
    let o = intensio(&["--format", "json", "suite", "--theory", "ba", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    for c in v["checks"].as_array().unwrap() {
        let failed = c["passed"] == false;
        assert_eq!(failed, c["name"] == "canonical morphism", "{c}");
        if failed {
            assert!(c["detail"].as_str().unwrap().contains("(m2) fails: '-'"), "{c}");
        }
    }
    let o = intensio(&["suite", "--theory", "rum", "--max-worlds", "2", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}
