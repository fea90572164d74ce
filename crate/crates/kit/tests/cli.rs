use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_centering-kit"))
        .args(args)
        .env("CENTERING_KIT_LOG", "warn")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn score_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = kit(&["score", s(&fixture("worked_example.conll")), "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("scorecards.csv"));
    assert_eq!(rows[0], ["doc_id", "t", "not_nocb", "cheap", "coherence", "salience", "kp", "cont", "ret", "sshift", "rshift"]);
    assert_eq!(rows[1], ["worked/john_mike:0", "4", "1.0", "1.0", "0.5", "0.75", "3.25", "2", "1", "1", "0"]);
    let frames = fs::read_to_string(dir.path().join("frames.jsonl")).unwrap();
    let frames: Vec<Value> = frames.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(frames.len(), 5);
    let transitions: Vec<&str> = frames.iter().map(|f| f["transition"].as_str().unwrap()).collect();
    assert_eq!(transitions, ["initial", "continue", "continue", "retain", "smooth_shift"]);
    assert_eq!(frames[3]["cb"], 0);
    assert_eq!(frames[3]["cf"][0], serde_json::json!({"entity": 0, "weight": 2.0}));
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"]["name"], "score");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn config_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"cf_candidate": "include_singleton", "weighting": "semantic_role"}"#).unwrap();
    let o = kit(&["score", s(&fixture("worked_example.conll")), "--config", s(&cfg), "--out", s(&dir.path().join("o"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let first: Value =
        serde_json::from_str(fs::read_to_string(dir.path().join("o/frames.jsonl")).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["cf"].as_array().unwrap().len(), 3);
    let manifest = json(&dir.path().join("o/manifest.json"));
    assert_eq!(manifest["config"]["weighting"], "semantic_role");

    fs::write(&cfg, r#"{"cf_candidate": "everything"}"#).unwrap();
    let o = kit(&["score", s(&fixture("worked_example.conll")), "--config", s(&cfg), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn semantic_weighting_without_srl_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = kit(&["score", s(&fixture("two_sentences.conll")), "--weighting", "semantic", "--out", s(dir.path())]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("no semantic-role annotation"), "{}", stderr(&o));
}

#[test]
fn input_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = kit(&["score", s(&dir.path().join("missing.conll")), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.conll");
    fs::write(&bad, "d 0 a NN (0\nd 1 b NN 1)\n").unwrap();
    let o = kit(&["score", s(&bad), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.conll: line 2"), "{}", stderr(&o));

    let empty = dir.path().join("empty.conll");
    fs::write(&empty, "# nothing here\n\n").unwrap();
    let o = kit(&["score", s(&empty), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
    let o = kit(&["permute", s(&empty), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn permute_three_utterances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nocb.csv");
    let o = kit(&["permute", s(&fixture("three_utterances.conll")), "--metric", "nocb", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["doc_id", "metric", "n_utt", "worse", "equal", "better", "ch"]);
    assert_eq!(rows[1], ["three:0", "nocb", "3", "2", "3", "0", "70.0"]);
    assert!(dir.path().join("nocb.permute_summary.csv").exists());
    assert!(dir.path().join("nocb.manifest.json").exists());

    let o = kit(&["permute", s(&fixture("three_utterances.conll")), "--metric", "all", "--out", s(&out)]);
    assert!(o.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1 + 6);
    let metrics: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(metrics, ["nocb", "cheap", "coherence", "salience", "kp", "tran"]);
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn permute_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = fixture("coherent_50.conll");
    let run = |name: &str, jobs: &str| {
        let out = dir.path().join(name);
        let o = kit(&["permute", s(&corpus), "--seed", "7", "--sample-size", "20", "--jobs", jobs, "--out", s(&out)]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a", "1");
    let b = run("b", "4");
    assert_eq!(dir_bytes(&a), dir_bytes(&b));

    let c = dir.path().join("c");
    let o = kit(&["replay", s(&a.join("manifest.json")), "--out", s(&c)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(dir_bytes(&a), dir_bytes(&c));

    let o = kit(&["permute", s(&corpus), "--seed", "8", "--sample-size", "20", "--out", s(&dir.path().join("d"))]);
    assert!(o.status.success());
    assert_ne!(dir_bytes(&a), dir_bytes(&dir.path().join("d")));
}

#[test]
fn replay_rejects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.conll");
    fs::copy(fixture("three_utterances.conll"), &corpus).unwrap();
    let out = dir.path().join("out");
    assert!(kit(&["score", s(&corpus), "--out", s(&out)]).status.success());
    fs::write(&corpus, fs::read_to_string(&corpus).unwrap().replace("Ann", "Anna")).unwrap();
    let o = kit(&["replay", s(&out.join("manifest.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("contents changed"));
}

#[test]
fn correlate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let linear = dir.path().join("linear.csv");
    let mut text = String::from("id,centering_score,conll_f1\n");
    for i in 0..12 {
        text.push_str(&format!("m{i},{},{}\n", i as f64 * 2.0 + 1.0, i as f64 * 0.05));
    }
    fs::write(&linear, text).unwrap();
    let out = dir.path().join("r.json");
    let o = kit(&["correlate", s(&linear), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out);
    assert_eq!(r["report"]["pearson_r"], 1.0);
    assert!(r["report"]["p_value"].as_f64().unwrap() < 1e-12);
    assert_eq!(r["report"]["n"], 12);
    assert_eq!(r["report"]["nbins"], 3);
    assert!((r["report"]["mi"].as_f64().unwrap() - 3f64.ln()).abs() < 1e-9);
    assert_eq!(r["report"]["mi_unit"], "nats");
    let hash = r["manifest_hash"].as_str().unwrap().to_owned();
    assert_eq!(hash.len(), 64);
    assert!(kit(&["correlate", s(&linear), "--out", s(&dir.path().join("again.json"))]).status.success());
    assert_eq!(json(&dir.path().join("again.json"))["manifest_hash"], hash.as_str());

    let o = kit(&["correlate", s(&linear), "--bits", "--out", s(&out)]);
    assert!(o.status.success());
    assert!((json(&out)["report"]["mi"].as_f64().unwrap() - 3f64.log2()).abs() < 1e-9);

    let constant = dir.path().join("constant.csv");
    fs::write(&constant, "id,centering_score,conll_f1\na,1.0,0.1\nb,1.0,0.2\nc,1.0,0.3\nd,1.0,0.4\n").unwrap();
    let o = kit(&["correlate", s(&constant), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("centering_score"), "{}", stderr(&o));

    let malformed = dir.path().join("malformed.csv");
    fs::write(&malformed, "id,centering_score,conll_f1\na,x,0.1\n").unwrap();
    assert_eq!(kit(&["correlate", s(&malformed), "--out", s(&out)]).status.code(), Some(2));
}

#[test]
fn coref_eval_running_example() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.conll");
    let pred = dir.path().join("pred.conll");
    fs::write(&gold, "d 0 a NN (0)\nd 1 b NN (0)\nd 2 c NN (0)\n").unwrap();
    fs::write(&pred, "d 0 a NN (5)\nd 1 b NN (5)\nd 2 c NN (6)\n").unwrap();
    let out = dir.path().join("coref.json");
    let o = kit(&["coref-eval", "--gold", s(&gold), "--pred", s(&pred), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&out);
    let close = |v: &Value, x: f64| (v.as_f64().unwrap() - x).abs() < 5e-5;
    assert!(close(&r["muc"]["p"], 1.0) && close(&r["muc"]["r"], 0.5) && close(&r["muc"]["f1"], 0.6667));
    assert!(close(&r["b3"]["r"], 5.0 / 9.0) && close(&r["b3"]["f1"], 0.7143));
    assert!(close(&r["ceaf4"]["p"], 0.4) && close(&r["ceaf4"]["r"], 0.8) && close(&r["ceaf4"]["f1"], 0.5333));
    assert!(close(&r["conll_f1"], 0.6381));
}

#[test]
fn fit_recency_beats_vanilla_on_lag_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixture("lag_40.conll");
    let mut preds = Vec::new();
    for (i, noise) in ["0.1", "0.2", "0.3", "0.4", "0.5"].iter().enumerate() {
        let p = dir.path().join(format!("pred{i}.conll"));
        let o = kit(&["synth", "lag", "--docs", "40", "--seed", "7", "--noise", noise, "--out", s(&p)]);
        assert!(o.status.success());
        preds.push(p);
    }
    let out = dir.path().join("fit");
    let mut args = vec!["fit-recency", "--gold", s(&gold), "--grid", "decay", "--out", s(&out), "--pred"];
    args.push(s(&gold));
    args.extend(preds.iter().map(|p| s(p)));
    let o = kit(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = json(&out.join("fit.json"));
    let best_r = fit["best_r"].as_f64().unwrap();
    assert!(fit["best"]["forget"]["gamma"].as_f64().unwrap() > 0.0);
    assert!(best_r >= fit["baseline_r"].as_f64().unwrap() + 0.02);
    assert!(best_r > fit["vanilla_r"].as_f64().unwrap());

    let report = dir.path().join("cmp.json");
    let o = kit(&[
        "correlate",
        s(&out.join("scores_fitted.csv")),
        "--compare",
        s(&out.join("scores_vanilla.csv")),
        "--out",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&report);
    assert!(r["report"]["pearson_r"].as_f64().unwrap() >= r["compare"]["other"]["pearson_r"].as_f64().unwrap());
    assert!(r["compare"]["fisher_z_p"].as_f64().is_some());

    let o = kit(&["fit-recency", "--gold", s(&gold), "--pred", s(&gold), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("at least 3"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(kit(&["permute"]).status.code(), Some(2));
    assert_eq!(kit(&["bogus"]).status.code(), Some(2));
    let o = kit(&["permute", s(&fixture("three_utterances.conll")), "--metric", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
