use std::fs;
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hospcourse");

const DAY_TEXTS: &[&str] = &[
    "MRI brain showed a small left MCA infarct. Aspirin was started and neurology followed.",
    "Speech improved overnight. Tolerating diet and working with physical therapy.",
    "Telemetry without events. Blood pressure controlled on home regimen.",
];

/// Five admissions whose reference courses keep returning to a complication
/// the notes never mention.
fn corpus_lines(course: &str) -> Vec<String> {
    (0..5usize)
        .map(|i| {
            let days = 2 + i % 3;
            let month = i + 1;
            let mut notes = vec![
                json!({"type": "admission", "timestamp": format!("2022-0{month}-10T09:30:00-05:00"),
                    "text": format!("Patient {i} presents with mitral regurgitation and diabetes, admitted for acute stroke workup.")}),
                json!({"type": "ed_provider", "timestamp": format!("2022-0{month}-10T07:15:00-05:00"),
                    "text": "Seen in the ED for aphasia, CT head negative for hemorrhage."}),
            ];
            for d in 1..=days {
                notes.push(json!({"type": "progress", "timestamp": format!("2022-0{month}-{}T10:00:00-05:00", 10 + d),
                    "text": DAY_TEXTS[(i + d) % DAY_TEXTS.len()]}));
            }
            notes.push(json!({"type": "progress", "timestamp": format!("2022-0{month}-{}T08:00:00-05:00", 10 + days),
                "text": "Stable for discharge. She will follow up with Dr. [Physician] as an outpatient in 2 weeks."}));
            json!({
                "admission_id": format!("ADM{i:03}"),
                "admit_date": format!("2022-0{month}-10T08:00:00-05:00"),
                "discharge_date": format!("2022-0{month}-{}T11:00:00-05:00", 10 + days),
                "notes": notes,
                "discharge_summary_text": format!("Hospital Course:\n{course}\n\nDischarge Medications:\nASA 81 mg"),
            })
            .to_string()
        })
        .collect()
}

const PLAIN_COURSE: &str = "Patient was admitted for stroke workup. MRI showed a small infarct and aspirin was started. Neurology followed daily and the patient improved.";
const PLANTED_COURSE: &str = "Patient developed hypotension and sepsis and hypotension persisted. Patient developed hypotension and sepsis requiring pressors. Patient has mitral regurgitation and diabetes.";

const TERMS: &str = "mitral regurgitation\ndiabetes\nhypotension\nsepsis\naphasia\nstroke\ninfarct\n";

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new(course: &str) -> Self {
        let dir = TempDir::new().unwrap();
        fs::write(dir.path().join("corpus.jsonl"), corpus_lines(course).join("\n") + "\n").unwrap();
        fs::write(dir.path().join("terms.txt"), TERMS).unwrap();
        let ws = Self { dir };
        let out = ws.run(&["vocab-build", "--terms", &ws.arg("terms.txt"), "--out", &ws.arg("vocab.jsonl")]);
        assert!(out.status.success(), "{}", stderr(&out));
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write(&self, name: &str, body: &str) -> String {
        fs::write(self.path(name), body).unwrap();
        self.arg(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(BIN).args(args).current_dir(self.dir.path()).output().unwrap()
    }

    fn summarize(&self, extra: &[&str]) -> Output {
        let corpus = self.arg("corpus.jsonl");
        let vocab = self.arg("vocab.jsonl");
        let mut args = vec!["summarize", "--corpus", &corpus, "--vocab", &vocab];
        args.extend_from_slice(extra);
        self.run(&args)
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn one_error_line(o: &Output, class: &str, code: i32) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(lines[0].starts_with(&format!("{class}: ")), "{err}");
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .collect()
}

#[test]
fn summarizes_every_admission_in_order() {
    let ws = Workspace::new(PLAIN_COURSE);
    let out = ws.summarize(&[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let lines = json_lines(&out);
    assert_eq!(lines.len(), 5);
    for (i, line) in lines.iter().enumerate() {
        assert_eq!(line["admission_id"], format!("ADM{i:03}"));
        assert!(line["hospital_course"].is_string());
        let days: Vec<&str> = line["segments"]["daily"]
            .as_array()
            .unwrap()
            .iter()
            .map(|d| d["day"].as_str().unwrap())
            .collect();
        let mut sorted = days.clone();
        sorted.sort();
        assert_eq!(days, sorted);
        let followups = line["segments"]["followups"].as_array().unwrap();
        assert!(followups.iter().any(|f| f.as_str().unwrap().contains("follow up")), "{line}");
    }
}

#[test]
fn reruns_are_byte_identical_across_job_counts() {
    let ws = Workspace::new(PLAIN_COURSE);
    let a = ws.summarize(&[]);
    let b = ws.summarize(&[]);
    let c = ws.summarize(&["--jobs", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn constraint_removes_planted_terms() {
    let ws = Workspace::new(PLANTED_COURSE);
    let off = ws.summarize(&["--constrain", "off"]);
    let on = ws.summarize(&["--constrain", "on"]);
    assert!(off.status.success(), "{}", stderr(&off));
    assert!(on.status.success(), "{}", stderr(&on));
    let planted = |o: &Output| {
        json_lines(o)
            .iter()
            .flat_map(|l| words(l["hospital_course"].as_str().unwrap()))
            .filter(|w| w == "hypotension" || w == "sepsis")
            .count()
    };
    assert!(planted(&off) > 0, "{}", stdout(&off));
    assert_eq!(planted(&on), 0, "{}", stdout(&on));
}

#[test]
fn writes_to_out_file() {
    let ws = Workspace::new(PLAIN_COURSE);
    let target = ws.arg("out.jsonl");
    let out = ws.summarize(&["--out", &target]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_to_string(&target).unwrap().lines().count(), 5);
}

#[test]
fn unreachable_scorer_exits_3() {
    let ws = Workspace::new(PLAIN_COURSE);
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let endpoint = format!("tcp://127.0.0.1:{port}");
    let out = ws.summarize(&["--scorer", &endpoint, "--timeout-ms", "500"]);
    one_error_line(&out, "ScorerError", 3);
}

#[test]
fn external_scorer_over_exec_matches_builtin() {
    let ws = Workspace::new(PLAIN_COURSE);
    let endpoint = format!("exec:{BIN} serve-scorer --corpus {}", ws.arg("corpus.jsonl"));
    let remote = ws.summarize(&["--scorer", &endpoint, "--top-k", "100000"]);
    assert!(remote.status.success(), "{}", stderr(&remote));
    let local = ws.summarize(&[]);
    assert_eq!(stdout(&remote), stdout(&local));
}

#[test]
fn bad_inputs_have_distinct_exit_codes() {
    let ws = Workspace::new(PLAIN_COURSE);
    one_error_line(&ws.summarize(&["--beam-width", "0"]), "ConfigError", 2);
    one_error_line(&ws.summarize(&["--scorer", "ftp://nowhere"]), "ConfigError", 2);
    one_error_line(&ws.run(&["summarize", "--bogus"]), "ConfigError", 2);

    let broken = ws.write("broken.jsonl", "{\"admission_id\": \"X\"}\n");
    let vocab = ws.arg("vocab.jsonl");
    one_error_line(&ws.run(&["summarize", "--corpus", &broken, "--vocab", &vocab]), "CorpusError", 4);
}

#[test]
fn rouge_of_references_against_themselves_is_100() {
    let ws = Workspace::new(PLAIN_COURSE);
    let refs: String = (0..3)
        .map(|i| json!({"admission_id": format!("A{i}"), "text": format!("{PLAIN_COURSE} Day {i}.")}).to_string() + "\n")
        .collect();
    let path = ws.write("refs.jsonl", &refs);
    let out = ws.run(&["eval", "rouge", "--candidates", &path, "--references", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let task = &report["summaries"][0];
    assert_eq!(task["pairs"], 3);
    for key in ["r1", "r2", "rl"] {
        assert!((task["rouge"][key].as_f64().unwrap() - 100.0).abs() < 1e-9);
    }
    assert_eq!(task["candidate_words"], task["reference_words"]);
}

#[test]
fn rouge_reads_references_from_the_corpus() {
    let ws = Workspace::new(PLAIN_COURSE);
    let summaries = ws.summarize(&[]);
    let cands = ws.write("cands.jsonl", &stdout(&summaries));
    let corpus = ws.arg("corpus.jsonl");
    let out = ws.run(&["eval", "rouge", "--candidates", &cands, "--references", &corpus]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let r1 = report["summaries"][0]["rouge"]["r1"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&r1));
    assert_eq!(report["summaries"][0]["pairs"], 5);
}

#[test]
fn rouge_with_unmatched_ids_is_a_parse_error() {
    let ws = Workspace::new(PLAIN_COURSE);
    let a = ws.write("a.jsonl", "{\"admission_id\":\"A\",\"text\":\"x y\"}\n");
    let b = ws.write("b.jsonl", "{\"admission_id\":\"B\",\"text\":\"x y\"}\n");
    one_error_line(&ws.run(&["eval", "rouge", "--candidates", &a, "--references", &b]), "ParseError", 2);
}

#[test]
fn classification_report_matches_hand_counts() {
    let ws = Workspace::new(PLAIN_COURSE);
    // tp 2, fp 1, fn 1, tn 3
    let preds = ws.write("p.txt", "1 1 1 0 0 0 0\n");
    let golds = ws.write("g.txt", "1,1,0,1,0,0,0\n");
    let out = ws.run(&["eval", "report", "--predictions", &preds, "--golds", &golds]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let m = &report["classification"][0];
    assert_eq!((m["tp"].as_u64(), m["fp"].as_u64(), m["fn"].as_u64(), m["tn"].as_u64()), (Some(2), Some(1), Some(1), Some(3)));
    let close = |k: &str, v: f64| assert!((m[k].as_f64().unwrap() - v).abs() < 1e-12, "{k}: {m}");
    close("accuracy", 5.0 / 7.0);
    close("precision", 2.0 / 3.0);
    close("recall", 2.0 / 3.0);
    close("f1", 2.0 / 3.0);
}

#[test]
fn metric_preconditions_exit_5() {
    let ws = Workspace::new(PLAIN_COURSE);
    let preds = ws.write("p.txt", "1 0 1");
    let golds = ws.write("g.txt", "1 0");
    one_error_line(&ws.run(&["eval", "report", "--predictions", &preds, "--golds", &golds]), "MetricError", 5);
    let bad = ws.write("bad.txt", "1 yes");
    one_error_line(&ws.run(&["eval", "report", "--predictions", &bad, "--golds", &golds]), "ParseError", 2);

    let flat = ws.write("flat.csv", "a,b\n3,3\n3,3\n3,3\n");
    one_error_line(&ws.run(&["eval", "icc", "--ratings", &flat]), "MetricError", 5);
    let ragged = ws.write("ragged.csv", "a,b\n1,2\n3\n4,5\n");
    one_error_line(&ws.run(&["eval", "icc", "--ratings", &ragged]), "MetricError", 5);
    let words = ws.write("words.csv", "a,b\n1,2\nhigh,5\n");
    one_error_line(&ws.run(&["eval", "icc", "--ratings", &words]), "ParseError", 2);
}

#[test]
fn icc_of_shifted_raters_is_one() {
    let ws = Workspace::new(PLAIN_COURSE);
    let csv = ws.write("ratings.csv", "rater_a,rater_b,rater_c\n1,3,2\n2,4,3\n4,6,5\n5,7,6\n");
    let out = ws.run(&["eval", "icc", "--ratings", &csv]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["icc"]["icc_single"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((report["icc"]["icc_average"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(report["icc"]["subjects"], 4);
    assert_eq!(report["icc"]["raters"], 3);
}

fn build_vocab(ws: &Workspace, terms: Option<&str>, synonyms: Option<&str>, out: &str) -> Output {
    let mut args = vec!["vocab-build".to_string(), "--out".into(), ws.arg(out)];
    if let Some(t) = terms {
        args.extend(["--terms".into(), ws.write("t.txt", t)]);
    }
    if let Some(s) = synonyms {
        args.extend(["--synonyms".into(), ws.write("s.txt", s)]);
    }
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    ws.run(&refs)
}

#[test]
fn vocab_build_normalizes_and_deduplicates() {
    let ws = Workspace::new(PLAIN_COURSE);
    let out = build_vocab(&ws, Some("Diabetes\n\n  diabetes  \nMitral Regurgitation,\n"), Some("MI|myocardial infarction\nheart attack|MI\n"), "v.jsonl");
    assert!(out.status.success(), "{}", stderr(&out));
    let body = fs::read_to_string(ws.path("v.jsonl")).unwrap();
    let values: Vec<Value> = body.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let flat = body.to_lowercase();
    assert_eq!(flat.matches("\"diabetes\"").count(), 1, "{body}");
    assert!(flat.contains("mitral regurgitation"), "{body}");
    assert!(!flat.contains("regurgitation,"), "{body}");
    assert!(!values.is_empty());

    // the rebuilt file is identical and loads back for summarization
    let again = build_vocab(&ws, Some("Diabetes\n\n  diabetes  \nMitral Regurgitation,\n"), Some("MI|myocardial infarction\nheart attack|MI\n"), "v2.jsonl");
    assert!(again.status.success());
    assert_eq!(body, fs::read_to_string(ws.path("v2.jsonl")).unwrap());
    let vocab = ws.arg("v.jsonl");
    let corpus = ws.arg("corpus.jsonl");
    assert!(ws.run(&["summarize", "--corpus", &corpus, "--vocab", &vocab]).status.success());
}

#[test]
fn vocab_build_edge_cases() {
    let ws = Workspace::new(PLAIN_COURSE);
    let empty = build_vocab(&ws, None, None, "empty.jsonl");
    assert!(empty.status.success());
    assert_eq!(fs::read_to_string(ws.path("empty.jsonl")).unwrap(), "");

    let malformed = build_vocab(&ws, Some("ok term\n---\n"), None, "m.jsonl");
    one_error_line(&malformed, "ParseError", 2);
    let bad_group = build_vocab(&ws, None, Some("a|| b\n"), "g.jsonl");
    one_error_line(&bad_group, "ParseError", 2);
}

#[test]
fn help_exits_zero() {
    let out = Command::new(BIN).arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("summarize"));
}
