//! End-to-end runs of the `chainbank` binary over the fixture set.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainbank"))
}

fn input_args(cmd: &mut Command, lexicon: &Path) {
    cmd.arg("--alphabet")
        .arg(fixture("alphabet.tsv"))
        .arg("--canonical")
        .arg(fixture("canonical.tsv"))
        .arg("--affix-rules")
        .arg(fixture("affix_rules.tsv"))
        .arg("--semspec-rules")
        .arg(fixture("semspec_rules.tsv"))
        .arg("--lexicon")
        .arg(lexicon);
}

fn build_into(dir: &Path, lexicon: &Path) -> Output {
    let mut cmd = bin();
    cmd.arg("build");
    input_args(&mut cmd, lexicon);
    cmd.arg("--output-dir").arg(dir);
    cmd.output().expect("spawn")
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn build_is_deterministic_across_runs() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let out1 = build_into(dir1.path(), &fixture("lexicon.jsonl"));
    assert!(out1.status.success(), "{}", String::from_utf8_lossy(&out1.stderr));
    let out2 = build_into(dir2.path(), &fixture("lexicon.jsonl"));
    assert!(out2.status.success());
    assert_eq!(read_all(dir1.path()), read_all(dir2.path()));

    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir1.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["root_count"], 9);
    assert_eq!(stats["lemma_count"], 35);
    assert_eq!(stats["detected_pct"], 100.0);
    // One tree file per root.
    assert_eq!(fs::read_dir(dir1.path().join("trees")).unwrap().count(), 9);

    let relations = fs::read_to_string(dir1.path().join("relations.tsv")).unwrap();
    assert!(relations.contains("AibdaAعiy~\tAibdaAع\tattributive-of"));
    assert!(!dir1.path().join("quarantine.tsv").exists());
}

#[test]
fn empty_lexicon_builds_an_empty_bank() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("empty.jsonl");
    fs::write(&lexicon, "").unwrap();
    let out_dir = dir.path().join("bank");
    let out = build_into(&out_dir, &lexicon);
    assert!(out.status.success());
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["root_count"], 0);
    assert_eq!(stats["lemma_count"], 0);
    assert_eq!(stats["relation_count"], 0);
    assert_eq!(stats["detected_pct"], 0.0);
    assert_eq!(fs::read_dir(out_dir.join("trees")).unwrap().count(), 0);
}

#[test]
fn quarantined_lines_reported_and_build_continues() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lexicon.jsonl");
    let mut text = fs::read_to_string(fixture("lexicon.jsonl")).unwrap();
    // Root/template mismatch: quarantined, not fatal.
    text.push_str("{\"lemma\": \"Darb\", \"root\": \"k.t.b\", \"template\": \"1a23\", \"pos\": \"noun\"}\n");
    fs::write(&lexicon, text).unwrap();

    let out_dir = dir.path().join("bank");
    let out = build_into(&out_dir, &lexicon);
    assert_eq!(out.status.code(), Some(2));
    // Outputs still written.
    assert!(out_dir.join("stats.json").is_file());
    let quarantine = fs::read_to_string(out_dir.join("quarantine.tsv")).unwrap();
    assert!(quarantine.contains("36\tDarb"));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["quarantined_count"], 1);
}

#[test]
fn invalid_table_fails_fast_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let canonical = dir.path().join("canonical.tsv");
    let mut text = fs::read_to_string(fixture("canonical.tsv")).unwrap();
    text.push_str("bad.row\tT\tmasdar\tnoun\t1a23\tI\tcanonical\tmissing-parent\tmasdar-of\n");
    fs::write(&canonical, text).unwrap();

    let out_dir = dir.path().join("bank");
    let mut cmd = bin();
    cmd.arg("build")
        .arg("--alphabet")
        .arg(fixture("alphabet.tsv"))
        .arg("--canonical")
        .arg(&canonical)
        .arg("--affix-rules")
        .arg(fixture("affix_rules.tsv"))
        .arg("--semspec-rules")
        .arg(fixture("semspec_rules.tsv"))
        .arg("--lexicon")
        .arg(fixture("lexicon.jsonl"))
        .arg("--output-dir")
        .arg(&out_dir);
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing-parent"));
    assert!(!out_dir.exists(), "fail-fast must not write outputs");
}

#[test]
fn evaluate_against_shipped_gold() {
    let dir = tempfile::tempdir().unwrap();
    let mut cmd = bin();
    cmd.arg("evaluate");
    input_args(&mut cmd, &fixture("lexicon.jsonl"));
    cmd.arg("--gold")
        .arg(fixture("gold"))
        .arg("--output-dir")
        .arg(dir.path());
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Detected Relations               34  (100.00%)"));
    assert!(stdout.contains("detected / single / multiple / none: 100.00 / 91.18 / 8.82 / 0.00"));
    assert!(dir.path().join("eval_report.txt").is_file());
    assert!(dir.path().join("eval_report.json").is_file());
}

#[test]
fn query_prints_full_chain() {
    let dir = tempfile::tempdir().unwrap();
    assert!(build_into(dir.path(), &fixture("lexicon.jsonl")).status.success());

    let out = bin()
        .arg("query")
        .arg("--output-dir")
        .arg(dir.path())
        .arg("AibdaAعiy~")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "b.d.ع →(form-I-of) badaع →(form-IV-of) Âbdaع →(masdar-of) AibdaAع →(attributive-of) AibdaAعiy~"
    );

    // Querying a root prints the single-node path.
    let out = bin()
        .arg("query")
        .arg("--output-dir")
        .arg(dir.path())
        .arg("b.d.ع")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "b.d.ع");

    // Unknown lemma: exit 1.
    let out = bin()
        .arg("query")
        .arg("--output-dir")
        .arg(dir.path())
        .arg("xyzzy")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn attach_orphans_flag_reaches_the_builder() {
    let dir = tempfile::tempdir().unwrap();
    let lexicon = dir.path().join("lexicon.jsonl");
    // Strip the broken plural so Huduwdiy~ orphans without the flag.
    let text = fs::read_to_string(fixture("lexicon.jsonl"))
        .unwrap()
        .replace(", \"inflected_forms\": {\"broken_plural\": \"Huduwd\"}", "");
    fs::write(&lexicon, text).unwrap();

    let plain_dir = dir.path().join("plain");
    assert!(build_into(&plain_dir, &lexicon).status.success());
    let tree = fs::read_to_string(plain_dir.join("trees/H.d.d.json")).unwrap();
    assert!(tree.contains("\"orphans\": [\n    \"Huduwdiy~|"));

    let forced_dir = dir.path().join("forced");
    let mut cmd = bin();
    cmd.arg("build");
    input_args(&mut cmd, &lexicon);
    cmd.arg("--output-dir").arg(&forced_dir).arg("--attach-orphans");
    assert!(cmd.output().unwrap().status.success());
    let tree = fs::read_to_string(forced_dir.join("trees/H.d.d.json")).unwrap();
    assert!(tree.contains("\"relation\": \"unknown\""));
    assert!(tree.contains("\"orphans\": []"));
}

#[test]
fn threads_flag_does_not_change_output() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    assert!(build_into(dir1.path(), &fixture("lexicon.jsonl")).status.success());
    let mut cmd = bin();
    cmd.arg("build");
    input_args(&mut cmd, &fixture("lexicon.jsonl"));
    cmd.arg("--output-dir").arg(dir2.path()).arg("--threads").arg("2");
    assert!(cmd.output().unwrap().status.success());
    assert_eq!(read_all(dir1.path()), read_all(dir2.path()));
}

#[test]
fn usage_errors_exit_one() {
    let out = bin().arg("build").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stats_reads_a_built_bank() {
    let dir = tempfile::tempdir().unwrap();
    assert!(build_into(dir.path(), &fixture("lexicon.jsonl")).status.success());
    let out = bin()
        .arg("stats")
        .arg("--output-dir")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("roots               9"));

    let missing = bin()
        .arg("stats")
        .arg("--output-dir")
        .arg(dir.path().join("nothing-here"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}
