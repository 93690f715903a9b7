use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ontoqual"));
    cmd.env_remove("ONTOQUAL_PROFILE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn showcase() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/showcase.nt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
}

fn analyze_dir(dir: &Path, extra: &[&str]) -> Output {
    let data = dir.join("data.nt");
    let onto = dir.join("ontology.nt");
    let mut args = vec![
        "analyze",
        "--data",
        data.to_str().unwrap(),
        "--ontology",
        onto.to_str().unwrap(),
        "--profile",
        "rdfs",
        "--no-timestamp",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

fn write_run_file(path: &Path, dir: &Path, name: &str) {
    fs::write(
        path,
        format!(
            "name = \"{name}\"\ndata = \"{}\"\nontology = \"{}\"\nprofile = \"rdfs\"\n",
            dir.join("data.nt").display(),
            dir.join("ontology.nt").display()
        ),
    )
    .unwrap();
}

#[test]
fn showcase_json() {
    let out = run(&["analyze", "--data", showcase().to_str().unwrap(), "--profile", "rdfs"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["per_class"]["http://example.org/showcase/Person"]["ci"], 0.195);
    assert_eq!(v["schema_version"], 1);
    assert!(v["generated_at_unix"].is_u64());
    assert_eq!(v["statistics"]["instances"], 500);
    assert_eq!(v["statistics"]["classes"], 12);
    assert_eq!(v["provenance"]["spi_denominator"], "triples whose subject is an instance of the class");
    assert!(stderr(&out).contains("500 instances"));
}

#[test]
fn missing_input_names_path() {
    let out = run(&["analyze", "--data", "/no/such/file.nt", "--profile", "rdfs"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("/no/such/file.nt"));
}

#[test]
fn markdown_column_order() {
    let dir = TempDir::new().unwrap();
    synth(dir.path(), &["--seed", "3"]);
    let out = analyze_dir(dir.path(), &["--format", "markdown"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("| KG | ICR | IPR | CI | IMI | SPA | SPI |"), "{text}");
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    synth(dir.path(), &["--seed", "3"]);
    let out = analyze_dir(dir.path(), &["--format", "csv", "--name", "fixture"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("kg,ICR,IPR,CI,IMI,SPA,SPI"));
    assert!(lines.next().unwrap().starts_with("fixture,"));
}

#[test]
fn reports_are_byte_identical_without_timestamp() {
    let dir = TempDir::new().unwrap();
    synth(dir.path(), &["--preset", "multi-parent", "--seed", "5"]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(analyze_dir(dir.path(), &["--out", a.to_str().unwrap()]).status.success());
    assert!(analyze_dir(dir.path(), &["--out", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(!fs::read_to_string(&a).unwrap().contains("generated_at_unix"));
}

#[test]
fn synth_is_deterministic() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    synth(a.path(), &["--seed", "42"]);
    synth(b.path(), &["--seed", "42"]);
    for file in ["data.nt", "ontology.nt", "ledger.json"] {
        assert_eq!(fs::read(a.path().join(file)).unwrap(), fs::read(b.path().join(file)).unwrap(), "{file}");
    }
}

#[test]
fn minimal_synth_fixture() {
    let dir = TempDir::new().unwrap();
    let out = run(&["synth", "--out", dir.path().to_str().unwrap(), "--classes", "1", "--entities", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("classes 1"));
    assert_eq!(fs::read_to_string(dir.path().join("data.nt")).unwrap(), "");
    let out = analyze_dir(dir.path(), &[]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["metrics"]["imi"].is_null());
    assert_eq!(v["undefined"]["imi"]["reason"], "no_non_root_classes");
}

#[test]
fn tree_synth_round_trip_gives_imi_one() {
    let dir = TempDir::new().unwrap();
    synth(dir.path(), &["--multi-parent", "0", "--seed", "9"]);
    let out = analyze_dir(dir.path(), &[]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["metrics"]["imi"], 1);
    assert_eq!(v["exact"]["imi"], "1/1");
}

#[test]
fn compare_tables() {
    let tmp = TempDir::new().unwrap();
    let (tree, dag) = (tmp.path().join("tree"), tmp.path().join("dag"));
    synth(&tree, &["--multi-parent", "0", "--seed", "1"]);
    synth(&dag, &["--multi-parent", "0.6", "--seed", "1"]);
    let (rt, rd, rt2) = (tmp.path().join("tree.toml"), tmp.path().join("dag.toml"), tmp.path().join("tree2.toml"));
    write_run_file(&rt, &tree, "tree");
    write_run_file(&rd, &dag, "dag");
    write_run_file(&rt2, &tree, "tree");

    let out = run(&["compare", rt.to_str().unwrap(), rd.to_str().unwrap(), "--no-timestamp"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("| Metric | tree | dag |"), "{text}");
    let imi_row = text.lines().find(|l| l.starts_with("| IMI |")).unwrap();
    let cells: Vec<f64> = imi_row.split('|').filter_map(|c| c.trim().parse().ok()).collect();
    assert!(cells[0] > cells[1], "{imi_row}");

    let out = run(&["compare", rt.to_str().unwrap(), rt2.to_str().unwrap(), "--no-timestamp"]);
    for line in stdout(&out).lines().skip(2) {
        let cells: Vec<&str> = line.split('|').map(str::trim).filter(|c| !c.is_empty()).collect();
        assert_eq!(cells[1], cells[2], "{line}");
    }

    let out = run(&["compare", rt.to_str().unwrap(), rd.to_str().unwrap(), "--format", "json", "--no-timestamp"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn compare_partial_failure() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &[]);
    let good = tmp.path().join("good.toml");
    write_run_file(&good, tmp.path(), "good");
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "data = \"missing.nt\"\nprofile = \"rdfs\"\n").unwrap();
    let out = run(&["compare", good.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(8));
    let text = stdout(&out);
    assert!(text.starts_with("| Metric | good | bad (failed) |"), "{text}");
    assert!(text.contains("missing.nt"));
}

#[test]
fn compare_needs_two_runs() {
    let out = run(&["compare", "only.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strict_parse_error() {
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("bad.nt");
    fs::write(&path, "<urn:a> <urn:b> <urn:c> .\n<urn:a> <urn:b> broken .\n").unwrap();
    let out = run(&["analyze", "--data", path.to_str().unwrap(), "--profile", "rdfs", "--strict"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    // lenient mode skips the line, then finds no classes
    let out = run(&["analyze", "--data", path.to_str().unwrap(), "--profile", "rdfs"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn profile_errors() {
    let asset = showcase();
    let out = run(&["analyze", "--data", asset.to_str().unwrap(), "--profile", "nope"]);
    assert_eq!(out.status.code(), Some(6));
    let out = run(&["analyze", "--data", asset.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["analyze", "--data", asset.to_str().unwrap(), "--profile", "rdfs", "--profile-file", "x.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let tmp = TempDir::new().unwrap();
    let broken = tmp.path().join("broken.toml");
    fs::write(&broken, "name = \"x\"\n").unwrap();
    let out = run(&["analyze", "--data", asset.to_str().unwrap(), "--profile-file", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn profile_directory_env() {
    let tmp = TempDir::new().unwrap();
    let bundled = fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/profiles/rdfs.toml")).unwrap();
    fs::write(tmp.path().join("custom.toml"), bundled.replace("name = \"rdfs\"", "name = \"custom\"")).unwrap();
    let out = bin()
        .args(["analyze", "--data", showcase().to_str().unwrap(), "--profile", "custom", "--no-timestamp"])
        .env("ONTOQUAL_PROFILE_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["provenance"]["profile"], "custom");
}

#[test]
fn bad_synth_params() {
    let tmp = TempDir::new().unwrap();
    let out = run(&["synth", "--out", tmp.path().to_str().unwrap(), "--classes", "10", "--cycles", "5"]);
    assert_eq!(out.status.code(), Some(7));
    let out = run(&["synth", "--out", tmp.path().to_str().unwrap(), "--multi-parent", "2"]);
    assert_eq!(out.status.code(), Some(7));
    let out = run(&["synth", "--out", tmp.path().to_str().unwrap(), "--preset", "huge"]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn run_file_with_overrides() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--seed", "2"]);
    let run_file = tmp.path().join("run.toml");
    fs::write(
        &run_file,
        "name = \"from-file\"\ndata = \"data.nt\"\nontology = \"ontology.nt\"\nprofile = \"rdfs\"\nformat = \"csv\"\nout = \"report.csv\"\n",
    )
    .unwrap();
    let out = run(&["analyze", "--run", run_file.to_str().unwrap(), "--no-timestamp"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("report.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("from-file,"));

    let json_out = tmp.path().join("report.json");
    let out = run(&["analyze", "--run", run_file.to_str().unwrap(), "--name", "flag", "--format", "json", "--out", json_out.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&json_out).unwrap()).unwrap();
    assert_eq!(v["kg"], "flag");

    fs::write(&run_file, "data = \"data.nt\"\nunknown = 1\n").unwrap();
    let out = run(&["analyze", "--run", run_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(6));
}

#[test]
fn label_language_filter() {
    let out = run(&[
        "analyze",
        "--data",
        showcase().to_str().unwrap(),
        "--profile",
        "rdfs",
        "--lang-filter",
        "en",
        "--no-timestamp",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["statistics"]["instances"], 2);
    assert_eq!(v["provenance"]["label_filter"]["retained_subjects"], 2);
    assert_eq!(v["statistics"]["classes"], 12);

    let out = run(&["analyze", "--data", showcase().to_str().unwrap(), "--profile", "rdfs", "--lang-filter", "fr"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("no_matching_labels"));
}

#[test]
fn stats_command() {
    let out = run(&["stats", "--data", showcase().to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["store"]["triples"], 553);
    assert_eq!(v["parse"]["gzip"], false);
}

#[test]
fn showcase_synth_matches_asset() {
    let tmp = TempDir::new().unwrap();
    synth(tmp.path(), &["--showcase"]);
    assert_eq!(fs::read(tmp.path().join("showcase.nt")).unwrap(), fs::read(showcase()).unwrap());
}
