#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use ontoqual::synth::{self, oracle, SynthParams};
use ontoqual::{metrics, parse_ntriples, ExtractionProfile, MetricReport, OntologyGraph, ParseMode, TripleStore};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn rdfs() -> ExtractionProfile {
    ExtractionProfile::bundled("rdfs").unwrap()
}

pub fn load(path: &std::path::Path) -> TripleStore {
    parse_ntriples(File::open(path).unwrap(), ParseMode::Strict).unwrap()
}

pub fn showcase_asset() -> TripleStore {
    load(&data_dir().join("showcase.nt"))
}

pub fn sc(local: &str) -> String {
    format!("{}{local}", synth::SHOWCASE_BASE)
}

/// Extract, condense and root.
pub fn prepared(store: &TripleStore, profile: &ExtractionProfile) -> OntologyGraph {
    OntologyGraph::extract(store, profile).unwrap().prepare().0
}

pub struct Synthesized {
    pub kg: synth::SynthKg,
    pub graph: OntologyGraph,
    pub report: MetricReport,
}

pub fn synthesize(params: &SynthParams) -> Synthesized {
    let kg = synth::generate_kg(params).unwrap();
    let graph = kg.graph.clone().prepare().0;
    let report = metrics::full_report(&kg.data, &graph, &rdfs()).unwrap();
    Synthesized { kg, graph, report }
}

/// Differences between the main path and the oracle on one generated fixture.
pub fn oracle_differences(params: &SynthParams) -> Vec<String> {
    let s = synthesize(params);
    let expected = oracle::oracle_metrics(&s.kg.data, &s.graph, &rdfs()).unwrap();
    s.report.differences(&expected, 1e-9)
}

#[derive(Debug, Clone)]
pub struct W3cCase {
    pub name: String,
    pub path: PathBuf,
    pub positive: bool,
}

/// Positive and negative syntax cases listed in the suite manifest.
pub fn w3c_cases() -> Vec<W3cCase> {
    let dir = data_dir().join("w3c-ntriples");
    let manifest = std::fs::read_to_string(dir.join("manifest.ttl")).unwrap();
    let mut cases = Vec::new();
    let mut kind = None;
    for line in manifest.lines() {
        if line.contains("rdft:TestNTriplesPositiveSyntax") {
            kind = Some(true);
        } else if line.contains("rdft:TestNTriplesNegativeSyntax") {
            kind = Some(false);
        } else if let (Some(positive), Some(rest)) = (kind, line.split("mf:action").nth(1)) {
            let file = rest.trim().trim_start_matches('<').split('>').next().unwrap().to_string();
            cases.push(W3cCase {
                name: file.trim_end_matches(".nt").to_string(),
                path: dir.join(&file),
                positive,
            });
            kind = None;
        }
    }
    cases
}

/// Whether the parser's verdict matches the case.
pub fn w3c_verdict(case: &W3cCase) -> bool {
    let accepted = parse_ntriples(File::open(&case.path).unwrap(), ParseMode::Strict).is_ok();
    accepted == case.positive
}
