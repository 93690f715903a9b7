//! Report assembly and rendering (JSON, CSV, Markdown).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::metrics::Metric;
use crate::ontology::{CycleReport, OntologyGraph};
use crate::profile::ExtractionProfile;
use crate::store::LabelFilterWarning;

/// Bumped whenever the JSON layout changes incompatibly.
pub const SCHEMA_VERSION: u32 = 1;

/// Decimal places kept when a value is rendered as text.
pub const DECIMAL_PLACES: u32 = 12;

/// Table column order for the six headline metrics.
pub const METRIC_COLUMNS: [&str; 6] = ["ICR", "IPR", "CI", "IMI", "SPA", "SPI"];

const UNDEFINED_CELL: &str = "—";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMetrics {
    pub ci: Metric,
    /// `None` for the root class.
    pub spa_count: Option<usize>,
    pub spa_ratio: Option<Metric>,
    pub spi: Option<Metric>,
    pub direct_instances: u64,
    pub instances: u64,
    pub subject_triples: u64,
    pub distinct_property_triples: u64,
    pub superclasses: usize,
    /// Original IRIs merged into this class by cycle condensation.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ReportStatistics {
    /// Ontology classes, not counting a synthesized root.
    pub classes: usize,
    pub properties: usize,
    pub triples: usize,
    pub instances: u64,
    pub subjects: usize,
    pub predicates: usize,
    pub undeclared_predicates: usize,
    pub untyped_class_assertions: u64,
    pub duplicate_triples: u64,
    pub malformed_lines: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootInfo {
    pub iri: String,
    pub synthesized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelFilterInfo {
    pub predicate: String,
    pub language: String,
    pub retained_subjects: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<LabelFilterWarning>,
}

/// Interpretation choices applied while computing the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub profile: String,
    pub ontology_source: String,
    pub depth_rule: &'static str,
    pub ci_kg_rule: &'static str,
    pub instance_denominator: &'static str,
    pub direct_instance_rule: &'static str,
    pub icr_rule: &'static str,
    pub spa_reporting: &'static str,
    pub spi_denominator: &'static str,
    pub imi_mean: &'static str,
    pub duplicate_triples: &'static str,
    pub root: RootInfo,
    pub cycles: CycleReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_filter: Option<LabelFilterInfo>,
}

impl Provenance {
    pub fn new(profile: &ExtractionProfile, graph: &OntologyGraph, cycles: CycleReport) -> Self {
        Provenance {
            profile: profile.name.clone(),
            ontology_source: "data".to_string(),
            depth_rule: "minimum subclass-edge distance",
            ci_kg_rule: "class instantiation at the root; per-class sum reported separately",
            instance_denominator: "entities typed with at least one ontology class",
            direct_instance_rule: "asserted type with no asserted strict descendant",
            icr_rule: "direct or inherited instances; synthesized root excluded",
            spa_reporting: "mean count of new properties, and mean ratio to all properties",
            spi_denominator: "triples whose subject is an instance of the class",
            imi_mean: "non-root classes",
            duplicate_triples: "set semantics",
            root: RootInfo {
                iri: graph.root().map(|r| graph.class_iri(r).to_string()).unwrap_or_default(),
                synthesized: graph.synthesized_root(),
            },
            cycles,
            label_filter: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricReport {
    /// Label used for the KG in tables.
    pub name: String,
    pub icr: Metric,
    pub ipr: Metric,
    pub ci_kg: Metric,
    pub imi: Metric,
    pub spa_mean_count: Metric,
    pub spa_ratio_mean: Metric,
    pub spi_mean: Metric,
    /// Sum of per-class CI values.
    pub ci_class_sum: Metric,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub statistics: ReportStatistics,
    pub provenance: Provenance,
    pub generated_at_unix: Option<u64>,
}

/// Rounds half away from zero to `places` decimals and trims trailing zeros.
pub fn decimal(value: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (value * BigRational::from_integer(scale.clone())).round().to_integer();
    let negative = scaled.is_negative();
    let abs = scaled.abs();
    let int = &abs / &scale;
    let frac = (&abs % &scale).to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if places > 0 && !frac.chars().all(|c| c == '0') {
        let padded = format!("{frac:0>width$}", width = places as usize);
        out.push('.');
        out.push_str(padded.trim_end_matches('0'));
    }
    out
}

fn cell(metric: &Metric, places: u32) -> String {
    match metric.value() {
        Some(v) => decimal(v, places),
        None => UNDEFINED_CELL.to_string(),
    }
}

fn json_number(metric: &Metric) -> Value {
    match metric.value() {
        Some(v) => {
            let text = decimal(v, DECIMAL_PLACES);
            serde_json::from_str(&text).unwrap_or(Value::Null)
        }
        None => Value::Null,
    }
}

fn json_opt(metric: Option<&Metric>) -> Value {
    metric.map(json_number).unwrap_or(Value::Null)
}

fn difference(label: &str, a: &Metric, b: &Metric, tolerance: f64) -> Option<String> {
    match (a, b) {
        (Metric::Value(x), Metric::Value(y)) => {
            let gap = (x - y).abs();
            if gap <= BigRational::from_float(tolerance).unwrap_or_else(BigRational::zero) {
                None
            } else {
                Some(format!("{label}: {} vs {}", decimal(x, 15), decimal(y, 15)))
            }
        }
        (Metric::Undefined(u), Metric::Undefined(v)) if u == v => None,
        _ => Some(format!("{label}: {a:?} vs {b:?}")),
    }
}

impl MetricReport {
    /// The six headline metrics in table order. SPA is the mean count.
    pub fn headline(&self) -> [&Metric; 6] {
        [&self.icr, &self.ipr, &self.ci_kg, &self.imi, &self.spa_mean_count, &self.spi_mean]
    }

    fn named_metrics(&self) -> [(&'static str, &Metric); 8] {
        [
            ("icr", &self.icr),
            ("ipr", &self.ipr),
            ("ci", &self.ci_kg),
            ("imi", &self.imi),
            ("spa", &self.spa_mean_count),
            ("spa_ratio", &self.spa_ratio_mean),
            ("spi", &self.spi_mean),
            ("ci_class_sum", &self.ci_class_sum),
        ]
    }

    /// Every metric field that differs by more than `tolerance`, or whose definedness differs.
    /// Empty when the reports agree.
    pub fn differences(&self, other: &MetricReport, tolerance: f64) -> Vec<String> {
        let mut out = Vec::new();
        for ((name, a), (_, b)) in self.named_metrics().into_iter().zip(other.named_metrics()) {
            out.extend(difference(name, a, b, tolerance));
        }
        let keys_a: Vec<&String> = self.per_class.keys().collect();
        let keys_b: Vec<&String> = other.per_class.keys().collect();
        if keys_a != keys_b {
            out.push(format!("class sets differ: {} vs {}", keys_a.len(), keys_b.len()));
            return out;
        }
        for (iri, a) in &self.per_class {
            let b = &other.per_class[iri];
            out.extend(difference(&format!("{iri} ci"), &a.ci, &b.ci, tolerance));
            if a.spa_count != b.spa_count {
                out.push(format!("{iri} spa_count: {:?} vs {:?}", a.spa_count, b.spa_count));
            }
            match (&a.spa_ratio, &b.spa_ratio) {
                (Some(x), Some(y)) => out.extend(difference(&format!("{iri} spa_ratio"), x, y, tolerance)),
                (None, None) => {}
                _ => out.push(format!("{iri} spa_ratio presence differs")),
            }
            match (&a.spi, &b.spi) {
                (Some(x), Some(y)) => out.extend(difference(&format!("{iri} spi"), x, y, tolerance)),
                (None, None) => {}
                _ => out.push(format!("{iri} spi presence differs")),
            }
            let counts_a = (a.direct_instances, a.instances, a.subject_triples, a.distinct_property_triples, a.superclasses);
            let counts_b = (b.direct_instances, b.instances, b.subject_triples, b.distinct_property_triples, b.superclasses);
            if counts_a != counts_b {
                out.push(format!("{iri} counts: {counts_a:?} vs {counts_b:?}"));
            }
        }
        out
    }

    pub fn agrees_with(&self, other: &MetricReport, tolerance: f64) -> bool {
        self.differences(other, tolerance).is_empty()
    }

    pub fn to_json(&self) -> Value {
        let mut metrics = Map::new();
        let mut exact = Map::new();
        let mut undefined = Map::new();
        for (name, m) in self.named_metrics() {
            metrics.insert(name.to_string(), json_number(m));
            match m {
                Metric::Value(_) => {
                    exact.insert(name.to_string(), Value::String(m.exact().expect("defined")));
                }
                Metric::Undefined(reason) => {
                    undefined.insert(name.to_string(), json!({ "reason": reason, "detail": reason.describe() }));
                }
            }
        }
        let per_class: Map<String, Value> = self
            .per_class
            .iter()
            .map(|(iri, c)| {
                let mut entry = json!({
                    "ci": json_number(&c.ci),
                    "spa_count": c.spa_count,
                    "spa_ratio": json_opt(c.spa_ratio.as_ref()),
                    "spi": json_opt(c.spi.as_ref()),
                    "direct_instances": c.direct_instances,
                    "instances": c.instances,
                    "subject_triples": c.subject_triples,
                    "distinct_property_triples": c.distinct_property_triples,
                    "superclasses": c.superclasses,
                });
                if c.members.len() > 1 {
                    entry["members"] = json!(c.members);
                }
                (iri.clone(), entry)
            })
            .collect();

        let mut root = Map::new();
        root.insert("schema_version".into(), json!(SCHEMA_VERSION));
        root.insert("kg".into(), json!(self.name));
        if let Some(t) = self.generated_at_unix {
            root.insert("generated_at_unix".into(), json!(t));
        }
        root.insert("metrics".into(), Value::Object(metrics));
        root.insert("exact".into(), Value::Object(exact));
        root.insert("undefined".into(), Value::Object(undefined));
        root.insert("statistics".into(), serde_json::to_value(&self.statistics).expect("plain struct"));
        root.insert("provenance".into(), serde_json::to_value(&self.provenance).expect("plain struct"));
        root.insert("per_class".into(), Value::Object(per_class));
        Value::Object(root)
    }

    pub fn to_json_string(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json()).expect("json value");
        text.push('\n');
        text
    }

    /// Single-row CSV with a header.
    pub fn to_csv(&self) -> String {
        reports_to_csv(&[self])
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("| KG | {} |\n", METRIC_COLUMNS.join(" | ")));
        out.push_str(&format!("|---|{}\n", "---:|".repeat(METRIC_COLUMNS.len())));
        let cells: Vec<String> = self.headline().iter().map(|m| cell(m, 4)).collect();
        out.push_str(&format!("| {} | {} |\n\n", self.name, cells.join(" | ")));

        let s = &self.statistics;
        out.push_str("| Classes | Properties | Triples | Instances |\n|---:|---:|---:|---:|\n");
        out.push_str(&format!("| {} | {} | {} | {} |\n\n", s.classes, s.properties, s.triples, s.instances));

        let p = &self.provenance;
        out.push_str(&format!("- profile: {}\n", p.profile));
        out.push_str(&format!(
            "- root: {}{}\n",
            p.root.iri,
            if p.root.synthesized { " (synthesized)" } else { "" }
        ));
        out.push_str(&format!("- condensed cycles: {}\n", p.cycles.cycle_count));
        out.push_str(&format!("- depth: {}\n", p.depth_rule));
        out.push_str(&format!("- SPI denominator: {}\n", p.spi_denominator));
        out.push_str(&format!("- SPA ratio mean: {}\n", cell(&self.spa_ratio_mean, 4)));
        for (name, m) in self.named_metrics() {
            if let Metric::Undefined(reason) = m {
                out.push_str(&format!("- {name} undefined: {}\n", reason.describe()));
            }
        }
        out
    }
}

const CSV_HEADER: [&str; 13] = [
    "kg",
    "ICR",
    "IPR",
    "CI",
    "IMI",
    "SPA",
    "SPI",
    "SPA_ratio",
    "classes",
    "properties",
    "triples",
    "instances",
    "undeclared_predicates",
];

/// One CSV row per report. Undefined metrics are empty cells.
pub fn reports_to_csv(reports: &[&MetricReport]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        let value = |m: &Metric| m.value().map(|v| decimal(v, DECIMAL_PLACES)).unwrap_or_default();
        let s = &r.statistics;
        let mut row = vec![r.name.clone()];
        row.extend(r.headline().iter().map(|m| value(m)));
        row.push(value(&r.spa_ratio_mean));
        row.extend([s.classes.to_string(), s.properties.to_string(), s.triples.to_string(), s.instances.to_string()]);
        row.push(s.undeclared_predicates.to_string());
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8 input")
}

/// A column of a comparison table: a finished report or the reason it failed.
#[derive(Debug, Clone)]
pub enum CompareColumn {
    Report(Box<MetricReport>),
    Failed { name: String, error: String },
}

impl CompareColumn {
    pub fn name(&self) -> &str {
        match self {
            CompareColumn::Report(r) => &r.name,
            CompareColumn::Failed { name, .. } => name,
        }
    }

    fn report(&self) -> Option<&MetricReport> {
        match self {
            CompareColumn::Report(r) => Some(r),
            CompareColumn::Failed { .. } => None,
        }
    }
}

/// Metrics as rows and KGs as columns, statistics below.
pub fn compare_markdown(columns: &[CompareColumn]) -> String {
    let mut out = String::new();
    let headers: Vec<String> = columns
        .iter()
        .map(|c| match c {
            CompareColumn::Report(r) => r.name.clone(),
            CompareColumn::Failed { name, .. } => format!("{name} (failed)"),
        })
        .collect();
    out.push_str(&format!("| Metric | {} |\n", headers.join(" | ")));
    out.push_str(&format!("|---|{}\n", "---:|".repeat(columns.len())));
    for (i, label) in METRIC_COLUMNS.iter().enumerate() {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.report().map(|r| cell(r.headline()[i], 4)).unwrap_or_else(|| UNDEFINED_CELL.into()))
            .collect();
        out.push_str(&format!("| {label} | {} |\n", cells.join(" | ")));
    }
    type Stat = fn(&ReportStatistics) -> String;
    let stats: [(&str, Stat); 4] = [
        ("Classes", |s| s.classes.to_string()),
        ("Properties", |s| s.properties.to_string()),
        ("Triples", |s| s.triples.to_string()),
        ("Instances", |s| s.instances.to_string()),
    ];
    for (label, f) in stats {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| c.report().map(|r| format!("({})", f(&r.statistics))).unwrap_or_else(|| UNDEFINED_CELL.into()))
            .collect();
        out.push_str(&format!("| {label} | {} |\n", cells.join(" | ")));
    }
    let failures: Vec<String> = columns
        .iter()
        .filter_map(|c| match c {
            CompareColumn::Failed { name, error } => Some(format!("- {name}: {error}\n")),
            CompareColumn::Report(_) => None,
        })
        .collect();
    if !failures.is_empty() {
        out.push('\n');
        out.extend(failures);
    }
    out
}

pub fn compare_csv(columns: &[CompareColumn]) -> String {
    let reports: Vec<&MetricReport> = columns.iter().filter_map(CompareColumn::report).collect();
    reports_to_csv(&reports)
}

pub fn compare_json(columns: &[CompareColumn]) -> String {
    let entries: Vec<Value> = columns
        .iter()
        .map(|c| match c {
            CompareColumn::Report(r) => r.to_json(),
            CompareColumn::Failed { name, error } => json!({ "kg": name, "error": error }),
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "schema_version": SCHEMA_VERSION, "reports": entries }))
        .expect("json value");
    text.push('\n');
    text
}
