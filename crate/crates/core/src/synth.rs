//! Seeded synthetic knowledge graphs with a ground-truth ledger, plus a small hand-built
//! example graph used throughout the tests.

pub mod oracle;

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::OntologyGraph;
use crate::profile::{ExtractionProfile, RDFS_CLASS, RDFS_DOMAIN, RDFS_LABEL, RDFS_SUBCLASS_OF, RDF_PROPERTY, RDF_TYPE};
use crate::store::{TripleStore, TripleStoreBuilder};
use crate::term::Term;

pub const SYNTH_BASE: &str = "http://example.org/synth/";

/// Languages used for generated labels.
pub const LABEL_LANGUAGES: [&str; 3] = ["en", "de", "ko"];

/// How entities are spread over the instantiated classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Skew {
    Uniform,
    /// Zipf over a random ranking of the classes, with this exponent.
    Zipf(f64),
}

impl fmt::Display for Skew {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skew::Uniform => f.write_str("uniform"),
            Skew::Zipf(s) => write!(f, "zipf:{s}"),
        }
    }
}

impl FromStr for Skew {
    type Err = String;

    /// `uniform` or `zipf:<exponent>`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "uniform" {
            return Ok(Skew::Uniform);
        }
        let exponent = s.strip_prefix("zipf:").ok_or_else(|| format!("expected `uniform` or `zipf:<s>`, got `{s}`"))?;
        exponent
            .parse::<f64>()
            .map(Skew::Zipf)
            .map_err(|e| format!("bad zipf exponent `{exponent}`: {e}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthParams {
    pub class_count: usize,
    /// Longest parent chain below class 0; 0 gives a flat ontology.
    pub max_depth: u32,
    pub multi_parent_probability: f64,
    pub entity_count: usize,
    pub property_count: usize,
    /// Poisson mean of domain properties declared per class.
    pub property_per_class_mean: f64,
    pub instantiation_skew: Skew,
    /// Three-class subclass cycles among leaf classes.
    pub planted_cycles: usize,
    pub seed: u64,
    /// Share of classes that receive instances directly.
    pub instantiated_class_fraction: f64,
    /// Share of properties ever used as a predicate.
    pub property_usage_fraction: f64,
    /// Poisson mean of property triples per entity.
    pub triples_per_entity_mean: f64,
    /// Chance that an entity gets a second asserted type.
    pub multi_type_probability: f64,
    /// Chance that an entity gets a language-tagged label.
    pub label_probability: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            class_count: 40,
            max_depth: 4,
            multi_parent_probability: 0.2,
            entity_count: 400,
            property_count: 30,
            property_per_class_mean: 1.0,
            instantiation_skew: Skew::Uniform,
            planted_cycles: 0,
            seed: 0,
            instantiated_class_fraction: 0.7,
            property_usage_fraction: 0.8,
            triples_per_entity_mean: 3.0,
            multi_type_probability: 0.0,
            label_probability: 0.3,
        }
    }
}

impl SynthParams {
    /// Small tree.
    pub fn preset_tree(seed: u64) -> Self {
        SynthParams {
            class_count: 30,
            max_depth: 4,
            multi_parent_probability: 0.0,
            entity_count: 300,
            property_count: 20,
            seed,
            ..Self::default()
        }
    }

    /// Medium DAG with multiple inheritance and some multi-typed entities.
    pub fn preset_multi_parent(seed: u64) -> Self {
        SynthParams {
            class_count: 50,
            max_depth: 5,
            multi_parent_probability: 0.3,
            entity_count: 500,
            property_count: 40,
            property_per_class_mean: 1.5,
            multi_type_probability: 0.1,
            seed,
            ..Self::default()
        }
    }

    /// Head-heavy instantiation over a few levels.
    pub fn preset_skewed(seed: u64) -> Self {
        SynthParams {
            class_count: 50,
            max_depth: 3,
            multi_parent_probability: 0.1,
            entity_count: 500,
            property_count: 30,
            instantiation_skew: Skew::Zipf(1.2),
            instantiated_class_fraction: 0.5,
            property_usage_fraction: 0.6,
            seed,
            ..Self::default()
        }
    }

    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        match name {
            "tree" | "small" => Ok(Self::preset_tree(seed)),
            "multi-parent" | "medium" => Ok(Self::preset_multi_parent(seed)),
            "skewed" => Ok(Self::preset_skewed(seed)),
            other => Err(Error::Params(format!("unknown preset `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Params(m));
        if self.class_count == 0 {
            return err("class_count must be at least 1".into());
        }
        if u32::try_from(self.class_count).is_err() || u32::try_from(self.entity_count).is_err() {
            return err("class_count and entity_count must fit in 32 bits".into());
        }
        let probabilities = [
            ("multi_parent_probability", self.multi_parent_probability),
            ("instantiated_class_fraction", self.instantiated_class_fraction),
            ("property_usage_fraction", self.property_usage_fraction),
            ("multi_type_probability", self.multi_type_probability),
            ("label_probability", self.label_probability),
        ];
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return err(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        for (name, m) in [
            ("property_per_class_mean", self.property_per_class_mean),
            ("triples_per_entity_mean", self.triples_per_entity_mean),
        ] {
            if !m.is_finite() || m < 0.0 {
                return err(format!("{name} must be a non-negative number, got {m}"));
            }
        }
        if let Skew::Zipf(s) = self.instantiation_skew {
            if !s.is_finite() || s <= 0.0 {
                return err(format!("zipf exponent must be positive, got {s}"));
            }
        }
        let reserved = self.planted_cycles.saturating_mul(3);
        if reserved > self.class_count - 1 {
            return err(format!(
                "{} planted cycles need {} leaf classes besides class 0, but class_count is {}",
                self.planted_cycles, reserved, self.class_count
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerClass {
    pub iri: String,
    pub parents: Vec<String>,
    /// Longest parent chain from class 0, ignoring planted cycle edges.
    pub level: u32,
    pub domain: Vec<String>,
    /// Entities asserted to have this type.
    pub asserted_instances: u64,
}

/// What the generator planted, for checking analysis results against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthLedger {
    pub params: SynthParams,
    pub classes: Vec<LedgerClass>,
    pub property_count: usize,
    /// Properties used by at least one data triple.
    pub used_properties: Vec<String>,
    /// Classes with an asserted instance of themselves or of a descendant.
    pub instantiated_classes: Vec<String>,
    /// Sorted member IRIs of each planted cycle.
    pub planted_cycles: Vec<Vec<String>>,
    pub multi_parent_classes: usize,
    pub entities: u64,
    pub multi_typed_entities: u64,
    pub data_triples: u64,
    pub ontology_triples: u64,
}

impl GroundTruthLedger {
    pub fn summary(&self) -> String {
        format!(
            "classes {} (multi-parent {}, instantiated {}), properties {} (used {}), entities {}, data triples {}, ontology triples {}, planted cycles {}",
            self.classes.len(),
            self.multi_parent_classes,
            self.instantiated_classes.len(),
            self.property_count,
            self.used_properties.len(),
            self.entities,
            self.data_triples,
            self.ontology_triples,
            self.planted_cycles.len()
        )
    }
}

/// A generated fixture: instance data and ontology are separate stores.
#[derive(Debug, Clone)]
pub struct SynthKg {
    pub data: TripleStore,
    pub ontology: TripleStore,
    /// Extracted from `ontology` with the rdfs profile; not yet condensed or rooted.
    pub graph: OntologyGraph,
    pub ledger: GroundTruthLedger,
}

impl SynthKg {
    /// Writes `data.nt`, `ontology.nt` and `ledger.json` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut data = BufWriter::new(fs::File::create(dir.join("data.nt"))?);
        self.data.write_ntriples(&mut data)?;
        data.flush()?;
        let mut onto = BufWriter::new(fs::File::create(dir.join("ontology.nt"))?);
        self.ontology.write_ntriples(&mut onto)?;
        onto.flush()?;
        let mut ledger = serde_json::to_string_pretty(&self.ledger).map_err(|e| Error::Params(e.to_string()))?;
        ledger.push('\n');
        fs::write(dir.join("ledger.json"), ledger)?;
        Ok(())
    }
}

pub fn class_iri(i: usize) -> String {
    format!("{SYNTH_BASE}class/C{i}")
}

pub fn property_iri(j: usize) -> String {
    format!("{SYNTH_BASE}property/p{j}")
}

pub fn entity_iri(e: usize) -> String {
    format!("{SYNTH_BASE}entity/e{e}")
}

fn iri(s: &str) -> Term {
    Term::iri(s).expect("non-empty IRI")
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as usize
}

/// Ancestors-or-self through `parents`, tolerating cycles.
fn closure(parents: &[Vec<usize>], class: usize) -> Vec<usize> {
    let mut seen = vec![class];
    let mut stack = vec![class];
    while let Some(c) = stack.pop() {
        for &p in &parents[c] {
            if !seen.contains(&p) {
                seen.push(p);
                stack.push(p);
            }
        }
    }
    seen.sort_unstable();
    seen
}

/// Generates a fixture. Output depends only on `params`.
pub fn generate_kg(params: &SynthParams) -> Result<SynthKg> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.class_count;
    let reserved_from = n - 3 * params.planted_cycles;

    // hierarchy
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut level = vec![0u32; n];
    let mut open: Vec<usize> = Vec::new();
    if params.max_depth > 0 {
        open.push(0);
    }
    let mut multi_parent_classes = 0;
    for i in 1..n {
        if !open.is_empty() {
            let first = open[rng.random_range(0..open.len())];
            parents[i].push(first);
            if open.len() > 1 && rng.random_bool(params.multi_parent_probability) {
                let mut second = first;
                while second == first {
                    second = open[rng.random_range(0..open.len())];
                }
                parents[i].push(second);
                multi_parent_classes += 1;
            }
            level[i] = parents[i].iter().map(|&p| level[p]).max().expect("has a parent") + 1;
        }
        if i < reserved_from && level[i] < params.max_depth {
            open.push(i);
        }
    }
    let mut planted_cycles = Vec::new();
    for k in 0..params.planted_cycles {
        let (a, b, c) = (reserved_from + 3 * k, reserved_from + 3 * k + 1, reserved_from + 3 * k + 2);
        parents[a].push(b);
        parents[b].push(c);
        parents[c].push(a);
        let mut members = vec![class_iri(a), class_iri(b), class_iri(c)];
        members.sort();
        planted_cycles.push(members);
    }

    // domains
    let mut domains: Vec<Vec<usize>> = Vec::with_capacity(n);
    for _ in 0..n {
        let k = poisson(&mut rng, params.property_per_class_mean).min(params.property_count);
        let mut chosen = index::sample(&mut rng, params.property_count, k).into_vec();
        chosen.sort_unstable();
        domains.push(chosen);
    }

    let mut onto = TripleStoreBuilder::new();
    let (rdf_type, subclass_of, domain_p) = (iri(RDF_TYPE), iri(RDFS_SUBCLASS_OF), iri(RDFS_DOMAIN));
    let class_terms: Vec<Term> = (0..n).map(|i| iri(&class_iri(i))).collect();
    let property_terms: Vec<Term> = (0..params.property_count).map(|j| iri(&property_iri(j))).collect();
    for i in 0..n {
        onto.insert(class_terms[i].clone(), rdf_type.clone(), iri(RDFS_CLASS))?;
        for &p in &parents[i] {
            onto.insert(class_terms[i].clone(), subclass_of.clone(), class_terms[p].clone())?;
        }
    }
    for p in &property_terms {
        onto.insert(p.clone(), rdf_type.clone(), iri(RDF_PROPERTY))?;
    }
    for (i, props) in domains.iter().enumerate() {
        for &j in props {
            onto.insert(property_terms[j].clone(), domain_p.clone(), class_terms[i].clone())?;
        }
    }
    let ontology = onto.finish();

    // which classes receive instances, in zipf rank order
    let eligible_count = ((params.instantiated_class_fraction * n as f64).round() as usize).clamp(1, n);
    let eligible = index::sample(&mut rng, n, eligible_count).into_vec();
    let usable_count = (params.property_usage_fraction * params.property_count as f64).round() as usize;
    let mut usable = index::sample(&mut rng, params.property_count, usable_count).into_vec();
    usable.sort_unstable();

    let closures: Vec<Vec<usize>> = (0..n).map(|c| closure(&parents, c)).collect();
    // usable properties declared on a class or its ancestors
    let class_props: Vec<Vec<usize>> = closures
        .iter()
        .map(|anc| {
            let set: BTreeSet<usize> = anc
                .iter()
                .flat_map(|&a| domains[a].iter().copied())
                .filter(|p| usable.binary_search(p).is_ok())
                .collect();
            set.into_iter().collect()
        })
        .collect();

    let zipf = match params.instantiation_skew {
        Skew::Zipf(s) => Some(Zipf::new(eligible.len() as f64, s).map_err(|e| Error::Params(e.to_string()))?),
        Skew::Uniform => None,
    };
    let label_p = iri(RDFS_LABEL);
    let mut data = TripleStoreBuilder::new();
    let mut asserted = vec![0u64; n];
    let mut instantiated = vec![false; n];
    let mut used = vec![false; params.property_count];
    let mut multi_typed = 0u64;
    let mut pool: Vec<usize> = Vec::new();
    for e in 0..params.entity_count {
        let subject = iri(&entity_iri(e));
        let pick = |rng: &mut ChaCha8Rng| match &zipf {
            Some(z) => eligible[(z.sample(rng) as usize).clamp(1, eligible.len()) - 1],
            None => eligible[rng.random_range(0..eligible.len())],
        };
        let first = pick(&mut rng);
        let mut types = vec![first];
        if eligible.len() > 1 && rng.random_bool(params.multi_type_probability) {
            let mut second = first;
            while second == first {
                second = eligible[rng.random_range(0..eligible.len())];
            }
            types.push(second);
            multi_typed += 1;
        }
        for &t in &types {
            data.insert(subject.clone(), rdf_type.clone(), class_terms[t].clone())?;
            asserted[t] += 1;
            for &a in &closures[t] {
                instantiated[a] = true;
            }
        }
        if rng.random_bool(params.label_probability) {
            let lang = LABEL_LANGUAGES[rng.random_range(0..LABEL_LANGUAGES.len())];
            data.insert(subject.clone(), label_p.clone(), Term::lang_string(format!("e{e}"), lang))?;
        }
        if usable.is_empty() {
            continue;
        }
        pool.clear();
        for &t in &types {
            pool.extend_from_slice(&class_props[t]);
        }
        for _ in 0..poisson(&mut rng, params.triples_per_entity_mean) {
            let prop = if !pool.is_empty() && rng.random_bool(0.8) {
                pool[rng.random_range(0..pool.len())]
            } else {
                usable[rng.random_range(0..usable.len())]
            };
            let object = iri(&entity_iri(rng.random_range(0..params.entity_count)));
            if data.insert(subject.clone(), property_terms[prop].clone(), object)? {
                used[prop] = true;
            }
        }
    }
    let data = data.finish();

    let profile = ExtractionProfile::bundled("rdfs")?;
    let graph = OntologyGraph::load_ontology_triples(&ontology, &profile)?;
    let ledger = GroundTruthLedger {
        params: params.clone(),
        classes: (0..n)
            .map(|i| LedgerClass {
                iri: class_iri(i),
                parents: parents[i].iter().map(|&p| class_iri(p)).collect(),
                level: level[i],
                domain: domains[i].iter().map(|&j| property_iri(j)).collect(),
                asserted_instances: asserted[i],
            })
            .collect(),
        property_count: params.property_count,
        used_properties: (0..params.property_count).filter(|&j| used[j]).map(property_iri).collect(),
        instantiated_classes: (0..n).filter(|&i| instantiated[i]).map(class_iri).collect(),
        planted_cycles,
        multi_parent_classes,
        entities: params.entity_count as u64,
        multi_typed_entities: multi_typed,
        data_triples: data.len() as u64,
        ontology_triples: ontology.len() as u64,
    };
    Ok(SynthKg { data, ontology, graph, ledger })
}

pub const SHOWCASE_BASE: &str = "http://example.org/showcase/";

/// Class tree and direct-instance counts of the worked example:
/// `(class, parent, direct instances)`.
pub const SHOWCASE_CLASSES: [(&str, Option<&str>, usize); 12] = [
    ("Thing", None, 0),
    ("Person", Some("Thing"), 50),
    ("CreativeWork", Some("Thing"), 105),
    ("Artist", Some("Person"), 10),
    ("Athlete", Some("Person"), 5),
    ("Politician", Some("Person"), 30),
    ("Actor", Some("Artist"), 30),
    ("Musician", Some("Artist"), 50),
    ("Author", Some("Artist"), 20),
    ("Book", Some("CreativeWork"), 100),
    ("Movie", Some("CreativeWork"), 100),
    ("Place", Some("Thing"), 0),
];

/// `(property, domain class)` declarations of the worked example.
pub const SHOWCASE_PROPERTIES: [(&str, &str); 9] = [
    ("parent", "Person"),
    ("birthDate", "Person"),
    ("birthPlace", "Person"),
    ("backNumber", "Athlete"),
    ("team", "Athlete"),
    ("worldRanking", "Athlete"),
    ("league", "Athlete"),
    ("castMemberOf", "Actor"),
    ("characterRole", "Actor"),
];

fn sc(local: &str) -> Term {
    iri(&format!("{SHOWCASE_BASE}{local}"))
}

/// The worked example as one store (ontology and data together), for the rdfs profile.
///
/// 500 typed entities. Person has 50 direct instances, its children 10/5/30 and the
/// Artist subclasses 30/50/20, so the class instantiation of Person is
/// `0.1 + 0.09/2 + 0.2/4`. Ariana Grande is typed both Artist and Musician and counts
/// as a direct Musician only.
pub fn showcase() -> TripleStore {
    let mut b = TripleStoreBuilder::new();
    let mut add = |s: Term, p: &str, o: Term| {
        b.insert(s, iri(p), o).expect("valid triple");
    };
    for (class, parent, _) in SHOWCASE_CLASSES {
        add(sc(class), RDF_TYPE, iri(RDFS_CLASS));
        if let Some(p) = parent {
            add(sc(class), RDFS_SUBCLASS_OF, sc(p));
        }
    }
    for (prop, domain) in SHOWCASE_PROPERTIES {
        add(sc(prop), RDF_TYPE, iri(RDF_PROPERTY));
        add(sc(prop), RDFS_DOMAIN, sc(domain));
    }

    let named: [(&str, &[&str]); 5] = [
        ("Ariana_Grande", &["Artist", "Musician"]),
        ("Pablo_Picasso", &["Artist"]),
        ("Tom_Cruise", &["Actor"]),
        ("Top_Gun", &["Movie"]),
        ("Mission_Impossible", &["Movie"]),
    ];
    let mut direct: Vec<(&str, usize)> = SHOWCASE_CLASSES.iter().map(|&(c, _, n)| (c, n)).collect();
    for (name, types) in named {
        for t in types {
            add(sc(name), RDF_TYPE, sc(t));
        }
        let counted = types.last().expect("typed");
        direct.iter_mut().find(|(c, _)| c == counted).expect("known class").1 -= 1;
    }
    for (class, n) in direct {
        for i in 0..n {
            add(sc(&format!("{class}_{i}")), RDF_TYPE, sc(class));
        }
    }

    let xsd_date = "http://www.w3.org/2001/XMLSchema#date";
    let tom = || sc("Tom_Cruise");
    add(tom(), &format!("{SHOWCASE_BASE}birthDate"), Term::literal("1962-07-03", Some(xsd_date.to_string()), None).expect("typed literal"));
    add(tom(), &format!("{SHOWCASE_BASE}birthPlace"), sc("Syracuse"));
    add(tom(), &format!("{SHOWCASE_BASE}castMemberOf"), sc("Top_Gun"));
    add(tom(), &format!("{SHOWCASE_BASE}castMemberOf"), sc("Mission_Impossible"));
    add(tom(), &format!("{SHOWCASE_BASE}characterRole"), Term::string("Maverick"));
    add(tom(), RDFS_LABEL, Term::lang_string("Tom Cruise", "en"));
    add(sc("Ariana_Grande"), RDFS_LABEL, Term::lang_string("Ariana Grande", "en"));
    add(sc("Pablo_Picasso"), RDFS_LABEL, Term::lang_string("Pablo Picasso", "es"));
    add(sc("Pablo_Picasso"), &format!("{SHOWCASE_BASE}birthPlace"), sc("Malaga"));
    add(sc("Athlete_0"), &format!("{SHOWCASE_BASE}team"), sc("Team_0"));
    add(sc("Athlete_0"), &format!("{SHOWCASE_BASE}backNumber"), Term::string("10"));
    b.finish()
}
