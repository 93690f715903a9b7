mod common;

use std::collections::BTreeSet;

use common::{sc, showcase_asset, prepared, rdfs, synthesize};
use num_rational::BigRational;
use ontoqual::metrics::{self, build_instance_index, class_instantiation};
use ontoqual::synth::{self, oracle, SynthParams};
use ontoqual::{parse_ntriples, ExtractionProfile, Metric, OntologyGraph, ParseMode, TripleStore};

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn asset_matches_generator() {
    assert_eq!(showcase_asset().to_ntriples_string(), synth::showcase().to_ntriples_string());
}

#[test]
fn showcase_through_the_pipeline() {
    let store = showcase_asset();
    let graph = prepared(&store, &rdfs());
    let report = metrics::full_report(&store, &graph, &rdfs()).unwrap();
    assert_eq!(report.per_class[&sc("Person")].ci.value().unwrap(), &ratio(195, 1000));
    assert_eq!(report.statistics.instances, 500);

    let index = build_instance_index(&store, &graph, &rdfs()).unwrap();
    let musician = graph.class_id(&sc("Musician")).unwrap();
    let artist = graph.class_id(&sc("Artist")).unwrap();
    assert_eq!(index.direct_instances[musician.index()], 50);
    assert_eq!(index.direct_instances[artist.index()], 10);

    // the root-anchored value, recomputed by hand from the fixture's counts
    let depth_sums = [(0, 0), (1, 50 + 105), (2, 10 + 5 + 30 + 100 + 100), (3, 30 + 50 + 20)];
    let by_hand: BigRational = depth_sums.iter().map(|&(d, n)| ratio(n, 500 * (1 << d))).sum();
    assert_eq!(report.ci_kg.value().unwrap(), &by_hand);

    let athlete = &report.per_class[&sc("Athlete")];
    assert_eq!(athlete.spa_count, Some(4));
    let actor = &report.per_class[&sc("Actor")];
    assert_eq!(actor.spa_count, Some(2));
    // 30 type triples, plus 6 more about Tom Cruise of which 3 use Actor-only properties
    assert_eq!(actor.subject_triples, 36);
    assert_eq!(actor.distinct_property_triples, 3);
}

#[test]
fn oracle_agrees_on_showcase() {
    let store = showcase_asset();
    let graph = prepared(&store, &rdfs());
    let main = metrics::full_report(&store, &graph, &rdfs()).unwrap();
    let reference = oracle::oracle_metrics(&store, &graph, &rdfs()).unwrap();
    assert!(main.agrees_with(&reference, 1e-9), "{:#?}", main.differences(&reference, 1e-9));
}

#[test]
fn planted_cycle_is_reported() {
    for seed in 0..5 {
        let kg = synth::generate_kg(&SynthParams { class_count: 30, planted_cycles: 1, seed, ..SynthParams::default() }).unwrap();
        let (graph, report) = kg.graph.clone().prepare();
        assert_eq!(report.cycle_count, 1);
        assert_eq!(report.cycles, kg.ledger.planted_cycles);
        assert_eq!(graph.class_count(), 28);
        assert!(graph.is_acyclic());
    }
}

#[test]
fn ledger_matches_icr_and_ipr() {
    for seed in 0..10 {
        let params = SynthParams { class_count: 50, multi_type_probability: 0.0, seed, ..SynthParams::default() };
        let s = synthesize(&params);
        let ledger = &s.kg.ledger;
        assert_eq!(
            s.report.icr.value().unwrap(),
            &ratio(ledger.instantiated_classes.len() as i64, ledger.classes.len() as i64)
        );
        assert_eq!(
            s.report.ipr.value().unwrap(),
            &ratio(ledger.used_properties.len() as i64, ledger.property_count as i64)
        );
        for class in &ledger.classes {
            assert_eq!(s.report.per_class[&class.iri].direct_instances, class.asserted_instances, "{}", class.iri);
        }
    }
}

#[test]
fn tree_generator_gives_imi_one() {
    for seed in 0..10 {
        let s = synthesize(&SynthParams { multi_parent_probability: 0.0, seed, ..SynthParams::default() });
        assert_eq!(s.report.imi.to_f64(), Some(1.0));
        let dag = synthesize(&SynthParams { multi_parent_probability: 0.5, seed, ..SynthParams::default() });
        assert!(dag.report.imi.to_f64().unwrap() < 1.0);
    }
}

#[test]
fn random_dag_ci_matches_path_enumeration() {
    // depth = shortest path length; enumerate every downward path explicitly
    fn shortest(graph: &OntologyGraph, from: ontoqual::ClassId, to: ontoqual::ClassId, limit: u32) -> Option<u32> {
        if from == to {
            return Some(0);
        }
        if limit == 0 {
            return None;
        }
        graph.children(from).iter().filter_map(|&c| shortest(graph, c, to, limit - 1).map(|d| d + 1)).min()
    }
    let s = synthesize(&SynthParams { class_count: 30, multi_parent_probability: 0.4, max_depth: 4, seed: 11, ..SynthParams::default() });
    let index = build_instance_index(&s.kg.data, &s.graph, &rdfs()).unwrap();
    let n = index.total_entities as i64;
    for c in s.graph.classes() {
        let mut expected = ratio(0, 1);
        for d in s.graph.classes() {
            if let Some(depth) = shortest(&s.graph, c, d, 10) {
                expected += ratio(index.direct_instances[d.index()] as i64, n * (1 << depth));
            }
        }
        assert_eq!(class_instantiation(&s.graph, &index, c).unwrap().value().unwrap(), &expected);
    }
}

#[test]
fn separate_ontology_file() {
    let kg = synth::generate_kg(&SynthParams::preset_tree(4)).unwrap();
    let onto = parse_ntriples(kg.ontology.to_ntriples_string().as_bytes(), ParseMode::Strict).unwrap();
    let data = parse_ntriples(kg.data.to_ntriples_string().as_bytes(), ParseMode::Strict).unwrap();
    let graph = OntologyGraph::load_ontology_triples(&onto, &rdfs()).unwrap().prepare().0;
    let from_files = metrics::full_report(&data, &graph, &rdfs()).unwrap();
    let direct = synthesize(&SynthParams::preset_tree(4)).report;
    assert!(from_files.agrees_with(&direct, 0.0));
}

#[test]
fn empty_data_with_ontology() {
    let kg = synth::generate_kg(&SynthParams::preset_tree(1)).unwrap();
    let graph = kg.graph.prepare().0;
    let report = metrics::full_report(&TripleStore::default(), &graph, &rdfs()).unwrap();
    assert_eq!(report.icr.to_f64(), Some(0.0));
    assert_eq!(report.ipr.to_f64(), Some(0.0));
    assert!(!report.spi_mean.is_defined());
    assert!(!report.ci_kg.is_defined());
}

#[test]
fn label_filter_then_metrics() {
    let store = showcase_asset();
    let graph = prepared(&store, &rdfs());
    let outcome = store.filter_by_label_language(ontoqual::profile::RDFS_LABEL, "en");
    assert_eq!(outcome.retained_subjects.len(), 2);
    let report = metrics::full_report(&outcome.store, &graph, &rdfs()).unwrap();
    assert_eq!(report.statistics.instances, 2);
    assert_eq!(report.per_class[&sc("Musician")].direct_instances, 1);
}

#[test]
fn freebase_shape_extraction() {
    let text = "\
<http://rdf.freebase.com/ns/film.film> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2000/01/rdf-schema#Class> .
<http://rdf.freebase.com/ns/people.person> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/2000/01/rdf-schema#Class> .
<http://rdf.freebase.com/ns/film.film.directed_by> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://www.w3.org/1999/02/22-rdf-syntax-ns#Property> .
<http://rdf.freebase.com/ns/film.film.directed_by> <http://www.w3.org/2000/01/rdf-schema#domain> <http://rdf.freebase.com/ns/film.film> .
<http://rdf.freebase.com/ns/m.0abc> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://rdf.freebase.com/ns/film.film> .
";
    let store = parse_ntriples(text.as_bytes(), ParseMode::Strict).unwrap();
    let profile = ExtractionProfile::bundled("freebase").unwrap();
    let graph = prepared(&store, &profile);
    assert!(graph.synthesized_root());
    let report = metrics::full_report(&store, &graph, &profile).unwrap();
    assert_eq!(report.imi.to_f64(), Some(1.0));
    assert_eq!(report.icr.to_f64(), Some(0.5));
    assert_eq!(report.ipr.to_f64(), Some(0.0));
    assert_eq!(report.statistics.classes, 2);
}

#[test]
fn wikidata_shape_extraction() {
    let wd = |q: &str| format!("<http://www.wikidata.org/entity/{q}>");
    let p31 = "<http://www.wikidata.org/prop/direct/P31>";
    let p279 = "<http://www.wikidata.org/prop/direct/P279>";
    let p19 = "<http://www.wikidata.org/prop/direct/P19>";
    let text = [
        format!("{} {p279} {} .", wd("Q515"), wd("Q486972")),
        format!("{} {p31} {} .", wd("Q64"), wd("Q515")),
        format!("{} {p279} {} .", wd("Q5"), wd("Q215627")),
        format!("{} {p31} {} .", wd("Q5"), wd("Q16521")),
        format!("{} {p31} {} .", wd("Q42"), wd("Q5")),
        format!("{} {p19} {} .", wd("Q42"), wd("Q350")),
    ]
    .join("\n");
    let store = parse_ntriples(text.as_bytes(), ParseMode::Strict).unwrap();
    let profile = ExtractionProfile::bundled("wikidata").unwrap();
    let graph = prepared(&store, &profile);
    let report = metrics::full_report(&store, &graph, &profile).unwrap();
    assert!(graph.class_id("http://www.wikidata.org/entity/Q486972").is_some());
    assert!(graph.property_id("http://www.wikidata.org/prop/direct/P19").is_some());
    assert_eq!(report.ipr.to_f64(), Some(1.0));
    let classes: BTreeSet<&str> = report.per_class.keys().map(String::as_str).collect();
    assert!(classes.contains("http://www.wikidata.org/entity/Q5"));
    assert_eq!(report.statistics.instances, 2);
    assert_eq!(report.statistics.untyped_class_assertions, 1);
}

#[test]
fn ci_undefined_without_typed_entities() {
    let store = showcase_asset();
    let graph = prepared(&store, &rdfs());
    let report = metrics::full_report(&TripleStore::default(), &graph, &rdfs()).unwrap();
    assert!(matches!(report.per_class[&sc("Person")].ci, Metric::Undefined(_)));
    assert!(report.to_json()["metrics"]["ci"].is_null());
}
