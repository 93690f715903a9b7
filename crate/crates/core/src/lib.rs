//! Structural quality metrics for RDF knowledge graphs.
//!
//! The pipeline is: stream N-Triples into a [`TripleStore`], build an
//! [`OntologyGraph`] from it (or from a separate ontology file) using an
//! [`ExtractionProfile`], condense subclass cycles, synthesize a root, then
//! compute a [`MetricReport`] with [`metrics::full_report`].
//!
//! ```
//! use ontoqual::{metrics, parse_ntriples, ExtractionProfile, OntologyGraph, ParseMode};
//!
//! let data = r#"
//! <urn:Person> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <urn:Thing> .
//! <urn:alice> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <urn:Person> .
//! "#;
//! let store = parse_ntriples(data.as_bytes(), ParseMode::Strict).unwrap();
//! let profile = ExtractionProfile::bundled("rdfs").unwrap();
//! let graph = OntologyGraph::extract(&store, &profile).unwrap().prepare().0;
//! let report = metrics::full_report(&store, &graph, &profile).unwrap();
//! assert_eq!(report.icr.to_f64(), Some(1.0));
//! ```

pub mod error;
pub mod metrics;
pub mod ntriples;
pub mod ontology;
pub mod profile;
pub mod report;
pub mod store;
pub mod synth;
pub mod term;

pub use error::{Error, Result};
pub use metrics::{InstanceIndex, Metric, Undefined};
pub use ontology::{ClassId, CycleReport, OntologyGraph, PropertyId};
pub use profile::{ExtractionProfile, MarkerRule, ObjectPattern};
pub use report::MetricReport;
pub use store::{parse_ntriples, ParseMode, ParseStats, StoreStats, Triple, TripleStore};
pub use term::{Term, TermId, TermKind};
