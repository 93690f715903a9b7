//! The six structural quality metrics and the instance index they are computed from.
//!
//! All values are exact rationals; decimal rendering happens only in [`crate::report`].
//! A zero denominator never produces a number, it produces [`Metric::Undefined`].

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ontology::{ClassId, OntologyGraph, PropertyId};
use crate::profile::ExtractionProfile;
use crate::report::{ClassMetrics, MetricReport, Provenance, ReportStatistics};
use crate::store::TripleStore;
use crate::term::TermId;

/// Why a metric has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Undefined {
    NoClasses,
    NoProperties,
    NoTypedEntities,
    NoNonRootClasses,
    NoSuperclasses,
    NoSubjectTriples,
    NoDefinedValues,
}

impl Undefined {
    pub fn describe(self) -> &'static str {
        match self {
            Undefined::NoClasses => "the ontology has no classes",
            Undefined::NoProperties => "the ontology has no properties",
            Undefined::NoTypedEntities => "no entity is typed with an ontology class",
            Undefined::NoNonRootClasses => "the ontology has no class besides the root",
            Undefined::NoSuperclasses => "no non-root class has a superclass",
            Undefined::NoSubjectTriples => "no triple has an instance of the class as subject",
            Undefined::NoDefinedValues => "no class has a defined value",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Metric {
    Value(BigRational),
    Undefined(Undefined),
}

impl Metric {
    pub fn ratio(numerator: u64, denominator: u64, if_zero: Undefined) -> Metric {
        if denominator == 0 {
            Metric::Undefined(if_zero)
        } else {
            Metric::Value(BigRational::new(numerator.into(), denominator.into()))
        }
    }

    pub fn value(&self) -> Option<&BigRational> {
        match self {
            Metric::Value(v) => Some(v),
            Metric::Undefined(_) => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Metric::Value(_))
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.value().map(|v| v.to_f64().expect("finite rational"))
    }

    /// `numerator/denominator` text of the exact value.
    pub fn exact(&self) -> Option<String> {
        self.value().map(|v| format!("{}/{}", v.numer(), v.denom()))
    }
}

/// Mean of defined values; `if_empty` when there are none.
fn mean(values: impl IntoIterator<Item = BigRational>, if_empty: Undefined) -> Metric {
    let mut sum = BigRational::zero();
    let mut n: u64 = 0;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        Metric::Undefined(if_empty)
    } else {
        Metric::Value(sum / BigRational::from_integer(n.into()))
    }
}

/// Per-class instance and triple counts over one store, indexed by [`ClassId`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InstanceIndex {
    /// Entities typed with the class and with none of its strict descendants.
    pub direct_instances: Vec<u64>,
    /// Entities typed with the class or any descendant.
    pub instances: Vec<u64>,
    /// Distinct entities with at least one type assertion naming an ontology class.
    pub total_entities: u64,
    /// Triples whose subject is an instance of the class.
    pub subject_triples: Vec<u64>,
    /// Those of `subject_triples` whose predicate is one of the class's distinct properties.
    pub distinct_prop_triples: Vec<u64>,
    /// Ontology properties used as a predicate anywhere in the store.
    pub used_properties: BTreeSet<PropertyId>,
    /// Distinct predicates in the store that the ontology does not declare.
    pub undeclared_predicates: usize,
    /// Type triples whose object is not an ontology class.
    pub untyped_class_assertions: u64,
}

impl InstanceIndex {
    pub fn is_instantiated(&self, class: ClassId) -> bool {
        self.instances[class.index()] > 0
    }

    pub fn instantiated_classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.instances
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, _)| ClassId(i as u32))
    }
}

fn ensure_prepared(graph: &OntologyGraph) -> Result<ClassId> {
    let root = graph.root().ok_or(Error::NotRooted)?;
    if !graph.is_acyclic() {
        return Err(Error::Cyclic);
    }
    Ok(root)
}

fn ensure_root(graph: &OntologyGraph) -> Result<ClassId> {
    graph.root().ok_or(Error::NotRooted)
}

/// Lazily computed, sorted ancestor-or-self lists.
struct Closures<'g> {
    graph: &'g OntologyGraph,
    cache: Vec<Option<Box<[ClassId]>>>,
}

impl<'g> Closures<'g> {
    fn new(graph: &'g OntologyGraph) -> Self {
        Closures {
            graph,
            cache: vec![None; graph.class_count()],
        }
    }

    fn get(&mut self, class: ClassId) -> &[ClassId] {
        if self.cache[class.index()].is_none() {
            let mut all: Vec<ClassId> = self.graph.ancestors(class).expect("known class").into_iter().collect();
            all.push(class);
            all.sort_unstable();
            self.cache[class.index()] = Some(all.into_boxed_slice());
        }
        self.cache[class.index()].as_deref().expect("just filled")
    }
}

/// Scans the store once per entity and fills every counter of [`InstanceIndex`].
///
/// An entity is a direct instance of each asserted type that is not a strict ancestor
/// of another of its asserted types.
pub fn build_instance_index(store: &TripleStore, graph: &OntologyGraph, profile: &ExtractionProfile) -> Result<InstanceIndex> {
    ensure_prepared(graph)?;
    let n = graph.class_count();
    let mut index = InstanceIndex {
        direct_instances: vec![0; n],
        instances: vec![0; n],
        subject_triples: vec![0; n],
        distinct_prop_triples: vec![0; n],
        ..InstanceIndex::default()
    };

    // predicate term -> ontology property
    let mut predicate_property: HashMap<TermId, PropertyId> = HashMap::new();
    for p in store.predicates() {
        match store.iri(p).and_then(|iri| graph.property_id(iri)) {
            Some(pid) => {
                predicate_property.insert(p, pid);
                index.used_properties.insert(pid);
            }
            None => index.undeclared_predicates += 1,
        }
    }

    // property -> classes for which it is a distinct property
    let mut owners: Vec<Vec<ClassId>> = vec![Vec::new(); graph.property_count()];
    for c in graph.classes() {
        for p in graph.distinct_properties(c)? {
            owners[p.index()].push(c);
        }
    }

    let mut typed: Vec<(TermId, ClassId)> = Vec::new();
    let mut class_of_term: HashMap<TermId, Option<ClassId>> = HashMap::new();
    if let Some(type_id) = store.lookup_iri(&profile.type_predicate) {
        for t in store.with_predicate(type_id) {
            let class = *class_of_term
                .entry(t.object)
                .or_insert_with(|| store.iri(t.object).and_then(|iri| graph.class_id(iri)));
            match class {
                Some(c) => typed.push((t.subject, c)),
                None => index.untyped_class_assertions += 1,
            }
        }
    }
    typed.sort_unstable();
    typed.dedup();

    let mut closures = Closures::new(graph);
    let mut union: Vec<ClassId> = Vec::new();
    let mut direct: Vec<ClassId> = Vec::new();
    for group in typed.chunk_by(|a, b| a.0 == b.0) {
        let entity = group[0].0;
        let types: Vec<ClassId> = group.iter().map(|&(_, c)| c).collect();
        index.total_entities += 1;

        union.clear();
        direct.clear();
        if types.len() == 1 {
            direct.push(types[0]);
            union.extend_from_slice(closures.get(types[0]));
        } else {
            for &t in &types {
                union.extend_from_slice(closures.get(t));
            }
            union.sort_unstable();
            union.dedup();
            for &t in &types {
                let below = types.iter().any(|&u| u != t && closures.get(u).binary_search(&t).is_ok());
                if !below {
                    direct.push(t);
                }
            }
        }

        for &c in &direct {
            index.direct_instances[c.index()] += 1;
        }
        let degree = store.subject_degree(entity) as u64;
        for &c in &union {
            index.instances[c.index()] += 1;
            index.subject_triples[c.index()] += degree;
        }
        for t in store.with_subject(entity) {
            if let Some(pid) = predicate_property.get(&t.predicate) {
                for &owner in &owners[pid.index()] {
                    if union.binary_search(&owner).is_ok() {
                        index.distinct_prop_triples[owner.index()] += 1;
                    }
                }
            }
        }
    }
    Ok(index)
}

/// Instantiated class ratio. A synthesized root counts in neither numerator nor denominator.
pub fn icr(graph: &OntologyGraph, index: &InstanceIndex) -> Metric {
    let synthetic = graph.root().filter(|_| graph.synthesized_root());
    let classes = graph.classes().filter(|&c| Some(c) != synthetic);
    let (mut total, mut instantiated) = (0u64, 0u64);
    for c in classes {
        total += 1;
        if index.is_instantiated(c) {
            instantiated += 1;
        }
    }
    Metric::ratio(instantiated, total, Undefined::NoClasses)
}

/// Instantiated property ratio over the whole ontology.
pub fn ipr(graph: &OntologyGraph, index: &InstanceIndex) -> Metric {
    let used = index.used_properties.iter().filter(|p| p.index() < graph.property_count()).count();
    Metric::ratio(used as u64, graph.property_count() as u64, Undefined::NoProperties)
}

/// Sum over `class` and its descendants of `direct(c) / total_entities / 2^depth(c)`,
/// with depth the minimum number of subclass edges below `class`.
pub fn class_instantiation(graph: &OntologyGraph, index: &InstanceIndex, class: ClassId) -> Result<Metric> {
    if !graph.contains(class) {
        return Err(Error::UnknownClass(format!("#{}", class.0)));
    }
    let mut scratch = vec![u32::MAX; graph.class_count()];
    Ok(class_instantiation_with(graph, index, class, &mut scratch))
}

fn class_instantiation_with(graph: &OntologyGraph, index: &InstanceIndex, class: ClassId, scratch: &mut [u32]) -> Metric {
    if index.total_entities == 0 {
        return Metric::Undefined(Undefined::NoTypedEntities);
    }
    // direct-instance totals per depth level
    let mut per_depth: Vec<u64> = Vec::new();
    graph.for_each_descendant_depth(class, scratch, |c, d| {
        let d = d as usize;
        if per_depth.len() <= d {
            per_depth.resize(d + 1, 0);
        }
        per_depth[d] += index.direct_instances[c.index()];
    });
    let max_depth = per_depth.len() - 1;
    // sum_d n_d / 2^d == (sum_d n_d * 2^(max-d)) / 2^max
    let mut numerator = BigInt::zero();
    for (d, &count) in per_depth.iter().enumerate() {
        if count > 0 {
            numerator += BigInt::from(count) << (max_depth - d);
        }
    }
    let denominator = BigInt::from(index.total_entities) << max_depth;
    Metric::Value(BigRational::new(numerator, denominator))
}

/// Class instantiation of the whole graph: the value at its root.
pub fn ci_kg(graph: &OntologyGraph, index: &InstanceIndex) -> Result<Metric> {
    let root = ensure_root(graph)?;
    class_instantiation(graph, index, root)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spa {
    /// Number of distinct (newly added) properties.
    pub count: usize,
    /// `count` divided by the number of ontology properties.
    pub ratio: Metric,
}

/// Subclass property acquisition of one non-root class.
pub fn spa(graph: &OntologyGraph, class: ClassId) -> Result<Spa> {
    let root = ensure_root(graph)?;
    if class == root {
        return Err(Error::RootClass(graph.class_iri(class).to_string()));
    }
    let count = graph.distinct_properties(class)?.len();
    Ok(Spa {
        count,
        ratio: Metric::ratio(count as u64, graph.property_count() as u64, Undefined::NoProperties),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaSummary {
    pub mean_count: Metric,
    pub mean_ratio: Metric,
}

/// Means of [`spa`] over every non-root class.
pub fn spa_summary(graph: &OntologyGraph) -> Result<SpaSummary> {
    ensure_root(graph)?;
    let counts: Vec<usize> = graph.non_root_classes().map(|c| spa(graph, c).map(|s| s.count)).collect::<Result<_>>()?;
    let mean_count = mean(counts.iter().map(|&n| BigRational::from_integer(n.into())), Undefined::NoNonRootClasses);
    let mean_ratio = match &mean_count {
        Metric::Undefined(u) => Metric::Undefined(*u),
        Metric::Value(_) if graph.property_count() == 0 => Metric::Undefined(Undefined::NoProperties),
        Metric::Value(m) => Metric::Value(m / BigRational::from_integer(graph.property_count().into())),
    };
    Ok(SpaSummary { mean_count, mean_ratio })
}

/// Subclass property instantiation of one non-root class: the share of its instances'
/// triples that use one of its distinct properties.
pub fn spi(graph: &OntologyGraph, index: &InstanceIndex, class: ClassId) -> Result<Metric> {
    let root = ensure_root(graph)?;
    if !graph.contains(class) {
        return Err(Error::UnknownClass(format!("#{}", class.0)));
    }
    if class == root {
        return Err(Error::RootClass(graph.class_iri(class).to_string()));
    }
    Ok(Metric::ratio(
        index.distinct_prop_triples[class.index()],
        index.subject_triples[class.index()],
        Undefined::NoSubjectTriples,
    ))
}

/// Mean of [`spi`] over the non-root classes where it is defined.
pub fn spi_mean(graph: &OntologyGraph, index: &InstanceIndex) -> Result<Metric> {
    ensure_root(graph)?;
    if graph.non_root_classes().next().is_none() {
        return Ok(Metric::Undefined(Undefined::NoNonRootClasses));
    }
    let values: Vec<Metric> = graph.non_root_classes().map(|c| spi(graph, index, c)).collect::<Result<_>>()?;
    Ok(mean(
        values.into_iter().filter_map(|m| m.value().cloned()),
        Undefined::NoDefinedValues,
    ))
}

/// Inverse multiple inheritance: the reciprocal of the mean number of direct
/// superclasses over the non-root classes.
pub fn imi(graph: &OntologyGraph) -> Result<Metric> {
    ensure_root(graph)?;
    let (mut classes, mut superclasses) = (0u64, 0u64);
    for c in graph.non_root_classes() {
        classes += 1;
        superclasses += graph.parents(c).len() as u64;
    }
    if classes == 0 {
        return Ok(Metric::Undefined(Undefined::NoNonRootClasses));
    }
    Ok(Metric::ratio(classes, superclasses, Undefined::NoSuperclasses))
}

/// Runs the whole pipeline on a prepared (acyclic, rooted) graph.
pub fn full_report(store: &TripleStore, graph: &OntologyGraph, profile: &ExtractionProfile) -> Result<MetricReport> {
    let root = ensure_prepared(graph)?;
    let index = build_instance_index(store, graph, profile)?;

    let mut scratch = vec![u32::MAX; graph.class_count()];
    let mut per_class = BTreeMap::new();
    let mut ci_sum = BigRational::zero();
    let mut ci_sum_defined = index.total_entities > 0;
    for c in graph.classes() {
        let ci = class_instantiation_with(graph, &index, c, &mut scratch);
        match ci.value() {
            Some(v) => ci_sum += v,
            None => ci_sum_defined = false,
        }
        let (spa_count, spa_ratio, spi_value) = if c == root {
            (None, None, None)
        } else {
            let s = spa(graph, c)?;
            (Some(s.count), Some(s.ratio), Some(spi(graph, &index, c)?))
        };
        per_class.insert(
            graph.class_iri(c).to_string(),
            ClassMetrics {
                ci,
                spa_count,
                spa_ratio,
                spi: spi_value,
                direct_instances: index.direct_instances[c.index()],
                instances: index.instances[c.index()],
                subject_triples: index.subject_triples[c.index()],
                distinct_property_triples: index.distinct_prop_triples[c.index()],
                superclasses: graph.parents(c).len(),
                members: graph.members(c).to_vec(),
            },
        );
    }

    let spa = spa_summary(graph)?;
    let store_stats = store.stats();
    let cycles = graph.cycle_report().cloned().unwrap_or_default();
    Ok(MetricReport {
        name: profile.name.clone(),
        icr: icr(graph, &index),
        ipr: ipr(graph, &index),
        ci_kg: ci_kg(graph, &index)?,
        imi: imi(graph)?,
        spa_mean_count: spa.mean_count,
        spa_ratio_mean: spa.mean_ratio,
        spi_mean: spi_mean(graph, &index)?,
        ci_class_sum: if ci_sum_defined {
            Metric::Value(ci_sum)
        } else {
            Metric::Undefined(Undefined::NoTypedEntities)
        },
        per_class,
        statistics: ReportStatistics {
            classes: graph.original_class_count(),
            properties: graph.property_count(),
            triples: store_stats.triples,
            instances: index.total_entities,
            subjects: store_stats.subjects,
            predicates: store_stats.predicates,
            undeclared_predicates: index.undeclared_predicates,
            untyped_class_assertions: index.untyped_class_assertions,
            duplicate_triples: store.parse_stats().duplicates,
            malformed_lines: store.parse_stats().malformed_skipped,
        },
        provenance: Provenance::new(profile, graph, cycles),
        generated_at_unix: None,
    })
}
