//! Brute-force reference implementation of the metrics, for tests.
//!
//! Shares no traversal code with [`crate::metrics`] or [`crate::ontology`]: reachability
//! is a dense Warshall closure, depths come from repeated edge relaxation, and every
//! count is a linear scan over all triples. Only the raw graph accessors (parents,
//! domains, IRIs) are read.

#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::metrics::{Metric, Undefined};
use crate::ontology::OntologyGraph;
use crate::profile::ExtractionProfile;
use crate::report::{ClassMetrics, MetricReport, Provenance, ReportStatistics};
use crate::store::TripleStore;

pub const ORACLE_CLASS_LIMIT: usize = 10_000;

fn rational(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn mean_of(values: &[BigRational], if_empty: Undefined) -> Metric {
    if values.is_empty() {
        return Metric::Undefined(if_empty);
    }
    let total: BigRational = values.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
    Metric::Value(total / rational(values.len() as u64, 1))
}

/// Recomputes every field of [`crate::metrics::full_report`] that carries a metric or count.
pub fn oracle_metrics(store: &TripleStore, graph: &OntologyGraph, profile: &ExtractionProfile) -> Result<MetricReport> {
    let n = graph.class_count();
    if n > ORACLE_CLASS_LIMIT {
        return Err(Error::OracleLimit { classes: n, limit: ORACLE_CLASS_LIMIT });
    }
    let root = graph.root().ok_or(Error::NotRooted)?.index();

    // below[a][b]: b is a or a descendant of a
    let mut below = vec![vec![false; n]; n];
    for (a, row) in below.iter_mut().enumerate() {
        row[a] = true;
    }
    for c in 0..n {
        for p in graph.parents(crate::ClassId(c as u32)) {
            below[p.index()][c] = true;
        }
    }
    for k in 0..n {
        for a in 0..n {
            if below[a][k] {
                for b in 0..n {
                    if below[k][b] {
                        below[a][b] = true;
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && below[a][b] && below[b][a] {
                return Err(Error::Cyclic);
            }
        }
    }

    // dist[a][b]: fewest subclass edges from a down to b
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|c| graph.parents(crate::ClassId(c as u32)).iter().map(move |p| (c, p.index())))
        .collect();
    let mut dist = vec![vec![u64::MAX; n]; n];
    for (a, row) in dist.iter_mut().enumerate() {
        row[a] = 0;
    }
    loop {
        let mut changed = false;
        for &(child, parent) in &edges {
            for row in dist.iter_mut() {
                if row[parent] != u64::MAX && row[parent] + 1 < row[child] {
                    row[child] = row[parent] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // entity -> asserted classes
    let mut types: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
    let mut untyped_class_assertions = 0u64;
    for t in store.triples() {
        if store.iri(t.predicate) != Some(profile.type_predicate.as_str()) {
            continue;
        }
        match store.iri(t.object).and_then(|o| graph.class_id(o)) {
            Some(c) => {
                types.entry(t.subject.0).or_default().insert(c.index());
            }
            None => untyped_class_assertions += 1,
        }
    }
    let total = types.len() as u64;

    let mut direct = vec![0u64; n];
    let mut instances = vec![0u64; n];
    for set in types.values() {
        for &c in set {
            if !set.iter().any(|&t| t != c && below[c][t]) {
                direct[c] += 1;
            }
        }
        for (c, count) in instances.iter_mut().enumerate() {
            if set.iter().any(|&t| below[c][t]) {
                *count += 1;
            }
        }
    }

    let domain = |c: usize| graph.domain_of(crate::ClassId(c as u32));
    let distinct: Vec<BTreeSet<usize>> = (0..n)
        .map(|c| {
            let mut inherited = BTreeSet::new();
            for a in 0..n {
                if a != c && below[a][c] {
                    inherited.extend(domain(a).iter().map(|p| p.index()));
                }
            }
            domain(c).iter().map(|p| p.index()).filter(|p| !inherited.contains(p)).collect()
        })
        .collect();

    let mut subject_triples = vec![0u64; n];
    let mut distinct_triples = vec![0u64; n];
    let mut used = BTreeSet::new();
    let mut predicates = BTreeSet::new();
    for t in store.triples() {
        predicates.insert(t.predicate);
        let property = store.iri(t.predicate).and_then(|p| graph.property_id(p)).map(|p| p.index());
        if let Some(p) = property {
            used.insert(p);
        }
        let Some(set) = types.get(&t.subject.0) else { continue };
        for c in 0..n {
            if set.iter().any(|&x| below[c][x]) {
                subject_triples[c] += 1;
                if property.is_some_and(|p| distinct[c].contains(&p)) {
                    distinct_triples[c] += 1;
                }
            }
        }
    }
    let undeclared_predicates = predicates
        .iter()
        .filter(|&&p| store.iri(p).and_then(|i| graph.property_id(i)).is_none())
        .count();

    let ci = |c: usize| -> Metric {
        if total == 0 {
            return Metric::Undefined(Undefined::NoTypedEntities);
        }
        let mut sum = BigRational::zero();
        for d in 0..n {
            if below[c][d] && direct[d] > 0 {
                let penalty = BigRational::one() / BigRational::from_integer(num_bigint::BigInt::from(2u8).pow(dist[c][d] as u32));
                sum += rational(direct[d], total) * penalty;
            }
        }
        Metric::Value(sum)
    };

    let properties = graph.property_count() as u64;
    let candidates: Vec<usize> = (0..n).filter(|&c| !(c == root && graph.synthesized_root())).collect();
    let icr = Metric::ratio(
        candidates.iter().filter(|&&c| instances[c] > 0).count() as u64,
        candidates.len() as u64,
        Undefined::NoClasses,
    );
    let ipr = Metric::ratio(used.len() as u64, properties, Undefined::NoProperties);

    let non_root: Vec<usize> = (0..n).filter(|&c| c != root).collect();
    let spa_counts: Vec<BigRational> = non_root.iter().map(|&c| rational(distinct[c].len() as u64, 1)).collect();
    let spa_mean_count = mean_of(&spa_counts, Undefined::NoNonRootClasses);
    let spa_ratio_mean = match &spa_mean_count {
        Metric::Value(_) if properties == 0 => Metric::Undefined(Undefined::NoProperties),
        Metric::Value(_) => {
            let ratios: Vec<BigRational> = non_root.iter().map(|&c| rational(distinct[c].len() as u64, properties)).collect();
            mean_of(&ratios, Undefined::NoNonRootClasses)
        }
        other => other.clone(),
    };
    let spi_values: Vec<BigRational> = non_root
        .iter()
        .filter(|&&c| subject_triples[c] > 0)
        .map(|&c| rational(distinct_triples[c], subject_triples[c]))
        .collect();
    let spi_mean = if non_root.is_empty() {
        Metric::Undefined(Undefined::NoNonRootClasses)
    } else {
        mean_of(&spi_values, Undefined::NoDefinedValues)
    };
    let superclass_total: u64 = non_root.iter().map(|&c| edges.iter().filter(|e| e.0 == c).count() as u64).sum();
    let imi = if non_root.is_empty() {
        Metric::Undefined(Undefined::NoNonRootClasses)
    } else {
        Metric::ratio(non_root.len() as u64, superclass_total, Undefined::NoSuperclasses)
    };

    let mut per_class = BTreeMap::new();
    let mut ci_sum = Some(BigRational::zero());
    for c in 0..n {
        let value = ci(c);
        ci_sum = match (ci_sum, value.value()) {
            (Some(s), Some(v)) => Some(s + v),
            _ => None,
        };
        let is_root = c == root;
        let id = crate::ClassId(c as u32);
        per_class.insert(
            graph.class_iri(id).to_string(),
            ClassMetrics {
                ci: value,
                spa_count: (!is_root).then(|| distinct[c].len()),
                spa_ratio: (!is_root).then(|| Metric::ratio(distinct[c].len() as u64, properties, Undefined::NoProperties)),
                spi: (!is_root).then(|| Metric::ratio(distinct_triples[c], subject_triples[c], Undefined::NoSubjectTriples)),
                direct_instances: direct[c],
                instances: instances[c],
                subject_triples: subject_triples[c],
                distinct_property_triples: distinct_triples[c],
                superclasses: edges.iter().filter(|e| e.0 == c).count(),
                members: graph.members(id).to_vec(),
            },
        );
    }

    let stats = store.stats();
    Ok(MetricReport {
        name: profile.name.clone(),
        icr,
        ipr,
        ci_kg: ci(root),
        imi,
        spa_mean_count,
        spa_ratio_mean,
        spi_mean,
        ci_class_sum: ci_sum.map(Metric::Value).unwrap_or(Metric::Undefined(Undefined::NoTypedEntities)),
        per_class,
        statistics: ReportStatistics {
            classes: graph.original_class_count(),
            properties: graph.property_count(),
            triples: stats.triples,
            instances: total,
            subjects: stats.subjects,
            predicates: stats.predicates,
            undeclared_predicates,
            untyped_class_assertions,
            duplicate_triples: store.parse_stats().duplicates,
            malformed_lines: store.parse_stats().malformed_skipped,
        },
        provenance: Provenance::new(profile, graph, graph.cycle_report().cloned().unwrap_or_default()),
        generated_at_unix: None,
    })
}
