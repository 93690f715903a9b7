//! Class hierarchy, property domains, cycle condensation and root synthesis.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::ExtractionProfile;
use crate::store::TripleStore;
use crate::term::TermId;

/// IRI given to a synthesized root class.
pub const SYNTHETIC_ROOT_IRI: &str = "urn:ontoqual:synthetic-root";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ClassId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PropertyId(pub u32);

impl ClassId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PropertyId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Strongly connected components found while condensing the subclass relation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub cycle_count: usize,
    /// Member IRIs of each merged component, sorted.
    pub cycles: Vec<Vec<String>>,
    /// Condensation merges classes, it never drops edges.
    pub edges_removed: usize,
}

/// Things the extractor saw but could not use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ExtractionStats {
    pub self_loops_ignored: usize,
    /// Subclass or marker triples whose subject/object is a blank node or literal.
    pub non_iri_terms_skipped: usize,
    /// Domain declarations naming a class the profile did not extract.
    pub dangling_domains: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    InGraph,
    OntologyFile,
}

#[derive(Debug, Clone, Default)]
pub struct OntologyGraph {
    class_iris: Vec<String>,
    members: Vec<Vec<String>>,
    class_index: HashMap<String, ClassId>,
    parents: Vec<BTreeSet<ClassId>>,
    children: Vec<BTreeSet<ClassId>>,
    property_iris: Vec<String>,
    property_index: HashMap<String, PropertyId>,
    domain_of: Vec<BTreeSet<PropertyId>>,
    root: Option<ClassId>,
    synthesized_root: bool,
    cycles: Option<CycleReport>,
    extraction: ExtractionStats,
}

impl OntologyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the ontology from rules applied to the knowledge graph's own triples.
    pub fn extract(store: &TripleStore, profile: &ExtractionProfile) -> Result<Self> {
        Self::build(store, profile, Source::InGraph)
    }

    /// Builds the ontology from a standalone ontology file. Only classes declared there
    /// exist; type objects never imply classhood and usage-derived domains are ignored.
    pub fn load_ontology_triples(store: &TripleStore, profile: &ExtractionProfile) -> Result<Self> {
        Self::build(store, profile, Source::OntologyFile)
    }

    fn build(store: &TripleStore, profile: &ExtractionProfile, source: Source) -> Result<Self> {
        profile.validate()?;
        let mut g = OntologyGraph::new();
        let iri = |id: TermId| store.iri(id);

        for t in store.with_predicate_iri(&profile.subclass_predicate) {
            let (Some(child), Some(parent)) = (iri(t.subject), iri(t.object)) else {
                g.extraction.non_iri_terms_skipped += 1;
                continue;
            };
            let c = g.add_class(child);
            if child == parent {
                g.extraction.self_loops_ignored += 1;
                continue;
            }
            let p = g.add_class(parent);
            g.add_subclass_edge(c, p);
        }

        for rule in &profile.class_markers {
            for t in store.with_predicate_iri(&rule.predicate) {
                if let Some(obj) = iri(t.object) {
                    if rule.object.matches(obj) {
                        match iri(t.subject) {
                            Some(s) => {
                                g.add_class(s);
                            }
                            None => g.extraction.non_iri_terms_skipped += 1,
                        }
                    }
                }
            }
        }

        if source == Source::InGraph && profile.type_objects_are_classes {
            for t in store.with_predicate_iri(&profile.type_predicate) {
                if let Some(obj) = iri(t.object) {
                    g.add_class(obj);
                }
            }
        }

        for rule in &profile.property_markers {
            for t in store.with_predicate_iri(&rule.predicate) {
                if let Some(obj) = iri(t.object) {
                    if rule.object.matches(obj) {
                        match iri(t.subject) {
                            Some(s) => {
                                g.add_property(s);
                            }
                            None => g.extraction.non_iri_terms_skipped += 1,
                        }
                    }
                }
            }
        }

        if let Some(domain_predicate) = &profile.domain_predicate {
            for t in store.with_predicate_iri(domain_predicate) {
                let Some(prop) = iri(t.subject) else {
                    g.extraction.non_iri_terms_skipped += 1;
                    continue;
                };
                let p = g.add_property(prop);
                match iri(t.object).and_then(|c| g.class_id(c)) {
                    Some(c) => g.add_domain(c, p),
                    None => g.extraction.dangling_domains += 1,
                }
            }
        }

        if source == Source::InGraph && profile.domain_from_usage {
            g.collect_usage_domains(store, profile);
        }

        if g.class_iris.is_empty() {
            return Err(Error::EmptyOntology {
                profile: profile.name.clone(),
            });
        }
        Ok(g)
    }

    fn collect_usage_domains(&mut self, store: &TripleStore, profile: &ExtractionProfile) {
        let skip: Vec<Option<TermId>> = [
            Some(profile.type_predicate.as_str()),
            Some(profile.subclass_predicate.as_str()),
            profile.label_predicate.as_deref(),
        ]
        .into_iter()
        .map(|p| p.and_then(|p| store.lookup_iri(p)))
        .collect();
        let Some(type_id) = store.lookup_iri(&profile.type_predicate) else {
            return;
        };
        for t in store.with_predicate(type_id) {
            let Some(class) = store.iri(t.object).and_then(|c| self.class_id(c)) else {
                continue;
            };
            for used in store.with_subject(t.subject) {
                if skip.contains(&Some(used.predicate)) {
                    continue;
                }
                if let Some(p) = store.iri(used.predicate) {
                    let pid = self.add_property(p);
                    self.add_domain(class, pid);
                }
            }
        }
    }

    /// Adds a class (or returns the existing id for this IRI).
    pub fn add_class(&mut self, iri: &str) -> ClassId {
        if let Some(&id) = self.class_index.get(iri) {
            return id;
        }
        let id = ClassId(self.class_iris.len() as u32);
        self.class_iris.push(iri.to_string());
        self.members.push(vec![iri.to_string()]);
        self.class_index.insert(iri.to_string(), id);
        self.parents.push(BTreeSet::new());
        self.children.push(BTreeSet::new());
        self.domain_of.push(BTreeSet::new());
        id
    }

    /// Records that `child` is a direct subclass of `parent`.
    pub fn add_subclass_edge(&mut self, child: ClassId, parent: ClassId) {
        self.parents[child.index()].insert(parent);
        self.children[parent.index()].insert(child);
    }

    pub fn add_property(&mut self, iri: &str) -> PropertyId {
        if let Some(&id) = self.property_index.get(iri) {
            return id;
        }
        let id = PropertyId(self.property_iris.len() as u32);
        self.property_iris.push(iri.to_string());
        self.property_index.insert(iri.to_string(), id);
        id
    }

    pub fn add_domain(&mut self, class: ClassId, property: PropertyId) {
        self.domain_of[class.index()].insert(property);
    }

    pub fn class_count(&self) -> usize {
        self.class_iris.len()
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassId> {
        (0..self.class_iris.len() as u32).map(ClassId)
    }

    /// Every class except the root (all classes when there is no root yet).
    pub fn non_root_classes(&self) -> impl Iterator<Item = ClassId> + '_ {
        self.classes().filter(move |&c| Some(c) != self.root)
    }

    /// Looks a class up by IRI. Members of a condensed cycle all resolve to their
    /// representative.
    pub fn class_id(&self, iri: &str) -> Option<ClassId> {
        self.class_index.get(iri).copied()
    }

    pub fn class_iri(&self, class: ClassId) -> &str {
        &self.class_iris[class.index()]
    }

    /// Original classes merged into `class`; a single entry unless a cycle was condensed.
    pub fn members(&self, class: ClassId) -> &[String] {
        &self.members[class.index()]
    }

    pub fn parents(&self, class: ClassId) -> &BTreeSet<ClassId> {
        &self.parents[class.index()]
    }

    pub fn children(&self, class: ClassId) -> &BTreeSet<ClassId> {
        &self.children[class.index()]
    }

    pub fn property_count(&self) -> usize {
        self.property_iris.len()
    }

    pub fn properties(&self) -> impl Iterator<Item = PropertyId> {
        (0..self.property_iris.len() as u32).map(PropertyId)
    }

    pub fn property_id(&self, iri: &str) -> Option<PropertyId> {
        self.property_index.get(iri).copied()
    }

    pub fn property_iri(&self, property: PropertyId) -> &str {
        &self.property_iris[property.index()]
    }

    pub fn domain_of(&self, class: ClassId) -> &BTreeSet<PropertyId> {
        &self.domain_of[class.index()]
    }

    pub fn root(&self) -> Option<ClassId> {
        self.root
    }

    pub fn synthesized_root(&self) -> bool {
        self.synthesized_root
    }

    /// Set once [`condense_cycles`](Self::condense_cycles) has run.
    pub fn cycle_report(&self) -> Option<&CycleReport> {
        self.cycles.as_ref()
    }

    pub fn extraction_stats(&self) -> &ExtractionStats {
        &self.extraction
    }

    pub fn contains(&self, class: ClassId) -> bool {
        class.index() < self.class_iris.len()
    }

    fn check(&self, class: ClassId) -> Result<()> {
        if self.contains(class) {
            Ok(())
        } else {
            Err(Error::UnknownClass(format!("#{}", class.0)))
        }
    }

    /// Number of class IRIs before condensation, not counting a synthesized root.
    pub fn original_class_count(&self) -> usize {
        let synthetic = self.root.filter(|_| self.synthesized_root);
        self.classes().filter(|&c| Some(c) != synthetic).map(|c| self.members(c).len()).sum()
    }

    /// Kahn's algorithm over the subclass edges.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree: Vec<usize> = self.children.iter().map(BTreeSet::len).collect();
        let mut queue: Vec<usize> = (0..indegree.len()).filter(|&i| indegree[i] == 0).collect();
        let mut seen = 0;
        while let Some(c) = queue.pop() {
            seen += 1;
            for p in &self.parents[c] {
                indegree[p.index()] -= 1;
                if indegree[p.index()] == 0 {
                    queue.push(p.index());
                }
            }
        }
        seen == self.class_count()
    }

    /// Collapses every strongly connected component of the subclass relation into one
    /// class. The representative takes the smallest member IRI, parent and domain sets
    /// are unioned, and the result is acyclic.
    pub fn condense_cycles(self) -> (OntologyGraph, CycleReport) {
        let components = strongly_connected_components(&self.parents);
        let n = self.class_count();

        // order components by their smallest original id so acyclic input keeps its ids
        let mut comps: Vec<Vec<usize>> = components;
        for comp in &mut comps {
            comp.sort_unstable();
        }
        comps.sort_unstable_by_key(|c| c[0]);
        let mut new_id = vec![ClassId(0); n];
        for (i, comp) in comps.iter().enumerate() {
            for &c in comp {
                new_id[c] = ClassId(i as u32);
            }
        }

        let mut out = OntologyGraph {
            property_iris: self.property_iris,
            property_index: self.property_index,
            extraction: self.extraction,
            synthesized_root: self.synthesized_root,
            root: self.root.map(|r| new_id[r.index()]),
            ..OntologyGraph::default()
        };
        let mut report = CycleReport::default();
        for comp in &comps {
            let mut members: Vec<String> = comp.iter().flat_map(|&c| self.members[c].iter().cloned()).collect();
            members.sort();
            members.dedup();
            let id = ClassId(out.class_iris.len() as u32);
            for m in &members {
                out.class_index.insert(m.clone(), id);
            }
            out.class_iris.push(members[0].clone());
            let mut domain = BTreeSet::new();
            for &c in comp {
                domain.extend(self.domain_of[c].iter().copied());
            }
            out.domain_of.push(domain);
            if comp.len() > 1 {
                report.cycles.push(members.clone());
            }
            out.members.push(members);
            out.parents.push(BTreeSet::new());
            out.children.push(BTreeSet::new());
        }
        for (c, parents) in self.parents.iter().enumerate() {
            for p in parents {
                let (nc, np) = (new_id[c], new_id[p.index()]);
                if nc != np {
                    out.add_subclass_edge(nc, np);
                }
            }
        }
        report.cycles.sort();
        report.cycle_count = report.cycles.len();
        out.cycles = Some(report.clone());
        (out, report)
    }

    /// Ensures a single root. A lone parentless class becomes the root; otherwise a
    /// fresh root class is added above every parentless class. Idempotent.
    pub fn synthesize_root(mut self) -> OntologyGraph {
        let parentless: Vec<ClassId> = self.classes().filter(|&c| self.parents(c).is_empty()).collect();
        if parentless.len() == 1 {
            if self.root != Some(parentless[0]) {
                self.root = Some(parentless[0]);
                self.synthesized_root = false;
            }
            return self;
        }
        let mut iri = SYNTHETIC_ROOT_IRI.to_string();
        let mut n = 1;
        while self.class_index.contains_key(&iri) {
            n += 1;
            iri = format!("{SYNTHETIC_ROOT_IRI}-{n}");
        }
        let root = self.add_class(&iri);
        for c in parentless {
            self.add_subclass_edge(c, root);
        }
        self.root = Some(root);
        self.synthesized_root = true;
        self
    }

    /// Condenses cycles, then synthesizes a root: the preconditions of every metric.
    pub fn prepare(self) -> (OntologyGraph, CycleReport) {
        let (g, report) = self.condense_cycles();
        (g.synthesize_root(), report)
    }

    /// Minimum number of subclass edges from `class` down to itself and each descendant.
    pub fn descendant_depths(&self, class: ClassId) -> Result<BTreeMap<ClassId, u32>> {
        self.check(class)?;
        let mut depths = BTreeMap::new();
        self.for_each_descendant_depth(class, &mut vec![u32::MAX; self.class_count()], |c, d| {
            depths.insert(c, d);
        });
        Ok(depths)
    }

    /// Breadth-first walk down from `class`, reporting each reachable class once with its
    /// minimum depth. `scratch` must hold `u32::MAX` for every class and is restored on exit.
    pub(crate) fn for_each_descendant_depth(&self, class: ClassId, scratch: &mut [u32], mut visit: impl FnMut(ClassId, u32)) {
        let mut queue = VecDeque::new();
        let mut touched = vec![class];
        scratch[class.index()] = 0;
        queue.push_back(class);
        while let Some(c) = queue.pop_front() {
            let d = scratch[c.index()];
            visit(c, d);
            for &child in self.children(c) {
                if scratch[child.index()] == u32::MAX {
                    scratch[child.index()] = d + 1;
                    touched.push(child);
                    queue.push_back(child);
                }
            }
        }
        for c in touched {
            scratch[c.index()] = u32::MAX;
        }
    }

    /// Strict ancestors of `class` (every class reachable through superclass edges).
    pub fn ancestors(&self, class: ClassId) -> Result<BTreeSet<ClassId>> {
        self.check(class)?;
        let mut seen = BTreeSet::new();
        let mut stack: Vec<ClassId> = self.parents(class).iter().copied().collect();
        while let Some(c) = stack.pop() {
            if seen.insert(c) {
                stack.extend(self.parents(c).iter().copied());
            }
        }
        seen.remove(&class);
        Ok(seen)
    }

    /// Domain properties of `class` that no strict ancestor declares.
    pub fn distinct_properties(&self, class: ClassId) -> Result<BTreeSet<PropertyId>> {
        let ancestors = self.ancestors(class)?;
        let mut own = self.domain_of(class).clone();
        for a in ancestors {
            for p in self.domain_of(a) {
                own.remove(p);
            }
            if own.is_empty() {
                break;
            }
        }
        Ok(own)
    }
}

/// Iterative Tarjan; returns components as lists of node indices.
fn strongly_connected_components(edges: &[BTreeSet<ClassId>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = edges.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    let adj: Vec<Vec<usize>> = edges.iter().map(|s| s.iter().map(|c| c.index()).collect()).collect();

    for start in 0..n {
        if index[start] != UNVISITED {
            continue;
        }
        // (node, position in its adjacency list)
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        index[start] = next;
        low[start] = next;
        next += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
