//! Dictionary-encoded, immutable triple store built by streaming N-Triples ingestion.

use std::collections::HashSet;
use std::io::{self, BufRead, BufReader, Read, Write};

use flate2::read::MultiGzDecoder;
use indexmap::IndexSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ntriples;
use crate::term::{Term, TermId, TermKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub subject: TermId,
    pub predicate: TermId,
    pub object: TermId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// The first malformed line aborts parsing.
    Strict,
    /// Malformed lines are counted and skipped.
    #[default]
    Lenient,
}

/// Counters collected while ingesting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseStats {
    pub lines_read: u64,
    pub bytes_read: u64,
    pub blank_or_comment_lines: u64,
    /// Well-formed triple lines, duplicates included.
    pub triples_parsed: u64,
    pub triples_kept: u64,
    pub duplicates: u64,
    pub malformed_skipped: u64,
    pub gzip: bool,
}

/// Counts returned by [`TripleStore::stats`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StoreStats {
    pub triples: usize,
    pub subjects: usize,
    pub predicates: usize,
    pub terms: usize,
}

/// Compressed adjacency from a term id to the triples that mention it in one position.
#[derive(Debug, Clone, Default)]
struct PositionIndex {
    offsets: Vec<u32>,
    triples: Vec<u32>,
}

impl PositionIndex {
    fn build(term_count: usize, triples: &[Triple], key: impl Fn(&Triple) -> TermId) -> Self {
        let mut offsets = vec![0u32; term_count + 1];
        for t in triples {
            offsets[key(t).index() + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        let mut fill = offsets.clone();
        let mut slots = vec![0u32; triples.len()];
        for (i, t) in triples.iter().enumerate() {
            let k = key(t).index();
            slots[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        PositionIndex {
            offsets,
            triples: slots,
        }
    }

    fn get(&self, id: TermId) -> &[u32] {
        let i = id.index();
        if i + 1 >= self.offsets.len() {
            return &[];
        }
        &self.triples[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    fn distinct_keys(&self) -> usize {
        self.offsets.windows(2).filter(|w| w[1] > w[0]).count()
    }
}

/// Immutable set of triples over an append-only term dictionary.
#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    terms: IndexSet<Term>,
    triples: Vec<Triple>,
    by_predicate: PositionIndex,
    by_subject: PositionIndex,
    parse_stats: ParseStats,
}

/// Incremental single-writer construction of a [`TripleStore`].
#[derive(Debug, Default)]
pub struct TripleStoreBuilder {
    terms: IndexSet<Term>,
    seen: HashSet<Triple>,
    triples: Vec<Triple>,
    stats: ParseStats,
}

impl TripleStoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(i) = self.terms.get_index_of(&term) {
            return TermId(i as u32);
        }
        let (i, _) = self.terms.insert_full(term);
        TermId(u32::try_from(i).expect("term dictionary exceeds u32 ids"))
    }

    /// Adds a triple; returns `false` if it was already present.
    pub fn insert(&mut self, subject: Term, predicate: Term, object: Term) -> Result<bool> {
        if subject.is_literal() {
            return Err(Error::InvalidTriple("subject must be an IRI or blank node".into()));
        }
        if !predicate.is_iri() {
            return Err(Error::InvalidTriple("predicate must be an IRI".into()));
        }
        let triple = Triple {
            subject: self.intern(subject),
            predicate: self.intern(predicate),
            object: self.intern(object),
        };
        self.stats.triples_parsed += 1;
        if self.seen.insert(triple) {
            self.triples.push(triple);
            self.stats.triples_kept += 1;
            Ok(true)
        } else {
            self.stats.duplicates += 1;
            Ok(false)
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn finish(self) -> TripleStore {
        let n = self.terms.len();
        let by_predicate = PositionIndex::build(n, &self.triples, |t| t.predicate);
        let by_subject = PositionIndex::build(n, &self.triples, |t| t.subject);
        TripleStore {
            terms: self.terms,
            triples: self.triples,
            by_predicate,
            by_subject,
            parse_stats: self.stats,
        }
    }
}

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

/// Streams N-Triples from `input` into a new store. Gzip input is detected by its magic bytes.
pub fn parse_ntriples<R: Read>(input: R, mode: ParseMode) -> Result<TripleStore> {
    let mut reader = BufReader::with_capacity(1 << 16, input);
    let gzip = reader.fill_buf()?.starts_with(&GZIP_MAGIC);
    if gzip {
        let decoded = BufReader::with_capacity(1 << 16, MultiGzDecoder::new(reader));
        parse_lines(decoded, mode, true)
    } else {
        parse_lines(reader, mode, false)
    }
}

fn parse_lines<R: BufRead>(mut reader: R, mode: ParseMode, gzip: bool) -> Result<TripleStore> {
    let mut builder = TripleStoreBuilder::new();
    builder.stats.gzip = gzip;
    let mut buf = Vec::with_capacity(256);
    let mut offset: u64 = 0;
    let mut line_no: u64 = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        builder.stats.lines_read += 1;
        builder.stats.bytes_read += n as u64;
        let line_offset = offset;
        offset += n as u64;

        // CR is also an end-of-line character and never legal inside a token
        let mut segment_start = 0usize;
        for segment in buf.split(|&b| b == b'\n' || b == b'\r') {
            let seg_offset = line_offset + segment_start as u64;
            segment_start += segment.len() + 1;
            if segment.is_empty() {
                continue;
            }
            let outcome = match std::str::from_utf8(segment) {
                Ok(text) => ntriples::parse_line(text).map_err(|e| (e.column, e.message)),
                Err(e) => Err((e.valid_up_to(), "invalid UTF-8".to_string())),
            };
            match outcome {
                Ok(Some((s, p, o))) => {
                    builder.insert(s, p, o)?;
                }
                Ok(None) => builder.stats.blank_or_comment_lines += 1,
                Err((column, message)) => match mode {
                    ParseMode::Strict => {
                        return Err(Error::Syntax {
                            line: line_no,
                            offset: seg_offset + column as u64,
                            message,
                        })
                    }
                    ParseMode::Lenient => builder.stats.malformed_skipped += 1,
                },
            }
        }
        if buf.iter().all(|b| *b == b'\n' || *b == b'\r') {
            builder.stats.blank_or_comment_lines += 1;
        }
    }
    Ok(builder.finish())
}

/// Result of [`TripleStore::filter_by_label_language`].
#[derive(Debug, Clone)]
pub struct LabelFilterOutcome {
    pub store: TripleStore,
    /// Retained subjects, in first-seen order.
    pub retained_subjects: Vec<Term>,
    pub warning: Option<LabelFilterWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelFilterWarning {
    /// The label predicate never occurs in the store.
    UnknownLabelPredicate,
    /// No label literal carries the requested language.
    NoMatchingLabels,
}

/// Basic language-range match: the tag equals the range or extends it with `-subtags`,
/// compared case-insensitively.
pub fn language_matches(tag: &str, range: &str) -> bool {
    tag.len() >= range.len()
        && tag[..range.len()].eq_ignore_ascii_case(range)
        && (tag.len() == range.len() || tag.as_bytes()[range.len()] == b'-')
}

impl TripleStore {
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Term, Term, Term)>,
    {
        let mut builder = TripleStoreBuilder::new();
        for (s, p, o) in triples {
            builder.insert(s, p, o)?;
        }
        Ok(builder.finish())
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id.index()]
    }

    pub fn terms(&self) -> impl Iterator<Item = (TermId, &Term)> {
        self.terms.iter().enumerate().map(|(i, t)| (TermId(i as u32), t))
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.terms.get_index_of(term).map(|i| TermId(i as u32))
    }

    pub fn lookup_iri(&self, iri: &str) -> Option<TermId> {
        Term::iri(iri).ok().and_then(|t| self.lookup(&t))
    }

    pub fn iri(&self, id: TermId) -> Option<&str> {
        self.term(id).as_iri()
    }

    pub fn with_predicate(&self, predicate: TermId) -> impl Iterator<Item = &Triple> + '_ {
        self.by_predicate.get(predicate).iter().map(|&i| &self.triples[i as usize])
    }

    pub fn with_subject(&self, subject: TermId) -> impl Iterator<Item = &Triple> + '_ {
        self.by_subject.get(subject).iter().map(|&i| &self.triples[i as usize])
    }

    pub fn subject_degree(&self, subject: TermId) -> usize {
        self.by_subject.get(subject).len()
    }

    /// Triples whose predicate is the IRI `predicate`; empty if it is not in the dictionary.
    pub fn with_predicate_iri<'a>(&'a self, predicate: &str) -> impl Iterator<Item = &'a Triple> + 'a {
        let id = self.lookup_iri(predicate);
        id.into_iter().flat_map(move |p| self.with_predicate(p))
    }

    /// Subjects that have at least one triple, in id order.
    pub fn subjects(&self) -> impl Iterator<Item = TermId> + '_ {
        self.by_subject
            .offsets
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(i, _)| TermId(i as u32))
    }

    /// Predicates used by at least one triple, in id order.
    pub fn predicates(&self) -> impl Iterator<Item = TermId> + '_ {
        self.by_predicate
            .offsets
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(i, _)| TermId(i as u32))
    }

    pub fn parse_stats(&self) -> &ParseStats {
        &self.parse_stats
    }

    pub fn stats(&self) -> StoreStats {
        StoreStats {
            triples: self.triples.len(),
            subjects: self.by_subject.distinct_keys(),
            predicates: self.by_predicate.distinct_keys(),
            terms: self.terms.len(),
        }
    }

    pub fn write_ntriples<W: Write>(&self, mut out: W) -> io::Result<()> {
        for t in &self.triples {
            writeln!(
                out,
                "{} {} {} .",
                self.term(t.subject),
                self.term(t.predicate),
                self.term(t.object)
            )?;
        }
        out.flush()
    }

    pub fn to_ntriples_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_ntriples(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("terms are UTF-8")
    }

    /// Keeps the triples of every subject labelled (via `label_predicate`) with a
    /// literal in `language`.
    pub fn filter_by_label_language(&self, label_predicate: &str, language: &str) -> LabelFilterOutcome {
        let Some(label_id) = self.lookup_iri(label_predicate) else {
            return LabelFilterOutcome {
                store: TripleStore::default(),
                retained_subjects: Vec::new(),
                warning: Some(LabelFilterWarning::UnknownLabelPredicate),
            };
        };
        let mut keep: IndexSet<TermId> = IndexSet::new();
        for t in self.with_predicate(label_id) {
            let obj = self.term(t.object);
            if obj.kind() == TermKind::Literal && obj.language().is_some_and(|l| language_matches(l, language)) {
                keep.insert(t.subject);
            }
        }
        let mut builder = TripleStoreBuilder::new();
        for t in &self.triples {
            if keep.contains(&t.subject) {
                builder
                    .insert(self.term(t.subject).clone(), self.term(t.predicate).clone(), self.term(t.object).clone())
                    .expect("source triple already validated");
            }
        }
        let warning = keep.is_empty().then_some(LabelFilterWarning::NoMatchingLabels);
        LabelFilterOutcome {
            store: builder.finish(),
            retained_subjects: keep.iter().map(|&id| self.term(id).clone()).collect(),
            warning,
        }
    }
}
