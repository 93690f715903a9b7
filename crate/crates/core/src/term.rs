//! RDF terms and their N-Triples rendering.

use std::fmt;

use serde::Serialize;

/// `rdf:langString`, the only datatype allowed alongside a language tag.
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// Dense identifier of a term inside one [`TripleStore`](crate::store::TripleStore) dictionary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TermId(pub u32);

impl TermId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    Iri,
    BlankNode,
    Literal,
}

/// An RDF term. Equality is exact on every field; IRIs are never normalized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    kind: TermKind,
    lexical: Box<str>,
    datatype: Option<Box<str>>,
    language: Option<Box<str>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("IRI must not be empty")]
    EmptyIri,
    #[error("blank node label must not be empty")]
    EmptyBlankNode,
    #[error("literal carries both datatype <{0}> and a language tag")]
    DatatypeWithLanguage(String),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Result<Self, TermError> {
        let iri = iri.into();
        if iri.is_empty() {
            return Err(TermError::EmptyIri);
        }
        Ok(Term {
            kind: TermKind::Iri,
            lexical: iri.into_boxed_str(),
            datatype: None,
            language: None,
        })
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if label.is_empty() {
            return Err(TermError::EmptyBlankNode);
        }
        Ok(Term {
            kind: TermKind::BlankNode,
            lexical: label.into_boxed_str(),
            datatype: None,
            language: None,
        })
    }

    pub fn literal(
        lexical: impl Into<String>,
        datatype: Option<String>,
        language: Option<String>,
    ) -> Result<Self, TermError> {
        if let (Some(dt), Some(_)) = (&datatype, &language) {
            if dt != RDF_LANG_STRING {
                return Err(TermError::DatatypeWithLanguage(dt.clone()));
            }
        }
        Ok(Term {
            kind: TermKind::Literal,
            lexical: lexical.into().into_boxed_str(),
            datatype: datatype.map(String::into_boxed_str),
            language: language.map(String::into_boxed_str),
        })
    }

    /// A plain string literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Term::literal(lexical, None, None).expect("plain literal is always valid")
    }

    pub fn lang_string(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Term::literal(lexical, None, Some(language.into())).expect("no datatype given")
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&str> {
        self.datatype.as_deref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    pub fn is_iri(&self) -> bool {
        self.kind == TermKind::Iri
    }

    pub fn is_blank(&self) -> bool {
        self.kind == TermKind::BlankNode
    }

    pub fn is_literal(&self) -> bool {
        self.kind == TermKind::Literal
    }

    /// The IRI text, if this is an IRI.
    pub fn as_iri(&self) -> Option<&str> {
        self.is_iri().then_some(&*self.lexical)
    }
}

impl fmt::Display for Term {
    /// Writes the term in N-Triples syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TermKind::Iri => write_iri(f, &self.lexical),
            TermKind::BlankNode => write!(f, "_:{}", self.lexical),
            TermKind::Literal => {
                f.write_str("\"")?;
                for c in self.lexical.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\r' => f.write_str("\\r")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")?;
                if let Some(lang) = &self.language {
                    write!(f, "@{lang}")?;
                } else if let Some(dt) = &self.datatype {
                    f.write_str("^^")?;
                    write_iri(f, dt)?;
                }
                Ok(())
            }
        }
    }
}

fn write_iri(f: &mut fmt::Formatter<'_>, iri: &str) -> fmt::Result {
    f.write_str("<")?;
    for c in iri.chars() {
        if needs_iri_escape(c) {
            write!(f, "\\u{:04X}", c as u32)?;
        } else {
            write!(f, "{c}")?;
        }
    }
    f.write_str(">")
}

pub(crate) fn needs_iri_escape(c: char) -> bool {
    matches!(c, '\u{00}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}
