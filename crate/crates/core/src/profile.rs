//! Declarative rules mapping a knowledge graph's vocabulary onto the ontology model.
//!
//! Profiles are TOML documents:
//!
//! ```toml
//! name = "freebase"
//! type_predicate = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
//! subclass_predicate = "http://www.w3.org/2000/01/rdf-schema#subClassOf"
//! domain_predicate = "http://www.w3.org/2000/01/rdf-schema#domain"
//! label_predicate = "http://www.w3.org/2000/01/rdf-schema#label"
//!
//! [[class_marker]]
//! predicate = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
//! object = "http://www.w3.org/2000/01/rdf-schema#Class"
//!
//! [[property_marker]]
//! predicate = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
//! object_suffix = "Property"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const SCHEMA_DOMAIN_INCLUDES: &str = "http://schema.org/domainIncludes";
pub const WDT_INSTANCE_OF: &str = "http://www.wikidata.org/prop/direct/P31";
pub const WDT_SUBCLASS_OF: &str = "http://www.wikidata.org/prop/direct/P279";

/// Names accepted by [`ExtractionProfile::bundled`].
pub const BUNDLED_PROFILES: &[&str] = &["wikidata", "freebase", "dbpedia", "yago", "schemaorg", "rdfs"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectPattern {
    /// Object is exactly this IRI.
    Exact(String),
    /// Object is an IRI ending with this text.
    Suffix(String),
}

impl ObjectPattern {
    pub fn matches(&self, iri: &str) -> bool {
        match self {
            ObjectPattern::Exact(want) => iri == want,
            ObjectPattern::Suffix(suffix) => iri.ends_with(suffix.as_str()),
        }
    }
}

/// "The subject of `(s, predicate, o)` is marked when `o` matches `object`."
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawMarker", into = "RawMarker")]
pub struct MarkerRule {
    pub predicate: String,
    pub object: ObjectPattern,
}

impl MarkerRule {
    pub fn exact(predicate: &str, object: &str) -> Self {
        MarkerRule {
            predicate: predicate.to_string(),
            object: ObjectPattern::Exact(object.to_string()),
        }
    }

    pub fn suffix(predicate: &str, suffix: &str) -> Self {
        MarkerRule {
            predicate: predicate.to_string(),
            object: ObjectPattern::Suffix(suffix.to_string()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarker {
    predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    object_suffix: Option<String>,
}

impl TryFrom<RawMarker> for MarkerRule {
    type Error = String;

    fn try_from(raw: RawMarker) -> std::result::Result<Self, String> {
        if raw.predicate.is_empty() {
            return Err("marker rule needs a predicate".into());
        }
        let object = match (raw.object, raw.object_suffix) {
            (Some(o), None) if !o.is_empty() => ObjectPattern::Exact(o),
            (None, Some(s)) if !s.is_empty() => ObjectPattern::Suffix(s),
            _ => return Err("marker rule needs exactly one of `object` or `object_suffix`".into()),
        };
        Ok(MarkerRule {
            predicate: raw.predicate,
            object,
        })
    }
}

impl From<MarkerRule> for RawMarker {
    fn from(rule: MarkerRule) -> Self {
        let (object, object_suffix) = match rule.object {
            ObjectPattern::Exact(o) => (Some(o), None),
            ObjectPattern::Suffix(s) => (None, Some(s)),
        };
        RawMarker {
            predicate: rule.predicate,
            object,
            object_suffix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionProfile {
    pub name: String,
    /// Links an instance to its class.
    pub type_predicate: String,
    /// Links a subclass to a direct superclass.
    pub subclass_predicate: String,
    #[serde(default, rename = "class_marker", skip_serializing_if = "Vec::is_empty")]
    pub class_markers: Vec<MarkerRule>,
    #[serde(default, rename = "property_marker", skip_serializing_if = "Vec::is_empty")]
    pub property_markers: Vec<MarkerRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_predicate: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_predicate: Option<String>,
    /// Objects of type triples become classes.
    #[serde(default)]
    pub type_objects_are_classes: bool,
    /// Every predicate used by an instance becomes a property with the instance's
    /// asserted classes as domains (for graphs without domain declarations).
    #[serde(default)]
    pub domain_from_usage: bool,
}

impl ExtractionProfile {
    pub fn validate(&self) -> Result<()> {
        if self.type_predicate.trim().is_empty() {
            return Err(Error::Profile("type_predicate must not be empty".into()));
        }
        if self.subclass_predicate.trim().is_empty() {
            return Err(Error::Profile("subclass_predicate must not be empty".into()));
        }
        if self.domain_predicate.as_deref().is_some_and(|d| d.trim().is_empty()) {
            return Err(Error::Profile("domain_predicate must not be empty when set".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let profile: ExtractionProfile = toml::from_str(text).map_err(|e| Error::Profile(e.to_string()))?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile serializes")
    }

    /// One of the profiles shipped with the crate, see [`BUNDLED_PROFILES`].
    pub fn bundled(name: &str) -> Result<Self> {
        let text = match name {
            "wikidata" => include_str!("../profiles/wikidata.toml"),
            "freebase" => include_str!("../profiles/freebase.toml"),
            "dbpedia" => include_str!("../profiles/dbpedia.toml"),
            "yago" => include_str!("../profiles/yago.toml"),
            "schemaorg" => include_str!("../profiles/schemaorg.toml"),
            "rdfs" => include_str!("../profiles/rdfs.toml"),
            other => return Err(Error::UnknownProfile(other.to_string())),
        };
        Self::from_toml(text)
    }
}
