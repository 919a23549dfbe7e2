//! Two-level ontology store and the service match operator.
//!
//! Every node holds the core taxonomy. Extension documents refine it and are
//! fetched from peers when a match needs them. A requested description
//! matches a cached service when the service concept equals or descends from
//! the requested concept and its QoS satisfies the request.

pub mod fixtures;
mod format;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::domain::{
    qos_satisfies, OntologyDocument, OntologyRecord, QoSSpec, ServiceDescription,
    ServiceTableEntry,
};

pub use format::{format_document, parse_document};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticError {
    #[error("missing '{0}:' header")]
    MissingHeader(&'static str),
    #[error("line {line}: cannot parse '{text}'")]
    BadLine { line: usize, text: String },
    #[error("concept '{0}' defined twice")]
    DuplicateConcept(String),
    #[error("taxonomy cycle through '{0}'")]
    Cycle(String),
    #[error("concept '{concept}' has unresolved parent '{parent}'")]
    UnresolvedParent { concept: String, parent: String },
    #[error("base ontology '{0}' is not loaded")]
    BaseNotLoaded(String),
    #[error("core ontology must not extend another document")]
    CoreHasBase,
}

/// How a node treats service semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemanticMode {
    /// Syntactic matching only; ontologies are ignored.
    #[default]
    Off,
    /// Core everywhere, extension documents fetched on demand.
    MultiLevel,
    /// Every node preloads every document and messages carry full payloads.
    Unified,
}

impl SemanticMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "off" => Some(Self::Off),
            "multilevel" => Some(Self::MultiLevel),
            "unified" => Some(Self::Unified),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Off => "off",
            Self::MultiLevel => "multilevel",
            Self::Unified => "unified",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatchOutcome {
    Entry(ServiceTableEntry),
    NeedOntology(String),
    NoMatch,
}

/// Core taxonomy plus loaded extensions and the ontology metadata table.
#[derive(Debug, Clone)]
pub struct OntologyStore {
    core: OntologyDocument,
    ext: BTreeMap<String, OntologyDocument>,
    metadata: BTreeMap<String, OntologyRecord>,
    parent: HashMap<String, Option<String>>,
}

impl OntologyStore {
    pub fn new(core: OntologyDocument) -> Result<Self, SemanticError> {
        if !core.is_core() {
            return Err(SemanticError::CoreHasBase);
        }
        let mut store = Self {
            core: OntologyDocument::default(),
            ext: BTreeMap::new(),
            metadata: BTreeMap::new(),
            parent: HashMap::new(),
        };
        store.check_parents(&core)?;
        store.index(&core);
        store.metadata.insert(core.uri.clone(), core.record());
        store.core = core;
        Ok(store)
    }

    /// A store with an empty core; every match falls back to syntax.
    pub fn empty() -> Self {
        Self {
            core: OntologyDocument::default(),
            ext: BTreeMap::new(),
            metadata: BTreeMap::new(),
            parent: HashMap::new(),
        }
    }

    pub fn core(&self) -> &OntologyDocument {
        &self.core
    }

    pub fn core_uri(&self) -> &str {
        &self.core.uri
    }

    /// Records ontology metadata (Table-1c style) without its document.
    pub fn declare(&mut self, record: &OntologyRecord) {
        if record.uri.is_empty() {
            return;
        }
        self.metadata
            .entry(record.uri.clone())
            .or_insert_with(|| record.metadata());
    }

    pub fn metadata(&self, uri: &str) -> Option<&OntologyRecord> {
        self.metadata.get(uri)
    }

    pub fn is_loaded(&self, uri: &str) -> bool {
        uri == self.core.uri || self.ext.contains_key(uri)
    }

    pub fn document(&self, uri: &str) -> Option<&OntologyDocument> {
        if uri == self.core.uri {
            Some(&self.core)
        } else {
            self.ext.get(uri)
        }
    }

    pub fn ext_documents(&self) -> impl Iterator<Item = &OntologyDocument> {
        self.ext.values()
    }

    pub fn ext_document_count(&self) -> usize {
        self.ext.len()
    }

    /// Concept tuples held in extension documents.
    pub fn ext_tuple_count(&self) -> usize {
        self.ext.values().map(OntologyDocument::tuple_count).sum()
    }

    /// Stores an extension document. Its base must already be loaded and all
    /// of its parents must resolve. Returns `false` if it was already present.
    pub fn load(&mut self, doc: OntologyDocument) -> Result<bool, SemanticError> {
        if self.is_loaded(&doc.uri) {
            return Ok(false);
        }
        if doc.is_core() {
            return Err(SemanticError::BaseNotLoaded(String::new()));
        }
        if !self.is_loaded(&doc.base_uri) {
            return Err(SemanticError::BaseNotLoaded(doc.base_uri.clone()));
        }
        self.check_parents(&doc)?;
        self.index(&doc);
        self.metadata.insert(doc.uri.clone(), doc.record());
        self.ext.insert(doc.uri.clone(), doc);
        Ok(true)
    }

    fn check_parents(&self, doc: &OntologyDocument) -> Result<(), SemanticError> {
        for (concept, parent) in &doc.concepts {
            if self.parent.contains_key(concept) {
                return Err(SemanticError::DuplicateConcept(concept.clone()));
            }
            if let Some(p) = parent {
                if !doc.defines(p) && !self.parent.contains_key(p) {
                    return Err(SemanticError::UnresolvedParent {
                        concept: concept.clone(),
                        parent: p.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn index(&mut self, doc: &OntologyDocument) {
        for (concept, parent) in &doc.concepts {
            self.parent.insert(concept.clone(), parent.clone());
        }
    }

    pub fn resolves(&self, concept: &str) -> bool {
        self.parent.contains_key(concept)
    }

    /// The document that must be fetched next before `uri` can be used:
    /// the missing ancestor closest to the core. `Ok(None)` when `uri` and
    /// its whole base chain are loaded; `Err(uri)` names the first document
    /// in the chain with no known metadata.
    pub fn next_missing(&self, uri: &str) -> Result<Option<String>, String> {
        let mut missing = None;
        let mut cur = uri.to_string();
        let mut guard = 0;
        while !self.is_loaded(&cur) {
            missing = Some(cur.clone());
            let record = self.metadata.get(&cur).ok_or_else(|| cur.clone())?;
            if record.base_ontology.is_empty() {
                // a second core is not loadable
                return Err(cur);
            }
            cur = record.base_ontology.clone();
            guard += 1;
            if guard > self.metadata.len() + 1 {
                return Err(cur);
            }
        }
        Ok(missing)
    }

    /// True iff `descendant` is reachable from `ancestor` through zero or
    /// more child edges of the resolved taxonomy.
    pub fn subsumes(&self, ancestor: &str, descendant: &str) -> bool {
        if !self.resolves(ancestor) {
            return false;
        }
        let mut cur = descendant;
        loop {
            if cur == ancestor {
                return self.resolves(cur);
            }
            match self.parent.get(cur) {
                Some(Some(p)) => cur = p,
                _ => return false,
            }
        }
    }
}

/// Syntactic part of the match operator: same name or same concept id.
pub fn matches_syntactically(requested: &ServiceDescription, entry: &ServiceTableEntry) -> bool {
    requested.name == entry.info.name || requested.concept == entry.info.concept
}

/// Finds the first entry matching the request.
///
/// Before consulting the taxonomy every ontology in `required` (and its base
/// chain) must be loaded; the first missing one is reported as
/// `NeedOntology`. An ontology with no known metadata yields `NoMatch`.
pub fn match_service<'a, I>(
    store: &OntologyStore,
    entries: I,
    requested: &ServiceDescription,
    qos: &QoSSpec,
    required: &[String],
) -> MatchOutcome
where
    I: IntoIterator<Item = &'a ServiceTableEntry>,
{
    for uri in required {
        match store.next_missing(uri) {
            Ok(None) => {}
            Ok(Some(missing)) => return MatchOutcome::NeedOntology(missing),
            Err(_) => return MatchOutcome::NoMatch,
        }
    }
    entries
        .into_iter()
        .find(|e| {
            (matches_syntactically(requested, e) || store.subsumes(&requested.concept, &e.info.concept))
                && qos_satisfies(qos, &e.info.qos)
        })
        .cloned()
        .map_or(MatchOutcome::NoMatch, MatchOutcome::Entry)
}

/// Ontology-free matching used when semantics are switched off.
pub fn match_syntactic<'a, I>(
    entries: I,
    requested: &ServiceDescription,
    qos: &QoSSpec,
) -> Option<ServiceTableEntry>
where
    I: IntoIterator<Item = &'a ServiceTableEntry>,
{
    entries
        .into_iter()
        .find(|e| matches_syntactically(requested, e) && qos_satisfies(qos, &e.info.qos))
        .cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{NodeId, ServiceId, ServiceInfo};

    fn doc(uri: &str, base: &str, edges: &[(&str, Option<&str>)]) -> OntologyDocument {
        OntologyDocument {
            name: uri.into(),
            uri: uri.into(),
            base_uri: base.into(),
            author: "t".into(),
            concepts: edges
                .iter()
                .map(|(c, p)| (c.to_string(), p.map(str::to_string)))
                .collect(),
        }
    }

    fn device_store() -> OntologyStore {
        OntologyStore::new(doc(
            "core",
            "",
            &[("Thing", None), ("Device", Some("Thing")), ("Printer", Some("Device"))],
        ))
        .unwrap()
    }

    fn entry(name: &str, concept: &str, qos: QoSSpec) -> ServiceTableEntry {
        ServiceTableEntry::cached(
            ServiceInfo {
                service_id: ServiceId(1),
                name: name.into(),
                provider: NodeId(2),
                concept: concept.into(),
                qos,
                ..Default::default()
            },
            0.0,
        )
    }

    fn want(name: &str, concept: &str) -> ServiceDescription {
        ServiceDescription {
            name: name.into(),
            concept: concept.into(),
            ..Default::default()
        }
    }

    #[test]
    fn subsumption_basics() {
        let s = device_store();
        assert!(s.subsumes("Device", "Device"));
        assert!(s.subsumes("Device", "Printer"));
        assert!(s.subsumes("Thing", "Printer"));
        assert!(!s.subsumes("Printer", "Device"));
        assert!(!s.subsumes("Printer", "Unknown"));
        assert!(!s.subsumes("Unknown", "Unknown"));
    }

    #[test]
    fn sibling_is_not_subsumed() {
        let s = OntologyStore::new(doc(
            "core",
            "",
            &[("Thing", None), ("A", Some("Thing")), ("B", Some("Thing"))],
        ))
        .unwrap();
        assert!(!s.subsumes("A", "B"));
        assert!(!s.subsumes("B", "A"));
    }

    #[test]
    fn transitive_across_document_chain() {
        let mut s = OntologyStore::new(doc("core", "", &[("Thing", None)])).unwrap();
        s.load(doc("e1", "core", &[("L1", Some("Thing"))])).unwrap();
        s.load(doc("e2", "e1", &[("L2", Some("L1"))])).unwrap();
        s.load(doc("e3", "e2", &[("L3", Some("L2"))])).unwrap();
        assert!(s.subsumes("Thing", "L3"));
        assert!(s.subsumes("L1", "L3"));
        assert!(!s.subsumes("L3", "L1"));
        assert_eq!(s.ext_document_count(), 3);
        assert_eq!(s.ext_tuple_count(), 3);
    }

    #[test]
    fn load_requires_base_and_resolvable_parents() {
        let mut s = OntologyStore::new(doc("core", "", &[("Thing", None)])).unwrap();
        assert_eq!(
            s.load(doc("e2", "e1", &[("X", Some("Thing"))])),
            Err(SemanticError::BaseNotLoaded("e1".into()))
        );
        assert!(matches!(
            s.load(doc("e1", "core", &[("X", Some("Nope"))])),
            Err(SemanticError::UnresolvedParent { .. })
        ));
        assert!(s.load(doc("e1", "core", &[("X", Some("Thing"))])).unwrap());
        assert!(!s.load(doc("e1", "core", &[("X", Some("Thing"))])).unwrap());
    }

    #[test]
    fn exact_concept_matches() {
        let s = device_store();
        let e = entry("p", "Printer", QoSSpec::new());
        let out = match_service(&s, [&e], &want("q", "Printer"), &QoSSpec::new(), &[]);
        assert_eq!(out, MatchOutcome::Entry(e));
    }

    #[test]
    fn general_request_matches_specific_service() {
        let s = device_store();
        let e = entry("printer-1", "Printer", QoSSpec::new());
        let out = match_service(&s, [&e], &want("any-device", "Device"), &QoSSpec::new(), &[]);
        assert!(matches!(out, MatchOutcome::Entry(_)));
        let out = match_service(&s, [&e], &want("x", "Thing"), &QoSSpec::new(), &[]);
        assert!(matches!(out, MatchOutcome::Entry(_)));
    }

    #[test]
    fn qos_filters_matches() {
        let s = device_store();
        let e = entry("p", "Printer", QoSSpec::from_pairs([("ppm", 10.0)]));
        let demanding = QoSSpec::from_pairs([("ppm", 20.0)]);
        let out = match_service(&s, [&e], &want("q", "Device"), &demanding, &[]);
        assert_eq!(out, MatchOutcome::NoMatch);
    }

    #[test]
    fn declared_but_absent_ontology_is_requested() {
        let mut s = device_store();
        s.declare(&OntologyRecord {
            name: "med".into(),
            uri: "urn:med".into(),
            author: "a".into(),
            base_ontology: "core".into(),
            document: None,
        });
        let e = entry("p", "Printer", QoSSpec::new());
        let out = match_service(&s, [&e], &want("q", "Doctor"), &QoSSpec::new(), &["urn:med".into()]);
        assert_eq!(out, MatchOutcome::NeedOntology("urn:med".into()));
        let out = match_service(&s, [&e], &want("q", "Doctor"), &QoSSpec::new(), &["urn:unknown".into()]);
        assert_eq!(out, MatchOutcome::NoMatch);
    }

    #[test]
    fn chain_fetches_root_side_first() {
        let mut s = OntologyStore::new(doc("core", "", &[("Thing", None)])).unwrap();
        for (uri, base) in [("e1", "core"), ("e2", "e1")] {
            s.declare(&doc(uri, base, &[]).record());
        }
        assert_eq!(s.next_missing("e2"), Ok(Some("e1".into())));
        s.load(doc("e1", "core", &[("L1", Some("Thing"))])).unwrap();
        assert_eq!(s.next_missing("e2"), Ok(Some("e2".into())));
    }

    #[test]
    fn empty_taxonomy_falls_back_to_names() {
        let s = OntologyStore::empty();
        let e = entry("printer", "Printer", QoSSpec::new());
        assert!(matches!(
            match_service(&s, [&e], &want("printer", "Device"), &QoSSpec::new(), &[]),
            MatchOutcome::Entry(_)
        ));
        assert_eq!(
            match_service(&s, [&e], &want("scanner", "Device"), &QoSSpec::new(), &[]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn unknown_concept_is_no_match() {
        let s = device_store();
        let e = entry("p", "Printer", QoSSpec::new());
        assert_eq!(
            match_service(&s, [&e], &want("q", "Spaceship"), &QoSSpec::new(), &[]),
            MatchOutcome::NoMatch
        );
    }

    #[test]
    fn slave_fixture_loads() {
        let mut s = OntologyStore::new(fixtures::core()).unwrap();
        for d in fixtures::extensions() {
            s.load(d).unwrap();
        }
        assert!(s.subsumes("Service", "TrafficAlert"));
        assert!(s.subsumes("Person", "Doctor"));
        assert!(!s.subsumes("Place", "Doctor"));
        let total = s.core().tuple_count() + s.ext_tuple_count();
        assert!((18..=25).contains(&total), "sample taxonomy has {total} concepts");
    }
}
