//! Shared domain types: identities, QoS, service and routing tables, ontology
//! metadata and the three protocol messages.

mod message;
pub mod wire;

use std::collections::BTreeSet;
use std::fmt;

pub use message::{
    AdvEntry, Message, MessageKind, Requested, RoutingHeaders, SAdvMessage, SRepMessage,
    SReqMessage,
};

/// Simulated node identity (stands in for an IP address).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Network-wide service identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ServiceId(pub u32);

impl fmt::Display for ServiceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Simulated time in seconds.
pub type SimTime = f64;

/// QoS attributes, all normalized so that a higher value is better.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QoSSpec {
    attributes: Vec<(String, f64)>,
}

impl QoSSpec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a spec from pairs. Later duplicates overwrite earlier ones so
    /// names stay unique.
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut spec = Self::new();
        for (name, value) in pairs {
            spec.set(name, value);
        }
        spec
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        match self.attributes.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => self.attributes.push((name, value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn attributes(&self) -> &[(String, f64)] {
        &self.attributes
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.attributes.iter().all(|(_, v)| v.is_finite())
    }
}

/// True iff every attribute constrained by `requested` is offered at an equal
/// or better level. Attributes `requested` does not mention are unconstrained.
pub fn qos_satisfies(requested: &QoSSpec, offered: &QoSSpec) -> bool {
    requested
        .attributes()
        .iter()
        .all(|(name, wanted)| matches!(offered.get(name), Some(have) if have >= *wanted))
}

/// What a consumer asks for, or what a provider offers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ServiceDescription {
    pub name: String,
    /// Taxonomy node identifier.
    pub concept: String,
    pub input_interface: String,
    pub output_interface: String,
}

/// The service-table fields that travel on the wire.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ServiceInfo {
    pub service_id: ServiceId,
    pub name: String,
    pub provider: NodeId,
    pub concept: String,
    pub input_interface: String,
    pub output_interface: String,
    /// URIs of the ontology documents needed to understand the service.
    pub ontology_list: Vec<String>,
    pub qos: QoSSpec,
}

impl ServiceInfo {
    pub fn key(&self) -> ServiceKey {
        ServiceKey {
            service: self.service_id,
            provider: self.provider,
        }
    }

    pub fn description(&self) -> ServiceDescription {
        ServiceDescription {
            name: self.name.clone(),
            concept: self.concept.clone(),
            input_interface: self.input_interface.clone(),
            output_interface: self.output_interface.clone(),
        }
    }
}

/// Identifies one offer of a service by one provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ServiceKey {
    pub service: ServiceId,
    pub provider: NodeId,
}

/// A row of a node's service table.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceTableEntry {
    pub info: ServiceInfo,
    /// Simulation time of last use, drives LRU eviction.
    pub last_used_tick: SimTime,
    /// Hosted by this node; never evicted.
    pub locally_hosted: bool,
}

impl ServiceTableEntry {
    pub fn hosted(info: ServiceInfo) -> Self {
        Self {
            info,
            last_used_tick: 0.0,
            locally_hosted: true,
        }
    }

    pub fn cached(info: ServiceInfo, now: SimTime) -> Self {
        Self {
            info,
            last_used_tick: now,
            locally_hosted: false,
        }
    }

    pub fn key(&self) -> ServiceKey {
        self.info.key()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteStatus {
    Valid,
    Invalid,
}

/// AODV-style routing state toward one destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteEntry {
    pub sequence_number: u32,
    pub destination: NodeId,
    pub hop_count: u32,
    pub next_node: NodeId,
    pub status: RouteStatus,
    pub precursors: BTreeSet<NodeId>,
}

impl RouteEntry {
    /// The zero-hop route a node holds toward itself.
    pub fn to_self(id: NodeId, sequence_number: u32) -> Self {
        Self {
            sequence_number,
            destination: id,
            hop_count: 0,
            next_node: id,
            status: RouteStatus::Valid,
            precursors: BTreeSet::new(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status == RouteStatus::Valid
    }
}

/// One document of a concept taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OntologyDocument {
    pub name: String,
    pub uri: String,
    /// URI of the extended document; empty for the core.
    pub base_uri: String,
    pub author: String,
    /// `(concept, parent)` pairs; roots carry no parent.
    pub concepts: Vec<(String, Option<String>)>,
}

impl OntologyDocument {
    pub fn is_core(&self) -> bool {
        self.base_uri.is_empty()
    }

    /// Number of concept tuples the document contributes.
    pub fn tuple_count(&self) -> usize {
        self.concepts.len()
    }

    pub fn defines(&self, concept: &str) -> bool {
        self.concepts.iter().any(|(c, _)| c == concept)
    }

    pub fn record(&self) -> OntologyRecord {
        OntologyRecord {
            name: self.name.clone(),
            uri: self.uri.clone(),
            author: self.author.clone(),
            base_ontology: self.base_uri.clone(),
            document: None,
        }
    }

    pub fn record_with_document(&self) -> OntologyRecord {
        OntologyRecord {
            document: Some(self.clone()),
            ..self.record()
        }
    }
}

/// Ontology table row; `document` absent means metadata only.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OntologyRecord {
    pub name: String,
    pub uri: String,
    pub author: String,
    pub base_ontology: String,
    pub document: Option<OntologyDocument>,
}

impl OntologyRecord {
    pub fn metadata(&self) -> OntologyRecord {
        OntologyRecord {
            document: None,
            ..self.clone()
        }
    }
}
