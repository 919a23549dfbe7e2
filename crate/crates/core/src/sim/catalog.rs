//! The services offered in a run and the ontology documents describing them.
//!
//! Every service gets a small document of its own that extends one of the
//! domain extensions of the sample taxonomy, so a node needs the domain
//! document and the service document to interpret a request.

use crate::discovery::ServiceRequest;
use crate::domain::{NodeId, OntologyDocument, OntologyRecord, QoSSpec, ServiceId, ServiceInfo};
use crate::semantic::fixtures;

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub info: ServiceInfo,
    pub document: OntologyDocument,
}

#[derive(Debug, Clone)]
pub struct Catalog {
    core: OntologyDocument,
    domains: Vec<OntologyDocument>,
    entries: Vec<CatalogEntry>,
}

pub fn service_uri(id: ServiceId) -> String {
    format!("urn:handy:svc:{}", id.0)
}

impl Catalog {
    /// Services `1..=count`, service `s` hosted by `host(s)`.
    pub fn new(count: u32, host: impl Fn(ServiceId) -> NodeId) -> Self {
        let core = fixtures::core();
        let domains = fixtures::extensions();
        let entries = (1..=count)
            .map(ServiceId)
            .map(|id| {
                let d = (id.0 as usize - 1) % domains.len();
                let domain = &domains[d];
                let concept = format!("Svc{}", id.0);
                let document = OntologyDocument {
                    name: format!("svc-{}", id.0),
                    uri: service_uri(id),
                    base_uri: domain.uri.clone(),
                    author: "handy".into(),
                    concepts: vec![
                        (concept.clone(), Some(fixtures::DOMAIN_SERVICE_CONCEPTS[d].to_string())),
                        (format!("{concept}Session"), Some(concept.clone())),
                    ],
                };
                let info = ServiceInfo {
                    service_id: id,
                    name: format!("svc-{}", id.0),
                    provider: host(id),
                    concept,
                    input_interface: format!("req-{}", id.0),
                    output_interface: format!("resp-{}", id.0),
                    ontology_list: vec![domain.uri.clone(), document.uri.clone()],
                    qos: QoSSpec::from_pairs([("reliability", 0.9)]),
                };
                CatalogEntry { info, document }
            })
            .collect();
        Self {
            core,
            domains,
            entries,
        }
    }

    pub fn core(&self) -> &OntologyDocument {
        &self.core
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, id: ServiceId) -> Option<&CatalogEntry> {
        self.entries.get((id.0 as usize).checked_sub(1)?)
    }

    fn domain_of(&self, id: ServiceId) -> &OntologyDocument {
        &self.domains[(id.0 as usize - 1) % self.domains.len()]
    }

    /// Extension documents needed for `id`, base first.
    pub fn chain(&self, id: ServiceId) -> Vec<OntologyDocument> {
        match self.get(id) {
            Some(e) => vec![self.domain_of(id).clone(), e.document.clone()],
            None => Vec::new(),
        }
    }

    /// Every extension document: the domain fragments and one per service.
    pub fn all_extensions(&self) -> Vec<OntologyDocument> {
        let mut v = self.domains.clone();
        v.extend(self.entries.iter().map(|e| e.document.clone()));
        v
    }

    pub fn total_ext_tuples(&self) -> usize {
        self.all_extensions().iter().map(OntologyDocument::tuple_count).sum()
    }

    pub fn request(&self, id: ServiceId) -> Option<ServiceRequest> {
        let e = self.get(id)?;
        Some(ServiceRequest {
            service: id,
            description: e.info.description(),
            qos: QoSSpec::from_pairs([("reliability", 0.5)]),
            ontology: self.chain(id).iter().map(OntologyRecord::from).collect(),
        })
    }
}

impl From<&OntologyDocument> for OntologyRecord {
    fn from(d: &OntologyDocument) -> Self {
        d.record()
    }
}
