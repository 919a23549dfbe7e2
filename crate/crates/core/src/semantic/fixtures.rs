//! Small sample taxonomy: a core plus medical, safety and entertainment
//! extensions.

use super::parse_document;
use crate::domain::OntologyDocument;

pub const CORE: &str = include_str!("../../fixtures/ontology/core.onto");
pub const MEDICAL: &str = include_str!("../../fixtures/ontology/medical.onto");
pub const SAFETY: &str = include_str!("../../fixtures/ontology/safety.onto");
pub const ENTERTAINMENT: &str = include_str!("../../fixtures/ontology/entertainment.onto");

pub fn core() -> OntologyDocument {
    parse_document(CORE).expect("core fixture parses")
}

pub fn extensions() -> Vec<OntologyDocument> {
    [MEDICAL, SAFETY, ENTERTAINMENT]
        .into_iter()
        .map(|s| parse_document(s).expect("extension fixture parses"))
        .collect()
}

/// Concept each extension offers services under, in `extensions()` order.
pub const DOMAIN_SERVICE_CONCEPTS: [&str; 3] =
    ["MedicalService", "SafetyService", "EntertainmentService"];
