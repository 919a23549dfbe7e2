//! Taxonomy document text format.
//!
//! ```text
//! name: slave-medical
//! uri: urn:slave:medical
//! base: urn:slave:core
//! author: handy
//! Doctor -> Person
//! Disease -> Thing
//! ```
//!
//! Header lines come first. A body line `child -> parent` adds an edge; a bare
//! concept is a root. Blank lines and `#` comments are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::SemanticError;
use crate::domain::OntologyDocument;

pub fn parse_document(input: &str) -> Result<OntologyDocument, SemanticError> {
    let mut doc = OntologyDocument::default();
    let mut seen_name = false;
    let mut seen_uri = false;
    let mut defined = BTreeSet::new();
    for (i, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = header(line) {
            let value = value.to_string();
            match key {
                "name" => {
                    doc.name = value;
                    seen_name = true;
                }
                "uri" => {
                    doc.uri = value;
                    seen_uri = true;
                }
                "base" => doc.base_uri = value,
                "author" => doc.author = value,
                _ => unreachable!(),
            }
            continue;
        }
        let (child, parent) = match line.split_once("->") {
            Some((c, p)) => (c.trim(), Some(p.trim())),
            None => (line, None),
        };
        let bad = |c: &str| c.is_empty() || c.contains(char::is_whitespace);
        if bad(child) || parent.is_some_and(bad) {
            return Err(SemanticError::BadLine {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        if !defined.insert(child.to_string()) {
            return Err(SemanticError::DuplicateConcept(child.to_string()));
        }
        doc.concepts
            .push((child.to_string(), parent.map(str::to_string)));
    }
    if !seen_name {
        return Err(SemanticError::MissingHeader("name"));
    }
    if !seen_uri || doc.uri.is_empty() {
        return Err(SemanticError::MissingHeader("uri"));
    }
    check_acyclic(&doc)?;
    Ok(doc)
}

fn header(line: &str) -> Option<(&str, &str)> {
    let (key, value) = line.split_once(':')?;
    let key = key.trim();
    match key {
        "name" | "uri" | "base" | "author" if !line.contains("->") => Some((key, value.trim())),
        _ => None,
    }
}

pub fn format_document(doc: &OntologyDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", doc.name);
    let _ = writeln!(out, "uri: {}", doc.uri);
    let _ = writeln!(out, "base: {}", doc.base_uri);
    let _ = writeln!(out, "author: {}", doc.author);
    for (child, parent) in &doc.concepts {
        match parent {
            Some(p) => {
                let _ = writeln!(out, "{child} -> {p}");
            }
            None => {
                let _ = writeln!(out, "{child}");
            }
        }
    }
    out
}

fn check_acyclic(doc: &OntologyDocument) -> Result<(), SemanticError> {
    let parent: BTreeMap<&str, &str> = doc
        .concepts
        .iter()
        .filter_map(|(c, p)| p.as_deref().map(|p| (c.as_str(), p)))
        .collect();
    for (start, _) in &doc.concepts {
        let mut cur = start.as_str();
        let mut steps = 0;
        while let Some(&p) = parent.get(cur) {
            if p == start {
                return Err(SemanticError::Cycle(start.clone()));
            }
            cur = p;
            steps += 1;
            if steps > parent.len() {
                return Err(SemanticError::Cycle(start.clone()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_headers_and_edges() {
        let doc = parse_document("name: a\nuri: urn:a\nbase: urn:core\nauthor: me\nX -> Thing\nY\n")
            .unwrap();
        assert_eq!(doc.uri, "urn:a");
        assert_eq!(doc.base_uri, "urn:core");
        assert_eq!(
            doc.concepts,
            vec![("X".into(), Some("Thing".into())), ("Y".into(), None)]
        );
    }

    #[test]
    fn rejects_cycles() {
        let err = parse_document("name: a\nuri: u\nA -> B\nB -> A\n").unwrap_err();
        assert!(matches!(err, SemanticError::Cycle(_)));
    }

    #[test]
    fn rejects_missing_uri() {
        assert_eq!(
            parse_document("name: a\nA\n"),
            Err(SemanticError::MissingHeader("uri"))
        );
    }

    #[test]
    fn rejects_garbage_lines() {
        let err = parse_document("name: a\nuri: u\nA B -> C\n").unwrap_err();
        assert!(matches!(err, SemanticError::BadLine { line: 3, .. }));
    }

    #[test]
    fn format_round_trips() {
        let doc = parse_document(super::super::fixtures::MEDICAL).unwrap();
        assert_eq!(parse_document(&format_document(&doc)).unwrap(), doc);
    }
}
