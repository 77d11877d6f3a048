use serde_json::{json, Map, Value};

use crate::kb::Ontology;

use super::{format_literal, KbxError};

/// JSON view of an ontology for tooling. Keys are sorted; export only.
pub fn export_json(o: &Ontology) -> String {
    serde_json::to_string_pretty(&export_value(o)).expect("ontology JSON is always serializable")
}

pub fn export_value(o: &Ontology) -> Value {
    let concepts: Map<String, Value> = o
        .concepts()
        .values()
        .map(|c| {
            (
                c.name.clone(),
                json!({
                    "kind": c.kind,
                    "parents": c.parents,
                    "definition": c.definition.as_ref().map(|d| d.to_string()),
                    "label": c.label,
                    "comment": c.comment,
                }),
            )
        })
        .collect();
    let relations: Map<String, Value> = o
        .relations()
        .values()
        .map(|r| {
            (
                r.name.clone(),
                json!({
                    "family": r.family,
                    "domain": r.domain,
                    "range": r.range,
                    "inverse": r.inverse,
                    "label": r.label,
                    "comment": r.comment,
                }),
            )
        })
        .collect();
    let attributes: Map<String, Value> = o
        .attributes()
        .values()
        .map(|a| {
            (
                a.name.clone(),
                json!({
                    "domain": a.domain,
                    "datatype": a.datatype,
                    "label": a.label,
                    "comment": a.comment,
                }),
            )
        })
        .collect();
    let individuals: Map<String, Value> = o
        .individuals()
        .values()
        .map(|i| {
            let facts: Vec<Value> = i.facts.iter().map(|(r, obj)| json!([r, obj])).collect();
            let data: Vec<Value> = i
                .data
                .iter()
                .map(|(a, v)| json!([a, format_literal(v)]))
                .collect();
            (
                i.name.clone(),
                json!({
                    "types": i.types,
                    "facts": facts,
                    "data": data,
                    "label": i.label,
                    "comment": i.comment,
                }),
            )
        })
        .collect();
    json!({
        "iri": o.iri(),
        "license": o.license(),
        "concepts": concepts,
        "relations": relations,
        "attributes": attributes,
        "individuals": individuals,
        "axioms": o.axioms(),
        "metrics": o.metrics(),
    })
}

/// JSON is an export-only format.
pub fn import_json(_text: &str) -> Result<Ontology, KbxError> {
    Err(KbxError::Unsupported("JSON import; the JSON view is export-only"))
}
