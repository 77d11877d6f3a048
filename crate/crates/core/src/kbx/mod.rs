//! KBX, a line-oriented text format for ontologies.
//!
//! ```text
//! ontology "urn:onto4mat"
//! class Agent
//! class Sheep sub Agent
//! prop teamHasAgent family has domain Team range Agent inverse agentIsMemberOfTeam
//! ind sheep1 : Sheep
//! fact herd teamHasAgent sheep1
//! label Agent "agent"
//! ```
//!
//! [`serialize`] emits a canonical form: fixed category order, sorted
//! entries, one statement per line, LF endings.

mod json;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::kb::{AnnotationKind, Axiom, Datatype, KbError, Literal, Ontology};

pub use json::{export_json, import_json};
pub use parser::{parse_document, parse_expression, KbxDocument, RawLiteral, Statement};

/// A grammar violation at a specific position.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("line {line}, column {column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {source}")]
    Assertion {
        line: usize,
        #[source]
        source: KbError,
    },
    #[error("line {line}: ontology IRI declared more than once")]
    DuplicateOntology { line: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),
}

impl KbxError {
    pub fn line(&self) -> Option<usize> {
        match self {
            KbxError::Parse(e) => Some(e.line),
            KbxError::Assertion { line, .. } | KbxError::DuplicateOntology { line } => Some(*line),
            KbxError::Unsupported(_) => None,
        }
    }
}

/// Parses KBX text and asserts the resulting axioms.
pub fn parse(text: &str) -> Result<Ontology, KbxError> {
    let doc = parse_document(text)?;
    to_ontology(&doc)
}

fn coerce(value: &RawLiteral, datatype: Option<Datatype>) -> Literal {
    match (value, datatype) {
        (RawLiteral::Int(n), Some(Datatype::Decimal)) => Literal::Decimal(*n as f64),
        (RawLiteral::Str(s), _) => Literal::String(s.clone()),
        (RawLiteral::Int(n), _) => Literal::Integer(*n),
        (RawLiteral::Decimal(x), _) => Literal::Decimal(*x),
        (RawLiteral::Bool(b), _) => Literal::Boolean(*b),
    }
}

/// Converts parsed statements into an ontology snapshot.
pub fn to_ontology(doc: &KbxDocument) -> Result<Ontology, KbxError> {
    let mut iri: Option<String> = None;
    let datatypes: BTreeMap<&str, Datatype> = doc
        .statements
        .iter()
        .filter_map(|(_, s)| match s {
            Statement::Data { name, datatype, .. } => Some((name.as_str(), *datatype)),
            _ => None,
        })
        .collect();
    let mut axioms: Vec<(usize, Axiom)> = Vec::new();
    for (line, stmt) in &doc.statements {
        let line = *line;
        let mut push = |ax: Axiom| axioms.push((line, ax));
        match stmt {
            Statement::Ontology(s) => {
                if iri.replace(s.clone()).is_some() {
                    return Err(KbxError::DuplicateOntology { line });
                }
            }
            Statement::License(text) => push(Axiom::LicenseDecl { text: text.clone() }),
            Statement::Class {
                name,
                definition,
                parents,
            } => {
                push(Axiom::declare_class(name.clone()));
                if let Some(def) = definition {
                    push(Axiom::EquivalentClass {
                        class: name.clone(),
                        definition: def.clone(),
                    });
                }
                for p in parents {
                    push(Axiom::sub_class(name.clone(), p.clone()));
                }
            }
            Statement::Prop {
                name,
                family,
                domain,
                range,
                inverse,
            } => {
                push(Axiom::declare_relation(name.clone(), *family));
                for d in domain {
                    push(Axiom::DomainOf {
                        relation: name.clone(),
                        concept: d.clone(),
                    });
                }
                for r in range {
                    push(Axiom::RangeOf {
                        relation: name.clone(),
                        concept: r.clone(),
                    });
                }
                if let Some(inv) = inverse {
                    push(Axiom::InverseOf {
                        relation: name.clone(),
                        inverse: inv.clone(),
                    });
                }
            }
            Statement::Data {
                name,
                domain,
                datatype,
            } => push(Axiom::declare_attribute(name.clone(), domain.clone(), *datatype)),
            Statement::Ind { name, types } => {
                push(Axiom::declare_individual(name.clone()));
                for t in types {
                    push(Axiom::instance(name.clone(), t.clone()));
                }
            }
            Statement::Fact {
                subject,
                relation,
                object,
            } => push(Axiom::fact(subject.clone(), relation.clone(), object.clone())),
            Statement::FactData {
                subject,
                attribute,
                value,
            } => push(Axiom::DataAssertion {
                subject: subject.clone(),
                attribute: attribute.clone(),
                value: coerce(value, datatypes.get(attribute.as_str()).copied()),
            }),
            Statement::Label { subject, text } => push(Axiom::Annotation {
                subject: subject.clone(),
                kind: AnnotationKind::Label,
                text: text.clone(),
            }),
            Statement::Comment { subject, text } => push(Axiom::Annotation {
                subject: subject.clone(),
                kind: AnnotationKind::Comment,
                text: text.clone(),
            }),
        }
    }
    Ontology::from_axiom_set_indexed(iri.unwrap_or_default(), axioms)
        .map_err(|(line, source)| KbxError::Assertion { line, source })
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub(crate) fn format_literal(l: &Literal) -> String {
    match l {
        Literal::String(s) => quote(s),
        Literal::Integer(n) => n.to_string(),
        Literal::Decimal(x) => {
            let s = x.to_string();
            if s.contains('.') {
                s
            } else {
                format!("{s}.0")
            }
        }
        Literal::Boolean(b) => b.to_string(),
    }
}

/// Canonical KBX text for `o`.
pub fn serialize(o: &Ontology) -> String {
    let mut out = String::new();
    if !o.iri().is_empty() {
        let _ = writeln!(out, "ontology {}", quote(o.iri()));
    }
    if let Some(l) = o.license() {
        let _ = writeln!(out, "license {}", quote(l));
    }
    for c in o.concepts().values() {
        let _ = write!(out, "class {}", c.name);
        if let Some(def) = &c.definition {
            let _ = write!(out, " defined = {def}");
        }
        if !c.parents.is_empty() {
            let parents: Vec<&str> = c.parents.iter().map(String::as_str).collect();
            let _ = write!(out, " sub {}", parents.join(", "));
        }
        out.push('\n');
    }
    for r in o.relations().values() {
        let _ = write!(out, "prop {} family {}", r.name, r.family);
        if !r.domain.is_empty() {
            let d: Vec<&str> = r.domain.iter().map(String::as_str).collect();
            let _ = write!(out, " domain {}", d.join(", "));
        }
        if !r.range.is_empty() {
            let d: Vec<&str> = r.range.iter().map(String::as_str).collect();
            let _ = write!(out, " range {}", d.join(", "));
        }
        if let Some(inv) = &r.inverse {
            let _ = write!(out, " inverse {inv}");
        }
        out.push('\n');
    }
    for a in o.attributes().values() {
        let _ = writeln!(out, "data {} domain {} range {}", a.name, a.domain, a.datatype);
    }
    for i in o.individuals().values() {
        let types: Vec<&str> = i.types.iter().map(String::as_str).collect();
        if types.is_empty() {
            let _ = writeln!(out, "ind {} :", i.name);
        } else {
            let _ = writeln!(out, "ind {} : {}", i.name, types.join(", "));
        }
    }
    for i in o.individuals().values() {
        for (r, obj) in &i.facts {
            let _ = writeln!(out, "fact {} {} {}", i.name, r, obj);
        }
    }
    for i in o.individuals().values() {
        for (a, v) in &i.data {
            let _ = writeln!(out, "factd {} {} {}", i.name, a, format_literal(v));
        }
    }
    let mut annotations: Vec<(&str, AnnotationKind, &str)> = Vec::new();
    for c in o.concepts().values() {
        push_annotations(&mut annotations, &c.name, &c.label, &c.comment);
    }
    for r in o.relations().values() {
        push_annotations(&mut annotations, &r.name, &r.label, &r.comment);
    }
    for a in o.attributes().values() {
        push_annotations(&mut annotations, &a.name, &a.label, &a.comment);
    }
    for i in o.individuals().values() {
        push_annotations(&mut annotations, &i.name, &i.label, &i.comment);
    }
    annotations.sort();
    for (subject, kind, text) in annotations {
        let _ = writeln!(out, "{} {} {}", kind.as_str(), subject, quote(text));
    }
    out
}

fn push_annotations<'a>(
    out: &mut Vec<(&'a str, AnnotationKind, &'a str)>,
    subject: &'a str,
    label: &'a Option<String>,
    comment: &'a Option<String>,
) {
    if let Some(l) = label {
        out.push((subject, AnnotationKind::Label, l));
    }
    if let Some(c) = comment {
        out.push((subject, AnnotationKind::Comment, c));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{ClassExpression, ConceptKind};

    const TEAM: &str = "\
ontology \"urn:t\"
class Agent
class Team defined = and(Agent, some(teamDoesCollectiveAction, TeamActions), some(teamDoesCollectiveTactic, TeamTactic), min(2, teamHasAgent, Agent))
class TeamActions
class TeamTactic
prop teamDoesCollectiveAction family does domain Team range TeamActions
prop teamDoesCollectiveTactic family does domain Team range TeamTactic
prop teamHasAgent family has domain Team range Agent
";

    #[test]
    fn single_class() {
        let o = parse("class Agent").unwrap();
        assert_eq!(o.concepts().len(), 1);
        assert_eq!(o.concept("Agent").unwrap().kind, ConceptKind::Primitive);
    }

    #[test]
    fn defined_team_class() {
        let o = parse(TEAM).unwrap();
        let team = o.concept("Team").unwrap();
        assert_eq!(team.kind, ConceptKind::Defined);
        match team.definition.as_ref().unwrap() {
            ClassExpression::And(ops) => assert_eq!(
                ops.last().unwrap(),
                &ClassExpression::min(2, "teamHasAgent", ClassExpression::named("Agent"))
            ),
            other => panic!("{other:?}"),
        }
        assert_eq!(serialize(&o), TEAM);
    }

    #[test]
    fn assertion_errors_carry_source_line() {
        let err = parse("class A\nclass B sub C\n").unwrap_err();
        assert_eq!(err.line(), Some(2));
        assert!(matches!(err, KbxError::Assertion { .. }));
    }

    #[test]
    fn duplicate_ontology_line() {
        let err = parse("ontology \"a\"\nontology \"b\"").unwrap_err();
        assert_eq!(err, KbxError::DuplicateOntology { line: 2 });
    }

    #[test]
    fn integer_literal_widens_to_decimal() {
        let o = parse("class A\ndata w domain A range decimal\nind x : A\nfactd x w 3\n").unwrap();
        assert!(serialize(&o).contains("factd x w 3.0\n"));
    }

    #[test]
    fn canonical_ordering_and_escapes() {
        let src = "label B \"say \\\"b\\\"\"\nclass B sub A\nclass A\nlicense \"CC-BY-4.0\"\ncomment A \"root\"\n";
        let o = parse(src).unwrap();
        assert_eq!(
            serialize(&o),
            "license \"CC-BY-4.0\"\nclass A\nclass B sub A\ncomment A \"root\"\nlabel B \"say \\\"b\\\"\"\n"
        );
    }

    #[test]
    fn empty_ontology_serializes_empty() {
        assert_eq!(serialize(&Ontology::default()), "");
    }
}
