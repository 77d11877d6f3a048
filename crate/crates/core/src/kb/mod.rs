//! In-memory ontology: concepts, relations, attributes, individuals and the
//! axiom list they are derived from.
//!
//! An [`Ontology`] is an immutable snapshot. [`Ontology::assert_axiom`] returns
//! a new snapshot and leaves the receiver untouched. The axiom list is the
//! single source of truth; every derived map can be rebuilt from it.

mod expr;
mod integrity;
mod metrics;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use expr::ClassExpression;
pub use integrity::{check_integrity, IntegrityError};
pub use metrics::Metrics;

pub type Name = String;

/// The seven object-property families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    Controls,
    Does,
    PartOf,
    Has,
    Is,
    Affects,
    Influences,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Controls,
        Family::Does,
        Family::PartOf,
        Family::Has,
        Family::Is,
        Family::Affects,
        Family::Influences,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Controls => "controls",
            Family::Does => "does",
            Family::PartOf => "partOf",
            Family::Has => "has",
            Family::Is => "is",
            Family::Affects => "affects",
            Family::Influences => "influences",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.as_str() == s)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    String,
    Integer,
    Decimal,
    Boolean,
}

impl Datatype {
    pub fn as_str(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
            Datatype::Boolean => "boolean",
        }
    }

    pub fn parse(s: &str) -> Option<Datatype> {
        [
            Datatype::String,
            Datatype::Integer,
            Datatype::Decimal,
            Datatype::Boolean,
        ]
        .into_iter()
        .find(|d| d.as_str() == s)
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed data value. Decimals must be finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Literal {
    String(String),
    Integer(i64),
    Decimal(f64),
    Boolean(bool),
}

impl Literal {
    pub fn datatype(&self) -> Datatype {
        match self {
            Literal::String(_) => Datatype::String,
            Literal::Integer(_) => Datatype::Integer,
            Literal::Decimal(_) => Datatype::Decimal,
            Literal::Boolean(_) => Datatype::Boolean,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Literal::String(_) => 0,
            Literal::Integer(_) => 1,
            Literal::Decimal(_) => 2,
            Literal::Boolean(_) => 3,
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl std::hash::Hash for Literal {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Literal::String(s) => s.hash(state),
            Literal::Integer(n) => n.hash(state),
            Literal::Decimal(x) => x.to_bits().hash(state),
            Literal::Boolean(b) => b.hash(state),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::String(a), Literal::String(b)) => a.cmp(b),
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::Decimal(a), Literal::Decimal(b)) => a.total_cmp(b),
            (Literal::Boolean(a), Literal::Boolean(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConceptKind {
    Primitive,
    Defined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub name: Name,
    pub kind: ConceptKind,
    pub parents: BTreeSet<Name>,
    pub definition: Option<ClassExpression>,
    pub label: Option<String>,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub name: Name,
    pub family: Family,
    pub domain: BTreeSet<Name>,
    pub range: BTreeSet<Name>,
    pub inverse: Option<Name>,
    pub label: Option<String>,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: Name,
    pub domain: Name,
    pub datatype: Datatype,
    pub label: Option<String>,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Individual {
    pub name: Name,
    pub types: BTreeSet<Name>,
    /// `(relation, object)` pairs.
    pub facts: BTreeSet<(Name, Name)>,
    /// `(attribute, value)` pairs.
    pub data: BTreeSet<(Name, Literal)>,
    pub label: Option<String>,
    pub comment: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Concept,
    Relation,
    Attribute,
    Individual,
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntityKind::Concept => "concept",
            EntityKind::Relation => "relation",
            EntityKind::Attribute => "attribute",
            EntityKind::Individual => "individual",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "entity", rename_all = "lowercase")]
pub enum Declaration {
    Class {
        name: Name,
    },
    Relation {
        name: Name,
        family: Family,
    },
    Attribute {
        name: Name,
        domain: Name,
        datatype: Datatype,
    },
    Individual {
        name: Name,
    },
}

impl Declaration {
    pub fn name(&self) -> &str {
        match self {
            Declaration::Class { name }
            | Declaration::Relation { name, .. }
            | Declaration::Attribute { name, .. }
            | Declaration::Individual { name } => name,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Label,
    Comment,
}

impl AnnotationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationKind::Label => "label",
            AnnotationKind::Comment => "comment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "axiom")]
pub enum Axiom {
    Declaration(Declaration),
    SubClassOf {
        sub: Name,
        sup: Name,
    },
    EquivalentClass {
        class: Name,
        definition: ClassExpression,
    },
    DomainOf {
        relation: Name,
        concept: Name,
    },
    RangeOf {
        relation: Name,
        concept: Name,
    },
    InverseOf {
        relation: Name,
        inverse: Name,
    },
    ClassAssertion {
        individual: Name,
        concept: Name,
    },
    PropertyAssertion {
        subject: Name,
        relation: Name,
        object: Name,
    },
    DataAssertion {
        subject: Name,
        attribute: Name,
        value: Literal,
    },
    Annotation {
        subject: Name,
        kind: AnnotationKind,
        text: String,
    },
    LicenseDecl {
        text: String,
    },
}

impl Axiom {
    pub fn declare_class(name: impl Into<Name>) -> Axiom {
        Axiom::Declaration(Declaration::Class { name: name.into() })
    }

    pub fn declare_relation(name: impl Into<Name>, family: Family) -> Axiom {
        Axiom::Declaration(Declaration::Relation {
            name: name.into(),
            family,
        })
    }

    pub fn declare_attribute(
        name: impl Into<Name>,
        domain: impl Into<Name>,
        datatype: Datatype,
    ) -> Axiom {
        Axiom::Declaration(Declaration::Attribute {
            name: name.into(),
            domain: domain.into(),
            datatype,
        })
    }

    pub fn declare_individual(name: impl Into<Name>) -> Axiom {
        Axiom::Declaration(Declaration::Individual { name: name.into() })
    }

    pub fn sub_class(sub: impl Into<Name>, sup: impl Into<Name>) -> Axiom {
        Axiom::SubClassOf {
            sub: sub.into(),
            sup: sup.into(),
        }
    }

    pub fn fact(subject: impl Into<Name>, relation: impl Into<Name>, object: impl Into<Name>) -> Axiom {
        Axiom::PropertyAssertion {
            subject: subject.into(),
            relation: relation.into(),
            object: object.into(),
        }
    }

    pub fn instance(individual: impl Into<Name>, concept: impl Into<Name>) -> Axiom {
        Axiom::ClassAssertion {
            individual: individual.into(),
            concept: concept.into(),
        }
    }

    /// Annotation and license axioms carry no logical content.
    pub fn is_logical(&self) -> bool {
        !matches!(self, Axiom::Annotation { .. } | Axiom::LicenseDecl { .. })
    }

    /// Applies `f` to every concept-name position in the axiom.
    pub fn map_concepts(&self, f: &impl Fn(&str) -> String) -> Axiom {
        let expr_map = |e: &ClassExpression| {
            let mut out = e.clone();
            for c in e.concepts() {
                let renamed = f(c);
                if renamed != c {
                    out = out.rename_concept(c, &renamed);
                }
            }
            out
        };
        match self {
            Axiom::Declaration(Declaration::Class { name }) => {
                Axiom::Declaration(Declaration::Class { name: f(name) })
            }
            Axiom::Declaration(Declaration::Attribute {
                name,
                domain,
                datatype,
            }) => Axiom::Declaration(Declaration::Attribute {
                name: name.clone(),
                domain: f(domain),
                datatype: *datatype,
            }),
            Axiom::SubClassOf { sub, sup } => Axiom::SubClassOf {
                sub: f(sub),
                sup: f(sup),
            },
            Axiom::EquivalentClass { class, definition } => Axiom::EquivalentClass {
                class: f(class),
                definition: expr_map(definition),
            },
            Axiom::DomainOf { relation, concept } => Axiom::DomainOf {
                relation: relation.clone(),
                concept: f(concept),
            },
            Axiom::RangeOf { relation, concept } => Axiom::RangeOf {
                relation: relation.clone(),
                concept: f(concept),
            },
            Axiom::ClassAssertion {
                individual,
                concept,
            } => Axiom::ClassAssertion {
                individual: individual.clone(),
                concept: f(concept),
            },
            Axiom::Annotation {
                subject,
                kind,
                text,
            } => Axiom::Annotation {
                subject: f(subject),
                kind: *kind,
                text: text.clone(),
            },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error("unresolved reference: no {expected} named `{name}`")]
    UnresolvedReference { name: Name, expected: EntityKind },
    #[error("asserting `{sub}` under `{sup}` introduces a cycle")]
    CycleIntroduced { sub: Name, sup: Name },
    #[error("relation `{relation}` already has inverse `{existing}`, cannot set `{requested}`")]
    InverseConflict {
        relation: Name,
        existing: Name,
        requested: Name,
    },
    #[error("`{0}` is already declared")]
    DuplicateDeclaration(Name),
    #[error("`{0}` is not a valid name")]
    InvalidName(String),
    #[error("class `{0}` already has a different definition")]
    DefinitionConflict(Name),
    #[error("invalid class expression: {0}")]
    InvalidExpression(String),
    #[error("`{subject}` already has a different {kind}")]
    DuplicateAnnotation { subject: Name, kind: &'static str },
    #[error("a different license is already declared")]
    LicenseConflict,
    #[error("attribute `{attribute}` expects a {expected} literal")]
    LiteralMismatch { attribute: Name, expected: Datatype },
    #[error("text contains a control character")]
    InvalidText,
}

pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn check_text(s: &str) -> Result<(), KbError> {
    if s.chars().any(char::is_control) {
        Err(KbError::InvalidText)
    } else {
        Ok(())
    }
}

/// Immutable ontology snapshot: the five-tuple of concepts, relations,
/// attributes, individuals and axioms, plus an identifying IRI and license.
///
/// Equality compares the derived entity maps, so two snapshots built from
/// the same axioms in different orders are equal.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Ontology {
    iri: String,
    license: Option<String>,
    concepts: BTreeMap<Name, Concept>,
    relations: BTreeMap<Name, Relation>,
    attributes: BTreeMap<Name, AttributeDef>,
    individuals: BTreeMap<Name, Individual>,
    axioms: Vec<Axiom>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.iri == other.iri
            && self.license == other.license
            && self.concepts == other.concepts
            && self.relations == other.relations
            && self.attributes == other.attributes
            && self.individuals == other.individuals
    }
}

impl Eq for Ontology {}

impl Ontology {
    pub fn new(iri: impl Into<String>) -> Self {
        Ontology {
            iri: iri.into(),
            ..Default::default()
        }
    }

    /// Builds a snapshot by asserting `axioms` in the given order.
    pub fn from_axioms(
        iri: impl Into<String>,
        axioms: impl IntoIterator<Item = Axiom>,
    ) -> Result<Self, KbError> {
        let mut o = Ontology::new(iri);
        for ax in axioms {
            o.apply(ax)?;
        }
        Ok(o)
    }

    /// Like [`Ontology::from_axioms`] but tolerant of forward references:
    /// class, relation and individual declarations are asserted first, then
    /// attribute declarations, then everything else in the given order.
    pub fn from_axiom_set(
        iri: impl Into<String>,
        axioms: impl IntoIterator<Item = Axiom>,
    ) -> Result<Self, KbError> {
        Self::from_axiom_set_indexed(iri, axioms.into_iter().enumerate()).map_err(|(_, e)| e)
    }

    /// Phased construction that reports which input item failed.
    pub(crate) fn from_axiom_set_indexed<K: Copy>(
        iri: impl Into<String>,
        axioms: impl IntoIterator<Item = (K, Axiom)>,
    ) -> Result<Self, (K, KbError)> {
        let (mut entities, mut attributes, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for (k, ax) in axioms {
            match &ax {
                Axiom::Declaration(Declaration::Attribute { .. }) => attributes.push((k, ax)),
                Axiom::Declaration(_) => entities.push((k, ax)),
                _ => rest.push((k, ax)),
            }
        }
        let mut o = Ontology::new(iri);
        for (k, ax) in entities.into_iter().chain(attributes).chain(rest) {
            o.apply(ax).map_err(|e| (k, e))?;
        }
        Ok(o)
    }

    /// Builds the derived maps without validation. Use [`check_integrity`]
    /// to find out what is wrong with the result.
    pub fn from_axioms_unchecked(
        iri: impl Into<String>,
        axioms: impl IntoIterator<Item = Axiom>,
    ) -> Self {
        let mut o = Ontology::new(iri);
        for ax in axioms {
            o.apply_lenient(&ax);
            o.axioms.push(ax);
        }
        o
    }

    /// Returns a new snapshot with `ax` asserted. Asserting an axiom that is
    /// already entailed by the snapshot's structure is a no-op.
    pub fn assert_axiom(&self, ax: Axiom) -> Result<Ontology, KbError> {
        let mut next = self.clone();
        next.apply(ax)?;
        Ok(next)
    }

    /// Rebuilds a snapshot from this one's axiom list.
    pub fn rebuild(&self) -> Result<Ontology, KbError> {
        Ontology::from_axioms(self.iri.clone(), self.axioms.iter().cloned())
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn license(&self) -> Option<&str> {
        self.license.as_deref()
    }

    pub fn concepts(&self) -> &BTreeMap<Name, Concept> {
        &self.concepts
    }

    pub fn relations(&self) -> &BTreeMap<Name, Relation> {
        &self.relations
    }

    pub fn attributes(&self) -> &BTreeMap<Name, AttributeDef> {
        &self.attributes
    }

    pub fn individuals(&self) -> &BTreeMap<Name, Individual> {
        &self.individuals
    }

    pub fn axioms(&self) -> &[Axiom] {
        &self.axioms
    }

    pub fn concept(&self, name: &str) -> Option<&Concept> {
        self.concepts.get(name)
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn individual(&self, name: &str) -> Option<&Individual> {
        self.individuals.get(name)
    }

    pub fn kind_of(&self, name: &str) -> Option<EntityKind> {
        if self.concepts.contains_key(name) {
            Some(EntityKind::Concept)
        } else if self.relations.contains_key(name) {
            Some(EntityKind::Relation)
        } else if self.attributes.contains_key(name) {
            Some(EntityKind::Attribute)
        } else if self.individuals.contains_key(name) {
            Some(EntityKind::Individual)
        } else {
            None
        }
    }

    pub fn metrics(&self) -> Metrics {
        Metrics::of(self)
    }

    fn require(&self, name: &str, expected: EntityKind) -> Result<(), KbError> {
        if self.kind_of(name) == Some(expected) {
            Ok(())
        } else {
            Err(KbError::UnresolvedReference {
                name: name.to_string(),
                expected,
            })
        }
    }

    /// Checks that every name in `expr` resolves.
    pub fn check_expression(&self, expr: &ClassExpression) -> Result<(), KbError> {
        expr.validate().map_err(KbError::InvalidExpression)?;
        for c in expr.concepts() {
            self.require(c, EntityKind::Concept)?;
        }
        for r in expr.relations() {
            self.require(r, EntityKind::Relation)?;
        }
        Ok(())
    }

    /// True when `target` is reachable from `start` along asserted parent edges.
    fn reaches_parent(&self, start: &str, target: &str) -> bool {
        let mut stack = vec![start];
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            if c == target {
                return true;
            }
            if !seen.insert(c) {
                continue;
            }
            if let Some(concept) = self.concepts.get(c) {
                stack.extend(concept.parents.iter().map(String::as_str));
            }
        }
        false
    }

    /// True when expanding the definitions reachable from `expr` mentions `class`.
    fn definition_reaches(&self, expr: &ClassExpression, class: &str) -> bool {
        let mut stack: Vec<&str> = expr.concepts().into_iter().collect();
        let mut seen = BTreeSet::new();
        while let Some(c) = stack.pop() {
            if c == class {
                return true;
            }
            if !seen.insert(c) {
                continue;
            }
            if let Some(def) = self.concepts.get(c).and_then(|k| k.definition.as_ref()) {
                stack.extend(def.concepts());
            }
        }
        false
    }

    /// Validates and applies one axiom, appending it unless it is already
    /// entailed structurally.
    fn apply(&mut self, ax: Axiom) -> Result<(), KbError> {
        if self.validate(&ax)? {
            self.apply_lenient(&ax);
            self.axioms.push(ax);
        }
        Ok(())
    }

    /// Returns `Ok(false)` for a redundant axiom, `Ok(true)` for a new one.
    fn validate(&self, ax: &Axiom) -> Result<bool, KbError> {
        use EntityKind as K;
        match ax {
            Axiom::Declaration(decl) => {
                let name = decl.name();
                if !is_valid_name(name) {
                    return Err(KbError::InvalidName(name.to_string()));
                }
                if self.kind_of(name).is_some() {
                    return Err(KbError::DuplicateDeclaration(name.to_string()));
                }
                if let Declaration::Attribute { domain, .. } = decl {
                    self.require(domain, K::Concept)?;
                }
                Ok(true)
            }
            Axiom::SubClassOf { sub, sup } => {
                self.require(sub, K::Concept)?;
                self.require(sup, K::Concept)?;
                if self.concepts[sub].parents.contains(sup) {
                    return Ok(false);
                }
                if self.reaches_parent(sup, sub) {
                    return Err(KbError::CycleIntroduced {
                        sub: sub.clone(),
                        sup: sup.clone(),
                    });
                }
                Ok(true)
            }
            Axiom::EquivalentClass { class, definition } => {
                self.require(class, K::Concept)?;
                self.check_expression(definition)?;
                match &self.concepts[class].definition {
                    Some(existing) if existing == definition => return Ok(false),
                    Some(_) => return Err(KbError::DefinitionConflict(class.clone())),
                    None => {}
                }
                if self.definition_reaches(definition, class) {
                    return Err(KbError::CycleIntroduced {
                        sub: class.clone(),
                        sup: class.clone(),
                    });
                }
                Ok(true)
            }
            Axiom::DomainOf { relation, concept } => {
                self.require(relation, K::Relation)?;
                self.require(concept, K::Concept)?;
                Ok(!self.relations[relation].domain.contains(concept))
            }
            Axiom::RangeOf { relation, concept } => {
                self.require(relation, K::Relation)?;
                self.require(concept, K::Concept)?;
                Ok(!self.relations[relation].range.contains(concept))
            }
            Axiom::InverseOf { relation, inverse } => {
                self.require(relation, K::Relation)?;
                self.require(inverse, K::Relation)?;
                let check = |r: &str, wanted: &str| match &self.relations[r].inverse {
                    Some(existing) if existing != wanted => Err(KbError::InverseConflict {
                        relation: r.to_string(),
                        existing: existing.clone(),
                        requested: wanted.to_string(),
                    }),
                    Some(_) => Ok(false),
                    None => Ok(true),
                };
                let a = check(relation, inverse)?;
                let b = check(inverse, relation)?;
                Ok(a || b)
            }
            Axiom::ClassAssertion {
                individual,
                concept,
            } => {
                self.require(individual, K::Individual)?;
                self.require(concept, K::Concept)?;
                Ok(!self.individuals[individual].types.contains(concept))
            }
            Axiom::PropertyAssertion {
                subject,
                relation,
                object,
            } => {
                self.require(subject, K::Individual)?;
                self.require(relation, K::Relation)?;
                self.require(object, K::Individual)?;
                Ok(!self.individuals[subject]
                    .facts
                    .contains(&(relation.clone(), object.clone())))
            }
            Axiom::DataAssertion {
                subject,
                attribute,
                value,
            } => {
                self.require(subject, K::Individual)?;
                self.require(attribute, K::Attribute)?;
                let expected = self.attributes[attribute].datatype;
                match value {
                    Literal::Decimal(x) if !x.is_finite() => {
                        return Err(KbError::LiteralMismatch {
                            attribute: attribute.clone(),
                            expected,
                        })
                    }
                    Literal::String(s) => check_text(s)?,
                    _ => {}
                }
                if value.datatype() != expected {
                    return Err(KbError::LiteralMismatch {
                        attribute: attribute.clone(),
                        expected,
                    });
                }
                Ok(!self.individuals[subject]
                    .data
                    .contains(&(attribute.clone(), value.clone())))
            }
            Axiom::Annotation {
                subject,
                kind,
                text,
            } => {
                check_text(text)?;
                let existing = self.annotation(subject, *kind).ok_or_else(|| {
                    KbError::UnresolvedReference {
                        name: subject.clone(),
                        expected: K::Concept,
                    }
                })?;
                match existing {
                    Some(t) if t == text => Ok(false),
                    Some(_) => Err(KbError::DuplicateAnnotation {
                        subject: subject.clone(),
                        kind: kind.as_str(),
                    }),
                    None => Ok(true),
                }
            }
            Axiom::LicenseDecl { text } => {
                check_text(text)?;
                match &self.license {
                    Some(t) if t == text => Ok(false),
                    Some(_) => Err(KbError::LicenseConflict),
                    None => Ok(true),
                }
            }
        }
    }

    /// `None` when `subject` is not declared; otherwise the current value.
    fn annotation(&self, subject: &str, kind: AnnotationKind) -> Option<Option<&String>> {
        let (label, comment) = if let Some(c) = self.concepts.get(subject) {
            (&c.label, &c.comment)
        } else if let Some(r) = self.relations.get(subject) {
            (&r.label, &r.comment)
        } else if let Some(a) = self.attributes.get(subject) {
            (&a.label, &a.comment)
        } else {
            let i = self.individuals.get(subject)?;
            (&i.label, &i.comment)
        };
        Some(match kind {
            AnnotationKind::Label => label.as_ref(),
            AnnotationKind::Comment => comment.as_ref(),
        })
    }

    fn annotation_slot(&mut self, subject: &str, kind: AnnotationKind) -> Option<&mut Option<String>> {
        let (label, comment) = if let Some(c) = self.concepts.get_mut(subject) {
            (&mut c.label, &mut c.comment)
        } else if let Some(r) = self.relations.get_mut(subject) {
            (&mut r.label, &mut r.comment)
        } else if let Some(a) = self.attributes.get_mut(subject) {
            (&mut a.label, &mut a.comment)
        } else {
            let i = self.individuals.get_mut(subject)?;
            (&mut i.label, &mut i.comment)
        };
        Some(match kind {
            AnnotationKind::Label => label,
            AnnotationKind::Comment => comment,
        })
    }

    /// Updates derived maps for `ax`, skipping parts whose targets are missing.
    fn apply_lenient(&mut self, ax: &Axiom) {
        match ax {
            Axiom::Declaration(Declaration::Class { name }) => {
                self.concepts.entry(name.clone()).or_insert_with(|| Concept {
                    name: name.clone(),
                    kind: ConceptKind::Primitive,
                    parents: BTreeSet::new(),
                    definition: None,
                    label: None,
                    comment: None,
                });
            }
            Axiom::Declaration(Declaration::Relation { name, family }) => {
                self.relations.entry(name.clone()).or_insert_with(|| Relation {
                    name: name.clone(),
                    family: *family,
                    domain: BTreeSet::new(),
                    range: BTreeSet::new(),
                    inverse: None,
                    label: None,
                    comment: None,
                });
            }
            Axiom::Declaration(Declaration::Attribute {
                name,
                domain,
                datatype,
            }) => {
                self.attributes
                    .entry(name.clone())
                    .or_insert_with(|| AttributeDef {
                        name: name.clone(),
                        domain: domain.clone(),
                        datatype: *datatype,
                        label: None,
                        comment: None,
                    });
            }
            Axiom::Declaration(Declaration::Individual { name }) => {
                self.individuals
                    .entry(name.clone())
                    .or_insert_with(|| Individual {
                        name: name.clone(),
                        types: BTreeSet::new(),
                        facts: BTreeSet::new(),
                        data: BTreeSet::new(),
                        label: None,
                        comment: None,
                    });
            }
            Axiom::SubClassOf { sub, sup } => {
                if let Some(c) = self.concepts.get_mut(sub) {
                    c.parents.insert(sup.clone());
                }
            }
            Axiom::EquivalentClass { class, definition } => {
                if let Some(c) = self.concepts.get_mut(class) {
                    c.kind = ConceptKind::Defined;
                    c.definition = Some(definition.clone());
                }
            }
            Axiom::DomainOf { relation, concept } => {
                if let Some(r) = self.relations.get_mut(relation) {
                    r.domain.insert(concept.clone());
                }
            }
            Axiom::RangeOf { relation, concept } => {
                if let Some(r) = self.relations.get_mut(relation) {
                    r.range.insert(concept.clone());
                }
            }
            Axiom::InverseOf { relation, inverse } => {
                if let Some(r) = self.relations.get_mut(relation) {
                    r.inverse = Some(inverse.clone());
                }
                if let Some(s) = self.relations.get_mut(inverse) {
                    if s.inverse.is_none() {
                        s.inverse = Some(relation.clone());
                    }
                }
            }
            Axiom::ClassAssertion {
                individual,
                concept,
            } => {
                if let Some(i) = self.individuals.get_mut(individual) {
                    i.types.insert(concept.clone());
                }
            }
            Axiom::PropertyAssertion {
                subject,
                relation,
                object,
            } => {
                if let Some(i) = self.individuals.get_mut(subject) {
                    i.facts.insert((relation.clone(), object.clone()));
                }
            }
            Axiom::DataAssertion {
                subject,
                attribute,
                value,
            } => {
                if let Some(i) = self.individuals.get_mut(subject) {
                    i.data.insert((attribute.clone(), value.clone()));
                }
            }
            Axiom::Annotation {
                subject,
                kind,
                text,
            } => {
                if let Some(slot) = self.annotation_slot(subject, *kind) {
                    *slot = Some(text.clone());
                }
            }
            Axiom::LicenseDecl { text } => self.license = Some(text.clone()),
        }
    }
}
