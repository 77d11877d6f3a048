//! Classification, realization and closed-world queries.
//!
//! Semantics are closed-world with unique names: an individual satisfies
//! `some(r, C)` only if a materialized `r` fact points at a known member of
//! `C`, and `min(n, r, C)` counts distinct such objects.
//!
//! Subsumption rules:
//! - asserted `SubClassOf` edges,
//! - a defined class is subsumed by every named conjunct of its definition,
//! - reflexivity and transitivity.
//!
//! Union definitions take part in realization but add no subsumptions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::kb::{check_integrity, ClassExpression, ConceptKind, IntegrityError, Name, Ontology};

/// Concept whose members count as tactics.
pub const TACTIC_CONCEPT: &str = "Tactic";
/// Concept whose members count as behaviours.
pub const ACTION_CONCEPT: &str = "Actions";
/// Relation linking a behaviour to the tactic it serves (behaviour → tactic).
pub const TASK_RELATION: &str = "taskForAgent";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("ontology fails integrity checks ({} errors)", .0.len())]
    IntegrityFailure(Vec<IntegrityError>),
    #[error("unknown concept `{0}`")]
    UnknownConcept(Name),
    #[error("unresolved reference `{0}`")]
    UnresolvedReference(Name),
    #[error("unknown individual `{0}`")]
    UnknownIndividual(Name),
    #[error("`{0}` is not a tactic")]
    NotATactic(Name),
}

/// The result of classifying an ontology. Immutable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferredModel {
    base: Ontology,
    subsumptions: BTreeSet<(Name, Name)>,
    memberships: BTreeMap<Name, BTreeSet<Name>>,
    materialized_facts: BTreeSet<(Name, Name, Name)>,
    objects: BTreeMap<(Name, Name), BTreeSet<Name>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryResult {
    pub individuals: Vec<Name>,
    pub expression: ClassExpression,
}

impl InferredModel {
    pub fn base(&self) -> &Ontology {
        &self.base
    }

    /// `(sub, super)` pairs; reflexive and transitively closed.
    pub fn subsumptions(&self) -> &BTreeSet<(Name, Name)> {
        &self.subsumptions
    }

    /// Asserted plus inferred concept memberships of every individual.
    pub fn memberships(&self) -> &BTreeMap<Name, BTreeSet<Name>> {
        &self.memberships
    }

    /// Asserted facts plus inverse-derived facts as `(subject, relation, object)`.
    pub fn materialized_facts(&self) -> &BTreeSet<(Name, Name, Name)> {
        &self.materialized_facts
    }

    pub fn is_member(&self, individual: &str, concept: &str) -> bool {
        self.memberships
            .get(individual)
            .is_some_and(|s| s.contains(concept))
    }

    /// Objects `o` with a materialized fact `(subject, relation, o)`.
    pub fn objects(&self, subject: &str, relation: &str) -> impl Iterator<Item = &Name> {
        self.objects
            .get(&(subject.to_string(), relation.to_string()))
            .into_iter()
            .flatten()
    }

    /// Strict superconcepts of `concept`.
    pub fn superconcepts<'a>(&'a self, concept: &'a str) -> impl Iterator<Item = &'a Name> + 'a {
        self.subsumptions
            .range((concept.to_string(), String::new())..)
            .take_while(move |(sub, _)| sub == concept)
            .filter(move |(_, sup)| sup != concept)
            .map(|(_, sup)| sup)
    }

    fn satisfies(&self, individual: &str, e: &ClassExpression) -> bool {
        satisfies(individual, e, &self.memberships, &self.objects)
    }
}

fn satisfies(
    individual: &str,
    e: &ClassExpression,
    types: &BTreeMap<Name, BTreeSet<Name>>,
    objects: &BTreeMap<(Name, Name), BTreeSet<Name>>,
) -> bool {
    let fillers = |relation: &str| {
        objects
            .get(&(individual.to_string(), relation.to_string()))
            .into_iter()
            .flatten()
    };
    match e {
        ClassExpression::Named(c) => types.get(individual).is_some_and(|s| s.contains(c)),
        ClassExpression::And(ops) => ops.iter().all(|op| satisfies(individual, op, types, objects)),
        ClassExpression::Or(ops) => ops.iter().any(|op| satisfies(individual, op, types, objects)),
        ClassExpression::Some { relation, filler } => {
            fillers(relation).any(|o| satisfies(o, filler, types, objects))
        }
        ClassExpression::Min {
            n,
            relation,
            filler,
        } => {
            fillers(relation)
                .filter(|o| satisfies(o, filler, types, objects))
                .take(*n as usize)
                .count()
                == *n as usize
        }
    }
}

/// Named concepts a defined class is subsumed by through its definition.
fn definition_supers(def: &ClassExpression) -> Vec<&Name> {
    match def {
        ClassExpression::Named(c) => vec![c],
        ClassExpression::And(ops) => ops
            .iter()
            .filter_map(|op| match op {
                ClassExpression::Named(c) => Some(c),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Computes subsumption closure, materialized facts and memberships.
pub fn classify(o: &Ontology) -> Result<InferredModel, ReasonerError> {
    let errors = check_integrity(o);
    if !errors.is_empty() {
        return Err(ReasonerError::IntegrityFailure(errors));
    }

    let mut edges: BTreeMap<&Name, BTreeSet<&Name>> = BTreeMap::new();
    for c in o.concepts().values() {
        let out = edges.entry(&c.name).or_default();
        out.extend(c.parents.iter());
        if let Some(def) = &c.definition {
            out.extend(definition_supers(def));
        }
    }
    let mut supers: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
    let mut subsumptions = BTreeSet::new();
    for c in o.concepts().keys() {
        let mut seen: BTreeSet<&Name> = BTreeSet::new();
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(edges.get(x).into_iter().flatten().copied());
            }
        }
        for s in &seen {
            subsumptions.insert((c.clone(), (*s).clone()));
        }
        supers.insert(c.clone(), seen.into_iter().cloned().collect());
    }

    let mut materialized_facts = BTreeSet::new();
    for ind in o.individuals().values() {
        for (r, obj) in &ind.facts {
            materialized_facts.insert((ind.name.clone(), r.clone(), obj.clone()));
            if let Some(inv) = o.relation(r).and_then(|rel| rel.inverse.as_ref()) {
                materialized_facts.insert((obj.clone(), inv.clone(), ind.name.clone()));
            }
        }
    }
    let mut objects: BTreeMap<(Name, Name), BTreeSet<Name>> = BTreeMap::new();
    for (s, r, obj) in &materialized_facts {
        objects
            .entry((s.clone(), r.clone()))
            .or_default()
            .insert(obj.clone());
    }

    let mut types: BTreeMap<Name, BTreeSet<Name>> = o
        .individuals()
        .values()
        .map(|i| (i.name.clone(), i.types.clone()))
        .collect();
    // Domain/range typing: only single-concept, primitive domains and ranges.
    let typing_target = |set: &BTreeSet<Name>| -> Option<Name> {
        match set.iter().next() {
            Some(c) if set.len() == 1 && o.concept(c).is_some_and(|k| k.kind == ConceptKind::Primitive) => {
                Some(c.clone())
            }
            _ => None,
        }
    };
    for (s, r, obj) in &materialized_facts {
        let rel = o.relation(r).expect("integrity-checked");
        if let Some(d) = typing_target(&rel.domain) {
            types.get_mut(s).expect("integrity-checked").insert(d);
        }
        if let Some(rg) = typing_target(&rel.range) {
            types.get_mut(obj).expect("integrity-checked").insert(rg);
        }
    }

    let defined: Vec<(&Name, &ClassExpression)> = o
        .concepts()
        .values()
        .filter_map(|c| c.definition.as_ref().map(|d| (&c.name, d)))
        .collect();
    loop {
        for set in types.values_mut() {
            let closed: BTreeSet<Name> = set
                .iter()
                .flat_map(|c| supers.get(c).into_iter().flatten().cloned())
                .collect();
            set.extend(closed);
        }
        let mut additions = Vec::new();
        for (class, def) in &defined {
            for ind in o.individuals().keys() {
                if !types[ind].contains(*class) && satisfies(ind, def, &types, &objects) {
                    additions.push((ind.clone(), (*class).clone()));
                }
            }
        }
        if additions.is_empty() {
            break;
        }
        for (ind, class) in additions {
            types.get_mut(&ind).expect("known individual").insert(class);
        }
    }

    Ok(InferredModel {
        base: o.clone(),
        subsumptions,
        memberships: types,
        materialized_facts,
        objects,
    })
}

/// True iff `sub` is subsumed by `sup` in the model.
pub fn entails(m: &InferredModel, sub: &str, sup: &str) -> Result<bool, ReasonerError> {
    for c in [sub, sup] {
        if m.base.concept(c).is_none() {
            return Err(ReasonerError::UnknownConcept(c.to_string()));
        }
    }
    Ok(m.subsumptions.contains(&(sub.to_string(), sup.to_string())))
}

/// Individuals satisfying `e`, sorted ascending.
pub fn query(m: &InferredModel, e: &ClassExpression) -> Result<QueryResult, ReasonerError> {
    for c in e.concepts() {
        if m.base.concept(c).is_none() {
            return Err(ReasonerError::UnresolvedReference(c.to_string()));
        }
    }
    for r in e.relations() {
        if m.base.relation(r).is_none() {
            return Err(ReasonerError::UnresolvedReference(r.to_string()));
        }
    }
    let individuals = m
        .base
        .individuals()
        .keys()
        .filter(|i| m.satisfies(i, e))
        .cloned()
        .collect();
    Ok(QueryResult {
        individuals,
        expression: e.clone(),
    })
}

/// Behaviours (action individuals) linked to `tactic` through `taskForAgent`.
pub fn infer_behaviours_for_tactic(
    m: &InferredModel,
    tactic: &str,
) -> Result<BTreeSet<Name>, ReasonerError> {
    if m.base.individual(tactic).is_none() {
        return Err(ReasonerError::UnknownIndividual(tactic.to_string()));
    }
    if !m.is_member(tactic, TACTIC_CONCEPT) {
        return Err(ReasonerError::NotATactic(tactic.to_string()));
    }
    let Some(task) = m.base.relation(TASK_RELATION) else {
        return Ok(BTreeSet::new());
    };
    let linked: BTreeSet<Name> = match &task.inverse {
        Some(inv) => m.objects(tactic, inv).cloned().collect(),
        None => m
            .materialized_facts
            .iter()
            .filter(|(_, r, obj)| r == TASK_RELATION && obj == tactic)
            .map(|(s, _, _)| s.clone())
            .collect(),
    };
    Ok(linked
        .into_iter()
        .filter(|b| m.is_member(b, ACTION_CONCEPT))
        .collect())
}
