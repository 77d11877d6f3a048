use serde::Serialize;
use thiserror::Error;

use super::{KbError, Name, Ontology};

/// One violated ontology invariant, pointing at the offending axiom.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "kind")]
pub enum IntegrityError {
    #[error("axiom {axiom_index}: unresolved reference `{name}`")]
    UnresolvedReference { axiom_index: usize, name: Name },
    #[error("axiom {axiom_index}: `{name}` declared twice")]
    DuplicateDeclaration { axiom_index: usize, name: Name },
    #[error("axiom {axiom_index}: cycle through `{concept}`")]
    CycleIntroduced { axiom_index: usize, concept: Name },
    #[error("axiom {axiom_index}: `{relation}` names inverse `{inverse}` but `{inverse}` does not name it back")]
    InverseAsymmetry {
        axiom_index: usize,
        relation: Name,
        inverse: Name,
    },
    #[error("axiom {axiom_index}: {reason}")]
    InvalidAxiom { axiom_index: usize, reason: String },
    #[error("derived maps disagree with the axiom list")]
    DerivedMapMismatch,
}

impl IntegrityError {
    fn from_kb(axiom_index: usize, err: KbError) -> Self {
        match err {
            KbError::UnresolvedReference { name, .. } => {
                IntegrityError::UnresolvedReference { axiom_index, name }
            }
            KbError::DuplicateDeclaration(name) => {
                IntegrityError::DuplicateDeclaration { axiom_index, name }
            }
            KbError::CycleIntroduced { sub, .. } => IntegrityError::CycleIntroduced {
                axiom_index,
                concept: sub,
            },
            KbError::InverseConflict {
                relation, existing, ..
            } => IntegrityError::InverseAsymmetry {
                axiom_index,
                relation: existing,
                inverse: relation,
            },
            other => IntegrityError::InvalidAxiom {
                axiom_index,
                reason: other.to_string(),
            },
        }
    }
}

/// Replays the axiom list with full validation and reports every axiom that
/// would have been rejected. Empty iff all invariants hold.
pub fn check_integrity(o: &Ontology) -> Vec<IntegrityError> {
    let mut errors = Vec::new();
    let mut replay = Ontology::new(o.iri());
    for (i, ax) in o.axioms().iter().enumerate() {
        if let Err(e) = replay.apply(ax.clone()) {
            errors.push(IntegrityError::from_kb(i, e));
        }
    }
    if errors.is_empty() && replay != *o {
        errors.push(IntegrityError::DerivedMapMismatch);
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{Axiom, Family};

    #[test]
    fn asymmetric_inverse_reported_with_pair() {
        let o = Ontology::from_axioms_unchecked(
            "urn:t",
            [
                Axiom::declare_relation("r", Family::Has),
                Axiom::declare_relation("s", Family::PartOf),
                Axiom::declare_relation("t", Family::Is),
                Axiom::InverseOf {
                    relation: "r".into(),
                    inverse: "s".into(),
                },
                Axiom::InverseOf {
                    relation: "s".into(),
                    inverse: "t".into(),
                },
            ],
        );
        assert_eq!(
            check_integrity(&o),
            vec![IntegrityError::InverseAsymmetry {
                axiom_index: 4,
                relation: "r".into(),
                inverse: "s".into()
            }]
        );
    }

    #[test]
    fn fact_on_undeclared_individual() {
        let o = Ontology::from_axioms_unchecked(
            "urn:t",
            [
                Axiom::declare_relation("r", Family::Has),
                Axiom::declare_individual("a"),
                Axiom::fact("a", "r", "ghost"),
            ],
        );
        assert_eq!(
            check_integrity(&o),
            vec![IntegrityError::UnresolvedReference {
                axiom_index: 2,
                name: "ghost".into()
            }]
        );
    }

    #[test]
    fn well_formed_is_clean() {
        let o = Ontology::from_axioms(
            "urn:t",
            [
                Axiom::declare_class("A"),
                Axiom::declare_class("B"),
                Axiom::sub_class("B", "A"),
            ],
        )
        .unwrap();
        assert!(check_integrity(&o).is_empty());
    }
}
