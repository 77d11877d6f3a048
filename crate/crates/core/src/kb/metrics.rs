use serde::{Deserialize, Serialize};

use super::{ConceptKind, Ontology};

/// Summary counts of an ontology snapshot, computed by direct enumeration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub axiom_count: u64,
    pub logical_axiom_count: u64,
    pub class_count: u64,
    pub object_property_count: u64,
    pub data_property_count: u64,
    pub individual_count: u64,
    pub primitive_class_count: u64,
    pub defined_class_count: u64,
}

impl Metrics {
    pub fn of(o: &Ontology) -> Metrics {
        let count = |n: usize| n as u64;
        let kinds = |k: ConceptKind| count(o.concepts().values().filter(|c| c.kind == k).count());
        Metrics {
            axiom_count: count(o.axioms().len()),
            logical_axiom_count: count(o.axioms().iter().filter(|a| a.is_logical()).count()),
            class_count: count(o.concepts().len()),
            object_property_count: count(o.relations().len()),
            data_property_count: count(o.attributes().len()),
            individual_count: count(o.individuals().len()),
            primitive_class_count: kinds(ConceptKind::Primitive),
            defined_class_count: kinds(ConceptKind::Defined),
        }
    }

    /// Field values in a fixed order, paired with their names.
    pub fn fields(&self) -> [(&'static str, u64); 8] {
        [
            ("axiom_count", self.axiom_count),
            ("logical_axiom_count", self.logical_axiom_count),
            ("class_count", self.class_count),
            ("object_property_count", self.object_property_count),
            ("data_property_count", self.data_property_count),
            ("individual_count", self.individual_count),
            ("primitive_class_count", self.primitive_class_count),
            ("defined_class_count", self.defined_class_count),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{Axiom, ClassExpression, Family};

    #[test]
    fn empty_ontology_is_all_zero() {
        assert_eq!(Ontology::new("urn:e").metrics(), Metrics::default());
    }

    #[test]
    fn primitive_and_defined_split() {
        let o = Ontology::from_axioms(
            "urn:t",
            [
                Axiom::declare_class("Agent"),
                Axiom::declare_class("Team"),
                Axiom::declare_relation("teamHasAgent", Family::Has),
                Axiom::EquivalentClass {
                    class: "Team".into(),
                    definition: ClassExpression::And(vec![
                        ClassExpression::named("Agent"),
                        ClassExpression::min(2, "teamHasAgent", ClassExpression::named("Agent")),
                    ]),
                },
                Axiom::LicenseDecl { text: "x".into() },
            ],
        )
        .unwrap();
        let m = o.metrics();
        assert_eq!(m.class_count, 2);
        assert_eq!(m.primitive_class_count, 1);
        assert_eq!(m.defined_class_count, 1);
        assert_eq!(m.object_property_count, 1);
        assert_eq!(m.axiom_count, 5);
        assert_eq!(m.logical_axiom_count, 4);
    }
}
