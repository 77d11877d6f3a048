use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Name;

/// A class expression over named concepts and relations.
///
/// The `Display` form is the KBX expression syntax, e.g.
/// `and(Agent, some(teamDoesCollectiveAction, TeamActions), min(2, teamHasAgent, Agent))`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassExpression {
    Named(Name),
    And(Vec<ClassExpression>),
    Or(Vec<ClassExpression>),
    Some {
        relation: Name,
        filler: Box<ClassExpression>,
    },
    Min {
        n: u32,
        relation: Name,
        filler: Box<ClassExpression>,
    },
}

impl ClassExpression {
    pub fn named(name: impl Into<Name>) -> Self {
        ClassExpression::Named(name.into())
    }

    pub fn some(relation: impl Into<Name>, filler: ClassExpression) -> Self {
        ClassExpression::Some {
            relation: relation.into(),
            filler: Box::new(filler),
        }
    }

    pub fn min(n: u32, relation: impl Into<Name>, filler: ClassExpression) -> Self {
        ClassExpression::Min {
            n,
            relation: relation.into(),
            filler: Box::new(filler),
        }
    }

    /// Checks the structural constraints: `And`/`Or` take at least two
    /// operands and `Min` has `n >= 1`.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            ClassExpression::Named(_) => Ok(()),
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                if ops.len() < 2 {
                    return Err(format!("{} needs at least two operands", self.keyword()));
                }
                ops.iter().try_for_each(ClassExpression::validate)
            }
            ClassExpression::Some { filler, .. } => filler.validate(),
            ClassExpression::Min { n, filler, .. } => {
                if *n == 0 {
                    return Err("min cardinality must be at least 1".to_string());
                }
                filler.validate()
            }
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            ClassExpression::Named(_) => "named",
            ClassExpression::And(_) => "and",
            ClassExpression::Or(_) => "or",
            ClassExpression::Some { .. } => "some",
            ClassExpression::Min { .. } => "min",
        }
    }

    /// Concept names referenced anywhere in the expression.
    pub fn concepts(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| {
            if let ClassExpression::Named(c) = e {
                out.insert(c.as_str());
            }
        });
        out
    }

    /// Relation names referenced anywhere in the expression.
    pub fn relations(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.walk(&mut |e| match e {
            ClassExpression::Some { relation, .. } | ClassExpression::Min { relation, .. } => {
                out.insert(relation.as_str());
            }
            _ => {}
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ClassExpression)) {
        f(self);
        match self {
            ClassExpression::Named(_) => {}
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                ops.iter().for_each(|op| op.walk(f));
            }
            ClassExpression::Some { filler, .. } | ClassExpression::Min { filler, .. } => {
                filler.walk(f)
            }
        }
    }

    /// Returns a copy with every occurrence of concept `from` replaced by `to`.
    pub fn rename_concept(&self, from: &str, to: &str) -> ClassExpression {
        match self {
            ClassExpression::Named(c) if c == from => ClassExpression::Named(to.to_string()),
            ClassExpression::Named(_) => self.clone(),
            ClassExpression::And(ops) => {
                ClassExpression::And(ops.iter().map(|o| o.rename_concept(from, to)).collect())
            }
            ClassExpression::Or(ops) => {
                ClassExpression::Or(ops.iter().map(|o| o.rename_concept(from, to)).collect())
            }
            ClassExpression::Some { relation, filler } => ClassExpression::Some {
                relation: relation.clone(),
                filler: Box::new(filler.rename_concept(from, to)),
            },
            ClassExpression::Min {
                n,
                relation,
                filler,
            } => ClassExpression::Min {
                n: *n,
                relation: relation.clone(),
                filler: Box::new(filler.rename_concept(from, to)),
            },
        }
    }
}

impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpression::Named(c) => f.write_str(c),
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                write!(f, "{}(", self.keyword())?;
                for (i, op) in ops.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{op}")?;
                }
                f.write_str(")")
            }
            ClassExpression::Some { relation, filler } => write!(f, "some({relation}, {filler})"),
            ClassExpression::Min {
                n,
                relation,
                filler,
            } => write!(f, "min({n}, {relation}, {filler})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_uses_kbx_syntax() {
        let e = ClassExpression::And(vec![
            ClassExpression::named("Agent"),
            ClassExpression::min(2, "teamHasAgent", ClassExpression::named("Agent")),
        ]);
        assert_eq!(e.to_string(), "and(Agent, min(2, teamHasAgent, Agent))");
    }

    #[test]
    fn validate_rejects_degenerate_operators() {
        assert!(ClassExpression::And(vec![ClassExpression::named("A")])
            .validate()
            .is_err());
        assert!(
            ClassExpression::min(0, "r", ClassExpression::named("A"))
                .validate()
                .is_err()
        );
        assert!(ClassExpression::Or(vec![
            ClassExpression::named("A"),
            ClassExpression::named("B")
        ])
        .validate()
        .is_ok());
    }

    #[test]
    fn collects_referenced_names() {
        let e = ClassExpression::And(vec![
            ClassExpression::named("A"),
            ClassExpression::some("r", ClassExpression::min(1, "s", ClassExpression::named("B"))),
        ]);
        assert_eq!(e.concepts().into_iter().collect::<Vec<_>>(), vec!["A", "B"]);
        assert_eq!(e.relations().into_iter().collect::<Vec<_>>(), vec!["r", "s"]);
    }
}
