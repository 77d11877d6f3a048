//! OntoClean meta-properties and taxonomy constraint checking.
//!
//! Profiles are sidecar text files, one line per concept:
//!
//! ```text
//! meta Agent R=+ I=+ U=+ D=-
//! meta Role  R=~ I=- U=~ D=+
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kb::Name;
use crate::reasoner::InferredModel;

/// Shipped profile with injected inconsistencies.
pub const DIRTY_META: &str = include_str!("../data/dirty.meta");
/// `violation RULE PARENT CHILD` and `fix meta ...` lines for [`DIRTY_META`].
pub const DIRTY_META_MANIFEST: &str = include_str!("../data/dirty.meta.manifest");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rigidity {
    #[serde(rename = "+R")]
    Rigid,
    #[serde(rename = "-R")]
    NonRigid,
    #[serde(rename = "~R")]
    AntiRigid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Identity {
    #[serde(rename = "+I")]
    Carries,
    #[serde(rename = "-I")]
    Lacks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Unity {
    #[serde(rename = "+U")]
    Unity,
    #[serde(rename = "-U")]
    NonUnity,
    #[serde(rename = "~U")]
    AntiUnity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dependence {
    #[serde(rename = "+D")]
    Dependent,
    #[serde(rename = "-D")]
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MetaProperties {
    pub rigidity: Rigidity,
    pub identity: Identity,
    pub unity: Unity,
    pub dependence: Dependence,
}

impl fmt::Display for MetaProperties {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = match self.rigidity {
            Rigidity::Rigid => '+',
            Rigidity::NonRigid => '-',
            Rigidity::AntiRigid => '~',
        };
        let i = match self.identity {
            Identity::Carries => '+',
            Identity::Lacks => '-',
        };
        let u = match self.unity {
            Unity::Unity => '+',
            Unity::NonUnity => '-',
            Unity::AntiUnity => '~',
        };
        let d = match self.dependence {
            Dependence::Dependent => '+',
            Dependence::Independent => '-',
        };
        write!(f, "R={r} I={i} U={u} D={d}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MetaProfile {
    pub assignments: BTreeMap<Name, MetaProperties>,
}

impl MetaProfile {
    /// Overrides this profile's assignments with those in `changes`.
    pub fn reassign(&mut self, changes: &MetaProfile) {
        for (c, p) in &changes.assignments {
            self.assignments.insert(c.clone(), *p);
        }
    }

    /// Canonical profile text, sorted by concept name.
    pub fn to_text(&self) -> String {
        self.assignments
            .iter()
            .map(|(c, p)| format!("meta {c} {p}\n"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntoCleanError {
    #[error("profile line {line}: {reason}")]
    ProfileParseError { line: usize, reason: String },
    #[error("profile line {line}: unknown value `{value}` for {field}")]
    UnknownValue {
        line: usize,
        field: char,
        value: String,
    },
    #[error("concepts without meta-properties: {}", .0.join(", "))]
    UncoveredConcepts(Vec<Name>),
    #[error("profile assigns unknown concepts: {}", .0.join(", "))]
    UnknownConcepts(Vec<Name>),
}

/// Parses `meta NAME R=<+|-|~> I=<+|-> U=<+|-|~> D=<+|->` lines.
pub fn load_profile(text: &str) -> Result<MetaProfile, OntoCleanError> {
    let mut assignments = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let bad = |reason: String| OntoCleanError::ProfileParseError { line, reason };
        let words: Vec<&str> = s.split_whitespace().collect();
        if words.len() != 6 || words[0] != "meta" {
            return Err(bad("expected `meta NAME R=.. I=.. U=.. D=..`".into()));
        }
        let name = words[1];
        if !crate::kb::is_valid_name(name) {
            return Err(bad(format!("invalid concept name `{name}`")));
        }
        let mut values: [Option<&str>; 4] = [None; 4];
        for w in &words[2..] {
            let (k, v) = w
                .split_once('=')
                .ok_or_else(|| bad(format!("expected KEY=VALUE, found `{w}`")))?;
            let slot = match k {
                "R" => 0,
                "I" => 1,
                "U" => 2,
                "D" => 3,
                _ => return Err(bad(format!("unknown meta-property `{k}`"))),
            };
            if values[slot].replace(v).is_some() {
                return Err(bad(format!("`{k}` given twice")));
            }
        }
        let unknown = |field: char, value: &str| OntoCleanError::UnknownValue {
            line,
            field,
            value: value.to_string(),
        };
        let [Some(r), Some(i), Some(u), Some(d)] = values else {
            unreachable!("four distinct keys fill four slots")
        };
        let props = MetaProperties {
            rigidity: match r {
                "+" => Rigidity::Rigid,
                "-" => Rigidity::NonRigid,
                "~" => Rigidity::AntiRigid,
                _ => return Err(unknown('R', r)),
            },
            identity: match i {
                "+" => Identity::Carries,
                "-" => Identity::Lacks,
                _ => return Err(unknown('I', i)),
            },
            unity: match u {
                "+" => Unity::Unity,
                "-" => Unity::NonUnity,
                "~" => Unity::AntiUnity,
                _ => return Err(unknown('U', u)),
            },
            dependence: match d {
                "+" => Dependence::Dependent,
                "-" => Dependence::Independent,
                _ => return Err(unknown('D', d)),
            },
        };
        if assignments.insert(name.to_string(), props).is_some() {
            return Err(bad(format!("`{name}` assigned twice")));
        }
    }
    Ok(MetaProfile { assignments })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "RIG")]
    Rig,
    #[serde(rename = "IDEN")]
    Iden,
    #[serde(rename = "UNI-a")]
    UniA,
    #[serde(rename = "UNI-b")]
    UniB,
    #[serde(rename = "DEP")]
    Dep,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::Rig, Rule::Iden, Rule::UniA, Rule::UniB, Rule::Dep];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::Rig => "RIG",
            Rule::Iden => "IDEN",
            Rule::UniA => "UNI-a",
            Rule::UniB => "UNI-b",
            Rule::Dep => "DEP",
        }
    }

    pub fn parse(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.as_str() == s)
    }

    /// Whether `child ⊑ parent` breaks this rule.
    pub fn violated(self, parent: &MetaProperties, child: &MetaProperties) -> bool {
        match self {
            Rule::Rig => parent.rigidity == Rigidity::AntiRigid && child.rigidity == Rigidity::Rigid,
            Rule::Iden => parent.identity == Identity::Carries && child.identity == Identity::Lacks,
            Rule::UniA => parent.unity == Unity::Unity && child.unity != Unity::Unity,
            Rule::UniB => parent.unity == Unity::AntiUnity && child.unity == Unity::Unity,
            Rule::Dep => {
                parent.dependence == Dependence::Dependent && child.dependence == Dependence::Independent
            }
        }
    }

    fn explain(self) -> &'static str {
        match self {
            Rule::Rig => "a rigid class cannot be subsumed by an anti-rigid class",
            Rule::Iden => "a class carrying identity cannot subsume one lacking identity",
            Rule::UniA => "a class carrying unity cannot subsume one without unity",
            Rule::UniB => "an anti-unity class cannot subsume a class carrying unity",
            Rule::Dep => "a dependent class cannot subsume an independent class",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct MetaViolation {
    pub rule: Rule,
    pub parent: Name,
    pub child: Name,
    pub explanation: String,
}

/// Checks every entailed strict subsumption of `m` against the five rules.
pub fn check(m: &InferredModel, p: &MetaProfile) -> Result<Vec<MetaViolation>, OntoCleanError> {
    let concepts = m.base().concepts();
    let unknown: Vec<Name> = p
        .assignments
        .keys()
        .filter(|c| !concepts.contains_key(*c))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(OntoCleanError::UnknownConcepts(unknown));
    }
    let uncovered: Vec<Name> = concepts
        .keys()
        .filter(|c| !p.assignments.contains_key(*c))
        .cloned()
        .collect();
    if !uncovered.is_empty() {
        return Err(OntoCleanError::UncoveredConcepts(uncovered));
    }
    let mut out = Vec::new();
    for (child, parent) in m.subsumptions() {
        if child == parent {
            continue;
        }
        let (pp, cp) = (&p.assignments[parent], &p.assignments[child]);
        for rule in Rule::ALL {
            if rule.violated(pp, cp) {
                out.push(MetaViolation {
                    rule,
                    parent: parent.clone(),
                    child: child.clone(),
                    explanation: format!("{child} ({cp}) under {parent} ({pp}): {}", rule.explain()),
                });
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn violations_to_text(v: &[MetaViolation]) -> String {
    let mut out: String = v
        .iter()
        .map(|x| format!("{} {} {}: {}\n", x.rule, x.parent, x.child, x.explanation))
        .collect();
    out.push_str(&format!("total {}\n", v.len()));
    out
}

pub fn violations_to_json(v: &[MetaViolation]) -> String {
    serde_json::to_string_pretty(&serde_json::json!({ "violations": v, "total": v.len() }))
        .expect("violations serialize")
}
