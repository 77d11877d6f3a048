//! Pitfall scanner for seven common ontology modelling defects.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::kb::{
    check_integrity, AnnotationKind, Axiom, Family, IntegrityError, KbError, Name, Ontology,
};
use crate::kbx::{self, KbxError};

/// Pre-remediation fixture containing at least one instance of every code.
pub const DIRTY_KBX: &str = include_str!("../data/dirty.kbx");
/// One line per injected defect: `<code> <subject> <fix> [args]`.
pub const DIRTY_MANIFEST: &str = include_str!("../data/dirty.manifest");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum LintCode {
    P4,
    P7,
    P8,
    P11,
    P13,
    P19,
    P41,
}

impl LintCode {
    pub const ALL: [LintCode; 7] = [
        LintCode::P4,
        LintCode::P7,
        LintCode::P8,
        LintCode::P11,
        LintCode::P13,
        LintCode::P19,
        LintCode::P41,
    ];

    pub fn severity(self) -> Severity {
        match self {
            LintCode::P19 => Severity::Critical,
            LintCode::P11 | LintCode::P41 => Severity::Important,
            LintCode::P4 | LintCode::P7 | LintCode::P8 | LintCode::P13 => Severity::Minor,
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            LintCode::P4 => "Creating unconnected ontology elements",
            LintCode::P7 => "Merging different concepts in the same class",
            LintCode::P8 => "Missing annotations",
            LintCode::P11 => "Missing domain or range in properties",
            LintCode::P13 => "Inverse relationships not explicitly declared",
            LintCode::P19 => "Defining multiple domains or ranges in properties",
            LintCode::P41 => "No license declared",
        }
    }

    pub fn parse(s: &str) -> Option<LintCode> {
        LintCode::ALL.into_iter().find(|c| c.to_string() == s)
    }
}

impl fmt::Display for LintCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Critical,
    Important,
    Minor,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Critical => "critical",
            Severity::Important => "important",
            Severity::Minor => "minor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LintFinding {
    pub code: LintCode,
    pub severity: Severity,
    pub subject: Name,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintReport {
    pub findings: Vec<LintFinding>,
    pub counts_by_code: BTreeMap<LintCode, usize>,
    pub total: usize,
}

impl LintReport {
    fn new(mut findings: Vec<LintFinding>) -> Self {
        findings.sort();
        let mut counts_by_code: BTreeMap<LintCode, usize> =
            LintCode::ALL.iter().map(|c| (*c, 0)).collect();
        for f in &findings {
            *counts_by_code.entry(f.code).or_default() += 1;
        }
        LintReport {
            total: findings.len(),
            findings,
            counts_by_code,
        }
    }

    pub fn has_critical(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Critical)
    }

    pub fn count(&self, code: LintCode) -> usize {
        self.counts_by_code.get(&code).copied().unwrap_or(0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for f in &self.findings {
            out.push_str(&format!("{} [{}] {}: {}\n", f.code, f.severity, f.subject, f.message));
        }
        let counts: Vec<String> = self
            .counts_by_code
            .iter()
            .map(|(c, n)| format!("{c}={n}"))
            .collect();
        out.push_str(&format!("total {} ({})\n", self.total, counts.join(" ")));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Error)]
pub enum LintError {
    #[error("ontology fails integrity checks ({} errors)", .0.len())]
    IntegrityFailure(Vec<IntegrityError>),
    #[error("fixture not found: {}", .0.display())]
    MissingFixture(PathBuf),
    #[error("fixture: {0}")]
    Fixture(#[from] KbxError),
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("remediation of `{subject}` failed: {source}")]
    Remediation { subject: Name, source: KbError },
}

/// Splits a CamelCase name into words; digits stay with the preceding word.
fn camel_words(name: &str) -> Vec<&str> {
    let mut words = Vec::new();
    let mut start = 0;
    for (i, c) in name.char_indices().skip(1) {
        if c.is_ascii_uppercase() || c == '_' {
            if i > start {
                words.push(&name[start..i]);
            }
            start = if c == '_' { i + 1 } else { i };
        }
    }
    if start < name.len() {
        words.push(&name[start..]);
    }
    words
}

fn merges_concepts(name: &str) -> bool {
    let words = camel_words(name);
    words.len() >= 3 && words[1..words.len() - 1].iter().any(|w| *w == "And" || *w == "Or")
}

/// Scans `o` for the seven pitfall codes.
pub fn scan(o: &Ontology) -> Result<LintReport, LintError> {
    let errors = check_integrity(o);
    if !errors.is_empty() {
        return Err(LintError::IntegrityFailure(errors));
    }
    let mut findings = Vec::new();
    let mut push = |code: LintCode, subject: &str, message: String| {
        findings.push(LintFinding {
            code,
            severity: code.severity(),
            subject: subject.to_string(),
            message,
        })
    };

    let mut connected: BTreeSet<&str> = BTreeSet::new();
    for c in o.concepts().values() {
        if !c.parents.is_empty() {
            connected.insert(&c.name);
            connected.extend(c.parents.iter().map(String::as_str));
        }
        if let Some(def) = &c.definition {
            connected.insert(&c.name);
            connected.extend(def.concepts());
        }
    }
    for r in o.relations().values() {
        connected.extend(r.domain.iter().chain(&r.range).map(String::as_str));
    }
    for a in o.attributes().values() {
        connected.insert(&a.domain);
    }
    for i in o.individuals().values() {
        connected.extend(i.types.iter().map(String::as_str));
    }

    for c in o.concepts().values() {
        if !connected.contains(c.name.as_str()) {
            push(LintCode::P4, &c.name, "concept is not connected to any other element".into());
        }
        if merges_concepts(&c.name) {
            push(LintCode::P7, &c.name, "name joins two concepts with And/Or".into());
        }
    }

    let annotations = o
        .concepts()
        .values()
        .map(|c| (&c.name, &c.label, &c.comment))
        .chain(o.relations().values().map(|r| (&r.name, &r.label, &r.comment)))
        .chain(o.attributes().values().map(|a| (&a.name, &a.label, &a.comment)))
        .chain(o.individuals().values().map(|i| (&i.name, &i.label, &i.comment)));
    for (name, label, comment) in annotations {
        let missing: Vec<&str> = [("label", label), ("comment", comment)]
            .into_iter()
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| k)
            .collect();
        if !missing.is_empty() {
            push(LintCode::P8, name, format!("missing {}", missing.join(" and ")));
        }
    }

    for r in o.relations().values() {
        let empty: Vec<&str> = [("domain", &r.domain), ("range", &r.range)]
            .into_iter()
            .filter(|(_, s)| s.is_empty())
            .map(|(k, _)| k)
            .collect();
        if !empty.is_empty() {
            push(LintCode::P11, &r.name, format!("no {} declared", empty.join(" and ")));
        }
        if r.inverse.is_none() {
            push(LintCode::P13, &r.name, "no inverse declared".into());
        }
        let multi: Vec<String> = [("domain", &r.domain), ("range", &r.range)]
            .into_iter()
            .filter(|(_, s)| s.len() >= 2)
            .map(|(k, s)| format!("{k} {{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", ")))
            .collect();
        if !multi.is_empty() {
            push(LintCode::P19, &r.name, format!("multiple members in {}", multi.join(" and ")));
        }
    }

    if o.license().is_none() {
        push(LintCode::P41, "ontology", "no license declared".into());
    }
    Ok(LintReport::new(findings))
}

/// Scans the shipped pre-remediation fixture.
pub fn scan_fixture_dirty() -> Result<LintReport, LintError> {
    scan(&kbx::parse(DIRTY_KBX)?)
}

/// Scans a fixture on disk.
pub fn scan_fixture_file(path: &Path) -> Result<LintReport, LintError> {
    let text = std::fs::read_to_string(path).map_err(|_| LintError::MissingFixture(path.to_path_buf()))?;
    scan(&kbx::parse(&text)?)
}

/// A documented fix for one finding. Variants are listed in application order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fix {
    Rename { to: Name },
    DomainRange { domain: Name, range: Name },
    Collapse { domain: Name, range: Name },
    Connect { parent: Name },
    Inverse { name: Name },
    Annotate,
    License { text: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub code: LintCode,
    pub subject: Name,
    pub fix: Fix,
}

/// Parses a remediation manifest. Blank lines and `#` comments are skipped.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, LintError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let bad = |reason: &str| LintError::Manifest {
            line,
            reason: reason.to_string(),
        };
        let words: Vec<&str> = s.split_whitespace().collect();
        if words.len() < 3 {
            return Err(bad("expected `<code> <subject> <fix> [args]`"));
        }
        let code = LintCode::parse(words[0]).ok_or_else(|| bad("unknown lint code"))?;
        let args = &words[3..];
        let two = |f: fn(Name, Name) -> Fix| match args {
            [a, b] => Ok(f(a.to_string(), b.to_string())),
            _ => Err(bad("expected two arguments")),
        };
        let fix = match words[2] {
            "rename" => match args {
                [to] => Fix::Rename { to: to.to_string() },
                _ => return Err(bad("rename takes one argument")),
            },
            "domain-range" => two(|domain, range| Fix::DomainRange { domain, range })?,
            "collapse" => two(|domain, range| Fix::Collapse { domain, range })?,
            "connect" => match args {
                [p] => Fix::Connect { parent: p.to_string() },
                _ => return Err(bad("connect takes one argument")),
            },
            "inverse" => match args {
                [n] => Fix::Inverse { name: n.to_string() },
                _ => return Err(bad("inverse takes one argument")),
            },
            "annotate" if args.is_empty() => Fix::Annotate,
            "license" => {
                let rest = s.splitn(4, char::is_whitespace).nth(3).unwrap_or("").trim();
                let text = rest
                    .strip_prefix('"')
                    .and_then(|r| r.strip_suffix('"'))
                    .ok_or_else(|| bad("license text must be quoted"))?;
                Fix::License { text: text.to_string() }
            }
            _ => return Err(bad("unknown fix")),
        };
        out.push(ManifestEntry {
            code,
            subject: words[1].to_string(),
            fix,
        });
    }
    Ok(out)
}

fn set_domain_range(axioms: &mut Vec<Axiom>, relation: &str, domain: &str, range: &str) {
    axioms.retain(|ax| {
        !matches!(ax, Axiom::DomainOf { relation: r, .. } | Axiom::RangeOf { relation: r, .. } if r == relation)
    });
    axioms.push(Axiom::DomainOf {
        relation: relation.into(),
        concept: domain.into(),
    });
    axioms.push(Axiom::RangeOf {
        relation: relation.into(),
        concept: range.into(),
    });
}

fn annotation(subject: &str, kind: AnnotationKind, text: String) -> Axiom {
    Axiom::Annotation {
        subject: subject.into(),
        kind,
        text,
    }
}

fn apply_fix(o: &Ontology, subject: &str, fix: &Fix) -> Result<Ontology, KbError> {
    let mut axioms = o.axioms().to_vec();
    match fix {
        Fix::Rename { to } => {
            axioms = axioms
                .iter()
                .map(|ax| ax.map_concepts(&|c: &str| if c == subject { to.clone() } else { c.to_string() }))
                .collect();
        }
        Fix::DomainRange { domain, range } | Fix::Collapse { domain, range } => {
            set_domain_range(&mut axioms, subject, domain, range)
        }
        Fix::Connect { parent } => axioms.push(Axiom::sub_class(subject, parent.as_str())),
        Fix::Inverse { name } => {
            let rel = o.relation(subject).ok_or_else(|| KbError::UnresolvedReference {
                name: subject.to_string(),
                expected: crate::kb::EntityKind::Relation,
            })?;
            let family: Family = rel.family;
            axioms.push(Axiom::declare_relation(name.as_str(), family));
            for d in &rel.range {
                axioms.push(Axiom::DomainOf {
                    relation: name.clone(),
                    concept: d.clone(),
                });
            }
            for r in &rel.domain {
                axioms.push(Axiom::RangeOf {
                    relation: name.clone(),
                    concept: r.clone(),
                });
            }
            axioms.push(annotation(name, AnnotationKind::Label, name.clone()));
            axioms.push(annotation(name, AnnotationKind::Comment, format!("Inverse of {subject}.")));
            axioms.push(Axiom::InverseOf {
                relation: subject.into(),
                inverse: name.clone(),
            });
        }
        Fix::Annotate => {
            let (label, comment) = annotation_state(o, subject);
            if !label {
                axioms.push(annotation(subject, AnnotationKind::Label, subject.to_string()));
            }
            if !comment {
                axioms.push(annotation(subject, AnnotationKind::Comment, format!("{subject}.")));
            }
        }
        Fix::License { text } => axioms.push(Axiom::LicenseDecl { text: text.clone() }),
    }
    Ontology::from_axiom_set(o.iri(), axioms)
}

fn annotation_state(o: &Ontology, subject: &str) -> (bool, bool) {
    if let Some(c) = o.concept(subject) {
        (c.label.is_some(), c.comment.is_some())
    } else if let Some(r) = o.relation(subject) {
        (r.label.is_some(), r.comment.is_some())
    } else if let Some(a) = o.attributes().get(subject) {
        (a.label.is_some(), a.comment.is_some())
    } else if let Some(i) = o.individual(subject) {
        (i.label.is_some(), i.comment.is_some())
    } else {
        (true, true)
    }
}

/// Applies every manifest fix, in [`Fix`] order, rebuilding after each one.
pub fn remediate(o: &Ontology, entries: &[ManifestEntry]) -> Result<Ontology, LintError> {
    let mut ordered: Vec<&ManifestEntry> = entries.iter().collect();
    ordered.sort_by(|a, b| a.fix.cmp(&b.fix).then_with(|| a.subject.cmp(&b.subject)));
    let mut current = o.clone();
    for e in ordered {
        current = apply_fix(&current, &e.subject, &e.fix).map_err(|source| LintError::Remediation {
            subject: e.subject.clone(),
            source,
        })?;
    }
    Ok(current)
}
