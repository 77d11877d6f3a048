//! Random knowledge bases and a brute-force reference evaluator.
//!
//! The evaluator works from the axiom list alone with dense matrices and
//! set extensions; it shares no code with the library reasoner.

use std::collections::{BTreeMap, BTreeSet};

use onto4mat::geom::Vec2;
use onto4mat::sim::{Behaviour, Frame, SimConfig, SimState};
use onto4mat::kb::{
    AnnotationKind, Axiom, ClassExpression, Datatype, Declaration, Family, Literal, Ontology,
};
use rand::seq::IndexedRandom;
use rand::Rng;

pub use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct KbShape {
    pub concepts: usize,
    pub relations: usize,
    pub individuals: usize,
}

impl Default for KbShape {
    fn default() -> Self {
        KbShape {
            concepts: 8,
            relations: 5,
            individuals: 6,
        }
    }
}

fn concept(i: usize) -> String {
    format!("C{i}")
}

fn relation(i: usize) -> String {
    format!("r{i}")
}

fn individual(i: usize) -> String {
    format!("i{i}")
}

pub fn random_expression(rng: &mut impl Rng, shape: KbShape, depth: u32) -> ClassExpression {
    if depth == 0 || rng.random_bool(0.35) {
        return ClassExpression::named(concept(rng.random_range(0..shape.concepts)));
    }
    match rng.random_range(0..4) {
        0 | 1 => {
            let n = rng.random_range(2..=3);
            let ops = (0..n).map(|_| random_expression(rng, shape, depth - 1)).collect();
            if rng.random_bool(0.7) {
                ClassExpression::And(ops)
            } else {
                ClassExpression::Or(ops)
            }
        }
        2 => ClassExpression::some(
            relation(rng.random_range(0..shape.relations)),
            random_expression(rng, shape, depth - 1),
        ),
        _ => ClassExpression::min(
            rng.random_range(1..=3),
            relation(rng.random_range(0..shape.relations)),
            random_expression(rng, shape, depth - 1),
        ),
    }
}

/// A random well-formed small KB. Axioms that the library rejects (cycles,
/// inverse conflicts, duplicates) are dropped during construction.
pub fn random_kb(rng: &mut impl Rng, max: KbShape) -> Ontology {
    let shape = KbShape {
        concepts: rng.random_range(1..=max.concepts),
        relations: rng.random_range(1..=max.relations),
        individuals: rng.random_range(1..=max.individuals),
    };
    let mut o = Ontology::new("urn:random");
    for c in 0..shape.concepts {
        push(&mut o, Axiom::declare_class(concept(c)));
    }
    for r in 0..shape.relations {
        let f = *Family::ALL.choose(rng).unwrap();
        push(&mut o, Axiom::declare_relation(relation(r), f));
    }
    for i in 0..shape.individuals {
        push(&mut o, Axiom::declare_individual(individual(i)));
    }
    for _ in 0..rng.random_range(0..=shape.concepts * 2) {
        let a = rng.random_range(0..shape.concepts);
        let b = rng.random_range(0..shape.concepts);
        push(&mut o, Axiom::sub_class(concept(a), concept(b)));
    }
    for c in 0..shape.concepts {
        if rng.random_bool(0.3) {
            let definition = random_expression(rng, shape, 2);
            push(
                &mut o,
                Axiom::EquivalentClass {
                    class: concept(c),
                    definition,
                },
            );
        }
    }
    for r in 0..shape.relations {
        for _ in 0..rng.random_range(0..=2) {
            let c = concept(rng.random_range(0..shape.concepts));
            push(&mut o, Axiom::DomainOf { relation: relation(r), concept: c });
        }
        for _ in 0..rng.random_range(0..=2) {
            let c = concept(rng.random_range(0..shape.concepts));
            push(&mut o, Axiom::RangeOf { relation: relation(r), concept: c });
        }
        if rng.random_bool(0.3) {
            let s = relation(rng.random_range(0..shape.relations));
            push(&mut o, Axiom::InverseOf { relation: relation(r), inverse: s });
        }
    }
    for i in 0..shape.individuals {
        for _ in 0..rng.random_range(0..=2) {
            let c = concept(rng.random_range(0..shape.concepts));
            push(&mut o, Axiom::instance(individual(i), c));
        }
    }
    for _ in 0..rng.random_range(0..=shape.individuals * 3) {
        let s = individual(rng.random_range(0..shape.individuals));
        let r = relation(rng.random_range(0..shape.relations));
        let t = individual(rng.random_range(0..shape.individuals));
        push(&mut o, Axiom::fact(s, r, t));
    }
    o
}

fn push(o: &mut Ontology, ax: Axiom) {
    if let Ok(next) = o.assert_axiom(ax) {
        *o = next;
    }
}

const WORDS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "sheep", "dog", "paddock", "goal"];

fn random_text(rng: &mut impl Rng) -> String {
    let mut s = String::new();
    for k in 0..rng.random_range(1..=4) {
        if k > 0 {
            s.push(' ');
        }
        s.push_str(WORDS.choose(rng).unwrap());
    }
    if rng.random_bool(0.2) {
        s.push_str(" \"quoted\"");
    }
    if rng.random_bool(0.2) {
        s.push_str(" back\\slash");
    }
    s
}

fn random_literal(rng: &mut impl Rng, dt: Datatype) -> Literal {
    match dt {
        Datatype::String => Literal::String(random_text(rng)),
        Datatype::Integer => Literal::Integer(rng.random_range(-1_000_000..1_000_000)),
        Datatype::Decimal => {
            let v: f64 = rng.random_range(-1.0e6..1.0e6);
            Literal::Decimal(if rng.random_bool(0.2) { v.trunc() } else { v })
        }
        Datatype::Boolean => Literal::Boolean(rng.random_bool(0.5)),
    }
}

/// A random KB plus attributes, data values, annotations and license, for
/// format round-trip checks.
pub fn random_rich_kb(rng: &mut impl Rng, max: KbShape) -> Ontology {
    let mut o = random_kb(rng, max);
    let concepts: Vec<String> = o.concepts().keys().cloned().collect();
    let individuals: Vec<String> = o.individuals().keys().cloned().collect();
    let types = [Datatype::String, Datatype::Integer, Datatype::Decimal, Datatype::Boolean];
    let mut attrs = Vec::new();
    for a in 0..rng.random_range(0..=3) {
        let dt = *types.choose(rng).unwrap();
        let name = format!("a{a}");
        push(
            &mut o,
            Axiom::declare_attribute(name.clone(), concepts.choose(rng).unwrap().clone(), dt),
        );
        attrs.push((name, dt));
    }
    for _ in 0..rng.random_range(0..=4) {
        if let (Some((a, dt)), Some(i)) = (attrs.choose(rng), individuals.choose(rng)) {
            let value = random_literal(rng, *dt);
            push(
                &mut o,
                Axiom::DataAssertion {
                    subject: i.clone(),
                    attribute: a.clone(),
                    value,
                },
            );
        }
    }
    let subjects: Vec<String> = o
        .concepts()
        .keys()
        .chain(o.relations().keys())
        .chain(o.attributes().keys())
        .chain(o.individuals().keys())
        .cloned()
        .collect();
    for s in &subjects {
        for kind in [AnnotationKind::Label, AnnotationKind::Comment] {
            if rng.random_bool(0.4) {
                let text = random_text(rng);
                push(&mut o, Axiom::Annotation { subject: s.clone(), kind, text });
            }
        }
    }
    if rng.random_bool(0.5) {
        let text = random_text(rng);
        push(&mut o, Axiom::LicenseDecl { text });
    }
    o
}

/// Reference results computed from the axiom list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    pub concepts: Vec<String>,
    pub individuals: Vec<String>,
    /// `sub[a][b]` iff concept a ⊑ concept b.
    pub sub: Vec<Vec<bool>>,
    /// `member[i][c]` iff individual i ∈ concept c.
    pub member: Vec<Vec<bool>>,
    facts: BTreeSet<(usize, String, usize)>,
}

impl Reference {
    pub fn build(o: &Ontology) -> Reference {
        let mut concepts = Vec::new();
        let mut individuals = Vec::new();
        let mut definitions: BTreeMap<String, ClassExpression> = BTreeMap::new();
        let mut sub_edges = Vec::new();
        let mut inverse_pairs = Vec::new();
        let mut domains: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut ranges: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut asserted_types = Vec::new();
        let mut raw_facts = Vec::new();
        for ax in o.axioms() {
            match ax {
                Axiom::Declaration(Declaration::Class { name }) => concepts.push(name.clone()),
                Axiom::Declaration(Declaration::Individual { name }) => individuals.push(name.clone()),
                Axiom::SubClassOf { sub, sup } => sub_edges.push((sub.clone(), sup.clone())),
                Axiom::EquivalentClass { class, definition } => {
                    definitions.insert(class.clone(), definition.clone());
                }
                Axiom::InverseOf { relation, inverse } => {
                    inverse_pairs.push((relation.clone(), inverse.clone()));
                    inverse_pairs.push((inverse.clone(), relation.clone()));
                }
                Axiom::DomainOf { relation, concept } => {
                    domains.entry(relation.clone()).or_default().push(concept.clone())
                }
                Axiom::RangeOf { relation, concept } => {
                    ranges.entry(relation.clone()).or_default().push(concept.clone())
                }
                Axiom::ClassAssertion { individual, concept } => {
                    asserted_types.push((individual.clone(), concept.clone()))
                }
                Axiom::PropertyAssertion { subject, relation, object } => {
                    raw_facts.push((subject.clone(), relation.clone(), object.clone()))
                }
                _ => {}
            }
        }
        let ci = |n: &str| concepts.iter().position(|c| c == n).unwrap();
        let ii = |n: &str| individuals.iter().position(|c| c == n).unwrap();
        let nc = concepts.len();
        let ni = individuals.len();

        let mut sub = vec![vec![false; nc]; nc];
        for (a, row) in sub.iter_mut().enumerate() {
            row[a] = true;
        }
        for (a, b) in &sub_edges {
            sub[ci(a)][ci(b)] = true;
        }
        for (c, def) in &definitions {
            let supers: Vec<&str> = match def {
                ClassExpression::Named(d) => vec![d.as_str()],
                ClassExpression::And(ops) => ops
                    .iter()
                    .filter_map(|op| match op {
                        ClassExpression::Named(d) => Some(d.as_str()),
                        _ => None,
                    })
                    .collect(),
                _ => vec![],
            };
            for d in supers {
                sub[ci(c)][ci(d)] = true;
            }
        }
        for k in 0..nc {
            for a in 0..nc {
                for b in 0..nc {
                    if sub[a][k] && sub[k][b] {
                        sub[a][b] = true;
                    }
                }
            }
        }

        let mut facts: BTreeSet<(usize, String, usize)> = BTreeSet::new();
        for (s, r, t) in &raw_facts {
            facts.insert((ii(s), r.clone(), ii(t)));
            for (x, y) in &inverse_pairs {
                if x == r {
                    facts.insert((ii(t), y.clone(), ii(s)));
                }
            }
        }

        let mut member = vec![vec![false; nc]; ni];
        for (i, c) in &asserted_types {
            member[ii(i)][ci(c)] = true;
        }
        let single_primitive = |set: Option<&Vec<String>>| -> Option<usize> {
            let set: BTreeSet<&String> = set?.iter().collect();
            if set.len() != 1 {
                return None;
            }
            let c = *set.iter().next().unwrap();
            (!definitions.contains_key(c)).then(|| ci(c))
        };
        for (s, r, t) in &facts {
            if let Some(d) = single_primitive(domains.get(r)) {
                member[*s][d] = true;
            }
            if let Some(g) = single_primitive(ranges.get(r)) {
                member[*t][g] = true;
            }
        }

        let mut reference = Reference {
            concepts: concepts.clone(),
            individuals,
            sub,
            member,
            facts,
        };
        loop {
            let mut changed = false;
            for i in 0..ni {
                for a in 0..nc {
                    if !reference.member[i][a] {
                        continue;
                    }
                    for b in 0..nc {
                        if reference.sub[a][b] && !reference.member[i][b] {
                            reference.member[i][b] = true;
                            changed = true;
                        }
                    }
                }
            }
            for (c, def) in &definitions {
                let ext = reference.extension(def);
                let col = ci(c);
                for i in ext {
                    if !reference.member[i][col] {
                        reference.member[i][col] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        reference
    }

    /// Set of individual indices satisfying `e` under current memberships.
    pub fn extension(&self, e: &ClassExpression) -> BTreeSet<usize> {
        let all: BTreeSet<usize> = (0..self.individuals.len()).collect();
        match e {
            ClassExpression::Named(c) => match self.concepts.iter().position(|x| x == c) {
                Some(col) => all.into_iter().filter(|i| self.member[*i][col]).collect(),
                None => BTreeSet::new(),
            },
            ClassExpression::And(ops) => ops
                .iter()
                .map(|op| self.extension(op))
                .fold(all, |acc, s| acc.intersection(&s).copied().collect()),
            ClassExpression::Or(ops) => ops
                .iter()
                .map(|op| self.extension(op))
                .fold(BTreeSet::new(), |acc, s| acc.union(&s).copied().collect()),
            ClassExpression::Some { relation, filler } => {
                let f = self.extension(filler);
                all.into_iter()
                    .filter(|i| {
                        self.facts
                            .iter()
                            .any(|(s, r, t)| s == i && r == relation && f.contains(t))
                    })
                    .collect()
            }
            ClassExpression::Min { n, relation, filler } => {
                let f = self.extension(filler);
                all.into_iter()
                    .filter(|i| {
                        let objs: BTreeSet<usize> = self
                            .facts
                            .iter()
                            .filter(|(s, r, t)| s == i && r == relation && f.contains(t))
                            .map(|(_, _, t)| *t)
                            .collect();
                        objs.len() >= *n as usize
                    })
                    .collect()
            }
        }
    }

    pub fn subsumption_pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (a, row) in self.sub.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                if v {
                    out.insert((self.concepts[a].clone(), self.concepts[b].clone()));
                }
            }
        }
        out
    }

    pub fn memberships(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.individuals
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let set = self
                    .concepts
                    .iter()
                    .enumerate()
                    .filter(|(c, _)| self.member[i][*c])
                    .map(|(_, n)| n.clone())
                    .collect();
                (name.clone(), set)
            })
            .collect()
    }

    pub fn query(&self, e: &ClassExpression) -> Vec<String> {
        self.extension(e)
            .into_iter()
            .map(|i| self.individuals[i].clone())
            .collect()
    }
}

/// Independent Levenshtein distance (full dynamic-programming table).
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

/// Containment, centre-of-mass, behaviour-gating and speed-bound checks on
/// a run's frames. Returns one message per violation.
pub fn frame_violations(cfg: &SimConfig, start: &SimState, frames: &[Frame]) -> Vec<String> {
    const EPS: f64 = 1e-9;
    let mut out = Vec::new();
    let inside = |p: Vec2| p.x >= 0.0 && p.y >= 0.0 && p.x <= cfg.paddock.width && p.y <= cfg.paddock.height;
    let mut prev_dog = start.dog;
    let mut prev_sheep = start.sheep.clone();
    for (k, f) in frames.iter().enumerate() {
        let t = f.t;
        if t != k as u64 + 1 {
            out.push(format!("frame {k} has t={t}"));
        }
        if f.sheep.len() != cfg.n_sheep {
            out.push(format!("t={t}: {} sheep", f.sheep.len()));
        }
        for (i, p) in f.sheep.iter().enumerate() {
            if !inside(*p) {
                out.push(format!("t={t}: sheep {i} at ({}, {}) outside paddock", p.x, p.y));
            }
            if let Some(q) = prev_sheep.get(i) {
                let d = ((p.x - q.x).powi(2) + (p.y - q.y).powi(2)).sqrt();
                if d > cfg.sheep.v_sheep + EPS {
                    out.push(format!("t={t}: sheep {i} moved {d}"));
                }
            }
        }
        if !inside(f.dog) {
            out.push(format!("t={t}: dog outside paddock"));
        }
        let d = ((f.dog.x - prev_dog.x).powi(2) + (f.dog.y - prev_dog.y).powi(2)).sqrt();
        if d > cfg.dog.v_dog + EPS {
            out.push(format!("t={t}: dog moved {d}"));
        }
        let n = f.sheep.len() as f64;
        let (sx, sy) = f.sheep.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
        if ((sx / n - f.gcm.x).powi(2) + (sy / n - f.gcm.y).powi(2)).sqrt() > EPS {
            out.push(format!("t={t}: gcm is not the sheep mean"));
        }
        if f.behaviour != Behaviour::Idle && !cfg.behaviours_allowed.contains(&f.behaviour) {
            out.push(format!("t={t}: behaviour {} not allowed", f.behaviour.as_str()));
        }
        if f.complete != (k + 1 == frames.len()) {
            out.push(format!("t={t}: complete flag {}", f.complete));
        }
        prev_dog = f.dog;
        prev_sheep = f.sheep.clone();
    }
    out
}
