use onto4mat::kb::ClassExpression;
use onto4mat::reasoner::{classify, entails, query};
use rand::SeedableRng;
use testkit::{random_expression, random_kb, ChaCha8Rng, KbShape, Reference};

#[test]
fn classification_matches_reference_on_random_kbs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shape = KbShape::default();
    for round in 0..1500 {
        let o = random_kb(&mut rng, shape);
        let m = classify(&o).unwrap_or_else(|e| panic!("round {round}: {e}"));
        let r = Reference::build(&o);
        assert_eq!(m.subsumptions(), &r.subsumption_pairs(), "round {round}");
        let mut got = m.memberships().clone();
        for ind in o.individuals().keys() {
            got.entry(ind.clone()).or_default();
        }
        assert_eq!(got, r.memberships(), "round {round}");
        for a in &r.concepts {
            for b in &r.concepts {
                assert_eq!(
                    entails(&m, a, b).unwrap(),
                    m.subsumptions().contains(&(a.clone(), b.clone()))
                );
            }
        }
    }
}

#[test]
fn queries_match_reference_on_random_kbs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shape = KbShape::default();
    for round in 0..1000 {
        let o = random_kb(&mut rng, shape);
        let m = classify(&o).unwrap();
        let r = Reference::build(&o);
        let qshape = KbShape {
            concepts: r.concepts.len(),
            relations: o.relations().len().max(1),
            individuals: r.individuals.len(),
        };
        for _ in 0..4 {
            let e = random_expression(&mut rng, qshape, 3);
            if o.check_expression(&e).is_err() {
                continue;
            }
            let got = query(&m, &e).unwrap();
            assert_eq!(got.individuals, r.query(&e), "round {round}: {e}");
        }
    }
}

#[test]
fn query_rejects_unknown_concept() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let o = random_kb(&mut rng, KbShape::default());
    let m = classify(&o).unwrap();
    assert!(query(&m, &ClassExpression::named("Nowhere")).is_err());
    assert!(entails(&m, "Nowhere", "C0").is_err());
}

#[test]
fn generator_exercises_definitions_and_typing() {
    use onto4mat::kb::Axiom;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut defined_hits, mut inferred, mut inverse_facts) = (0, 0, 0);
    for _ in 0..500 {
        let o = random_kb(&mut rng, KbShape::default());
        let m = classify(&o).unwrap();
        let asserted = o
            .axioms()
            .iter()
            .filter(|a| matches!(a, Axiom::ClassAssertion { .. }))
            .count();
        let total: usize = m.memberships().values().map(|s| s.len()).sum();
        inferred += total.saturating_sub(asserted);
        let defined: Vec<_> = o
            .axioms()
            .iter()
            .filter_map(|a| match a {
                Axiom::EquivalentClass { class, .. } => Some(class.clone()),
                _ => None,
            })
            .collect();
        defined_hits += m
            .memberships()
            .values()
            .flatten()
            .filter(|c| defined.contains(c))
            .count();
        let facts = o
            .axioms()
            .iter()
            .filter(|a| matches!(a, Axiom::PropertyAssertion { .. }))
            .count();
        inverse_facts += m.materialized_facts().len().saturating_sub(facts);
    }
    assert!(defined_hits > 100, "{defined_hits}");
    assert!(inferred > 500, "{inferred}");
    assert!(inverse_facts > 100, "{inverse_facts}");
}
