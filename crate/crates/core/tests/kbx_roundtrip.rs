use onto4mat::kbx::{parse, parse_expression, serialize};
use onto4mat::model::load_builtin;
use proptest::prelude::*;
use rand::SeedableRng;
use testkit::{random_expression, random_rich_kb, ChaCha8Rng, KbShape};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_serialize_is_identity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = random_rich_kb(&mut rng, KbShape::default());
        let text = serialize(&o);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &o);
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back.metrics(), o.metrics());
    }

    #[test]
    fn expressions_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = random_expression(&mut rng, KbShape::default(), 4);
        prop_assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn metrics_ignore_axiom_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = random_rich_kb(&mut rng, KbShape::default());
        let mut axioms = o.axioms().to_vec();
        axioms.shuffle(&mut rng);
        let shuffled = onto4mat::kb::Ontology::from_axiom_set(o.iri(), axioms).unwrap();
        prop_assert_eq!(shuffled.metrics(), o.metrics());
        prop_assert_eq!(&shuffled, &o);
    }
}

#[test]
fn builtin_round_trips() {
    let o = load_builtin();
    assert_eq!(parse(&serialize(&o)).unwrap(), o);
}

#[test]
fn asserting_leaves_the_snapshot_untouched() {
    let o = load_builtin();
    let before = serialize(&o);
    let next = o
        .assert_axiom(onto4mat::kb::Axiom::declare_class("Extra"))
        .unwrap();
    assert_eq!(serialize(&o), before);
    assert!(next.concept("Extra").is_some());
    assert!(o.concept("Extra").is_none());
}

#[test]
fn syntax_errors_carry_a_line() {
    let err = parse("ontology \"urn:x\"\nclass A\nclass ???\n").unwrap_err();
    assert_eq!(err.line(), Some(3));
}
