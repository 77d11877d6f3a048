use onto4mat::geom::{Paddock, Vec2};
use onto4mat::intent::{
    brief, decide, resolve_and_brief, resolve_intent, transition, Decision, IntentError,
    IntentRequest, MissionStatus,
};
use onto4mat::kbx::parse;
use onto4mat::model::load_builtin;
use onto4mat::reasoner::{classify, query, InferredModel};
use onto4mat::kbx::parse_expression;
use proptest::prelude::*;

fn request(text: &str) -> IntentRequest {
    IntentRequest {
        intent_text: text.into(),
        goal: Vec2::new(40.0, 40.0),
        flock_size: 20,
        paddock: Paddock { width: 50.0, height: 50.0 },
        max_steps: 5000,
        seed: 7,
    }
}

fn builtin() -> InferredModel {
    classify(&load_builtin()).unwrap()
}

#[test]
fn mustering_resolves_to_collect_and_drive() {
    let started = std::time::Instant::now();
    let (plan, b) = resolve_and_brief(&builtin(), &request("mustering")).unwrap();
    assert_eq!(plan.tactic, "mustering");
    assert_eq!(plan.intent, "mustering");
    assert_eq!(plan.behaviours, vec!["collect", "drive"]);
    assert_eq!(plan.status, MissionStatus::Briefed);
    assert!(b.narrative.contains("tactic: mustering"));
    assert!(b.narrative.contains("behaviours: collect, drive"));
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

const ONE_TACTIC: &str = r#"ontology "urn:one"
class Actions
class Tactic
prop tacticHasTask family does domain Tactic range Actions inverse taskForAgent
prop taskForAgent family does domain Actions range Tactic inverse tacticHasTask
ind collect : Actions
ind mustering : Tactic
fact collect taskForAgent mustering
"#;

#[test]
fn far_intent_names_the_closest_tactic() {
    let m = classify(&parse(ONE_TACTIC).unwrap()).unwrap();
    let err = resolve_intent(&m, &request("patrolling")).unwrap_err();
    let want = testkit::edit_distance("patrolling", "mustering");
    assert_eq!(
        err,
        IntentError::NoTacticMatch { closest: "mustering".into(), distance: want }
    );
    let near = resolve_intent(&m, &request("Musterin")).unwrap();
    assert_eq!(near.tactic, "mustering");
    assert_eq!(near.behaviours, vec!["collect"]);
}

#[test]
fn goal_outside_paddock_is_rejected() {
    let mut req = request("mustering");
    req.goal = Vec2::new(60.0, 10.0);
    assert!(matches!(
        resolve_intent(&builtin(), &req),
        Err(IntentError::GoalOutsidePaddock(_))
    ));
}

#[test]
fn brief_is_deterministic() {
    let m = builtin();
    let plan = resolve_intent(&m, &request("mustering")).unwrap();
    assert_eq!(brief(&plan, &m).unwrap(), brief(&plan, &m).unwrap());
}

#[test]
fn team_realization_follows_membership_count() {
    let started = std::time::Instant::now();
    let o = load_builtin();
    let m = classify(&o).unwrap();
    assert!(m.is_member("herd", "Team"));
    let team = parse_expression("min(2, teamHasAgent, Agent)").unwrap();
    assert!(query(&m, &team).unwrap().individuals.contains(&"herd".to_string()));

    let members: Vec<String> = m.objects("herd", "teamHasAgent").cloned().collect();
    assert!(members.len() >= 2);
    let keep = 1;
    let reduced = onto4mat::kb::Ontology::from_axiom_set(
        o.iri(),
        o.axioms().iter().filter(|a| match a {
            onto4mat::Axiom::PropertyAssertion { subject, relation, object } => {
                let drop = |s: &str, r: &str, t: &str| {
                    s == "herd" && r == "teamHasAgent" && members[keep..].iter().any(|x| x == t)
                };
                !(drop(subject, relation, object)
                    || (relation == "agentIsMemberOfTeam" && object == "herd" && members[keep..].contains(subject)))
            }
            _ => true,
        }).cloned(),
    )
    .unwrap();
    let m2 = classify(&reduced).unwrap();
    assert_eq!(m2.objects("herd", "teamHasAgent").count(), 1);
    assert!(!m2.is_member("herd", "Team"));
    assert!(!query(&m2, &team).unwrap().individuals.contains(&"herd".to_string()));
    assert!(started.elapsed().as_secs_f64() < 1.0);
}

#[derive(Debug, Clone)]
enum Op {
    Approve,
    Reject,
    To(MissionStatus),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::Approve),
        Just(Op::Reject),
        (0..MissionStatus::ALL.len()).prop_map(|i| Op::To(MissionStatus::ALL[i])),
    ]
}

const EDGES: [(MissionStatus, MissionStatus); 6] = [
    (MissionStatus::Draft, MissionStatus::Briefed),
    (MissionStatus::Briefed, MissionStatus::Approved),
    (MissionStatus::Briefed, MissionStatus::Rejected),
    (MissionStatus::Approved, MissionStatus::Running),
    (MissionStatus::Running, MissionStatus::Succeeded),
    (MissionStatus::Running, MissionStatus::Failed),
];

proptest! {
    #[test]
    fn status_machine_only_follows_edges(ops in proptest::collection::vec(op(), 0..20)) {
        let m = builtin();
        let mut plan = resolve_intent(&m, &request("mustering")).unwrap();
        let mut approved_seen = false;
        for op in ops {
            let before = plan.status;
            let next = match op {
                Op::Approve => decide(&plan, Decision::Approve),
                Op::Reject => decide(&plan, Decision::Reject),
                Op::To(s) => transition(&plan, s),
            };
            match next {
                Ok(p) => {
                    prop_assert!(EDGES.contains(&(before, p.status)));
                    plan = p;
                }
                Err(IntentError::InvalidStatus { from, .. }) => prop_assert_eq!(from, before),
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
            if plan.status == MissionStatus::Approved {
                approved_seen = true;
            }
            if plan.status == MissionStatus::Running {
                prop_assert!(approved_seen);
            }
        }
    }
}

#[test]
fn terminal_states_have_no_exits() {
    for s in MissionStatus::ALL {
        for t in MissionStatus::ALL {
            assert_eq!(s.can_become(t), EDGES.contains(&(s, t)));
            if s.is_terminal() {
                assert!(!s.can_become(t));
            }
        }
    }
}
