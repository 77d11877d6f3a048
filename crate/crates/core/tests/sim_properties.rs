use onto4mat::geom::{Paddock, Vec2};
use onto4mat::intent::{decide, resolve_and_brief, Decision, IntentRequest, MissionPlan, MissionStatus};
use onto4mat::model::load_builtin;
use onto4mat::reasoner::classify;
use onto4mat::sim::{
    self, export_trajectory, init, parse_trajectory, run_from, Behaviour, Frame, Outcome,
    SimConfig, SimDefaults, SimError, SimState,
};
use proptest::prelude::*;

fn plan(seed: u64, sheep: u32) -> MissionPlan {
    let m = classify(&load_builtin()).unwrap();
    let req = IntentRequest {
        intent_text: "mustering".into(),
        goal: Vec2::new(40.0, 40.0),
        flock_size: sheep,
        paddock: Paddock { width: 50.0, height: 50.0 },
        max_steps: 5000,
        seed,
    };
    let (p, _) = resolve_and_brief(&m, &req).unwrap();
    decide(&p, Decision::Approve).unwrap()
}

fn check_frames(cfg: &SimConfig, start: &SimState, frames: &[Frame]) {
    let v = testkit::frame_violations(cfg, start, frames);
    assert!(v.is_empty(), "{v:?}");
}

#[test]
fn default_missions_respect_invariants() {
    let defaults = SimDefaults::shipped();
    for seed in 0..4 {
        let (cfg, s0) = init(&plan(seed, 20), &defaults).unwrap();
        let (end, frames) = run_from(s0.clone(), &cfg).unwrap();
        check_frames(&cfg, &s0, &frames);
        assert!(end.complete);
        assert_ne!(end.outcome, Outcome::Pending);
    }
}

#[test]
fn same_seed_same_export() {
    let defaults = SimDefaults::shipped();
    let p = plan(3, 20);
    let (_, a) = sim::run(&p, &defaults).unwrap();
    let (_, b) = sim::run(&p, &defaults).unwrap();
    let text = export_trajectory(&a);
    assert_eq!(text, export_trajectory(&b));
    assert_eq!(parse_trajectory(&text).unwrap(), a);
}

#[test]
fn unapproved_plan_does_not_run() {
    let defaults = SimDefaults::shipped();
    let mut p = plan(1, 5);
    for status in MissionStatus::ALL {
        p.status = status;
        let r = sim::run(&p, &defaults);
        if status == MissionStatus::Approved {
            assert!(r.is_ok());
        } else {
            assert_eq!(r.unwrap_err(), SimError::PlanNotApproved(status));
        }
    }
}

#[test]
fn collect_only_plan_never_drives() {
    let defaults = SimDefaults::shipped();
    let mut p = plan(2, 20);
    p.behaviours = vec!["collect".into()];
    p.constraints.max_steps = 400;
    let (cfg, s0) = init(&p, &defaults).unwrap();
    let (_, frames) = run_from(s0.clone(), &cfg).unwrap();
    check_frames(&cfg, &s0, &frames);
    assert!(frames.iter().all(|f| f.behaviour != Behaviour::Drive));
    assert!(frames.iter().any(|f| f.behaviour == Behaviour::Collect));
}

#[test]
fn unknown_behaviour_is_refused() {
    let mut p = plan(2, 5);
    p.behaviours.push("herd-by-drone".into());
    assert!(matches!(
        sim::configure(&p, &SimDefaults::shipped()),
        Err(SimError::BehaviourUnknown(_))
    ));
}

/// One sheep, no noise, dog directly behind it: the dog holds the drive
/// offset while the sheep walks straight to the goal at unit speed.
#[test]
fn single_sheep_walks_straight_to_goal() {
    let mut cfg = SimDefaults::shipped().config_for(1).unwrap();
    cfg.sheep.w_noise = 0.0;
    cfg.goal = Vec2::new(15.0, 5.0);
    cfg.goal_radius = 1.0;
    cfg.dog.d_drive = 4.0;
    cfg.dog.approach_gap = 3.0;
    let s0 = SimState::with_positions(&cfg, vec![Vec2::new(5.0, 5.0)], Vec2::new(1.0, 5.0));
    let (end, frames) = run_from(s0, &cfg).unwrap();
    assert_eq!(end.outcome, Outcome::Succeeded);
    assert_eq!(frames.len(), 9);
    for f in &frames {
        let t = f.t as f64;
        assert!(f.sheep[0].dist(Vec2::new(5.0 + t, 5.0)) < 1e-9, "t={t}");
        assert!(f.dog.dist(Vec2::new(t, 5.0)) < 1e-9, "t={t}");
        assert_eq!(f.behaviour, Behaviour::Drive);
    }
}

#[test]
fn step_after_completion_fails() {
    let cfg = SimDefaults::shipped().config_for(1).unwrap();
    let mut s = SimState::with_positions(&cfg, vec![cfg.goal], Vec2::new(0.0, 0.0));
    s = sim::step(&s, &cfg).unwrap();
    assert!(s.complete);
    assert_eq!(sim::step(&s, &cfg).unwrap_err(), SimError::AlreadyComplete);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn short_runs_keep_invariants(seed in any::<u64>(), n in 1usize..12, collect_only in any::<bool>()) {
        let mut cfg = SimDefaults::shipped().config_for(n).unwrap();
        cfg.seed = seed;
        cfg.max_steps = 150;
        if collect_only {
            cfg.behaviours_allowed.remove(&Behaviour::Drive);
        }
        let s0 = sim::init_state(&cfg);
        let (_, frames) = run_from(s0.clone(), &cfg).unwrap();
        check_frames(&cfg, &s0, &frames);
    }
}
