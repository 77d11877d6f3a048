//! Fixtures shared by the benchmarks.

use onto4mat::geom::{Paddock, Vec2};
use onto4mat::intent::{decide, resolve_and_brief, Decision, IntentRequest, MissionPlan};
use onto4mat::model::load_builtin;
use onto4mat::reasoner::classify;

/// An approved mustering plan on the default 50 x 50 paddock.
pub fn approved_plan(seed: u64, sheep: u32) -> MissionPlan {
    let m = classify(&load_builtin()).expect("builtin classifies");
    let req = IntentRequest {
        intent_text: "mustering".into(),
        goal: Vec2::new(40.0, 40.0),
        flock_size: sheep,
        paddock: Paddock { width: 50.0, height: 50.0 },
        max_steps: 5000,
        seed,
    };
    let (plan, _) = resolve_and_brief(&m, &req).expect("mustering resolves");
    decide(&plan, Decision::Approve).expect("briefed plan approves")
}
