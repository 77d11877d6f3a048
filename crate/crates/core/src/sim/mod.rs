//! Deterministic 2D shepherding simulator.
//!
//! Sheep react to the dog only inside `r_dog`: they flee it, move towards
//! the centre of their nearest neighbours, and keep some inertia and noise.
//! Outside `r_dog` a sheep moves only to get away from sheep closer than
//! `r_agent`. The dog collects the straggler farthest from the flock centre
//! until the flock is within `r_agent · N^(2/3)` of its centre, then drives
//! it from behind towards the goal.

mod config;

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{DogParams, SheepParams, SimConfig, SimDefaults, DEFAULTS_KBXSIM};

use crate::geom::Vec2;
use crate::intent::{MissionPlan, MissionStatus};

/// Identifier of the noise generator, recorded with missions for replay.
pub const RNG_ID: &str = "chacha8";

const DETOUR_ANGLE: f64 = std::f64::consts::PI / 12.0;
const DETOUR_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Behaviour {
    Collect,
    Drive,
    Idle,
}

impl Behaviour {
    pub fn as_str(self) -> &'static str {
        match self {
            Behaviour::Collect => "collect",
            Behaviour::Drive => "drive",
            Behaviour::Idle => "idle",
        }
    }

    /// Behaviours a plan may allow.
    pub fn parse_allowed(s: &str) -> Option<Behaviour> {
        match s {
            "collect" => Some(Behaviour::Collect),
            "drive" => Some(Behaviour::Drive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pending,
    Succeeded,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("mission is {0}, not approved")]
    PlanNotApproved(MissionStatus),
    #[error("behaviour `{0}` is not implemented by the simulator")]
    BehaviourUnknown(String),
    #[error("simulation already complete")]
    AlreadyComplete,
    #[error("invalid simulator config: {0}")]
    InvalidConfig(String),
    #[error("defaults line {line}: {reason}")]
    Defaults { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: u64,
    pub sheep: Vec<Vec2>,
    pub headings: Vec<Vec2>,
    pub dog: Vec2,
    pub active_behaviour: Behaviour,
    pub rng: ChaCha8Rng,
    pub complete: bool,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub t: u64,
    pub dog: Vec2,
    pub sheep: Vec<Vec2>,
    pub gcm: Vec2,
    pub behaviour: Behaviour,
    pub complete: bool,
}

impl SimState {
    /// A state with explicit positions, for scripted scenarios.
    pub fn with_positions(cfg: &SimConfig, sheep: Vec<Vec2>, dog: Vec2) -> SimState {
        SimState {
            t: 0,
            headings: vec![Vec2::ZERO; sheep.len()],
            sheep: sheep.into_iter().map(|p| cfg.paddock.clamp(p)).collect(),
            dog: cfg.paddock.clamp(dog),
            active_behaviour: Behaviour::Idle,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            complete: false,
            outcome: Outcome::Pending,
        }
    }

    pub fn gcm(&self) -> Vec2 {
        Vec2::mean(&self.sheep)
    }

    pub fn frame(&self) -> Frame {
        Frame {
            t: self.t,
            dog: self.dog,
            sheep: self.sheep.clone(),
            gcm: self.gcm(),
            behaviour: self.active_behaviour,
            complete: self.complete,
        }
    }
}

/// Builds the run config for an approved plan on top of `defaults`.
pub fn configure(plan: &MissionPlan, defaults: &SimDefaults) -> Result<SimConfig, SimError> {
    if plan.status != MissionStatus::Approved {
        return Err(SimError::PlanNotApproved(plan.status));
    }
    plan_config(plan, defaults)
}

/// The config `plan` would run with, regardless of its status.
pub fn plan_config(plan: &MissionPlan, defaults: &SimDefaults) -> Result<SimConfig, SimError> {
    let behaviours_allowed = plan
        .behaviours
        .iter()
        .map(|b| Behaviour::parse_allowed(b).ok_or_else(|| SimError::BehaviourUnknown(b.clone())))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let mut cfg = defaults.config_for(plan.flock.len())?;
    cfg.paddock = plan.constraints.paddock;
    cfg.goal = plan.goal;
    cfg.seed = plan.seed;
    cfg.max_steps = plan.constraints.max_steps;
    cfg.behaviours_allowed = behaviours_allowed;
    cfg.validate()?;
    Ok(cfg)
}

/// Seeded initial placement: sheep uniform in the quadrant farthest from the
/// goal, dog at the corner farthest from the goal.
pub fn init_state(cfg: &SimConfig) -> SimState {
    let (w, h) = (cfg.paddock.width, cfg.paddock.height);
    let far = |candidates: [Vec2; 4]| {
        let mut best = candidates[0];
        for c in &candidates[1..] {
            if c.dist(cfg.goal) > best.dist(cfg.goal) {
                best = *c;
            }
        }
        best
    };
    let quadrant = far([
        Vec2::new(0.0, 0.0),
        Vec2::new(w / 2.0, 0.0),
        Vec2::new(0.0, h / 2.0),
        Vec2::new(w / 2.0, h / 2.0),
    ]
    .map(|lo| lo + Vec2::new(w / 4.0, h / 4.0)))
        - Vec2::new(w / 4.0, h / 4.0);
    let corner = far([
        Vec2::new(0.0, 0.0),
        Vec2::new(w, 0.0),
        Vec2::new(0.0, h),
        Vec2::new(w, h),
    ]);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sheep = (0..cfg.n_sheep)
        .map(|_| {
            let x = rng.random::<f64>() * w / 2.0;
            let y = rng.random::<f64>() * h / 2.0;
            quadrant + Vec2::new(x, y)
        })
        .collect();
    let mut s = SimState::with_positions(cfg, sheep, corner);
    s.rng = rng;
    s
}

/// Configures and places a run for an approved plan.
pub fn init(plan: &MissionPlan, defaults: &SimDefaults) -> Result<(SimConfig, SimState), SimError> {
    let cfg = configure(plan, defaults)?;
    let s = init_state(&cfg);
    Ok((cfg, s))
}

fn min_distance(p: Vec2, sheep: &[Vec2]) -> f64 {
    sheep.iter().map(|s| s.dist(p)).fold(f64::INFINITY, f64::min)
}

/// The dog's mode and target for the given positions.
pub fn dog_plan(cfg: &SimConfig, sheep: &[Vec2]) -> (Behaviour, Option<Vec2>) {
    let gcm = Vec2::mean(sheep);
    let radius = cfg.cohesion_radius();
    let cohesive = sheep.iter().all(|p| p.dist(gcm) <= radius);
    if cohesive && cfg.behaviours_allowed.contains(&Behaviour::Drive) {
        let target = gcm + (gcm - cfg.goal).unit() * cfg.dog.d_drive;
        return (Behaviour::Drive, Some(target));
    }
    if cfg.behaviours_allowed.contains(&Behaviour::Collect) {
        let mut far = sheep[0];
        for p in &sheep[1..] {
            if p.dist(gcm) > far.dist(gcm) {
                far = *p;
            }
        }
        let target = far + (far - gcm).unit() * cfg.dog.d_collect;
        return (Behaviour::Collect, Some(target));
    }
    (Behaviour::Idle, None)
}

fn sheep_heading(cfg: &SimConfig, s: &SimState, i: usize, noise: Vec2) -> Option<Vec2> {
    let p = s.sheep[i];
    let sp = &cfg.sheep;
    let mut repel = Vec2::ZERO;
    for (j, q) in s.sheep.iter().enumerate() {
        if j != i && p.dist(*q) < sp.r_agent {
            repel += (p - *q).unit();
        }
    }
    let repel = repel.unit();
    let alerted = p.dist(s.dog) < sp.r_dog;
    if !alerted {
        return (repel != Vec2::ZERO).then_some(repel);
    }
    let mut others: Vec<(f64, Vec2)> = s
        .sheep
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, q)| (p.dist(*q), *q))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0));
    let near: Vec<Vec2> = others.iter().take(sp.n_neighbours).map(|(_, q)| *q).collect();
    let attract = if near.is_empty() {
        Vec2::ZERO
    } else {
        (Vec2::mean(&near) - p).unit()
    };
    let flee = (p - s.dog).unit();
    let h = s.headings[i] * sp.w_inertia
        + attract * sp.w_attract_lcm
        + repel * sp.w_repel_sheep
        + flee * sp.w_repel_dog
        + noise * sp.w_noise;
    let h = h.unit();
    (h != Vec2::ZERO).then_some(h)
}

/// Next dog position towards `target`. When the straight move would bring
/// the dog within `approach_gap` of a sheep it tries headings turned away
/// from the straight line, alternating sides in widening steps.
fn dog_move(cfg: &SimConfig, dog: Vec2, target: Vec2, sheep: &[Vec2]) -> Option<Vec2> {
    let to = target - dog;
    let d = to.norm();
    if d == 0.0 {
        return None;
    }
    let len = d.min(cfg.dog.v_dog);
    let now = min_distance(dog, sheep);
    let base = to.y.atan2(to.x);
    (0..=2 * DETOUR_STEPS)
        .map(|k| {
            let side = if k % 2 == 1 { 1.0 } else { -1.0 };
            base + side * k.div_ceil(2) as f64 * DETOUR_ANGLE
        })
        .map(|a| cfg.paddock.clamp(dog + Vec2::new(a.cos(), a.sin()) * len))
        .find(|p| {
            let then = min_distance(*p, sheep);
            then >= cfg.dog.approach_gap || then >= now
        })
}

/// Advances the simulation by one step. Sheep and dog update simultaneously
/// from the positions at the start of the step.
pub fn step(s: &SimState, cfg: &SimConfig) -> Result<SimState, SimError> {
    if s.complete {
        return Err(SimError::AlreadyComplete);
    }
    let mut next = s.clone();
    let noise: Vec<Vec2> = (0..s.sheep.len())
        .map(|_| {
            let a = next.rng.random::<f64>() * TAU;
            Vec2::new(a.cos(), a.sin())
        })
        .collect();
    for (i, n) in noise.into_iter().enumerate() {
        match sheep_heading(cfg, s, i, n) {
            Some(h) => {
                next.sheep[i] = cfg.paddock.clamp(s.sheep[i] + h * cfg.sheep.v_sheep);
                next.headings[i] = h;
            }
            None => next.headings[i] = Vec2::ZERO,
        }
    }

    let (behaviour, target) = dog_plan(cfg, &s.sheep);
    next.active_behaviour = behaviour;
    if let Some(target) = target {
        let target = cfg.paddock.clamp(target);
        if let Some(p) = dog_move(cfg, s.dog, target, &s.sheep) {
            next.dog = p;
        }
    }

    next.t += 1;
    if next.sheep.iter().all(|p| p.dist(cfg.goal) <= cfg.goal_radius) {
        next.complete = true;
        next.outcome = Outcome::Succeeded;
    } else if next.t >= cfg.max_steps {
        next.complete = true;
        next.outcome = Outcome::Failed;
    }
    Ok(next)
}

/// Steps `s` to completion, collecting one frame per step.
pub fn run_from(mut s: SimState, cfg: &SimConfig) -> Result<(SimState, Vec<Frame>), SimError> {
    let mut frames = Vec::new();
    while !s.complete {
        s = step(&s, cfg)?;
        frames.push(s.frame());
    }
    Ok((s, frames))
}

pub fn run(plan: &MissionPlan, defaults: &SimDefaults) -> Result<(SimState, Vec<Frame>), SimError> {
    let (cfg, s) = init(plan, defaults)?;
    run_from(s, &cfg)
}

/// One JSON object per line, fields in the order t, dog, sheep, gcm, behaviour, complete.
pub fn export_trajectory(frames: &[Frame]) -> String {
    let mut out = String::new();
    for f in frames {
        out.push_str(&serde_json::to_string(f).expect("frames serialize"));
        out.push('\n');
    }
    out
}

pub fn parse_trajectory(text: &str) -> Result<Vec<Frame>, serde_json::Error> {
    text.lines().map(serde_json::from_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SimConfig {
        SimDefaults::shipped().config().unwrap()
    }

    #[test]
    fn drive_target_is_behind_flock() {
        let mut c = cfg();
        c.goal = Vec2::new(10.0, 0.0);
        c.dog.d_drive = 2.0;
        c.paddock = crate::geom::Paddock { width: 100.0, height: 100.0 };
        let sheep = [Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0)];
        assert_eq!(dog_plan(&c, &sheep), (Behaviour::Drive, Some(Vec2::new(-2.0, 0.0))));
    }

    #[test]
    fn sheep_inside_goal_finish_in_one_step() {
        let c = cfg();
        let s = SimState::with_positions(&c, vec![c.goal; 3], Vec2::ZERO);
        let n = step(&s, &c).unwrap();
        assert!(n.complete);
        assert_eq!(n.outcome, Outcome::Succeeded);
        assert_eq!(n.t, 1);
        assert_eq!(step(&n, &c), Err(SimError::AlreadyComplete));
    }

    #[test]
    fn budget_exhaustion() {
        let mut c = cfg();
        c.max_steps = 1;
        let (s, frames) = run_from(init_state(&c), &c).unwrap();
        assert_eq!(s.outcome, Outcome::Failed);
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].t, 1);
    }

    #[test]
    fn export_roundtrip() {
        assert_eq!(export_trajectory(&[]), "");
        let mut c = cfg();
        c.max_steps = 3;
        let (_, frames) = run_from(init_state(&c), &c).unwrap();
        let text = export_trajectory(&frames);
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().next().unwrap().starts_with("{\"t\":1,\"dog\":"));
        assert_eq!(parse_trajectory(&text).unwrap(), frames);
    }

    #[test]
    fn placement_in_far_quadrant() {
        let c = cfg();
        let s = init_state(&c);
        assert_eq!(s.dog, Vec2::ZERO);
        assert!(s.sheep.iter().all(|p| p.x <= 25.0 && p.y <= 25.0));
        assert_eq!(s, init_state(&c));
    }
}
