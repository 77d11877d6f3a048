//! Commander intent → mission plan → brief → approval.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{Paddock, Vec2};
use crate::kb::{Axiom, KbError, Literal, Name, Ontology};
use crate::reasoner::{infer_behaviours_for_tactic, InferredModel, ReasonerError, TACTIC_CONCEPT};

/// Largest edit distance accepted between an intent and a tactic name.
pub const MATCH_THRESHOLD: usize = 2;
/// Boundary-proximity radius used when no individual states an influence radius.
pub const DEFAULT_INFLUENCE_RADIUS: f64 = 15.0;
const INFLUENCE_ATTRIBUTE: &str = "influenceRadius";
const OBSTACLE_CONCEPT: &str = "Obstacle";
const SHEEP_CONCEPT: &str = "Sheep";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntentRequest {
    pub intent_text: String,
    pub goal: Vec2,
    pub flock_size: u32,
    pub paddock: Paddock,
    pub max_steps: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MissionStatus {
    Draft,
    Briefed,
    Approved,
    Rejected,
    Running,
    Succeeded,
    Failed,
}

impl MissionStatus {
    pub const ALL: [MissionStatus; 7] = [
        MissionStatus::Draft,
        MissionStatus::Briefed,
        MissionStatus::Approved,
        MissionStatus::Rejected,
        MissionStatus::Running,
        MissionStatus::Succeeded,
        MissionStatus::Failed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MissionStatus::Draft => "draft",
            MissionStatus::Briefed => "briefed",
            MissionStatus::Approved => "approved",
            MissionStatus::Rejected => "rejected",
            MissionStatus::Running => "running",
            MissionStatus::Succeeded => "succeeded",
            MissionStatus::Failed => "failed",
        }
    }

    /// The only legal edges of the mission state machine.
    pub fn can_become(self, next: MissionStatus) -> bool {
        use MissionStatus::*;
        matches!(
            (self, next),
            (Draft, Briefed)
                | (Briefed, Approved)
                | (Briefed, Rejected)
                | (Approved, Running)
                | (Running, Succeeded)
                | (Running, Failed)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            MissionStatus::Rejected | MissionStatus::Succeeded | MissionStatus::Failed
        )
    }
}

impl fmt::Display for MissionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub paddock: Paddock,
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionPlan {
    pub id: String,
    pub intent_text: String,
    pub intent: Name,
    pub tactic: Name,
    pub behaviours: Vec<Name>,
    pub goal: Vec2,
    pub flock: Vec<Name>,
    pub constraints: Constraints,
    pub seed: u64,
    pub status: MissionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferredSummary {
    pub tactic: Name,
    pub behaviours: Vec<Name>,
    pub goal: Vec2,
    pub flock_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionBrief {
    pub plan_id: String,
    pub narrative: String,
    pub inferred: InferredSummary,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Approve,
    Reject,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntentError {
    #[error("no tactic matches the intent; closest is `{closest}` at distance {distance}")]
    NoTacticMatch { closest: Name, distance: usize },
    #[error("the ontology declares no tactics")]
    NoTactics,
    #[error("tactic `{0}` has no linked behaviours")]
    EmptyBehaviourSet(Name),
    #[error("goal ({}, {}) lies outside the paddock", .0.x, .0.y)]
    GoalOutsidePaddock(Vec2),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("cannot move mission from {from} to {to}")]
    InvalidStatus {
        from: MissionStatus,
        to: MissionStatus,
    },
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

/// Lowercases, collapses runs of non-alphanumerics to one space, trims.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut gap = false;
    for c in text.chars() {
        if c.is_alphanumeric() {
            if gap && !out.is_empty() {
                out.push(' ');
            }
            gap = false;
            out.extend(c.to_lowercase());
        } else {
            gap = true;
        }
    }
    out
}

/// Tactic individuals of `m` with their normalized edit distance to `intent`,
/// closest first; ties broken by name.
pub fn rank_tactics(m: &InferredModel, intent: &str) -> Vec<(Name, usize)> {
    let wanted = normalize(intent);
    let mut ranked: Vec<(Name, usize)> = m
        .memberships()
        .iter()
        .filter(|(_, types)| types.contains(TACTIC_CONCEPT))
        .map(|(name, _)| (name.clone(), strsim::levenshtein(&wanted, &normalize(name))))
        .collect();
    ranked.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

fn validate_request(req: &IntentRequest) -> Result<(), IntentError> {
    let p = req.paddock;
    if !(p.width.is_finite() && p.height.is_finite() && p.width > 0.0 && p.height > 0.0) {
        return Err(IntentError::InvalidRequest("paddock must have positive size".into()));
    }
    if req.flock_size == 0 {
        return Err(IntentError::InvalidRequest("flock size must be at least 1".into()));
    }
    if req.max_steps == 0 {
        return Err(IntentError::InvalidRequest("max_steps must be at least 1".into()));
    }
    if !req.goal.is_finite() || !p.contains(req.goal) {
        return Err(IntentError::GoalOutsidePaddock(req.goal));
    }
    Ok(())
}

/// Resolves `req` to a draft plan with a fresh random id.
pub fn resolve_intent(m: &InferredModel, req: &IntentRequest) -> Result<MissionPlan, IntentError> {
    resolve_intent_with_id(m, req, uuid::Uuid::new_v4().simple().to_string())
}

pub fn resolve_intent_with_id(
    m: &InferredModel,
    req: &IntentRequest,
    id: String,
) -> Result<MissionPlan, IntentError> {
    validate_request(req)?;
    let (tactic, distance) = rank_tactics(m, &req.intent_text)
        .into_iter()
        .next()
        .ok_or(IntentError::NoTactics)?;
    if distance > MATCH_THRESHOLD {
        return Err(IntentError::NoTacticMatch {
            closest: tactic,
            distance,
        });
    }
    let behaviours: Vec<Name> = infer_behaviours_for_tactic(m, &tactic)?.into_iter().collect();
    if behaviours.is_empty() {
        return Err(IntentError::EmptyBehaviourSet(tactic));
    }
    Ok(MissionPlan {
        id,
        intent_text: req.intent_text.clone(),
        intent: tactic.clone(),
        tactic,
        behaviours,
        goal: req.goal,
        flock: (1..=req.flock_size).map(|i| format!("sheep{i}")).collect(),
        constraints: Constraints {
            paddock: req.paddock,
            max_steps: req.max_steps,
        },
        seed: req.seed,
        status: MissionStatus::Draft,
    })
}

/// Moves `plan` along one edge of the state machine.
pub fn transition(plan: &MissionPlan, to: MissionStatus) -> Result<MissionPlan, IntentError> {
    if !plan.status.can_become(to) {
        return Err(IntentError::InvalidStatus {
            from: plan.status,
            to,
        });
    }
    if to == MissionStatus::Briefed && plan.behaviours.is_empty() {
        return Err(IntentError::EmptyBehaviourSet(plan.tactic.clone()));
    }
    Ok(MissionPlan {
        status: to,
        ..plan.clone()
    })
}

fn influence_radius(m: &InferredModel) -> f64 {
    m.base()
        .individuals()
        .values()
        .flat_map(|i| i.data.iter())
        .find_map(|(a, v)| match (a.as_str(), v) {
            (INFLUENCE_ATTRIBUTE, Literal::Decimal(r)) => Some(*r),
            _ => None,
        })
        .unwrap_or(DEFAULT_INFLUENCE_RADIUS)
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

/// Deterministic a-priori explanation of `plan`.
pub fn brief(plan: &MissionPlan, m: &InferredModel) -> Result<MissionBrief, IntentError> {
    if !matches!(plan.status, MissionStatus::Draft | MissionStatus::Briefed) {
        return Err(IntentError::InvalidStatus {
            from: plan.status,
            to: MissionStatus::Briefed,
        });
    }
    let p = plan.constraints.paddock;
    let goal = format!("({}, {})", fmt_num(plan.goal.x), fmt_num(plan.goal.y));
    let flock = match plan.flock.as_slice() {
        [] => "none".to_string(),
        [one] => one.clone(),
        [first, .., last] => format!("{first}..{last}"),
    };
    let mut narrative = String::new();
    narrative.push_str(&format!("intent: \"{}\" resolved to {}\n", plan.intent_text, plan.intent));
    narrative.push_str(&format!("tactic: {}\n", plan.tactic));
    narrative.push_str(&format!("behaviours: {}\n", plan.behaviours.join(", ")));
    narrative.push_str(&format!("goal: {goal}\n"));
    narrative.push_str(&format!("flock_size: {} ({flock})\n", plan.flock.len()));
    narrative.push_str(&format!("paddock: {} x {}\n", fmt_num(p.width), fmt_num(p.height)));
    narrative.push_str(&format!("max_steps: {}\n", plan.constraints.max_steps));
    narrative.push_str(&format!("seed: {}\n", plan.seed));

    let mut warnings = Vec::new();
    let obstacles: Vec<&Name> = m
        .memberships()
        .iter()
        .filter(|(_, t)| t.contains(OBSTACLE_CONCEPT))
        .map(|(n, _)| n)
        .collect();
    if !obstacles.is_empty() {
        let names: Vec<&str> = obstacles.iter().map(|s| s.as_str()).collect();
        warnings.push(format!(
            "obstacles present ({}); they are not simulated",
            names.join(", ")
        ));
    }
    let radius = influence_radius(m);
    let edge = p.edge_distance(plan.goal);
    if edge < radius {
        warnings.push(format!(
            "goal is {} from the paddock boundary, within the sheepdog influence radius {}",
            fmt_num(edge),
            fmt_num(radius)
        ));
    }
    for w in &warnings {
        narrative.push_str(&format!("warning: {w}\n"));
    }
    Ok(MissionBrief {
        plan_id: plan.id.clone(),
        narrative,
        inferred: InferredSummary {
            tactic: plan.tactic.clone(),
            behaviours: plan.behaviours.clone(),
            goal: plan.goal,
            flock_size: plan.flock.len(),
        },
        warnings,
    })
}

/// Resolves, briefs and marks the plan briefed.
pub fn resolve_and_brief(
    m: &InferredModel,
    req: &IntentRequest,
) -> Result<(MissionPlan, MissionBrief), IntentError> {
    let draft = resolve_intent(m, req)?;
    let b = brief(&draft, m)?;
    Ok((transition(&draft, MissionStatus::Briefed)?, b))
}

/// Records the human decision on a briefed plan.
pub fn decide(plan: &MissionPlan, decision: Decision) -> Result<MissionPlan, IntentError> {
    if plan.status != MissionStatus::Briefed {
        return Err(IntentError::InvalidStatus {
            from: plan.status,
            to: match decision {
                Decision::Approve => MissionStatus::Approved,
                Decision::Reject => MissionStatus::Rejected,
            },
        });
    }
    transition(
        plan,
        match decision {
            Decision::Approve => MissionStatus::Approved,
            Decision::Reject => MissionStatus::Rejected,
        },
    )
}

/// `base` extended with the plan's flock as individuals typed Sheep.
pub fn mission_ontology(base: &Ontology, plan: &MissionPlan) -> Result<Ontology, KbError> {
    let mut o = base.clone();
    for sheep in &plan.flock {
        if o.individual(sheep).is_none() {
            o = o.assert_axiom(Axiom::declare_individual(sheep.as_str()))?;
        }
        o = o.assert_axiom(Axiom::instance(sheep.as_str(), SHEEP_CONCEPT))?;
    }
    Ok(o)
}
