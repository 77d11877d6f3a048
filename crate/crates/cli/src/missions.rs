//! Mission operations shared by the CLI and the HTTP service.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use onto4mat::geom::Vec2;
use onto4mat::intent::{self, Decision, IntentError, IntentRequest, MissionStatus};
use onto4mat::kb::Ontology;
use onto4mat::kbx::{self, KbxError};
use onto4mat::lint::{self, LintReport};
use onto4mat::ontoclean::{self, MetaProfile, MetaViolation};
use onto4mat::reasoner::{self, InferredModel, QueryResult, ReasonerError};
use onto4mat::sim::{self, Frame, Outcome, SimConfig, SimDefaults, SimError, SimState};
use thiserror::Error;

use crate::store::{MissionRecord, Store, StoreError};

/// How a failure maps onto exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    BadRequest,
    NotFound,
    Conflict,
    Internal,
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Intent(#[from] IntentError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Kbx(#[from] KbxError),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    pub fn class(&self) -> ErrorClass {
        match self {
            ServiceError::Store(StoreError::NotFound(_)) => ErrorClass::NotFound,
            ServiceError::Store(StoreError::ConcurrentModification(_))
            | ServiceError::Store(StoreError::AlreadyExists(_)) => ErrorClass::Conflict,
            ServiceError::Store(_) | ServiceError::Internal(_) => ErrorClass::Internal,
            ServiceError::Intent(IntentError::InvalidStatus { .. })
            | ServiceError::Sim(SimError::PlanNotApproved(_))
            | ServiceError::Sim(SimError::AlreadyComplete) => ErrorClass::Conflict,
            ServiceError::Intent(_)
            | ServiceError::Sim(_)
            | ServiceError::Reasoner(_)
            | ServiceError::Kbx(_)
            | ServiceError::BadRequest(_) => ErrorClass::BadRequest,
        }
    }

    /// Short machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Store(e) => match e {
                StoreError::NotFound(_) => "NotFound",
                StoreError::SchemaViolation { .. } => "SchemaViolation",
                StoreError::ConcurrentModification(_) => "ConcurrentModification",
                StoreError::AlreadyExists(_) => "AlreadyExists",
                StoreError::Io(_) => "Io",
            },
            ServiceError::Intent(e) => match e {
                IntentError::NoTacticMatch { .. } => "NoTacticMatch",
                IntentError::NoTactics => "NoTactics",
                IntentError::EmptyBehaviourSet(_) => "EmptyBehaviourSet",
                IntentError::GoalOutsidePaddock(_) => "GoalOutsidePaddock",
                IntentError::InvalidRequest(_) => "InvalidRequest",
                IntentError::InvalidStatus { .. } => "InvalidStatus",
                IntentError::Reasoner(_) => "Reasoner",
            },
            ServiceError::Sim(e) => match e {
                SimError::PlanNotApproved(_) => "PlanNotApproved",
                SimError::BehaviourUnknown(_) => "BehaviourUnknown",
                SimError::AlreadyComplete => "AlreadyComplete",
                SimError::InvalidConfig(_) | SimError::Defaults { .. } => "InvalidConfig",
            },
            ServiceError::Reasoner(_) => "Reasoner",
            ServiceError::Kbx(_) => "ParseError",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Internal(_) => "Internal",
        }
    }
}

/// Intent request in the units both surfaces accept.
#[derive(Debug, Clone)]
pub struct IntentInput {
    pub intent: String,
    pub goal: Vec2,
    pub sheep: u32,
    pub seed: Option<u64>,
}

/// A run that has been moved to `running` and is ready to step.
pub struct StartedRun {
    pub record: MissionRecord,
    pub config: SimConfig,
    pub state: SimState,
}

/// Ontology snapshot, its inferred model, simulator defaults and a store.
#[derive(Clone)]
pub struct Service {
    ontology: Arc<Ontology>,
    model: Arc<InferredModel>,
    defaults: Arc<SimDefaults>,
    profile: Option<Arc<MetaProfile>>,
    store: Store,
}

impl Service {
    pub fn new(ontology: Ontology, defaults: SimDefaults, store: Store) -> Result<Service, ServiceError> {
        let model = reasoner::classify(&ontology)?;
        Ok(Service {
            ontology: Arc::new(ontology),
            model: Arc::new(model),
            defaults: Arc::new(defaults),
            profile: None,
            store,
        })
    }

    /// Attaches the OntoClean profile used by [`Service::validate`].
    pub fn with_profile(mut self, profile: MetaProfile) -> Service {
        self.profile = Some(Arc::new(profile));
        self
    }

    /// Lint report plus OntoClean violations when a profile is attached.
    pub fn validate(&self) -> Result<(LintReport, Option<Vec<MetaViolation>>), ServiceError> {
        let report = lint::scan(&self.ontology).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let meta = match &self.profile {
            Some(p) => Some(
                ontoclean::check(&self.model, p).map_err(|e| ServiceError::BadRequest(e.to_string()))?,
            ),
            None => None,
        };
        Ok((report, meta))
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn model(&self) -> &InferredModel {
        &self.model
    }

    pub fn defaults(&self) -> &SimDefaults {
        &self.defaults
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// Resolves and briefs an intent, storing a briefed mission record.
    pub fn resolve(&self, input: &IntentInput) -> Result<MissionRecord, ServiceError> {
        let base = self.defaults.config_for(input.sheep as usize)?;
        let req = IntentRequest {
            intent_text: input.intent.clone(),
            goal: input.goal,
            flock_size: input.sheep,
            paddock: base.paddock,
            max_steps: base.max_steps,
            seed: input.seed.unwrap_or(base.seed),
        };
        let (plan, brief) = intent::resolve_and_brief(&self.model, &req)?;
        let config = sim::plan_config(&plan, &self.defaults)?;
        let rec = MissionRecord::new(plan, brief, config);
        self.store.create(&rec)?;
        Ok(rec)
    }

    pub fn get(&self, id: &str) -> Result<MissionRecord, ServiceError> {
        Ok(self.store.load(id)?)
    }

    pub fn decide(&self, id: &str, decision: Decision) -> Result<MissionRecord, ServiceError> {
        let mut rec = self.store.load(id)?;
        rec.plan = intent::decide(&rec.plan, decision)?;
        Ok(self.store.update(&rec)?)
    }

    /// Checks the approval gate and moves the mission to `running`.
    pub fn start_run(&self, id: &str) -> Result<StartedRun, ServiceError> {
        let mut rec = self.store.load(id)?;
        let (config, state) = sim::init(&rec.plan, &self.defaults)?;
        rec.plan = intent::transition(&rec.plan, MissionStatus::Running)?;
        rec.config = config.clone();
        self.store.set_live(id, true);
        match self.store.update(&rec) {
            Ok(record) => Ok(StartedRun { record, config, state }),
            Err(e) => {
                self.store.set_live(id, false);
                Err(e.into())
            }
        }
    }

    /// Writes the trajectory and records the outcome of a finished run.
    pub fn finish_run(
        &self,
        mut rec: MissionRecord,
        end: &SimState,
        frames: &[Frame],
        export: Option<&Path>,
    ) -> Result<MissionRecord, ServiceError> {
        let id = rec.id().to_string();
        let result = (|| {
            let path: PathBuf = export.map(Path::to_path_buf).unwrap_or_else(|| self.store.trajectory_path(&id));
            std::fs::write(&path, sim::export_trajectory(frames)).map_err(StoreError::from)?;
            let to = match end.outcome {
                Outcome::Succeeded => MissionStatus::Succeeded,
                _ => MissionStatus::Failed,
            };
            rec.plan = intent::transition(&rec.plan, to)?;
            rec.trajectory_path = Some(path);
            rec.notes.push(format!("{} after {} steps", to, end.t));
            Ok(self.store.update(&rec)?)
        })();
        self.store.set_live(&id, false);
        result
    }

    /// Runs an approved mission to completion on the calling thread.
    pub fn run_blocking(&self, id: &str, export: Option<&Path>) -> Result<MissionRecord, ServiceError> {
        let started = self.start_run(id)?;
        let (end, frames) = match sim::run_from(started.state, &started.config) {
            Ok(r) => r,
            Err(e) => {
                self.store.set_live(id, false);
                return Err(e.into());
            }
        };
        self.finish_run(started.record, &end, &frames, export)
    }

    /// Evaluates a KBX class expression. With a mission id, the query runs
    /// against the ontology extended with that mission's flock.
    pub fn query(&self, expr: &str, mission: Option<&str>) -> Result<QueryResult, ServiceError> {
        let e = kbx::parse_expression(expr).map_err(KbxError::from)?;
        match mission {
            None => Ok(reasoner::query(&self.model, &e)?),
            Some(id) => {
                let rec = self.store.load(id)?;
                let o = intent::mission_ontology(&self.ontology, &rec.plan)
                    .map_err(|err| ServiceError::Internal(err.to_string()))?;
                let m = reasoner::classify(&o)?;
                Ok(reasoner::query(&m, &e)?)
            }
        }
    }
}
