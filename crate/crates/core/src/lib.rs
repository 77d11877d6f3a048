//! Ontology engineering toolkit for swarm shepherding.
//!
//! - [`kb`]: ontology snapshots, axioms and integrity checks
//! - [`kbx`]: the KBX text format and JSON export
//! - [`reasoner`]: classification, realization and queries
//! - [`model`]: the shipped shepherding ontology and its conformance report
//! - [`lint`] and [`ontoclean`]: pitfall scanning and meta-property checks
//! - [`intent`]: intent resolution, briefs and the mission status machine
//! - [`sim`]: the seeded collect/drive simulator
pub mod geom;
pub mod intent;
pub mod kb;
pub mod kbx;
pub mod lint;
pub mod model;
pub mod ontoclean;
pub mod reasoner;
pub mod sim;

pub use geom::{Paddock, Vec2};
pub use intent::{MissionBrief, MissionPlan, MissionStatus};
pub use kb::{Axiom, ClassExpression, KbError, Metrics, Name, Ontology};
pub use reasoner::{classify, entails, infer_behaviours_for_tactic, query, InferredModel, ReasonerError};
pub use sim::{Frame, SimConfig, SimState};
