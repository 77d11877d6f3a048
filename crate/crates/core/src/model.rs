//! The shipped Onto4MAT ontology, its meta-profile, and the conformance
//! report against the published summary statistics.

use serde::Serialize;

use crate::kb::{
    AnnotationKind, Axiom, ClassExpression, Datatype, Family, Literal, Metrics, Ontology,
};

pub const BUILTIN_IRI: &str = "urn:onto4mat";
pub const BUILTIN_LICENSE: &str = "CC-BY-4.0";

/// Canonical KBX text of [`load_builtin`].
pub const BUILTIN_KBX: &str = include_str!("../data/onto4mat.kbx");
/// Canonical meta-profile text of [`builtin_profile_text`].
pub const BUILTIN_META: &str = include_str!("../data/onto4mat.meta");

/// Published summary statistics, in [`Metrics::fields`] order.
pub const PUBLISHED_TARGET: Metrics = Metrics {
    axiom_count: 1060,
    logical_axiom_count: 562,
    class_count: 167,
    object_property_count: 57,
    data_property_count: 16,
    individual_count: 18,
    primitive_class_count: 231,
    defined_class_count: 30,
};

#[derive(Default)]
struct Builder {
    axioms: Vec<Axiom>,
}

impl Builder {
    fn annotate(&mut self, subject: &str, label: &str, comment: &str) {
        for (kind, text) in [(AnnotationKind::Label, label), (AnnotationKind::Comment, comment)] {
            self.axioms.push(Axiom::Annotation {
                subject: subject.into(),
                kind,
                text: text.into(),
            });
        }
    }

    fn class(&mut self, name: &str, parents: &[&str], label: &str, comment: &str) {
        self.axioms.push(Axiom::declare_class(name));
        for p in parents {
            self.axioms.push(Axiom::sub_class(name, *p));
        }
        self.annotate(name, label, comment);
    }

    fn defined(&mut self, name: &str, definition: ClassExpression, label: &str, comment: &str) {
        self.axioms.push(Axiom::declare_class(name));
        self.axioms.push(Axiom::EquivalentClass {
            class: name.into(),
            definition,
        });
        self.annotate(name, label, comment);
    }

    fn relation(&mut self, name: &str, family: Family, domain: &str, range: &str, label: &str, comment: &str) {
        self.axioms.push(Axiom::declare_relation(name, family));
        self.axioms.push(Axiom::DomainOf {
            relation: name.into(),
            concept: domain.into(),
        });
        self.axioms.push(Axiom::RangeOf {
            relation: name.into(),
            concept: range.into(),
        });
        self.annotate(name, label, comment);
    }

    /// Declares `forward` and `backward` with swapped domain/range and links them.
    #[allow(clippy::too_many_arguments)]
    fn pair(
        &mut self,
        forward: (&str, Family, &str, &str),
        backward: (&str, Family),
        labels: (&str, &str),
        comment: &str,
    ) {
        let (name, family, domain, range) = forward;
        self.relation(name, family, domain, range, labels.0, comment);
        self.relation(backward.0, backward.1, range, domain, labels.1, &format!("Inverse of {name}."));
        self.axioms.push(Axiom::InverseOf {
            relation: name.into(),
            inverse: backward.0.into(),
        });
    }

    fn attribute(&mut self, name: &str, domain: &str, datatype: Datatype, label: &str, comment: &str) {
        self.axioms.push(Axiom::declare_attribute(name, domain, datatype));
        self.annotate(name, label, comment);
    }

    fn individual(&mut self, name: &str, types: &[&str], label: &str, comment: &str) {
        self.axioms.push(Axiom::declare_individual(name));
        for t in types {
            self.axioms.push(Axiom::instance(name, *t));
        }
        self.annotate(name, label, comment);
    }

    fn fact(&mut self, s: &str, r: &str, o: &str) {
        self.axioms.push(Axiom::fact(s, r, o));
    }

    fn data(&mut self, s: &str, a: &str, value: Literal) {
        self.axioms.push(Axiom::DataAssertion {
            subject: s.into(),
            attribute: a.into(),
            value,
        });
    }
}

fn named(c: &str) -> ClassExpression {
    ClassExpression::named(c)
}

/// Builds the shipped ontology.
pub fn load_builtin() -> Ontology {
    let mut b = Builder::default();
    b.axioms.push(Axiom::LicenseDecl {
        text: BUILTIN_LICENSE.into(),
    });

    // Agents
    b.class("Agent", &[], "Agent", "An entity that perceives and acts within the shepherding task.");
    b.class("Shepherd", &["Agent"], "Shepherd", "The commander who states intent and approves missions.");
    b.class("Sheepdog", &["Agent"], "Sheepdog", "The swarm-control agent that influences the flock.");
    b.class("Sheep", &["Agent"], "Sheep", "A team-member agent guided by the sheepdog.");
    b.class("ArtificialAgent", &["Agent"], "Artificial agent", "A machine agent able to take a shepherding role.");
    b.class("UnmannedGroundVehicle", &["ArtificialAgent"], "Unmanned ground vehicle", "A ground robot agent.");
    b.class("UnmannedAerialVehicle", &["ArtificialAgent"], "Unmanned aerial vehicle", "An aerial robot agent.");
    b.defined(
        "ControllingAgent",
        ClassExpression::And(vec![
            named("Agent"),
            ClassExpression::some("agentDoesAnIndividualTactic", named("IndividualTactic")),
        ]),
        "Controlling agent",
        "An agent currently carrying out an individual tactic.",
    );

    // Abilities and traits
    b.class("AbilitiesTraits", &[], "Abilities and Traits", "Capabilities and dispositions an agent holds.");
    b.class("Ability", &["AbilitiesTraits"], "Ability", "Something an agent is able to do.");
    b.class("Perception", &["Ability"], "Perception", "Sensing the surroundings.");
    b.class("Communication", &["Ability"], "Communication", "Exchanging information with other agents.");
    b.class("Locomotion", &["Ability"], "Locomotion", "Moving through the environment.");
    b.class("Trait", &["AbilitiesTraits"], "Trait", "A disposition that shapes how an agent behaves.");
    b.class("Endurance", &["Trait"], "Endurance", "Capacity to sustain activity.");
    b.class("Cohesiveness", &["Trait"], "Cohesiveness", "Tendency to stay with the group.");
    b.class("Fearfulness", &["Trait"], "Fearfulness", "Tendency to flee from threats.");
    b.class("Obedience", &["Trait"], "Obedience", "Tendency to follow commands.");

    // Teams
    b.defined(
        "Team",
        ClassExpression::And(vec![
            named("Agent"),
            ClassExpression::some("teamDoesCollectiveAction", named("TeamActions")),
            ClassExpression::some("teamDoesCollectiveTactic", named("TeamTactic")),
            ClassExpression::min(2, "teamHasAgent", named("Agent")),
        ]),
        "Team",
        "An agent made of at least two member agents acting collectively.",
    );

    // Intent
    b.class("Intent", &[], "Intent", "The desired outcome stated by the commander.");
    b.class("Plan", &["Intent"], "Plan", "The ordered approach to realise an intent.");
    b.class("Goal", &["Intent"], "Goal", "The end state an intent aims at.");
    b.class("Task", &["Intent"], "Task", "A unit of work assigned in pursuit of an intent.");
    b.class("Scope", &["Intent"], "Scope", "The limits within which an intent applies.");

    // Actions
    b.class("Actions", &[], "Actions", "Behaviours agents perform.");
    b.class("IndividualActions", &["Actions"], "Individual actions", "Behaviours performed by a single agent.");
    b.class("SheepdogBehaviour", &["IndividualActions"], "Sheepdog behaviour", "A behaviour available to the sheepdog.");
    b.class("SheepBehaviour", &["IndividualActions"], "Sheep behaviour", "A behaviour available to a sheep.");
    b.class("TeamActions", &["Actions"], "Team actions", "Behaviours performed collectively by a team.");
    b.class("CollectiveMovement", &["TeamActions"], "Collective movement", "The team moving as one.");
    b.class("CollectiveGrazing", &["TeamActions"], "Collective grazing", "The team settling to graze.");
    b.defined(
        "TaskedAction",
        ClassExpression::And(vec![
            named("IndividualActions"),
            ClassExpression::some("taskForAgent", named("IndividualTactic")),
        ]),
        "Tasked action",
        "An individual action that serves some individual tactic.",
    );

    // Tactics
    b.class("Tactic", &[], "Tactic", "An organised composite of actions that achieves an intent.");
    b.class("IndividualTactic", &["Tactic"], "Individual tactic", "A tactic carried out by one agent.");
    b.class("BlockHold", &["IndividualTactic"], "Block hold", "Holding the flock in place by blocking its path.");
    b.class("CastMuster", &["IndividualTactic"], "Cast muster", "Casting around the flock and mustering it to a goal.");
    b.class("TeamTactic", &["Tactic"], "Team tactic", "A tactic carried out by a team.");
    b.class("Aggregation", &["TeamTactic"], "Aggregation", "Members drawing together.");
    b.class("Dispersion", &["TeamTactic"], "Dispersion", "Members spreading apart.");
    b.defined(
        "InfluencingTactic",
        ClassExpression::And(vec![
            named("IndividualTactic"),
            ClassExpression::some("individualTacticInfluencesTeam", named("Team")),
        ]),
        "Influencing tactic",
        "An individual tactic that influences some team.",
    );

    // Swarms
    b.class("Swarm", &[], "Swarm", "A team whose members synchronise their actions in space and time.");
    b.class("HeterogeneousSwarm", &["Swarm"], "Heterogeneous swarm", "A swarm of mixed agent types.");
    b.class("HomogeneousSwarm", &["Swarm"], "Homogeneous swarm", "A swarm of one agent type.");
    b.class("Configuration", &[], "Configuration", "How a swarm is arranged.");
    b.class("Formation", &["Configuration"], "Formation", "A spatial arrangement of swarm members.");
    b.class("Cluster", &["Formation"], "Cluster", "Members packed around a centre.");
    b.class("Line", &["Formation"], "Line", "Members arranged in a line.");
    b.class("Role", &["Configuration"], "Role", "A part an agent plays within a swarm.");
    b.class("Leader", &["Role"], "Leader", "The role that others follow.");
    b.class("Follower", &["Role"], "Follower", "The role that follows a leader.");
    b.class("AgentType", &["Configuration"], "Agent type", "The kind of agent filling a position.");
    b.class(
        "SynchronisationMechanism",
        &[],
        "Synchronisation mechanism",
        "The strategy a swarm uses to coordinate its members.",
    );
    b.class("SpatialSynchronisation", &["SynchronisationMechanism"], "Spatial synchronisation", "Coordination in space.");
    b.class("TemporalSynchronisation", &["SynchronisationMechanism"], "Temporal synchronisation", "Coordination in time.");

    // Environment
    b.class("Environment", &[], "Environment", "The surroundings in which agents act.");
    b.class("Paddock", &["Environment"], "Paddock", "The bounded area of the task.");
    b.class("Obstacle", &["Environment"], "Obstacle", "Something that impedes movement.");
    b.class("Fence", &["Obstacle"], "Fence", "A barrier along a boundary.");
    b.class("Gate", &["Obstacle"], "Gate", "An opening in a fence.");
    b.class("Watercourse", &["Obstacle"], "Watercourse", "A stream or channel.");

    use Family::*;
    b.pair(
        ("agentDoesAnIndividualTactic", Does, "Agent", "IndividualTactic"),
        ("individualTacticDoneByAgent", Does),
        ("agent does an individual tactic", "individual tactic done by agent"),
        "Links an agent to an individual tactic it performs.",
    );
    b.pair(
        ("agentDoesAnIndividualAction", Does, "Agent", "IndividualActions"),
        ("individualActionDoneByAgent", Does),
        ("agent does an individual action", "individual action done by agent"),
        "Links an agent to an individual action it performs.",
    );
    b.pair(
        ("teamDoesCollectiveAction", Does, "Team", "TeamActions"),
        ("collectiveActionDoneByTeam", Does),
        ("team does collective action", "collective action done by team"),
        "Links a team to a collective action it performs.",
    );
    b.pair(
        ("teamDoesCollectiveTactic", Does, "Team", "TeamTactic"),
        ("collectiveTacticDoneByTeam", Does),
        ("team does collective tactic", "collective tactic done by team"),
        "Links a team to a collective tactic it performs.",
    );
    b.pair(
        ("teamHasAgent", Has, "Team", "Agent"),
        ("agentIsMemberOfTeam", PartOf),
        ("team has agent", "agent is member of team"),
        "Links a team to a member agent.",
    );
    b.pair(
        ("agentHasAbilitiesTraits", Has, "Agent", "AbilitiesTraits"),
        ("abilitiesTraitsHeldByAgent", Is),
        ("agent has abilities and traits", "abilities and traits held by agent"),
        "Links an agent to an ability or trait it holds.",
    );
    b.pair(
        ("intentHasGoal", Has, "Intent", "Goal"),
        ("goalPartOfIntent", PartOf),
        ("intent has goal", "goal part of intent"),
        "Links an intent to its goal.",
    );
    b.pair(
        ("swarmHasConfiguration", Has, "Swarm", "Configuration"),
        ("configurationPartOfSwarm", PartOf),
        ("swarm has configuration", "configuration part of swarm"),
        "Links a swarm to its configuration.",
    );
    b.pair(
        ("agentLocatedInPaddock", PartOf, "Agent", "Paddock"),
        ("paddockContainsAgent", Has),
        ("agent located in paddock", "paddock contains agent"),
        "Links an agent to the paddock it is in.",
    );
    b.pair(
        ("shepherdControlsSheepdog", Controls, "Shepherd", "Sheepdog"),
        ("sheepdogControlledByShepherd", Controls),
        ("shepherd controls sheepdog", "sheepdog controlled by shepherd"),
        "Links a shepherd to a sheepdog under its command.",
    );
    b.pair(
        ("sheepdogControlsSwarm", Controls, "Sheepdog", "Swarm"),
        ("swarmControlledBySheepdog", Controls),
        ("sheepdog controls swarm", "swarm controlled by sheepdog"),
        "Links a sheepdog to the swarm it guides.",
    );
    b.pair(
        ("taskForAgent", Is, "IndividualActions", "IndividualTactic"),
        ("tacticHasTask", Has),
        ("task for agent", "tactic has task"),
        "Links a behaviour to the tactic it serves.",
    );
    b.pair(
        ("agentIsOfType", Is, "Agent", "AgentType"),
        ("agentTypeOfAgent", Is),
        ("agent is of type", "agent type of agent"),
        "Links an agent to its type.",
    );
    b.pair(
        ("roleIsAssignedToAgent", Is, "Role", "Agent"),
        ("agentIsAssignedRole", Is),
        ("role is assigned to agent", "agent is assigned role"),
        "Links a role to the agent holding it.",
    );
    b.pair(
        ("agentRecognisesAction", Does, "Agent", "Actions"),
        ("actionRecognisedByAgent", Is),
        ("agent recognises action", "action recognised by agent"),
        "Links an agent to an action it can recognise in others.",
    );
    b.pair(
        ("obstacleAffectsTactic", Affects, "Obstacle", "Tactic"),
        ("tacticAffectedByObstacle", Affects),
        ("obstacle affects tactic", "tactic affected by obstacle"),
        "Links an obstacle to a tactic it constrains.",
    );
    b.pair(
        ("environmentAffectsAgent", Affects, "Environment", "Agent"),
        ("agentAffectedByEnvironment", Affects),
        ("environment affects agent", "agent affected by environment"),
        "Links an environment to an agent acting in it.",
    );
    b.pair(
        ("individualTacticInfluencesTeam", Influences, "IndividualTactic", "Team"),
        ("teamInfluencedByIndividualTactic", Influences),
        ("individual tactic influences team", "team influenced by individual tactic"),
        "Links an individual tactic to the team it influences.",
    );
    b.pair(
        ("intentInfluencesTactic", Influences, "Intent", "Tactic"),
        ("tacticInfluencedByIntent", Influences),
        ("intent influences tactic", "tactic influenced by intent"),
        "Links an intent to the tactic chosen for it.",
    );
    b.pair(
        ("synchronisationMechanismInfluencesSwarm", Influences, "SynchronisationMechanism", "Swarm"),
        ("swarmInfluencedBySynchronisationMechanism", Influences),
        (
            "synchronisation mechanism influences swarm",
            "swarm influenced by synchronisation mechanism",
        ),
        "Links a synchronisation mechanism to the swarm using it.",
    );

    use Datatype as D;
    b.attribute("callSign", "Agent", D::String, "call sign", "Radio identifier of an agent.");
    b.attribute("agentSpeed", "Agent", D::Decimal, "agent speed", "Maximum speed in paddock units per step.");
    b.attribute("influenceRadius", "Sheepdog", D::Decimal, "influence radius", "Distance within which sheep react to the sheepdog.");
    b.attribute("repulsionRadius", "Sheep", D::Decimal, "repulsion radius", "Distance within which sheep repel each other.");
    b.attribute("isAutonomous", "ArtificialAgent", D::Boolean, "is autonomous", "Whether the agent acts without teleoperation.");
    b.attribute("flockSize", "Team", D::Integer, "flock size", "Number of member agents.");
    b.attribute("paddockWidth", "Paddock", D::Decimal, "paddock width", "Extent along the x axis.");
    b.attribute("paddockHeight", "Paddock", D::Decimal, "paddock height", "Extent along the y axis.");
    b.attribute("goalX", "Goal", D::Decimal, "goal x", "x coordinate of the goal location.");
    b.attribute("goalY", "Goal", D::Decimal, "goal y", "y coordinate of the goal location.");
    b.attribute("goalRadius", "Goal", D::Decimal, "goal radius", "Distance from the goal counted as arrival.");
    b.attribute("maxSteps", "Task", D::Integer, "max steps", "Step budget for a task.");
    b.attribute("priority", "Intent", D::Integer, "priority", "Relative importance of an intent.");
    b.attribute("formationSpacing", "Formation", D::Decimal, "formation spacing", "Distance between neighbours in a formation.");
    b.attribute("obstacleHeight", "Obstacle", D::Decimal, "obstacle height", "Height of an obstacle.");
    b.attribute("traitLevel", "Trait", D::Decimal, "trait level", "Strength of a trait between 0 and 1.");

    b.individual("commander", &["Shepherd"], "commander", "The human shepherd issuing intent.");
    b.individual("sheepdog", &["Sheepdog"], "sheepdog", "The sheepdog agent.");
    b.individual("ugv1", &["UnmannedGroundVehicle"], "ugv1", "A ground robot able to act as sheepdog.");
    b.individual("uav1", &["UnmannedAerialVehicle"], "uav1", "An aerial robot able to act as sheepdog.");
    b.individual("herd", &["Agent"], "herd", "The flock acting as a team.");
    for i in 1..=3 {
        let n = format!("sheep{i}");
        b.individual(&n, &["Sheep"], &n, "A member of the herd.");
    }
    b.individual("shepherding", &["IndividualTactic"], "shepherding", "The sheepdog's general tactic.");
    b.individual("mustering", &["CastMuster"], "mustering", "Gathering the flock and moving it to a goal.");
    b.individual("blocking", &["BlockHold"], "blocking", "Holding the flock away from an area.");
    b.individual("grouping", &["TeamTactic"], "grouping", "The herd keeping together.");
    b.individual("flocking", &["TeamActions"], "flocking", "The herd moving together.");
    b.individual("collect", &["SheepdogBehaviour"], "collect", "Fetching the sheep farthest from the flock.");
    b.individual("drive", &["SheepdogBehaviour"], "drive", "Pushing the flock towards the goal.");
    b.individual("musterGoal", &["Goal"], "muster goal", "The goal location of a muster.");
    b.individual("paddock1", &["Paddock"], "paddock1", "The paddock of the task.");
    b.individual("northFence", &["Fence"], "north fence", "The northern boundary fence.");

    b.fact("commander", "shepherdControlsSheepdog", "sheepdog");
    b.fact("sheepdog", "agentDoesAnIndividualTactic", "shepherding");
    b.fact("sheepdog", "agentDoesAnIndividualAction", "collect");
    b.fact("sheepdog", "agentDoesAnIndividualAction", "drive");
    b.fact("sheepdog", "agentLocatedInPaddock", "paddock1");
    b.fact("shepherding", "individualTacticInfluencesTeam", "herd");
    b.fact("herd", "teamDoesCollectiveAction", "flocking");
    b.fact("herd", "teamDoesCollectiveTactic", "grouping");
    for i in 1..=3 {
        b.fact("herd", "teamHasAgent", &format!("sheep{i}"));
    }
    b.fact("collect", "taskForAgent", "mustering");
    b.fact("drive", "taskForAgent", "mustering");
    b.fact("northFence", "obstacleAffectsTactic", "mustering");
    b.data("sheepdog", "callSign", Literal::String("Bluey".into()));
    b.data("sheepdog", "agentSpeed", Literal::Decimal(1.5));
    b.data("sheepdog", "influenceRadius", Literal::Decimal(15.0));
    b.data("herd", "flockSize", Literal::Integer(3));
    b.data("paddock1", "paddockWidth", Literal::Decimal(50.0));
    b.data("paddock1", "paddockHeight", Literal::Decimal(50.0));
    b.data("musterGoal", "goalX", Literal::Decimal(40.0));
    b.data("musterGoal", "goalY", Literal::Decimal(40.0));
    b.data("musterGoal", "goalRadius", Literal::Decimal(10.0));
    b.data("ugv1", "isAutonomous", Literal::Boolean(true));

    Ontology::from_axiom_set(BUILTIN_IRI, b.axioms).expect("builtin ontology is well-formed")
}

/// Meta-property assignments of the shipped ontology in profile syntax.
pub fn builtin_profile_text() -> String {
    let o = load_builtin();
    let m = crate::reasoner::classify(&o).expect("builtin ontology classifies");
    let below = |c: &str, root: &str| m.subsumptions().contains(&(c.to_string(), root.to_string()));
    let mut out = String::from("# OntoClean meta-properties for the shipped ontology\n");
    for c in o.concepts().keys() {
        let p = if below(c, "Role") {
            "R=~ I=- U=~ D=+"
        } else if c == "Configuration" {
            "R=+ I=- U=- D=-"
        } else if below(c, "AbilitiesTraits") {
            "R=+ I=- U=- D=+"
        } else if c == "ControllingAgent" {
            "R=~ I=+ U=+ D=+"
        } else if c == "Team" {
            "R=+ I=+ U=+ D=+"
        } else if c == "TaskedAction" || c == "InfluencingTactic" || c == "Shepherd" {
            "R=~ I=+ U=+ D=-"
        } else {
            "R=+ I=+ U=+ D=-"
        };
        out.push_str(&format!("meta {c} {p}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub axiom_count: i64,
    pub logical_axiom_count: i64,
    pub class_count: i64,
    pub object_property_count: i64,
    pub data_property_count: i64,
    pub individual_count: i64,
    pub primitive_class_count: i64,
    pub defined_class_count: i64,
}

impl Divergence {
    pub fn fields(&self) -> [(&'static str, i64); 8] {
        [
            ("axiom_count", self.axiom_count),
            ("logical_axiom_count", self.logical_axiom_count),
            ("class_count", self.class_count),
            ("object_property_count", self.object_property_count),
            ("data_property_count", self.data_property_count),
            ("individual_count", self.individual_count),
            ("primitive_class_count", self.primitive_class_count),
            ("defined_class_count", self.defined_class_count),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformanceReport {
    pub shipped: Metrics,
    pub target: Metrics,
    pub divergence: Divergence,
}

impl ConformanceReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<24}{:>10}{:>10}{:>12}\n", "metric", "shipped", "target", "divergence");
        let shipped = self.shipped.fields();
        let target = self.target.fields();
        for (i, (name, d)) in self.divergence.fields().iter().enumerate() {
            out.push_str(&format!("{:<24}{:>10}{:>10}{:>+12}\n", name, shipped[i].1, target[i].1, d));
        }
        out
    }
}

pub fn conformance(o: &Ontology) -> ConformanceReport {
    let shipped = o.metrics();
    let target = PUBLISHED_TARGET;
    let d = |a: u64, b: u64| a as i64 - b as i64;
    let divergence = Divergence {
        axiom_count: d(shipped.axiom_count, target.axiom_count),
        logical_axiom_count: d(shipped.logical_axiom_count, target.logical_axiom_count),
        class_count: d(shipped.class_count, target.class_count),
        object_property_count: d(shipped.object_property_count, target.object_property_count),
        data_property_count: d(shipped.data_property_count, target.data_property_count),
        individual_count: d(shipped.individual_count, target.individual_count),
        primitive_class_count: d(shipped.primitive_class_count, target.primitive_class_count),
        defined_class_count: d(shipped.defined_class_count, target.defined_class_count),
    };
    ConformanceReport {
        shipped,
        target,
        divergence,
    }
}
