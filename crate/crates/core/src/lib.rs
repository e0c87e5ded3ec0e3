//! Evaluation nets (E-nets): definition, simulation and state-space analysis,
//! plus the risk-analysis pipeline driven by the built-in `EN_Def` model.
//!
//! * [`net`], [`marking`], [`token`], [`procedure`], [`sim`]: the formalism and the token game.
//! * [`dsl`]: the `.enet` text format.
//! * [`analysis`]: reachability graphs and the property checks run over them.
//! * [`risk`]: assets, threats, vulnerabilities, scored risks and treatment plans.
//! * [`endef`]: the `EN_Def` defining-subsystem net and its session runner.

pub mod analysis;
pub mod dsl;
pub mod endef;
pub mod marking;
pub mod net;
pub mod procedure;
pub mod risk;
pub mod sim;
pub mod token;

pub use marking::{Marking, MarkingError};
pub use net::{
    validate_net, Element, Net, NetBuilder, Position, PositionId, PositionKind, Selector,
    StructuralError, Transition, TransitionId, TransitionKind,
};
pub use procedure::{ProcCall, ProcOutput, Procedure, ProcedureRegistry};
pub use sim::{
    enabled, fire, run, run_with, step, FiringEvent, ResolutionSource, SchedulingPolicy,
    ScriptEntry, SimError, StopReason, Trace,
};
pub use token::{Token, Value};
