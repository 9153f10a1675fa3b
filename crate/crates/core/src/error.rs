use thiserror::Error;

use crate::symbol::{AgentId, EventName, PointId, Step, WorldId};

/// Errors raised while querying, updating or evaluating over models.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
    #[error("unknown world `{0}`")]
    UnknownWorld(WorldId),
    #[error("unknown decision point `{0}`")]
    UnknownPoint(PointId),
    #[error("unknown event `{1}` in decision point `{0}`")]
    UnknownEvent(PointId, EventName),
    #[error("product update is undefined: no world satisfies any precondition{}", step_suffix(.step))]
    EmptyProduct { step: Option<usize> },
    #[error("world `{0}` has no outgoing edge")]
    IsolatedRoot(WorldId),
    #[error("agent `{agent}` has no successor at `{world}`")]
    NoSuccessors { agent: AgentId, world: WorldId },
    #[error("action component rooted at `{root}` reached `{reached}` with a different trace")]
    TraceLeak { root: WorldId, reached: WorldId },
    #[error("expectation atom for `{agent}` has no covering decision context ({step})")]
    NoDecisionContext { agent: AgentId, step: Step },
    #[error("desirability sum overflows")]
    Overflow,
    #[error("model is not valid: {0}")]
    InvalidModel(String),
}

fn step_suffix(step: &Option<usize>) -> String {
    match step {
        Some(k) => format!(" (step {k})"),
        None => String::new(),
    }
}
