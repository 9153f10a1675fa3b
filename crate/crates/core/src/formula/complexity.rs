use super::{Formula, ParseError};
use crate::symbol::{AgentId, EventTrace, PointId, Step};

/// Lookup of declared decision points: event preconditions and owners.
pub trait Preconditions {
    fn pre(&self, step: &Step) -> Option<&Formula>;
    fn owner(&self, point: &PointId) -> Option<&AgentId>;

    /// Precondition of a (possibly composed) trace: for `τ;β` it is
    /// `<τ> pre(β)`.
    fn trace_pre(&self, trace: &EventTrace) -> Result<Formula, ParseError> {
        let (last, init) = trace
            .steps()
            .split_last()
            .expect("traces in formulas are non-empty");
        let pre = self
            .pre(last)
            .ok_or_else(|| ParseError::UnknownEvent(last.clone()))?
            .clone();
        if init.is_empty() {
            Ok(pre)
        } else {
            Ok(Formula::diamond(EventTrace(init.to_vec()), pre))
        }
    }
}

/// Complexity of the precondition of a trace, computed on the composed
/// precondition formula.
pub fn precondition_complexity(
    trace: &EventTrace,
    env: &dyn Preconditions,
) -> Result<u128, ParseError> {
    let (last, init) = trace
        .steps()
        .split_last()
        .expect("traces in formulas are non-empty");
    let pre = env
        .pre(last)
        .ok_or_else(|| ParseError::UnknownEvent(last.clone()))?;
    let c_last = complexity(pre, env)?;
    if init.is_empty() {
        Ok(c_last)
    } else {
        let c_init = precondition_complexity(&EventTrace(init.to_vec()), env)?;
        Ok((4 + c_init) * c_last)
    }
}

/// The complexity measure that certifies termination of the reduction:
///
/// * `c(p) = c(e) = 1`
/// * `c(¬φ) = c(K_i φ) = 1 + c(φ)`
/// * `c(φ ∧ ψ) = 1 + max(c(φ), c(ψ))`
/// * `c(<τ>φ) = (4 + c(pre(τ))) · c(φ)`
/// * `c(O_i(τ|φ)) = (5 + c(pre(τ))) · c(φ)`
pub fn complexity(f: &Formula, env: &dyn Preconditions) -> Result<u128, ParseError> {
    Ok(match f {
        Formula::Atom(_) | Formula::Exp(_) => 1,
        Formula::Not(g) | Formula::Know(_, g) => 1 + complexity(g, env)?,
        Formula::And(a, b) => 1 + complexity(a, env)?.max(complexity(b, env)?),
        Formula::Diamond(t, g) => (4 + precondition_complexity(t, env)?) * complexity(g, env)?,
        Formula::Ought(_, t, g) => (5 + precondition_complexity(t, env)?) * complexity(g, env)?,
    })
}
