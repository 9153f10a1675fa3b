//! Concrete syntax.
//!
//! ```text
//! phi   := "true" | "false" | IDENT | "e{" AGENT ";" TRACE "}"
//!        | "!" phi | phi "&" phi | phi "|" phi | phi "->" phi
//!        | "K{" AGENT "}" phi | "<" TRACE ">" phi | "[" TRACE "]" phi
//!        | "O{" AGENT "}(" TRACE "|" phi ")" | "(" phi ")"
//! TRACE := DP "." EVENT (";" DP "." EVENT)*
//! ```
//!
//! Precedence from tightest: prefix operators, `&`, `|`, `->` (right
//! associative).

use thiserror::Error;

use super::{complexity::Preconditions, Formula};
use crate::symbol::{AgentId, EventTrace, PointId, Step};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unknown decision point `{0}`")]
    UnknownPoint(PointId),
    #[error("unknown event `{0}`")]
    UnknownEvent(Step),
    #[error("unknown agent `{0}`")]
    UnknownAgent(AgentId),
    #[error("ought operator is not allowed in a precondition")]
    OughtInPrecondition,
    #[error("agent `{agent}` does not own the final event of `{trace}`")]
    OwnerMismatch { agent: AgentId, trace: EventTrace },
}

/// Name resolution applied after parsing.
#[derive(Default, Clone, Copy)]
pub struct Env<'a> {
    pub points: Option<&'a dyn Preconditions>,
    pub agents: Option<&'a [AgentId]>,
    /// Reject ought operators (precondition formulas live in the ought-free fragment).
    pub precondition: bool,
}

/// Parses without resolving decision points or agents.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    parse_in(text, Env::default())
}

pub fn parse_in(text: &str, env: Env<'_>) -> Result<Formula, ParseError> {
    let mut p = Parser {
        src: text,
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    p.expect_end()?;
    resolve(&f, &env)?;
    Ok(f)
}

fn resolve(f: &Formula, env: &Env<'_>) -> Result<(), ParseError> {
    if env.precondition && !f.is_ought_free() {
        return Err(ParseError::OughtInPrecondition);
    }
    if let Some(agents) = env.agents {
        for a in f.agents() {
            if !agents.contains(&a) {
                return Err(ParseError::UnknownAgent(a));
            }
        }
    }
    let Some(points) = env.points else {
        return Ok(());
    };
    for step in f.steps() {
        if points.owner(&step.point).is_none() {
            return Err(ParseError::UnknownPoint(step.point.clone()));
        }
        if points.pre(step).is_none() {
            return Err(ParseError::UnknownEvent(step.clone()));
        }
    }
    let mut bad = None;
    f.any(&mut |g| {
        let (agent, trace) = match g {
            Formula::Ought(a, t, _) => (a, t),
            Formula::Exp(e) => (&e.agent, &e.trace),
            _ => return false,
        };
        let owner = trace.last().and_then(|s| points.owner(&s.point));
        if owner != Some(agent) {
            bad = Some(ParseError::OwnerMismatch {
                agent: agent.clone(),
                trace: trace.clone(),
            });
            return true;
        }
        false
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    /// `K{`, `O{` or `e{`.
    Open(char),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Dot,
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Open(c) => format!("`{c}{{`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k] as char;
        if c.is_ascii_whitespace() {
            k += 1;
            continue;
        }
        let start = k;
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '<' => Tok::LAngle,
            '>' => Tok::RAngle,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '.' => Tok::Dot,
            ';' => Tok::Semi,
            '-' if bytes.get(k + 1) == Some(&b'>') => {
                k += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                while k + 1 < bytes.len() && is_ident_char(bytes[k + 1] as char) {
                    k += 1;
                }
                let word = &src[start..=k];
                if matches!(word, "K" | "O" | "e") && bytes.get(k + 1) == Some(&b'{') {
                    k += 1;
                    Tok::Open(word.chars().next().unwrap())
                } else {
                    Tok::Ident(word.to_string())
                }
            }
            _ => {
                let found = src[start..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    pos: start,
                    expected: vec!["a formula token".into()],
                    found: format!("`{found}`"),
                });
            }
        };
        out.push((start, tok));
        k += 1;
    }
    Ok(out)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'s> {
    src: &'s str,
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.src.len())
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self
                .peek()
                .map(Tok::describe)
                .unwrap_or_else(|| "end of input".into()),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(&[&tok.describe()])
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.error(&["end of input", "`&`", "`|`", "`->`"])
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s != "true" && s != "false" => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.error(&[what]),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Open('K')) => {
                self.pos += 1;
                let agent = AgentId::new(self.ident("an agent name")?);
                self.expect(Tok::RBrace)?;
                Ok(Formula::know(agent, self.unary()?))
            }
            Some(Tok::LAngle) => {
                self.pos += 1;
                let trace = self.trace()?;
                self.expect(Tok::RAngle)?;
                Ok(Formula::diamond(trace, self.unary()?))
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let trace = self.trace()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::boxed(trace, self.unary()?))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(match s.as_str() {
                    "true" => Formula::top(),
                    "false" => Formula::bot(),
                    _ => Formula::atom(s),
                })
            }
            Some(Tok::Open('e')) => {
                self.pos += 1;
                let agent = AgentId::new(self.ident("an agent name")?);
                self.expect(Tok::Semi)?;
                let trace = self.trace()?;
                self.expect(Tok::RBrace)?;
                Ok(Formula::exp(agent, trace))
            }
            Some(Tok::Open('O')) => {
                self.pos += 1;
                let agent = AgentId::new(self.ident("an agent name")?);
                self.expect(Tok::RBrace)?;
                self.expect(Tok::LParen)?;
                let trace = self.trace()?;
                self.expect(Tok::Pipe)?;
                let body = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::ought(agent, trace, body))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.error(&[
                "`true`",
                "`false`",
                "an atom",
                "`e{`",
                "`!`",
                "`K{`",
                "`<`",
                "`[`",
                "`O{`",
                "`(`",
            ]),
        }
    }

    fn trace(&mut self) -> Result<EventTrace, ParseError> {
        let mut steps = vec![self.step()?];
        // `;` inside a trace is always followed by `DP.EVENT`.
        while self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
            steps.push(self.step()?);
        }
        Ok(EventTrace(steps))
    }

    fn step(&mut self) -> Result<Step, ParseError> {
        let point = self.ident("a decision point name")?;
        self.expect(Tok::Dot)?;
        let event = self.ident("an event name")?;
        Ok(Step::new(point, event))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(steps: &[(&str, &str)]) -> EventTrace {
        EventTrace(steps.iter().map(|(p, e)| Step::new(p, e)).collect())
    }

    #[test]
    fn ought_with_true_body() {
        let f = parse("O{i}(U.gamma | true)").unwrap();
        assert_eq!(
            f,
            Formula::ought(AgentId::new("i"), tr(&[("U", "gamma")]), Formula::top())
        );
    }

    #[test]
    fn nested_ought_headline() {
        let f = parse("O{b}(U.delta | O{a}(U2.beta | K{a} A))").unwrap();
        let inner = Formula::ought(
            AgentId::new("a"),
            tr(&[("U2", "beta")]),
            Formula::know(AgentId::new("a"), Formula::atom("A")),
        );
        assert_eq!(
            f,
            Formula::ought(AgentId::new("b"), tr(&[("U", "delta")]), inner)
        );
    }

    #[test]
    fn diamond_binds_tighter_than_and() {
        let f = parse("<U.alpha> (A & s10)").unwrap();
        assert_eq!(
            f,
            Formula::diamond(
                tr(&[("U", "alpha")]),
                Formula::and(Formula::atom("A"), Formula::atom("s10"))
            )
        );
        let g = parse("<U.alpha> A & s10").unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::diamond(tr(&[("U", "alpha")]), Formula::atom("A")),
                Formula::atom("s10")
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let p = || Formula::atom("p");
        let q = || Formula::atom("q");
        let r = || Formula::atom("r");
        assert_eq!(
            parse("p | q & r").unwrap(),
            Formula::or(p(), Formula::and(q(), r()))
        );
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p(), Formula::implies(q(), r()))
        );
        assert_eq!(
            parse("!p & q").unwrap(),
            Formula::and(Formula::not(p()), q())
        );
    }

    #[test]
    fn composed_traces_and_primes() {
        let f = parse("e{a; U.delta;U2.beta} & d'").unwrap();
        assert_eq!(
            f,
            Formula::and(
                Formula::exp(AgentId::new("a"), tr(&[("U", "delta"), ("U2", "beta")])),
                Formula::atom("d'")
            )
        );
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("p & ") {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("O{i}(U.a p)") {
            Err(ParseError::Syntax { expected, .. }) => assert!(expected.contains(&"`|`".to_string())),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("p q").is_err());
        assert!(parse("#").is_err());
    }

    #[test]
    fn precondition_rejects_ought() {
        let env = Env {
            precondition: true,
            ..Env::default()
        };
        assert_eq!(
            parse_in("A & O{i}(U.a | p)", env),
            Err(ParseError::OughtInPrecondition)
        );
    }

    #[test]
    fn unknown_agent_is_reported() {
        let agents = [AgentId::new("i")];
        let env = Env {
            agents: Some(&agents),
            ..Env::default()
        };
        assert_eq!(
            parse_in("K{j} p", env),
            Err(ParseError::UnknownAgent(AgentId::new("j")))
        );
    }
}
