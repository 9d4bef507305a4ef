use serde_json::{json, Value};
use thiserror::Error;

use super::{side_name, Game, GameError, Transition};
use crate::abstraction::Configuration;
use crate::logic::Side;

/// `C0 τ1 C1 … τn Cn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub initial: Configuration,
    pub steps: Vec<(Transition, Configuration)>,
}

impl Play {
    pub fn new(initial: Configuration) -> Play {
        Play {
            initial,
            steps: Vec::new(),
        }
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().map_or(&self.initial, |(_, c)| c)
    }

    /// Appends `τ` and `τ(last)`.
    pub fn push(&mut self, t: Transition) -> Result<(), GameError> {
        let next = t.apply(self.last())?;
        self.steps.push((t, next));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn configurations(&self) -> impl Iterator<Item = &Configuration> + '_ {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|(_, c)| c))
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|(t, c)| {
                let mut v = t.to_json(game.alphabet());
                v["config"] = c.to_json(game.alphabet());
                v
            })
            .collect();
        json!({"initial": self.initial.to_json(game.alphabet()), "steps": steps})
    }

    /// Reads a play; configurations after each step are recomputed from the
    /// transitions and compared with any that are given.
    pub fn from_json(v: &Value, game: &Game) -> Result<Play, GameError> {
        let bad = |m: &str| GameError::Shape(crate::abstraction::ShapeError::Json(m.to_string()));
        let initial = Configuration::from_json(v.get("initial").ok_or_else(|| bad("play needs `initial`"))?, game.alphabet())?;
        let mut play = Play::new(initial);
        if let Some(steps) = v.get("steps") {
            for step in steps.as_array().ok_or_else(|| bad("`steps` must be a list"))? {
                let t = Transition::from_json(step, game.alphabet(), game.bound())?;
                play.push(t)?;
                if let Some(c) = step.get("config") {
                    let given = Configuration::from_json(c, game.alphabet())?;
                    if &given != play.last() {
                        return Err(bad("step configuration differs from the transition's result"));
                    }
                }
            }
        }
        Ok(play)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {step}: {reason}")]
pub struct PlayViolation {
    pub step: usize,
    pub reason: String,
}

/// Checks alternation (System moves at odd steps), applicability, `Ci = τi(Ci-1)`,
/// and that System's moves reach accepting configurations while Environment's
/// moves reach rejecting ones.
pub fn validate_play(game: &Game, play: &Play) -> Result<(), PlayViolation> {
    let fail = |step: usize, reason: String| Err(PlayViolation { step, reason });
    if let Err(e) = game.check_shape(&play.initial) {
        return fail(0, e.to_string());
    }
    let mut prev = &play.initial;
    for (i, (t, c)) in play.steps.iter().enumerate() {
        let step = i + 1;
        let side = if step % 2 == 1 { Side::System } else { Side::Environment };
        if t.side() != side {
            return fail(step, format!("expected a {} move", side_name(side)));
        }
        if !t.applicable(prev) {
            return fail(step, "transition is not applicable".into());
        }
        match t.apply(prev) {
            Ok(next) if &next == c => {}
            _ => return fail(step, "configuration is not the transition's result".into()),
        }
        let accepted = game.accepts_unchecked(c);
        if side == Side::System && !accepted {
            return fail(step, "System move does not reach an accepting configuration".into());
        }
        if side == Side::Environment && accepted {
            return fail(step, "Environment move reaches an accepting configuration".into());
        }
        prev = c;
    }
    Ok(())
}
