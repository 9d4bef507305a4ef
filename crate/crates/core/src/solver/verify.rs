use std::collections::HashSet;
use std::ops::ControlFlow;

use super::{SolveError, Strategy, SEARCH_STACK};
use crate::abstraction::Configuration;
use crate::game::{for_each_effective_move, Game, GameError, MoveCaps, Play, Transition};
use crate::logic::Side;

/// Result of checking a strategy against every Environment reply.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub ok: bool,
    /// A play on which the strategy fails, ending where it fails.
    pub counterexample: Option<Play>,
    pub reason: Option<String>,
    /// Environment turns checked.
    pub explored: usize,
}

struct Checker<'a> {
    game: &'a Game,
    strategy: &'a dyn Strategy,
    caps: MoveCaps,
    budget: usize,
    safe: HashSet<Configuration>,
    path: Play,
}

enum Stop {
    Fail(String),
    Budget,
}

impl Checker<'_> {
    fn system(&mut self, c: &Configuration, first: bool) -> Result<(), Stop> {
        let Some(t) = self.strategy.next_move(self.game, c, first) else {
            return Err(Stop::Fail("strategy is undefined at a System turn".into()));
        };
        if t.side() != Side::System {
            return Err(Stop::Fail("strategy returned an Environment transition".into()));
        }
        if !t.applicable(c) {
            return Err(Stop::Fail("strategy move is not applicable".into()));
        }
        let d = t.apply(c).map_err(|e| Stop::Fail(e.to_string()))?;
        self.path.steps.push((t.clone(), d.clone()));
        if !self.game.accepts_unchecked(&d) {
            return Err(Stop::Fail("strategy move does not reach an accepting configuration".into()));
        }
        if t.is_identity() && !first {
            return Err(Stop::Fail("strategy passes after the start of the play".into()));
        }
        self.environment(&d)?;
        self.path.steps.pop();
        Ok(())
    }

    fn environment(&mut self, d: &Configuration) -> Result<(), Stop> {
        if self.safe.contains(d) {
            return Ok(());
        }
        if self.safe.len() >= self.budget {
            return Err(Stop::Budget);
        }
        let game = self.game;
        let mut result = Ok(());
        for_each_effective_move(game.alphabet(), d, Side::Environment, self.caps, |moved, e| {
            if game.accepts_unchecked(e) {
                return ControlFlow::Continue(());
            }
            self.path
                .steps
                .push((Transition::from_moved(Side::Environment, moved), e.clone()));
            match self.system(e, false) {
                Ok(()) => {
                    self.path.steps.pop();
                    ControlFlow::Continue(())
                }
                Err(stop) => {
                    result = Err(stop);
                    ControlFlow::Break(())
                }
            }
        });
        result?;
        self.safe.insert(d.clone());
        Ok(())
    }
}

/// Explores every play from `c0` in which System follows `strategy` and
/// Environment makes any legal move within `caps`.
///
/// The strategy wins when each of its moves is legal and every such play ends
/// with Environment unable to leave the acceptance condition.
pub fn verify_strategy(
    game: &Game,
    c0: &Configuration,
    strategy: &dyn Strategy,
    caps: MoveCaps,
    budget: usize,
) -> Result<Verification, SolveError> {
    game.check_shape(c0).map_err(GameError::from)?;
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(s, || {
                let mut checker = Checker {
                    game,
                    strategy,
                    caps,
                    budget,
                    safe: HashSet::new(),
                    path: Play::new(c0.clone()),
                };
                match checker.system(c0, true) {
                    Ok(()) => Ok(Verification {
                        ok: true,
                        counterexample: None,
                        reason: None,
                        explored: checker.safe.len(),
                    }),
                    Err(Stop::Fail(reason)) => Ok(Verification {
                        ok: false,
                        counterexample: Some(checker.path),
                        reason: Some(reason),
                        explored: checker.safe.len(),
                    }),
                    Err(Stop::Budget) => Err(SolveError::Budget { budget }),
                }
            })
            .expect("spawn verifier thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
