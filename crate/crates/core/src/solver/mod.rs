//! Exact solving of vector games from a fixed initial configuration.
//!
//! Every effective move strictly increases the total number of letters carried by
//! the tokens, so plays are finite and the game is solved by memoized backward
//! induction. System may pass only at the start of a play, and only when the
//! initial configuration already accepts.

mod oracle;
mod verify;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use serde_json::{json, Value};
use thiserror::Error;

use crate::abstraction::Configuration;
use crate::game::{for_each_effective_move, Game, GameError, MoveCaps, Moved, Transition};
use crate::logic::Side;

pub use oracle::{bruteforce_synthesis, OracleError};
pub use verify::{verify_strategy, Verification};

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Stack size for the recursive searches; their depth is bounded by the number
/// of letters the tokens can accumulate.
pub(crate) const SEARCH_STACK: usize = 512 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    System,
    Environment,
}

impl Player {
    pub fn name(self) -> &'static str {
        match self {
            Player::System => "System",
            Player::Environment => "Environment",
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub winner: Player,
    /// Memoized positions.
    pub explored: usize,
    /// Whether moves were restricted by [`MoveCaps`].
    pub capped: bool,
}

impl Verdict {
    pub fn to_json(&self) -> Value {
        let mut v = json!({"winner": self.winner.name(), "explored": self.explored});
        if self.capped {
            v["semantics"] = json!("capped semantics");
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("inconclusive: node budget of {budget} positions exhausted")]
    Budget { budget: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub caps: MoveCaps,
    pub budget: usize,
    pub extract_strategy: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            caps: MoveCaps::UNLIMITED,
            budget: DEFAULT_NODE_BUDGET,
            extract_strategy: false,
        }
    }
}

/// A System strategy that only looks at the current configuration, and at whether
/// the play has just started.
pub trait Strategy: Sync {
    fn next_move(&self, game: &Game, c: &Configuration, first: bool) -> Option<Transition>;
}

/// A finite map from configurations to System transitions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub moves: BTreeMap<Configuration, Transition>,
}

impl Strategy for PositionalStrategy {
    fn next_move(&self, _: &Game, c: &Configuration, _: bool) -> Option<Transition> {
        self.moves.get(c).cloned()
    }
}

impl PositionalStrategy {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_json(&self, game: &Game) -> Value {
        let entries: Vec<Value> = self
            .moves
            .iter()
            .map(|(c, t)| json!({"config": c.to_json(game.alphabet()), "move": t.to_json(game.alphabet())}))
            .collect();
        json!(entries)
    }

    pub fn from_json(v: &Value, game: &Game) -> Result<PositionalStrategy, GameError> {
        let bad = || GameError::Shape(crate::abstraction::ShapeError::Json("strategy must be a list of {config, move}".into()));
        let mut moves = BTreeMap::new();
        for entry in v.as_array().ok_or_else(bad)? {
            let c = Configuration::from_json(entry.get("config").ok_or_else(bad)?, game.alphabet())?;
            let t = Transition::from_json(entry.get("move").ok_or_else(bad)?, game.alphabet(), game.bound())?;
            moves.insert(c, t);
        }
        Ok(PositionalStrategy { moves })
    }
}

/// Outcome of a System turn: the winning move (empty for a pass), if any.
type SysEntry = Option<Vec<Moved>>;

pub(crate) struct Search<'g> {
    game: &'g Game,
    caps: MoveCaps,
    budget: usize,
    sys: HashMap<Configuration, SysEntry>,
    env: HashMap<Configuration, bool>,
    accepted: HashMap<Configuration, bool>,
    entered: usize,
    max_depth: usize,
}

struct OutOfBudget;

impl<'g> Search<'g> {
    pub(crate) fn new(game: &'g Game, c0: &Configuration, caps: MoveCaps, budget: usize) -> Search<'g> {
        let tokens = c0.token_count() as usize;
        Search {
            game,
            caps,
            budget,
            sys: HashMap::new(),
            env: HashMap::new(),
            accepted: HashMap::new(),
            entered: 0,
            max_depth: 2 * tokens * game.alphabet().len() * game.bound() as usize + 2,
        }
    }

    pub(crate) fn accepts(&mut self, c: &Configuration) -> bool {
        if let Some(&a) = self.accepted.get(c) {
            return a;
        }
        let a = self.game.accepts_unchecked(c);
        self.accepted.insert(c.clone(), a);
        a
    }

    fn explored(&self) -> usize {
        self.sys.len() + self.env.len()
    }

    /// Counts a position about to be expanded against the budget.
    fn reserve(&mut self) -> Result<(), OutOfBudget> {
        if self.entered >= self.budget {
            return Err(OutOfBudget);
        }
        self.entered += 1;
        Ok(())
    }

    fn win_sys(&mut self, c: &Configuration, depth: usize) -> Result<bool, OutOfBudget> {
        if let Some(e) = self.sys.get(c) {
            return Ok(e.is_some());
        }
        assert!(depth <= self.max_depth, "play longer than the potential bound");
        self.reserve()?;
        let mut choice: SysEntry = None;
        // A pass is only possible at the start: later System turns follow an
        // Environment move, which always leaves a rejecting configuration.
        if self.accepts(c) && self.win_env(c, depth + 1)? {
            choice = Some(Vec::new());
        }
        if choice.is_none() {
            let game = self.game;
            let mut failure = None;
            for_each_effective_move(game.alphabet(), c, Side::System, self.caps, |moved, d| {
                if !self.accepts(d) {
                    return ControlFlow::Continue(());
                }
                match self.win_env(d, depth + 1) {
                    Ok(true) => {
                        choice = Some(moved.to_vec());
                        ControlFlow::Break(())
                    }
                    Ok(false) => ControlFlow::Continue(()),
                    Err(e) => {
                        failure = Some(e);
                        ControlFlow::Break(())
                    }
                }
            });
            if let Some(e) = failure {
                return Err(e);
            }
        }
        let win = choice.is_some();
        self.sys.insert(c.clone(), choice);
        Ok(win)
    }

    fn win_env(&mut self, d: &Configuration, depth: usize) -> Result<bool, OutOfBudget> {
        if let Some(&w) = self.env.get(d) {
            return Ok(w);
        }
        assert!(depth <= self.max_depth, "play longer than the potential bound");
        self.reserve()?;
        let game = self.game;
        let mut win = true;
        let mut failure = None;
        for_each_effective_move(game.alphabet(), d, Side::Environment, self.caps, |_, e| {
            if self.accepts(e) {
                return ControlFlow::Continue(());
            }
            match self.win_sys(e, depth + 1) {
                Ok(true) => ControlFlow::Continue(()),
                Ok(false) => {
                    win = false;
                    ControlFlow::Break(())
                }
                Err(err) => {
                    failure = Some(err);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        self.env.insert(d.clone(), win);
        Ok(win)
    }

    /// Positional strategy read off the memo table, covering every System turn
    /// reachable when System follows it.
    fn strategy(&mut self, c0: &Configuration) -> PositionalStrategy {
        let game = self.game;
        let mut out = PositionalStrategy::default();
        let mut todo = vec![c0.clone()];
        while let Some(c) = todo.pop() {
            if out.moves.contains_key(&c) {
                continue;
            }
            let Some(Some(moved)) = self.sys.get(&c) else {
                continue;
            };
            let t = Transition::from_moved(Side::System, moved);
            let d = t.apply(&c).expect("recorded moves are applicable");
            out.moves.insert(c, t);
            for_each_effective_move(game.alphabet(), &d, Side::Environment, self.caps, |_, e| {
                if !self.accepts(e) {
                    todo.push(e.clone());
                }
                ControlFlow::Continue(())
            });
        }
        out
    }
}

/// Decides whether `c0` is winning for System.
///
/// On a System win with `extract_strategy`, also returns a positional strategy
/// covering every System turn reachable under it. Exceeding the node budget is
/// reported as [`SolveError::Budget`], never as a verdict.
pub fn solve(
    game: &Game,
    c0: &Configuration,
    opts: SolveOptions,
) -> Result<(Verdict, Option<PositionalStrategy>), SolveError> {
    game.check_shape(c0).map_err(GameError::from)?;
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(s, || {
                let mut search = Search::new(game, c0, opts.caps, opts.budget);
                let win = search
                    .win_sys(c0, 0)
                    .map_err(|_| SolveError::Budget { budget: opts.budget })?;
                let verdict = Verdict {
                    winner: if win { Player::System } else { Player::Environment },
                    explored: search.explored(),
                    capped: !opts.caps.is_unlimited(),
                };
                let strategy = (win && opts.extract_strategy).then(|| search.strategy(c0));
                Ok((verdict, strategy))
            })
            .expect("spawn solver thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}
