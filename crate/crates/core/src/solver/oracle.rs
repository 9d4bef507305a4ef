//! The synthesis game played directly on executions.
//!
//! Positions record, for every process, how many of each letter it has emitted
//! (capped at the formula's threshold). System extends the execution by a block
//! of System letters that makes the formula true, Environment by a block of
//! Environment letters that makes it false. Truth is decided by the model checker
//! on a realizing execution, so this search shares no code with configurations
//! or acceptance conditions and serves as an independent oracle.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::{Player, Verdict, SEARCH_STACK};
use crate::abstraction::Location;
use crate::logic::{model_check, Alphabet, Event, Execution, Formula, Interpretation, LogicError, ProcType, ProcessUniverse, Side};
use crate::normalform::{threshold, NormalFormError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

struct Oracle<'a> {
    f: &'a Formula,
    alphabet: Arc<Alphabet>,
    universe: ProcessUniverse,
    types: Vec<ProcType>,
    bound: u8,
    block_bound: Option<u32>,
    truth: HashMap<Vec<Location>, bool>,
    sys: HashMap<Vec<Location>, bool>,
    env: HashMap<Vec<Location>, bool>,
}

impl Oracle<'_> {
    fn holds(&mut self, state: &[Location]) -> bool {
        if let Some(&t) = self.truth.get(state) {
            return t;
        }
        let mut events = Vec::new();
        for ((_, p), loc) in self.universe.iter().zip(state) {
            for (a, &n) in loc.counts().iter().enumerate() {
                for _ in 0..n {
                    events.push(Event { action: a, process: p });
                }
            }
        }
        let x = Execution::new(self.alphabet.clone(), self.universe.clone(), events)
            .expect("blocks respect process types");
        let t = model_check(&x, self.f, &Interpretation::new()).expect("sentence over the alphabet");
        self.truth.insert(state.to_vec(), t);
        t
    }

    /// All states reachable by one non-empty block of `side`, each process moving
    /// independently.
    fn successors(&self, state: &[Location], side: Side) -> Vec<Vec<Location>> {
        let letters = self.alphabet.letters_of(side);
        let options: Vec<Vec<Location>> = state
            .iter()
            .zip(&self.types)
            .map(|(loc, ty)| {
                let mut opts = vec![loc.clone()];
                if ty.serves(side) {
                    extend(loc, &letters, self.bound, self.block_bound, &mut opts);
                }
                opts
            })
            .collect();
        let mut out = Vec::new();
        let mut current = state.to_vec();
        product(&options, 0, &mut current, state, &mut out);
        out
    }

    fn win_sys(&mut self, state: &[Location]) -> bool {
        if let Some(&w) = self.sys.get(state) {
            return w;
        }
        let mut win = self.holds(state) && self.win_env(state);
        if !win {
            for next in self.successors(state, Side::System) {
                if self.holds(&next) && self.win_env(&next) {
                    win = true;
                    break;
                }
            }
        }
        self.sys.insert(state.to_vec(), win);
        win
    }

    fn win_env(&mut self, state: &[Location]) -> bool {
        if let Some(&w) = self.env.get(state) {
            return w;
        }
        let mut win = true;
        for next in self.successors(state, Side::Environment) {
            if !self.holds(&next) && !self.win_sys(&next) {
                win = false;
                break;
            }
        }
        self.env.insert(state.to_vec(), win);
        win
    }
}

fn extend(
    loc: &Location,
    letters: &std::ops::Range<usize>,
    bound: u8,
    block_bound: Option<u32>,
    out: &mut Vec<Location>,
) {
    let mut frontier = vec![(loc.clone(), 0u32)];
    while let Some((l, used)) = frontier.pop() {
        if block_bound.is_some_and(|b| used >= b) {
            continue;
        }
        for a in letters.clone() {
            let next = l.plus(a, bound);
            if next != l && !out.contains(&next) {
                out.push(next.clone());
                frontier.push((next, used + 1));
            }
        }
    }
}

fn product(
    options: &[Vec<Location>],
    i: usize,
    current: &mut Vec<Location>,
    start: &[Location],
    out: &mut Vec<Vec<Location>>,
) {
    if i == options.len() {
        if current.as_slice() != start {
            out.push(current.clone());
        }
        return;
    }
    for o in &options[i] {
        current[i] = o.clone();
        product(options, i + 1, current, start, out);
    }
    current[i] = start[i].clone();
}

/// Decides the synthesis game for `f` over a universe with the given numbers of
/// System, Environment and shared processes, by search over executions.
///
/// `block_bound` limits the letters one process may emit within a block; `None`
/// leaves blocks unrestricted.
pub fn bruteforce_synthesis(
    f: &Formula,
    alphabet: &Arc<Alphabet>,
    sizes: [u32; 3],
    block_bound: Option<u32>,
) -> Result<Verdict, OracleError> {
    let bound = threshold(f)?;
    if !f.is_sentence() {
        return Err(NormalFormError::NotASentence.into());
    }
    for a in f.actions() {
        if alphabet.index_of(&a).is_none() {
            return Err(LogicError::UnknownAction(a).into());
        }
    }
    let universe = ProcessUniverse::with_sizes(sizes);
    let types: Vec<ProcType> = universe.iter().map(|(t, _)| t).collect();
    let start = vec![Location::zero(alphabet.len()); types.len()];
    let mut oracle = Oracle {
        f,
        alphabet: alphabet.clone(),
        universe,
        types,
        bound,
        block_bound,
        truth: HashMap::new(),
        sys: HashMap::new(),
        env: HashMap::new(),
    };
    let win = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(SEARCH_STACK)
            .spawn_scoped(s, || {
                let w = oracle.win_sys(&start);
                (w, oracle.sys.len() + oracle.env.len())
            })
            .expect("spawn oracle thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    });
    Ok(Verdict {
        winner: if win.0 { Player::System } else { Player::Environment },
        explored: win.1,
        capped: block_bound.is_some(),
    })
}
