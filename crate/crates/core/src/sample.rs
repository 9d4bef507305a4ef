//! Seeded generators for alphabets, sentences, executions and plays, shared by
//! the property tests and the command line.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::abstraction::Configuration;
use crate::game::{Game, MoveCaps, Play, Transition};
use crate::logic::{Alphabet, Event, Execution, Formula, ProcType, ProcessUniverse, Side, Var};

const NAMES: [&str; 8] = ["a", "b", "c", "d", "f", "g", "h", "k"];

/// An alphabet with between one and `max_letters` letters, each owned by a
/// random side.
pub fn alphabet<R: Rng + ?Sized>(rng: &mut R, max_letters: usize) -> Alphabet {
    let n = rng.gen_range(1..=max_letters.clamp(1, NAMES.len()));
    let (mut sys, mut env) = (Vec::new(), Vec::new());
    for name in &NAMES[..n] {
        if rng.gen_bool(0.5) {
            sys.push(*name);
        } else {
            env.push(*name);
        }
    }
    Alphabet::new(sys, env).expect("names are valid and distinct")
}

/// A random sentence using only `∼` and `=` among binary relations, whose
/// quantifier rank after expanding counting quantifiers is at most `rank`.
pub fn sentence<R: Rng + ?Sized>(rng: &mut R, alphabet: &Alphabet, rank: u32) -> Formula {
    let mut gen = SentenceGen { rng, alphabet };
    gen.formula(&[], rank, 3)
}

struct SentenceGen<'a, R: ?Sized> {
    rng: &'a mut R,
    alphabet: &'a Alphabet,
}

impl<R: Rng + ?Sized> SentenceGen<'_, R> {
    fn formula(&mut self, vars: &[Var], rank: u32, depth: u32) -> Formula {
        let leaf = depth == 0 || (!vars.is_empty() && self.rng.gen_bool(0.3));
        if leaf || (rank == 0 && vars.is_empty()) {
            return self.atom(vars);
        }
        match self.rng.gen_range(0..10) {
            0 => Formula::not(self.formula(vars, rank, depth - 1)),
            1 | 2 => Formula::and(self.formula(vars, rank, depth - 1), self.formula(vars, rank, depth - 1)),
            3 => Formula::or(self.formula(vars, rank, depth - 1), self.formula(vars, rank, depth - 1)),
            _ if rank == 0 => self.atom(vars),
            k => {
                let x: Var = ["x", "y", "z", "u"][vars.len().min(3)].to_string();
                let mut inner = vars.to_vec();
                if !inner.contains(&x) {
                    inner.push(x.clone());
                }
                // Counting quantifiers cost m (at least) or m + 1 (exactly) after
                // expansion.
                match k {
                    4 | 5 => Formula::exists(x, self.formula(&inner, rank - 1, depth - 1)),
                    6 | 7 => Formula::forall(x, self.formula(&inner, rank - 1, depth - 1)),
                    8 if rank >= 2 => Formula::at_least(2, x, self.formula(&inner, rank - 2, depth - 1)),
                    9 if rank >= 2 => Formula::exactly(1, x, self.formula(&inner, rank - 2, depth - 1)),
                    _ => Formula::exactly(0, x, self.formula(&inner, rank - 1, depth - 1)),
                }
            }
        }
    }

    fn atom(&mut self, vars: &[Var]) -> Formula {
        if vars.is_empty() {
            return if self.rng.gen_bool(0.5) { Formula::True } else { Formula::False };
        }
        let x = vars.choose(self.rng).expect("non-empty").clone();
        let y = vars.choose(self.rng).expect("non-empty").clone();
        match self.rng.gen_range(0..6) {
            0 => Formula::Type(*ProcType::ALL.choose(self.rng).expect("non-empty"), x),
            1 if x != y => Formula::Sim(x, y),
            2 if x != y => Formula::Eq(x, y),
            _ => {
                let a = self.rng.gen_range(0..self.alphabet.len());
                Formula::Action(self.alphabet.name(a).to_string(), x)
            }
        }
    }
}

/// A random execution with at most `max_sizes[θ]` processes of type `θ` and at
/// most `max_len` events.
pub fn execution<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &Arc<Alphabet>,
    max_sizes: [u32; 3],
    max_len: usize,
) -> Execution {
    let sizes = max_sizes.map(|m| rng.gen_range(0..=m));
    let universe = ProcessUniverse::with_sizes(sizes);
    let len = rng.gen_range(0..=max_len);
    let mut events = Vec::with_capacity(len);
    let procs: Vec<_> = universe.iter().collect();
    for _ in 0..len {
        let Some(&(ty, p)) = procs.choose(rng) else { break };
        let letters: Vec<usize> = [Side::System, Side::Environment]
            .into_iter()
            .filter(|&s| ty.serves(s))
            .flat_map(|s| alphabet.letters_of(s))
            .collect();
        if let Some(&a) = letters.choose(rng) {
            events.push(Event { action: a, process: p });
        }
    }
    Execution::new(alphabet.clone(), universe, events).expect("events respect process types")
}

/// A random valid play from `c0` with at most `max_steps` moves. System opens with
/// a pass when `c0` is accepting and a coin says so. The play stops early when
/// the player to move has no legal move.
pub fn play<R: Rng + ?Sized>(rng: &mut R, game: &Game, c0: &Configuration, caps: MoveCaps, max_steps: usize) -> Play {
    let mut play = Play::new(c0.clone());
    let mut side = Side::System;
    while play.len() < max_steps {
        let c = play.last().clone();
        if play.is_empty() && game.accepts(&c).expect("shape") && rng.gen_bool(0.3) {
            play.push(Transition::identity(Side::System)).expect("identity applies");
        } else {
            let moves = game.legal_moves(&c, side, caps).expect("shape");
            let Some((t, _)) = moves.choose(rng) else { break };
            play.push(t.clone()).expect("legal moves apply");
        }
        side = side.other();
    }
    play
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Relation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sentences_are_class_only_and_within_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let ab = alphabet(&mut rng, 3);
            let f = sentence(&mut rng, &ab, 2);
            assert!(f.is_sentence(), "{f}");
            assert!(f.quantifier_rank() <= 2, "{f}");
            assert!(f.fragment_check(&[Relation::Sim]).is_ok(), "{f}");
        }
    }
}
