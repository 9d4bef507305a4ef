//! Small games with known winners, and System strategies for them.

use std::sync::Arc;

use crate::abstraction::{Configuration, CountConstraint, Location};
use crate::game::{AcceptanceRow, Game, LocalCondition, Play, Row, Transition};
use crate::logic::{Alphabet, ProcType, Side};
use crate::solver::Strategy;

pub const LIBRARY_GAMES: [&str; 3] = ["parity", "matching", "zone"];

/// A strategy given by a plain function.
#[derive(Clone, Copy)]
pub struct FnStrategy(pub fn(&Game, &Configuration, bool) -> Option<Transition>);

impl Strategy for FnStrategy {
    fn next_move(&self, game: &Game, c: &Configuration, first: bool) -> Option<Transition> {
        (self.0)(game, c, first)
    }
}

pub fn library_game(name: &str) -> Option<Game> {
    match name {
        "parity" => Some(parity_game()),
        "matching" => Some(matching_game()),
        "zone" => Some(zone_game()),
        _ => None,
    }
}

pub fn library_strategy(name: &str) -> Option<FnStrategy> {
    match name {
        "parity" => Some(parity_strategy()),
        "matching" => Some(matching_strategy()),
        "zone" => Some(zone_strategy()),
        _ => None,
    }
}

fn ab(sys: &str, env: &str) -> Arc<Alphabet> {
    Arc::new(Alphabet::new([sys], [env]).expect("valid alphabet"))
}

fn l(counts: &[u8]) -> Location {
    Location::from_counts(counts)
}

fn shared_eq(n: u32) -> LocalCondition {
    LocalCondition::shared(CountConstraint::eq(n))
}

fn shared_ge(n: u32) -> LocalCondition {
    LocalCondition::shared(CountConstraint::ge(n))
}

fn push(t: &mut Transition, g: &Game, from: &Location, to: &Location, ty: ProcType, n: u32) {
    t.add(g.alphabet(), g.bound(), from.clone(), to.clone(), ty, n)
        .expect("strategy moves follow the side's letters");
}

/// Shared tokens only; System wins from `C_(0,0,k)` exactly for even `k ≥ 2`.
///
/// Over `a` (System) and `b` (Environment) with `B = 2`, with `ℓ1 = ⟨a⟩`,
/// `ℓ2 = ⟨ab⟩`, `ℓ3 = ⟨a²b⟩`, `ℓ4 = ⟨a²b²⟩`, five rows constrain `ℓ0..ℓ4` and
/// forbid tokens elsewhere; a further row per location with more `b` than `a`
/// accepts as soon as a token sits there.
pub fn parity_game() -> Game {
    let locs = [l(&[0, 0]), l(&[1, 0]), l(&[1, 1]), l(&[2, 1]), l(&[2, 2])];
    let ge = |n| Some(shared_ge(n));
    let eq = |n| Some(shared_eq(n));
    let table: [[Option<LocalCondition>; 5]; 5] = [
        [ge(0), eq(2), eq(0), eq(0), ge(0)],
        [ge(0), eq(0), eq(0), eq(2), ge(0)],
        [eq(0), eq(0), eq(0), eq(0), ge(2)],
        [ge(0), eq(1), eq(1), eq(0), ge(0)],
        [ge(0), eq(0), eq(0), eq(1), ge(1)],
    ];
    let mut rows: Vec<Row> = table
        .iter()
        .map(|conds| {
            let mut row = AcceptanceRow::new(LocalCondition::EMPTY);
            for (loc, c) in locs.iter().zip(conds) {
                row.explicit.insert(loc.clone(), c.expect("all set"));
            }
            Row::Table(row)
        })
        .collect();
    for a in 0..=2u8 {
        for b in (a + 1)..=2u8 {
            rows.push(Row::Table(AcceptanceRow::new(shared_ge(0)).with(l(&[a, b]), shared_ge(1))));
        }
    }
    Game::new(ab("a", "b"), 2, rows).expect("well-formed game")
}

/// Move two tokens to `⟨a⟩`; once Environment has moved both to `⟨ab⟩`, move them
/// on to `⟨a²b⟩`; repeat after they reach `⟨a²b²⟩`.
pub fn parity_strategy() -> FnStrategy {
    FnStrategy(|g, c, _| {
        let [l0, l1, l2, l3] = [l(&[0, 0]), l(&[1, 0]), l(&[1, 1]), l(&[2, 1])];
        let se = |x: &Location| c.count(x, ProcType::Both);
        let mut t = Transition::identity(Side::System);
        if se(&l2) == 2 {
            push(&mut t, g, &l2, &l3, ProcType::Both, 2);
        } else if se(&l1) + se(&l2) + se(&l3) == 0 && se(&l0) >= 2 {
            push(&mut t, g, &l0, &l1, ProcType::Both, 2);
        } else {
            return None;
        }
        Some(t)
    })
}

/// No shared tokens; System wins from `C_(ks,ke,0)` exactly when `ks ≥ ke`.
pub fn matching_game() -> Game {
    let default = LocalCondition::new(CountConstraint::ANY, CountConstraint::ANY, CountConstraint::NONE);
    let cond = |s: CountConstraint, e: CountConstraint| LocalCondition::new(s, e, CountConstraint::NONE);
    let (a, b) = (l(&[1, 0]), l(&[0, 1]));
    let eq = CountConstraint::eq;
    let rows = vec![
        AcceptanceRow::new(default)
            .with(a.clone(), cond(eq(1), eq(0)))
            .with(b.clone(), cond(eq(0), eq(0))),
        AcceptanceRow::new(default)
            .with(a.clone(), cond(eq(1), eq(0)))
            .with(b.clone(), cond(eq(0), CountConstraint::ge(2))),
        AcceptanceRow::new(default)
            .with(a, cond(eq(0), eq(0)))
            .with(b, cond(eq(0), CountConstraint::ge(1))),
        AcceptanceRow::new(default).with(l(&[0, 0]), LocalCondition::EMPTY),
    ];
    Game::new(ab("a", "b"), 2, rows.into_iter().map(Row::Table).collect()).expect("well-formed game")
}

/// Pair each Environment token leaving the origin with one System token, and
/// send the remaining System tokens to `⟨a²⟩` once Environment has none left.
pub fn matching_strategy() -> FnStrategy {
    FnStrategy(|g, c, first| {
        if first && g.accepts(c).unwrap_or(false) {
            return Some(Transition::identity(Side::System));
        }
        let [l0, a, a2, b] = [l(&[0, 0]), l(&[1, 0]), l(&[2, 0]), l(&[0, 1])];
        let mut t = Transition::identity(Side::System);
        let (s0, e0) = (c.count(&l0, ProcType::Sys), c.count(&l0, ProcType::Env));
        if c.count(&b, ProcType::Env) >= 1 && c.count(&a, ProcType::Sys) == 1 {
            push(&mut t, g, &a, &a2, ProcType::Sys, 1);
        } else if e0 == 0 && s0 >= 1 {
            push(&mut t, g, &l0, &a2, ProcType::Sys, s0);
        } else if e0 >= 1 && s0 >= 1 && c.count(&a, ProcType::Sys) == 0 {
            push(&mut t, g, &l0, &a, ProcType::Sys, 1);
        } else {
            return None;
        }
        Some(t)
    })
}

/// `Z = {⟨a^i d^j⟩ : i = 2 ≠ j or j = 2 ≠ i}` over `a` (System) and `d`
/// (Environment) with `B = 3`.
pub fn zone_locations() -> Vec<Location> {
    let mut z = Vec::new();
    for i in 0..=3u8 {
        for j in 0..=3u8 {
            if (i == 2 && j != 2) || (j == 2 && i != 2) {
                z.push(l(&[i, j]));
            }
        }
    }
    z
}

/// A single row: no token of any type in `Z`.
pub fn zone_game() -> Game {
    let mut row = AcceptanceRow::new(LocalCondition::ANY);
    for loc in zone_locations() {
        row.explicit.insert(loc, LocalCondition::EMPTY);
    }
    Game::new(ab("a", "d"), 3, vec![Row::Table(row)]).expect("well-formed game")
}

/// Pass at the start; afterwards, answer every `d` with an `a`: each System-owned
/// token at `⟨a^i d^j⟩` with `i < j` moves to `⟨a^j d^j⟩`.
pub fn zone_strategy() -> FnStrategy {
    FnStrategy(|g, c, first| {
        if first && g.accepts(c).unwrap_or(false) {
            return Some(Transition::identity(Side::System));
        }
        let mut t = Transition::identity(Side::System);
        for (loc, triple) in c.iter() {
            let (i, j) = (loc.get(0), loc.get(1));
            if i < j {
                for ty in [ProcType::Sys, ProcType::Both] {
                    push(&mut t, g, loc, &l(&[j, j]), ty, triple[ty.index()]);
                }
            }
        }
        (!t.is_identity()).then_some(t)
    })
}

/// A play from `C_(0,0,6)` following [`zone_strategy`], in which Environment
/// twice moves tokens into `Z`.
pub fn zone_reference_play() -> Play {
    let g = zone_game();
    let mut play = Play::new(g.initial([0, 0, 6]));
    let se = ProcType::Both;
    type Moves = &'static [([u8; 2], [u8; 2])];
    let steps: [(Side, Moves); 5] = [
        (Side::System, &[]),
        (Side::Environment, &[([0, 0], [0, 2]), ([0, 0], [0, 1])]),
        (Side::System, &[([0, 2], [2, 2]), ([0, 1], [1, 1])]),
        (Side::Environment, &[([1, 1], [1, 2]), ([0, 0], [0, 3])]),
        (Side::System, &[([1, 2], [2, 2]), ([0, 3], [3, 3])]),
    ];
    for (side, moves) in steps {
        let mut t = Transition::identity(side);
        for (from, to) in moves {
            push(&mut t, &g, &l(from), &l(to), se, 1);
        }
        play.push(t).expect("reference moves apply");
    }
    play
}
