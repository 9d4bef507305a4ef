//! Translations between sentences, games, executions and plays, the encoding of
//! two-counter machines into games, and a library of small games with known
//! winners.

mod library;
mod tcm;
mod translate;

use std::sync::Arc;

use thiserror::Error;

use crate::abstraction::{all_locations, Cmp, CountConstraint, Location};
use crate::game::{AcceptanceRow, Game, GameError, LocalCondition, Row};
use crate::logic::{Alphabet, Formula, ProcType, Relation};
use crate::normalform::{self, constraints_by_location, NormalFormError};

pub use library::{
    zone_game, zone_reference_play, zone_strategy, library_game, library_strategy, parity_game,
    parity_strategy, matching_game, matching_strategy, FnStrategy, LIBRARY_GAMES,
};
pub use tcm::{
    encode_2cm, parse_2cm, tcm_run_bounded, tcm_strategy, Op, TcmConfiguration, TcmRun, TcmStrategy, TcmTransition,
    TwoCounterMachine,
};
pub use translate::{execution_to_play, play_to_execution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("game acceptance is given by a formula and cannot be inverted syntactically")]
    ImplicitAcceptance,
    #[error("execution is not normalized for the game: {0}")]
    NotNormalized(String),
    #[error("invalid play: {0}")]
    InvalidPlay(String),
    #[error("plays must start with every token at the origin")]
    NotInitial,
    #[error("two-counter machine: {0}")]
    Machine(String),
    #[error("inverting the game needs {needed} rows, more than the budget of {budget}")]
    Budget { needed: u128, budget: usize },
}

/// The game whose acceptance condition is `f` itself, at the formula's threshold
/// unless `bound` overrides it.
pub fn formula_to_game(f: &Formula, alphabet: &Arc<Alphabet>, bound: Option<u8>) -> Result<Game, ReductionError> {
    f.fragment_check(&[Relation::Sim]).map_err(NormalFormError::from)?;
    let b = match bound {
        Some(b) => b,
        None => normalform::threshold(f)?,
    };
    Ok(Game::with_formula(alphabet.clone(), b, f.clone(), bound.is_some())?)
}

/// The game whose acceptance rows are the clauses of the normal form of `f`.
pub fn formula_to_game_explicit(
    f: &Formula,
    alphabet: &Arc<Alphabet>,
    bound: Option<u8>,
    budget: usize,
) -> Result<Game, ReductionError> {
    let b = match bound {
        Some(b) => b,
        None => normalform::threshold(f)?,
    };
    let nf = normalform::normalize(f, alphabet, b, None, budget)?;
    let rows = nf
        .clauses
        .iter()
        .map(|clause| {
            let mut row = AcceptanceRow::new(LocalCondition::ANY);
            for (loc, cs) in constraints_by_location(clause) {
                row.explicit
                    .insert(loc, LocalCondition(cs.map(|c| c.unwrap_or(CountConstraint::ANY))));
            }
            Row::Table(row)
        })
        .collect();
    Ok(Game::new(alphabet.clone(), b, rows)?)
}

/// `ψ_{B,ℓ}(y)`: the class of `y` carries exactly `ℓ(a)` copies of each letter `a`,
/// or at least `B` when `ℓ(a) = B`.
pub fn class_profile(alphabet: &Alphabet, bound: u8, loc: &Location, y: &str) -> Formula {
    let z = format!("{y}_");
    Formula::conj((0..alphabet.len()).map(|a| {
        let body = Formula::and(
            Formula::Sim(y.to_string(), z.clone()),
            Formula::Action(alphabet.name(a).to_string(), z.clone()),
        );
        let n = loc.get(a) as u32;
        if n < bound as u32 {
            Formula::exactly(n, z.clone(), body)
        } else {
            Formula::at_least(n, z.clone(), body)
        }
    }))
}

fn counting(c: CountConstraint, ty: ProcType, alphabet: &Alphabet, bound: u8, loc: &Location) -> Formula {
    let body = Formula::and(Formula::Type(ty, "y".into()), class_profile(alphabet, bound, loc, "y"));
    match c.cmp {
        Cmp::Eq => Formula::exactly(c.n, "y", body),
        Cmp::Ge => Formula::at_least(c.n, "y", body),
    }
}

/// A sentence with the same winning initial configurations as `g`: one disjunct
/// per row, one counting formula per location and type.
///
/// Rows whose default is neither `≥0` nor `=0` are spelled out over all
/// locations, refused beyond `budget` conjuncts.
pub fn game_to_formula(g: &Game, budget: usize) -> Result<Formula, ReductionError> {
    let rows = g.rows().ok_or(ReductionError::ImplicitAcceptance)?;
    let (alphabet, bound) = (g.alphabet().as_ref(), g.bound());
    let mut table = Vec::new();
    for row in rows {
        match row {
            Row::Table(r) => table.push(r.clone()),
            Row::Family(f) => table.extend(f.expand(alphabet, bound)),
        }
    }
    let total = crate::abstraction::location_count(alphabet.len(), bound);
    let mut disjuncts = Vec::new();
    for row in &table {
        let mut conj = Vec::new();
        for (loc, cond) in &row.explicit {
            for ty in ProcType::ALL {
                let c = cond.0[ty.index()];
                if c != CountConstraint::ANY {
                    conj.push(counting(c, ty, alphabet, bound, loc));
                }
            }
        }
        for ty in ProcType::ALL {
            let d = row.default.0[ty.index()];
            if d == CountConstraint::ANY {
                continue;
            }
            if d == CountConstraint::NONE {
                // Every process of this type sits at a listed location.
                let listed = Formula::disj(row.explicit.keys().map(|l| class_profile(alphabet, bound, l, "y")));
                conj.push(Formula::forall(
                    "y",
                    Formula::Implies(Box::new(Formula::Type(ty, "y".into())), Box::new(listed)),
                ));
                continue;
            }
            if total > budget as u128 {
                return Err(ReductionError::Budget { needed: total, budget });
            }
            for loc in all_locations(alphabet.len(), bound).filter(|l| !row.explicit.contains_key(l)) {
                conj.push(counting(d, ty, alphabet, bound, &loc));
            }
        }
        disjuncts.push(Formula::conj(conj));
    }
    Ok(Formula::disj(disjuncts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::Configuration;
    use crate::logic::parse_formula;
    use crate::solver::{solve, SolveOptions};

    #[test]
    fn class_profile_counts_letters() {
        let ab = Alphabet::new(["a"], ["d"]).unwrap();
        let f = class_profile(&ab, 3, &Location::from_counts(&[3, 1]), "y");
        assert_eq!(f.to_string().matches("E>=3").count(), 1);
        assert_eq!(f.to_string().matches("E==1").count(), 1);
    }

    #[test]
    fn explicit_and_implicit_compilations_agree() {
        let ab = Arc::new(Alphabet::new(["a"], ["d"]).unwrap());
        let f = parse_formula("A x. (d(x) -> E y. (x ~ y & a(y)))", &ab).unwrap();
        let implicit = formula_to_game(&f, &ab, None).unwrap();
        let explicit = formula_to_game_explicit(&f, &ab, None, normalform::DEFAULT_BUDGET).unwrap();
        for k in [[0, 0, 2], [1, 1, 1], [0, 1, 0], [2, 0, 1]] {
            let c: Configuration = implicit.initial(k);
            let a = solve(&implicit, &c, SolveOptions::default()).unwrap().0.winner;
            let b = solve(&explicit, &c, SolveOptions::default()).unwrap().0.winner;
            assert_eq!(a, b, "{k:?}");
        }
    }

    #[test]
    fn empty_game_inverts_to_false() {
        let ab = Arc::new(Alphabet::new(["a"], ["d"]).unwrap());
        let g = Game::new(ab, 1, vec![]).unwrap();
        assert_eq!(game_to_formula(&g, 1000).unwrap(), Formula::False);
    }
}
