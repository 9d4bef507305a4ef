//! Parameterized vector games: acceptance conditions, transitions and plays.
//!
//! A game fixes an alphabet split between System and Environment, a letter bound
//! `B`, and an acceptance condition over configurations. Players alternately move
//! tokens forward along their own letters; System must reach accepting
//! configurations and Environment must leave them.

mod moves;
mod play;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::abstraction::{location_count, Configuration, CountConstraint, Location, ShapeError, Triple};
use crate::logic::{parse_alphabet, parse_formula, Alphabet, Formula, Interpretation, ProcType, Side};
use crate::normalform::{self, NormalFormError};

pub use moves::{estimate_branching, for_each_effective_move, MoveCaps, Moved};
pub use play::{validate_play, Play, PlayViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    NormalForm(#[from] NormalFormError),
    #[error("{0}")]
    Parse(String),
    #[error("transition moves tokens of a type that {side} does not control")]
    WrongSide { side: Side },
    #[error("transition from {from} to {to} does not follow {side} letters")]
    NotReachable { from: String, to: String, side: Side },
    #[error("transition is not applicable: not enough tokens at {0}")]
    NotApplicable(String),
    #[error("row family hit condition must reject empty locations")]
    FamilyHitAcceptsZero,
}

/// Per-type constraints `(⋈_s n_s, ⋈_e n_e, ⋈_se n_se)` on one location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalCondition(pub [CountConstraint; 3]);

impl LocalCondition {
    pub const ANY: LocalCondition = LocalCondition([CountConstraint::ANY; 3]);
    pub const EMPTY: LocalCondition = LocalCondition([CountConstraint::NONE; 3]);

    pub fn new(s: CountConstraint, e: CountConstraint, se: CountConstraint) -> LocalCondition {
        LocalCondition([s, e, se])
    }

    /// `(=0, =0, c)`: only shared tokens, constrained by `c`.
    pub fn shared(c: CountConstraint) -> LocalCondition {
        LocalCondition([CountConstraint::NONE, CountConstraint::NONE, c])
    }

    pub fn holds(&self, t: Triple) -> bool {
        self.0.iter().zip(t).all(|(c, n)| c.holds(n))
    }

    pub fn max_constant(&self) -> u32 {
        self.0.iter().map(|c| c.n).max().unwrap_or(0)
    }

    fn to_json(self) -> Value {
        json!(self.0.iter().map(ToString::to_string).collect::<Vec<_>>())
    }

    fn from_json(v: &Value) -> Result<LocalCondition, ShapeError> {
        let bad = || ShapeError::Json(format!("invalid local condition {v}"));
        let items = v.as_array().filter(|a| a.len() == 3).ok_or_else(bad)?;
        let mut out = [CountConstraint::ANY; 3];
        for (slot, item) in out.iter_mut().zip(items) {
            *slot = item.as_str().and_then(CountConstraint::parse).ok_or_else(bad)?;
        }
        Ok(LocalCondition(out))
    }
}

impl fmt::Display for LocalCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A row of the acceptance condition: explicit conditions on some locations and
/// a default for every other location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcceptanceRow {
    pub explicit: BTreeMap<Location, LocalCondition>,
    pub default: LocalCondition,
}

impl AcceptanceRow {
    pub fn new(default: LocalCondition) -> AcceptanceRow {
        AcceptanceRow {
            explicit: BTreeMap::new(),
            default,
        }
    }

    pub fn with(mut self, loc: Location, cond: LocalCondition) -> AcceptanceRow {
        self.explicit.insert(loc, cond);
        self
    }

    pub fn condition(&self, loc: &Location) -> LocalCondition {
        self.explicit.get(loc).copied().unwrap_or(self.default)
    }

    fn holds(&self, c: &Configuration, total_locations: u128) -> bool {
        if !self.explicit.iter().all(|(loc, cond)| cond.holds(c.get(loc))) {
            return false;
        }
        let mut seen = self.explicit.len() as u128;
        for (loc, t) in c.iter() {
            if !self.explicit.contains_key(loc) {
                seen += 1;
                if !self.default.holds(t) {
                    return false;
                }
            }
        }
        seen >= total_locations || self.default.holds([0; 3])
    }
}

/// Location predicates used by [`RowFamily`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocationFilter {
    /// Fewer System letters than Environment letters.
    SysBelowEnv,
}

impl LocationFilter {
    pub fn matches(self, loc: &Location, alphabet: &Alphabet) -> bool {
        match self {
            LocationFilter::SysBelowEnv => {
                loc.side_weight(alphabet, Side::System) < loc.side_weight(alphabet, Side::Environment)
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            LocationFilter::SysBelowEnv => "sys_below_env",
        }
    }
}

/// One row per location `ℓ` matching `filter`: `hit` at `ℓ` and `rest` everywhere
/// else. Stored as a predicate instead of materialized rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowFamily {
    pub filter: LocationFilter,
    pub hit: LocalCondition,
    pub rest: LocalCondition,
}

impl RowFamily {
    fn holds(&self, c: &Configuration, alphabet: &Alphabet, total_locations: u128) -> bool {
        let bad: Vec<&Location> = c
            .iter()
            .filter(|(_, t)| !self.rest.holds(*t))
            .map(|(l, _)| l)
            .collect();
        if bad.len() > 1 {
            return false;
        }
        let unoccupied_ok = (c.occupied() as u128) >= total_locations || self.rest.holds([0; 3]);
        if !unoccupied_ok {
            // An empty location would violate `rest`; it could only be the hit,
            // but `hit` rejects empty locations.
            return false;
        }
        c.iter().any(|(l, t)| {
            self.filter.matches(l, alphabet)
                && self.hit.holds(t)
                && bad.iter().all(|b| *b == l)
        })
    }

    /// The rows this family stands for.
    pub fn expand(&self, alphabet: &Alphabet, bound: u8) -> Vec<AcceptanceRow> {
        crate::abstraction::all_locations(alphabet.len(), bound)
            .filter(|l| self.filter.matches(l, alphabet))
            .map(|l| AcceptanceRow::new(self.rest).with(l, self.hit))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Row {
    Table(AcceptanceRow),
    Family(RowFamily),
}

impl Row {
    fn max_constant(&self) -> u32 {
        match self {
            Row::Table(r) => r
                .explicit
                .values()
                .map(LocalCondition::max_constant)
                .chain([r.default.max_constant()])
                .max()
                .unwrap_or(0),
            Row::Family(f) => f.hit.max_constant().max(f.rest.max_constant()),
        }
    }
}

/// The acceptance condition `F` of a game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    /// A finite disjunction of rows.
    Explicit(Vec<Row>),
    /// A class-only sentence, evaluated on representatives of configurations.
    Formula(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    alphabet: Arc<Alphabet>,
    bound: u8,
    acceptance: Acceptance,
    total_locations: u128,
}

impl Game {
    pub fn new(alphabet: Arc<Alphabet>, bound: u8, rows: Vec<Row>) -> Result<Game, GameError> {
        if bound == 0 {
            return Err(NormalFormError::ZeroBound.into());
        }
        for row in &rows {
            match row {
                Row::Table(r) => {
                    for loc in r.explicit.keys() {
                        check_location(loc, &alphabet, bound)?;
                    }
                }
                Row::Family(f) if f.hit.holds([0; 3]) => return Err(GameError::FamilyHitAcceptsZero),
                Row::Family(_) => {}
            }
        }
        Ok(Game {
            total_locations: location_count(alphabet.len(), bound),
            alphabet,
            bound,
            acceptance: Acceptance::Explicit(rows),
        })
    }

    /// A game accepting the configurations whose representatives satisfy `f`.
    ///
    /// The bound must reach the formula's threshold unless `override_bound` is set,
    /// in which case the caller vouches that `bound` suffices.
    pub fn with_formula(
        alphabet: Arc<Alphabet>,
        bound: u8,
        f: Formula,
        override_bound: bool,
    ) -> Result<Game, GameError> {
        if bound == 0 {
            return Err(NormalFormError::ZeroBound.into());
        }
        let needed = normalform::threshold(&f)?;
        if !f.is_sentence() {
            return Err(NormalFormError::NotASentence.into());
        }
        for a in f.actions() {
            if alphabet.index_of(&a).is_none() {
                return Err(ShapeError::UnknownAction(a).into());
            }
        }
        if bound < needed && !override_bound {
            return Err(NormalFormError::BoundTooSmall { needed, found: bound }.into());
        }
        Ok(Game {
            total_locations: location_count(alphabet.len(), bound),
            alphabet,
            bound,
            acceptance: Acceptance::Formula(f),
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn bound(&self) -> u8 {
        self.bound
    }

    pub fn acceptance(&self) -> &Acceptance {
        &self.acceptance
    }

    pub fn rows(&self) -> Option<&[Row]> {
        match &self.acceptance {
            Acceptance::Explicit(rows) => Some(rows),
            Acceptance::Formula(_) => None,
        }
    }

    /// Number of rows, counting each member of a row family.
    pub fn row_count(&self) -> Option<usize> {
        let rows = self.rows()?;
        Some(
            rows.iter()
                .map(|r| match r {
                    Row::Table(_) => 1,
                    Row::Family(f) => f.expand(&self.alphabet, self.bound).len(),
                })
                .sum(),
        )
    }

    /// Largest constant in the acceptance condition, when it is explicit.
    pub fn max_constant(&self) -> Option<u32> {
        self.rows()
            .map(|rows| rows.iter().map(Row::max_constant).max().unwrap_or(0))
    }

    /// `C_k`: all tokens at the origin.
    pub fn initial(&self, k: Triple) -> Configuration {
        Configuration::initial(self.alphabet.len(), self.bound, k)
    }

    pub fn check_shape(&self, c: &Configuration) -> Result<(), ShapeError> {
        if c.arity() != self.alphabet.len() {
            return Err(ShapeError::Arity {
                expected: self.alphabet.len(),
                found: c.arity(),
            });
        }
        if c.bound() != self.bound {
            return Err(ShapeError::Bound {
                expected: self.bound,
                found: c.bound(),
            });
        }
        Ok(())
    }

    /// `C ⊨ F`.
    pub fn accepts(&self, c: &Configuration) -> Result<bool, GameError> {
        self.check_shape(c)?;
        Ok(self.accepts_unchecked(c))
    }

    pub(crate) fn accepts_unchecked(&self, c: &Configuration) -> bool {
        match &self.acceptance {
            Acceptance::Explicit(rows) => rows.iter().any(|row| match row {
                Row::Table(r) => r.holds(c, self.total_locations),
                Row::Family(f) => f.holds(c, &self.alphabet, self.total_locations),
            }),
            Acceptance::Formula(f) => {
                let x = crate::abstraction::canonical_execution(c, &self.alphabet);
                crate::logic::model_check(&x, f, &Interpretation::new())
                    .expect("formula was validated against the alphabet")
            }
        }
    }

    /// Effective moves of `side` within `caps` whose result satisfies (System) or
    /// falsifies (Environment) the acceptance condition, in a fixed order.
    pub fn legal_moves(
        &self,
        c: &Configuration,
        side: Side,
        caps: MoveCaps,
    ) -> Result<Vec<(Transition, Configuration)>, GameError> {
        self.check_shape(c)?;
        let mut out = Vec::new();
        for_each_effective_move(&self.alphabet, c, side, caps, |moved, d| {
            if self.accepts_unchecked(d) == (side == Side::System) {
                out.push((Transition::from_moved(side, moved), d.clone()));
            }
            std::ops::ControlFlow::Continue(())
        });
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let acceptance = match &self.acceptance {
            Acceptance::Explicit(rows) => {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|row| match row {
                        Row::Table(r) => {
                            let locs: Vec<Value> = r
                                .explicit
                                .iter()
                                .map(|(l, c)| json!({"loc": l.to_json(&self.alphabet), "cond": c.to_json()}))
                                .collect();
                            json!({"default": r.default.to_json(), "locs": locs})
                        }
                        Row::Family(f) => json!({
                            "family": f.filter.name(),
                            "hit": f.hit.to_json(),
                            "rest": f.rest.to_json(),
                        }),
                    })
                    .collect();
                json!({"kind": "explicit", "rows": rows})
            }
            Acceptance::Formula(f) => json!({"kind": "formula", "text": f.to_string()}),
        };
        json!({
            "sys": self.alphabet.sys(),
            "env": self.alphabet.env(),
            "B": self.bound,
            "acceptance": acceptance,
        })
    }

    /// Reads the game JSON format. Formula-backed games may set
    /// `"bound_override": true` to accept a bound below the formula's threshold.
    pub fn from_json(v: &Value) -> Result<Game, GameError> {
        let bad = |m: &str| GameError::Shape(ShapeError::Json(m.to_string()));
        let names = |key: &str| -> Result<Vec<String>, GameError> {
            match v.get(key) {
                None => Ok(Vec::new()),
                Some(list) => list
                    .as_array()
                    .ok_or_else(|| bad(&format!("`{key}` must be a list of action names")))?
                    .iter()
                    .map(|n| {
                        n.as_str()
                            .map(str::to_string)
                            .ok_or_else(|| bad(&format!("`{key}` must be a list of action names")))
                    })
                    .collect(),
            }
        };
        let (sys, env) = (names("sys")?, names("env")?);
        let decl = format!("sys: {}; env: {};", sys.join(" "), env.join(" "));
        let alphabet = Arc::new(parse_alphabet(&decl).map_err(|e| GameError::Parse(e.to_string()))?);
        let bound = v
            .get("B")
            .and_then(Value::as_u64)
            .filter(|&b| (1..=u8::MAX as u64).contains(&b))
            .ok_or_else(|| bad("missing or invalid `B`"))? as u8;
        let acc = v.get("acceptance").ok_or_else(|| bad("missing `acceptance`"))?;
        match acc.get("kind").and_then(Value::as_str) {
            Some("formula") => {
                let text = acc
                    .get("text")
                    .and_then(Value::as_str)
                    .ok_or_else(|| bad("formula acceptance needs `text`"))?;
                let f = parse_formula(text, &alphabet).map_err(|e| GameError::Parse(e.to_string()))?;
                let override_bound = acc
                    .get("bound_override")
                    .and_then(Value::as_bool)
                    .unwrap_or(false);
                Game::with_formula(alphabet, bound, f, override_bound)
            }
            Some("explicit") => {
                let mut rows = Vec::new();
                for row in acc
                    .get("rows")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("explicit acceptance needs `rows`"))?
                {
                    if let Some(name) = row.get("family") {
                        let filter = match name.as_str() {
                            Some("sys_below_env") => LocationFilter::SysBelowEnv,
                            _ => return Err(bad("unknown row family")),
                        };
                        rows.push(Row::Family(RowFamily {
                            filter,
                            hit: LocalCondition::from_json(row.get("hit").unwrap_or(&Value::Null))?,
                            rest: LocalCondition::from_json(row.get("rest").unwrap_or(&Value::Null))?,
                        }));
                        continue;
                    }
                    let default = match row.get("default") {
                        Some(d) => LocalCondition::from_json(d)?,
                        None => LocalCondition::EMPTY,
                    };
                    let mut r = AcceptanceRow::new(default);
                    if let Some(locs) = row.get("locs") {
                        for entry in locs.as_array().ok_or_else(|| bad("`locs` must be a list"))? {
                            let loc = Location::from_json(
                                entry.get("loc").unwrap_or(&Value::Null),
                                &alphabet,
                                bound,
                            )?;
                            let cond = LocalCondition::from_json(entry.get("cond").unwrap_or(&Value::Null))?;
                            r.explicit.insert(loc, cond);
                        }
                    }
                    rows.push(Row::Table(r));
                }
                Game::new(alphabet, bound, rows)
            }
            _ => Err(bad("acceptance `kind` must be `explicit` or `formula`")),
        }
    }
}

fn check_location(loc: &Location, alphabet: &Alphabet, bound: u8) -> Result<(), ShapeError> {
    if loc.arity() != alphabet.len() {
        return Err(ShapeError::Arity {
            expected: alphabet.len(),
            found: loc.arity(),
        });
    }
    if let Some(a) = (0..loc.arity()).find(|&a| loc.get(a) > bound) {
        return Err(ShapeError::AboveBound {
            action: alphabet.name(a).to_string(),
            count: loc.get(a) as u64,
            bound,
        });
    }
    Ok(())
}

/// A simultaneous movement of tokens owned by one player. Stationary tokens are
/// not recorded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    side: Side,
    moves: BTreeMap<(Location, Location), Triple>,
}

impl Transition {
    /// The transition moving nothing.
    pub fn identity(side: Side) -> Transition {
        Transition {
            side,
            moves: BTreeMap::new(),
        }
    }

    pub fn from_moved(side: Side, moved: &[Moved]) -> Transition {
        let mut t = Transition::identity(side);
        for m in moved {
            t.moves.entry((m.from.clone(), m.to.clone())).or_insert([0; 3])[m.ty.index()] += m.count;
        }
        t
    }

    /// Adds `n` tokens of type `ty` moving from `from` to `to`, checking that the
    /// side controls the type and that `to` extends `from` by the side's letters.
    pub fn add(
        &mut self,
        alphabet: &Alphabet,
        bound: u8,
        from: Location,
        to: Location,
        ty: ProcType,
        n: u32,
    ) -> Result<(), GameError> {
        if !ty.serves(self.side) {
            return Err(GameError::WrongSide { side: self.side });
        }
        check_location(&from, alphabet, bound)?;
        check_location(&to, alphabet, bound)?;
        if !from.reaches(&to, alphabet.letters_of(self.side), bound) {
            return Err(GameError::NotReachable {
                from: from.display(alphabet).to_string(),
                to: to.display(alphabet).to_string(),
                side: self.side,
            });
        }
        if n == 0 || from == to {
            return Ok(());
        }
        self.moves.entry((from, to)).or_insert([0; 3])[ty.index()] += n;
        Ok(())
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_identity(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn moves(&self) -> impl Iterator<Item = (&Location, &Location, Triple)> + '_ {
        self.moves.iter().map(|((f, t), n)| (f, t, *n))
    }

    /// Number of tokens that move.
    pub fn moved_tokens(&self) -> u32 {
        self.moves.values().flatten().sum()
    }

    /// `out_τ(ℓ) ≤ C(ℓ)` for every location.
    pub fn applicable(&self, c: &Configuration) -> bool {
        let mut out: BTreeMap<&Location, Triple> = BTreeMap::new();
        for ((from, _), n) in &self.moves {
            let slot = out.entry(from).or_insert([0; 3]);
            for i in 0..3 {
                slot[i] += n[i];
            }
        }
        out.iter().all(|(loc, n)| {
            let have = c.get(loc);
            (0..3).all(|i| n[i] <= have[i])
        })
    }

    /// `τ(C)`.
    pub fn apply(&self, c: &Configuration) -> Result<Configuration, GameError> {
        if !self.applicable(c) {
            let loc = self
                .moves
                .keys()
                .map(|(f, _)| f)
                .next()
                .map(|l| format!("{l:?}"))
                .unwrap_or_default();
            return Err(GameError::NotApplicable(loc));
        }
        let mut next = c.clone();
        for ((from, to), n) in &self.moves {
            for ty in ProcType::ALL {
                let k = n[ty.index()];
                let removed = next.remove(from, ty, k);
                debug_assert!(removed);
                next.add(to, ty, k);
            }
        }
        Ok(next)
    }

    /// Records `{from, to, count, type}`, one per moved type.
    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let mut records = Vec::new();
        for ((from, to), n) in &self.moves {
            for ty in ProcType::ALL {
                if n[ty.index()] > 0 {
                    records.push(json!({
                        "from": from.to_json(alphabet),
                        "to": to.to_json(alphabet),
                        "count": n[ty.index()],
                        "type": ty.name(),
                    }));
                }
            }
        }
        json!({"side": side_name(self.side), "moves": records})
    }

    pub fn from_json(v: &Value, alphabet: &Alphabet, bound: u8) -> Result<Transition, GameError> {
        let bad = |m: &str| GameError::Shape(ShapeError::Json(m.to_string()));
        let side = match v.get("side").and_then(Value::as_str) {
            Some("system") => Side::System,
            Some("environment") => Side::Environment,
            _ => return Err(bad("transition `side` must be `system` or `environment`")),
        };
        let mut t = Transition::identity(side);
        for m in v
            .get("moves")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("transition needs `moves`"))?
        {
            let from = Location::from_json(m.get("from").unwrap_or(&Value::Null), alphabet, bound)?;
            let to = Location::from_json(m.get("to").unwrap_or(&Value::Null), alphabet, bound)?;
            let count = m
                .get("count")
                .and_then(Value::as_u64)
                .filter(|&n| n <= u32::MAX as u64)
                .ok_or_else(|| bad("move needs a `count`"))? as u32;
            let ty = m
                .get("type")
                .and_then(Value::as_str)
                .and_then(ProcType::from_name)
                .ok_or_else(|| bad("move needs a `type` among s, e, se"))?;
            t.add(alphabet, bound, from, to, ty, count)?;
        }
        Ok(t)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> TransitionDisplay<'a> {
        TransitionDisplay { t: self, alphabet }
    }
}

pub(crate) fn side_name(side: Side) -> &'static str {
    match side {
        Side::System => "system",
        Side::Environment => "environment",
    }
}

pub struct TransitionDisplay<'a> {
    t: &'a Transition,
    alphabet: &'a Alphabet,
}

impl fmt::Display for TransitionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_identity() {
            return write!(f, "{}: pass", side_name(self.t.side));
        }
        write!(f, "{}:", side_name(self.t.side))?;
        for ((from, to), n) in &self.t.moves {
            for ty in ProcType::ALL {
                if n[ty.index()] > 0 {
                    write!(
                        f,
                        " {}x{} {}->{}",
                        n[ty.index()],
                        ty,
                        from.display(self.alphabet),
                        to.display(self.alphabet)
                    )?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::location_of;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a"], ["d"]).unwrap())
    }

    fn loc(word: &[&str]) -> Location {
        location_of(word, &ab(), 3).unwrap()
    }

    #[test]
    fn empty_row_list_accepts_nothing() {
        let g = Game::new(ab(), 3, vec![]).unwrap();
        assert!(!g.accepts(&g.initial([0, 0, 0])).unwrap());
        assert!(!g.accepts(&g.initial([1, 2, 3])).unwrap());
    }

    #[test]
    fn defaults_cover_unlisted_locations() {
        let g = Game::new(
            ab(),
            3,
            vec![Row::Table(
                AcceptanceRow::new(LocalCondition::ANY).with(loc(&["a", "a"]), LocalCondition::EMPTY),
            )],
        )
        .unwrap();
        assert!(g.accepts(&g.initial([0, 0, 4])).unwrap());
        let mut c = g.initial([0, 0, 1]);
        assert!(c.remove(&Location::zero(2), ProcType::Both, 1));
        c.add(&loc(&["a", "a"]), ProcType::Both, 1);
        assert!(!g.accepts(&c).unwrap());
        // A default that rejects empty locations fails unless every location is listed
        // or occupied.
        let strict = Game::new(
            ab(),
            1,
            vec![Row::Table(AcceptanceRow::new(LocalCondition::shared(CountConstraint::ge(1))))],
        )
        .unwrap();
        let zero = Location::zero(2);
        let full = Configuration::from_entries(
            2,
            1,
            crate::abstraction::all_locations(2, 1).map(|l| (l, [0, 0, 1])),
        );
        assert!(strict.accepts(&full).unwrap());
        assert!(!strict.accepts(&Configuration::initial(2, 1, [0, 0, 5])).unwrap());
        assert_eq!(full.get(&zero), [0, 0, 1]);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = Game::new(ab(), 3, vec![]).unwrap();
        assert!(matches!(
            g.accepts(&Configuration::initial(2, 2, [0, 0, 1])),
            Err(GameError::Shape(ShapeError::Bound { .. }))
        ));
    }

    #[test]
    fn applicability_and_application() {
        let ab = ab();
        let c = Configuration::initial(2, 3, [0, 0, 1]);
        assert!(Transition::identity(Side::System).applicable(&c));
        let mut one = Transition::identity(Side::System);
        one.add(&ab, 3, Location::zero(2), loc(&["a"]), ProcType::Both, 1).unwrap();
        assert!(one.applicable(&c));
        let mut two = Transition::identity(Side::System);
        two.add(&ab, 3, Location::zero(2), loc(&["a"]), ProcType::Both, 2).unwrap();
        assert!(!two.applicable(&c));
        assert!(two.apply(&c).is_err());
        let d = one.apply(&c).unwrap();
        let mut next = Transition::identity(Side::System);
        next.add(&ab, 3, loc(&["a"]), loc(&["a", "a"]), ProcType::Both, 1).unwrap();
        let e = next.apply(&d).unwrap();
        assert_eq!(e, Configuration::from_entries(2, 3, [(loc(&["a", "a"]), [0, 0, 1])]));
    }

    #[test]
    fn transitions_respect_sides() {
        let ab = ab();
        let mut t = Transition::identity(Side::System);
        assert!(matches!(
            t.add(&ab, 3, Location::zero(2), loc(&["a"]), ProcType::Env, 1),
            Err(GameError::WrongSide { .. })
        ));
        assert!(matches!(
            t.add(&ab, 3, Location::zero(2), loc(&["d"]), ProcType::Both, 1),
            Err(GameError::NotReachable { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let g = Game::new(
            ab(),
            3,
            vec![
                Row::Table(AcceptanceRow::new(LocalCondition::ANY).with(loc(&["a", "a"]), LocalCondition::EMPTY)),
                Row::Family(RowFamily {
                    filter: LocationFilter::SysBelowEnv,
                    hit: LocalCondition::shared(CountConstraint::ge(1)),
                    rest: LocalCondition::ANY,
                }),
            ],
        )
        .unwrap();
        let back = Game::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        let f = Game::with_formula(ab(), 1, parse_formula("E x. a(x)", &ab()).unwrap(), false).unwrap();
        assert_eq!(Game::from_json(&f.to_json()).unwrap(), f);
        let mut t = Transition::identity(Side::Environment);
        t.add(&ab(), 3, Location::zero(2), loc(&["d", "d"]), ProcType::Both, 2).unwrap();
        assert_eq!(Transition::from_json(&t.to_json(&ab()), &ab(), 3).unwrap(), t);
    }

    #[test]
    fn family_rows_match_their_expansion() {
        let ab = ab();
        let fam = RowFamily {
            filter: LocationFilter::SysBelowEnv,
            hit: LocalCondition::shared(CountConstraint::ge(1)),
            rest: LocalCondition::shared(CountConstraint::ANY),
        };
        let lazy = Game::new(ab.clone(), 2, vec![Row::Family(fam.clone())]).unwrap();
        let eager = Game::new(
            ab.clone(),
            2,
            fam.expand(&ab, 2).into_iter().map(Row::Table).collect(),
        )
        .unwrap();
        let locs: Vec<Location> = crate::abstraction::all_locations(2, 2).collect();
        for i in 0..locs.len() {
            for j in 0..locs.len() {
                for ty in [ProcType::Both, ProcType::Sys] {
                    let c = Configuration::from_entries(
                        2,
                        2,
                        [(locs[i].clone(), [0, 0, 1]), (locs[j].clone(), {
                            let mut t = [0; 3];
                            t[ty.index()] = 1;
                            t
                        })],
                    );
                    assert_eq!(lazy.accepts(&c).unwrap(), eager.accepts(&c).unwrap());
                }
            }
        }
    }
}
