//! Locations, configurations, and the bridge between executions and configurations.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use smallvec::SmallVec;
use thiserror::Error;

use crate::logic::{Alphabet, Event, Execution, ProcId, ProcType, ProcessUniverse, Side};

/// Token counts for the types s, e and se, in that order.
pub type Triple = [u32; 3];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("count {count} for `{action}` exceeds the bound {bound}")]
    AboveBound { action: String, count: u64, bound: u8 },
    #[error("location has {found} letters, expected {expected}")]
    Arity { expected: usize, found: usize },
    #[error("bound {found} differs from the expected bound {expected}")]
    Bound { expected: u8, found: u8 },
    #[error("malformed JSON: {0}")]
    Json(String),
}

/// Comparison used in count constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Eq,
    Ge,
}

/// `⋈ n` for `⋈ ∈ {=, ≥}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountConstraint {
    pub cmp: Cmp,
    pub n: u32,
}

impl CountConstraint {
    pub const ANY: CountConstraint = CountConstraint { cmp: Cmp::Ge, n: 0 };
    pub const NONE: CountConstraint = CountConstraint { cmp: Cmp::Eq, n: 0 };

    pub fn eq(n: u32) -> CountConstraint {
        CountConstraint { cmp: Cmp::Eq, n }
    }

    pub fn ge(n: u32) -> CountConstraint {
        CountConstraint { cmp: Cmp::Ge, n }
    }

    pub fn holds(self, value: u32) -> bool {
        match self.cmp {
            Cmp::Eq => value == self.n,
            Cmp::Ge => value >= self.n,
        }
    }

    /// Accepts `=n`, `≥n` and `>=n`.
    pub fn parse(text: &str) -> Option<CountConstraint> {
        let text = text.trim();
        let (cmp, rest) = if let Some(rest) = text.strip_prefix('\u{2265}') {
            (Cmp::Ge, rest)
        } else if let Some(rest) = text.strip_prefix(">=") {
            (Cmp::Ge, rest)
        } else {
            (Cmp::Eq, text.strip_prefix('=')?)
        };
        rest.trim().parse().ok().map(|n| CountConstraint { cmp, n })
    }
}

impl fmt::Display for CountConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cmp {
            Cmp::Eq => write!(f, "={}", self.n),
            Cmp::Ge => write!(f, "\u{2265}{}", self.n),
        }
    }
}

/// Per-letter occurrence counts, each capped at the game's bound `B`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Location(SmallVec<[u8; 8]>);

impl Location {
    pub fn zero(arity: usize) -> Location {
        Location(SmallVec::from_elem(0, arity))
    }

    pub fn from_counts(counts: &[u8]) -> Location {
        Location(SmallVec::from_slice(counts))
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, letter: usize) -> u8 {
        self.0[letter]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `ℓ + a`: increments the count of `letter`, saturating at `bound`.
    pub fn plus(&self, letter: usize, bound: u8) -> Location {
        let mut next = self.clone();
        next.0[letter] = next.0[letter].saturating_add(1).min(bound);
        next
    }

    pub fn plus_word(&self, word: &[usize], bound: u8) -> Location {
        let mut next = self.clone();
        for &a in word {
            next.0[a] = next.0[a].saturating_add(1).min(bound);
        }
        next
    }

    /// Total number of recorded letters.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&c| c as u32).sum()
    }

    pub fn side_weight(&self, alphabet: &Alphabet, side: Side) -> u32 {
        alphabet
            .letters_of(side)
            .map(|a| self.0[a] as u32)
            .sum()
    }

    /// Whether `target = self + w` for some word `w` over `letters`, given that
    /// counts saturate at `bound`.
    pub fn reaches(&self, target: &Location, letters: std::ops::Range<usize>, bound: u8) -> bool {
        self.arity() == target.arity()
            && self.0.iter().zip(target.0.iter()).enumerate().all(|(a, (&x, &y))| {
                if letters.contains(&a) {
                    x <= y && y <= bound
                } else {
                    x == y
                }
            })
    }

    /// Length of the shortest word leading from `self` to `target`.
    pub fn distance(&self, target: &Location) -> u32 {
        self.0
            .iter()
            .zip(target.0.iter())
            .map(|(&x, &y)| y.saturating_sub(x) as u32)
            .sum()
    }

    /// The shortest word from `self` to `target`, letters in alphabet order.
    pub fn word_to(&self, target: &Location) -> Vec<usize> {
        let mut word = Vec::new();
        for (a, (&x, &y)) in self.0.iter().zip(target.0.iter()).enumerate() {
            word.extend(std::iter::repeat_n(a, y.saturating_sub(x) as usize));
        }
        word
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> LocationDisplay<'a> {
        LocationDisplay {
            loc: self,
            alphabet,
        }
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let map: BTreeMap<&str, u8> = (0..alphabet.len())
            .map(|a| (alphabet.name(a), self.0[a]))
            .collect();
        json!(map)
    }

    pub fn from_json(value: &Value, alphabet: &Alphabet, bound: u8) -> Result<Location, ShapeError> {
        let map = value
            .as_object()
            .ok_or_else(|| ShapeError::Json(format!("expected a location object, found {value}")))?;
        let mut loc = Location::zero(alphabet.len());
        for (name, count) in map {
            let a = alphabet
                .index_of(name)
                .ok_or_else(|| ShapeError::UnknownAction(name.clone()))?;
            let count = count
                .as_u64()
                .ok_or_else(|| ShapeError::Json(format!("count for `{name}` is not a natural")))?;
            if count > bound as u64 {
                return Err(ShapeError::AboveBound {
                    action: name.clone(),
                    count,
                    bound,
                });
            }
            loc.0[a] = count as u8;
        }
        Ok(loc)
    }
}

pub struct LocationDisplay<'a> {
    loc: &'a Location,
    alphabet: &'a Alphabet,
}

impl fmt::Display for LocationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .loc
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| match c {
                1 => self.alphabet.name(a).to_string(),
                _ => format!("{}^{c}", self.alphabet.name(a)),
            })
            .collect();
        write!(f, "<{}>", parts.join(" "))
    }
}

/// `ℓ + w` for a word given by action names.
pub fn loc_add(loc: &Location, word: &[&str], alphabet: &Alphabet, bound: u8) -> Result<Location, ShapeError> {
    let letters = word
        .iter()
        .map(|name| {
            alphabet
                .index_of(name)
                .ok_or_else(|| ShapeError::UnknownAction(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(loc.plus_word(&letters, bound))
}

/// `⟨w⟩ = ℓ0 + w`.
pub fn location_of(word: &[&str], alphabet: &Alphabet, bound: u8) -> Result<Location, ShapeError> {
    loc_add(&Location::zero(alphabet.len()), word, alphabet, bound)
}

/// Number of locations `(B+1)^|A|`, saturating at `u128::MAX`.
pub fn location_count(arity: usize, bound: u8) -> u128 {
    (0..arity).fold(1u128, |acc, _| acc.saturating_mul(bound as u128 + 1))
}

/// All locations in lexicographic order of their count vectors.
pub fn all_locations(arity: usize, bound: u8) -> impl Iterator<Item = Location> {
    let mut next = Some(Location::zero(arity));
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for a in (0..arity).rev() {
            if succ.0[a] < bound {
                succ.0[a] += 1;
                next = Some(succ);
                break;
            }
            succ.0[a] = 0;
        }
        Some(current)
    })
}

/// A process type paired with a location.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Profile {
    pub ty: ProcType,
    pub loc: Location,
}

/// A finite map from locations to token triples; locations holding no tokens are
/// not stored.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    bound: u8,
    arity: usize,
    tokens: Vec<(Location, Triple)>,
}

impl Configuration {
    pub fn empty(arity: usize, bound: u8) -> Configuration {
        Configuration {
            bound,
            arity,
            tokens: Vec::new(),
        }
    }

    /// `C_k`: all tokens at the origin.
    pub fn initial(arity: usize, bound: u8, k: Triple) -> Configuration {
        let mut c = Configuration::empty(arity, bound);
        c.set(Location::zero(arity), k);
        c
    }

    pub fn from_entries(
        arity: usize,
        bound: u8,
        entries: impl IntoIterator<Item = (Location, Triple)>,
    ) -> Configuration {
        let mut c = Configuration::empty(arity, bound);
        for (loc, t) in entries {
            for ty in ProcType::ALL {
                c.add(&loc, ty, t[ty.index()]);
            }
        }
        c
    }

    pub fn bound(&self) -> u8 {
        self.bound
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, loc: &Location) -> Triple {
        match self.tokens.binary_search_by(|(l, _)| l.cmp(loc)) {
            Ok(i) => self.tokens[i].1,
            Err(_) => [0; 3],
        }
    }

    pub fn count(&self, loc: &Location, ty: ProcType) -> u32 {
        self.get(loc)[ty.index()]
    }

    pub fn set(&mut self, loc: Location, t: Triple) {
        debug_assert_eq!(loc.arity(), self.arity);
        match self.tokens.binary_search_by(|(l, _)| l.cmp(&loc)) {
            Ok(i) if t == [0; 3] => {
                self.tokens.remove(i);
            }
            Ok(i) => self.tokens[i].1 = t,
            Err(_) if t == [0; 3] => {}
            Err(i) => self.tokens.insert(i, (loc, t)),
        }
    }

    pub fn add(&mut self, loc: &Location, ty: ProcType, n: u32) {
        if n == 0 {
            return;
        }
        let mut t = self.get(loc);
        t[ty.index()] += n;
        self.set(loc.clone(), t);
    }

    /// Removes `n` tokens of type `ty`; returns false (and changes nothing) when
    /// fewer are present.
    pub fn remove(&mut self, loc: &Location, ty: ProcType, n: u32) -> bool {
        if n == 0 {
            return true;
        }
        let mut t = self.get(loc);
        if t[ty.index()] < n {
            return false;
        }
        t[ty.index()] -= n;
        self.set(loc.clone(), t);
        true
    }

    /// Occupied locations in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = (&Location, Triple)> + '_ {
        self.tokens.iter().map(|(l, t)| (l, *t))
    }

    pub fn occupied(&self) -> usize {
        self.tokens.len()
    }

    pub fn totals(&self) -> Triple {
        let mut sum = [0; 3];
        for (_, t) in &self.tokens {
            for i in 0..3 {
                sum[i] += t[i];
            }
        }
        sum
    }

    pub fn token_count(&self) -> u32 {
        self.totals().iter().sum()
    }

    /// Total letters accumulated over all tokens; strictly increases along every
    /// effective move.
    pub fn potential(&self) -> u64 {
        self.tokens
            .iter()
            .map(|(l, t)| l.weight() as u64 * t.iter().map(|&n| n as u64).sum::<u64>())
            .sum()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let tokens: Vec<Value> = self
            .tokens
            .iter()
            .map(|(l, t)| json!({"loc": l.to_json(alphabet), "s": t[0], "e": t[1], "se": t[2]}))
            .collect();
        json!({"B": self.bound, "tokens": tokens})
    }

    pub fn from_json(value: &Value, alphabet: &Alphabet) -> Result<Configuration, ShapeError> {
        let obj = value
            .as_object()
            .ok_or_else(|| ShapeError::Json("expected a configuration object".into()))?;
        let bound = obj
            .get("B")
            .and_then(Value::as_u64)
            .filter(|&b| b <= u8::MAX as u64)
            .ok_or_else(|| ShapeError::Json("missing or invalid `B`".into()))? as u8;
        let mut c = Configuration::empty(alphabet.len(), bound);
        let empty = Vec::new();
        let tokens = match obj.get("tokens") {
            None => &empty,
            Some(v) => v
                .as_array()
                .ok_or_else(|| ShapeError::Json("`tokens` must be an array".into()))?,
        };
        for entry in tokens {
            let entry: &Map<String, Value> = entry
                .as_object()
                .ok_or_else(|| ShapeError::Json("token entry must be an object".into()))?;
            let loc = Location::from_json(
                entry.get("loc").unwrap_or(&Value::Null),
                alphabet,
                bound,
            )?;
            for ty in ProcType::ALL {
                let n = match entry.get(ty.name()) {
                    None => 0,
                    Some(v) => v
                        .as_u64()
                        .filter(|&n| n <= u32::MAX as u64)
                        .ok_or_else(|| ShapeError::Json(format!("bad `{}` count", ty.name())))?,
                };
                c.add(&loc, ty, n as u32);
            }
        }
        Ok(c)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> ConfigurationDisplay<'a> {
        ConfigurationDisplay {
            config: self,
            alphabet,
        }
    }
}

pub struct ConfigurationDisplay<'a> {
    config: &'a Configuration,
    alphabet: &'a Alphabet,
}

impl fmt::Display for ConfigurationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (l, t)) in self.config.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: ({},{},{})", l.display(self.alphabet), t[0], t[1], t[2])?;
        }
        write!(f, "}}")
    }
}

/// `C_x`: every process becomes a token at its capped letter-count vector.
pub fn abstract_execution(x: &Execution, bound: u8) -> Configuration {
    let arity = x.alphabet().len();
    let mut per_proc: BTreeMap<ProcId, Location> = x
        .universe()
        .iter()
        .map(|(_, p)| (p, Location::zero(arity)))
        .collect();
    for ev in x.events() {
        let loc = per_proc.get_mut(&ev.process).expect("process in universe");
        *loc = loc.plus(ev.action, bound);
    }
    let mut c = Configuration::empty(arity, bound);
    for (ty, p) in x.universe().iter() {
        c.add(&per_proc[&p], ty, 1);
    }
    c
}

/// A representative execution for `C`: each token becomes a fresh process with
/// exactly `ℓ(a)` occurrences of every letter `a`.
///
/// Process identifiers are numbered from 1, type by type (s, e, se), and within a
/// type by increasing location.
pub fn canonical_execution(c: &Configuration, alphabet: &Arc<Alphabet>) -> Execution {
    let universe = ProcessUniverse::with_sizes(c.totals());
    let mut next_id = [1, 1 + c.totals()[0], 1 + c.totals()[0] + c.totals()[1]];
    let mut events = Vec::new();
    for ty in ProcType::ALL {
        for (loc, t) in c.iter() {
            for _ in 0..t[ty.index()] {
                let p = ProcId(next_id[ty.index()]);
                next_id[ty.index()] += 1;
                for (a, &n) in loc.counts().iter().enumerate() {
                    for _ in 0..n {
                        events.push(Event { action: a, process: p });
                    }
                }
            }
        }
    }
    Execution::new_unchecked(alphabet.clone(), universe, events)
}
