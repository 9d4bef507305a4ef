//! Alphabets, process universes, executions and the first-order language over them.

mod eval;
mod formula;
mod parser;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{model_check, Elem, Interpretation};
pub use formula::{Formula, Relation, Var};
pub use parser::{
    parse_alphabet, parse_execution, parse_formula, parse_formula_file, parse_formula_with_free,
    ParseError,
};

/// Who owns a process: System only, Environment only, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProcType {
    #[serde(rename = "s")]
    Sys,
    #[serde(rename = "e")]
    Env,
    #[serde(rename = "se")]
    Both,
}

impl ProcType {
    pub const ALL: [ProcType; 3] = [ProcType::Sys, ProcType::Env, ProcType::Both];

    pub fn index(self) -> usize {
        match self {
            ProcType::Sys => 0,
            ProcType::Env => 1,
            ProcType::Both => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProcType::Sys => "s",
            ProcType::Env => "e",
            ProcType::Both => "se",
        }
    }

    pub fn from_name(name: &str) -> Option<ProcType> {
        match name {
            "s" => Some(ProcType::Sys),
            "e" => Some(ProcType::Env),
            "se" => Some(ProcType::Both),
            _ => None,
        }
    }

    /// Whether processes of this type can perform actions of `side`.
    pub fn serves(self, side: Side) -> bool {
        !matches!(
            (self, side),
            (ProcType::Sys, Side::Environment) | (ProcType::Env, Side::System)
        )
    }
}

impl fmt::Display for ProcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The two players.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    System,
    Environment,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::System => Side::Environment,
            Side::Environment => Side::System,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::System => "system",
            Side::Environment => "environment",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("alphabet must contain at least one action")]
    EmptyAlphabet,
    #[error("action `{0}` declared twice")]
    DuplicateAction(String),
    #[error("`{0}` is reserved and cannot name an action")]
    ReservedAction(String),
    #[error("`{0}` is not a valid action name")]
    InvalidActionName(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("process {0} declared twice")]
    DuplicateProcess(u32),
    #[error("process {0} is not in the universe")]
    UnknownProcess(u32),
    #[error("event ({action},{process}): process type {ty} cannot perform {side} actions")]
    TypeMismatch {
        action: String,
        process: u32,
        ty: ProcType,
        side: Side,
    },
    #[error("executions range over different process universes")]
    UniverseMismatch,
    #[error("executions range over different alphabets")]
    AlphabetMismatch,
    #[error("free variable `{0}` has no interpretation")]
    Uninterpreted(String),
    #[error("element {0} is not in the universe of the execution")]
    ElementOutOfRange(String),
    #[error("formula uses {0}, which is outside the requested fragment")]
    OutsideFragment(Relation),
}

pub(crate) const RESERVED: [&str; 7] = ["s", "e", "se", "E", "A", "true", "false"];

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite alphabet split into system actions and environment actions.
///
/// Letters are indexed in declaration order, system actions first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    sys: Vec<String>,
    env: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        sys: impl IntoIterator<Item = S>,
        env: impl IntoIterator<Item = S>,
    ) -> Result<Alphabet, LogicError> {
        let sys: Vec<String> = sys.into_iter().map(Into::into).collect();
        let env: Vec<String> = env.into_iter().map(Into::into).collect();
        if sys.is_empty() && env.is_empty() {
            return Err(LogicError::EmptyAlphabet);
        }
        let mut seen = BTreeSet::new();
        for name in sys.iter().chain(&env) {
            if RESERVED.contains(&name.as_str()) {
                return Err(LogicError::ReservedAction(name.clone()));
            }
            if !is_identifier(name) {
                return Err(LogicError::InvalidActionName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(LogicError::DuplicateAction(name.clone()));
            }
        }
        Ok(Alphabet { sys, env })
    }

    pub fn sys(&self) -> &[String] {
        &self.sys
    }

    pub fn env(&self) -> &[String] {
        &self.env
    }

    pub fn len(&self) -> usize {
        self.sys.len() + self.env.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn name(&self, letter: usize) -> &str {
        if letter < self.sys.len() {
            &self.sys[letter]
        } else {
            &self.env[letter - self.sys.len()]
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.sys
            .iter()
            .chain(&self.env)
            .position(|candidate| candidate == name)
    }

    pub fn side_of(&self, letter: usize) -> Side {
        if letter < self.sys.len() {
            Side::System
        } else {
            Side::Environment
        }
    }

    /// Letter indices owned by `side`.
    pub fn letters_of(&self, side: Side) -> std::ops::Range<usize> {
        match side {
            Side::System => 0..self.sys.len(),
            Side::Environment => self.sys.len()..self.len(),
        }
    }

    /// Letter indices sorted by name; used where an order independent of
    /// declaration is wanted.
    pub fn by_name(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.name(a).cmp(self.name(b)));
        order
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sys:")?;
        for a in &self.sys {
            write!(f, " {a}")?;
        }
        write!(f, "; env:")?;
        for a in &self.env {
            write!(f, " {a}")?;
        }
        write!(f, ";")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProcId(pub u32);

impl fmt::Display for ProcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Three pairwise disjoint finite sets of processes, one per type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ProcessUniverse {
    sets: [Vec<ProcId>; 3],
}

impl ProcessUniverse {
    pub fn new(sys: Vec<u32>, env: Vec<u32>, both: Vec<u32>) -> Result<ProcessUniverse, LogicError> {
        let mut seen = BTreeSet::new();
        let mut sets: [Vec<ProcId>; 3] = Default::default();
        for (slot, ids) in sets.iter_mut().zip([sys, env, both]) {
            for id in ids {
                if !seen.insert(id) {
                    return Err(LogicError::DuplicateProcess(id));
                }
                slot.push(ProcId(id));
            }
            slot.sort();
        }
        Ok(ProcessUniverse { sets })
    }

    /// Universe with `sizes[θ]` processes per type, numbered consecutively from 1
    /// in the order s, e, se.
    pub fn with_sizes(sizes: [u32; 3]) -> ProcessUniverse {
        let mut next = 1;
        let mut sets: [Vec<ProcId>; 3] = Default::default();
        for (slot, &k) in sets.iter_mut().zip(&sizes) {
            *slot = (next..next + k).map(ProcId).collect();
            next += k;
        }
        ProcessUniverse { sets }
    }

    pub fn of_type(&self, ty: ProcType) -> &[ProcId] {
        &self.sets[ty.index()]
    }

    pub fn sizes(&self) -> [u32; 3] {
        [0, 1, 2].map(|i| self.sets[i].len() as u32)
    }

    pub fn len(&self) -> usize {
        self.sets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn type_of(&self, p: ProcId) -> Option<ProcType> {
        ProcType::ALL
            .into_iter()
            .find(|ty| self.sets[ty.index()].binary_search(&p).is_ok())
    }

    /// All processes, grouped by type in the order s, e, se.
    pub fn iter(&self) -> impl Iterator<Item = (ProcType, ProcId)> + '_ {
        ProcType::ALL
            .into_iter()
            .flat_map(move |ty| self.sets[ty.index()].iter().map(move |&p| (ty, p)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub action: usize,
    pub process: ProcId,
}

/// A finite sequence of events over a process universe.
///
/// Positions are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    alphabet: Arc<Alphabet>,
    universe: ProcessUniverse,
    events: Vec<Event>,
}

impl Execution {
    pub fn new(
        alphabet: Arc<Alphabet>,
        universe: ProcessUniverse,
        events: Vec<Event>,
    ) -> Result<Execution, LogicError> {
        for ev in &events {
            let name = || {
                if ev.action < alphabet.len() {
                    alphabet.name(ev.action).to_string()
                } else {
                    format!("#{}", ev.action)
                }
            };
            if ev.action >= alphabet.len() {
                return Err(LogicError::UnknownAction(name()));
            }
            let ty = universe
                .type_of(ev.process)
                .ok_or(LogicError::UnknownProcess(ev.process.0))?;
            let side = alphabet.side_of(ev.action);
            if !ty.serves(side) {
                return Err(LogicError::TypeMismatch {
                    action: name(),
                    process: ev.process.0,
                    ty,
                    side,
                });
            }
        }
        Ok(Execution {
            alphabet,
            universe,
            events,
        })
    }

    /// Builds an execution without checking that process types match action sides.
    /// Used for representatives of configurations whose tokens sit at locations their
    /// type could never reach; the model checker is indifferent to this.
    pub(crate) fn new_unchecked(
        alphabet: Arc<Alphabet>,
        universe: ProcessUniverse,
        events: Vec<Event>,
    ) -> Execution {
        Execution {
            alphabet,
            universe,
            events,
        }
    }

    pub fn empty(alphabet: Arc<Alphabet>, universe: ProcessUniverse) -> Execution {
        Execution {
            alphabet,
            universe,
            events: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn universe(&self) -> &ProcessUniverse {
        &self.universe
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Letter counts per process, indexed by letter.
    pub fn letter_counts(&self, p: ProcId) -> Vec<usize> {
        let mut counts = vec![0; self.alphabet.len()];
        for ev in self.events.iter().filter(|ev| ev.process == p) {
            counts[ev.action] += 1;
        }
        counts
    }

    /// Whether both executions have the same universe and the same multiset of events.
    pub fn similar(&self, other: &Execution) -> Result<bool, LogicError> {
        if self.universe != other.universe {
            return Err(LogicError::UniverseMismatch);
        }
        if self.alphabet != other.alphabet {
            return Err(LogicError::AlphabetMismatch);
        }
        let mut a = self.events.clone();
        let mut b = other.events.clone();
        a.sort();
        b.sort();
        Ok(a == b)
    }
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "procs")?;
        for (label, ty) in [("sys", ProcType::Sys), ("env", ProcType::Env), ("both", ProcType::Both)]
        {
            let ids: Vec<String> = self
                .universe
                .of_type(ty)
                .iter()
                .map(ToString::to_string)
                .collect();
            write!(f, " {label}={}", ids.join(","))?;
        }
        write!(f, ";")?;
        for ev in &self.events {
            write!(f, " ({},{})", self.alphabet.name(ev.action), ev.process)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_bad_declarations() {
        assert_eq!(
            Alphabet::new(Vec::<String>::new(), vec![]),
            Err(LogicError::EmptyAlphabet)
        );
        assert_eq!(
            Alphabet::new(["a"], ["a"]),
            Err(LogicError::DuplicateAction("a".into()))
        );
        assert_eq!(
            Alphabet::new(["se"], ["b"]),
            Err(LogicError::ReservedAction("se".into()))
        );
        let ab = Alphabet::new(["a", "b"], ["c"]).unwrap();
        assert_eq!(ab.index_of("c"), Some(2));
        assert_eq!(ab.side_of(2), Side::Environment);
        assert_eq!(ab.letters_of(Side::System), 0..2);
    }

    #[test]
    fn execution_checks_types() {
        let ab = Arc::new(Alphabet::new(["a"], ["d"]).unwrap());
        let u = ProcessUniverse::new(vec![1], vec![2], vec![3]).unwrap();
        let bad = Execution::new(
            ab.clone(),
            u.clone(),
            vec![Event {
                action: 1,
                process: ProcId(1),
            }],
        );
        assert!(matches!(bad, Err(LogicError::TypeMismatch { .. })));
        let missing = Execution::new(
            ab.clone(),
            u.clone(),
            vec![Event {
                action: 0,
                process: ProcId(9),
            }],
        );
        assert_eq!(missing, Err(LogicError::UnknownProcess(9)));
        assert!(Execution::new(
            ab,
            u,
            vec![
                Event {
                    action: 0,
                    process: ProcId(3)
                },
                Event {
                    action: 1,
                    process: ProcId(3)
                }
            ]
        )
        .is_ok());
    }

    #[test]
    fn universe_rejects_overlap() {
        assert_eq!(
            ProcessUniverse::new(vec![1, 2], vec![2], vec![]),
            Err(LogicError::DuplicateProcess(2))
        );
        let u = ProcessUniverse::with_sizes([2, 0, 1]);
        assert_eq!(u.type_of(ProcId(3)), Some(ProcType::Both));
        assert_eq!(u.sizes(), [2, 0, 1]);
    }
}
