//! Two-counter machines, their encoding into games with shared tokens only, and
//! the System strategy simulating a halting run.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::ReductionError;
use crate::abstraction::{Configuration, CountConstraint, Location};
use crate::game::{AcceptanceRow, Game, LocalCondition, LocationFilter, Row, RowFamily, Transition};
use crate::logic::{Alphabet, ProcType, Side};
use crate::solver::Strategy;

/// Letter bound of encoded games.
pub const TCM_BOUND: u8 = 4;

const COUNTER_LETTERS: [&str; 2] = ["a1", "a2"];
const ENV_LETTER: &str = "b";

/// Counter operations; the counter is 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Inc(u8),
    Dec(u8),
    Zero(u8),
}

impl Op {
    pub fn counter(self) -> u8 {
        match self {
            Op::Inc(i) | Op::Dec(i) | Op::Zero(i) => i,
        }
    }

    fn parse(text: &str) -> Option<Op> {
        let (i, rest) = match text.strip_prefix("c1") {
            Some(r) => (1, r),
            None => (2, text.strip_prefix("c2")?),
        };
        match rest {
            "++" => Some(Op::Inc(i)),
            "--" => Some(Op::Dec(i)),
            "==0" => Some(Op::Zero(i)),
            _ => None,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Inc(i) => write!(f, "c{i}++"),
            Op::Dec(i) => write!(f, "c{i}--"),
            Op::Zero(i) => write!(f, "c{i}==0"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcmTransition {
    pub name: String,
    pub from: usize,
    pub op: Op,
    pub to: usize,
}

/// `(Q, Δ, c1, c2, q0, qh)`, with states and transitions referred to by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCounterMachine {
    pub states: Vec<String>,
    pub transitions: Vec<TcmTransition>,
    pub initial: usize,
    pub halting: usize,
}

/// `(q, ν1, ν2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TcmConfiguration {
    pub state: usize,
    pub counters: [u64; 2],
}

/// A run from `(q0, 0, 0)`: each step names the transition taken and the
/// configuration it reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TcmRun {
    pub steps: Vec<(usize, TcmConfiguration)>,
}

impl TcmRun {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `γ0, …, γn`.
    pub fn configurations(&self, m: &TwoCounterMachine) -> Vec<TcmConfiguration> {
        std::iter::once(m.start()).chain(self.steps.iter().map(|(_, g)| *g)).collect()
    }
}

impl TwoCounterMachine {
    pub fn new(
        states: Vec<String>,
        transitions: Vec<TcmTransition>,
        initial: usize,
        halting: usize,
    ) -> Result<TwoCounterMachine, ReductionError> {
        let bad = |m: String| Err(ReductionError::Machine(m));
        if initial >= states.len() || halting >= states.len() {
            return bad("initial and halting states must be declared".into());
        }
        let mut seen = HashSet::new();
        for name in states.iter().chain(transitions.iter().map(|t| &t.name)) {
            if COUNTER_LETTERS.contains(&name.as_str()) || name == ENV_LETTER {
                return bad(format!("name `{name}` is reserved for the encoding"));
            }
            if !seen.insert(name.as_str()) {
                return bad(format!("name `{name}` is declared twice"));
            }
        }
        for t in &transitions {
            if t.from >= states.len() || t.to >= states.len() {
                return bad(format!("transition `{}` uses an undeclared state", t.name));
            }
            if !matches!(t.op.counter(), 1 | 2) {
                return bad(format!("transition `{}` uses an unknown counter", t.name));
            }
        }
        let m = TwoCounterMachine {
            states,
            transitions,
            initial,
            halting,
        };
        // Alphabet::new checks that every name is a valid, unreserved identifier.
        m.alphabet().map_err(|e| ReductionError::Machine(e.to_string()))?;
        Ok(m)
    }

    pub fn start(&self) -> TcmConfiguration {
        TcmConfiguration {
            state: self.initial,
            counters: [0, 0],
        }
    }

    /// The `t`-successor of `g`, if any.
    pub fn step(&self, g: TcmConfiguration, t: usize) -> Option<TcmConfiguration> {
        let t = &self.transitions[t];
        if t.from != g.state {
            return None;
        }
        let mut counters = g.counters;
        match t.op {
            Op::Inc(i) => counters[i as usize - 1] += 1,
            Op::Dec(i) => counters[i as usize - 1] = counters[i as usize - 1].checked_sub(1)?,
            Op::Zero(i) if counters[i as usize - 1] == 0 => {}
            Op::Zero(_) => return None,
        }
        Some(TcmConfiguration { state: t.to, counters })
    }

    /// `A_s = Q ∪ Δ ∪ {a1, a2}`, `A_e = {b}`.
    pub fn alphabet(&self) -> Result<Alphabet, crate::logic::LogicError> {
        let sys: Vec<&str> = self
            .states
            .iter()
            .map(String::as_str)
            .chain(self.transitions.iter().map(|t| t.name.as_str()))
            .chain(COUNTER_LETTERS)
            .collect();
        Alphabet::new(sys, [ENV_LETTER])
    }
}

impl fmt::Display for TwoCounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states {};", self.states.join(" "))?;
        writeln!(f, "init {};", self.states[self.initial])?;
        writeln!(f, "halt {};", self.states[self.halting])?;
        for t in &self.transitions {
            writeln!(f, "{}: {} --{}--> {};", t.name, self.states[t.from], t.op, self.states[t.to])?;
        }
        Ok(())
    }
}

/// Reads `states q0 qh; init q0; halt qh; t1: q0 --c1==0--> qh;`. Statements end
/// with `;` and `#` starts a comment.
pub fn parse_2cm(text: &str) -> Result<TwoCounterMachine, ReductionError> {
    let err = |m: String| ReductionError::Machine(m);
    let stripped: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut states: Option<Vec<String>> = None;
    let (mut init, mut halt) = (None, None);
    let mut raw = Vec::new();
    for stmt in stripped.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let mut words = stmt.split_whitespace();
        match words.next() {
            Some("states") => {
                if states.is_some() {
                    return Err(err("`states` declared twice".into()));
                }
                states = Some(words.map(str::to_string).collect());
            }
            Some("init") => init = Some(single(words, "init")?),
            Some("halt") => halt = Some(single(words, "halt")?),
            _ => {
                let (name, body) = stmt
                    .split_once(':')
                    .ok_or_else(|| err(format!("cannot read statement `{stmt}`")))?;
                let (from, rest) = body
                    .split_once("--")
                    .ok_or_else(|| err(format!("transition `{stmt}` lacks `--op-->`")))?;
                let at = rest
                    .rfind("-->")
                    .ok_or_else(|| err(format!("transition `{stmt}` lacks `-->`")))?;
                let op = Op::parse(rest[..at].trim())
                    .ok_or_else(|| err(format!("unknown operation `{}`", rest[..at].trim())))?;
                raw.push((name.trim().to_string(), from.trim().to_string(), op, rest[at + 3..].trim().to_string()));
            }
        }
    }
    let states = states.ok_or_else(|| err("missing `states`".into()))?;
    let index: HashMap<&str, usize> = states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |s: &str| index.get(s).copied().ok_or_else(|| err(format!("undeclared state `{s}`")));
    let initial = lookup(&init.ok_or_else(|| err("missing `init`".into()))?)?;
    let halting = lookup(&halt.ok_or_else(|| err("missing `halt`".into()))?)?;
    let mut transitions = Vec::new();
    for (name, from, op, to) in raw {
        transitions.push(TcmTransition {
            name,
            from: lookup(&from)?,
            op,
            to: lookup(&to)?,
        });
    }
    TwoCounterMachine::new(states, transitions, initial, halting)
}

fn single<'a>(mut words: impl Iterator<Item = &'a str>, what: &str) -> Result<String, ReductionError> {
    match (words.next(), words.next()) {
        (Some(w), None) => Ok(w.to_string()),
        _ => Err(ReductionError::Machine(format!("`{what}` takes exactly one state"))),
    }
}

/// Breadth-first search for a shortest halting run of at most `step_bound` steps.
pub fn tcm_run_bounded(m: &TwoCounterMachine, step_bound: usize) -> Option<TcmRun> {
    let start = m.start();
    let mut parent: HashMap<TcmConfiguration, Option<(usize, TcmConfiguration)>> = HashMap::new();
    parent.insert(start, None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((g, depth)) = queue.pop_front() {
        if g.state == m.halting {
            let mut steps = Vec::new();
            let mut cur = g;
            while let Some(&Some((t, prev))) = parent.get(&cur) {
                steps.push((t, cur));
                cur = prev;
            }
            steps.reverse();
            return Some(TcmRun { steps });
        }
        if depth == step_bound {
            continue;
        }
        for t in 0..m.transitions.len() {
            if let Some(h) = m.step(g, t) {
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(h) {
                    e.insert(Some((t, g)));
                    queue.push_back((h, depth + 1));
                }
            }
        }
    }
    None
}

/// Locations of an encoded game, addressed by letter name.
struct Locs {
    alphabet: Arc<Alphabet>,
}

impl Locs {
    fn at(&self, parts: &[(&str, u8)]) -> Location {
        let mut counts = vec![0u8; self.alphabet.len()];
        for &(name, n) in parts {
            let i = self.alphabet.index_of(name).expect("letter of the encoding");
            counts[i] += n;
        }
        Location::from_counts(&counts)
    }

    fn origin(&self) -> Location {
        Location::zero(self.alphabet.len())
    }

    /// `L✓`: the locations whose counts never matter.
    fn checkmark(&self, m: &TwoCounterMachine) -> Vec<Location> {
        let mut out = vec![self.origin()];
        for a in COUNTER_LETTERS {
            out.push(self.at(&[(a, 2), (ENV_LETTER, 2)]));
            out.push(self.at(&[(a, 4), (ENV_LETTER, 4)]));
        }
        let names = m.states.iter().chain(m.transitions.iter().map(|t| &t.name));
        out.extend(names.map(|x| self.at(&[(x, 2), (ENV_LETTER, 2)])));
        out
    }
}

fn b(n: u8) -> (&'static str, u8) {
    (ENV_LETTER, n)
}

/// A row `[ℓ1 ⋈ n1, …]`: `=0` outside the listed locations, `≥0` on `extra`.
fn table_row(entries: &[(Location, CountConstraint)], extra: &[Location]) -> Row {
    let mut row = AcceptanceRow::new(LocalCondition::EMPTY);
    for l in extra {
        row.explicit.insert(l.clone(), LocalCondition::shared(CountConstraint::ANY));
    }
    for (l, c) in entries {
        row.explicit.insert(l.clone(), LocalCondition::shared(*c));
    }
    Row::Table(row)
}

/// The game in which System wins from some `C_(0,0,k)` iff `m` halts.
///
/// Rows are listed per transition `t = (q, op, q')`: System's choice of `t`,
/// the first transition from `q0`, System's completion of `t`, Environment's
/// deviations after each System move, the halting rows, and one family row per
/// location where Environment played more letters than System.
pub fn encode_2cm(m: &TwoCounterMachine) -> Game {
    let alphabet = Arc::new(m.alphabet().expect("validated machine"));
    let locs = Locs { alphabet: alphabet.clone() };
    let check = locs.checkmark(m);
    let eq = CountConstraint::eq;
    let ge = CountConstraint::ge;
    let one = eq(1);
    let mut rows = Vec::new();

    for t in &m.transitions {
        let (q, tn, q2) = (m.states[t.from].as_str(), t.name.as_str(), m.states[t.to].as_str());
        let a = COUNTER_LETTERS[t.op.counter() as usize - 1];
        let at = |parts: &[(&str, u8)]| locs.at(parts);
        // Locations holding the counter token at each phase of `op`.
        let (c_sys, c_env, c_done) = match t.op {
            Op::Inc(_) => (at(&[(a, 1)]), at(&[(a, 1), b(1)]), at(&[(a, 2), b(1)])),
            Op::Dec(_) => (at(&[(a, 3), b(2)]), at(&[(a, 3), b(3)]), at(&[(a, 4), b(3)])),
            Op::Zero(_) => (at(&[(a, 2), b(2)]), at(&[(a, 2), b(2)]), at(&[(a, 4), b(3)])),
        };
        let is_zero = matches!(t.op, Op::Zero(_));

        // System picks `t` from a configuration encoding a state `q`.
        for qh in &m.states {
            let mut e = vec![(at(&[(q, 1)]), one), (at(&[(tn, 1)]), one), (at(&[(qh, 2), b(2)]), ge(1))];
            e.push((c_sys.clone(), if is_zero { eq(0) } else { one }));
            rows.push(table_row(&e, &check));
        }

        // The first transition, taken from the initial configuration.
        if t.from == m.initial && !matches!(t.op, Op::Dec(_)) {
            let mut e = vec![(at(&[(q, 1)]), one), (at(&[(tn, 1)]), one), (locs.origin(), ge(0))];
            if !is_zero {
                e.push((c_sys.clone(), one));
            }
            rows.push(table_row(&e, &[]));
        }

        // System completes `t` and moves a token to `q'`.
        let mut e = vec![(at(&[(q, 2), b(1)]), one), (at(&[(tn, 2), b(1)]), one), (at(&[(q2, 1)]), one)];
        if !is_zero {
            e.push((c_done.clone(), one));
        }
        rows.push(table_row(&e, &check));

        // Environment acknowledges only part of System's choice.
        let (qs, qe) = (at(&[(q, 1)]), at(&[(q, 1), b(1)]));
        let (ts, te) = (at(&[(tn, 1)]), at(&[(tn, 1), b(1)]));
        let triples: &[[bool; 3]] = if is_zero {
            &[[true, false, false], [false, true, false]]
        } else {
            &[
                [true, false, false],
                [false, true, false],
                [false, false, true],
                [true, true, false],
                [true, false, true],
                [false, true, true],
            ]
        };
        for &[bq, bt, bc] in triples {
            let pick = |moved: bool, s: &Location, e: &Location| if moved { e.clone() } else { s.clone() };
            let mut e = vec![(pick(bq, &qs, &qe), one), (pick(bt, &ts, &te), one)];
            if !is_zero {
                e.push((pick(bc, &c_sys, &c_env), one));
            }
            rows.push(table_row(&e, &check));
        }

        // Environment acknowledges only part of System's completion, or plays on `q'`.
        let (q2s, q2e) = (at(&[(q2, 1)]), at(&[(q2, 1), b(1)]));
        let (qd, td) = (at(&[(q, 2), b(1)]), at(&[(tn, 2), b(1)]));
        let mut pending = vec![qd, td];
        if !is_zero {
            pending.push(c_done.clone());
        }
        for hit in 0..pending.len() {
            let mut e = vec![(q2s.clone(), one)];
            for (i, l) in pending.iter().enumerate() {
                e.push((l.clone(), if i == hit { one } else { ge(0) }));
            }
            rows.push(table_row(&e, &check));
        }
        let mut e = vec![(q2e, one)];
        e.extend(pending.iter().map(|l| (l.clone(), ge(0))));
        if is_zero {
            e.push((c_done.clone(), ge(0)));
        }
        rows.push(table_row(&e, &check));
    }

    // Halting.
    let h = m.states[m.halting].as_str();
    for n in 0..=2 {
        rows.push(table_row(&[(locs.at(&[(h, 2), b(n)]), one)], &check));
    }

    // Environment may never play ahead of System on a token.
    rows.push(Row::Family(RowFamily {
        filter: LocationFilter::SysBelowEnv,
        hit: LocalCondition::shared(ge(1)),
        rest: LocalCondition::shared(CountConstraint::ANY),
    }));

    Game::new(alphabet, TCM_BOUND, rows).expect("encoded rows are well formed")
}

/// System's strategy simulating a fixed halting run `γ0 ⊢ … ⊢ γn` from
/// `C_(0,0,k)`, `k ≥ 3n + 1`.
#[derive(Clone, Debug)]
pub struct TcmStrategy {
    machine: TwoCounterMachine,
    run: TcmRun,
    index: BTreeMap<TcmConfiguration, usize>,
}

/// Checks that `run` is a halting run of `m` visiting pairwise different
/// configurations, and builds the strategy simulating it.
pub fn tcm_strategy(m: &TwoCounterMachine, run: &TcmRun) -> Result<TcmStrategy, ReductionError> {
    let err = |s: &str| Err(ReductionError::Machine(s.to_string()));
    let configs = run.configurations(m);
    for (i, (t, g)) in run.steps.iter().enumerate() {
        if *t >= m.transitions.len() || m.step(configs[i], *t) != Some(*g) {
            return err("run is not a run of the machine");
        }
    }
    if configs.last().expect("non-empty").state != m.halting {
        return err("run does not end in the halting state");
    }
    let mut index = BTreeMap::new();
    for (j, g) in configs.iter().enumerate() {
        if index.insert(*g, j).is_some() {
            return err("run visits a configuration twice");
        }
    }
    Ok(TcmStrategy {
        machine: m.clone(),
        run: run.clone(),
        index,
    })
}

impl TcmStrategy {
    /// Decodes a valid configuration: one token at some `⟨q⟩`, all others on
    /// `L✓`; the counters are the counts at `⟨a_i²b²⟩`.
    fn decode(&self, locs: &Locs, c: &Configuration) -> Option<TcmConfiguration> {
        let m = &self.machine;
        let check: HashSet<Location> = locs.checkmark(m).into_iter().collect();
        let mut state = None;
        for (l, t) in c.iter() {
            if t[0] + t[1] > 0 {
                return None;
            }
            if check.contains(l) {
                continue;
            }
            let q = m.states.iter().position(|q| *l == locs.at(&[(q, 1)]))?;
            if t[2] != 1 || state.replace(q).is_some() {
                return None;
            }
        }
        let counter = |a: &str| c.count(&locs.at(&[(a, 2), b(2)]), ProcType::Both) as u64;
        Some(TcmConfiguration {
            state: state?,
            counters: [counter(COUNTER_LETTERS[0]), counter(COUNTER_LETTERS[1])],
        })
    }

    /// The first half of simulating `t`: a token to `⟨t⟩`, and the counter token.
    fn choose(&self, locs: &Locs, t: &TcmTransition, mv: &mut Vec<(Location, Location)>) {
        let a = COUNTER_LETTERS[t.op.counter() as usize - 1];
        mv.push((locs.origin(), locs.at(&[(&t.name, 1)])));
        match t.op {
            Op::Inc(_) => mv.push((locs.origin(), locs.at(&[(a, 1)]))),
            Op::Dec(_) => mv.push((locs.at(&[(a, 2), b(2)]), locs.at(&[(a, 3), b(2)]))),
            Op::Zero(_) => {}
        }
    }
}

impl Strategy for TcmStrategy {
    fn next_move(&self, game: &Game, c: &Configuration, _first: bool) -> Option<Transition> {
        let m = &self.machine;
        let locs = Locs { alphabet: game.alphabet().clone() };
        let origin = locs.origin();
        let mut mv: Vec<(Location, Location)> = Vec::new();
        let only_origin = c.iter().all(|(l, _)| *l == origin);

        if only_origin {
            let q0 = m.states[m.initial].as_str();
            match self.run.steps.first() {
                None => mv.push((origin.clone(), locs.at(&[(q0, 2)]))),
                Some(&(t, _)) => {
                    mv.push((origin.clone(), locs.at(&[(q0, 1)])));
                    self.choose(&locs, &m.transitions[t], &mut mv);
                }
            }
        } else if let Some(t) = m.transitions.iter().find(|t| {
            c.count(&locs.at(&[(&t.name, 1), b(1)]), ProcType::Both) == 1
                && c.count(&locs.at(&[(&m.states[t.from], 1), b(1)]), ProcType::Both) == 1
        }) {
            // Environment acknowledged the choice of `t`: complete it.
            let (q, q2) = (m.states[t.from].as_str(), m.states[t.to].as_str());
            let a = COUNTER_LETTERS[t.op.counter() as usize - 1];
            mv.push((locs.at(&[(q, 1), b(1)]), locs.at(&[(q, 2), b(1)])));
            mv.push((locs.at(&[(&t.name, 1), b(1)]), locs.at(&[(&t.name, 2), b(1)])));
            mv.push((origin.clone(), locs.at(&[(q2, 1)])));
            match t.op {
                Op::Inc(_) => mv.push((locs.at(&[(a, 1), b(1)]), locs.at(&[(a, 2), b(1)]))),
                Op::Dec(_) => mv.push((locs.at(&[(a, 3), b(3)]), locs.at(&[(a, 4), b(3)]))),
                Op::Zero(_) => {}
            }
        } else {
            let g = self.decode(&locs, c)?;
            let j = *self.index.get(&g)?;
            if j == self.run.len() {
                let q = m.states[g.state].as_str();
                mv.push((locs.at(&[(q, 1)]), locs.at(&[(q, 2)])));
            } else {
                self.choose(&locs, &m.transitions[self.run.steps[j].0], &mut mv);
            }
        }

        let mut t = Transition::identity(Side::System);
        let mut need: HashMap<&Location, u32> = HashMap::new();
        for (from, to) in &mv {
            *need.entry(from).or_insert(0) += 1;
            t.add(game.alphabet(), game.bound(), from.clone(), to.clone(), ProcType::Both, 1)
                .ok()?;
        }
        need.iter()
            .all(|(l, n)| c.count(l, ProcType::Both) >= *n)
            .then_some(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::verify_strategy;
    use crate::game::MoveCaps;

    const M1: &str = "states q0 qh; init q0; halt qh; t1: q0 --c1==0--> qh;";

    #[test]
    fn parses_and_prints() {
        let m = parse_2cm(M1).unwrap();
        assert_eq!(m.states, ["q0", "qh"]);
        assert_eq!(m.transitions[0].op, Op::Zero(1));
        assert_eq!(parse_2cm(&m.to_string()).unwrap(), m);
        let d = parse_2cm("states p h; init p; halt h; t: p --c2----> h; # dec").unwrap();
        assert_eq!(d.transitions[0].op, Op::Dec(2));
        assert!(parse_2cm("states q0 b; init q0; halt b;").is_err());
        assert!(parse_2cm("states q0; init q0; halt qh;").is_err());
        assert!(parse_2cm("states q0 qh; init q0; halt qh; t: q0 --c3++--> qh;").is_err());
    }

    #[test]
    fn bounded_runs() {
        let m = parse_2cm(M1).unwrap();
        assert_eq!(tcm_run_bounded(&m, 5).unwrap().len(), 1);
        let stuck = parse_2cm("states q0 qh; init q0; halt qh; t1: q0 --c1----> qh;").unwrap();
        assert!(tcm_run_bounded(&stuck, 10).is_none());
        let inc = parse_2cm("states q0 q1 qh; init q0; halt qh; t1: q0 --c2++--> q1; t2: q1 --c2----> qh;").unwrap();
        let run = tcm_run_bounded(&inc, 5).unwrap();
        assert_eq!(run.len(), 2);
        assert_eq!(run.steps[0].1.counters, [0, 1]);
    }

    #[test]
    fn encoding_shape() {
        let m = parse_2cm(M1).unwrap();
        let g = encode_2cm(&m);
        assert_eq!(g.alphabet().sys().len(), 5);
        assert_eq!(g.bound(), 4);
        let locs = Locs { alphabet: g.alphabet().clone() };
        // The first-transition row for the zero test.
        let expect = table_row(
            &[
                (locs.at(&[("q0", 1)]), CountConstraint::eq(1)),
                (locs.at(&[("t1", 1)]), CountConstraint::eq(1)),
                (locs.origin(), CountConstraint::ge(0)),
            ],
            &[],
        );
        assert!(g.rows().unwrap().contains(&expect));
        let c = Configuration::from_entries(
            g.alphabet().len(),
            4,
            [(locs.at(&[("qh", 2)]), [0, 0, 1]), (locs.origin(), [0, 0, 3])],
        );
        assert!(g.accepts(&c).unwrap());
        assert!(!g.accepts(&g.initial([0, 0, 4])).unwrap());
    }

    #[test]
    fn strategy_simulates_runs() {
        let m = parse_2cm(M1).unwrap();
        let run = tcm_run_bounded(&m, 5).unwrap();
        let f = tcm_strategy(&m, &run).unwrap();
        let g = encode_2cm(&m);
        for k in [4, 5] {
            let v = verify_strategy(&g, &g.initial([0, 0, k]), &f, MoveCaps::UNLIMITED, 1_000_000).unwrap();
            assert!(v.ok, "k = {k}: {:?}", v.reason);
        }
        let v = verify_strategy(&g, &g.initial([0, 0, 1]), &f, MoveCaps::UNLIMITED, 1_000_000).unwrap();
        assert!(!v.ok);
    }

    #[test]
    fn rejects_runs_with_repeated_configurations() {
        let m = parse_2cm("states q0 q1 qh; init q0; halt qh; t1: q0 --c1==0--> q1; t2: q1 --c1==0--> q0; t3: q0 --c2==0--> qh;")
            .unwrap();
        let s = |t, q| (t, TcmConfiguration { state: q, counters: [0, 0] });
        let run = TcmRun { steps: vec![s(0, 1), s(1, 0), s(2, 2)] };
        assert!(tcm_strategy(&m, &run).is_err());
        let short = TcmRun { steps: vec![s(2, 2)] };
        assert!(tcm_strategy(&m, &short).is_ok());
    }
}
