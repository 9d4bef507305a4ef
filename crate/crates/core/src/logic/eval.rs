use std::collections::BTreeMap;
use std::fmt;

use super::{Execution, Formula, LogicError, ProcId, ProcType};

/// An element of the universe of an execution: a process or a position (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Proc(ProcId),
    Pos(usize),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Proc(p) => write!(f, "process {p}"),
            Elem::Pos(i) => write!(f, "position {i}"),
        }
    }
}

pub type Interpretation = BTreeMap<String, Elem>;

/// Flattened view of an execution: processes first, then positions in order.
struct Structure {
    /// Class of every element, as an index into the process list.
    class: Vec<usize>,
    /// Letter of every position element; `None` for processes.
    letter: Vec<Option<usize>>,
    proc_type: Vec<ProcType>,
    procs: usize,
}

impl Structure {
    fn new(x: &Execution) -> Structure {
        let order: Vec<(ProcType, ProcId)> = x.universe().iter().collect();
        let mut class: Vec<usize> = (0..order.len()).collect();
        let mut letter = vec![None; order.len()];
        for ev in x.events() {
            let idx = order
                .iter()
                .position(|&(_, p)| p == ev.process)
                .expect("event process belongs to the universe");
            class.push(idx);
            letter.push(Some(ev.action));
        }
        Structure {
            class,
            letter,
            proc_type: order.iter().map(|&(t, _)| t).collect(),
            procs: order.len(),
        }
    }

    fn size(&self) -> usize {
        self.class.len()
    }
}

enum Node {
    Const(bool),
    Type(ProcType, usize),
    Act(usize, usize),
    Eq(usize, usize),
    Sim(usize, usize),
    Less(usize, usize),
    Succ(usize, usize),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    AtLeast(u32, usize, Box<Node>),
    Exactly(u32, usize, Box<Node>),
}

struct Compiler<'a> {
    x: &'a Execution,
    scope: Vec<(String, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn slot(&self, v: &str) -> Result<usize, LogicError> {
        self.scope
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|&(_, s)| s)
            .ok_or_else(|| LogicError::Uninterpreted(v.to_string()))
    }

    fn bind(
        &mut self,
        v: &str,
        body: &Formula,
        make: impl FnOnce(usize, Box<Node>) -> Node,
    ) -> Result<Node, LogicError> {
        let s = self.slots;
        self.slots += 1;
        self.scope.push((v.to_string(), s));
        let inner = self.compile(body);
        self.scope.pop();
        Ok(make(s, Box::new(inner?)))
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, LogicError> {
        let two = |c: &mut Self, a: &Formula, b: &Formula| -> Result<_, LogicError> {
            Ok((Box::new(c.compile(a)?), Box::new(c.compile(b)?)))
        };
        Ok(match f {
            Formula::True => Node::Const(true),
            Formula::False => Node::Const(false),
            Formula::Type(t, v) => Node::Type(*t, self.slot(v)?),
            Formula::Action(a, v) => {
                let letter = self
                    .x
                    .alphabet()
                    .index_of(a)
                    .ok_or_else(|| LogicError::UnknownAction(a.clone()))?;
                Node::Act(letter, self.slot(v)?)
            }
            Formula::Eq(a, b) => Node::Eq(self.slot(a)?, self.slot(b)?),
            Formula::Sim(a, b) => Node::Sim(self.slot(a)?, self.slot(b)?),
            Formula::Less(a, b) => Node::Less(self.slot(a)?, self.slot(b)?),
            Formula::Succ(a, b) => Node::Succ(self.slot(a)?, self.slot(b)?),
            Formula::Not(g) => Node::Not(Box::new(self.compile(g)?)),
            Formula::And(a, b) => {
                let (a, b) = two(self, a, b)?;
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = two(self, a, b)?;
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = two(self, a, b)?;
                Node::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = two(self, a, b)?;
                Node::Iff(a, b)
            }
            Formula::Exists(v, g) => self.bind(v, g, Node::Exists)?,
            Formula::Forall(v, g) => self.bind(v, g, Node::Forall)?,
            Formula::CountAtLeast(n, v, g) => self.bind(v, g, |s, b| Node::AtLeast(*n, s, b))?,
            Formula::CountExactly(n, v, g) => self.bind(v, g, |s, b| Node::Exactly(*n, s, b))?,
        })
    }
}

fn count_up_to(s: &Structure, env: &mut [usize], slot: usize, body: &Node, limit: u32) -> u32 {
    let mut found = 0;
    for e in 0..s.size() {
        env[slot] = e;
        if eval(s, env, body) {
            found += 1;
            if found >= limit {
                break;
            }
        }
    }
    found
}

fn eval(s: &Structure, env: &mut [usize], f: &Node) -> bool {
    match f {
        Node::Const(b) => *b,
        Node::Type(t, x) => env[*x] < s.procs && s.proc_type[env[*x]] == *t,
        Node::Act(a, x) => s.letter[env[*x]] == Some(*a),
        Node::Eq(x, y) => env[*x] == env[*y],
        Node::Sim(x, y) => s.class[env[*x]] == s.class[env[*y]],
        Node::Less(x, y) => env[*x] >= s.procs && env[*y] >= s.procs && env[*x] < env[*y],
        Node::Succ(x, y) => env[*x] >= s.procs && env[*y] >= s.procs && env[*x] + 1 == env[*y],
        Node::Not(g) => !eval(s, env, g),
        Node::And(a, b) => eval(s, env, a) && eval(s, env, b),
        Node::Or(a, b) => eval(s, env, a) || eval(s, env, b),
        Node::Implies(a, b) => !eval(s, env, a) || eval(s, env, b),
        Node::Iff(a, b) => eval(s, env, a) == eval(s, env, b),
        Node::Exists(v, g) => count_up_to(s, env, *v, g, 1) >= 1,
        Node::Forall(v, g) => (0..s.size()).all(|e| {
            env[*v] = e;
            eval(s, env, g)
        }),
        Node::AtLeast(n, v, g) => *n == 0 || count_up_to(s, env, *v, g, *n) >= *n,
        Node::Exactly(n, v, g) => count_up_to(s, env, *v, g, n + 1) == *n,
    }
}

/// Decides `x, I ⊨ φ` by exhaustive evaluation over the universe `P ⊎ Pos(x)`.
///
/// Counting quantifiers are evaluated by counting witnesses, which agrees with
/// evaluating their expansion.
pub fn model_check(x: &Execution, f: &Formula, interp: &Interpretation) -> Result<bool, LogicError> {
    let s = Structure::new(x);
    let mut compiler = Compiler {
        x,
        scope: Vec::new(),
        slots: 0,
    };
    let mut env = Vec::new();
    for (name, elem) in interp {
        let idx = match *elem {
            Elem::Proc(p) => x.universe().iter().position(|(_, q)| q == p),
            Elem::Pos(i) if (1..=x.len()).contains(&i) => Some(s.procs + i - 1),
            Elem::Pos(_) => None,
        }
        .ok_or_else(|| LogicError::ElementOutOfRange(elem.to_string()))?;
        compiler.scope.push((name.clone(), compiler.slots));
        compiler.slots += 1;
        env.push(idx);
    }
    let node = compiler.compile(f)?;
    env.resize(compiler.slots.max(1), 0);
    Ok(eval(&s, &mut env, &node))
}
