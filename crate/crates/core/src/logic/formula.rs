use std::collections::BTreeSet;
use std::fmt;

use super::{LogicError, ProcType};

pub type Var = String;

/// Binary relations beyond equality; fragments are named by which of these they allow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Sim,
    Less,
    Succ,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Sim => "~",
            Relation::Less => "<",
            Relation::Succ => "+1",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Type(ProcType, Var),
    Action(String, Var),
    Eq(Var, Var),
    Sim(Var, Var),
    Less(Var, Var),
    Succ(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// At least `n` distinct witnesses.
    CountAtLeast(u32, Var, Box<Formula>),
    /// Exactly `n` distinct witnesses.
    CountExactly(u32, Var, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn exists(x: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn forall(x: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn at_least(n: u32, x: impl Into<Var>, body: Formula) -> Formula {
        Formula::CountAtLeast(n, x.into(), Box::new(body))
    }

    pub fn exactly(n: u32, x: impl Into<Var>, body: Formula) -> Formula {
        Formula::CountExactly(n, x.into(), Box::new(body))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::True,
            Some(last) => items
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// Disjunction of all items; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items: Vec<Formula> = items.into_iter().collect();
        match items.pop() {
            None => Formula::False,
            Some(last) => items
                .into_iter()
                .rev()
                .fold(last, |acc, f| Formula::or(f, acc)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        let mut see = |x: &Var, bound: &Vec<Var>| {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Type(_, x) | Formula::Action(_, x) => see(x, bound),
            Formula::Eq(x, y) | Formula::Sim(x, y) | Formula::Less(x, y) | Formula::Succ(x, y) => {
                see(x, bound);
                see(y, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, f)
            | Formula::Forall(x, f)
            | Formula::CountAtLeast(_, x, f)
            | Formula::CountExactly(_, x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Nesting depth of quantifiers once counting quantifiers are expanded.
    pub fn quantifier_rank(&self) -> u32 {
        match self {
            Formula::True
            | Formula::False
            | Formula::Type(..)
            | Formula::Action(..)
            | Formula::Eq(..)
            | Formula::Sim(..)
            | Formula::Less(..)
            | Formula::Succ(..) => 0,
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_rank().max(b.quantifier_rank())
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_rank(),
            Formula::CountAtLeast(0, _, _) => 0,
            Formula::CountAtLeast(n, _, f) => n + f.quantifier_rank(),
            Formula::CountExactly(n, _, f) => n + 1 + f.quantifier_rank(),
        }
    }

    /// Largest constant used by a counting quantifier, 0 if none.
    pub fn max_count_constant(&self) -> u32 {
        match self {
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => {
                f.max_count_constant()
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.max_count_constant().max(b.max_count_constant())
            }
            Formula::CountAtLeast(n, _, f) | Formula::CountExactly(n, _, f) => {
                (*n).max(f.max_count_constant())
            }
            _ => 0,
        }
    }

    pub fn relations(&self) -> BTreeSet<Relation> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Sim(..) => {
                out.insert(Relation::Sim);
            }
            Formula::Less(..) => {
                out.insert(Relation::Less);
            }
            Formula::Succ(..) => {
                out.insert(Relation::Succ);
            }
            _ => {}
        });
        out
    }

    /// Action names occurring in atoms.
    pub fn actions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Action(a, _) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    /// Fails with the first relation outside `allowed`. Equality is always allowed.
    pub fn fragment_check(&self, allowed: &[Relation]) -> Result<(), LogicError> {
        match self.relations().into_iter().find(|r| !allowed.contains(r)) {
            Some(r) => Err(LogicError::OutsideFragment(r)),
            None => Ok(()),
        }
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(g)
            | Formula::Exists(_, g)
            | Formula::Forall(_, g)
            | Formula::CountAtLeast(_, _, g)
            | Formula::CountExactly(_, _, g) => g.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<Var>) {
        self.visit(&mut |f| match f {
            Formula::Type(_, x) | Formula::Action(_, x) => {
                out.insert(x.clone());
            }
            Formula::Eq(x, y) | Formula::Sim(x, y) | Formula::Less(x, y) | Formula::Succ(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Formula::Exists(x, _)
            | Formula::Forall(x, _)
            | Formula::CountAtLeast(_, x, _)
            | Formula::CountExactly(_, x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
    }

    /// Replaces free occurrences of `from` by `to`. `to` must not be bound anywhere in
    /// `self`, which holds for the fresh names used during expansion.
    fn rename_free(&self, from: &str, to: &str) -> Formula {
        let r = |x: &Var| if x == from { to.to_string() } else { x.clone() };
        let rec = |g: &Formula| Box::new(g.rename_free(from, to));
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Type(t, x) => Formula::Type(*t, r(x)),
            Formula::Action(a, x) => Formula::Action(a.clone(), r(x)),
            Formula::Eq(x, y) => Formula::Eq(r(x), r(y)),
            Formula::Sim(x, y) => Formula::Sim(r(x), r(y)),
            Formula::Less(x, y) => Formula::Less(r(x), r(y)),
            Formula::Succ(x, y) => Formula::Succ(r(x), r(y)),
            Formula::Not(g) => Formula::Not(rec(g)),
            Formula::And(a, b) => Formula::And(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
            Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
            Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
            Formula::Exists(x, _)
            | Formula::Forall(x, _)
            | Formula::CountAtLeast(_, x, _)
            | Formula::CountExactly(_, x, _)
                if x == from =>
            {
                self.clone()
            }
            Formula::Exists(x, g) => Formula::Exists(x.clone(), rec(g)),
            Formula::Forall(x, g) => Formula::Forall(x.clone(), rec(g)),
            Formula::CountAtLeast(n, x, g) => Formula::CountAtLeast(*n, x.clone(), rec(g)),
            Formula::CountExactly(n, x, g) => Formula::CountExactly(*n, x.clone(), rec(g)),
        }
    }

    /// Equivalent formula without counting quantifiers.
    ///
    /// `E>=n y. ψ` becomes `n` nested existentials over pairwise distinct fresh
    /// variables each satisfying ψ; `E>=0` is `true`, `E>=1 y. ψ` is `E y. ψ`, and
    /// `E==n` is `E>=n ∧ ¬E>=n+1`.
    pub fn expand_counting(&self) -> Formula {
        let mut used = BTreeSet::new();
        self.all_vars(&mut used);
        self.expand_with(&mut used)
    }

    fn expand_with(&self, used: &mut BTreeSet<Var>) -> Formula {
        match self {
            Formula::Not(g) => Formula::not(g.expand_with(used)),
            Formula::And(a, b) => Formula::and(a.expand_with(used), b.expand_with(used)),
            Formula::Or(a, b) => Formula::or(a.expand_with(used), b.expand_with(used)),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(a.expand_with(used)), Box::new(b.expand_with(used)))
            }
            Formula::Iff(a, b) => {
                Formula::Iff(Box::new(a.expand_with(used)), Box::new(b.expand_with(used)))
            }
            Formula::Exists(x, g) => Formula::exists(x.clone(), g.expand_with(used)),
            Formula::Forall(x, g) => Formula::forall(x.clone(), g.expand_with(used)),
            Formula::CountAtLeast(n, x, g) => {
                let body = g.expand_with(used);
                expand_at_least(*n, x, &body, used)
            }
            Formula::CountExactly(n, x, g) => {
                let body = g.expand_with(used);
                Formula::and(
                    expand_at_least(*n, x, &body, used),
                    Formula::not(expand_at_least(n + 1, x, &body, used)),
                )
            }
            atom => atom.clone(),
        }
    }
}

fn fresh(base: &str, used: &mut BTreeSet<Var>) -> Var {
    let mut i = 1;
    loop {
        let candidate = format!("{base}_{i}");
        if used.insert(candidate.clone()) {
            return candidate;
        }
        i += 1;
    }
}

fn expand_at_least(n: u32, x: &str, body: &Formula, used: &mut BTreeSet<Var>) -> Formula {
    match n {
        0 => Formula::True,
        1 => Formula::exists(x, body.clone()),
        _ => {
            let names: Vec<Var> = (0..n).map(|_| fresh(x, used)).collect();
            let mut parts = Vec::new();
            for i in 0..names.len() {
                for j in i + 1..names.len() {
                    parts.push(Formula::not(Formula::Eq(names[i].clone(), names[j].clone())));
                }
            }
            parts.extend(names.iter().map(|y| body.rename_free(x, y)));
            names
                .iter()
                .rev()
                .fold(Formula::conj(parts), |acc, y| Formula::exists(y.clone(), acc))
        }
    }
}

fn fmt_operand(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Exists(..)
        | Formula::Forall(..)
        | Formula::CountAtLeast(..)
        | Formula::CountExactly(..) => write!(out, "({f})"),
        _ => write!(out, "{f}"),
    }
}

/// Prints in the concrete syntax accepted by the parser; every binary connective
/// is parenthesised so the output reparses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula| {
            write!(f, "(")?;
            fmt_operand(a, f)?;
            write!(f, " {op} ")?;
            fmt_operand(b, f)?;
            write!(f, ")")
        };
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Type(t, x) => write!(f, "{t}({x})"),
            Formula::Action(a, x) => write!(f, "{a}({x})"),
            Formula::Eq(x, y) => write!(f, "{x} = {y}"),
            Formula::Sim(x, y) => write!(f, "{x} ~ {y}"),
            Formula::Less(x, y) => write!(f, "{x} < {y}"),
            Formula::Succ(x, y) => write!(f, "+1({x}, {y})"),
            Formula::Not(g) => match **g {
                Formula::Eq(..) | Formula::Sim(..) | Formula::Less(..) => write!(f, "!({g})"),
                _ => {
                    write!(f, "!")?;
                    fmt_operand(g, f)
                }
            },
            Formula::And(a, b) => binary(f, a, "&", b),
            Formula::Or(a, b) => binary(f, a, "|", b),
            Formula::Implies(a, b) => binary(f, a, "->", b),
            Formula::Iff(a, b) => binary(f, a, "<->", b),
            Formula::Exists(x, g) => write!(f, "E {x}. {g}"),
            Formula::Forall(x, g) => write!(f, "A {x}. {g}"),
            Formula::CountAtLeast(n, x, g) => write!(f, "E>={n} {x}. {g}"),
            Formula::CountExactly(n, x, g) => write!(f, "E=={n} {x}. {g}"),
        }
    }
}
