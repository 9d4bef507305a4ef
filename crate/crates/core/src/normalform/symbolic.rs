//! Evaluates a class-only sentence over all configurations at once.
//!
//! A configuration is a vector of token counts, one per profile (type, location).
//! Its representative structure has one class per token; the class of a token at
//! `ℓ` holds a process element and exactly `ℓ(a)` positions labelled `a`.
//! Quantifiers range over elements of classes already named by bound variables,
//! or over elements of a not-yet-named class of some profile. Named classes are
//! tracked concretely; unnamed ones contribute through counter diagrams, so the
//! result is a diagram over the counts of every profile.

use crate::abstraction::Profile;
use crate::logic::{Alphabet, Formula, LogicError, ProcType};

use super::mdd::{Mdd, NodeId, Op, OutOfBudget, Unary};

#[derive(Debug)]
pub(crate) enum SymbolicError {
    Budget,
    Logic(LogicError),
}

impl From<OutOfBudget> for SymbolicError {
    fn from(_: OutOfBudget) -> Self {
        SymbolicError::Budget
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Proc,
    /// Position with the given letter; the index tells apart named positions of
    /// one class.
    Pos(usize, u8),
}

#[derive(Clone, Copy, Debug)]
struct Elem {
    class: usize,
    kind: Kind,
}

enum Weight {
    Fixed(u32),
    /// `(count of profile - already named classes) * factor`.
    Fresh { profile: usize, named: u32, factor: u32 },
}

struct Candidate {
    elem: Elem,
    new_class: Option<usize>,
    weight: Weight,
}

pub(crate) struct Evaluator<'a> {
    pub mdd: Mdd,
    profiles: &'a [Profile],
    alphabet: &'a Alphabet,
    classes: Vec<usize>,
    vars: Vec<(String, Elem)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(mdd: Mdd, profiles: &'a [Profile], alphabet: &'a Alphabet) -> Self {
        Evaluator {
            mdd,
            profiles,
            alphabet,
            classes: Vec::new(),
            vars: Vec::new(),
        }
    }

    fn lookup(&self, v: &str) -> Result<Elem, SymbolicError> {
        self.vars
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|&(_, e)| e)
            .ok_or_else(|| SymbolicError::Logic(LogicError::Uninterpreted(v.to_string())))
    }

    fn constant(&mut self, b: bool) -> Result<NodeId, SymbolicError> {
        Ok(self.mdd.boolean(b)?)
    }

    fn candidates(&self) -> Vec<Candidate> {
        let mut out = Vec::new();
        for (c, &p) in self.classes.iter().enumerate() {
            out.push(Candidate {
                elem: Elem { class: c, kind: Kind::Proc },
                new_class: None,
                weight: Weight::Fixed(1),
            });
            let loc = &self.profiles[p].loc;
            for a in 0..loc.arity() {
                let total = loc.get(a) as u32;
                if total == 0 {
                    continue;
                }
                let mut used: Vec<u8> = self
                    .vars
                    .iter()
                    .filter_map(|(_, e)| match e.kind {
                        Kind::Pos(b, i) if e.class == c && b == a => Some(i),
                        _ => None,
                    })
                    .collect();
                used.sort_unstable();
                used.dedup();
                for &i in &used {
                    out.push(Candidate {
                        elem: Elem { class: c, kind: Kind::Pos(a, i) },
                        new_class: None,
                        weight: Weight::Fixed(1),
                    });
                }
                if (used.len() as u32) < total {
                    let fresh = (0..).find(|i| !used.contains(i)).unwrap();
                    out.push(Candidate {
                        elem: Elem { class: c, kind: Kind::Pos(a, fresh) },
                        new_class: None,
                        weight: Weight::Fixed(total - used.len() as u32),
                    });
                }
            }
        }
        let fresh_class = self.classes.len();
        for (p, profile) in self.profiles.iter().enumerate() {
            let named = self.classes.iter().filter(|&&q| q == p).count() as u32;
            out.push(Candidate {
                elem: Elem { class: fresh_class, kind: Kind::Proc },
                new_class: Some(p),
                weight: Weight::Fresh { profile: p, named, factor: 1 },
            });
            for a in 0..profile.loc.arity() {
                let n = profile.loc.get(a) as u32;
                if n > 0 {
                    out.push(Candidate {
                        elem: Elem { class: fresh_class, kind: Kind::Pos(a, 0) },
                        new_class: Some(p),
                        weight: Weight::Fresh { profile: p, named, factor: n },
                    });
                }
            }
        }
        out
    }

    fn with_candidate(
        &mut self,
        var: &str,
        cand: &Candidate,
        body: &Formula,
    ) -> Result<NodeId, SymbolicError> {
        if let Some(p) = cand.new_class {
            self.classes.push(p);
        }
        self.vars.push((var.to_string(), cand.elem));
        let r = self.eval(body);
        self.vars.pop();
        if cand.new_class.is_some() {
            self.classes.pop();
        }
        r
    }

    /// Counter diagram for "a class of this profile beyond the named ones exists".
    fn guard(&mut self, cand: &Candidate) -> Result<NodeId, SymbolicError> {
        match cand.weight {
            Weight::Fixed(_) => Ok(self.mdd.boolean(true)?),
            Weight::Fresh { profile, named, .. } => {
                Ok(self.mdd.on_var(profile as u32, |v| (v > named) as u32)?)
            }
        }
    }

    fn weight(&mut self, cand: &Candidate, cap: u32) -> Result<NodeId, SymbolicError> {
        match cand.weight {
            Weight::Fixed(k) => Ok(self.mdd.leaf(k.min(cap))?),
            Weight::Fresh { profile, named, factor } => Ok(self.mdd.on_var(profile as u32, |v| {
                v.saturating_sub(named).saturating_mul(factor).min(cap)
            })?),
        }
    }

    fn count(&mut self, var: &str, body: &Formula, cap: u32) -> Result<NodeId, SymbolicError> {
        let mut total = self.mdd.leaf(0)?;
        for cand in self.candidates() {
            let holds = self.with_candidate(var, &cand, body)?;
            if self.mdd.leaf_value(holds) == Some(0) {
                continue;
            }
            let w = self.weight(&cand, cap)?;
            let term = self.mdd.binary(Op::Mul(cap), holds, w)?;
            total = self.mdd.binary(Op::Add(cap), total, term)?;
        }
        Ok(total)
    }

    pub fn eval(&mut self, f: &Formula) -> Result<NodeId, SymbolicError> {
        match f {
            Formula::True => self.constant(true),
            Formula::False => self.constant(false),
            Formula::Type(t, x) => {
                let e = self.lookup(x)?;
                let b = e.kind == Kind::Proc && self.profiles[self.classes[e.class]].ty == *t;
                self.constant(b)
            }
            Formula::Action(a, x) => {
                let letter = self
                    .alphabet
                    .index_of(a)
                    .ok_or_else(|| SymbolicError::Logic(LogicError::UnknownAction(a.clone())))?;
                let e = self.lookup(x)?;
                self.constant(matches!(e.kind, Kind::Pos(b, _) if b == letter))
            }
            Formula::Eq(x, y) => {
                let (a, b) = (self.lookup(x)?, self.lookup(y)?);
                self.constant(a.class == b.class && a.kind == b.kind)
            }
            Formula::Sim(x, y) => {
                let (a, b) = (self.lookup(x)?, self.lookup(y)?);
                self.constant(a.class == b.class)
            }
            Formula::Less(..) => Err(SymbolicError::Logic(LogicError::OutsideFragment(
                crate::logic::Relation::Less,
            ))),
            Formula::Succ(..) => Err(SymbolicError::Logic(LogicError::OutsideFragment(
                crate::logic::Relation::Succ,
            ))),
            Formula::Not(g) => {
                let r = self.eval(g)?;
                Ok(self.mdd.unary(Unary::Not, r)?)
            }
            Formula::And(a, b) => {
                let l = self.eval(a)?;
                if self.mdd.leaf_value(l) == Some(0) {
                    return Ok(l);
                }
                let r = self.eval(b)?;
                Ok(self.mdd.binary(Op::And, l, r)?)
            }
            Formula::Or(a, b) => {
                let l = self.eval(a)?;
                if self.mdd.leaf_value(l) == Some(1) {
                    return Ok(l);
                }
                let r = self.eval(b)?;
                Ok(self.mdd.binary(Op::Or, l, r)?)
            }
            Formula::Implies(a, b) => {
                let l = self.eval(a)?;
                let nl = self.mdd.unary(Unary::Not, l)?;
                if self.mdd.leaf_value(nl) == Some(1) {
                    return Ok(nl);
                }
                let r = self.eval(b)?;
                Ok(self.mdd.binary(Op::Or, nl, r)?)
            }
            Formula::Iff(a, b) => {
                let l = self.eval(a)?;
                let r = self.eval(b)?;
                Ok(self.mdd.binary(Op::Iff, l, r)?)
            }
            Formula::Exists(x, g) => {
                let mut acc = self.mdd.boolean(false)?;
                for cand in self.candidates() {
                    let holds = self.with_candidate(x, &cand, g)?;
                    let guard = self.guard(&cand)?;
                    let term = self.mdd.binary(Op::And, guard, holds)?;
                    acc = self.mdd.binary(Op::Or, acc, term)?;
                    if self.mdd.leaf_value(acc) == Some(1) {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::Forall(x, g) => {
                let mut acc = self.mdd.boolean(true)?;
                for cand in self.candidates() {
                    let holds = self.with_candidate(x, &cand, g)?;
                    let guard = self.guard(&cand)?;
                    let unguarded = self.mdd.unary(Unary::Not, guard)?;
                    let term = self.mdd.binary(Op::Or, unguarded, holds)?;
                    acc = self.mdd.binary(Op::And, acc, term)?;
                    if self.mdd.leaf_value(acc) == Some(0) {
                        break;
                    }
                }
                Ok(acc)
            }
            Formula::CountAtLeast(0, _, _) => self.constant(true),
            Formula::CountAtLeast(n, x, g) => {
                let c = self.count(x, g, *n)?;
                Ok(self.mdd.unary(Unary::AtLeast(*n), c)?)
            }
            Formula::CountExactly(n, x, g) => {
                let c = self.count(x, g, n + 1)?;
                Ok(self.mdd.unary(Unary::Exactly(*n), c)?)
            }
        }
    }
}

/// Whether a profile can occur in a real execution: System-only processes carry
/// no environment letters and vice versa.
pub(crate) fn realizable(p: &Profile, alphabet: &Alphabet) -> bool {
    match p.ty {
        ProcType::Sys => alphabet
            .letters_of(crate::logic::Side::Environment)
            .all(|a| p.loc.get(a) == 0),
        ProcType::Env => alphabet
            .letters_of(crate::logic::Side::System)
            .all(|a| p.loc.get(a) == 0),
        ProcType::Both => true,
    }
}
