//! Counting normal forms for class-only sentences.
//!
//! A class-only sentence cannot see the order of events, so its truth on an
//! execution depends only on how many processes of each type have each capped
//! letter-count vector. [`normalize`] makes this explicit as a disjunction of
//! conjunctions of count constraints `#(θ, ℓ) ⋈ n`.

mod mdd;
mod symbolic;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};
use thiserror::Error;

use crate::abstraction::{
    all_locations, canonical_execution, location_count, Cmp, Configuration, CountConstraint,
    Location, Profile, ShapeError,
};
use crate::logic::{model_check, Alphabet, Execution, Formula, Interpretation, LogicError, ProcType, Relation};

use mdd::Mdd;
use symbolic::{realizable, Evaluator, SymbolicError};

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalFormError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error("the formula has free variables")]
    NotASentence,
    #[error("configuration bound {found} is below the formula threshold {needed}")]
    BoundTooSmall { needed: u8, found: u8 },
    #[error("the bound must be at least 1")]
    ZeroBound,
    #[error("quantifier rank {0} is too large")]
    RankTooLarge(u32),
    #[error("normal form exceeds the budget of {0} diagram nodes")]
    Budget(usize),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

fn from_symbolic(e: SymbolicError, budget: usize) -> NormalFormError {
    match e {
        SymbolicError::Budget => NormalFormError::Budget(budget),
        SymbolicError::Logic(l) => NormalFormError::Logic(l),
    }
}

fn check_class_only(f: &Formula) -> Result<(), NormalFormError> {
    f.fragment_check(&[Relation::Sim])?;
    if !f.is_sentence() {
        return Err(NormalFormError::NotASentence);
    }
    Ok(())
}

/// Letter-count threshold used for a class-only sentence: its quantifier rank,
/// and at least 1.
pub fn threshold(f: &Formula) -> Result<u8, NormalFormError> {
    f.fragment_check(&[Relation::Sim])?;
    let qr = f.quantifier_rank().max(1);
    u8::try_from(qr).map_err(|_| NormalFormError::RankTooLarge(qr))
}

/// Truth of `f` on the representative execution of `c`.
///
/// Unless `allow_small_bound` is set, the configuration's bound must reach
/// [`threshold`]; below it, capped counts may hide differences the formula sees.
pub fn holds_on_config(
    f: &Formula,
    c: &Configuration,
    alphabet: &Arc<Alphabet>,
    allow_small_bound: bool,
) -> Result<bool, NormalFormError> {
    check_class_only(f)?;
    if !allow_small_bound {
        let needed = threshold(f)?;
        if c.bound() < needed {
            return Err(NormalFormError::BoundTooSmall {
                needed,
                found: c.bound(),
            });
        }
    }
    if c.arity() != alphabet.len() {
        return Err(ShapeError::Arity {
            expected: alphabet.len(),
            found: c.arity(),
        }
        .into());
    }
    let x = canonical_execution(c, alphabet);
    Ok(model_check(&x, f, &Interpretation::new())?)
}

/// `#(ty, loc) ⋈ n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NfConstraint {
    pub loc: Location,
    pub ty: ProcType,
    pub bound: CountConstraint,
}

/// A disjunction of clauses, each a conjunction of [`NfConstraint`]s with at most
/// one constraint per profile. Profiles absent from a clause are unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub bound: u8,
    pub arity: usize,
    pub clauses: Vec<Vec<NfConstraint>>,
}

impl NormalForm {
    /// Sorts constraints within clauses and clauses within the form, dropping
    /// duplicate clauses.
    pub fn canonicalize(&mut self) {
        for clause in &mut self.clauses {
            clause.sort();
        }
        self.clauses.sort();
        self.clauses.dedup();
    }

    /// Largest constant in any constraint.
    pub fn max_constant(&self) -> u32 {
        self.clauses
            .iter()
            .flatten()
            .map(|c| c.bound.n)
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let clauses: Vec<Value> = self
            .clauses
            .iter()
            .map(|clause| {
                Value::Array(
                    clause
                        .iter()
                        .map(|c| {
                            let cmp = match c.bound.cmp {
                                Cmp::Eq => "=",
                                Cmp::Ge => "\u{2265}",
                            };
                            json!({
                                "cmp": cmp,
                                "m": c.bound.n,
                                "type": c.ty.name(),
                                "loc": c.loc.to_json(alphabet),
                            })
                        })
                        .collect(),
                )
            })
            .collect();
        json!({"B": self.bound, "clauses": clauses})
    }

    pub fn from_json(value: &Value, alphabet: &Alphabet) -> Result<NormalForm, ShapeError> {
        let bad = |m: &str| ShapeError::Json(m.to_string());
        let bound = value
            .get("B")
            .and_then(Value::as_u64)
            .filter(|&b| b <= u8::MAX as u64)
            .ok_or_else(|| bad("missing or invalid `B`"))? as u8;
        let mut clauses = Vec::new();
        for clause in value
            .get("clauses")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `clauses`"))?
        {
            let mut out = Vec::new();
            for c in clause.as_array().ok_or_else(|| bad("clause must be an array"))? {
                let cmp = match c.get("cmp").and_then(Value::as_str) {
                    Some("=") => Cmp::Eq,
                    Some("\u{2265}") | Some(">=") => Cmp::Ge,
                    _ => return Err(bad("invalid `cmp`")),
                };
                let n = c
                    .get("m")
                    .and_then(Value::as_u64)
                    .filter(|&n| n <= u32::MAX as u64)
                    .ok_or_else(|| bad("invalid `m`"))? as u32;
                let ty = c
                    .get("type")
                    .and_then(Value::as_str)
                    .and_then(ProcType::from_name)
                    .ok_or_else(|| bad("invalid `type`"))?;
                let loc = Location::from_json(c.get("loc").unwrap_or(&Value::Null), alphabet, bound)?;
                out.push(NfConstraint {
                    loc,
                    ty,
                    bound: CountConstraint { cmp, n },
                });
            }
            clauses.push(out);
        }
        let mut nf = NormalForm {
            bound,
            arity: alphabet.len(),
            clauses,
        };
        nf.canonicalize();
        Ok(nf)
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> NormalFormDisplay<'a> {
        NormalFormDisplay { nf: self, alphabet }
    }
}

pub struct NormalFormDisplay<'a> {
    nf: &'a NormalForm,
    alphabet: &'a Alphabet,
}

impl fmt::Display for NormalFormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nf.clauses.is_empty() {
            return write!(f, "false");
        }
        for (i, clause) in self.nf.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            if clause.is_empty() {
                write!(f, "true")?;
                continue;
            }
            let parts: Vec<String> = clause
                .iter()
                .map(|c| format!("#{}{}{}", c.ty, c.loc.display(self.alphabet), c.bound))
                .collect();
            write!(f, "({})", parts.join(" & "))?;
        }
        Ok(())
    }
}

/// Evaluates `f` symbolically over every configuration with letter bound `bound`.
/// Profiles outside `profiles` are taken to hold no tokens.
fn symbolic_clauses(
    f: &Formula,
    alphabet: &Alphabet,
    bound: u8,
    top: u32,
    profiles: &[Profile],
    budget: usize,
) -> Result<Vec<Vec<NfConstraint>>, NormalFormError> {
    let mut eval = Evaluator::new(Mdd::new(top, budget), profiles, alphabet);
    let root = eval.eval(f).map_err(|e| from_symbolic(e, budget))?;
    let _ = bound;
    let paths = eval
        .mdd
        .true_paths(root, budget)
        .map_err(|_| NormalFormError::Budget(budget))?;
    let mut clauses = Vec::new();
    for path in paths {
        // Each variable's admissible values become one or more constraints; a
        // set that is not an interval or an upward-closed tail splits the clause.
        let mut partial: Vec<Vec<NfConstraint>> = vec![Vec::new()];
        for (var, values) in path {
            let p = &profiles[var as usize];
            let pieces = pieces(&values, top);
            if pieces.is_empty() {
                continue;
            }
            let mut next = Vec::new();
            for clause in &partial {
                for &piece in &pieces {
                    let mut c = clause.clone();
                    c.push(NfConstraint {
                        loc: p.loc.clone(),
                        ty: p.ty,
                        bound: piece,
                    });
                    next.push(c);
                }
            }
            if next.len() > budget {
                return Err(NormalFormError::Budget(budget));
            }
            partial = next;
        }
        clauses.extend(partial);
        if clauses.len() > budget {
            return Err(NormalFormError::Budget(budget));
        }
    }
    Ok(clauses)
}

/// Splits a set of values in `0..=top` (with `top` meaning "at least top") into
/// constraints; empty when every value is admissible.
fn pieces(values: &[u32], top: u32) -> Vec<CountConstraint> {
    if values.len() as u32 == top + 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[j] + 1 {
            j += 1;
        }
        if values[j] == top {
            out.push(CountConstraint::ge(values[i]));
        } else {
            out.extend((values[i]..=values[j]).map(CountConstraint::eq));
        }
        i = j + 1;
    }
    out
}

fn all_profiles(alphabet: &Alphabet, bound: u8) -> Vec<Profile> {
    all_locations(alphabet.len(), bound)
        .flat_map(|loc| ProcType::ALL.map(|ty| Profile { ty, loc: loc.clone() }))
        .collect()
}

/// Normal form of the class-only sentence `f` at letter bound `bound`.
///
/// Count constraints are exact: every constant the formula can distinguish is kept,
/// so `m_cap` only raises the resolution of the internal count abstraction; it is
/// raised to the quantifier rank when smaller. The computation is symbolic and is
/// refused with [`NormalFormError::Budget`] once it needs more than `budget`
/// diagram nodes or clauses.
pub fn normalize(
    f: &Formula,
    alphabet: &Alphabet,
    bound: u8,
    m_cap: Option<u32>,
    budget: usize,
) -> Result<NormalForm, NormalFormError> {
    check_class_only(f)?;
    if bound == 0 {
        return Err(NormalFormError::ZeroBound);
    }
    let profiles_needed = location_count(alphabet.len(), bound).saturating_mul(3);
    if profiles_needed > budget as u128 {
        return Err(NormalFormError::Budget(budget));
    }
    let top = f.quantifier_rank().max(1).max(m_cap.map_or(0, |m| m + 1));
    let profiles = all_profiles(alphabet, bound);
    let clauses = symbolic_clauses(f, alphabet, bound, top, &profiles, budget)?;
    let mut nf = NormalForm {
        bound,
        arity: alphabet.len(),
        clauses,
    };
    nf.canonicalize();
    Ok(nf)
}

/// `C ⊨ nf`.
pub fn nf_holds(nf: &NormalForm, c: &Configuration) -> Result<bool, NormalFormError> {
    if c.bound() != nf.bound {
        return Err(ShapeError::Bound {
            expected: nf.bound,
            found: c.bound(),
        }
        .into());
    }
    if c.arity() != nf.arity {
        return Err(ShapeError::Arity {
            expected: nf.arity,
            found: c.arity(),
        }
        .into());
    }
    Ok(nf.clauses.iter().any(|clause| {
        clause
            .iter()
            .all(|k| k.bound.holds(c.count(&k.loc, k.ty)))
    }))
}

/// A model of `f`, if one exists.
///
/// The search runs over configurations whose type/letter combinations can occur in
/// real executions, taking for each satisfiable clause the smallest configuration
/// meeting it; clauses needing more than `count_cap` tokens on one profile are
/// skipped. The returned execution is the canonical representative of that
/// configuration and is confirmed by the model checker.
pub fn satisfiable(
    f: &Formula,
    alphabet: &Arc<Alphabet>,
    count_cap: Option<u32>,
    budget: usize,
) -> Result<Option<Execution>, NormalFormError> {
    check_class_only(f)?;
    let bound = threshold(f)?;
    let top = f.quantifier_rank().max(1);
    let profiles: Vec<Profile> = all_profiles(alphabet, bound)
        .into_iter()
        .filter(|p| realizable(p, alphabet))
        .collect();
    if profiles.len() > budget {
        return Err(NormalFormError::Budget(budget));
    }
    let clauses = symbolic_clauses(f, alphabet, bound, top, &profiles, budget)?;
    let mut candidates: Vec<Configuration> = Vec::new();
    for clause in clauses {
        if count_cap.is_some_and(|cap| clause.iter().any(|k| k.bound.n > cap)) {
            continue;
        }
        let mut c = Configuration::empty(alphabet.len(), bound);
        for k in &clause {
            c.add(&k.loc, k.ty, k.bound.n);
        }
        candidates.push(c);
    }
    candidates.sort_by_key(|c| (c.token_count(), c.potential()));
    for c in candidates {
        let x = canonical_execution(&c, alphabet);
        if model_check(&x, f, &Interpretation::new())? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Profiles grouped by location, for callers that want a location-level view.
pub fn constraints_by_location(clause: &[NfConstraint]) -> BTreeMap<Location, [Option<CountConstraint>; 3]> {
    let mut out: BTreeMap<Location, [Option<CountConstraint>; 3]> = BTreeMap::new();
    for k in clause {
        out.entry(k.loc.clone()).or_default()[k.ty.index()] = Some(k.bound);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::abstract_execution;
    use crate::logic::parse_formula;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a"], ["d"]).unwrap())
    }

    #[test]
    fn pieces_cover_values() {
        assert_eq!(pieces(&[0, 1, 2, 3], 3), vec![]);
        assert_eq!(pieces(&[0], 3), vec![CountConstraint::eq(0)]);
        assert_eq!(pieces(&[2, 3], 3), vec![CountConstraint::ge(2)]);
        assert_eq!(
            pieces(&[0, 2, 3], 3),
            vec![CountConstraint::eq(0), CountConstraint::ge(2)]
        );
    }

    #[test]
    fn constants() {
        let ab = ab();
        let t = normalize(&Formula::True, &ab, 1, None, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.clauses, vec![vec![]]);
        let f = normalize(&Formula::False, &ab, 1, None, DEFAULT_BUDGET).unwrap();
        assert!(f.clauses.is_empty());
        assert!(nf_holds(&t, &Configuration::initial(2, 1, [3, 0, 1])).unwrap());
        assert!(!nf_holds(&f, &Configuration::initial(2, 1, [0, 0, 0])).unwrap());
    }

    #[test]
    fn existence_of_an_a_event() {
        let ab = ab();
        let f = parse_formula("E x. a(x)", &ab).unwrap();
        let nf = normalize(&f, &ab, 1, None, DEFAULT_BUDGET).unwrap();
        // Some token of some type sits at a location with an `a`.
        assert_eq!(nf.clauses.len(), 6);
        assert!(nf.clauses.iter().all(|c| c.len() == 1 || c.iter().any(|k| k.bound == CountConstraint::ge(1))));
    }

    #[test]
    fn rejects_order_and_open_formulas() {
        let ab = ab();
        let f = parse_formula("E x. E y. x < y", &ab).unwrap();
        assert!(matches!(
            normalize(&f, &ab, 1, None, DEFAULT_BUDGET),
            Err(NormalFormError::Logic(LogicError::OutsideFragment(Relation::Less)))
        ));
        let open = Formula::Action("a".into(), "x".into());
        assert_eq!(
            normalize(&open, &ab, 1, None, DEFAULT_BUDGET),
            Err(NormalFormError::NotASentence)
        );
    }

    #[test]
    fn budget_guard_refuses_large_alphabets() {
        let ab = Alphabet::new(["a", "b", "c", "d", "e1", "f", "g"], ["h", "i", "j"]).unwrap();
        let f = parse_formula("E x. a(x)", &ab).unwrap();
        assert!(matches!(
            normalize(&f, &ab, 3, None, 10_000),
            Err(NormalFormError::Budget(_))
        ));
    }

    #[test]
    fn bound_check_in_holds_on_config() {
        let ab = ab();
        let f = parse_formula("E x. E y. (x ~ y & a(y) & se(x))", &ab).unwrap();
        let c = Configuration::initial(2, 1, [0, 0, 1]);
        assert_eq!(
            holds_on_config(&f, &c, &ab, false),
            Err(NormalFormError::BoundTooSmall { needed: 2, found: 1 })
        );
        assert_eq!(holds_on_config(&f, &c, &ab, true), Ok(false));
    }

    #[test]
    fn agrees_with_model_checking_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let ab = Arc::new(sample::alphabet(&mut rng, 2));
            let f = sample::sentence(&mut rng, &ab, 2);
            let b = threshold(&f).unwrap();
            let nf = normalize(&f, &ab, b, None, DEFAULT_BUDGET).unwrap();
            for _ in 0..12 {
                let x = sample::execution(&mut rng, &ab, [2, 2, 2], 4);
                let expected = model_check(&x, &f, &Interpretation::new()).unwrap();
                let got = nf_holds(&nf, &abstract_execution(&x, b)).unwrap();
                assert_eq!(got, expected, "{f} on {x}");
            }
        }
    }

    #[test]
    fn satisfiable_finds_models() {
        let ab = Arc::new(Alphabet::new(["a", "b"], ["c", "d"]).unwrap());
        let unsat = parse_formula("E x. (a(x) & !a(x))", &ab).unwrap();
        assert_eq!(satisfiable(&unsat, &ab, None, DEFAULT_BUDGET).unwrap(), None);
        let f = parse_formula("E x. (se(x) & E>=2 y. (x ~ y & c(y)))", &ab).unwrap();
        let x = satisfiable(&f, &ab, None, DEFAULT_BUDGET).unwrap().unwrap();
        assert!(model_check(&x, &f, &Interpretation::new()).unwrap());
        assert_eq!(x.universe().sizes(), [0, 0, 1]);
    }
}
