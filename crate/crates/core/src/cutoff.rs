//! Cutoff bounds and the decision procedure for a fixed number of Environment
//! and shared processes.
//!
//! With `k_e` Environment and `k_se` shared tokens fixed, the winner from
//! `C_(N, k_e, k_se)` is the same for every `N ≥ N̂ = |L|^(Max+1) · K`, where `K`
//! is the largest constant of the acceptance condition and
//! `Max = (k_e + k_se) · |A_e| · B` bounds the number of Environment moves.

use std::ops::Range;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::abstraction::location_count;
use crate::game::{Game, MoveCaps};
use crate::logic::ProcType;
use crate::solver::{solve, Player, SolveError, SolveOptions, DEFAULT_NODE_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutoffError {
    #[error("the largest constant of a formula-defined game must be supplied")]
    ImplicitAcceptance,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutoffBound {
    /// Largest constant of the acceptance condition.
    pub k: u32,
    /// Bound on the number of Environment moves.
    pub max: u64,
    /// `|L|`.
    pub locations: u128,
    pub hat_n: BigUint,
}

impl CutoffBound {
    pub fn to_json(&self) -> Value {
        json!({"K": self.k, "Max": self.max, "L": self.locations.to_string(), "hatN": self.hat_n.to_string()})
    }
}

/// `K`, `Max` and `N̂` for `g` with `k_e` Environment and `k_se` shared tokens.
/// `k_override` supplies `K`, and is required when acceptance is a formula.
pub fn cutoff_bound(g: &Game, k_e: u32, k_se: u32, k_override: Option<u32>) -> Result<CutoffBound, CutoffError> {
    let k = k_override.or_else(|| g.max_constant()).ok_or(CutoffError::ImplicitAcceptance)?;
    let env_letters = g.alphabet().env().len() as u64;
    let max = (k_e as u64 + k_se as u64) * env_letters * g.bound() as u64;
    let locations = location_count(g.alphabet().len(), g.bound());
    let exp = u32::try_from(max + 1).expect("exponent fits in u32");
    let hat_n = BigUint::from(locations).pow(exp) * BigUint::from(k);
    Ok(CutoffBound { k, max, locations, hat_n })
}

#[derive(Clone, Copy, Debug)]
pub struct DecideOptions {
    pub caps: MoveCaps,
    /// Total number of positions over all instances.
    pub budget: usize,
    /// Stop at `min(N̂, n_max)`; an empty answer below `N̂` is partial.
    pub n_max: Option<u64>,
    pub k_override: Option<u32>,
    /// Instances solved at once.
    pub jobs: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            caps: MoveCaps::UNLIMITED,
            budget: DEFAULT_NODE_BUDGET,
            n_max: None,
            k_override: None,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// The least `N` from which System wins.
    Nonempty { witness: u64 },
    /// System loses for every `N ≤ up_to`; `partial` when `up_to < N̂`.
    Empty { up_to: u64, partial: bool },
    /// The budget ran out while solving `C_(at, k_e, k_se)`.
    Inconclusive { at: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub bound: CutoffBound,
    pub outcome: Outcome,
    pub instances_solved: u64,
    pub explored: usize,
}

impl Decision {
    pub fn to_json(&self) -> Value {
        let mut v = self.bound.to_json();
        v["instances_solved"] = json!(self.instances_solved);
        v["explored"] = json!(self.explored);
        match &self.outcome {
            Outcome::Nonempty { witness } => v["witness"] = json!(witness),
            Outcome::Empty { up_to, partial } => {
                v["result"] = json!("empty");
                v["up_to"] = json!(up_to);
                if *partial {
                    v["note"] = json!(format!("empty up to N_max = {up_to}, below hatN: not a global answer"));
                }
            }
            Outcome::Inconclusive { at } => {
                v["result"] = json!("inconclusive");
                v["at"] = json!(at);
            }
        }
        v
    }
}

/// Runs `f` on every item, `jobs` at a time, preserving order.
fn batched<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    if jobs <= 1 {
        return items.iter().map(&f).collect();
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|x| s.spawn(|| f(x))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e))).collect()
    })
}

/// Whether System wins from `C_(N, k_e, k_se)` for some `N`.
///
/// Instances are solved for `N = 0, 1, …` up to `N̂` (or `n_max`), stopping at the
/// first System win. Results do not depend on `jobs`: instances of a batch are
/// charged against the budget in increasing order of `N`.
pub fn decide(g: &Game, k_e: u32, k_se: u32, opts: DecideOptions) -> Result<Decision, CutoffError> {
    let bound = cutoff_bound(g, k_e, k_se, opts.k_override)?;
    let hat = bound.hat_n.to_u64().unwrap_or(u64::MAX);
    let last = opts.n_max.map_or(hat, |m| m.min(hat));
    let partial = last < hat || bound.hat_n.to_u64().is_none();
    let mut remaining = opts.budget;
    let mut solved = 0u64;
    let mut explored = 0usize;
    let mut next = 0u64;
    let jobs = opts.jobs.max(1) as u64;
    let finish = |outcome, solved, explored| Decision {
        bound: bound.clone(),
        outcome,
        instances_solved: solved,
        explored,
    };
    while next <= last {
        let batch: Vec<u64> = (next..=last.min(next.saturating_add(jobs - 1))).collect();
        let sopts = SolveOptions {
            caps: opts.caps,
            budget: remaining,
            extract_strategy: false,
        };
        let results = batched(&batch, jobs as usize, |&n| {
            let n = u32::try_from(n).expect("instance size fits in u32");
            solve(g, &g.initial([n, k_e, k_se]), sopts)
        });
        for (&n, r) in batch.iter().zip(results) {
            match r {
                Ok((v, _)) if v.explored <= remaining => {
                    remaining -= v.explored;
                    explored += v.explored;
                    solved += 1;
                    if v.winner == Player::System {
                        return Ok(finish(Outcome::Nonempty { witness: n }, solved, explored));
                    }
                }
                Ok(_) | Err(SolveError::Budget { .. }) => {
                    return Ok(finish(Outcome::Inconclusive { at: n }, solved, explored));
                }
                Err(e) => return Err(e.into()),
            }
        }
        next = batch.last().expect("non-empty batch") + 1;
    }
    Ok(finish(Outcome::Empty { up_to: last, partial }, solved, explored))
}

/// Winners along one axis of initial configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scan {
    pub axis: ProcType,
    /// `(n, winner)`; `None` when the instance ran out of budget.
    pub entries: Vec<(u32, Option<Player>)>,
    /// The last `⌈len/2⌉` winners are known and equal.
    pub eventually_constant: bool,
}

impl Scan {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(n, w)| json!({"n": n, "winner": w.map_or("inconclusive", Player::name)}))
            .collect();
        json!({"axis": self.axis.name(), "entries": entries, "eventually_constant": self.eventually_constant})
    }

    /// `W`/`L`/`?` per entry.
    pub fn pattern(&self) -> String {
        self.entries
            .iter()
            .map(|(_, w)| match w {
                Some(Player::System) => 'W',
                Some(Player::Environment) => 'L',
                None => '?',
            })
            .collect()
    }
}

/// Solves `C_k` for every `k` agreeing with `fixed` except on `axis`, where it
/// ranges over `range`. Each instance gets the node budget of `opts`.
pub fn scan_winning(
    g: &Game,
    axis: ProcType,
    fixed: [u32; 3],
    range: Range<u32>,
    opts: SolveOptions,
    jobs: usize,
) -> Result<Scan, CutoffError> {
    let ns: Vec<u32> = range.collect();
    let mut entries = Vec::with_capacity(ns.len());
    for chunk in ns.chunks(jobs.max(1)) {
        let results = batched(chunk, jobs, |&n| {
            let mut k = fixed;
            k[axis.index()] = n;
            solve(g, &g.initial(k), opts)
        });
        for (&n, r) in chunk.iter().zip(results) {
            match r {
                Ok((v, _)) => entries.push((n, Some(v.winner))),
                Err(SolveError::Budget { .. }) => entries.push((n, None)),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let tail = &entries[entries.len() / 2..];
    let eventually_constant =
        !tail.is_empty() && tail[0].1.is_some() && tail.iter().all(|(_, w)| *w == tail[0].1);
    Ok(Scan {
        axis,
        entries,
        eventually_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::{zone_game, parity_game, matching_game};

    #[test]
    fn bounds() {
        let g = parity_game();
        let b = cutoff_bound(&g, 0, 0, None).unwrap();
        assert_eq!((b.k, b.max, b.locations), (2, 0, 9));
        assert_eq!(b.hat_n, BigUint::from(18u32));
        assert_eq!(cutoff_bound(&g, 0, 1, None).unwrap().hat_n, BigUint::from(1458u32));
        assert_eq!(cutoff_bound(&matching_game(), 0, 0, None).unwrap().hat_n, BigUint::from(18u32));
        assert_eq!(cutoff_bound(&zone_game(), 3, 2, None).unwrap().hat_n, BigUint::from(0u32));
    }

    #[test]
    fn decides_zone() {
        let g = zone_game();
        let d = decide(&g, 0, 0, DecideOptions::default()).unwrap();
        assert_eq!(d.outcome, Outcome::Nonempty { witness: 0 });
        let d = decide(&g, 1, 0, DecideOptions::default()).unwrap();
        assert_eq!(d.outcome, Outcome::Empty { up_to: 0, partial: false });
    }

    #[test]
    fn jobs_do_not_change_decisions() {
        let g = matching_game();
        let a = decide(&g, 2, 0, DecideOptions::default()).unwrap();
        let b = decide(&g, 2, 0, DecideOptions { jobs: 4, ..Default::default() }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcome, Outcome::Nonempty { witness: 2 });
        let tight = DecideOptions { budget: 3, ..Default::default() };
        let a = decide(&g, 2, 0, tight).unwrap();
        let b = decide(&g, 2, 0, DecideOptions { jobs: 3, ..tight }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scans() {
        let g = matching_game();
        let s = scan_winning(&g, ProcType::Sys, [0, 2, 0], 0..5, SolveOptions::default(), 2).unwrap();
        assert_eq!(s.pattern(), "LLWWW");
        assert!(s.eventually_constant);
        let empty = scan_winning(&g, ProcType::Sys, [0, 2, 0], 0..0, SolveOptions::default(), 1).unwrap();
        assert!(empty.entries.is_empty() && !empty.eventually_constant);
    }
}
