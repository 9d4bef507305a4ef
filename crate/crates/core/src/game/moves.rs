//! Enumeration of effective moves.
//!
//! Tokens sharing a location and a type are interchangeable, so a move is chosen
//! group by group: for each (location, type) group we pick how many of its tokens
//! go to each reachable target. Every distinct choice yields a distinct transition.

use std::ops::ControlFlow;

use crate::abstraction::{Configuration, Location};
use crate::logic::{Alphabet, ProcType, Side};

/// Limits on a single move, for keeping branching under control. Solving under
/// finite caps explores a restricted game ("capped semantics").
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MoveCaps {
    pub max_tokens: Option<u32>,
    pub max_letters: Option<u32>,
}

impl MoveCaps {
    pub const UNLIMITED: MoveCaps = MoveCaps {
        max_tokens: None,
        max_letters: None,
    };

    pub fn new(max_tokens: Option<u32>, max_letters: Option<u32>) -> MoveCaps {
        MoveCaps {
            max_tokens,
            max_letters,
        }
    }

    pub fn is_unlimited(&self) -> bool {
        self.max_tokens.is_none() && self.max_letters.is_none()
    }
}

/// `count` tokens of type `ty` moving from `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moved {
    pub from: Location,
    pub to: Location,
    pub ty: ProcType,
    pub count: u32,
}

struct Group {
    loc: Location,
    ty: ProcType,
    count: u32,
    targets: Vec<Location>,
}

/// Locations `ℓ + w ≠ ℓ` for words `w` over `letters`, with `|w| ≤ max_letters`,
/// in increasing order.
fn targets(from: &Location, letters: std::ops::Range<usize>, bound: u8, max_letters: Option<u32>) -> Vec<Location> {
    let mut out = Vec::new();
    let mut counts: Vec<u8> = from.counts().to_vec();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        counts: &mut Vec<u8>,
        from: &Location,
        letters: &std::ops::Range<usize>,
        i: usize,
        used: u32,
        bound: u8,
        max_letters: Option<u32>,
        out: &mut Vec<Location>,
    ) {
        if i == counts.len() {
            if used > 0 {
                out.push(Location::from_counts(counts));
            }
            return;
        }
        if !letters.contains(&i) {
            rec(counts, from, letters, i + 1, used, bound, max_letters, out);
            return;
        }
        let base = from.get(i);
        for v in base..=bound {
            let extra = used + (v - base) as u32;
            if max_letters.is_some_and(|m| extra > m) {
                break;
            }
            counts[i] = v;
            rec(counts, from, letters, i + 1, extra, bound, max_letters, out);
        }
        counts[i] = base;
    }
    rec(&mut counts, from, &letters, 0, 0, bound, max_letters, &mut out);
    out
}

fn groups(alphabet: &Alphabet, c: &Configuration, side: Side, caps: MoveCaps) -> Vec<Group> {
    let letters = alphabet.letters_of(side);
    let mut out = Vec::new();
    for (loc, t) in c.iter() {
        let mut tg: Option<Vec<Location>> = None;
        for ty in ProcType::ALL {
            if !ty.serves(side) || t[ty.index()] == 0 {
                continue;
            }
            let targets = tg
                .get_or_insert_with(|| targets(loc, letters.clone(), c.bound(), caps.max_letters))
                .clone();
            if targets.is_empty() {
                continue;
            }
            out.push(Group {
                loc: loc.clone(),
                ty,
                count: t[ty.index()],
                targets,
            });
        }
    }
    out
}

struct Walker<'a, F> {
    groups: &'a [Group],
    max_tokens: u32,
    work: Configuration,
    stack: Vec<Moved>,
    visit: F,
}

impl<F: FnMut(&[Moved], &Configuration) -> ControlFlow<()>> Walker<'_, F> {
    fn group(&mut self, g: usize, budget: u32) -> ControlFlow<()> {
        if g == self.groups.len() {
            if self.stack.is_empty() {
                return ControlFlow::Continue(());
            }
            return (self.visit)(&self.stack, &self.work);
        }
        let avail = self.groups[g].count.min(budget);
        self.target(g, 0, avail, budget)
    }

    /// Distributes at most `left` tokens of group `g` over targets `k..`.
    fn target(&mut self, g: usize, k: usize, left: u32, budget: u32) -> ControlFlow<()> {
        let group = &self.groups[g];
        if k == group.targets.len() {
            let used = group.count.min(budget) - left;
            return self.group(g + 1, budget - used);
        }
        self.target(g, k + 1, left, budget)?;
        let (from, to, ty) = (group.loc.clone(), group.targets[k].clone(), group.ty);
        for n in 1..=left {
            let removed = self.work.remove(&from, ty, 1);
            debug_assert!(removed);
            self.work.add(&to, ty, 1);
            self.stack.push(Moved {
                from: from.clone(),
                to: to.clone(),
                ty,
                count: n,
            });
            let r = self.target(g, k + 1, left - n, budget);
            self.stack.pop();
            if r.is_break() {
                self.undo(&from, &to, ty, n);
                return r;
            }
        }
        self.undo(&from, &to, ty, left);
        ControlFlow::Continue(())
    }

    fn undo(&mut self, from: &Location, to: &Location, ty: ProcType, n: u32) {
        if n == 0 {
            return;
        }
        let removed = self.work.remove(to, ty, n);
        debug_assert!(removed);
        self.work.add(from, ty, n);
    }
}

/// Calls `visit` with every effective move of `side` at `c` within `caps`, together
/// with the resulting configuration, until it returns `Break`.
///
/// Only tokens of types the side controls move, each along the side's letters.
/// The order is deterministic.
pub fn for_each_effective_move<F>(alphabet: &Alphabet, c: &Configuration, side: Side, caps: MoveCaps, visit: F)
where
    F: FnMut(&[Moved], &Configuration) -> ControlFlow<()>,
{
    let groups = groups(alphabet, c, side, caps);
    let mut walker = Walker {
        groups: &groups,
        max_tokens: caps.max_tokens.unwrap_or(u32::MAX),
        work: c.clone(),
        stack: Vec::new(),
        visit,
    };
    let budget = walker.max_tokens;
    let _ = walker.group(0, budget);
}

/// Number of effective moves of `side` at `c` within `caps`, before filtering by
/// acceptance; saturates at `f64::INFINITY` for absurd sizes.
pub fn estimate_branching(alphabet: &Alphabet, c: &Configuration, side: Side, caps: MoveCaps) -> f64 {
    // Multisets of size ≤ n over m targets: C(n + m, m). Token caps are ignored,
    // so this is an upper bound.
    let mut total = 1.0f64;
    for g in groups(alphabet, c, side, caps) {
        let m = g.targets.len() as f64;
        let mut ways = 1.0f64;
        for i in 1..=g.count {
            ways *= (m + i as f64) / i as f64;
        }
        total *= ways;
    }
    total - 1.0
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::game::Transition;

    fn ab() -> Alphabet {
        Alphabet::new(["a"], ["d"]).unwrap()
    }

    fn collect(c: &Configuration, side: Side, caps: MoveCaps) -> Vec<(Vec<Moved>, Configuration)> {
        let mut out = Vec::new();
        for_each_effective_move(&ab(), c, side, caps, |m, d| {
            out.push((m.to_vec(), d.clone()));
            ControlFlow::Continue(())
        });
        out
    }

    #[test]
    fn single_token_targets() {
        let c = Configuration::initial(2, 3, [0, 0, 1]);
        let moves = collect(&c, Side::System, MoveCaps::UNLIMITED);
        assert_eq!(moves.len(), 3);
        let capped = collect(&c, Side::System, MoveCaps::new(None, Some(2)));
        assert_eq!(capped.len(), 2);
        assert!(collect(&Configuration::initial(2, 3, [0, 1, 0]), Side::System, MoveCaps::UNLIMITED).is_empty());
    }

    #[test]
    fn counts_multisets_and_restores_the_configuration() {
        let c = Configuration::from_entries(
            2,
            2,
            [(Location::zero(2), [1, 1, 3]), (Location::from_counts(&[1, 0]), [0, 0, 1])],
        );
        for side in [Side::System, Side::Environment] {
            let moves = collect(&c, side, MoveCaps::UNLIMITED);
            // Transitions are distinct; their results need not be, as moving
            // ℓ0→⟨a⟩ and ⟨a⟩→⟨a²⟩ lands where ℓ0→⟨a²⟩ does.
            let transitions: HashSet<_> = moves.iter().map(|(m, _)| Transition::from_moved(side, m)).collect();
            assert_eq!(transitions.len(), moves.len());
            let est = estimate_branching(&ab(), &c, side, MoveCaps::UNLIMITED);
            assert_eq!(est.round() as usize, moves.len());
            for (_, d) in &moves {
                assert!(d.potential() > c.potential());
                assert_eq!(d.totals(), c.totals());
            }
        }
    }

    #[test]
    fn token_cap_limits_moved_tokens() {
        let c = Configuration::initial(2, 2, [0, 0, 4]);
        for (m, _) in collect(&c, Side::Environment, MoveCaps::new(Some(2), None)) {
            assert!(m.iter().map(|x| x.count).sum::<u32>() <= 2);
        }
        assert_eq!(collect(&c, Side::Environment, MoveCaps::new(Some(2), None)).len(), 2 + 3);
    }
}
