//! Plays from normalized executions and back.
//!
//! An execution is normalized for a game when it splits into maximal blocks of
//! System letters and Environment letters such that, read as a play from the
//! initial configuration, each System block reaches an accepting configuration
//! and each Environment block a rejecting one.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::ReductionError;
use crate::abstraction::{Configuration, Location};
use crate::game::{validate_play, Game, Play, Transition};
use crate::logic::{Event, Execution, ProcId, ProcType, ProcessUniverse, Side};

/// The play `π(w)`: one transition per block, moving every process from its
/// location before the block to its location after it. An execution starting
/// with Environment letters gets an initial System pass.
pub fn execution_to_play(w: &Execution, game: &Game) -> Result<Play, ReductionError> {
    if w.alphabet() != game.alphabet() {
        return Err(ReductionError::NotNormalized("execution and game use different alphabets".into()));
    }
    let alphabet = game.alphabet();
    let bound = game.bound();
    let universe = w.universe();
    let mut play = Play::new(game.initial(universe.sizes()));
    let mut loc: BTreeMap<ProcId, Location> = universe
        .iter()
        .map(|(_, p)| (p, Location::zero(alphabet.len())))
        .collect();

    let mut blocks: Vec<(Side, &[Event])> = Vec::new();
    let events = w.events();
    let mut start = 0;
    while start < events.len() {
        let side = alphabet.side_of(events[start].action);
        let mut end = start + 1;
        while end < events.len() && alphabet.side_of(events[end].action) == side {
            end += 1;
        }
        blocks.push((side, &events[start..end]));
        start = end;
    }
    if blocks.first().is_some_and(|(s, _)| *s == Side::Environment) {
        blocks.insert(0, (Side::System, &[]));
    }

    for (side, block) in blocks {
        let before = loc.clone();
        for ev in block {
            let l = loc.get_mut(&ev.process).expect("events use the universe");
            *l = l.plus(ev.action, bound);
        }
        let mut t = Transition::identity(side);
        for (ty, p) in universe.iter() {
            let (from, to) = (&before[&p], &loc[&p]);
            if from != to {
                t.add(alphabet, bound, from.clone(), to.clone(), ty, 1)?;
            }
        }
        play.push(t)?;
    }
    validate_play(game, &play).map_err(|v| ReductionError::NotNormalized(v.to_string()))?;
    Ok(play)
}

/// Order on locations comparing letter counts in alphabetical order of letter
/// names.
fn by_letter_name(order: &[usize]) -> impl Fn(&Location, &Location) -> Ordering + '_ {
    move |x, y| order.iter().map(|&a| x.get(a)).cmp(order.iter().map(|&a| y.get(a)))
}

/// The execution `w(π)`.
///
/// Processes are numbered per type as in [`ProcessUniverse::with_sizes`]. Every
/// transition is replayed move by move, with moves ordered lexicographically on
/// (source, target); each move takes the lowest-numbered processes of its type
/// still at its source and appends, for each of them, the shortest word leading
/// to the target.
pub fn play_to_execution(play: &Play, game: &Game) -> Result<Execution, ReductionError> {
    validate_play(game, play).map_err(|v| ReductionError::InvalidPlay(v.to_string()))?;
    let origin = Location::zero(game.alphabet().len());
    let totals = play.initial.totals();
    if play.initial != Configuration::initial(game.alphabet().len(), game.bound(), totals) {
        return Err(ReductionError::NotInitial);
    }
    let universe = ProcessUniverse::with_sizes(totals);
    // mem: for each type, the processes at each location, in increasing order.
    let mut mem: [BTreeMap<Location, Vec<ProcId>>; 3] = Default::default();
    for ty in ProcType::ALL {
        let ids = universe.of_type(ty).to_vec();
        if !ids.is_empty() {
            mem[ty.index()].insert(origin.clone(), ids);
        }
    }
    let order = game.alphabet().by_name();
    let cmp = by_letter_name(&order);
    let mut events = Vec::new();
    for (t, _) in &play.steps {
        let mut moves: Vec<(&Location, &Location, [u32; 3])> = t.moves().collect();
        moves.sort_by(|x, y| cmp(x.0, y.0).then_with(|| cmp(x.1, y.1)));
        let snapshot = mem.clone();
        let mut taken: BTreeMap<(usize, &Location), usize> = BTreeMap::new();
        for (from, to, n) in moves {
            let word = from.word_to(to);
            for ty in ProcType::ALL {
                let k = n[ty.index()] as usize;
                if k == 0 {
                    continue;
                }
                let used = taken.entry((ty.index(), from)).or_insert(0);
                let pool = snapshot[ty.index()].get(from).map(Vec::as_slice).unwrap_or(&[]);
                let chosen = pool
                    .get(*used..*used + k)
                    .ok_or_else(|| ReductionError::InvalidPlay("transition moves absent tokens".into()))?;
                *used += k;
                for &p in chosen {
                    events.extend(word.iter().map(|&a| Event { action: a, process: p }));
                    let slot = mem[ty.index()].get_mut(from).expect("snapshot entry");
                    slot.retain(|&q| q != p);
                    let dest = mem[ty.index()].entry(to.clone()).or_default();
                    let at = dest.partition_point(|&q| q < p);
                    dest.insert(at, p);
                }
            }
        }
        for m in &mut mem {
            m.retain(|_, ids| !ids.is_empty());
        }
    }
    Execution::new(game.alphabet().clone(), universe, events).map_err(|e| ReductionError::InvalidPlay(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_execution;
    use crate::reductions::{zone_game, zone_reference_play};

    #[test]
    fn empty_execution_gives_the_initial_configuration() {
        let g = zone_game();
        let w = parse_execution("procs both=1,2;", g.alphabet().clone()).unwrap();
        let play = execution_to_play(&w, &g).unwrap();
        assert!(play.is_empty());
        assert_eq!(play.initial, g.initial([0, 0, 2]));
        assert!(play_to_execution(&play, &g).unwrap().is_empty());
    }

    #[test]
    fn reference_play_round_trips() {
        let g = zone_game();
        let play = zone_reference_play();
        let w = play_to_execution(&play, &g).unwrap();
        assert_eq!(execution_to_play(&w, &g).unwrap(), play);
        assert_eq!(crate::abstraction::abstract_execution(&w, g.bound()), *play.last());
    }

    #[test]
    fn rejects_executions_that_are_not_normalized() {
        let g = zone_game();
        // One System block that leaves a token in a rejecting location.
        let w = parse_execution("procs both=1; (a,1)(a,1)", g.alphabet().clone()).unwrap();
        assert!(matches!(execution_to_play(&w, &g), Err(ReductionError::NotNormalized(_))));
    }
}
