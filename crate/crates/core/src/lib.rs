//! Synthesis for first-order specifications over data words, via parameterized
//! vector games.
//!
//! The crate is organised bottom-up:
//!
//! - [`logic`]: alphabets, executions, the formula language and its model checker.
//! - [`abstraction`]: locations, configurations and the execution/configuration bridge.
//! - [`normalform`]: counting normal forms for the class-only fragment.
//! - [`game`]: vector games, transitions, legal moves and plays.
//! - [`solver`]: exact solving, strategy verification and a brute-force oracle.
//! - [`reductions`]: formula/game compilers, play/execution translators,
//!   the two-counter machine encoding and the library of reference games.
//! - [`cutoff`]: cutoff bounds and the decision procedure built on them.

pub mod abstraction;
pub mod cutoff;
pub mod game;
pub mod logic;
pub mod normalform;
pub mod reductions;
pub mod sample;
pub mod solver;

pub use abstraction::{Configuration, Location, Triple};
pub use game::{Acceptance, Game, MoveCaps, Play, Transition};
pub use logic::{Alphabet, Execution, Formula, ProcType, Side};
pub use solver::{Player, Verdict};
