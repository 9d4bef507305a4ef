//! Reading inputs, with every byte read folded into the report digest.

use std::path::Path;
use std::sync::Arc;

use pvg::abstraction::Configuration;
use pvg::game::MoveCaps;
use pvg::logic::{parse_execution, parse_formula_file, Alphabet, Execution, Formula};
use pvg::reductions::{library_game, parse_2cm, TwoCounterMachine};
use pvg::Game;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Fail;

pub const BUILTIN: &str = "builtin:";

/// Collects the inputs of one invocation.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(command: &str, flags: &str) -> Inputs {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update([0]);
        hasher.update(flags.as_bytes());
        Inputs { hasher }
    }

    pub fn digest(&self) -> String {
        let bytes = self.hasher.clone().finalize();
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn read(&mut self, path: &Path) -> Result<String, Fail> {
        let text = std::fs::read_to_string(path).map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
        self.hasher.update([0]);
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    pub fn json(&mut self, path: &Path) -> Result<Value, Fail> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))
    }

    pub fn formula(&mut self, path: &Path) -> Result<(Arc<Alphabet>, Formula), Fail> {
        let text = self.read(path)?;
        let (ab, f) = parse_formula_file(&text).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))?;
        Ok((Arc::new(ab), f))
    }

    pub fn execution(&mut self, path: &Path, alphabet: &Arc<Alphabet>) -> Result<Execution, Fail> {
        let text = self.read(path)?;
        parse_execution(&text, alphabet.clone()).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))
    }

    /// A game JSON file, or `builtin:NAME`.
    pub fn game(&mut self, spec: &str) -> Result<Game, Fail> {
        if let Some(name) = spec.strip_prefix(BUILTIN) {
            self.hasher.update([0]);
            self.hasher.update(spec.as_bytes());
            return library_game(name).ok_or_else(|| Fail::parse(format!("unknown builtin game `{name}`")));
        }
        let v = self.json(Path::new(spec))?;
        Game::from_json(&v).map_err(|e| Fail::parse(format!("{spec}: {e}")))
    }

    pub fn machine(&mut self, path: &Path) -> Result<TwoCounterMachine, Fail> {
        let text = self.read(path)?;
        parse_2cm(&text).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))
    }

    /// `C_(ks,ke,kse)`, or the configuration in `file`.
    pub fn initial(&mut self, game: &Game, start: &Start) -> Result<Configuration, Fail> {
        let c = match &start.config {
            Some(path) => {
                let v = self.json(path)?;
                Configuration::from_json(&v, game.alphabet()).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))?
            }
            None => game.initial([start.ks, start.ke, start.kse]),
        };
        game.check_shape(&c).map_err(|e| Fail::parse(e.to_string()))?;
        Ok(c)
    }
}

/// Initial configuration flags.
#[derive(clap::Args, Debug, Clone)]
pub struct Start {
    /// System-only tokens.
    #[arg(long, default_value_t = 0)]
    pub ks: u32,
    /// Environment-only tokens.
    #[arg(long, default_value_t = 0)]
    pub ke: u32,
    /// Shared tokens.
    #[arg(long, default_value_t = 0)]
    pub kse: u32,
    /// Start from the configuration in this JSON file instead.
    #[arg(long, conflicts_with_all = ["ks", "ke", "kse"])]
    pub config: Option<std::path::PathBuf>,
}

/// Move restrictions.
#[derive(clap::Args, Debug, Clone, Copy)]
pub struct Caps {
    /// Most tokens moved per transition.
    #[arg(long)]
    pub caps_tokens: Option<u32>,
    /// Most letters appended per token and transition.
    #[arg(long)]
    pub caps_letters: Option<u32>,
}

impl Caps {
    pub fn get(self) -> MoveCaps {
        MoveCaps::new(self.caps_tokens, self.caps_letters)
    }
}
