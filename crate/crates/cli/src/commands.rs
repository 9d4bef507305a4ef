use std::path::Path;

use pvg::cutoff::{decide, scan_winning, CutoffError, DecideOptions, Outcome};
use pvg::game::{estimate_branching, GameError, MoveCaps};
use pvg::logic::{model_check, parse_formula_file, Interpretation, ProcType, Side};
use pvg::normalform::{normalize, satisfiable, threshold, NormalFormError, DEFAULT_BUDGET};
use pvg::reductions::{
    encode_2cm, execution_to_play, formula_to_game, formula_to_game_explicit, game_to_formula, library_strategy,
    play_to_execution, tcm_run_bounded, tcm_strategy, ReductionError,
};
use pvg::sample;
use pvg::solver::{solve, verify_strategy, PositionalStrategy, SolveError, SolveOptions, Strategy, DEFAULT_NODE_BUDGET};
use pvg::{Configuration, Game, Play};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::inputs::{Inputs, BUILTIN};
use crate::{Command, Fail, Global, Output};

/// Rows allowed when spelling a game out as a sentence.
const INVERT_BUDGET: usize = 100_000;

/// Branching above which `solve` and `verify` suggest move caps.
const BRANCHING_WARNING: f64 = 1e5;

fn nf_fail(e: NormalFormError) -> Fail {
    match e {
        NormalFormError::Budget(_) => Fail::budget(e.to_string()),
        NormalFormError::Logic(_)
        | NormalFormError::NotASentence
        | NormalFormError::BoundTooSmall { .. }
        | NormalFormError::ZeroBound
        | NormalFormError::RankTooLarge(_)
        | NormalFormError::Shape(_) => Fail::parse(e.to_string()),
    }
}

fn game_fail(e: GameError) -> Fail {
    match e {
        GameError::NormalForm(e) => nf_fail(e),
        e => Fail::parse(e.to_string()),
    }
}

fn reduction_fail(e: ReductionError) -> Fail {
    match e {
        ReductionError::NormalForm(e) => nf_fail(e),
        ReductionError::Game(e) => game_fail(e),
        ReductionError::Budget { .. } => Fail::budget(e.to_string()),
        e => Fail::parse(e.to_string()),
    }
}

fn solve_fail(e: SolveError, partial: Value) -> Fail {
    match e {
        SolveError::Budget { .. } => Fail::inconclusive(e.to_string(), partial),
        SolveError::Game(e) => game_fail(e),
    }
}

fn artifact(v: &Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    text
}

fn with_semantics(mut v: Value, caps: MoveCaps) -> Value {
    if !caps.is_unlimited() {
        v["semantics"] = json!("capped semantics");
    }
    v
}

fn warn_branching(g: &Game, c0: &Configuration, caps: MoveCaps, global: &Global) {
    if global.quiet {
        return;
    }
    let widest = [Side::System, Side::Environment]
        .into_iter()
        .map(|side| estimate_branching(g.alphabet(), c0, side, caps))
        .fold(0.0, f64::max);
    if widest > BRANCHING_WARNING {
        eprintln!(
            "warning: about {widest:.3e} moves from the initial configuration; \
             consider --caps-tokens / --caps-letters (capped semantics)"
        );
    }
}

/// A game file, `builtin:NAME`, or a formula file compiled to explicit rows.
fn game_or_formula(inputs: &mut Inputs, spec: &str, budget: usize) -> Result<Game, Fail> {
    if spec.starts_with(BUILTIN) {
        return inputs.game(spec);
    }
    let text = inputs.read(Path::new(spec))?;
    if let Ok(v) = serde_json::from_str::<Value>(&text) {
        return Game::from_json(&v).map_err(|e| Fail::parse(format!("{spec}: {e}")));
    }
    let (ab, f) = parse_formula_file(&text).map_err(|e| Fail::parse(format!("{spec}: {e}")))?;
    formula_to_game_explicit(&f, &std::sync::Arc::new(ab), None, budget).map_err(reduction_fail)
}

pub fn dispatch(cmd: &Command, inputs: &mut Inputs, global: &Global) -> Result<Output, Fail> {
    match cmd {
        Command::Check { formula, execution } => {
            let (ab, f) = inputs.formula(formula)?;
            let x = inputs.execution(execution, &ab)?;
            let value = model_check(&x, &f, &Interpretation::new()).map_err(|e| Fail::parse(e.to_string()))?;
            Ok(Output { result: json!({"value": value}), token: value.to_string(), artifact: None })
        }
        Command::Normalize { formula, bound, mcap } => {
            let (ab, f) = inputs.formula(formula)?;
            let bound = match bound {
                Some(b) => *b,
                None => threshold(&f).map_err(nf_fail)?,
            };
            let nf = normalize(&f, &ab, bound, *mcap, global.budget_or(DEFAULT_BUDGET)?).map_err(nf_fail)?;
            let result = json!({"clauses": nf.clauses.len(), "normal_form": nf.to_json(&ab)});
            Ok(Output { result, token: format!("{} clauses", nf.clauses.len()), artifact: None })
        }
        Command::Sat { formula, count_cap } => {
            let (ab, f) = inputs.formula(formula)?;
            let found = satisfiable(&f, &ab, *count_cap, global.budget_or(DEFAULT_BUDGET)?).map_err(nf_fail)?;
            Ok(match found {
                Some(x) => Output {
                    result: json!({"sat": true, "witness": x.to_string()}),
                    token: x.to_string(),
                    artifact: None,
                },
                None => Output { result: json!({"sat": false}), token: "unsat".into(), artifact: None },
            })
        }
        Command::Compile { formula, bound, explicit } => {
            let (ab, f) = inputs.formula(formula)?;
            let g = if *explicit {
                formula_to_game_explicit(&f, &ab, *bound, global.budget_or(DEFAULT_BUDGET)?)
            } else {
                formula_to_game(&f, &ab, *bound)
            }
            .map_err(reduction_fail)?;
            Ok(Output {
                result: json!({"B": g.bound(), "rows": g.row_count()}),
                token: "ok".into(),
                artifact: Some(artifact(&g.to_json())),
            })
        }
        Command::Invert { game } => {
            let g = inputs.game(game)?;
            let f = game_to_formula(&g, global.budget_or(INVERT_BUDGET)?).map_err(reduction_fail)?;
            Ok(Output {
                result: json!({"quantifier_rank": f.quantifier_rank()}),
                token: "ok".into(),
                artifact: Some(format!("{}\n{f}\n", g.alphabet())),
            })
        }
        Command::Solve { game, start, caps, emit_strategy } => {
            let g = inputs.game(game)?;
            let c0 = inputs.initial(&g, start)?;
            let caps = caps.get();
            warn_branching(&g, &c0, caps, global);
            let budget = global.budget_or(DEFAULT_NODE_BUDGET)?;
            let opts = SolveOptions { caps, budget, extract_strategy: *emit_strategy };
            let partial = with_semantics(json!({"winner": "inconclusive", "budget": budget}), caps);
            let (v, s) = solve(&g, &c0, opts).map_err(|e| solve_fail(e, partial))?;
            let mut result = v.to_json();
            result["initial"] = c0.to_json(g.alphabet());
            if let Some(s) = s {
                result["strategy"] = s.to_json(&g);
            }
            Ok(Output { result, token: v.winner.name().into(), artifact: None })
        }
        Command::Decide { input, ke, kse, n_max, k, caps } => {
            let budget = global.budget_or(DEFAULT_NODE_BUDGET)?;
            let g = game_or_formula(inputs, input, global.budget_or(DEFAULT_BUDGET)?)?;
            let caps = caps.get();
            let opts = DecideOptions { caps, budget, n_max: *n_max, k_override: *k, jobs: global.jobs };
            let d = decide(&g, *ke, *kse, opts).map_err(|e| match e {
                CutoffError::ImplicitAcceptance => Fail::parse(format!("{e}; pass --k")),
                CutoffError::Solve(e) => solve_fail(e, Value::Null),
            })?;
            let result = with_semantics(d.to_json(), caps);
            match d.outcome {
                Outcome::Nonempty { .. } => Ok(Output { result, token: "nonempty".into(), artifact: None }),
                Outcome::Empty { .. } => Ok(Output { result, token: "empty".into(), artifact: None }),
                Outcome::Inconclusive { at } => {
                    Err(Fail::inconclusive(format!("budget exhausted while solving N = {at}"), result))
                }
            }
        }
        Command::Scan { game, axis, from, to, start, caps } => {
            let g = inputs.game(game)?;
            let axis = ProcType::from_name(axis).ok_or_else(|| Fail::parse(format!("axis must be s, e or se, not `{axis}`")))?;
            let caps = caps.get();
            let opts = SolveOptions { caps, budget: global.budget_or(DEFAULT_NODE_BUDGET)?, extract_strategy: false };
            let fixed = [start.ks, start.ke, start.kse];
            let scan = scan_winning(&g, axis, fixed, *from..to.saturating_add(1), opts, global.jobs).map_err(|e| match e {
                CutoffError::Solve(e) => solve_fail(e, Value::Null),
                e => Fail::parse(e.to_string()),
            })?;
            Ok(Output { result: with_semantics(scan.to_json(), caps), token: scan.pattern(), artifact: None })
        }
        Command::Simulate { game, play, execution, steps, start, caps } => {
            let g = inputs.game(game)?;
            if let Some(path) = play {
                let v = inputs.json(path)?;
                let play = Play::from_json(&v, &g).map_err(|e| Fail::parse(format!("{}: {e}", path.display())))?;
                let x = play_to_execution(&play, &g).map_err(reduction_fail)?;
                return Ok(Output { result: json!({"execution": x.to_string()}), token: x.to_string(), artifact: None });
            }
            if let Some(path) = execution {
                let x = inputs.execution(path, g.alphabet())?;
                let play = execution_to_play(&x, &g).map_err(reduction_fail)?;
                let token = format!("{} steps", play.len());
                return Ok(Output { result: json!({"play": play.to_json(&g)}), token, artifact: None });
            }
            let c0 = inputs.initial(&g, start)?;
            let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
            let play = sample::play(&mut rng, &g, &c0, caps.get(), *steps);
            let mut result = json!({"seed": global.seed, "play": play.to_json(&g)});
            // Only plays from an initial configuration have an execution.
            if let Ok(x) = play_to_execution(&play, &g) {
                result["execution"] = json!(x.to_string());
            }
            Ok(Output { result, token: format!("{} steps", play.len()), artifact: None })
        }
        Command::Encode2cm { machine } => {
            let m = inputs.machine(machine)?;
            let g = encode_2cm(&m);
            Ok(Output {
                result: json!({"B": g.bound(), "rows": g.row_count()}),
                token: "ok".into(),
                artifact: Some(artifact(&g.to_json())),
            })
        }
        Command::Verify { game, strategy, run_bound, start, caps } => {
            let g = inputs.game(game)?;
            let c0 = inputs.initial(&g, start)?;
            let caps = caps.get();
            let s: Box<dyn Strategy> = if let Some(name) = strategy.strip_prefix(BUILTIN) {
                Box::new(library_strategy(name).ok_or_else(|| Fail::parse(format!("unknown builtin strategy `{name}`")))?)
            } else if let Some(path) = strategy.strip_prefix("tcm:") {
                let m = inputs.machine(Path::new(path))?;
                let run = tcm_run_bounded(&m, *run_bound)
                    .ok_or_else(|| Fail::io(format!("the machine does not halt within {run_bound} steps")))?;
                Box::new(tcm_strategy(&m, &run).map_err(reduction_fail)?)
            } else {
                let v = inputs.json(Path::new(strategy))?;
                Box::new(PositionalStrategy::from_json(&v, &g).map_err(|e| Fail::parse(format!("{strategy}: {e}")))?)
            };
            warn_branching(&g, &c0, caps, global);
            let budget = global.budget_or(DEFAULT_NODE_BUDGET)?;
            let partial = with_semantics(json!({"ok": "inconclusive", "budget": budget}), caps);
            let v = verify_strategy(&g, &c0, s.as_ref(), caps, budget).map_err(|e| solve_fail(e, partial))?;
            let result = json!({
                "ok": v.ok,
                "reason": v.reason,
                "counterexample": v.counterexample.map(|p| p.to_json(&g)),
                "explored": v.explored,
            });
            Ok(Output { result: with_semantics(result, caps), token: v.ok.to_string(), artifact: None })
        }
    }
}
