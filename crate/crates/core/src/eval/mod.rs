//! Deciding `G ⊨ φ[env]` over a finite group.
//!
//! Three engines share this module:
//! * [`Mode::Naive`] is plain Tarskian recursion, kept as a cross-check.
//! * [`Mode::Grounded`] compiles the formula into a plan: existential blocks
//!   become backtracking searches whose variables are either solved from
//!   equations or enumerated, conjuncts are checked as soon as they are
//!   ground, and definable sets (generation towers, term images) are
//!   materialized once per parameter binding.
//! * [`relation`] evaluates bottom-up into satisfying-assignment tables.

mod naive;
mod planned;
mod relational;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Term};
use crate::group::{FiniteGroup, Subset};

pub use relational::{relation, relation_with_cap, Relation, DEFAULT_ARITY_CAP};

/// Default cost budget in estimated elementary steps.
pub const DEFAULT_BUDGET: f64 = 1e9;
/// `Auto` uses the naive engine when its estimate is at most this.
pub const AUTO_NAIVE_LIMIT: f64 = 2e4;

/// Variable assignment.
pub type Env = BTreeMap<String, usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Naive,
    Grounded,
    #[default]
    Auto,
    Relational,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "naive" => Ok(Mode::Naive),
            "grounded" => Ok(Mode::Grounded),
            "auto" => Ok(Mode::Auto),
            "relational" => Ok(Mode::Relational),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("element {value} bound to {var} is out of range")]
    ElementOutOfRange { var: String, value: usize },
    #[error("estimated cost {estimate:.3e} exceeds budget {budget:.3e}")]
    BudgetExceeded { estimate: f64, budget: f64 },
    #[error("sentence is not of the form ∃x1…∃xm φ with φ closed over x1…xm")]
    ShapeMismatch,
    #[error("subformula {formula} has {arity} free variables, above the arity cap {cap}")]
    ArityCapExceeded { formula: String, arity: usize, cap: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalStats {
    pub nodes_visited: u64,
    pub relations_built: u64,
    pub max_relation_rows: u64,
    pub estimate: f64,
    #[serde(skip)]
    pub wall_time: Duration,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub mode: Mode,
    pub budget: f64,
    pub force: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            mode: Mode::Auto,
            budget: DEFAULT_BUDGET,
            force: false,
        }
    }
}

impl EvalOptions {
    pub fn mode(mode: Mode) -> Self {
        EvalOptions {
            mode,
            ..Default::default()
        }
    }

    pub fn forced(mut self) -> Self {
        self.force = true;
        self
    }
}

/// Result of [`eval_sentence_grounded`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroundedOutcome {
    pub holds: bool,
    /// Lexicographically least accepted tuple for the outer block, by name.
    pub witness: Option<Vec<(String, usize)>>,
    pub stats: EvalStats,
}

/// Compiled term over variable slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum CTerm {
    Slot(u32),
    One,
    Inv(Box<CTerm>),
    Mul(Box<CTerm>, Box<CTerm>),
}

impl CTerm {
    #[inline]
    pub(crate) fn eval(&self, g: &FiniteGroup, env: &[u32]) -> usize {
        match self {
            CTerm::Slot(s) => env[*s as usize] as usize,
            CTerm::One => 0,
            CTerm::Inv(t) => g.inv(t.eval(g, env)),
            CTerm::Mul(a, b) => g.mul(a.eval(g, env), b.eval(g, env)),
        }
    }

    pub(crate) fn slots(&self, out: &mut Vec<u32>) {
        match self {
            CTerm::Slot(s) => out.push(*s),
            CTerm::One => {}
            CTerm::Inv(t) => t.slots(out),
            CTerm::Mul(a, b) => {
                a.slots(out);
                b.slots(out);
            }
        }
    }
}

/// Name-to-slot scope used by both compilers.
#[derive(Debug, Default)]
pub(crate) struct Scope {
    frames: Vec<(String, u32)>,
    next: u32,
}

impl Scope {
    pub(crate) fn bind(&mut self, name: &str) -> u32 {
        let s = self.next;
        self.next += 1;
        self.frames.push((name.to_string(), s));
        s
    }

    pub(crate) fn unbind(&mut self) {
        self.frames.pop();
    }

    pub(crate) fn lookup(&self, name: &str) -> Option<u32> {
        self.frames.iter().rev().find(|(n, _)| n == name).map(|(_, s)| *s)
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.next as usize
    }

    pub(crate) fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(v) => CTerm::Slot(self.lookup(v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?),
            Term::One => CTerm::One,
            Term::Inv(t) => CTerm::Inv(Box::new(self.term(t)?)),
            Term::Mul(a, b) => CTerm::Mul(Box::new(self.term(a)?), Box::new(self.term(b)?)),
        })
    }

    /// Binds every free variable of `f` from `env`, returning initial slot values.
    pub(crate) fn with_env(g: &FiniteGroup, f: &Formula, env: &Env) -> Result<(Scope, Vec<u32>), EvalError> {
        let mut scope = Scope::default();
        let mut values = Vec::new();
        for v in f.free_vars() {
            let value = *env.get(&v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
            if value >= g.order() {
                return Err(EvalError::ElementOutOfRange { var: v, value });
            }
            scope.bind(&v);
            values.push(value as u32);
        }
        Ok((scope, values))
    }
}

/// Decides `G ⊨ f[env]` with default options.
pub fn eval(g: &FiniteGroup, f: &Formula, env: &Env) -> Result<(bool, EvalStats), EvalError> {
    eval_with(g, f, env, &EvalOptions::default())
}

pub fn eval_with(g: &FiniteGroup, f: &Formula, env: &Env, opts: &EvalOptions) -> Result<(bool, EvalStats), EvalError> {
    let start = Instant::now();
    let mode = match opts.mode {
        Mode::Auto => {
            if naive::estimate(g, f) <= AUTO_NAIVE_LIMIT {
                Mode::Naive
            } else {
                Mode::Grounded
            }
        }
        m => m,
    };
    let (holds, mut stats) = match mode {
        Mode::Naive => {
            let est = naive::estimate(g, f);
            check_budget(est, opts)?;
            naive::eval(g, f, env, est)?
        }
        Mode::Grounded => {
            let plan = planned::Plan::compile(g, f, env)?;
            check_budget(plan.estimate(), opts)?;
            plan.run()
        }
        Mode::Relational => relational::eval_via_relation(g, f, env)?,
        Mode::Auto => unreachable!(),
    };
    stats.mode = mode;
    stats.wall_time = start.elapsed();
    Ok((holds, stats))
}

fn check_budget(estimate: f64, opts: &EvalOptions) -> Result<(), EvalError> {
    if estimate > opts.budget && !opts.force {
        Err(EvalError::BudgetExceeded {
            estimate,
            budget: opts.budget,
        })
    } else {
        Ok(())
    }
}

/// Evaluates a sentence `∃a1…∃am φ` by enumerating the outer block in
/// lexicographic order and checking the conjuncts of `φ` as soon as their
/// variables are bound. Returns the least witness when the sentence holds.
pub fn eval_sentence_grounded(g: &FiniteGroup, f: &Formula, opts: &EvalOptions) -> Result<GroundedOutcome, EvalError> {
    let start = Instant::now();
    let plan = planned::GroundedPlan::compile(g, f)?;
    check_budget(plan.estimate(), opts)?;
    let (witness, mut stats) = plan.run();
    stats.mode = Mode::Grounded;
    stats.wall_time = start.elapsed();
    Ok(GroundedOutcome {
        holds: witness.is_some(),
        witness,
        stats,
    })
}

/// Evaluates a closed sentence, using the grounded witness search when the
/// sentence has an outer existential block and the planned engine otherwise.
pub fn eval_sentence(g: &FiniteGroup, f: &Formula, opts: &EvalOptions) -> Result<GroundedOutcome, EvalError> {
    match opts.mode {
        Mode::Grounded | Mode::Auto => match eval_sentence_grounded(g, f, opts) {
            Err(EvalError::ShapeMismatch) => {}
            other => return other,
        },
        _ => {}
    }
    let (holds, stats) = eval_with(g, f, &Env::new(), opts)?;
    Ok(GroundedOutcome {
        holds,
        witness: None,
        stats,
    })
}

/// The set `{v : G ⊨ f[env, var := v]}`, computed with one compiled plan.
pub fn definable_set<'g>(
    g: &'g FiniteGroup,
    f: &Formula,
    var: &str,
    env: &Env,
    opts: &EvalOptions,
) -> Result<(Subset<'g>, EvalStats), EvalError> {
    let start = Instant::now();
    let free = f.free_vars();
    let Some(slot) = free.iter().position(|v| v == var) else {
        let (holds, stats) = eval_with(g, f, env, opts)?;
        let all = if holds { g.order() } else { 0 };
        return Ok((g.subset(0..all), stats));
    };
    let mut env = env.clone();
    env.insert(var.to_string(), 0);
    let plan = planned::Plan::compile(g, f, &env)?;
    check_budget(plan.estimate() * g.order() as f64, opts)?;
    let (bits, mut stats) = plan.sweep(slot as u32);
    stats.mode = Mode::Grounded;
    stats.wall_time = start.elapsed();
    Ok((g.subset(bits.ones()), stats))
}

/// Estimated number of elementary steps to evaluate `f` on `g` in `mode`.
/// `Naive` counts `|G|^depth` per node; `Grounded` follows the compiled plan
/// with heuristic filter selectivities.
pub fn cost_estimate(g: &FiniteGroup, f: &Formula, mode: Mode) -> f64 {
    match mode {
        Mode::Naive | Mode::Relational => naive::estimate(g, f),
        Mode::Grounded | Mode::Auto => {
            if let Ok(p) = planned::GroundedPlan::compile(g, f) {
                return p.estimate();
            }
            let env: Env = f.free_vars().into_iter().map(|v| (v, 0)).collect();
            planned::Plan::compile(g, f, &env)
                .map(|p| p.estimate())
                .unwrap_or(f64::INFINITY)
        }
    }
}
