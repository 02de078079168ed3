//! Soundness and uniqueness experiments.
//!
//! Every (sentence, group) cell is evaluated independently and in parallel
//! with one thread per cell; the report is then sorted, so the output is the
//! same for any thread count.

use grouplog_core::gen::FamilySentence;
use grouplog_core::iso::isomorphic;
use grouplog_core::{build_group_capped, eval_sentence, EvalError, EvalOptions, FiniteGroup};
use rayon::prelude::*;

use crate::corpus::{NamedGroup, CORPUS_ORDER_CAP};
use crate::error::HarnessError;
use crate::report::{Report, ReportKind, Row, Status};

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub eval: EvalOptions,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            eval: EvalOptions::default(),
            threads: 0,
        }
    }
}

/// Step budget from `GROUPLOG_BUDGET`, if set to a positive number.
pub fn budget_from_env() -> Option<f64> {
    std::env::var("GROUPLOG_BUDGET")
        .ok()?
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|b| *b > 0.0)
}

fn in_pool<T: Send>(threads: usize, work: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Usage(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

fn target_group(s: &FamilySentence) -> Result<FiniteGroup, String> {
    let fam = s
        .target
        .as_ref()
        .ok_or_else(|| format!("{} has no built-in target group", s.id()))?;
    build_group_capped(fam, CORPUS_ORDER_CAP).map_err(|e| e.to_string())
}

fn blank(kind: ReportKind, s: &FamilySentence, group: &str) -> Row {
    Row {
        schema_version: crate::report::SCHEMA_VERSION,
        kind,
        sentence: s.id(),
        group: group.to_string(),
        satisfied: None,
        isomorphic: None,
        status: Status::Error,
        witness: None,
        stats: None,
        message: None,
    }
}

/// Evaluates one cell; `expected` is the verdict the row must match to pass.
fn cell(kind: ReportKind, s: &FamilySentence, name: &str, g: &FiniteGroup, expected: bool, opts: &EvalOptions) -> Row {
    let mut row = blank(kind, s, name);
    match eval_sentence(g, &s.formula, opts) {
        Ok(out) => {
            row.satisfied = Some(out.holds);
            row.status = if out.holds == expected {
                Status::Pass
            } else {
                Status::Fail
            };
            row.witness = out.witness;
            row.stats = Some(out.stats);
        }
        Err(e @ EvalError::BudgetExceeded { .. }) => {
            row.status = Status::BudgetExceeded;
            row.message = Some(e.to_string());
        }
        Err(e) => row.message = Some(e.to_string()),
    }
    row
}

/// Checks `H ⊨ ψ_H` for each sentence against its own target group.
pub fn verify_soundness(sentences: &[FamilySentence], opts: &VerifyOptions) -> Result<Report, HarnessError> {
    let rows = in_pool(opts.threads, || {
        sentences
            .par_iter()
            .map(|s| {
                let name = s.target.as_ref().map_or_else(|| "?".to_string(), |f| f.name());
                match target_group(s) {
                    Ok(h) => cell(ReportKind::Soundness, s, &name, &h, true, &opts.eval),
                    Err(msg) => Row {
                        message: Some(msg),
                        ..blank(ReportKind::Soundness, s, &name)
                    },
                }
            })
            .collect::<Vec<_>>()
    })?;
    Ok(Report::new(ReportKind::Soundness, rows))
}

/// Compares `G ⊨ ψ_H` with `G ≅ H` for every sentence and every corpus group.
pub fn verify_uniqueness(
    sentences: &[FamilySentence],
    corpus: &[NamedGroup],
    opts: &VerifyOptions,
) -> Result<Report, HarnessError> {
    let targets: Vec<Result<FiniteGroup, String>> = sentences.iter().map(target_group).collect();
    let cells: Vec<(usize, usize)> = (0..sentences.len())
        .flat_map(|i| (0..corpus.len()).map(move |j| (i, j)))
        .collect();
    let rows = in_pool(opts.threads, || {
        cells
            .par_iter()
            .map(|&(i, j)| {
                let (s, ng) = (&sentences[i], &corpus[j]);
                let h = match &targets[i] {
                    Ok(h) => h,
                    Err(msg) => {
                        return Row {
                            message: Some(msg.clone()),
                            ..blank(ReportKind::Uniqueness, s, &ng.name)
                        }
                    }
                };
                let iso = match isomorphic(&ng.group, h) {
                    Ok(r) => r.isomorphic,
                    Err(e) => {
                        return Row {
                            message: Some(e.to_string()),
                            ..blank(ReportKind::Uniqueness, s, &ng.name)
                        }
                    }
                };
                let mut row = cell(ReportKind::Uniqueness, s, &ng.name, &ng.group, iso, &opts.eval);
                row.isomorphic = Some(iso);
                row
            })
            .collect::<Vec<_>>()
    })?;
    Ok(Report::new(ReportKind::Uniqueness, rows))
}
