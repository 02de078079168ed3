use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use grouplog::lengths::{parse_range, LengthFamily, Sweep};
use grouplog::sentences::{
    generate, read_sentence_dir, soundness_sentences, write_sentence, write_sentence_in, Sidecar,
};
use grouplog::{
    budget_from_env, corpus_build, length_report, resolve_group, verify_soundness, verify_uniqueness, Corpus,
    HarnessError, VerifyOptions,
};
use grouplog_core::gen::SentenceFamily;
use grouplog_core::iso::isomorphic;
use grouplog_core::{eval_sentence, eval_with, parse_formula, Env, EvalOptions, Mode, Presentation};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "grouplog",
    version,
    about = "Short first-order descriptions of finite groups, checked on Cayley tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sentence: cyclic2 N | abelian Q1 Q2 ... | symmetric N | simple ORDER | ut3 N | desk
    Gen {
        family: String,
        params: Vec<u64>,
        /// Output file (`desk`: output directory). A `.json` sidecar is written next to it.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Presentation file for `symmetric` and `simple`.
        #[arg(long)]
        presentation: Option<PathBuf>,
    },
    /// Decide whether a group satisfies a formula
    Eval {
        formula: PathBuf,
        /// Cayley-table file or built-in name such as `UT3(3)`
        group: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Free-variable binding `name=element`
        #[arg(long = "bind", value_parser = parse_binding)]
        bindings: Vec<(String, usize)>,
    },
    /// Decide whether two groups are isomorphic
    Iso { a: String, b: String },
    /// Corpus management
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Run the soundness or uniqueness experiment
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        /// Directory of `.fo` sentences; defaults to the built-in desk set
        #[arg(long)]
        sentences: Option<PathBuf>,
        /// Corpus directory (uniqueness only)
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Build the corpus in memory instead of reading one (uniqueness only)
        #[arg(long, default_value_t = 64)]
        max_order: usize,
        /// JSONL report path; a CSV summary is written next to it
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Measure sentence lengths against the frozen scaling constants
    Lengths {
        #[arg(value_parser = clap::value_parser!(LengthFamilyArg))]
        family: LengthFamilyArg,
        /// Inclusive parameter range `a..b` (abelian: sample seeds)
        #[arg(long)]
        range: Option<String>,
        /// Number of deterministic samples drawn from the range
        #[arg(long)]
        samples: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the maximum ratios of the default length sweeps as JSON
    Golden,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Write the built-in corpus as Cayley-table files
    Build {
        #[arg(long)]
        max_order: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct BudgetArgs {
    /// Estimated-step budget (default: GROUPLOG_BUDGET or 1e9)
    #[arg(long)]
    budget: Option<f64>,
    /// Evaluate even when the estimate exceeds the budget
    #[arg(long)]
    force: bool,
}

impl BudgetArgs {
    fn options(&self, mode: Mode) -> EvalOptions {
        let mut o = EvalOptions::mode(mode);
        if let Some(b) = self.budget.or_else(budget_from_env) {
            o.budget = b;
        }
        o.force = self.force;
        o
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Naive,
    Grounded,
    Auto,
    Relational,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Naive => Mode::Naive,
            ModeArg::Grounded => Mode::Grounded,
            ModeArg::Auto => Mode::Auto,
            ModeArg::Relational => Mode::Relational,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Soundness,
    Uniqueness,
}

#[derive(Clone, Copy)]
struct LengthFamilyArg(LengthFamily);

impl std::str::FromStr for LengthFamilyArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(LengthFamilyArg)
    }
}

fn parse_binding(s: &str) -> Result<(String, usize), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=element, got {s:?}"))?;
    Ok((k.to_string(), v.parse().map_err(|_| format!("bad element {v:?}"))?))
}

fn read_presentation(path: &Path) -> Result<Presentation, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.into(),
        source: e,
    })?;
    Presentation::parse(&text).map_err(|e| HarnessError::Presentation {
        context: path.display().to_string(),
        source: e,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    fs::write(path, text).map_err(|e| HarnessError::Io {
        path: path.into(),
        source: e,
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

/// Runs a command and returns whether verification passed.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Gen {
            family,
            params,
            output,
            presentation,
        } => {
            if family == "desk" {
                let dir = output.ok_or_else(|| HarnessError::Usage("gen desk needs -o <dir>".into()))?;
                for s in soundness_sentences() {
                    let p = write_sentence_in(&dir, &s)?;
                    println!("{}", p.display());
                }
                return Ok(true);
            }
            let fam: SentenceFamily = family.parse().map_err(HarnessError::Usage)?;
            let pres = presentation.as_deref().map(read_presentation).transpose()?;
            let s = generate(fam, &params, pres.as_ref())?;
            match output {
                Some(path) => {
                    write_sentence(&path, &s)?;
                    eprintln!("{} length {}", s.id(), s.length);
                }
                None => {
                    println!("{}", grouplog_core::print_formula(&s.formula));
                    eprintln!(
                        "{}",
                        serde_json::to_string(&Sidecar::of(&s)).expect("sidecar serializes")
                    );
                }
            }
            Ok(true)
        }
        Command::Eval {
            formula,
            group,
            mode,
            budget,
            bindings,
        } => {
            let text = fs::read_to_string(&formula).map_err(|e| HarnessError::Io {
                path: formula.clone(),
                source: e,
            })?;
            let f = parse_formula(text.trim()).map_err(|e| HarnessError::Formula {
                context: formula.display().to_string(),
                source: e,
            })?;
            let g = resolve_group(&group)?;
            let opts = budget.options(mode.into());
            let (holds, witness, stats) = if f.is_closed() && bindings.is_empty() {
                let out = eval_sentence(&g, &f, &opts)?;
                (out.holds, out.witness, out.stats)
            } else {
                let env: Env = bindings.into_iter().collect();
                let (h, s) = eval_with(&g, &f, &env, &opts)?;
                (h, None, s)
            };
            let v = json!({
                "holds": holds,
                "witness": witness,
                "stats": stats,
                "wall_ms": stats.wall_time.as_secs_f64() * 1e3,
            });
            println!("{}", pretty(&v));
            Ok(holds)
        }
        Command::Iso { a, b } => {
            let (ga, gb) = (resolve_group(&a)?, resolve_group(&b)?);
            let r = isomorphic(&ga, &gb)?;
            println!("{}", pretty(&serde_json::to_value(&r).expect("result serializes")));
            Ok(r.isomorphic)
        }
        Command::Corpus {
            action: CorpusAction::Build { max_order, output },
        } => {
            let corpus = corpus_build(max_order)?;
            let files = corpus.write_dir(&output)?;
            eprintln!("wrote {} groups to {}", files.len(), output.display());
            Ok(true)
        }
        Command::Verify {
            kind,
            sentences,
            corpus,
            max_order,
            output,
            threads,
            budget,
        } => {
            let sents = match &sentences {
                Some(dir) => read_sentence_dir(dir)?,
                None => soundness_sentences(),
            };
            let opts = VerifyOptions {
                eval: budget.options(Mode::Auto),
                threads,
            };
            let report = match kind {
                VerifyKind::Soundness => verify_soundness(&sents, &opts)?,
                VerifyKind::Uniqueness => {
                    let c = match &corpus {
                        Some(dir) => Corpus::from_dir(dir)?,
                        None => corpus_build(max_order)?,
                    };
                    let groups = c.load()?;
                    let max = groups.iter().map(|g| g.group.order() as u128).max().unwrap_or(0);
                    let sents: Vec<_> = if sentences.is_some() {
                        sents
                    } else {
                        sents.into_iter().filter(|s| s.target_order <= max).collect()
                    };
                    verify_uniqueness(&sents, &groups, &opts)?
                }
            };
            match &output {
                Some(path) => report.write(path)?,
                None => print!("{}", report.to_jsonl()),
            }
            eprintln!("{}", report.summary());
            Ok(report.passed())
        }
        Command::Lengths {
            family,
            range,
            samples,
            output,
        } => {
            let fam = family.0;
            let mut sweep = fam.default_sweep();
            if let Some(r) = range {
                sweep = Sweep {
                    range: parse_range(&r).map_err(HarnessError::Usage)?,
                    samples: None,
                };
            }
            if samples.is_some() {
                sweep.samples = samples;
            }
            let report = length_report(fam, &sweep)?;
            let csv = report.to_csv();
            match &output {
                Some(path) => write_text(path, &csv)?,
                None => print!("{csv}"),
            }
            let ok = report.within_golden() && (fam != LengthFamily::Theta || report.monotone());
            eprintln!(
                "{}: max ratio {:.4} against golden {}",
                fam.as_str(),
                report.max_ratio,
                report.golden.map_or_else(|| "none".to_string(), |g| format!("{g:.4}"))
            );
            Ok(ok)
        }
        Command::Golden => {
            let mut map = serde_json::Map::new();
            for fam in LengthFamily::ALL {
                let r = length_report(fam, &fam.default_sweep())?;
                map.insert(fam.as_str().to_string(), json!(r.max_ratio));
            }
            println!("{}", pretty(&serde_json::Value::Object(map)));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
