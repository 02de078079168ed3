//! Corpus management, the soundness, uniqueness and length experiments, and
//! the pieces of the `grouplog` command line.

pub mod checks;
pub mod corpus;
pub mod error;
pub mod lengths;
pub mod report;
pub mod sentences;
pub mod verify;

pub use corpus::{corpus_build, resolve_group, Corpus, CorpusEntry, GroupSource, NamedGroup};
pub use error::HarnessError;
pub use lengths::{length_report, LengthFamily, LengthReport, Sweep};
pub use report::{Report, ReportKind, Row, Status, SCHEMA_VERSION};
pub use verify::{budget_from_env, verify_soundness, verify_uniqueness, VerifyOptions};
