//! The desk-scale sentence set and the on-disk sentence format.
//!
//! A sentence is stored as `<id>.fo` holding the formula in canonical text
//! and `<id>.json` holding a [`Sidecar`].

use std::fs;
use std::path::{Path, PathBuf};

use grouplog_core::gen::{
    sentence_a5, sentence_abelian, sentence_cyclic2, sentence_simple, sentence_symmetric, sentence_ut3, FamilySentence,
    SentenceFamily,
};
use grouplog_core::{parse_formula, print_formula, Family, Presentation};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub id: String,
    pub family: String,
    pub params: Vec<u64>,
    pub target_order: u128,
    pub length: usize,
    /// Built-in name of the target group, e.g. `UT3(3)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation: Option<String>,
}

impl Sidecar {
    pub fn of(s: &FamilySentence) -> Self {
        Sidecar {
            id: s.id(),
            family: s.family.to_string(),
            params: s.params.clone(),
            target_order: s.target_order,
            length: s.length,
            target: s.target.as_ref().map(Family::name),
            presentation: s.notes.clone(),
        }
    }
}

/// Abelian targets of the soundness suite.
pub const DESK_ABELIAN: [&[u64]; 9] = [
    &[4],
    &[2, 2],
    &[8],
    &[2, 4],
    &[2, 2, 2],
    &[9],
    &[3, 3],
    &[2, 3],
    &[2, 4, 3],
];

/// Every sentence of the soundness suite, in a fixed order.
pub fn soundness_sentences() -> Vec<FamilySentence> {
    let mut out = Vec::new();
    for n in 1..=4 {
        out.push(sentence_cyclic2(n).expect("valid parameter"));
    }
    for qs in DESK_ABELIAN {
        out.push(sentence_abelian(qs).expect("prime powers"));
    }
    for n in 3..=5 {
        out.push(sentence_symmetric(n, None).expect("valid degree"));
    }
    out.push(sentence_a5());
    for n in 2..=3 {
        out.push(sentence_ut3(n).expect("valid parameter"));
    }
    out
}

/// Soundness sentences whose target has order at most `max_order`.
pub fn uniqueness_sentences(max_order: u128) -> Vec<FamilySentence> {
    soundness_sentences()
        .into_iter()
        .filter(|s| s.target_order <= max_order)
        .collect()
}

/// Generates one sentence from command-line style parameters.
pub fn generate(
    family: SentenceFamily,
    params: &[u64],
    presentation: Option<&Presentation>,
) -> Result<FamilySentence, HarnessError> {
    let one = |what: &str| -> Result<u64, HarnessError> {
        match params {
            [p] => Ok(*p),
            _ => Err(HarnessError::Usage(format!(
                "{family} takes exactly one parameter ({what})"
            ))),
        }
    };
    Ok(match family {
        SentenceFamily::Cyclic2 => {
            let n = u32::try_from(one("n")?).map_err(|_| HarnessError::Usage("n too large".into()))?;
            sentence_cyclic2(n)?
        }
        SentenceFamily::Abelian => {
            if params.is_empty() {
                return Err(HarnessError::Usage("abelian needs at least one prime power".into()));
            }
            sentence_abelian(params)?
        }
        SentenceFamily::Symmetric => sentence_symmetric(one("n")? as usize, presentation)?,
        SentenceFamily::Simple => {
            let order = one("group order")?;
            match presentation {
                Some(p) => sentence_simple(p, order)?,
                None if order == 60 => sentence_a5(),
                None => {
                    return Err(HarnessError::Usage(
                        "simple needs --presentation unless the order is 60".into(),
                    ))
                }
            }
        }
        SentenceFamily::Ut3 => sentence_ut3(one("n")?)?,
    })
}

/// Writes `<dir>/<id>.fo` and `<dir>/<id>.json`, returning the formula path.
pub fn write_sentence_in(dir: &Path, s: &FamilySentence) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join(format!("{}.fo", s.id()));
    write_sentence(&path, s)?;
    Ok(path)
}

/// Writes the formula to `path` and its sidecar next to it.
pub fn write_sentence(path: &Path, s: &FamilySentence) -> Result<(), HarnessError> {
    let mut text = print_formula(&s.formula);
    text.push('\n');
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))?;
    let side = path.with_extension("json");
    let json = serde_json::to_string_pretty(&Sidecar::of(s)).map_err(|e| HarnessError::Json {
        path: side.clone(),
        source: e,
    })?;
    fs::write(&side, json + "\n").map_err(|e| HarnessError::io(&side, e))
}

/// Reads a formula file and its sidecar.
pub fn read_sentence(path: &Path) -> Result<FamilySentence, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let formula = parse_formula(text.trim()).map_err(|e| HarnessError::Formula {
        context: path.display().to_string(),
        source: e,
    })?;
    let side_path = path.with_extension("json");
    let side_text = fs::read_to_string(&side_path).map_err(|e| HarnessError::io(&side_path, e))?;
    let side: Sidecar = serde_json::from_str(&side_text).map_err(|e| HarnessError::Json {
        path: side_path.clone(),
        source: e,
    })?;
    let family: SentenceFamily = side.family.parse().map_err(HarnessError::Usage)?;
    let target = match &side.target {
        Some(name) => Some(
            name.parse::<Family>()
                .map_err(|e| HarnessError::group(name.clone(), e))?,
        ),
        None => None,
    };
    let length = formula.length();
    Ok(FamilySentence {
        formula,
        family,
        params: side.params,
        target_order: side.target_order,
        target,
        notes: side.presentation,
        length,
    })
}

/// Reads every `*.fo` file in `dir`, in file-name order.
pub fn read_sentence_dir(dir: &Path) -> Result<Vec<FamilySentence>, HarnessError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|r| r.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "fo"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_sentence(p)).collect()
}
