//! Curated group corpora.
//!
//! A corpus directory holds one Cayley-table file per group with the
//! extension `.cayley`. The group's name is stored in a trailing
//! `# name <name>` comment; files without one are named after their stem.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use grouplog_core::{build_group_capped, load_cayley, Family, FiniteGroup};
use rayon::prelude::*;

use crate::error::HarnessError;

/// Largest order accepted by [`corpus_build`].
pub const CORPUS_ORDER_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSource {
    Builtin(Family),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub source: GroupSource,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
}

/// A loaded corpus member.
#[derive(Debug, Clone)]
pub struct NamedGroup {
    pub name: String,
    pub group: FiniteGroup,
}

fn product(a: Family, b: Family) -> Family {
    Family::Product(Box::new(a), Box::new(b))
}

fn candidates(max_order: usize) -> Vec<Family> {
    use Family::*;
    let mut out: Vec<Family> = (1..=max_order).map(Cyclic).collect();
    let abelian: [&[u64]; 26] = [
        &[2, 2],
        &[2, 4],
        &[2, 2, 2],
        &[3, 3],
        &[2, 2, 3],
        &[2, 8],
        &[4, 4],
        &[2, 2, 4],
        &[2, 2, 2, 2],
        &[2, 4, 3],
        &[2, 2, 2, 3],
        &[3, 9],
        &[3, 3, 3],
        &[5, 5],
        &[2, 16],
        &[4, 8],
        &[2, 2, 8],
        &[2, 4, 4],
        &[2, 2, 2, 4],
        &[2, 2, 2, 2, 2],
        &[2, 2, 9],
        &[2, 32],
        &[8, 8],
        &[4, 4, 4],
        &[2, 2, 2, 2, 2, 2],
        &[3, 3, 3, 3],
    ];
    out.extend(abelian.iter().map(|qs| Abelian(qs.to_vec())));
    out.extend((3..=max_order / 2).map(Dihedral));
    out.extend([
        Quaternion8,
        Symmetric(3),
        Symmetric(4),
        Alternating(4),
        Alternating(5),
        Symmetric(5),
    ]);
    out.extend([Alternating(6), Symmetric(6)]);
    out.extend([2, 3, 4, 5, 6, 7, 8, 10].map(Ut3));
    out.extend([
        product(Cyclic(2), Cyclic(4)),
        product(Cyclic(2), Cyclic(12)),
        product(Cyclic(3), Cyclic(9)),
        product(Cyclic(2), Symmetric(3)),
        product(Cyclic(3), Symmetric(3)),
        product(Cyclic(4), Symmetric(3)),
        product(Cyclic(2), Dihedral(4)),
        product(Cyclic(2), Quaternion8),
        product(Cyclic(3), Quaternion8),
        product(Cyclic(4), Quaternion8),
        product(Cyclic(2), Alternating(4)),
        product(Cyclic(3), Alternating(4)),
        product(Symmetric(3), Symmetric(3)),
        product(Cyclic(2), Symmetric(4)),
        product(Cyclic(2), Ut3(3)),
        product(Cyclic(2), Alternating(5)),
        product(Cyclic(2), Symmetric(5)),
    ]);
    out
}

/// Deterministic corpus of every built-in group of order at most `max_order`,
/// sorted by order and then by name.
pub fn corpus_build(max_order: usize) -> Result<Corpus, HarnessError> {
    if max_order > CORPUS_ORDER_CAP {
        return Err(HarnessError::CorpusCap(max_order));
    }
    let mut seen = BTreeSet::new();
    let mut keyed: Vec<(usize, String, Family)> = Vec::new();
    for fam in candidates(max_order) {
        let Some(order) = fam.order().filter(|&o| o <= max_order) else {
            continue;
        };
        let name = fam.name();
        if seen.insert(name.clone()) {
            keyed.push((order, name, fam));
        }
    }
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let entries = keyed
        .into_iter()
        .map(|(_, name, fam)| CorpusEntry {
            name,
            source: GroupSource::Builtin(fam),
        })
        .collect();
    Ok(Corpus { entries })
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            '(' | ')' => '_',
            '+' => 'p',
            c => c,
        })
        .collect()
}

/// Trailing `# name` comment of a corpus file.
fn embedded_name(text: &str) -> Option<String> {
    text.lines()
        .find_map(|l| l.strip_prefix("# name ").map(|n| n.trim().to_string()))
}

impl Corpus {
    pub fn new(entries: Vec<CorpusEntry>) -> Result<Self, HarnessError> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.name.as_str()) {
                return Err(HarnessError::Usage(format!("duplicate corpus name {}", e.name)));
            }
        }
        Ok(Corpus { entries })
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Builds or reads every entry and checks the group axioms.
    pub fn load(&self) -> Result<Vec<NamedGroup>, HarnessError> {
        self.entries
            .par_iter()
            .map(|e| {
                let group = match &e.source {
                    GroupSource::Builtin(f) => {
                        build_group_capped(f, CORPUS_ORDER_CAP).map_err(|err| HarnessError::group(&e.name, err))?
                    }
                    GroupSource::File(p) => load_group_file(p)?,
                };
                group.check_axioms().map_err(|err| HarnessError::group(&e.name, err))?;
                Ok(NamedGroup {
                    name: e.name.clone(),
                    group,
                })
            })
            .collect()
    }

    /// Reads every `*.cayley` file in `dir`, in file-name order.
    pub fn from_dir(dir: &Path) -> Result<Self, HarnessError> {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| HarnessError::io(dir, e))?
            .filter_map(|r| r.ok().map(|d| d.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "cayley"))
            .collect();
        paths.sort();
        let mut entries = Vec::with_capacity(paths.len());
        for p in paths {
            let text = fs::read_to_string(&p).map_err(|e| HarnessError::io(&p, e))?;
            let name = embedded_name(&text)
                .unwrap_or_else(|| p.file_stem().unwrap_or_default().to_string_lossy().into_owned());
            entries.push(CorpusEntry {
                name,
                source: GroupSource::File(p),
            });
        }
        Corpus::new(entries)
    }

    /// Writes the corpus as `NNNN-<name>.cayley` files and returns their paths.
    pub fn write_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let groups = self.load()?;
        let mut written = Vec::with_capacity(groups.len());
        for (i, ng) in groups.iter().enumerate() {
            let path = dir.join(format!("{i:04}-{}.cayley", sanitize(&ng.name)));
            let mut text = ng.group.to_cayley_string();
            text.push_str(&format!("# name {}\n", ng.name));
            fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Reads a Cayley-table file.
pub fn load_group_file(path: &Path) -> Result<FiniteGroup, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let g = load_cayley(&text).map_err(|e| HarnessError::group(path.display().to_string(), e))?;
    Ok(match embedded_name(&text) {
        Some(name) => g.with_family_tag(name),
        None => g,
    })
}

/// Reads a group from a file, or builds it when `spec` is a built-in name
/// such as `UT3(3)` or `Z2xS3` and no such file exists.
pub fn resolve_group(spec: &str) -> Result<FiniteGroup, HarnessError> {
    let path = Path::new(spec);
    if path.exists() {
        return load_group_file(path);
    }
    match spec.parse::<Family>() {
        Ok(f) => build_group_capped(&f, CORPUS_ORDER_CAP).map_err(|e| HarnessError::group(spec, e)),
        Err(_) => Err(HarnessError::io(
            path,
            std::io::Error::from(std::io::ErrorKind::NotFound),
        )),
    }
}
