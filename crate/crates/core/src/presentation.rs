//! Finite presentations `⟨g0, …, g(n-1) | relators⟩`.

use std::fmt;

use thiserror::Error;

use crate::group::FiniteGroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("generator g{index} out of range (ngens = {ngens})")]
    GeneratorOutOfRange { index: usize, ngens: usize },
    #[error("empty relator")]
    EmptyRelator,
    #[error("a presentation needs at least one generator")]
    NoGenerators,
}

/// A word in the generators, kept in normalized form: nonzero exponents and
/// no two adjacent syllables on the same generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    syllables: Vec<(usize, i64)>,
}

impl Word {
    pub fn new<I: IntoIterator<Item = (usize, i64)>>(syllables: I) -> Self {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in syllables {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((lg, le)) if *lg == g => {
                    *le += e;
                    if *le == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        Word { syllables: out }
    }

    /// `w^k` for `k >= 1`, written out syllable by syllable.
    pub fn pow(&self, k: usize) -> Word {
        Word::new(std::iter::repeat(self.syllables.iter().copied()).take(k).flatten())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.syllables.iter().chain(other.syllables.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word::new(self.syllables.iter().rev().map(|&(g, e)| (g, -e)))
    }

    pub fn syllables(&self) -> &[(usize, i64)] {
        &self.syllables
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Character-count length with exponents in binary: `k + Σ floor(log2 |z_i|)`.
    pub fn binary_length(&self) -> u64 {
        self.syllables
            .iter()
            .map(|&(_, e)| 1 + u64::from(crate::arith::bit_len(e.unsigned_abs()) - 1))
            .sum()
    }

    /// Evaluates the word with generator `i` mapped to `images[i]`.
    pub fn evaluate(&self, group: &FiniteGroup, images: &[usize]) -> usize {
        self.syllables.iter().fold(group.identity(), |acc, &(g, e)| {
            group.mul(acc, group.power(images[g], e))
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, e)) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "g{g}^{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    ngens: usize,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(ngens: usize, relators: Vec<Word>) -> Result<Self, PresentationError> {
        if ngens == 0 {
            return Err(PresentationError::NoGenerators);
        }
        for w in &relators {
            if w.is_empty() {
                return Err(PresentationError::EmptyRelator);
            }
            if let Some(&(index, _)) = w.syllables().iter().find(|(g, _)| *g >= ngens) {
                return Err(PresentationError::GeneratorOutOfRange { index, ngens });
            }
        }
        Ok(Presentation { ngens, relators })
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Sum of the relators' binary lengths.
    pub fn binary_length(&self) -> u64 {
        self.relators.iter().map(Word::binary_length).sum()
    }

    /// True if every relator evaluates to the identity under `images`.
    pub fn holds_at(&self, group: &FiniteGroup, images: &[usize]) -> bool {
        self.relators
            .iter()
            .all(|w| w.evaluate(group, images) == group.identity())
    }

    /// `⟨a, b | a², b³, (ab)⁵⟩`, a presentation of A5.
    pub fn alternating5() -> Self {
        let ab = Word::new([(0, 1), (1, 1)]);
        Presentation::new(2, vec![Word::new([(0, 2)]), Word::new([(1, 3)]), ab.pow(5)]).expect("static presentation")
    }

    /// Two-generator presentation of `S_n` (`n >= 3`) with `g0` the n-cycle
    /// and `g1` a transposition:
    /// `g0^n, g1^2, (g1 g0)^(n-1), (g1 g0^-1 g1 g0)^3, (g1 g0^-j g1 g0^j)^2 for 2 <= j <= n/2`.
    pub fn symmetric(n: usize) -> Self {
        assert!(n >= 3, "symmetric presentation needs n >= 3");
        let ni = n as i64;
        let mut rels = vec![
            Word::new([(0, ni)]),
            Word::new([(1, 2)]),
            Word::new([(1, 1), (0, 1)]).pow(n - 1),
            Word::new([(1, 1), (0, -1), (1, 1), (0, 1)]).pow(3),
        ];
        for j in 2..=n / 2 {
            let j = j as i64;
            rels.push(Word::new([(1, 1), (0, -j), (1, 1), (0, j)]).pow(2));
        }
        Presentation::new(2, rels).expect("static presentation")
    }

    /// Parses the presentation file format: first line `ngens`, then one
    /// relator per line as tokens `g<k>^<e>` (a bare `g<k>` means exponent 1).
    pub fn parse(text: &str) -> Result<Self, PresentationError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (ln, first) = lines.next().ok_or(PresentationError::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let ngens: usize = first.trim().parse().map_err(|_| PresentationError::Parse {
            line: ln + 1,
            message: format!("expected generator count, found {:?}", first.trim()),
        })?;
        let mut relators = Vec::new();
        for (ln, line) in lines {
            let mut syl = Vec::new();
            for tok in line.split_whitespace() {
                syl.push(parse_syllable(tok).ok_or_else(|| PresentationError::Parse {
                    line: ln + 1,
                    message: format!("bad syllable {tok:?}"),
                })?);
            }
            let w = Word::new(syl);
            if w.is_empty() {
                return Err(PresentationError::EmptyRelator);
            }
            relators.push(w);
        }
        Presentation::new(ngens, relators)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.ngens);
        for w in &self.relators {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }
}

fn parse_syllable(tok: &str) -> Option<(usize, i64)> {
    let rest = tok.strip_prefix('g')?;
    let (g, e) = match rest.split_once('^') {
        Some((g, e)) => (g, e.parse::<i64>().ok()?),
        None => (rest, 1),
    };
    if g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((g.parse().ok()?, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, Family};

    #[test]
    fn words_normalize() {
        let w = Word::new([(0, 1), (0, 2), (1, 0), (1, -1), (1, 1), (2, 4)]);
        assert_eq!(w.syllables(), &[(0, 3), (2, 4)]);
        assert!(Word::new([(0, 2), (0, -2)]).is_empty());
        assert_eq!(Word::new([(0, 1), (1, 1)]).pow(2).syllables().len(), 4);
    }

    #[test]
    fn parse_and_print() {
        let p = Presentation::parse("2\ng0^2 g1^-3\ng0 g1 g0 g1\n").unwrap();
        assert_eq!(p.ngens(), 2);
        assert_eq!(p.relators()[0].syllables(), &[(0, 2), (1, -3)]);
        assert_eq!(p.relators()[1].syllables().len(), 4);
        assert_eq!(Presentation::parse(&p.to_text()).unwrap(), p);
        assert!(matches!(
            Presentation::parse("1\ng1^2\n"),
            Err(PresentationError::GeneratorOutOfRange { index: 1, ngens: 1 })
        ));
        assert_eq!(
            Presentation::parse("1\ng0^1 g0^-1\n"),
            Err(PresentationError::EmptyRelator)
        );
        assert!(matches!(
            Presentation::parse("1\nx0^2\n"),
            Err(PresentationError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn shipped_presentations_hold_in_their_groups() {
        let a5 = build_group(&Family::Alternating(5)).unwrap();
        let p = Presentation::alternating5();
        let found = (0..60)
            .any(|a| (0..60).any(|b| a != 0 && p.holds_at(&a5, &[a, b]) && a5.subgroup_closure(&[a, b]).0.len() == 60));
        assert!(found);
        for n in 3..=5 {
            let s = build_group(&Family::Symmetric(n)).unwrap();
            let p = Presentation::symmetric(n);
            let cyc: Vec<u8> = (0..n as u8).map(|i| (i + 1) % n as u8).collect();
            let eta = s.element_by_label(&crate::group::cycle_notation(&cyc)).unwrap();
            let ok =
                (0..s.order()).any(|t| p.holds_at(&s, &[eta, t]) && s.subgroup_closure(&[eta, t]).0.len() == s.order());
            assert!(ok, "S{n}");
        }
    }
}
