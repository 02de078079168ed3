//! Length scaling of generated sentences.
//!
//! Each family has a scale: `log₂|H|` for the sentence families, the bit
//! count of `n` for θ_n, and `n·log₂ n` for the symmetric family with the
//! shipped presentation. A report records `length / scale` per instance and
//! its maximum, which is compared with the frozen constants in
//! `golden/lengths.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use grouplog_core::arith::bit_len;
use grouplog_core::gen::{sentence_abelian, sentence_cyclic2, sentence_symmetric, sentence_ut3, theta};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::HarnessError;

const GOLDEN: &str = include_str!("../golden/lengths.json");

/// Note carried in the header of every symmetric report.
pub const SYMMETRIC_NOTE: &str = "symmetric: the shipped two-generator presentation of S_n has length O(n log n), \
so ratios are taken against n*log2(n); an O(log n)-length presentation supplied with --presentation \
is needed for the logarithmic bound";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthFamily {
    Cyclic2,
    Abelian,
    Symmetric,
    Ut3,
    Theta,
}

impl LengthFamily {
    pub const ALL: [LengthFamily; 5] = [
        LengthFamily::Cyclic2,
        LengthFamily::Abelian,
        LengthFamily::Symmetric,
        LengthFamily::Ut3,
        LengthFamily::Theta,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LengthFamily::Cyclic2 => "cyclic2",
            LengthFamily::Abelian => "abelian",
            LengthFamily::Symmetric => "symmetric",
            LengthFamily::Ut3 => "ut3",
            LengthFamily::Theta => "theta",
        }
    }

    pub fn scale_name(self) -> &'static str {
        match self {
            LengthFamily::Symmetric => "n*log2(n)",
            LengthFamily::Theta => "bits(n)",
            _ => "log2|H|",
        }
    }

    /// The sweep used by the acceptance suite.
    pub fn default_sweep(self) -> Sweep {
        match self {
            LengthFamily::Cyclic2 => Sweep {
                range: 1..=64,
                samples: None,
            },
            LengthFamily::Abelian => Sweep {
                range: 0..=49,
                samples: None,
            },
            LengthFamily::Symmetric => Sweep {
                range: 3..=20,
                samples: None,
            },
            LengthFamily::Ut3 => Sweep {
                range: 2..=1_000_000,
                samples: Some(20),
            },
            LengthFamily::Theta => Sweep {
                range: 1..=4096,
                samples: None,
            },
        }
    }
}

impl FromStr for LengthFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        LengthFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown family {s:?}"))
    }
}

/// Parameters to measure. For `abelian` the range enumerates sample seeds,
/// each giving a random list of prime powers with product at most `2^20`;
/// for the other families it enumerates `n`. With `samples`, that many
/// values are drawn deterministically, always keeping both endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub range: RangeInclusive<u64>,
    pub samples: Option<usize>,
}

impl Sweep {
    pub fn values(&self) -> Vec<u64> {
        let (lo, hi) = (*self.range.start(), *self.range.end());
        match self.samples {
            Some(k) if (k as u64) < hi.saturating_sub(lo) + 1 => {
                let mut rng = ChaCha8Rng::seed_from_u64(lo ^ (hi << 20) ^ 0x1e9);
                let mut v = vec![lo, hi];
                while v.len() < k.max(2) {
                    let x = rng.gen_range(lo..=hi);
                    if !v.contains(&x) {
                        v.push(x);
                    }
                }
                v.sort_unstable();
                v.truncate(k.max(1));
                v
            }
            _ => self.range.clone().collect(),
        }
    }
}

/// Parses `a..b` or `a..=b` (both inclusive).
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| format!("bad range start {a:?}"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad range end {b:?}"))?;
    if a > b {
        return Err(format!("empty range {s:?}"));
    }
    Ok(a..=b)
}

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Random prime-power list with product at most `2^20`, determined by `seed`.
pub fn abelian_sample(seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0xab);
    let limit = 1u64 << 20;
    let mut product = 1u64;
    let mut qs = Vec::new();
    let parts = rng.gen_range(1..=8);
    for _ in 0..parts {
        let p = *SMALL_PRIMES.choose(&mut rng).expect("nonempty");
        let mut q = p;
        let mut e = rng.gen_range(1..=6);
        while e > 1 && product * q * p <= limit {
            q *= p;
            e -= 1;
        }
        if product * q > limit {
            continue;
        }
        product *= q;
        qs.push(q);
    }
    if qs.is_empty() {
        qs.push(2);
    }
    qs
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthRow {
    pub params: String,
    pub log2_order: f64,
    pub scale: f64,
    pub length: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthReport {
    pub family: LengthFamily,
    pub rows: Vec<LengthRow>,
    pub max_ratio: f64,
    pub golden: Option<f64>,
    pub note: Option<String>,
}

fn row(params: String, log2_order: f64, scale: f64, length: usize) -> LengthRow {
    LengthRow {
        params,
        log2_order,
        scale,
        length,
        ratio: length as f64 / scale,
    }
}

fn measure(family: LengthFamily, v: u64) -> Result<LengthRow, HarnessError> {
    Ok(match family {
        LengthFamily::Cyclic2 => {
            let n = u32::try_from(v).map_err(|_| HarnessError::Usage(format!("n = {v} too large")))?;
            let s = sentence_cyclic2(n)?;
            row(v.to_string(), f64::from(n), f64::from(n), s.length)
        }
        LengthFamily::Abelian => {
            let qs = abelian_sample(v);
            let s = sentence_abelian(&qs)?;
            let lg: f64 = qs.iter().map(|&q| (q as f64).log2()).sum();
            let params: Vec<String> = qs.iter().map(u64::to_string).collect();
            row(params.join("."), lg, lg, s.length)
        }
        LengthFamily::Symmetric => {
            let s = sentence_symmetric(v as usize, None)?;
            let lg: f64 = (2..=v).map(|k| (k as f64).log2()).sum();
            row(v.to_string(), lg, v as f64 * (v as f64).log2(), s.length)
        }
        LengthFamily::Ut3 => {
            let s = sentence_ut3(v)?;
            let lg = 3.0 * (v as f64).log2();
            row(v.to_string(), lg, lg, s.length)
        }
        LengthFamily::Theta => {
            let f = theta(v)?;
            row(v.to_string(), 0.0, f64::from(bit_len(v)), f.length())
        }
    })
}

/// Measures every parameter of the sweep.
pub fn length_report(family: LengthFamily, sweep: &Sweep) -> Result<LengthReport, HarnessError> {
    let rows = sweep
        .values()
        .into_iter()
        .map(|v| measure(family, v))
        .collect::<Result<Vec<_>, _>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let note = (family == LengthFamily::Symmetric).then(|| SYMMETRIC_NOTE.to_string());
    Ok(LengthReport {
        family,
        rows,
        max_ratio,
        golden: golden().get(family.as_str()).copied(),
        note,
    })
}

/// Frozen constants by family name.
pub fn golden() -> BTreeMap<String, f64> {
    serde_json::from_str(GOLDEN).expect("golden/lengths.json is valid")
}

impl LengthReport {
    /// True when the maximum ratio stays within the frozen constant.
    pub fn within_golden(&self) -> bool {
        self.golden.is_some_and(|g| self.max_ratio <= g)
    }

    /// True when length never decreases as the parameter grows.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].length <= w[1].length)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.note {
            let _ = writeln!(out, "# {n}");
        }
        let _ = writeln!(
            out,
            "# family={} scale={}",
            self.family.as_str(),
            self.family.scale_name()
        );
        out.push_str("params,log2_order,scale,length,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{},{:.6}",
                r.params, r.log2_order, r.scale, r.length, r.ratio
            );
        }
        let golden = self.golden.map_or_else(|| "none".to_string(), |g| format!("{g}"));
        let _ = writeln!(out, "# max_ratio={} golden={golden}", self.max_ratio);
        out
    }
}
