use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::Env;
use crate::spectra::{realized_sizes, Target};

/// A set of domain sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CardinalClassSpec {
    Set(BTreeSet<usize>),
    /// Inclusive bounds.
    Interval(usize, usize),
    Residue {
        modulus: usize,
        residue: usize,
    },
    All,
}

impl CardinalClassSpec {
    pub fn contains(&self, n: usize) -> bool {
        match self {
            CardinalClassSpec::Set(s) => s.contains(&n),
            CardinalClassSpec::Interval(a, b) => *a <= n && n <= *b,
            CardinalClassSpec::Residue { modulus, residue } => n % modulus == *residue,
            CardinalClassSpec::All => true,
        }
    }

    /// Whether every member lies in `1..=max_size`, so a window scan sees all
    /// of them.
    pub fn exhausted_by(&self, max_size: usize) -> bool {
        match self {
            CardinalClassSpec::Set(s) => s.iter().all(|&n| (1..=max_size).contains(&n)),
            _ => false,
        }
    }
}

impl fmt::Display for CardinalClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalClassSpec::Set(s) => {
                let parts: Vec<String> = s.iter().map(usize::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            CardinalClassSpec::Interval(a, b) => write!(f, "{a}..{b}"),
            CardinalClassSpec::Residue {
                modulus: 2,
                residue: 0,
            } => write!(f, "even"),
            CardinalClassSpec::Residue {
                modulus: 2,
                residue: 1,
            } => write!(f, "odd"),
            CardinalClassSpec::Residue { modulus, residue } => write!(f, "{residue} mod {modulus}"),
            CardinalClassSpec::All => write!(f, "all"),
        }
    }
}

/// Accepts `all`, `even`, `odd`, `R mod M`, `A..B`, and sets `{1,2,3}` or `1,2,3`.
impl FromStr for CardinalClassSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::InvalidOperation(format!("cannot read size class `{text}`"));
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        Ok(match t {
            "all" => CardinalClassSpec::All,
            "even" => CardinalClassSpec::Residue {
                modulus: 2,
                residue: 0,
            },
            "odd" => CardinalClassSpec::Residue {
                modulus: 2,
                residue: 1,
            },
            _ if t.contains("mod") => {
                let (r, m) = t.split_once("mod").ok_or_else(bad)?;
                let (residue, modulus) = (num(r)?, num(m)?);
                if modulus == 0 || residue >= modulus {
                    return Err(bad());
                }
                CardinalClassSpec::Residue { modulus, residue }
            }
            _ if t.contains("..") => {
                let (a, b) = t.split_once("..").ok_or_else(bad)?;
                CardinalClassSpec::Interval(num(a)?, num(b)?)
            }
            _ => {
                let inner = t
                    .strip_prefix('{')
                    .and_then(|r| r.strip_suffix('}'))
                    .unwrap_or(t);
                let set = inner
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(num)
                    .collect::<Result<BTreeSet<_>>>()?;
                CardinalClassSpec::Set(set)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum LsVerdict {
    Holds,
    Vacuous,
    FailsInRange,
    Inconclusive,
}

impl fmt::Display for LsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LsVerdict::Holds => "HOLDS",
            LsVerdict::Vacuous => "VACUOUS",
            LsVerdict::FailsInRange => "FAILS-IN-RANGE",
            LsVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LsReport {
    pub target: String,
    pub realized: Vec<usize>,
    pub verdict: LsVerdict,
}

/// For each target: does a model with size in `c` imply one with size in `d`,
/// as far as `1..=max_size` shows?
pub fn ls_check(
    targets: &[Target],
    c: &CardinalClassSpec,
    d: &CardinalClassSpec,
    max_size: usize,
    env: &Env,
    budget: u128,
) -> Result<Vec<LsReport>> {
    targets
        .iter()
        .map(|t| {
            let realized = realized_sizes(t, max_size, env, budget)?;
            let has_c = realized.iter().any(|&n| c.contains(n));
            let has_d = realized.iter().any(|&n| d.contains(n));
            let verdict = if !has_c {
                LsVerdict::Vacuous
            } else if has_d {
                LsVerdict::Holds
            } else if d.exhausted_by(max_size) {
                LsVerdict::FailsInRange
            } else {
                LsVerdict::Inconclusive
            };
            Ok(LsReport {
                target: t.label(),
                realized,
                verdict,
            })
        })
        .collect()
}
