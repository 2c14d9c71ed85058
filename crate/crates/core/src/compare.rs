//! Differential testing: runs several membership engines over the same
//! strings and reports every string on which they disagree.

use std::collections::BTreeSet;
use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::grammar::Grammar;
use crate::oracle::{enumerate_yields_with_cap, Baseline, OracleError, DEFAULT_FRONTIER_CAP};
use crate::recognizer::{Discipline, Recognizer};
use crate::transform::prepare;

/// Longest strings `compare` will check.
pub const MAX_COMPARE_LEN: usize = 12;
/// Above this many strings, only a sample of the longer lengths is checked.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("max length {0} exceeds {MAX_COMPARE_LEN}")]
    MaxLen(usize),
    #[error("{count} strings exceed the exhaustive cap of {cap}; pass a sample size")]
    TooMany { count: u64, cap: u64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub max_len: usize,
    /// Random strings to draw from the lengths that do not fit under the cap.
    pub sample: Option<usize>,
    pub seed: u64,
    pub exhaustive_cap: u64,
    pub frontier_cap: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            max_len: 8,
            sample: None,
            seed: 0,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            frontier_cap: DEFAULT_FRONTIER_CAP,
        }
    }
}

pub type Accepts<'a> = Box<dyn Fn(&[String]) -> bool + 'a>;

/// A membership test under a display name.
pub struct Engine<'a> {
    pub name: &'a str,
    pub accepts: Accepts<'a>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub tokens: Vec<String>,
    pub verdicts: Vec<(String, bool)>,
}

impl fmt::Display for Disagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", show(&self.tokens))?;
        for (name, v) in &self.verdicts {
            write!(f, " {name}={}", if *v { "accept" } else { "reject" })?;
        }
        Ok(())
    }
}

/// Tokens run together when all are single characters, space-separated
/// otherwise.
pub fn show(tokens: &[String]) -> String {
    if tokens.iter().all(|t| t.chars().count() == 1) {
        tokens.concat()
    } else {
        tokens.join(" ")
    }
}

#[derive(Clone, Debug, Default)]
pub struct CompareReport {
    pub checked: u64,
    /// Longest length checked exhaustively.
    pub exhaustive_up_to: usize,
    pub sampled: u64,
    pub engines: Vec<String>,
    /// Strings at least one engine accepted.
    pub accepted: u64,
    pub disagreements: Vec<Disagreement>,
}

impl CompareReport {
    pub fn agree(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Runs every engine on every string.
pub fn differential<I>(strings: I, engines: &[Engine<'_>]) -> CompareReport
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut report = CompareReport {
        engines: engines.iter().map(|e| e.name.to_string()).collect(),
        ..Default::default()
    };
    for s in strings {
        report.checked += 1;
        let verdicts: Vec<bool> = engines.iter().map(|e| (e.accepts)(&s)).collect();
        if verdicts.iter().any(|&v| v) {
            report.accepted += 1;
        }
        if verdicts.iter().any(|&v| v != verdicts[0]) {
            report.disagreements.push(Disagreement {
                tokens: s,
                verdicts: engines.iter().map(|e| e.name.to_string()).zip(verdicts).collect(),
            });
        }
    }
    report
}

/// Every string of exactly `len` tokens over `sigma`, in lexicographic order.
pub fn all_strings(sigma: &[String], len: usize) -> impl Iterator<Item = Vec<String>> + '_ {
    let k = sigma.len();
    let total = (k as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
    (0..if k == 0 && len > 0 { 0 } else { total }).map(move |mut code| {
        let mut s = vec![String::new(); len];
        for slot in s.iter_mut().rev() {
            *slot = sigma[(code % k as u64) as usize].clone();
            code /= k as u64;
        }
        s
    })
}

/// Three-way comparison of the restricted recognizer (when the grammar
/// satisfies the restriction), the baseline and the enumerator over strings
/// of length 1 to `max_len`.
pub fn compare_grammar(grammar: &Grammar, opts: &CompareOptions) -> Result<CompareReport, CompareError> {
    if opts.max_len > MAX_COMPARE_LEN {
        return Err(CompareError::MaxLen(opts.max_len));
    }
    let sigma: Vec<String> = grammar.terminals.iter().cloned().collect();
    let k = sigma.len() as u64;
    let mut exhaustive_up_to = 0;
    let mut total = 0u64;
    for len in 1..=opts.max_len {
        let c = k.saturating_pow(len as u32);
        if total.saturating_add(c) > opts.exhaustive_cap {
            break;
        }
        total += c;
        exhaustive_up_to = len;
    }
    if exhaustive_up_to < opts.max_len && opts.sample.is_none() {
        let count = (1..=opts.max_len)
            .map(|l| k.saturating_pow(l as u32))
            .fold(0u64, u64::saturating_add);
        return Err(CompareError::TooMany {
            count,
            cap: opts.exhaustive_cap,
        });
    }

    let language = enumerate_yields_with_cap(grammar, opts.max_len, opts.frontier_cap)?;
    let baseline = Baseline::new(grammar)?;
    let tg = prepare(grammar).ok();
    let restricted = tg.as_ref().map(Recognizer::new);

    let mut engines = Vec::new();
    if let Some(r) = &restricted {
        engines.push(Engine {
            name: "restricted",
            accepts: Box::new(move |s: &[String]| {
                r.run(s, Discipline::Fifo).expect("tokens from the alphabet").accepted
            }),
        });
    }
    engines.push(Engine {
        name: "baseline",
        accepts: Box::new(|s: &[String]| baseline.recognize(s).expect("tokens from the alphabet").0),
    });
    engines.push(Engine {
        name: "enumerated",
        accepts: Box::new(|s: &[String]| language.contains(s)),
    });

    let exhaustive = (1..=exhaustive_up_to).flat_map(|l| all_strings(&sigma, l));
    let mut extra: BTreeSet<Vec<String>> = BTreeSet::new();
    if exhaustive_up_to < opts.max_len {
        let mut rng = StdRng::seed_from_u64(opts.seed);
        let n = opts.sample.unwrap_or(0);
        let mut draws = 0usize;
        // lengths beyond the exhaustive range hold almost all strings, so
        // duplicates are rare and the loop ends quickly
        while extra.len() < n && draws < n.saturating_mul(20) && !sigma.is_empty() {
            draws += 1;
            let len = rng.gen_range(exhaustive_up_to + 1..=opts.max_len);
            extra.insert((0..len).map(|_| sigma[rng.gen_range(0..sigma.len())].clone()).collect());
        }
        // members of the language are rare among random strings
        extra.extend(language.iter().filter(|w| w.len() > exhaustive_up_to).cloned());
    }
    let sampled = extra.len() as u64;
    let mut report = differential(exhaustive.chain(extra), &engines);
    report.exhaustive_up_to = exhaustive_up_to;
    report.sampled = sampled;
    Ok(report)
}
