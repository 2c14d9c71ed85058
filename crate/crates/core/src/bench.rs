//! Scaling measurements: rule applications of both engines against input
//! length, and of the restricted engine against grammar size.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::fixtures;
use crate::grammar::{parse_grammar, Grammar};
use crate::oracle::{Baseline, OracleError};
use crate::recognizer::{Discipline, RecognizeError, Recognizer};
use crate::transform::{prepare, TransformError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Engine {
    Restricted,
    Baseline,
}

impl Engine {
    pub const ALL: [Engine; 2] = [Engine::Restricted, Engine::Baseline];
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Restricted => "restricted",
            Engine::Baseline => "baseline",
        })
    }
}

impl FromStr for Engine {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "restricted" => Ok(Engine::Restricted),
            "baseline" => Ok(Engine::Baseline),
            _ => Err(BenchError::Csv(format!("unknown engine `{s}`"))),
        }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("builder `{builder}` cannot make a string of length {n}: {reason}")]
    Length { builder: String, n: usize, reason: String },
    #[error("bad builder spec `{0}` (expected blocks:a,b,.. or stack:left,center,right)")]
    BuilderSpec(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error("{engine} rejected the length-{n} string; the builder does not match the grammar")]
    Rejected { engine: Engine, n: usize },
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Csv(e.to_string())
    }
}

/// Scheme producing one in-language string per requested length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StringBuilder {
    /// `s1^m s2^m ... sk^m` with `n = k·m`.
    Blocks(Vec<String>),
    /// `left^⌈(n−1)/2⌉ center right^⌊(n−1)/2⌋`.
    Stacking {
        left: String,
        center: String,
        right: String,
    },
}

impl StringBuilder {
    pub fn build(&self, n: usize) -> Result<Vec<String>, BenchError> {
        let fail = |reason: &str| BenchError::Length {
            builder: self.to_string(),
            n,
            reason: reason.to_string(),
        };
        match self {
            StringBuilder::Blocks(syms) => {
                let k = syms.len();
                if n == 0 || !n.is_multiple_of(k) {
                    return Err(fail(&format!("length must be a positive multiple of {k}")));
                }
                Ok(syms
                    .iter()
                    .flat_map(|s| std::iter::repeat_n(s.clone(), n / k))
                    .collect())
            }
            StringBuilder::Stacking { left, center, right } => {
                if n == 0 {
                    return Err(fail("length must be positive"));
                }
                let r = (n - 1) / 2;
                let mut out = vec![left.clone(); n - 1 - r];
                out.push(center.clone());
                out.extend(std::iter::repeat_n(right.clone(), r));
                Ok(out)
            }
        }
    }
}

impl fmt::Display for StringBuilder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringBuilder::Blocks(s) => write!(f, "blocks:{}", s.join(",")),
            StringBuilder::Stacking { left, center, right } => write!(f, "stack:{left},{center},{right}"),
        }
    }
}

impl FromStr for StringBuilder {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::BuilderSpec(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let syms: Vec<String> = rest.split(',').map(str::to_string).collect();
        if syms.iter().any(String::is_empty) {
            return Err(bad());
        }
        match (kind, syms.as_slice()) {
            ("blocks", _) => Ok(StringBuilder::Blocks(syms)),
            ("stack", [l, c, r]) => Ok(StringBuilder::Stacking {
                left: l.clone(),
                center: c.clone(),
                right: r.clone(),
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub engine: Engine,
    pub n: usize,
    pub rule_applications: u64,
    pub items: u64,
    pub wall_time_us: u64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ScalingReport {
    /// Sorted by engine, then length.
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log2(rule_applications)` against `log2(n)`;
    /// `None` with fewer than three lengths.
    pub slopes: BTreeMap<Engine, Option<f64>>,
}

impl ScalingReport {
    fn from_rows(mut rows: Vec<ScalingRow>) -> Self {
        rows.sort_by_key(|r| (r.engine, r.n));
        let slopes = Engine::ALL
            .iter()
            .filter(|e| rows.iter().any(|r| r.engine == **e))
            .map(|&e| {
                let pts: Vec<(usize, u64)> = rows
                    .iter()
                    .filter(|r| r.engine == e)
                    .map(|r| (r.n, r.rule_applications))
                    .collect();
                (e, fit_slope(&pts))
            })
            .collect();
        ScalingReport { rows, slopes }
    }

    pub fn slope(&self, engine: Engine) -> Option<f64> {
        self.slopes.get(&engine).copied().flatten()
    }

    pub fn rule_applications(&self, engine: Engine, n: usize) -> Option<u64> {
        self.rows
            .iter()
            .find(|r| r.engine == engine && r.n == n)
            .map(|r| r.rule_applications)
    }

    pub fn to_csv(&self) -> Result<String, BenchError> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(["engine", "n", "rule_applications", "items", "wall_time_us"])?;
        for r in &self.rows {
            w.write_record([
                r.engine.to_string(),
                r.n.to_string(),
                r.rule_applications.to_string(),
                r.items.to_string(),
                r.wall_time_us.to_string(),
            ])?;
        }
        for (e, s) in &self.slopes {
            let value = s.map_or_else(|| "n/a".to_string(), |s| s.to_string());
            w.write_record(["slope".to_string(), e.to_string(), value])?;
        }
        let bytes = w.into_inner().map_err(|e| BenchError::Csv(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| BenchError::Csv(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self, BenchError> {
        let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
        let mut rows = Vec::new();
        let mut slopes = BTreeMap::new();
        let num = |s: &str| -> Result<u64, BenchError> {
            s.parse().map_err(|_| BenchError::Csv(format!("not a count: `{s}`")))
        };
        for rec in r.records() {
            let rec = rec?;
            match rec.iter().collect::<Vec<_>>().as_slice() {
                ["slope", engine, value] => {
                    let v = match *value {
                        "n/a" => None,
                        v => Some(v.parse().map_err(|_| BenchError::Csv(format!("bad slope `{v}`")))?),
                    };
                    slopes.insert(engine.parse()?, v);
                }
                [engine, n, apps, items, us] => rows.push(ScalingRow {
                    engine: engine.parse()?,
                    n: num(n)? as usize,
                    rule_applications: num(apps)?,
                    items: num(items)?,
                    wall_time_us: num(us)?,
                }),
                other => return Err(BenchError::Csv(format!("unexpected record {other:?}"))),
            }
        }
        Ok(ScalingReport { rows, slopes })
    }
}

/// Least-squares slope of `log2(y)` against `log2(n)`, given at least three
/// distinct lengths.
pub fn fit_slope(points: &[(usize, u64)]) -> Option<f64> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 || points.iter().any(|&(n, y)| n == 0 || y == 0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = points
        .iter()
        .map(|&(n, y)| ((n as f64).log2(), (y as f64).log2()))
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// Runs both engines on one builder string per length.
pub fn run_scaling(grammar: &Grammar, lengths: &[usize], builder: &StringBuilder) -> Result<ScalingReport, BenchError> {
    let inputs = lengths
        .iter()
        .map(|&n| builder.build(n).map(|s| (n, s)))
        .collect::<Result<Vec<_>, _>>()?;
    let tg = prepare(grammar)?;
    let restricted = Recognizer::new(&tg);
    let baseline = Baseline::new(grammar)?;
    let mut rows = Vec::new();
    for (n, input) in &inputs {
        let out = restricted.run(input, Discipline::Fifo)?;
        if !out.accepted {
            return Err(BenchError::Rejected {
                engine: Engine::Restricted,
                n: *n,
            });
        }
        rows.push(row(Engine::Restricted, *n, &out.stats));
        let (ok, stats) = baseline.recognize(input)?;
        if !ok {
            return Err(BenchError::Rejected {
                engine: Engine::Baseline,
                n: *n,
            });
        }
        rows.push(row(Engine::Baseline, *n, &stats));
    }
    Ok(ScalingReport::from_rows(rows))
}

fn row(engine: Engine, n: usize, stats: &crate::recognizer::RecognitionStats) -> ScalingRow {
    ScalingRow {
        engine,
        n,
        rule_applications: stats.total_rule_applications(),
        items: stats.total_items(),
        wall_time_us: stats.wall_time.as_micros() as u64,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeRow {
    pub k: usize,
    pub grammar_size: usize,
    pub rule_applications: u64,
    /// `rule_applications / |G|`.
    pub ratio: f64,
}

/// Restricted-engine rule applications on a fixed input across a family of
/// grammars.
pub fn run_grammar_size_scaling(
    family: impl Fn(usize) -> Grammar,
    ks: &[usize],
    input: &[&str],
) -> Result<Vec<SizeRow>, BenchError> {
    let mut rows = Vec::new();
    for &k in ks {
        let g = family(k);
        let tg = prepare(&g)?;
        let out = Recognizer::new(&tg).run(input, Discipline::Fifo)?;
        if !out.accepted {
            return Err(BenchError::Rejected {
                engine: Engine::Restricted,
                n: input.len(),
            });
        }
        let size = g.size().0;
        let apps = out.stats.total_rule_applications();
        rows.push(SizeRow {
            k,
            grammar_size: size,
            rule_applications: apps,
            ratio: apps as f64 / size as f64,
        });
    }
    Ok(rows)
}

/// Largest over smallest `ratio`.
pub fn ratio_spread(rows: &[SizeRow]) -> f64 {
    let max = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    max / min
}

/// The `aⁿbⁿcⁿdⁿ` grammar with `k` identical copies of its auxiliary tree,
/// each allowed wherever the original was.
pub fn g1_copies(k: usize) -> Grammar {
    let mut v: Value = serde_json::from_str(fixtures::G1).expect("fixture is JSON");
    let names: Vec<Value> = (1..=k)
        .map(|c| {
            Value::from(if c == 1 {
                "beta1".to_string()
            } else {
                format!("beta1_{c}")
            })
        })
        .collect();
    fn widen(node: &mut Value, names: &[Value]) {
        if let Some(allowed) = node.pointer_mut("/adj/allowed").and_then(Value::as_array_mut) {
            if allowed.iter().any(|a| a == "beta1") {
                *allowed = names.to_vec();
            }
        }
        if let Some(kids) = node.get_mut("children").and_then(Value::as_array_mut) {
            for c in kids {
                widen(c, names);
            }
        }
    }
    let trees = v["trees"].as_array_mut().expect("tree list");
    for t in trees.iter_mut() {
        widen(&mut t["root"], &names);
    }
    let beta = trees
        .iter()
        .find(|t| t["name"] == "beta1")
        .expect("beta1 present")
        .clone();
    for name in &names[1..] {
        let mut copy = beta.clone();
        copy["name"] = name.clone();
        trees.push(copy);
    }
    parse_grammar(&v.to_string()).expect("copies parse")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builders() {
        let b: StringBuilder = "blocks:a,b,c,d".parse().unwrap();
        assert_eq!(b.build(8).unwrap().concat(), "aabbccdd");
        assert!(matches!(b.build(6), Err(BenchError::Length { .. })));
        let s: StringBuilder = "stack:ℓ,s,r".parse().unwrap();
        assert_eq!(s.build(4).unwrap().concat(), "ℓℓsr");
        assert_eq!(s.build(1).unwrap().concat(), "s");
        assert_eq!(s.to_string(), "stack:ℓ,s,r");
        assert!("stack:a,b".parse::<StringBuilder>().is_err());
        assert!("blocks:".parse::<StringBuilder>().is_err());
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(usize, u64)> = [4usize, 8, 16, 32].iter().map(|&n| (n, (n as u64).pow(3))).collect();
        assert!((fit_slope(&pts).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(fit_slope(&pts[..2]), None);
    }

    #[test]
    fn single_length_has_no_slope() {
        let g = fixtures::load(fixtures::G1);
        let r = run_scaling(&g, &[8], &"blocks:a,b,c,d".parse().unwrap()).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.slope(Engine::Restricted), None);
        assert!(r.to_csv().unwrap().contains("slope,restricted,n/a"));
    }

    #[test]
    fn csv_round_trip() {
        let g = fixtures::load(fixtures::G2);
        let r = run_scaling(&g, &[3, 5, 7], &"stack:ℓ,s,r".parse().unwrap()).unwrap();
        assert_eq!(r.rows.len(), 6);
        assert!(r.slope(Engine::Baseline).is_some());
        let back = ScalingReport::from_csv(&r.to_csv().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn copies_family() {
        let g = g1_copies(3);
        assert_eq!(g.auxiliaries().count(), 3);
        let rows = run_grammar_size_scaling(g1_copies, &[1, 2], &["a", "a", "b", "b", "c", "c", "d", "d"]).unwrap();
        assert!(rows[1].grammar_size > rows[0].grammar_size);
    }
}
