//! Command-line front end. Exit status 0 means accept or valid, 1 reject or
//! invalid, 2 a usage or input error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{run_scaling, Engine, StringBuilder};
use crate::compare::{compare_grammar, CompareOptions, DEFAULT_EXHAUSTIVE_CAP, MAX_COMPARE_LEN};
use crate::grammar::{parse_grammar, validate_restriction, Grammar};
use crate::oracle::{Baseline, DEFAULT_FRONTIER_CAP};
use crate::recognizer::recognize;
use crate::transform::prepare;

pub const OK: u8 = 0;
pub const NO: u8 = 1;
pub const ERROR: u8 = 2;

/// Environment variable bounding the enumerator's visited set.
pub const FRONTIER_CAP_VAR: &str = "TAG5_FRONTIER_CAP";

#[derive(Parser, Debug)]
#[command(
    name = "tag5",
    version,
    about = "Recognizer for wrapping-restricted tree adjoining grammars"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a grammar against the wrapping restriction.
    Validate { grammar: PathBuf },
    /// Write the split-tree form of a grammar.
    Transform { grammar: PathBuf, out: PathBuf },
    /// Decide membership of one input string.
    Recognize {
        grammar: PathBuf,
        input: String,
        /// Treat every character as a token.
        #[arg(long, conflicts_with = "tokens")]
        chars: bool,
        /// Split tokens on this separator instead of whitespace.
        #[arg(long, value_name = "SEP")]
        tokens: Option<String>,
        /// Print item and rule-application counts.
        #[arg(long)]
        stats: bool,
        #[arg(long, value_enum, default_value_t = EngineArg::Restricted)]
        engine: EngineArg,
    },
    /// Cross-check the restricted recognizer, the baseline and the
    /// enumerator on all short strings.
    Compare {
        grammar: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Check this many random strings of the lengths too numerous to
        /// check exhaustively.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Measure rule applications of both engines against input length.
    Bench {
        grammar: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        lengths: Vec<usize>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// `blocks:a,b,c,d` or `stack:left,center,right`; defaults to blocks
        /// over the sorted terminal alphabet.
        #[arg(long)]
        builder: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Restricted,
    Baseline,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { ERROR } else { OK };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            ERROR
        }
    }
}

fn load(path: &Path) -> Result<Grammar, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_grammar(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn tokenize(input: &str, chars: bool, sep: Option<&str>) -> Vec<String> {
    if chars {
        input.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
    } else if let Some(sep) = sep {
        input.split(sep).filter(|t| !t.is_empty()).map(str::to_string).collect()
    } else {
        input.split_whitespace().map(str::to_string).collect()
    }
}

fn frontier_cap() -> Result<usize, String> {
    match std::env::var(FRONTIER_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{FRONTIER_CAP_VAR} must be a positive integer, got `{v}`")),
        Err(_) => Ok(DEFAULT_FRONTIER_CAP),
    }
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, String> {
    let io = |e: std::io::Error| e.to_string();
    match cmd {
        Command::Validate { grammar } => {
            let g = load(&grammar)?;
            let report = validate_restriction(&g);
            for v in report.violations.iter().chain(&report.warnings) {
                writeln!(out, "{v}").map_err(io)?;
            }
            if report.is_valid() {
                writeln!(out, "OK").map_err(io)?;
                Ok(OK)
            } else {
                Ok(NO)
            }
        }
        Command::Transform { grammar, out: path } => {
            let g = load(&grammar)?;
            let report = validate_restriction(&g);
            if !report.is_valid() {
                for v in &report.violations {
                    writeln!(err, "{v}").map_err(io)?;
                }
                return Ok(NO);
            }
            let tg = prepare(&g).map_err(|e| e.to_string())?;
            std::fs::write(&path, tg.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
            writeln!(out, "wrote {} trees to {}", tg.hosts().len(), path.display()).map_err(io)?;
            Ok(OK)
        }
        Command::Recognize {
            grammar,
            input,
            chars,
            tokens,
            stats,
            engine,
        } => {
            let g = load(&grammar)?;
            let words = tokenize(&input, chars, tokens.as_deref());
            let (accepted, st) = match engine {
                EngineArg::Restricted => {
                    let report = validate_restriction(&g);
                    if !report.is_valid() {
                        for v in &report.violations {
                            writeln!(err, "{v}").map_err(io)?;
                        }
                        return Err("grammar violates the wrapping restriction; use --engine baseline".into());
                    }
                    let tg = prepare(&g).map_err(|e| e.to_string())?;
                    recognize(&tg, &words).map_err(|e| e.to_string())?
                }
                EngineArg::Baseline => Baseline::new(&g)
                    .and_then(|b| b.recognize(&words))
                    .map_err(|e| e.to_string())?,
            };
            writeln!(out, "{}", if accepted { "ACCEPT" } else { "REJECT" }).map_err(io)?;
            if stats {
                writeln!(out, "{st}").map_err(io)?;
            }
            Ok(if accepted { OK } else { NO })
        }
        Command::Compare {
            grammar,
            max_len,
            sample,
            seed,
        } => {
            if max_len > MAX_COMPARE_LEN {
                return Err(format!("--max-len must be at most {MAX_COMPARE_LEN}"));
            }
            let g = load(&grammar)?;
            let opts = CompareOptions {
                max_len,
                sample,
                seed,
                exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
                frontier_cap: frontier_cap()?,
            };
            let report = compare_grammar(&g, &opts).map_err(|e| e.to_string())?;
            for d in &report.disagreements {
                writeln!(out, "{d}").map_err(io)?;
            }
            writeln!(
                out,
                "checked {} strings ({} sampled) with {}",
                report.checked,
                report.sampled,
                report.engines.join(", ")
            )
            .map_err(io)?;
            if report.agree() {
                writeln!(out, "no differences").map_err(io)?;
                Ok(OK)
            } else {
                writeln!(out, "{} differences", report.disagreements.len()).map_err(io)?;
                Ok(NO)
            }
        }
        Command::Bench {
            grammar,
            lengths,
            csv,
            builder,
        } => {
            let g = load(&grammar)?;
            let builder = match builder {
                Some(spec) => spec.parse::<StringBuilder>().map_err(|e| e.to_string())?,
                None => StringBuilder::Blocks(g.terminals.iter().cloned().collect()),
            };
            let report = run_scaling(&g, &lengths, &builder).map_err(|e| e.to_string())?;
            let text = report.to_csv().map_err(|e| e.to_string())?;
            match csv {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?,
                None => write!(out, "{text}").map_err(io)?,
            }
            for e in Engine::ALL {
                let s = report.slope(e).map_or_else(|| "n/a".to_string(), |s| format!("{s:.3}"));
                writeln!(err, "slope {e}: {s}").map_err(io)?;
            }
            Ok(OK)
        }
    }
}
