//! Corpus runs and their two renderings: a human table and line-oriented
//! key-value records.
//!
//! Record format, one record per line, fields separated by single spaces:
//!
//! ```text
//! item line=<n> verdict=<OK|OK=n|BAD> parses=<n|-> edges=<n|-> status=<pass|fail> [error="..."] sentence="..."
//! totals items=<n> passed=<n> failed=<n>
//! timing line=<n> ms=<float>
//! timing total_ms=<float>
//! ```
//!
//! Only `timing` records vary between runs on identical input.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use pvp_core::lexicon::Lexicon;
use pvp_core::parser::{parse, ParseOptions};

use crate::corpus::{CorpusLine, Verdict};

#[derive(Clone, Debug)]
pub struct Outcome {
    pub line: usize,
    pub verdict: Verdict,
    pub sentence: String,
    /// `None` when parsing failed with an error.
    pub parses: Option<usize>,
    pub edges: Option<usize>,
    pub error: Option<String>,
    pub pass: bool,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub outcomes: Vec<Outcome>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.outcomes.len() - self.passed()
    }

    pub fn all_pass(&self) -> bool {
        self.failed() == 0
    }
}

pub fn run_corpus(lines: &[CorpusLine], lexicon: &Lexicon, opts: &ParseOptions) -> Report {
    let start = Instant::now();
    let outcomes = lines
        .iter()
        .map(|l| {
            let t = Instant::now();
            let r = parse(&l.tokens(), lexicon, opts);
            let elapsed = t.elapsed();
            let (parses, edges, error) = match r {
                Ok(r) => (Some(r.derivations.len()), Some(r.edges), None),
                Err(e) => (None, None, Some(e.to_string())),
            };
            Outcome {
                line: l.line,
                verdict: l.verdict,
                sentence: l.sentence.clone(),
                parses,
                edges,
                error,
                pass: parses.is_some_and(|n| l.verdict.accepts(n)),
                elapsed,
            }
        })
        .collect();
    Report {
        outcomes,
        elapsed: start.elapsed(),
    }
}

fn opt(n: Option<usize>) -> String {
    n.map_or_else(|| "-".to_string(), |n| n.to_string())
}

fn status(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1000.0)
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Fixed-width table. Timing is confined to the `time[ms]` column and the
/// `time[ms] total` line.
pub fn human(r: &Report) -> String {
    let mut out = String::new();
    let w = r
        .outcomes
        .iter()
        .map(|o| o.sentence.chars().count())
        .max()
        .unwrap_or(0)
        .max(8);
    let _ = writeln!(
        out,
        "{:>4}  {:<6}  {:>6}  {:>5}  {:<6}  {:<w$}  {:>9}",
        "line", "expect", "parses", "edges", "result", "sentence", "time[ms]"
    );
    for o in &r.outcomes {
        let _ = writeln!(
            out,
            "{:>4}  {:<6}  {:>6}  {:>5}  {:<6}  {:<w$}  {:>9}",
            o.line,
            o.verdict.to_string(),
            opt(o.parses),
            opt(o.edges),
            status(o.pass).to_uppercase(),
            o.sentence,
            ms(o.elapsed)
        );
        if let Some(e) = &o.error {
            let _ = writeln!(out, "      error: {}", e);
        }
    }
    let _ = writeln!(
        out,
        "{} items, {} passed, {} failed",
        r.outcomes.len(),
        r.passed(),
        r.failed()
    );
    let _ = writeln!(out, "time[ms] total {}", ms(r.elapsed));
    for o in r.outcomes.iter().filter(|o| !o.pass) {
        let _ = writeln!(
            out,
            "FAILED line {}: expected {}, got {}",
            o.line,
            o.verdict,
            o.parses
                .map_or_else(|| "error".to_string(), |n| n.to_string())
        );
    }
    out
}

pub fn machine(r: &Report) -> String {
    let mut out = String::new();
    for o in &r.outcomes {
        let _ = write!(
            out,
            "item line={} verdict={} parses={} edges={} status={}",
            o.line,
            o.verdict,
            opt(o.parses),
            opt(o.edges),
            status(o.pass)
        );
        if let Some(e) = &o.error {
            let _ = write!(out, " error={}", quoted(e));
        }
        let _ = writeln!(out, " sentence={}", quoted(&o.sentence));
    }
    let _ = writeln!(
        out,
        "totals items={} passed={} failed={}",
        r.outcomes.len(),
        r.passed(),
        r.failed()
    );
    for o in &r.outcomes {
        let _ = writeln!(out, "timing line={} ms={}", o.line, ms(o.elapsed));
    }
    let _ = writeln!(out, "timing total_ms={}", ms(r.elapsed));
    out
}

/// The machine report without its timing records.
pub fn strip_timing(machine: &str) -> String {
    machine
        .lines()
        .filter(|l| !l.starts_with("timing "))
        .map(|l| format!("{}\n", l))
        .collect()
}
