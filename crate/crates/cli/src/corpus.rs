//! Regression corpus files: one `VERDICT<TAB>sentence` item per line, `#`
//! starts a comment line.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tokenize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// At least one reading.
    Ok,
    /// Exactly this many readings.
    OkExactly(usize),
    /// No reading.
    Bad,
}

impl Verdict {
    pub fn accepts(self, readings: usize) -> bool {
        match self {
            Verdict::Ok => readings >= 1,
            Verdict::OkExactly(n) => readings == n,
            Verdict::Bad => readings == 0,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Ok => f.write_str("OK"),
            Verdict::OkExactly(n) => write!(f, "OK={}", n),
            Verdict::Bad => f.write_str("BAD"),
        }
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "OK" => Ok(Verdict::Ok),
            "BAD" => Ok(Verdict::Bad),
            _ => match s.strip_prefix("OK=").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Ok(Verdict::OkExactly(n)),
                Some(_) => Err(format!("bad reading count in `{}`", s)),
                None => Err(format!("unknown verdict `{}`", s)),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusLine {
    /// 1-based line number in the file.
    pub line: usize,
    pub verdict: Verdict,
    pub sentence: String,
}

impl CorpusLine {
    pub fn tokens(&self) -> Vec<String> {
        tokenize(&self.sentence)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("corpus line {line}: {msg}")]
pub struct CorpusError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusLine>, CorpusError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |msg: String| CorpusError { line, msg };
        let (v, sentence) = raw
            .split_once('\t')
            .ok_or_else(|| err("expected VERDICT<TAB>sentence".into()))?;
        let verdict = v.trim().parse::<Verdict>().map_err(err)?;
        let sentence = sentence.trim().to_string();
        if tokenize(&sentence).is_empty() {
            return Err(err("empty sentence".into()));
        }
        out.push(CorpusLine {
            line,
            verdict,
            sentence,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_parse_and_print() {
        for s in ["OK", "OK=2", "BAD"] {
            assert_eq!(s.parse::<Verdict>().unwrap().to_string(), s);
        }
        assert!("OK=0".parse::<Verdict>().is_err());
        assert!("OK=x".parse::<Verdict>().is_err());
        assert!("ok".parse::<Verdict>().is_err());
    }

    #[test]
    fn verdict_acceptance() {
        assert!(Verdict::Ok.accepts(3));
        assert!(!Verdict::Ok.accepts(0));
        assert!(Verdict::OkExactly(1).accepts(1));
        assert!(!Verdict::OkExactly(1).accepts(2));
        assert!(Verdict::Bad.accepts(0));
        assert!(!Verdict::Bad.accepts(1));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let c =
            parse_corpus("# header\n\nOK\tEr wird.\n  # indented\nBAD\tMüssen wird er\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].line, 3);
        assert_eq!(c[0].tokens(), ["Er", "wird"]);
        assert_eq!(c[1].verdict, Verdict::Bad);
    }

    #[test]
    fn malformed_lines_name_their_number() {
        let e = parse_corpus("OK\tEr wird\nOK Er wird\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_corpus("MAYBE\tEr wird\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_corpus("OK\t .\n").unwrap_err();
        assert_eq!(e.line, 1);
    }
}
