//! Command line front end: single-sentence parsing and corpus runs.

pub mod corpus;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use pvp_core::grammar::{Grammar, Mode};
use pvp_core::lexicon::{load_lexicon, Lexicon, LexiconError, FRAGMENT};
use pvp_core::orderdomain::linearize;
use pvp_core::parser::{
    build_chart, enumerate_readings, ClauseChoice, ParseError, ParseOptions, DEFAULT_EDGE_LIMIT,
};
use pvp_core::tfs::Printer;

use corpus::{parse_corpus, CorpusError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Whitespace split after dropping a sentence-final `.` and commas.
pub fn tokenize(s: &str) -> Vec<String> {
    let s = s.trim();
    let s = s.strip_suffix('.').unwrap_or(s);
    s.split_whitespace()
        .map(|t| t.trim_matches(','))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Parser)]
#[command(
    name = "pvp",
    version,
    about = "Parser for a German HPSG fragment with partial VP fronting"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse one sentence.
    Parse(ParseArgs),
    /// Run a regression corpus.
    Corpus(CorpusArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Licensing,
    Trace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClauseArg {
    Auto,
    V2,
    Vfinal,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    /// Lexicon file; defaults to the built-in fragment.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_name = "TEXT")]
    pub sentence: String,
    /// Print each reading's root AVM.
    #[arg(long)]
    pub print_avm: bool,
    /// Print each reading's derivation tree.
    #[arg(long)]
    pub print_derivation: bool,
    #[arg(long, value_enum, default_value = "licensing")]
    pub mode: ModeArg,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_EDGE_LIMIT,
          value_parser = clap::value_parser!(u64).range(1..).map(|n| n as usize))]
    pub edge_limit: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub clause_type: ClauseArg,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Lexicon file; defaults to the built-in fragment.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Also write the key-value report here.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("lexicon {path}: {source}")]
    Lexicon { path: String, source: LexiconError },
    #[error("{path}: {source}")]
    Corpus { path: PathBuf, source: CorpusError },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: Option<&Path>) -> Result<Lexicon, CliError> {
    let g = Arc::new(Grammar::german());
    let (name, text) = match path {
        Some(p) => (p.display().to_string(), read(p)?),
        None => ("<built-in>".to_string(), FRAGMENT.to_string()),
    };
    load_lexicon(&g, &text).map_err(|source| CliError::Lexicon { path: name, source })
}

impl ParseArgs {
    pub fn options(&self) -> ParseOptions {
        ParseOptions {
            mode: match self.mode {
                ModeArg::Licensing => Mode::Licensing,
                ModeArg::Trace => Mode::Trace,
            },
            edge_limit: self.edge_limit,
            clause_type: match self.clause_type {
                ClauseArg::Auto => ClauseChoice::Auto,
                ClauseArg::V2 => ClauseChoice::V2,
                ClauseArg::Vfinal => ClauseChoice::VFinal,
            },
            ..ParseOptions::default()
        }
    }
}

/// Runs a parsed command line, writing to `out` and `err`; returns the exit
/// status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let r = match &cli.command {
        Command::Parse(a) => cmd_parse(a, out),
        Command::Corpus(a) => cmd_corpus(a, out),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            EXIT_ERROR
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

pub fn cmd_parse(a: &ParseArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let lexicon = load(a.lexicon.as_deref())?;
    let g = lexicon.grammar().clone();
    let tokens = tokenize(&a.sentence);
    let opts = a.options();
    let chart = build_chart(&tokens, &lexicon, &opts)?;
    if chart.limit_hit {
        let open = chart.open_valence_edges(&g);
        writeln!(
            out,
            "edge limit {} reached in {:?} mode: {} edges, {} with open valence",
            opts.edge_limit,
            opts.mode,
            chart.edges.len(),
            open.len()
        )
        .map_err(io)?;
        if let (true, Some(&i)) = (a.print_avm, open.first()) {
            let avm = Printer::new(&g.hierarchy, chart.edge(i).sign.fs())
                .pretty()
                .to_string();
            writeln!(out, "sample open edge {}:\n{}", i, avm).map_err(io)?;
        }
        writeln!(out, "readings: 0").map_err(io)?;
        return Ok(EXIT_FAIL);
    }
    let clause = opts.clause_type.resolve(&tokens);
    let derivations: Vec<_> = chart
        .roots(&g)
        .into_iter()
        .map(|r| chart.derivation(r))
        .collect();
    let readings = enumerate_readings(&derivations);
    writeln!(
        out,
        "readings: {} ({:?} clause, {} edges)",
        readings.len(),
        clause,
        chart.edges.len()
    )
    .map_err(io)?;
    for (i, (d, fs)) in readings.iter().enumerate() {
        if a.print_derivation || a.print_avm {
            writeln!(out, "reading {}", i + 1).map_err(io)?;
        }
        if a.print_derivation {
            let fields = linearize(&d.sign, clause);
            write!(out, "{}", d.render(&g, fields.as_deref())).map_err(io)?;
        }
        if a.print_avm {
            writeln!(out, "{}", Printer::new(&g.hierarchy, fs).pretty()).map_err(io)?;
        }
    }
    Ok(if readings.is_empty() {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

pub fn cmd_corpus(a: &CorpusArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let lexicon = load(a.lexicon.as_deref())?;
    let text = read(&a.corpus)?;
    let lines = parse_corpus(&text).map_err(|source| CliError::Corpus {
        path: a.corpus.clone(),
        source,
    })?;
    let r = report::run_corpus(&lines, &lexicon, &ParseOptions::default());
    write!(out, "{}", report::human(&r)).map_err(io)?;
    if let Some(p) = &a.out {
        fs::write(p, report::machine(&r)).map_err(|source| CliError::Io {
            path: p.clone(),
            source,
        })?;
    }
    Ok(if r.all_pass() { EXIT_OK } else { EXIT_FAIL })
}
