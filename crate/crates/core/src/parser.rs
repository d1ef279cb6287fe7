//! Agenda-driven bottom-up chart parser over coverage sets.
//!
//! Word order is fixed by the input: edges carry the input positions they
//! cover, any two edges with disjoint footprints may combine, and the root
//! domain is checked against the linearization constraints at the end.
//!
//! Each edge has a saturation frontier: only COMPS elements below it may be
//! saturated next, and saturating element `i` moves the frontier to `i`.
//! Within a valence list complements are therefore taken from the end, but
//! an element may be skipped and left for a higher head.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grammar::{self, Grammar, Mode, Schema, SchemaError, Sign, Slot};
use crate::lexicon::Lexicon;
use crate::orderdomain::{linearize, ClauseType, Coverage, Field, MAX_TOKENS};
use crate::tfs::{fs_equal, FeatureStructure, Printer};

pub const DEFAULT_EDGE_LIMIT: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeSchema {
    Lexical,
    /// Verbal trace proposed at an inter-token boundary.
    Trace {
        boundary: usize,
    },
    Rule(Schema),
}

impl fmt::Display for EdgeSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeSchema::Lexical => f.write_str("lex"),
            EdgeSchema::Trace { boundary } => write!(f, "trace@{}", boundary),
            EdgeSchema::Rule(s) => f.write_str(&s.label()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub id: usize,
    pub sign: Arc<Sign>,
    pub schema: EdgeSchema,
    /// Daughter edge ids in schema order.
    pub daughters: Vec<usize>,
    /// Edge that licensed a still unbound SLASH element.
    pub licenser: Option<usize>,
    pub frontier: usize,
    /// Filler-head outputs are complete clauses and combine no further.
    pub maximal: bool,
    /// Coverage plus the coverage of a pending licenser.
    pub footprint: Coverage,
    coverage: Coverage,
    info: Info,
}

impl Edge {
    pub fn coverage(&self) -> Coverage {
        self.coverage
    }
}

/// Cheap facts about a sign, used to skip hopeless schema applications.
#[derive(Clone, Debug, Default)]
struct Info {
    comps_items: usize,
    comps_open: bool,
    vcomp_none: bool,
    vcomp_pending: bool,
    lex_minus: bool,
    verbal: bool,
    slashed: bool,
    has_mod: bool,
}

impl Info {
    fn of(g: &Grammar, s: &Sign) -> Self {
        let fs = s.fs();
        let ty = |p| fs.path_get(p).ok().map(|v| v.root_type());
        let is = |p, t: &str| {
            ty(p).is_some_and(|x| {
                g.hierarchy
                    .is_subtype(x, g.hierarchy.type_id(t).expect("type"))
            })
        };
        let (comps_items, comps_open) = fs
            .path_get(&g.paths.comps)
            .ok()
            .and_then(|c| c.list_view())
            .map(|(i, o)| (i.len(), o))
            .unwrap_or((0, false));
        Info {
            comps_items,
            comps_open,
            vcomp_none: is(&g.paths.vcomp, "none"),
            vcomp_pending: is(&g.paths.vcomp, "synsem"),
            lex_minus: is(&g.paths.lex, "-"),
            verbal: is(&g.paths.head, "verb"),
            slashed: fs
                .path_get(&g.paths.slash)
                .ok()
                .and_then(|s| s.set_view())
                .is_some_and(|v| !v.is_empty()),
            has_mod: fs.resolve(&g.paths.mod_).is_ok(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClauseChoice {
    /// Verb-final when the sentence starts with "weil", else verb-second.
    #[default]
    Auto,
    V2,
    VFinal,
}

impl ClauseChoice {
    pub fn resolve(self, tokens: &[String]) -> ClauseType {
        match self {
            ClauseChoice::V2 => ClauseType::V2,
            ClauseChoice::VFinal => ClauseType::VFinal,
            ClauseChoice::Auto if tokens.first().is_some_and(|t| t == "weil") => ClauseType::VFinal,
            ClauseChoice::Auto => ClauseType::V2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParseOptions {
    pub mode: Mode,
    pub edge_limit: usize,
    pub clause_type: ClauseChoice,
    /// In trace mode, whether traces are offered at all.
    pub propose_traces: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            mode: Mode::Licensing,
            edge_limit: DEFAULT_EDGE_LIMIT,
            clause_type: ClauseChoice::Auto,
            propose_traces: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("at most {max} tokens are supported, got {got}")]
    TooLong { got: usize, max: usize },
    #[error("no lexical entry covers \"{token}\" (position {position})")]
    LexicalGap { token: String, position: usize },
    #[error("edge limit {limit} reached in {mode:?} mode ({edges} edges)")]
    EdgeLimit {
        limit: usize,
        edges: usize,
        mode: Mode,
    },
}

/// The chart after running the agenda to exhaustion or to the edge limit.
#[derive(Debug)]
pub struct Chart {
    pub tokens: Vec<String>,
    pub edges: Vec<Edge>,
    pub limit_hit: bool,
    /// Edges discarded in licensing mode for an underspecified valence list.
    pub rejected_open: usize,
    options: ParseOptions,
}

struct Builder<'a> {
    g: &'a Grammar,
    opts: &'a ParseOptions,
    chart: Chart,
    seen: HashMap<(u64, EdgeSchema, Vec<usize>), Vec<usize>>,
    agenda: VecDeque<usize>,
}

impl<'a> Builder<'a> {
    fn add(
        &mut self,
        sign: Sign,
        schema: EdgeSchema,
        daughters: Vec<usize>,
        frontier: usize,
    ) -> bool {
        if self.chart.limit_hit {
            return false;
        }
        if self.opts.mode == Mode::Licensing && !grammar::check_comps_closed(self.g, &sign) {
            self.chart.rejected_open += 1;
            return true;
        }
        let key = (sign.coverage().bits(), schema, daughters.clone());
        if let Some(ids) = self.seen.get(&key) {
            if ids
                .iter()
                .any(|&i| fs_equal(self.chart.edges[i].sign.fs(), sign.fs()))
            {
                return true;
            }
        }
        let licenser = match (&schema, daughters.as_slice()) {
            (EdgeSchema::Rule(Schema::PvpSlashIntroduction), [_, l]) => Some(*l),
            (EdgeSchema::Rule(Schema::FillerHead), _) => None,
            _ => daughters.iter().find_map(|&d| self.chart.edges[d].licenser),
        };
        let id = self.chart.edges.len();
        let info = Info::of(self.g, &sign);
        let frontier = if schema == EdgeSchema::Lexical {
            info.comps_items
        } else {
            frontier
        };
        let (footprint, coverage) = (sign.footprint(), sign.coverage());
        self.chart.edges.push(Edge {
            id,
            sign: Arc::new(sign),
            schema,
            daughters,
            licenser,
            frontier,
            maximal: schema == EdgeSchema::Rule(Schema::FillerHead),
            footprint,
            coverage,
            info,
        });
        self.seen.entry(key).or_default().push(id);
        self.agenda.push_back(id);
        if self.chart.edges.len() >= self.opts.edge_limit {
            self.chart.limit_hit = true;
            return false;
        }
        true
    }

    fn rule(
        &mut self,
        r: Result<Sign, SchemaError>,
        schema: Schema,
        dtrs: Vec<usize>,
        frontier: usize,
    ) -> bool {
        match r {
            Ok(s) => self.add(s, EdgeSchema::Rule(schema), dtrs, frontier),
            Err(_) => true,
        }
    }

    /// Tries every schema with `h` as head (or the head of a filler-head
    /// structure) and `o` as the other daughter.
    fn pair(&mut self, h: usize, o: usize) -> bool {
        let g = self.g;
        let (he, oe) = (&self.chart.edges[h], &self.chart.edges[o]);
        if he.maximal || oe.maximal {
            return true;
        }
        let disjoint = he.footprint.is_disjoint(oe.footprint)
            && !(he.info.slashed && oe.info.slashed)
            && !(he.licenser.is_some() && oe.licenser.is_some());
        let filler_possible = he.info.slashed
            && !oe.info.slashed
            && he.info.comps_items == 0
            && he.coverage().is_disjoint(oe.footprint);
        if !disjoint && !filler_possible {
            return true;
        }
        let (hi, oi) = (he.info.clone(), oe.info.clone());
        let (hs, os) = (he.sign.clone(), oe.sign.clone());
        let frontier = he.frontier;
        let (h_lic, o_lic) = (he.licenser, oe.licenser);

        if disjoint && !hi.vcomp_pending && (hi.comps_items > 0 || hi.comps_open) {
            for i in (0..frontier.min(hi.comps_items)).rev() {
                let slot = Slot::Index(i);
                let r = grammar::apply_head_complement_at(g, &hs, &os, slot);
                if !self.rule(r, Schema::HeadComplement { slot }, vec![h, o], i) {
                    return false;
                }
            }
            if hi.comps_open {
                let r = grammar::apply_head_complement_at(g, &hs, &os, Slot::Extend);
                let schema = Schema::HeadComplement { slot: Slot::Extend };
                if !self.rule(r, schema, vec![h, o], hi.comps_items) {
                    return false;
                }
            }
        }
        if disjoint && oi.has_mod {
            let r = grammar::apply_head_adjunct(g, &hs, &os);
            if !self.rule(r, Schema::HeadAdjunct, vec![h, o], 0) {
                return false;
            }
        }
        if disjoint && !hi.vcomp_none && hi.verbal && oi.verbal && !oi.lex_minus {
            let r = grammar::apply_verb_cluster(g, &hs, &os);
            let n = r.as_ref().map(|s| Info::of(g, s).comps_items).unwrap_or(0);
            if !self.rule(r, Schema::VerbCluster, vec![h, o], n) {
                return false;
            }
        }
        if self.opts.mode == Mode::Licensing
            && disjoint
            && hi.vcomp_pending
            && oi.verbal
            && !oi.slashed
            && o_lic.is_none()
        {
            let r = grammar::apply_pvp_slash_introduction(g, &hs, &os);
            let n = r.as_ref().map(|s| Info::of(g, s).comps_items).unwrap_or(0);
            if !self.rule(r, Schema::PvpSlashIntroduction, vec![h, o], n) {
                return false;
            }
        }
        if filler_possible {
            let lic_ok = match h_lic {
                Some(l) => l == o,
                None => true,
            };
            if lic_ok {
                let r = grammar::apply_filler_head(g, &os, &hs);
                if !self.rule(r, Schema::FillerHead, vec![o, h], 0) {
                    return false;
                }
            }
        }
        true
    }

    fn run(&mut self) {
        let mut done: Vec<usize> = Vec::new();
        while let Some(e) = self.agenda.pop_front() {
            for &o in &done {
                if !self.pair(e, o) || !self.pair(o, e) {
                    return;
                }
            }
            done.push(e);
        }
    }
}

fn seed(tokens: &[String], lexicon: &Lexicon) -> Result<Vec<(usize, Sign)>, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError::Empty);
    }
    if tokens.len() > MAX_TOKENS {
        return Err(ParseError::TooLong {
            got: tokens.len(),
            max: MAX_TOKENS,
        });
    }
    let mut covered = vec![false; tokens.len()];
    let mut out = Vec::new();
    for pos in 0..tokens.len() {
        for (len, sign) in lexicon.lookup(tokens, pos) {
            covered[pos..pos + len].iter_mut().for_each(|c| *c = true);
            out.push((len, sign));
        }
    }
    if let Some(p) = covered.iter().position(|c| !c) {
        return Err(ParseError::LexicalGap {
            token: tokens[p].clone(),
            position: p,
        });
    }
    Ok(out)
}

/// Builds the chart for `tokens` without extracting parses.
pub fn build_chart(
    tokens: &[String],
    lexicon: &Lexicon,
    opts: &ParseOptions,
) -> Result<Chart, ParseError> {
    let g = lexicon.grammar().as_ref();
    let lexical = seed(tokens, lexicon)?;
    let mut b = Builder {
        g,
        opts,
        chart: Chart {
            tokens: tokens.to_vec(),
            edges: Vec::new(),
            limit_hit: false,
            rejected_open: 0,
            options: opts.clone(),
        },
        seen: HashMap::new(),
        agenda: VecDeque::new(),
    };
    for (_, sign) in lexical {
        b.add(sign, EdgeSchema::Lexical, Vec::new(), 0);
    }
    if opts.mode == Mode::Trace && opts.propose_traces {
        for boundary in 0..=tokens.len() {
            let t = grammar::make_vcomp_trace(g, None, Mode::Trace).expect("trace mode");
            if !b.add(t, EdgeSchema::Trace { boundary }, Vec::new(), 0) {
                break;
            }
        }
    }
    b.run();
    Ok(b.chart)
}

impl Chart {
    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Root edges: full coverage, no pending licenser, saturated finite
    /// clause with empty SLASH, and an admissible linearization.
    pub fn roots(&self, g: &Grammar) -> Vec<usize> {
        let full = Coverage::span(0, self.tokens.len());
        let clause = self.options.clause_type.resolve(&self.tokens);
        self.edges
            .iter()
            .filter(|e| e.coverage() == full && e.licenser.is_none() && e.sign.licenser().is_none())
            .filter(|e| root_condition(g, &e.sign))
            .filter(|e| linearize(&e.sign, clause).is_some())
            .map(|e| e.id)
            .collect()
    }

    pub fn derivation(&self, id: usize) -> Derivation {
        let e = &self.edges[id];
        Derivation {
            edge: id,
            schema: e.schema,
            sign: e.sign.clone(),
            children: e.daughters.iter().map(|&d| self.derivation(d)).collect(),
        }
    }

    /// Edges whose sign fails the valence-closure check.
    pub fn open_valence_edges(&self, g: &Grammar) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| !grammar::check_comps_closed(g, &e.sign))
            .map(|e| e.id)
            .collect()
    }
}

/// COMPS empty, HEAD verb with VFORM fin, SLASH empty.
pub fn root_condition(g: &Grammar, s: &Sign) -> bool {
    let fs = s.fs();
    let h = &g.hierarchy;
    let ty_is = |p, t: &str| {
        fs.path_get(p)
            .is_ok_and(|v| h.is_subtype(v.root_type(), h.type_id(t).expect("type")))
    };
    let comps_empty = fs
        .path_get(&g.paths.comps)
        .ok()
        .and_then(|c| c.list_view())
        .is_some_and(|(i, open)| i.is_empty() && !open);
    let slash_empty = fs
        .path_get(&g.paths.slash)
        .ok()
        .and_then(|s| s.set_view())
        .is_some_and(|v| v.is_empty());
    comps_empty && slash_empty && ty_is(&g.paths.head, "verb") && ty_is(&g.paths.vform, "fin")
}

/// A tree of schema applications ending in lexical signs or traces.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub edge: usize,
    pub schema: EdgeSchema,
    pub sign: Arc<Sign>,
    pub children: Vec<Derivation>,
}

impl Derivation {
    /// Canonical one-line serialization; used for ordering readings.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.schema.to_string());
        out.push(' ');
        out.push_str(&self.sign.coverage().to_string());
        if self.children.is_empty() {
            out.push(' ');
            out.push_str(&self.sign.dom().phon().join("_"));
        }
        for c in &self.children {
            out.push(' ');
            c.write_canonical(out);
        }
        out.push(')');
    }

    pub fn schemata(&self) -> Vec<EdgeSchema> {
        let mut v = vec![self.schema];
        for c in &self.children {
            v.extend(c.schemata());
        }
        v
    }

    /// Re-applies every schema bottom-up and checks that each mother is
    /// reproduced. Shared subtrees (a filler that is also the licensing
    /// daughter) are replayed once so identity checks still hold.
    pub fn replay(&self, g: &Grammar) -> Result<(), String> {
        let mut memo: HashMap<usize, Arc<Sign>> = HashMap::new();
        self.replay_in(g, &mut memo).map(|_| ())
    }

    fn replay_in(
        &self,
        g: &Grammar,
        memo: &mut HashMap<usize, Arc<Sign>>,
    ) -> Result<Arc<Sign>, String> {
        if let Some(s) = memo.get(&self.edge) {
            return Ok(s.clone());
        }
        let out = match self.schema {
            EdgeSchema::Lexical | EdgeSchema::Trace { .. } => self.sign.clone(),
            EdgeSchema::Rule(schema) => {
                let mut kids = Vec::new();
                for c in &self.children {
                    kids.push(c.replay_in(g, memo)?);
                }
                let s = grammar::apply(g, schema, &kids).map_err(|e| {
                    format!("{} at {}: {}", schema.label(), self.sign.coverage(), e)
                })?;
                if !fs_equal(s.fs(), self.sign.fs()) || s.dom() != self.sign.dom() {
                    return Err(format!(
                        "{} at {} does not reproduce its mother",
                        schema.label(),
                        self.sign.coverage()
                    ));
                }
                Arc::new(s)
            }
        };
        memo.insert(self.edge, out.clone());
        Ok(out)
    }

    /// Indented tree: schema, coverage, fields at the root, and a summary
    /// of LEX, VCOMP and SLASH for each node.
    pub fn render(&self, g: &Grammar, fields: Option<&[Field]>) -> String {
        let mut out = String::new();
        if let Some(f) = fields {
            let els = self.sign.dom().elements();
            let parts: Vec<String> = els
                .iter()
                .zip(f)
                .map(|(e, f)| format!("{}[{}]@{}", f, e.phon.join(" "), e.coverage))
                .collect();
            out.push_str(&format!("fields: {}\n", parts.join(" ")));
        }
        self.render_in(g, 0, &mut out);
        out
    }

    fn render_in(&self, g: &Grammar, depth: usize, out: &mut String) {
        let fs = self.sign.fs();
        let h = &g.hierarchy;
        let ty = |p| {
            fs.path_get(p)
                .map(|v| h.type_name(v.root_type()).to_string())
                .unwrap_or_else(|_| "-".into())
        };
        let slash = fs
            .path_get(&g.paths.slash)
            .ok()
            .and_then(|s| s.set_view())
            .map(|v| v.len())
            .unwrap_or(0);
        out.push_str(&format!(
            "{}{} {} \"{}\" lex={} vcomp={} slash={}\n",
            "  ".repeat(depth),
            self.schema,
            self.sign.coverage(),
            self.sign.dom().phon().join(" "),
            ty(&g.paths.lex),
            ty(&g.paths.vcomp),
            slash
        ));
        for c in &self.children {
            c.render_in(g, depth + 1, out);
        }
    }
}

#[derive(Debug)]
pub struct ParseResult {
    pub derivations: Vec<Derivation>,
    pub edges: usize,
    pub clause_type: ClauseType,
}

/// All derivations of `tokens`, or an edge-limit report.
pub fn parse(
    tokens: &[String],
    lexicon: &Lexicon,
    opts: &ParseOptions,
) -> Result<ParseResult, ParseError> {
    let chart = build_chart(tokens, lexicon, opts)?;
    if chart.limit_hit {
        return Err(ParseError::EdgeLimit {
            limit: opts.edge_limit,
            edges: chart.edges.len(),
            mode: opts.mode,
        });
    }
    let g = lexicon.grammar();
    let derivations = chart
        .roots(g)
        .into_iter()
        .map(|r| chart.derivation(r))
        .collect();
    Ok(ParseResult {
        derivations,
        edges: chart.edges.len(),
        clause_type: opts.clause_type.resolve(tokens),
    })
}

/// Readings in canonical order, each with its root AVM.
pub fn enumerate_readings(derivations: &[Derivation]) -> Vec<(Derivation, FeatureStructure)> {
    let mut v: Vec<(String, &Derivation)> =
        derivations.iter().map(|d| (d.canonical(), d)).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    let mut seen = HashSet::new();
    v.into_iter()
        .filter(|(k, _)| seen.insert(k.clone()))
        .map(|(_, d)| (d.clone(), d.sign.fs().clone()))
        .collect()
}

#[derive(Clone, Debug)]
pub struct ChartReport {
    pub mode: Mode,
    pub edge_limit: usize,
    pub limit_hit: bool,
    pub edges: usize,
    /// Retained edges failing the valence-closure check.
    pub open_valence_edges: usize,
    /// Edges discarded by the licensing-mode filter.
    pub rejected_open: usize,
    pub parses: usize,
    /// Printed AVM of the first offending edge.
    pub sample: Option<String>,
}

/// Builds the chart in the given mode and reports on edges with
/// underspecified valence.
pub fn chart_report(
    tokens: &[String],
    lexicon: &Lexicon,
    opts: &ParseOptions,
) -> Result<ChartReport, ParseError> {
    let g = lexicon.grammar();
    let chart = build_chart(tokens, lexicon, opts)?;
    let open = chart.open_valence_edges(g);
    let sample = open.first().map(|&i| {
        Printer::new(&g.hierarchy, chart.edges[i].sign.fs())
            .pretty()
            .to_string()
    });
    let parses = if chart.limit_hit {
        0
    } else {
        chart.roots(g).len()
    };
    Ok(ChartReport {
        mode: opts.mode,
        edge_limit: opts.edge_limit,
        limit_hit: chart.limit_hit,
        edges: chart.edges.len(),
        open_valence_edges: open.len(),
        rejected_open: chart.rejected_open,
        parses,
        sample,
    })
}

/// Trace-mode run under `edge_limit`.
pub fn demonstrate_trace_mode(
    tokens: &[String],
    lexicon: &Lexicon,
    edge_limit: usize,
) -> Result<ChartReport, ParseError> {
    let opts = ParseOptions {
        mode: Mode::Trace,
        edge_limit,
        ..ParseOptions::default()
    };
    chart_report(tokens, lexicon, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{load_lexicon, FRAGMENT};

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn clause_type_follows_the_first_token() {
        assert_eq!(
            ClauseChoice::Auto.resolve(&toks("weil er")),
            ClauseType::VFinal
        );
        assert_eq!(ClauseChoice::Auto.resolve(&toks("Er wird")), ClauseType::V2);
        assert_eq!(ClauseChoice::V2.resolve(&toks("weil er")), ClauseType::V2);
    }

    #[test]
    fn edge_labels() {
        assert_eq!(EdgeSchema::Lexical.to_string(), "lex");
        assert_eq!(EdgeSchema::Trace { boundary: 3 }.to_string(), "trace@3");
        assert_eq!(
            EdgeSchema::Rule(Schema::FillerHead).to_string(),
            "filler-head"
        );
    }

    #[test]
    fn no_derivations_means_no_readings() {
        assert!(enumerate_readings(&[]).is_empty());
    }

    #[test]
    fn lexical_edges_start_at_their_comps_length() {
        let g = Arc::new(Grammar::german());
        let l = load_lexicon(&g, FRAGMENT).unwrap();
        let c = build_chart(&toks("er wird"), &l, &ParseOptions::default()).unwrap();
        for e in c.edges.iter().filter(|e| e.schema == EdgeSchema::Lexical) {
            assert_eq!(e.frontier, Info::of(&g, &e.sign).comps_items);
            assert_eq!(e.footprint, e.coverage());
        }
    }

    #[test]
    fn duplicate_edges_are_suppressed() {
        let g = Arc::new(Grammar::german());
        let l = load_lexicon(&g, FRAGMENT).unwrap();
        let c = build_chart(
            &toks("Vortragen wird er es morgen"),
            &l,
            &ParseOptions::default(),
        )
        .unwrap();
        for (i, a) in c.edges.iter().enumerate() {
            for b in &c.edges[i + 1..] {
                let same = a.coverage() == b.coverage()
                    && a.schema == b.schema
                    && a.daughters == b.daughters
                    && fs_equal(a.sign.fs(), b.sign.fs());
                assert!(!same, "edges {} and {} duplicate", a.id, b.id);
            }
        }
    }
}
