//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use pvp_cli::corpus::{parse_corpus, CorpusLine, Verdict};
use pvp_cli::report::run_corpus;
use pvp_cli::tokenize;
use pvp_core::grammar::{
    apply_pvp_slash_introduction, apply_verb_cluster, Grammar, Mode, Schema, SchemaError,
};
use pvp_core::lexicon::{load_lexicon, Lexicon, FRAGMENT};
use pvp_core::parser::{
    build_chart, chart_report, demonstrate_trace_mode, parse, Chart, EdgeSchema, ParseOptions,
};
use pvp_core::tfs::{
    fs_equal, print_fs, read_fs, read_signature, subsumes, unify, FeatureStructure, TypeHierarchy,
};

const MAX_SENTENCE: Duration = Duration::from_secs(1);
const MAX_SUITE: Duration = Duration::from_secs(30);
const TRACE_EDGE_LIMIT: usize = 10_000;
const MAX_TRACE_DEMO: Duration = Duration::from_secs(10);
const PROPERTY_CASES: u32 = 1000;

const PROFILE: &[(&str, &str)] = &[
    ("OK", "Erzählen wird er seiner Tochter ein Märchen"),
    ("OK", "Erzählen müssen wird er seiner Tochter ein Märchen"),
    ("OK=1", "Er wird seiner Tochter ein Märchen erzählen müssen"),
    ("OK", "Seiner Tochter ein Märchen erzählen wird er"),
    ("OK", "Ein Märchen erzählen wird er seiner Tochter"),
    ("OK", "Ein Märchen erzählen wird er seiner Tochter müssen"),
    ("OK", "Seiner Tochter erzählen wird er das Märchen"),
    (
        "OK",
        "Den Kanzlerkandidaten ermorden wollte die Frau mit diesem Messer",
    ),
    ("BAD", "Müssen wird er ihr ein Märchen erzählen"),
    ("OK", "weil er ihr ein Märchen erzählen müssen wird"),
    ("OK", "weil er ihm ein Märchen erzählen lassen hat"),
    ("OK", "Vortragen wird er es morgen"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn lexicon() -> Lexicon {
    load_lexicon(&Arc::new(Grammar::german()), FRAGMENT).expect("fragment loads")
}

fn corpus_lines() -> Vec<CorpusLine> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/pvp.corpus");
    let text = fs::read_to_string(path).expect("shipped corpus");
    parse_corpus(&text).expect("shipped corpus parses")
}

fn charts(l: &Lexicon) -> Vec<(Vec<String>, Chart)> {
    PROFILE
        .iter()
        .map(|(_, s)| {
            let t = tokenize(s);
            let c = build_chart(&t, l, &ParseOptions::default()).expect("chart");
            (t, c)
        })
        .collect()
}

fn corpus_verdicts(l: &Lexicon) -> Outcome {
    let lines = corpus_lines();
    let shipped: Vec<(String, Vec<String>)> = lines
        .iter()
        .map(|c| (c.verdict.to_string(), c.tokens()))
        .collect();
    let pinned: Vec<(String, Vec<String>)> = PROFILE
        .iter()
        .map(|(v, s)| (v.parse::<Verdict>().unwrap().to_string(), tokenize(s)))
        .collect();
    if shipped != pinned {
        return outcome(
            false,
            "shipped corpus differs from the pinned profile".into(),
        );
    }
    let r = run_corpus(&lines, l, &ParseOptions::default());
    let slowest = r
        .outcomes
        .iter()
        .map(|o| o.elapsed)
        .max()
        .unwrap_or_default();
    let failed: Vec<String> = r
        .outcomes
        .iter()
        .filter(|o| !o.pass)
        .map(|o| format!("line {} ({} vs {:?})", o.line, o.verdict, o.parses))
        .collect();
    let pass = failed.is_empty() && slowest < MAX_SENTENCE && r.elapsed < MAX_SUITE;
    outcome(
        pass,
        format!(
            "{}/{} verdicts, slowest {:.1} ms (< {} ms), suite {:.1} ms (< {} ms){}",
            r.passed(),
            r.outcomes.len(),
            slowest.as_secs_f64() * 1e3,
            MAX_SENTENCE.as_millis(),
            r.elapsed.as_secs_f64() * 1e3,
            MAX_SUITE.as_millis(),
            if failed.is_empty() {
                String::new()
            } else {
                format!("; failed: {}", failed.join(", "))
            }
        ),
    )
}

fn underspecified_comps(l: &Lexicon) -> Outcome {
    let t = tokenize(PROFILE[0].1);
    let start = Instant::now();
    let trace = demonstrate_trace_mode(&t, l, TRACE_EDGE_LIMIT).expect("trace report");
    let opts = ParseOptions {
        mode: Mode::Licensing,
        edge_limit: TRACE_EDGE_LIMIT,
        ..ParseOptions::default()
    };
    let lic = chart_report(&t, l, &opts).expect("licensing report");
    let elapsed = start.elapsed();
    let pass = trace.limit_hit
        && trace.open_valence_edges >= 1
        && trace.sample.is_some()
        && !lic.limit_hit
        && lic.open_valence_edges == 0
        && lic.parses >= 1
        && elapsed < MAX_TRACE_DEMO;
    outcome(
        pass,
        format!(
            "trace: limit {} hit={} open={}; licensing: edges={} hit={} open={} parses={}; {:.2} s (< {} s)",
            TRACE_EDGE_LIMIT,
            trace.limit_hit,
            trace.open_valence_edges,
            lic.edges,
            lic.limit_hit,
            lic.open_valence_edges,
            lic.parses,
            elapsed.as_secs_f64(),
            MAX_TRACE_DEMO.as_secs()
        ),
    )
}

const SIG: &str = "
(deftype s () (f g h))
(deftype s1 (s) ())
(deftype s2 (s) ())
(deftype s12 (s1 s2) ())
(deftype x () ())
(deftype x1 (x) ())
(deftype x2 (x) ())
";

const ATOMS: &[&str] = &["*top*", "x", "x1", "x2", "s", "s1", "s2", "s12"];
const AVM_TYPES: &[&str] = &["s", "s1", "s2", "s12"];

fn value() -> impl Strategy<Value = String> {
    let tag = prop_oneof![3 => Just(None), 1 => (1u8..4).prop_map(Some)];
    let tagged = |t: Option<u8>, b: String| match t {
        Some(n) => format!("#{} {}", n, b),
        None => b,
    };
    let leaf =
        (tag.clone(), prop::sample::select(ATOMS)).prop_map(move |(t, a)| tagged(t, a.into()));
    leaf.prop_recursive(3, 24, 3, move |inner| {
        let avm = (
            tag.clone(),
            prop::sample::select(AVM_TYPES),
            prop::option::of(inner.clone()),
            prop::option::of(inner.clone()),
            prop::option::of(inner.clone()),
        )
            .prop_map(move |(t, ty, f, g, h)| {
                let mut s = format!("({}", ty);
                for (k, v) in [("f", f), ("g", g), ("h", h)] {
                    if let Some(v) = v {
                        s.push_str(&format!(" :{} {}", k, v));
                    }
                }
                s.push(')');
                tagged(t, s)
            });
        let list = (prop::collection::vec(inner.clone(), 0..3), any::<bool>()).prop_map(
            |(items, open)| format!("<{}{}>", items.join(" "), if open { " . list" } else { "" }),
        );
        let set = prop::option::of(inner).prop_map(|e| format!("{{{}}}", e.unwrap_or_default()));
        prop_oneof![3 => avm, 1 => list, 1 => set]
    })
}

fn structure(h: &Arc<TypeHierarchy>) -> impl Strategy<Value = FeatureStructure> {
    let h = h.clone();
    value().prop_filter_map("ill-formed", move |t| read_fs(&h, &t).ok())
}

fn check<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&strategy, test)
        .map_err(|e| format!("{}: {}", name, e))
}

fn unification_properties() -> Outcome {
    let h = Arc::new(read_signature(SIG).expect("signature"));
    let st = || structure(&h);
    let same = |x: Result<FeatureStructure, _>, y: Result<FeatureStructure, _>| match (x, y) {
        (Ok(a), Ok(b)) => fs_equal(&a, &b),
        (Err(_), Err(_)) => true,
        _ => false,
    };
    let results = [
        check("commutativity", (st(), st()), |(a, b)| {
            prop_assert!(same(unify(&h, &a, &b), unify(&h, &b, &a)));
            Ok(())
        }),
        check("idempotence", st(), |a| {
            prop_assert!(fs_equal(&unify(&h, &a, &a).unwrap(), &a));
            Ok(())
        }),
        check("monotonicity", (st(), st()), |(a, b)| {
            if let Ok(u) = unify(&h, &a, &b) {
                prop_assert!(subsumes(&h, &a, &u) && subsumes(&h, &b, &u));
            }
            Ok(())
        }),
        check("associativity", (st(), st(), st()), |(a, b, c)| {
            let l = unify(&h, &a, &b).and_then(|ab| unify(&h, &ab, &c));
            let r = unify(&h, &b, &c).and_then(|bc| unify(&h, &a, &bc));
            prop_assert!(same(l, r));
            Ok(())
        }),
        check("round trip", st(), |a| {
            let back = read_fs(&h, &print_fs(&h, &a)).unwrap();
            prop_assert!(fs_equal(&a, &back));
            Ok(())
        }),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "commutativity, idempotence, monotonicity, associativity, round trip: {} cases each, 0 failures",
                PROPERTY_CASES
            )
        } else {
            failures.join("; ")
        },
    )
}

fn schema_contracts(g: &Grammar, charts: &[(Vec<String>, Chart)]) -> Outcome {
    let h = &g.hierarchy;
    let ty = |fs: &FeatureStructure, p| {
        fs.path_get(p)
            .map(|v| h.type_name(v.root_type()).to_string())
            .unwrap_or_default()
    };
    let mut problems = Vec::new();
    let (mut clusters, mut intros, mut lex_minus_intros, mut pairs) = (0, 0, 0, 0);
    for (t, c) in charts {
        for e in &c.edges {
            let fs = e.sign.fs();
            match e.schema {
                EdgeSchema::Rule(Schema::VerbCluster) => {
                    clusters += 1;
                    let closed = fs
                        .path_get(&g.paths.comps)
                        .ok()
                        .and_then(|c| c.list_view())
                        .is_some_and(|(_, open)| !open);
                    if ty(fs, &g.paths.lex) != "+" || ty(fs, &g.paths.vcomp) != "none" || !closed {
                        problems.push(format!("cluster edge {} of {:?}", e.id, t.join(" ")));
                    }
                    let dtr = c.edge(e.daughters[1]).sign.fs();
                    if ty(dtr, &g.paths.lex) == "-" {
                        problems.push(format!("LEX - cluster daughter at edge {}", e.id));
                    }
                }
                EdgeSchema::Rule(Schema::PvpSlashIntroduction) => {
                    intros += 1;
                    let head = c.edge(e.daughters[0]);
                    let lic = c.edge(e.daughters[1]);
                    if e.sign.dom() != head.sign.dom() {
                        problems.push(format!("slash intro edge {} alters DOM", e.id));
                    }
                    if ty(lic.sign.fs(), &g.paths.lex) == "-" {
                        lex_minus_intros += 1;
                        pairs += 1;
                        match apply_verb_cluster(g, &head.sign, &lic.sign) {
                            Err(SchemaError::ClusterNotLex) => {}
                            other => problems.push(format!(
                                "cluster on LEX - licenser at edge {}: {:?}",
                                e.id,
                                other.map(|_| ())
                            )),
                        }
                        if apply_pvp_slash_introduction(g, &head.sign, &lic.sign).is_err() {
                            problems.push(format!("slash intro not reproducible at {}", e.id));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    if clusters == 0 || intros == 0 || lex_minus_intros == 0 {
        problems.push("corpus does not exercise both schemata".into());
    }
    outcome(
        problems.is_empty(),
        format!(
            "{} cluster edges, {} slash-introduction edges ({} with LEX - licenser, {} asymmetry pairs){}",
            clusters,
            intros,
            lex_minus_intros,
            pairs,
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems.join("; "))
            }
        ),
    )
}

fn linearization(l: &Lexicon, charts: &[(Vec<String>, Chart)]) -> Outcome {
    let g = l.grammar();
    let mut problems = Vec::new();
    let (mut roots, mut edges, mut exceptions) = (0, 0, 0);
    for (t, c) in charts {
        for r in c.roots(g) {
            roots += 1;
            if c.edge(r).sign.dom().phon() != *t {
                problems.push(format!("root {} of {:?} misspells input", r, t.join(" ")));
            }
        }
        for e in &c.edges {
            edges += 1;
            let kids: Vec<_> = e.daughters.iter().map(|&d| c.edge(d).coverage()).collect();
            let ok = e.coverage() == e.sign.coverage()
                && match e.schema {
                    EdgeSchema::Rule(Schema::PvpSlashIntroduction) => {
                        exceptions += 1;
                        e.coverage() == kids[0] && kids[0].is_disjoint(kids[1])
                    }
                    EdgeSchema::Rule(_) => {
                        kids[0].is_disjoint(kids[1]) && e.coverage() == kids[0].union(kids[1])
                    }
                    _ => kids.is_empty(),
                };
            if !ok {
                problems.push(format!("coverage at edge {} of {:?}", e.id, t.join(" ")));
            }
        }
    }
    outcome(
        problems.is_empty() && roots > 0,
        format!(
            "{} roots spell their input, {} edges conserve coverage ({} slash-introduction exceptions checked){}",
            roots,
            edges,
            exceptions,
            if problems.is_empty() {
                String::new()
            } else {
                format!("; {}", problems.join("; "))
            }
        ),
    )
}

fn replay(l: &Lexicon) -> Outcome {
    let g = l.grammar();
    let mut problems = Vec::new();
    let mut n = 0;
    for (_, s) in PROFILE {
        let r = parse(&tokenize(s), l, &ParseOptions::default()).expect("parse");
        for d in &r.derivations {
            n += 1;
            if let Err(e) = d.replay(g) {
                problems.push(e);
            }
        }
    }
    outcome(
        problems.is_empty() && n > 0,
        format!(
            "{} derivations replayed, {} divergences {}",
            n,
            problems.len(),
            problems.join("; ")
        ),
    )
}

fn main() -> ExitCode {
    let l = lexicon();
    let charts = charts(&l);
    let criteria: Vec<(&str, Outcome)> = vec![
        ("corpus verdicts", corpus_verdicts(&l)),
        (
            "underspecified COMPS reproduction",
            underspecified_comps(&l),
        ),
        ("unification properties", unification_properties()),
        ("schema contracts", schema_contracts(l.grammar(), &charts)),
        ("linearization and coverage", linearization(&l, &charts)),
        ("derivation replay", replay(&l)),
    ];
    let mut ok = true;
    for (i, (name, o)) in criteria.iter().enumerate() {
        ok &= o.pass;
        println!(
            "[{}] {} {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail.trim_end()
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
