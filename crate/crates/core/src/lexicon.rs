//! Lexicon files and the stem-to-finite lexical rule.
//!
//! ```text
//! ; comment
//! (template NAME VALUE)            reusable value, referenced as @NAME
//! (entry "tok ..." VALUE)          ordinary entry; phon may span tokens
//! (stem "tok ..." "finite" VALUE)  stem plus its finite form
//! ```
//!
//! Stems are stored but not returned by [`Lexicon::lookup`]; their finite
//! forms are derived at load time by [`finitivize`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::grammar::{Grammar, Sign};
use crate::tfs::{
    fs_equal, Builder, Cursor, FeatureStructure, Pos, Printer, SyntaxError, Term, Tok, Work,
};

/// The shipped fragment lexicon.
pub const FRAGMENT: &str = include_str!("../grammar/fragment.lex");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LexiconError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{pos}: {msg}")]
    Malformed { pos: Pos, msg: String },
    #[error("{pos}: template `{name}` defined twice")]
    DuplicateTemplate { pos: Pos, name: String },
    #[error("{pos}: duplicate entry for \"{phon}\"")]
    Duplicate { pos: Pos, phon: String },
    #[error("lexical rule inapplicable: {0}")]
    Inapplicable(String),
}

#[derive(Clone, Debug)]
pub struct LexEntry {
    pub phon: Vec<String>,
    pub fs: FeatureStructure,
    pub stem: bool,
    pub finite_form: Option<Vec<String>>,
    /// Produced by the lexical rule rather than written in the file.
    pub derived: bool,
}

impl LexEntry {
    pub fn sign(&self, g: &Grammar, start: usize) -> Sign {
        Sign::lexical(g, self.fs.clone(), self.phon.clone(), start)
    }
}

#[derive(Clone, Debug)]
pub struct Lexicon {
    grammar: Arc<Grammar>,
    entries: Vec<LexEntry>,
    by_first: HashMap<String, Vec<usize>>,
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// Replaces the stem's subject: VFORM fin, HEAD|SUBJ empty, and COMPS the
/// stem's SUBJ items followed by its COMPS. Nodes shared with VCOMP stay
/// shared.
pub fn finitivize(g: &Grammar, stem: &LexEntry) -> Result<LexEntry, LexiconError> {
    let inapplicable =
        |m: &str| LexiconError::Inapplicable(format!("{}: {}", stem.phon.join(" "), m));
    if !stem.stem {
        return Err(inapplicable("not a stem"));
    }
    let finite = stem
        .finite_form
        .clone()
        .ok_or_else(|| inapplicable("no finite form"))?;
    let head_ty = stem
        .fs
        .path_get(&g.paths.head)
        .map(|h| h.root_type())
        .map_err(|_| inapplicable("no HEAD"))?;
    if !g
        .hierarchy
        .is_subtype(head_ty, g.hierarchy.type_id("verb").expect("verb"))
    {
        return Err(inapplicable("HEAD is not verb"));
    }
    let mut w = Work::new(&g.hierarchy);
    let root = w.embed(&stem.fs);
    let p = &g.paths;
    let head = w.path(root, &p.head).expect("checked above");
    let fin = w.var(g.hierarchy.type_id("fin").expect("fin"));
    match w.path(root, &p.vform) {
        Some(vform) => w
            .unify(vform, fin)
            .map_err(|_| inapplicable("VFORM clashes with fin"))?,
        None => w.set_feature(head, g.hierarchy.feature("vform").expect("vform"), fin),
    }
    let subj = w
        .path(root, &p.subj)
        .ok_or_else(|| inapplicable("no SUBJ"))?;
    let (items, None) = w
        .list_view(subj)
        .ok_or_else(|| inapplicable("SUBJ is not a list"))?
    else {
        return Err(inapplicable("SUBJ must be a closed list"));
    };
    let comps = w
        .path(root, &p.comps)
        .ok_or_else(|| inapplicable("no COMPS"))?;
    let new_comps = w.list(items, Some(comps));
    let empty = w.list(Vec::new(), None);
    let cat = w.path(root, &p.cat).expect("checked above");
    w.set_feature(head, g.hierarchy.feature("subj").expect("subj"), empty);
    w.set_feature(cat, g.hierarchy.feature("comps").expect("comps"), new_comps);
    let fs = w.finish(root).map_err(|e| inapplicable(&e.to_string()))?;
    Ok(LexEntry {
        phon: finite,
        fs,
        stem: false,
        finite_form: None,
        derived: true,
    })
}

/// Loads a lexicon. Every value is type-checked against the grammar's
/// hierarchy; errors carry line and column.
pub fn load_lexicon(g: &Arc<Grammar>, text: &str) -> Result<Lexicon, LexiconError> {
    let mut cur = Cursor::new(text)?;
    let mut templates: HashMap<String, Term> = HashMap::new();
    let mut lex = Lexicon {
        grammar: g.clone(),
        entries: Vec::new(),
        by_first: HashMap::new(),
    };
    let sign_ty = g.hierarchy.type_id("sign").expect("sign");
    while !cur.at_end() {
        cur.expect(Tok::LParen)?;
        let (kind, kpos) = cur.symbol()?;
        match kind.as_str() {
            "template" => {
                let (name, pos) = cur.symbol()?;
                let body = cur.term()?;
                cur.expect(Tok::RParen)?;
                if templates.insert(name.clone(), body).is_some() {
                    return Err(LexiconError::DuplicateTemplate { pos, name });
                }
            }
            "entry" | "stem" => {
                let (phon, ppos) = cur.string()?;
                let finite = if kind == "stem" {
                    Some(words(&cur.string()?.0))
                } else {
                    None
                };
                let body = cur.term()?;
                cur.expect(Tok::RParen)?;
                let phon = words(&phon);
                if phon.is_empty() || finite.as_ref().is_some_and(|f| f.is_empty()) {
                    return Err(LexiconError::Malformed {
                        pos: ppos,
                        msg: "empty phonology".into(),
                    });
                }
                let mut b = Builder::new(&g.hierarchy, &templates);
                let root = b.build(&body)?;
                let fs = b.work.finish(root).map_err(|source| SyntaxError::Unify {
                    pos: body.pos(),
                    source,
                })?;
                if !g.hierarchy.is_subtype(fs.root_type(), sign_ty) {
                    return Err(LexiconError::Malformed {
                        pos: body.pos(),
                        msg: "entry value must be a sign".into(),
                    });
                }
                let entry = LexEntry {
                    phon,
                    fs,
                    stem: finite.is_some(),
                    finite_form: finite,
                    derived: false,
                };
                let derived = if entry.stem {
                    Some(finitivize(g, &entry)?)
                } else {
                    None
                };
                lex.push(entry, ppos)?;
                if let Some(d) = derived {
                    lex.push(d, ppos)?;
                }
            }
            other => {
                return Err(LexiconError::Malformed {
                    pos: kpos,
                    msg: format!("unknown form `{}`", other),
                })
            }
        }
    }
    Ok(lex)
}

impl Lexicon {
    fn push(&mut self, e: LexEntry, pos: Pos) -> Result<(), LexiconError> {
        let clash = self
            .by_first
            .get(&e.phon[0])
            .into_iter()
            .flatten()
            .any(|&i| {
                let o = &self.entries[i];
                o.phon == e.phon && o.stem == e.stem && fs_equal(&o.fs, &e.fs)
            });
        if clash {
            return Err(LexiconError::Duplicate {
                pos,
                phon: e.phon.join(" "),
            });
        }
        self.by_first
            .entry(e.phon[0].clone())
            .or_default()
            .push(self.entries.len());
        self.entries.push(e);
        Ok(())
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-stem entries whose phonology matches `tokens` from `position`,
    /// as (token count, sign) pairs in file order.
    pub fn lookup(&self, tokens: &[String], position: usize) -> Vec<(usize, Sign)> {
        let Some(first) = tokens.get(position) else {
            return Vec::new();
        };
        self.by_first
            .get(first)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
            .filter(|e| !e.stem && tokens[position..].starts_with(&e.phon))
            .map(|e| (e.phon.len(), e.sign(&self.grammar, position)))
            .collect()
    }

    /// Entries with exactly this phonology, stems included.
    pub fn entries_for(&self, phon: &str) -> Vec<&LexEntry> {
        let phon = words(phon);
        self.entries.iter().filter(|e| e.phon == phon).collect()
    }

    /// Serializes the file-level entries (derived forms are regenerated on
    /// load).
    pub fn to_text(&self) -> String {
        let h = &self.grammar.hierarchy;
        let mut out = String::new();
        for e in self.entries.iter().filter(|e| !e.derived) {
            let body = Printer::new(h, &e.fs).pretty();
            match &e.finite_form {
                Some(f) => writeln!(
                    out,
                    "(stem \"{}\" \"{}\"\n  {})",
                    e.phon.join(" "),
                    f.join(" "),
                    body
                ),
                None => writeln!(out, "(entry \"{}\"\n  {})", e.phon.join(" "), body),
            }
            .expect("writing to a String");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grammar() -> Arc<Grammar> {
        Arc::new(Grammar::german())
    }

    const NP: &str = r#"
(template np (word :synsem (synsem :loc (local :cat (cat :head (noun :case #c case) :comps <> :vcomp none))
                                   :nonloc (nonloc :inher (inher :slash {})) :lex -)))
(entry "er" (word :synsem (synsem :loc (local :cat (cat :head (noun :case nom) :comps <> :vcomp none)) :lex -)))
(entry "seiner Tochter" (word :synsem (synsem :loc (local :cat (cat :head (noun :case dat) :comps <> :vcomp none)) :lex -)))
"#;

    #[test]
    fn empty_file_gives_empty_lexicon() {
        let l = load_lexicon(&grammar(), "; nothing here\n").unwrap();
        assert!(l.is_empty());
    }

    #[test]
    fn multiword_lookup() {
        let g = grammar();
        let l = load_lexicon(&g, NP).unwrap();
        let toks = words("er seiner Tochter");
        let hits = l.lookup(&toks, 1);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, 2);
        assert_eq!(hits[0].1.coverage().to_string(), "1-2");
        assert!(l.lookup(&toks, 2).is_empty());
        assert!(l.lookup(&words("sie"), 0).is_empty());
    }

    #[test]
    fn unknown_case_is_rejected_with_position() {
        let text = "(entry \"x\"\n  (word :synsem (synsem :loc (local :cat (cat :head (noun :case gen))))))";
        let err = load_lexicon(&grammar(), text).unwrap_err();
        let LexiconError::Syntax(e) = err else {
            panic!()
        };
        assert_eq!(e.pos().line, 2);
    }

    #[test]
    fn duplicates_are_rejected() {
        let text = format!("{}{}", NP, "(entry \"er\" (word :synsem (synsem :loc (local :cat (cat :head (noun :case nom) :comps <> :vcomp none)) :lex -)))");
        assert!(matches!(
            load_lexicon(&grammar(), &text),
            Err(LexiconError::Duplicate { .. })
        ));
    }

    #[test]
    fn fragment_derives_finite_auxiliaries() {
        let g = grammar();
        let l = load_lexicon(&g, FRAGMENT).unwrap();
        let wird = l.entries_for("wird");
        assert_eq!(wird.len(), 1);
        let text = Printer::new(&g.hierarchy, &wird[0].fs).to_string();
        let expect = crate::tfs::read_fs(
            &g.hierarchy,
            "(word :synsem (synsem :lex + :nonloc (nonloc :inher (inher :slash {})) \
               :loc (local :cat (cat :head (verb :vform fin :subj <>) \
                 :comps <#1 synsem . #2 list> \
                 :vcomp (synsem :lex + :loc (local :cat (cat :vcomp none :comps #2 \
                   :head (verb :vform bse :subj <#1>))))))))",
        )
        .unwrap();
        assert!(fs_equal(&wird[0].fs, &expect), "{}", text);
        assert_eq!(l.entries_for("werden").len(), 1);
        assert!(l.entries_for("werden")[0].stem);
        assert!(l.lookup(&words("werden"), 0).is_empty());
    }

    #[test]
    fn noun_cannot_be_finitivized() {
        let g = grammar();
        let l = load_lexicon(&g, NP).unwrap();
        let mut e = l.entries()[0].clone();
        assert!(finitivize(&g, &e).is_err());
        e.stem = true;
        e.finite_form = Some(words("x"));
        assert!(matches!(
            finitivize(&g, &e),
            Err(LexiconError::Inapplicable(_))
        ));
    }
}
