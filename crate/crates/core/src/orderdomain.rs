//! Word order domains.
//!
//! Every sign carries a domain: the sequence of elements whose serialization
//! is the surface string. Constituency and order are separate, so a
//! constituent may be discontinuous in its mother's domain. Parsing runs in
//! recognition mode: element positions come from the input, which makes the
//! sequence union deterministic given coverages.

use std::fmt;

use thiserror::Error;

use crate::grammar::{Grammar, Schema, Sign};
use crate::tfs::FeatureStructure;

/// Set of input positions, at most 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Coverage(u64);

pub const MAX_TOKENS: usize = 64;

impl Coverage {
    pub fn empty() -> Self {
        Coverage(0)
    }

    pub fn single(i: usize) -> Self {
        assert!(i < MAX_TOKENS, "position {} out of range", i);
        Coverage(1 << i)
    }

    /// Positions `start..end`.
    pub fn span(start: usize, end: usize) -> Self {
        (start..end).fold(Coverage::empty(), |c, i| c.union(Coverage::single(i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_TOKENS && self.0 & (1 << i) != 0
    }

    pub fn union(self, o: Coverage) -> Self {
        Coverage(self.0 | o.0)
    }

    pub fn without(self, o: Coverage) -> Self {
        Coverage(self.0 & !o.0)
    }

    pub fn is_disjoint(self, o: Coverage) -> bool {
        self.0 & o.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn max(self) -> Option<usize> {
        (!self.is_empty()).then(|| 63 - self.0.leading_zeros() as usize)
    }

    /// Empty coverage counts as contiguous.
    pub fn is_contiguous(self) -> bool {
        match (self.min(), self.max()) {
            (Some(a), Some(b)) => b - a + 1 == self.len(),
            _ => true,
        }
    }

    pub fn positions(self) -> impl Iterator<Item = usize> {
        (0..MAX_TOKENS).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Prints runs, e.g. `0-2,6`.
impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pos: Vec<usize> = self.positions().collect();
        let mut parts = Vec::new();
        let mut i = 0;
        while i < pos.len() {
            let mut j = i;
            while j + 1 < pos.len() && pos[j + 1] == pos[j] + 1 {
                j += 1;
            }
            parts.push(if i == j {
                pos[i].to_string()
            } else {
                format!("{}-{}", pos[i], pos[j])
            });
            i = j + 1;
        }
        if parts.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

/// Coarse category of a domain element, read off its synsem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Verb {
        finite: bool,
    },
    Complementizer,
    /// Adverbs and prepositional phrases.
    Modifier,
    Other,
}

/// Topological field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    VF,
    LB,
    MF,
    RB,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::VF => "VF",
            Field::LB => "LB",
            Field::MF => "MF",
            Field::RB => "RB",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClauseType {
    V2,
    VFinal,
}

#[derive(Clone, Debug)]
pub struct DomainElement {
    pub phon: Vec<String>,
    pub coverage: Coverage,
    pub synsem: FeatureStructure,
    pub kind: ElementKind,
    /// The compacted Vorfeld block produced when a filler is inserted.
    pub filler: bool,
}

impl PartialEq for DomainElement {
    fn eq(&self, o: &Self) -> bool {
        self.phon == o.phon
            && self.coverage == o.coverage
            && self.kind == o.kind
            && self.filler == o.filler
            && crate::tfs::fs_equal(&self.synsem, &o.synsem)
    }
}

impl DomainElement {
    pub fn new(
        g: &Grammar,
        phon: Vec<String>,
        coverage: Coverage,
        synsem: FeatureStructure,
    ) -> Self {
        assert_eq!(
            phon.len(),
            coverage.len(),
            "phon length must match coverage"
        );
        let kind = g.element_kind(&synsem);
        DomainElement {
            phon,
            coverage,
            synsem,
            kind,
            filler: false,
        }
    }

    pub fn is_verbal(&self) -> bool {
        matches!(self.kind, ElementKind::Verb { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("domain coverages overlap")]
    Overlap,
    #[error("cannot compact non-contiguous coverage {0}")]
    NonContiguous(Coverage),
    #[error("nothing to compact")]
    EmptyCompaction,
    #[error("filler has no material before the finite verb")]
    NoPreverbalMaterial,
    #[error("filler material after the finite verb must be a modifier")]
    NonModifierRemainder,
}

/// Ordered sequence of elements with pairwise disjoint coverage, sorted by
/// minimum position.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Domain(Vec<DomainElement>);

impl Domain {
    pub fn empty() -> Self {
        Domain(Vec::new())
    }

    pub fn single(e: DomainElement) -> Self {
        Domain(vec![e])
    }

    pub fn from_elements(mut elems: Vec<DomainElement>) -> Result<Self, DomainError> {
        elems.sort_by_key(|e| e.coverage.min());
        let mut seen = Coverage::empty();
        for e in &elems {
            if !seen.is_disjoint(e.coverage) {
                return Err(DomainError::Overlap);
            }
            seen = seen.union(e.coverage);
        }
        Ok(Domain(elems))
    }

    pub fn elements(&self) -> &[DomainElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coverage(&self) -> Coverage {
        self.0
            .iter()
            .fold(Coverage::empty(), |c, e| c.union(e.coverage))
    }

    /// Surface string in element order.
    pub fn phon(&self) -> Vec<String> {
        self.0.iter().flat_map(|e| e.phon.iter().cloned()).collect()
    }
}

/// Sequence union. In recognition mode the interleaving is fixed by the
/// coverages, so the result is unique.
pub fn domain_union(d1: &Domain, d2: &Domain) -> Result<Domain, DomainError> {
    if !d1.coverage().is_disjoint(d2.coverage()) {
        return Err(DomainError::Overlap);
    }
    let mut out = Vec::with_capacity(d1.len() + d2.len());
    let (mut i, mut j) = (0, 0);
    while i < d1.0.len() || j < d2.0.len() {
        let take_left = match (d1.0.get(i), d2.0.get(j)) {
            (Some(a), Some(b)) => a.coverage.min() < b.coverage.min(),
            (Some(_), None) => true,
            _ => false,
        };
        if take_left {
            out.push(d1.0[i].clone());
            i += 1;
        } else {
            out.push(d2.0[j].clone());
            j += 1;
        }
    }
    Ok(Domain(out))
}

/// Collapses elements into one element with concatenated phon. The union
/// of their coverages must be a contiguous range.
pub fn compact(
    g: &Grammar,
    elems: &[DomainElement],
    synsem: FeatureStructure,
) -> Result<DomainElement, DomainError> {
    if elems.is_empty() {
        return Err(DomainError::EmptyCompaction);
    }
    if elems.len() == 1 && crate::tfs::fs_equal(&elems[0].synsem, &synsem) {
        return Ok(elems[0].clone());
    }
    let mut cov = Coverage::empty();
    let mut toks: Vec<(usize, String)> = Vec::new();
    for e in elems {
        if !cov.is_disjoint(e.coverage) {
            return Err(DomainError::Overlap);
        }
        cov = cov.union(e.coverage);
        toks.extend(e.coverage.positions().zip(e.phon.iter().cloned()));
    }
    if !cov.is_contiguous() {
        return Err(DomainError::NonContiguous(cov));
    }
    toks.sort_by_key(|(p, _)| *p);
    Ok(DomainElement::new(
        g,
        toks.into_iter().map(|(_, t)| t).collect(),
        cov,
        synsem,
    ))
}

/// Inserts a filler into the domain of the clause that binds it. Filler
/// material before the finite verb is compacted into a single Vorfeld
/// element; modifiers after it (a stranded adjunct) join the clause domain
/// element by element.
pub fn insert_filler_domain(
    g: &Grammar,
    clause: &Domain,
    filler: &Sign,
    finite_verb_pos: usize,
) -> Result<Domain, DomainError> {
    if !clause.coverage().is_disjoint(filler.coverage()) {
        return Err(DomainError::Overlap);
    }
    let (pre, post): (Vec<_>, Vec<_>) = filler
        .dom()
        .elements()
        .iter()
        .cloned()
        .partition(|e| e.coverage.max().is_some_and(|m| m < finite_verb_pos));
    if pre.is_empty() {
        return Err(DomainError::NoPreverbalMaterial);
    }
    if post.iter().any(|e| e.kind != ElementKind::Modifier) {
        return Err(DomainError::NonModifierRemainder);
    }
    let mut vf = compact(g, &pre, filler.synsem(g))?;
    vf.filler = true;
    let mut rest = vec![vf];
    rest.extend(post);
    domain_union(clause, &Domain::from_elements(rest)?)
}

fn visit_nodes<'a>(s: &'a Sign, out: &mut Vec<&'a Sign>) {
    out.push(s);
    if let Some(d) = s.daughters() {
        for c in &d.signs {
            visit_nodes(c, out);
        }
    }
}

/// Assigns topological fields to the root domain, or `None` if the
/// linearization constraints are violated.
///
/// V2: exactly one element before the finite verb (the filler block when a
/// nonlocal dependency is bound at the root); verbal elements after the
/// finite verb form a contiguous suffix. Verb-final: complementizer first,
/// all verbs in one final block. In both, every verb cluster is contiguous
/// once the finite verb in second position is set aside, and embedded verbs
/// precede the verbs embedding them.
pub fn linearize(root: &Sign, clause: ClauseType) -> Option<Vec<Field>> {
    let els = root.dom().elements();
    let mut nodes = Vec::new();
    visit_nodes(root, &mut nodes);
    let binds_filler = nodes
        .iter()
        .any(|n| matches!(n.daughters().map(|d| d.schema), Some(Schema::FillerHead)));

    let rb_start = |from: usize| -> Option<usize> {
        let first = (from..els.len())
            .find(|&i| els[i].is_verbal())
            .unwrap_or(els.len());
        els[first..].iter().all(|e| e.is_verbal()).then_some(first)
    };

    let (fields, lb_pos) = match clause {
        ClauseType::V2 => {
            let finite: Vec<usize> = (0..els.len())
                .filter(|&i| els[i].kind == ElementKind::Verb { finite: true } && !els[i].filler)
                .collect();
            if finite.len() != 1 || finite[0] != 1 {
                return None;
            }
            if els[0].filler != binds_filler || (els[0].is_verbal() && !els[0].filler) {
                return None;
            }
            let rb = rb_start(2)?;
            let mut f = vec![Field::VF, Field::LB];
            f.extend((2..els.len()).map(|i| if i < rb { Field::MF } else { Field::RB }));
            (f, els[1].coverage)
        }
        ClauseType::VFinal => {
            if binds_filler || els.first()?.kind != ElementKind::Complementizer {
                return None;
            }
            let rb = rb_start(1)?;
            if rb == els.len() {
                return None;
            }
            let mut f = vec![Field::LB];
            f.extend((1..els.len()).map(|i| if i < rb { Field::MF } else { Field::RB }));
            (f, Coverage::empty())
        }
    };

    for n in &nodes {
        let Some(d) = n.daughters() else { continue };
        if d.schema != Schema::VerbCluster {
            continue;
        }
        if !n.coverage().without(lb_pos).is_contiguous() {
            return None;
        }
        let head = d.signs[0].coverage();
        let cluster = d.signs[1].coverage();
        if !lb_pos.is_empty() && !head.is_disjoint(lb_pos) {
            continue;
        }
        match (cluster.max(), head.min()) {
            (Some(c), Some(h)) if c > h => return None,
            _ => {}
        }
    }
    Some(fields)
}

pub fn lp_check(root: &Sign, clause: ClauseType) -> bool {
    linearize(root, clause).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_basics() {
        let c = Coverage::span(2, 5).union(Coverage::single(7));
        assert_eq!(c.to_string(), "2-4,7");
        assert_eq!(c.min(), Some(2));
        assert_eq!(c.max(), Some(7));
        assert!(!c.is_contiguous());
        assert!(Coverage::span(0, 3).is_contiguous());
        assert!(Coverage::empty().is_contiguous());
        assert_eq!(Coverage::empty().to_string(), "-");
    }
}
