//! Sign geometry and combination schemata.
//!
//! ```text
//! sign      [SYNSEM synsem, DTRS dtrs]           DTRS on phrasal signs only
//! synsem    [LOC local, NONLOC nonloc, LEX bool] LEX sits outside LOC
//! local     [CAT cat]
//! cat       [HEAD head, COMPS list, VCOMP synsem|none]
//! verb      [VFORM fin|bse, SUBJ list]
//! nonloc    [INHER [SLASH set]]
//! ```
//!
//! Daughter values inside the DTRS feature carry the daughters' SYNSEM
//! only; the full tree is reachable through [`Sign::daughters`].

mod schemata;
mod sign;

use std::collections::HashSet;

use thiserror::Error;

use crate::orderdomain::{DomainError, ElementKind};
use crate::tfs::{
    read_signature, Content, Feature, FeatureStructure, NodeId, Path, SyntaxError, TypeHierarchy,
    TypeId, UnifyError,
};

pub use schemata::{
    apply, apply_filler_head, apply_head_adjunct, apply_head_complement, apply_head_complement_at,
    apply_pvp_slash_introduction, apply_verb_cluster, check_comps_closed, make_vcomp_trace,
};
pub use sign::{Daughters, Schema, Sign, Slot};

pub const SIGNATURE: &str = include_str!("../../grammar/signature.tfs");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemaError {
    #[error("unification failed: {0}")]
    Unify(#[from] UnifyError),
    #[error("head has no complement left to saturate")]
    NothingToSaturate,
    #[error("complement slot {0} out of range")]
    BadSlot(usize),
    #[error("head's VCOMP must be saturated before complements")]
    VcompPending,
    #[error("head has no verbal complement (VCOMP none)")]
    NoVcomp,
    #[error("cluster daughter must be LEX +")]
    ClusterNotLex,
    #[error("licensing daughter carries a nonempty SLASH")]
    LicenserSlashed,
    #[error("daughters overlap in the input")]
    Overlap,
    #[error("more than one nonlocal dependency")]
    SlashOverflow,
    #[error("head has no SLASH element to bind")]
    NoSlash,
    #[error("filler is not the licensing daughter of the dependency")]
    LicenserMismatch,
    #[error("head is not a saturated finite clause")]
    NotFiniteClause,
    #[error("underspecified valence list in result")]
    OpenValence,
    #[error("adjunct has no MOD value")]
    NoMod,
    #[error("malformed sign: {0}")]
    Malformed(&'static str),
    #[error("traces are only available in trace mode")]
    TraceModeOnly,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("signature: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("signature lacks `{0}`")]
    Missing(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Schema-based SLASH introduction with a licensing daughter.
    #[default]
    Licensing,
    /// Verbal traces instead of the licensing schema.
    Trace,
}

#[derive(Clone, Debug)]
pub(crate) struct Feats {
    pub synsem: Feature,
    pub loc: Feature,
    pub nonloc: Feature,
    pub lex: Feature,
    pub cat: Feature,
    pub head: Feature,
    pub comps: Feature,
    pub vcomp: Feature,
    pub inher: Feature,
    pub slash: Feature,
    pub vform: Feature,
    pub subj: Feature,
    pub mod_: Feature,
    pub dtrs: Feature,
    pub head_dtr: Feature,
    pub comp_dtrs: Feature,
    pub adj_dtr: Feature,
    pub cluster_dtr: Feature,
    pub vcomp_dtr: Feature,
    pub filler_dtr: Feature,
}

#[derive(Clone, Debug)]
pub(crate) struct Types {
    pub trace: TypeId,
    pub phrasal: TypeId,
    pub synsem: TypeId,
    pub none: TypeId,
    pub local: TypeId,
    pub cat: TypeId,
    pub nonloc: TypeId,
    pub inher: TypeId,
    pub plus: TypeId,
    pub minus: TypeId,
    pub verb: TypeId,
    pub comp: TypeId,
    pub modifier: TypeId,
    pub fin: TypeId,
    pub head_comp: TypeId,
    pub head_adj: TypeId,
    pub head_cluster: TypeId,
    pub slash_licencing: TypeId,
    pub filler_head: TypeId,
}

/// Paths used throughout, relative to a sign.
#[derive(Clone, Debug)]
pub struct Paths {
    pub synsem: Path,
    pub loc: Path,
    pub cat: Path,
    pub head: Path,
    pub comps: Path,
    pub vcomp: Path,
    pub vcomp_loc: Path,
    pub subj: Path,
    pub vform: Path,
    pub lex: Path,
    pub slash: Path,
    pub mod_: Path,
}

/// The signature plus the feature geometry the schemata rely on.
#[derive(Clone, Debug)]
pub struct Grammar {
    pub hierarchy: TypeHierarchy,
    pub paths: Paths,
    pub(crate) f: Feats,
    pub(crate) t: Types,
}

impl Grammar {
    /// The shipped German fragment signature.
    pub fn german() -> Self {
        Self::from_signature(SIGNATURE).expect("shipped signature is well-formed")
    }

    pub fn from_signature(text: &str) -> Result<Self, GrammarError> {
        let h = read_signature(text)?;
        let feat = |n: &str| {
            h.feature(n)
                .map_err(|_| GrammarError::Missing(n.to_string()))
        };
        let ty = |n: &str| {
            h.type_id(n)
                .map_err(|_| GrammarError::Missing(n.to_string()))
        };
        let f = Feats {
            synsem: feat("synsem")?,
            loc: feat("loc")?,
            nonloc: feat("nonloc")?,
            lex: feat("lex")?,
            cat: feat("cat")?,
            head: feat("head")?,
            comps: feat("comps")?,
            vcomp: feat("vcomp")?,
            inher: feat("inher")?,
            slash: feat("slash")?,
            vform: feat("vform")?,
            subj: feat("subj")?,
            mod_: feat("mod")?,
            dtrs: feat("dtrs")?,
            head_dtr: feat("head-dtr")?,
            comp_dtrs: feat("comp-dtrs")?,
            adj_dtr: feat("adj-dtr")?,
            cluster_dtr: feat("cluster-dtr")?,
            vcomp_dtr: feat("vcomp-dtr")?,
            filler_dtr: feat("filler-dtr")?,
        };
        let t = Types {
            trace: ty("trace")?,
            phrasal: ty("phrasal-sign")?,
            synsem: ty("synsem")?,
            none: ty("none")?,
            local: ty("local")?,
            cat: ty("cat")?,
            nonloc: ty("nonloc")?,
            inher: ty("inher")?,
            plus: ty("+")?,
            minus: ty("-")?,
            verb: ty("verb")?,
            comp: ty("comp")?,
            modifier: ty("modifier")?,
            fin: ty("fin")?,
            head_comp: ty("head-comp-struc")?,
            head_adj: ty("head-adj-struc")?,
            head_cluster: ty("head-cluster-structure")?,
            slash_licencing: ty("complement-slash-licencing-structure")?,
            filler_head: ty("filler-head-struc")?,
        };
        let p = |fs: &[Feature]| Path(fs.to_vec());
        let cat = [f.synsem, f.loc, f.cat];
        let paths = Paths {
            synsem: p(&[f.synsem]),
            loc: p(&[f.synsem, f.loc]),
            cat: p(&cat),
            head: p(&[f.synsem, f.loc, f.cat, f.head]),
            comps: p(&[f.synsem, f.loc, f.cat, f.comps]),
            vcomp: p(&[f.synsem, f.loc, f.cat, f.vcomp]),
            vcomp_loc: p(&[f.synsem, f.loc, f.cat, f.vcomp, f.loc]),
            subj: p(&[f.synsem, f.loc, f.cat, f.head, f.subj]),
            vform: p(&[f.synsem, f.loc, f.cat, f.head, f.vform]),
            lex: p(&[f.synsem, f.lex]),
            slash: p(&[f.synsem, f.nonloc, f.inher, f.slash]),
            mod_: p(&[f.synsem, f.loc, f.cat, f.head, f.mod_]),
        };
        Ok(Grammar {
            hierarchy: h,
            paths,
            f,
            t,
        })
    }

    pub fn path(&self, text: &str) -> Result<Path, crate::tfs::HierarchyError> {
        Path::parse(&self.hierarchy, text)
    }

    pub(crate) fn is_a(&self, t: TypeId, sup: TypeId) -> bool {
        self.hierarchy.is_subtype(t, sup)
    }

    /// Category of a domain element, from the synsem it was built from.
    pub fn element_kind(&self, synsem: &FeatureStructure) -> ElementKind {
        let head = Path(vec![self.f.loc, self.f.cat, self.f.head]);
        let Ok(h) = synsem.path_get(&head) else {
            return ElementKind::Other;
        };
        if self.is_a(h.root_type(), self.t.verb) {
            let finite = h
                .get_node(h.root(), self.f.vform)
                .is_some_and(|v| self.is_a(h.node(v).ty, self.t.fin));
            ElementKind::Verb { finite }
        } else if self.is_a(h.root_type(), self.t.comp) {
            ElementKind::Complementizer
        } else if self.is_a(h.root_type(), self.t.modifier) {
            ElementKind::Modifier
        } else {
            ElementKind::Other
        }
    }

    /// Every COMPS and SUBJ list reachable in `fs` is closed, except lists
    /// whose open tail is still tied to a pending verbal complement
    /// (argument attraction not yet resolved).
    pub fn valence_closed(&self, fs: &FeatureStructure) -> bool {
        let mut exempt: HashSet<NodeId> = HashSet::new();
        if let Ok(v) = fs.resolve(&self.paths.vcomp) {
            if self.is_a(fs.node(v).ty, self.t.synsem) {
                exempt.extend(fs.at(v).reachable());
            }
        }
        for n in fs.reachable() {
            for f in [self.f.comps, self.f.subj] {
                let Some(v) = fs.get_node(n, f) else { continue };
                let open_tail = match &fs.node(v).content {
                    Content::List { tail, .. } => *tail,
                    Content::Avm(fs) if fs.is_empty() => Some(v),
                    _ => None,
                };
                if let Some(t) = open_tail {
                    if !exempt.contains(&t) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_signature_loads() {
        let g = Grammar::german();
        assert!(g.hierarchy.len() > 30);
        let h = &g.hierarchy;
        assert_eq!(h.glb_by_name("dat", "acc").unwrap(), None);
        assert_eq!(h.glb_by_name("head", "verb").unwrap(), Some("verb"));
        assert!(h.is_appropriate(h.type_id("synsem").unwrap(), h.feature("lex").unwrap()));
        assert!(!h.is_appropriate(h.type_id("local").unwrap(), h.feature("lex").unwrap()));
    }
}
