use std::fmt;
use std::sync::Arc;

use crate::orderdomain::{Coverage, Domain, DomainElement};
use crate::tfs::{fs_equal, FeatureStructure};

use super::Grammar;

/// Which complement a head-complement step saturates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Index(usize),
    /// Extends an open COMPS tail by one element (trace mode only).
    Extend,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Schema {
    HeadComplement { slot: Slot },
    HeadAdjunct,
    VerbCluster,
    PvpSlashIntroduction,
    FillerHead,
}

impl Schema {
    pub fn label(&self) -> String {
        match self {
            Schema::HeadComplement {
                slot: Slot::Index(i),
            } => format!("head-comp[{}]", i),
            Schema::HeadComplement { slot: Slot::Extend } => "head-comp[+]".to_string(),
            Schema::HeadAdjunct => "head-adj".to_string(),
            Schema::VerbCluster => "verb-cluster".to_string(),
            Schema::PvpSlashIntroduction => "pvp-slash-intro".to_string(),
            Schema::FillerHead => "filler-head".to_string(),
        }
    }
}

/// Daughters in schema order: head first, except filler-head, which is
/// (filler, head). For slash introduction the second daughter is the
/// licenser.
#[derive(Clone, Debug)]
pub struct Daughters {
    pub schema: Schema,
    pub signs: Vec<Arc<Sign>>,
}

#[derive(Clone)]
pub struct Sign {
    pub(crate) fs: FeatureStructure,
    pub(crate) dom: Domain,
    pub(crate) dtrs: Option<Daughters>,
    /// Licensing daughter of an introduced, still unbound SLASH element.
    pub(crate) licenser: Option<Arc<Sign>>,
}

impl fmt::Debug for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sign")
            .field("phon", &self.dom.phon())
            .field("coverage", &self.coverage())
            .field("schema", &self.dtrs.as_ref().map(|d| d.schema))
            .finish()
    }
}

impl Sign {
    /// A lexical sign spanning `start..start + phon.len()`.
    pub fn lexical(g: &Grammar, fs: FeatureStructure, phon: Vec<String>, start: usize) -> Self {
        let cov = Coverage::span(start, start + phon.len());
        let synsem = fs
            .path_get(&g.paths.synsem)
            .unwrap_or_else(|_| FeatureStructure::top(&g.hierarchy));
        let dom = Domain::single(DomainElement::new(g, phon, cov, synsem));
        Sign {
            fs,
            dom,
            dtrs: None,
            licenser: None,
        }
    }

    pub fn fs(&self) -> &FeatureStructure {
        &self.fs
    }

    pub fn dom(&self) -> &Domain {
        &self.dom
    }

    pub fn daughters(&self) -> Option<&Daughters> {
        self.dtrs.as_ref()
    }

    pub fn licenser(&self) -> Option<&Arc<Sign>> {
        self.licenser.as_ref()
    }

    pub fn coverage(&self) -> Coverage {
        self.dom.coverage()
    }

    /// Coverage plus the coverage held by a pending licenser.
    pub fn footprint(&self) -> Coverage {
        match &self.licenser {
            Some(l) => self.coverage().union(l.footprint()),
            None => self.coverage(),
        }
    }

    pub fn synsem(&self, g: &Grammar) -> FeatureStructure {
        self.fs
            .path_get(&g.paths.synsem)
            .expect("signs always carry SYNSEM")
    }

    pub fn is_lexical(&self) -> bool {
        self.dtrs.is_none()
    }

    /// Same AVM, domain, schema and daughter identities.
    pub fn same_as(&self, o: &Sign) -> bool {
        let same_dtrs = match (&self.dtrs, &o.dtrs) {
            (None, None) => true,
            (Some(a), Some(b)) => {
                a.schema == b.schema
                    && a.signs.len() == b.signs.len()
                    && a.signs.iter().zip(&b.signs).all(|(x, y)| Arc::ptr_eq(x, y))
            }
            _ => false,
        };
        let same_lic = match (&self.licenser, &o.licenser) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        };
        same_dtrs && same_lic && self.dom == o.dom && fs_equal(&self.fs, &o.fs)
    }
}
