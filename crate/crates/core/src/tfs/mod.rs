//! Typed feature structures: type hierarchy, graph values, unification,
//! subsumption and the textual AVM syntax.

mod graph;
mod syntax;
mod types;
mod unify;

pub use graph::{fs_equal, subsumes, Content, FeatureStructure, Node, NodeId, Path, PathError};
pub use syntax::{print_fs, read_fs, read_signature, Pos, Printer, SyntaxError};
pub use types::{Feature, HierarchyError, TypeDecl, TypeHierarchy, TypeId, LIST, SET, TOP};
pub use unify::{unify, unify_at, UnifyError};

pub(crate) use syntax::{Builder, Cursor, Term, Tok};
pub(crate) use unify::{WId, Work};
