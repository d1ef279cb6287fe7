use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::types::{Feature, HierarchyError, TypeHierarchy, TypeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub(crate) fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    /// Feature map, sorted by feature id. Empty for atoms and variables.
    Avm(Box<[(Feature, NodeId)]>),
    /// `tail == None` is a closed list; otherwise the tail is an unbound
    /// list variable (lists are always flattened on construction).
    List {
        items: Box<[NodeId]>,
        tail: Option<NodeId>,
    },
    /// Sets hold at most one element.
    Set(Option<NodeId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub ty: TypeId,
    pub content: Content,
}

/// An immutable rooted typed feature graph. Reentrancy is node sharing.
///
/// Cloning is cheap; substructures returned by [`FeatureStructure::path_get`]
/// share the node arena with their parent.
#[derive(Clone, Debug)]
pub struct FeatureStructure {
    pub(crate) nodes: Arc<[Node]>,
    pub(crate) root: NodeId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("feature `{feature}` undefined at step {step}")]
    Undefined { feature: String, step: usize },
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// A sequence of features, written `SYNSEM|LOC|CAT`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Path(pub Vec<Feature>);

impl Path {
    pub fn empty() -> Self {
        Path(Vec::new())
    }

    /// Resolves a `|`-separated path against the hierarchy's feature names.
    pub fn parse(h: &TypeHierarchy, text: &str) -> Result<Self, HierarchyError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Path::empty());
        }
        text.split('|')
            .map(|f| h.feature(f.trim()))
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }
}

impl FeatureStructure {
    pub(crate) fn from_parts(nodes: Vec<Node>, root: NodeId) -> Self {
        FeatureStructure {
            nodes: nodes.into(),
            root,
        }
    }

    /// A single node of type `*top*` with no features.
    pub fn top(h: &TypeHierarchy) -> Self {
        Self::atom(h.top())
    }

    pub fn atom(ty: TypeId) -> Self {
        Self::from_parts(
            vec![Node {
                ty,
                content: Content::Avm(Box::new([])),
            }],
            NodeId(0),
        )
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.idx()]
    }

    pub fn root_type(&self) -> TypeId {
        self.node(self.root).ty
    }

    pub fn content(&self) -> &Content {
        &self.node(self.root).content
    }

    pub(crate) fn at(&self, id: NodeId) -> Self {
        FeatureStructure {
            nodes: self.nodes.clone(),
            root: id,
        }
    }

    pub fn get_node(&self, id: NodeId, f: Feature) -> Option<NodeId> {
        match &self.node(id).content {
            Content::Avm(fs) => fs
                .binary_search_by_key(&f, |(k, _)| *k)
                .ok()
                .map(|i| fs[i].1),
            _ => None,
        }
    }

    pub fn resolve(&self, path: &Path) -> Result<NodeId, PathError> {
        let mut cur = self.root;
        for (step, f) in path.0.iter().enumerate() {
            cur = self.get_node(cur, *f).ok_or_else(|| PathError::Undefined {
                feature: format!("{:?}", f),
                step,
            })?;
        }
        Ok(cur)
    }

    /// Substructure at `path`. Shares the arena, so node identity with the
    /// parent structure is preserved.
    pub fn path_get(&self, path: &Path) -> Result<Self, PathError> {
        self.resolve(path).map(|id| self.at(id))
    }

    /// Convenience: resolve `text` against `h` and fetch.
    pub fn get(&self, h: &TypeHierarchy, text: &str) -> Result<Self, PathError> {
        let p = Path::parse(h, text)?;
        self.path_get(&p).map_err(|e| match e {
            PathError::Undefined { step, .. } => PathError::Undefined {
                feature: text.split('|').nth(step).unwrap_or("").trim().to_string(),
                step,
            },
            other => other,
        })
    }

    /// True when both paths lead to the same node.
    pub fn same_node(&self, a: &Path, b: &Path) -> bool {
        match (self.resolve(a), self.resolve(b)) {
            (Ok(x), Ok(y)) => x == y,
            _ => false,
        }
    }

    /// List items and open tail, or `None` if the root is not a list.
    /// A bare variable counts as an open list with no known prefix.
    pub fn list_view(&self) -> Option<(Vec<FeatureStructure>, bool)> {
        match &self.node(self.root).content {
            Content::List { items, tail } => {
                Some((items.iter().map(|&i| self.at(i)).collect(), tail.is_some()))
            }
            Content::Avm(fs) if fs.is_empty() => Some((Vec::new(), true)),
            _ => None,
        }
    }

    /// Elements of a set value, or `None` if the root is not a set.
    pub fn set_view(&self) -> Option<Vec<FeatureStructure>> {
        match &self.node(self.root).content {
            Content::Set(e) => Some(e.iter().map(|&i| self.at(i)).collect()),
            _ => None,
        }
    }

    /// Nodes reachable from the root, in depth-first order.
    pub fn reachable(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(n) = stack.pop() {
            if std::mem::replace(&mut seen[n.idx()], true) {
                continue;
            }
            out.push(n);
            match &self.node(n).content {
                Content::Avm(fs) => stack.extend(fs.iter().rev().map(|(_, v)| *v)),
                Content::List { items, tail } => {
                    stack.extend(tail.iter().copied());
                    stack.extend(items.iter().rev().copied());
                }
                Content::Set(e) => stack.extend(e.iter().copied()),
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.reachable().len()
    }
}

fn is_list(n: &Node) -> bool {
    matches!(n.content, Content::List { .. })
}

/// Structural equality up to node renaming: types, features, list shape and
/// the reentrancy pattern must coincide. List nodes are values: two lists
/// with identical elements and tail are the same list whether or not the
/// graph shares the list node itself.
pub fn fs_equal(a: &FeatureStructure, b: &FeatureStructure) -> bool {
    let mut fwd: HashMap<NodeId, NodeId> = HashMap::new();
    let mut bwd: HashMap<NodeId, NodeId> = HashMap::new();
    let mut stack = vec![(a.root, b.root)];
    while let Some((x, y)) = stack.pop() {
        let nx = a.node(x);
        let ny = b.node(y);
        if !is_list(nx) || !is_list(ny) {
            match (fwd.get(&x), bwd.get(&y)) {
                (Some(&y2), Some(&x2)) if y2 == y && x2 == x => continue,
                (None, None) => {
                    fwd.insert(x, y);
                    bwd.insert(y, x);
                }
                _ => return false,
            }
        }
        if nx.ty != ny.ty {
            return false;
        }
        match (&nx.content, &ny.content) {
            (Content::Avm(fx), Content::Avm(fy)) => {
                if fx.len() != fy.len() {
                    return false;
                }
                for ((f1, v1), (f2, v2)) in fx.iter().zip(fy.iter()) {
                    if f1 != f2 {
                        return false;
                    }
                    stack.push((*v1, *v2));
                }
            }
            (
                Content::List {
                    items: ix,
                    tail: tx,
                },
                Content::List {
                    items: iy,
                    tail: ty,
                },
            ) => {
                if ix.len() != iy.len() || tx.is_some() != ty.is_some() {
                    return false;
                }
                stack.extend(ix.iter().copied().zip(iy.iter().copied()));
                if let (Some(t1), Some(t2)) = (tx, ty) {
                    stack.push((*t1, *t2));
                }
            }
            (Content::Set(ex), Content::Set(ey)) => match (ex, ey) {
                (None, None) => {}
                (Some(e1), Some(e2)) => stack.push((*e1, *e2)),
                _ => return false,
            },
            _ => return false,
        }
    }
    true
}

/// Image of a node of the more general structure inside the more specific
/// one. List suffixes are images too, since flattening may have absorbed a
/// list variable into a longer list.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Image {
    Node(NodeId),
    Suffix(Vec<NodeId>, Option<NodeId>),
}

fn suffix_image(b: &FeatureStructure, n: NodeId, offset: usize) -> Image {
    match &b.node(n).content {
        Content::List { items, tail } => Image::Suffix(items[offset..].to_vec(), *tail),
        _ => Image::Node(n),
    }
}

/// `a` subsumes `b`: every type, feature, list constraint and reentrancy of
/// `a` is also present in `b`.
pub fn subsumes(h: &TypeHierarchy, a: &FeatureStructure, b: &FeatureStructure) -> bool {
    let mut map: HashMap<NodeId, Image> = HashMap::new();
    let mut stack: Vec<(NodeId, Image)> = vec![(a.root, Image::Node(b.root))];
    while let Some((x, img)) = stack.pop() {
        let nx = a.node(x);
        // Normalize list images to a suffix so shared list values compare.
        let img = match img {
            Image::Node(n) => suffix_image(b, n, 0),
            s => s,
        };
        if !is_list(nx) {
            if let Some(prev) = map.get(&x) {
                if *prev != img {
                    return false;
                }
                continue;
            }
            map.insert(x, img.clone());
        }
        match img {
            Image::Node(y) => {
                let ny = b.node(y);
                if !h.is_subtype(ny.ty, nx.ty) {
                    return false;
                }
                match (&nx.content, &ny.content) {
                    (Content::Avm(fx), _) if fx.is_empty() => {}
                    (Content::Avm(fx), Content::Avm(_)) => {
                        for (f, v) in fx.iter() {
                            match b.get_node(y, *f) {
                                Some(w) => stack.push((*v, Image::Node(w))),
                                None => return false,
                            }
                        }
                    }
                    (Content::Set(ex), Content::Set(ey)) => match (ex, ey) {
                        (None, None) => {}
                        (Some(e1), Some(e2)) => stack.push((*e1, Image::Node(*e2))),
                        _ => return false,
                    },
                    (Content::List { items, tail }, Content::Avm(fy)) if fy.is_empty() => {
                        // Only an empty open list subsumes a bare variable.
                        if !items.is_empty() {
                            return false;
                        }
                        match tail {
                            Some(t) => stack.push((*t, Image::Node(y))),
                            None => return false,
                        }
                    }
                    _ => return false,
                }
            }
            Image::Suffix(items_b, tail_b) => match &nx.content {
                Content::Avm(fx) if fx.is_empty() => {
                    if !h.is_subtype(h.list(), nx.ty) {
                        return false;
                    }
                }
                Content::List { items, tail } => {
                    if items.len() > items_b.len() {
                        return false;
                    }
                    if tail.is_none() && (items.len() != items_b.len() || tail_b.is_some()) {
                        return false;
                    }
                    for (i, &ia) in items.iter().enumerate() {
                        stack.push((ia, Image::Node(items_b[i])));
                    }
                    if let Some(t) = tail {
                        let rest = items_b[items.len()..].to_vec();
                        let img = if rest.is_empty() {
                            match tail_b {
                                Some(tb) => Image::Node(tb),
                                None => Image::Suffix(Vec::new(), None),
                            }
                        } else {
                            Image::Suffix(rest, tail_b)
                        };
                        stack.push((*t, img));
                    }
                }
                _ => return false,
            },
        }
    }
    true
}
