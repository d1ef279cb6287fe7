//! Destructive union-find unification over a scratch graph.
//!
//! Inputs are copied into a [`Work`] graph, merged there, and read back out
//! with [`Work::finish`], which flattens list tails and rejects cycles. The
//! public [`unify`] never touches its arguments.

use thiserror::Error;

use super::graph::{Content, FeatureStructure, Node, NodeId, Path};
use super::types::{Feature, TypeHierarchy, TypeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("type clash: {0} and {1} have no common subtype")]
    TypeClash(String, String),
    #[error("closed list length mismatch")]
    ListLength,
    #[error("set cardinality mismatch")]
    SetCardinality,
    #[error("incompatible node kinds")]
    KindClash,
    #[error("unification would create a cycle")]
    Cycle,
    #[error("feature `{0}` is not appropriate for type `{1}`")]
    Inappropriate(String, String),
    #[error("path undefined: {0}")]
    Path(String),
}

pub(crate) type WId = u32;

#[derive(Clone, Debug)]
pub(crate) enum WContent {
    Avm(Vec<(Feature, WId)>),
    List { items: Vec<WId>, tail: Option<WId> },
    Set(Vec<WId>),
}

#[derive(Clone, Debug)]
struct WNode {
    ty: TypeId,
    content: WContent,
}

pub(crate) struct Work<'h> {
    pub(crate) h: &'h TypeHierarchy,
    nodes: Vec<WNode>,
    parent: Vec<WId>,
}

impl<'h> Work<'h> {
    pub(crate) fn new(h: &'h TypeHierarchy) -> Self {
        Work {
            h,
            nodes: Vec::new(),
            parent: Vec::new(),
        }
    }

    pub(crate) fn add(&mut self, ty: TypeId, content: WContent) -> WId {
        let id = self.nodes.len() as WId;
        self.nodes.push(WNode { ty, content });
        self.parent.push(id);
        id
    }

    pub(crate) fn var(&mut self, ty: TypeId) -> WId {
        self.add(ty, WContent::Avm(Vec::new()))
    }

    pub(crate) fn avm(&mut self, ty: TypeId, mut feats: Vec<(Feature, WId)>) -> WId {
        feats.sort_by_key(|(f, _)| *f);
        self.add(ty, WContent::Avm(feats))
    }

    pub(crate) fn list(&mut self, items: Vec<WId>, tail: Option<WId>) -> WId {
        let ty = self.h.list();
        self.add(ty, WContent::List { items, tail })
    }

    pub(crate) fn set(&mut self, elems: Vec<WId>) -> WId {
        let ty = self.h.set();
        self.add(ty, WContent::Set(elems))
    }

    pub(crate) fn find(&mut self, mut x: WId) -> WId {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub(crate) fn ty(&mut self, x: WId) -> TypeId {
        let r = self.find(x);
        self.nodes[r as usize].ty
    }

    pub(crate) fn get(&mut self, x: WId, f: Feature) -> Option<WId> {
        let r = self.find(x);
        match &self.nodes[r as usize].content {
            WContent::Avm(fs) => fs.iter().find(|(k, _)| *k == f).map(|(_, v)| *v),
            _ => None,
        }
    }

    pub(crate) fn path(&mut self, x: WId, p: &Path) -> Option<WId> {
        let mut cur = x;
        for f in p.features() {
            cur = self.get(cur, *f)?;
        }
        Some(cur)
    }

    /// Like [`Work::path`], but adds missing features as fresh variables,
    /// specializing each node to the feature's introducing type.
    pub(crate) fn path_or_add(&mut self, x: WId, p: &Path) -> Result<WId, UnifyError> {
        let mut cur = self.find(x);
        for &f in p.features() {
            cur = match self.get(cur, f) {
                Some(v) => v,
                None => {
                    if let Some(intro) = self.h.introducer(f) {
                        let t = self.var(intro);
                        self.unify(cur, t)?;
                    }
                    let v = self.var(self.h.top());
                    let r = self.find(cur);
                    if !matches!(self.nodes[r as usize].content, WContent::Avm(_)) {
                        return Err(UnifyError::KindClash);
                    }
                    self.set_feature(r, f, v);
                    v
                }
            };
        }
        Ok(self.find(cur))
    }

    /// Sets or replaces a feature on an AVM node. Used only while building.
    pub(crate) fn set_feature(&mut self, x: WId, f: Feature, v: WId) {
        let r = self.find(x);
        if let WContent::Avm(fs) = &mut self.nodes[r as usize].content {
            match fs.iter_mut().find(|(k, _)| *k == f) {
                Some(slot) => slot.1 = v,
                None => {
                    fs.push((f, v));
                    fs.sort_by_key(|(k, _)| *k);
                }
            }
        }
    }

    /// Flattened list view: (items, open tail). A bare variable is an open
    /// list with no prefix; anything else is not a list.
    pub(crate) fn list_view(&mut self, x: WId) -> Option<(Vec<WId>, Option<WId>)> {
        let mut out = Vec::new();
        let mut cur = self.find(x);
        let mut steps = 0;
        loop {
            steps += 1;
            if steps > self.nodes.len() + 1 {
                return None;
            }
            match &self.nodes[cur as usize].content {
                WContent::List { items, tail } => {
                    out.extend(items.iter().copied());
                    match *tail {
                        None => return Some((out, None)),
                        Some(t) => cur = self.find(t),
                    }
                }
                WContent::Avm(fs) if fs.is_empty() => return Some((out, Some(cur))),
                _ => return None,
            }
        }
    }

    pub(crate) fn set_view(&mut self, x: WId) -> Option<Vec<WId>> {
        let r = self.find(x);
        match &self.nodes[r as usize].content {
            WContent::Set(e) => Some(e.clone()),
            WContent::Avm(fs) if fs.is_empty() => Some(Vec::new()),
            _ => None,
        }
    }

    /// Copies every node reachable from the root of `fs` and returns the
    /// image of the root.
    pub(crate) fn embed(&mut self, fs: &FeatureStructure) -> WId {
        let mut map: Vec<Option<WId>> = vec![None; fs.nodes.len()];
        let reach = fs.reachable();
        // Allocate first, fill contents second, so sharing is preserved.
        for &n in &reach {
            let node = fs.node(n);
            map[n.idx()] = Some(self.add(node.ty, WContent::Avm(Vec::new())));
        }
        for n in reach {
            let m = |id: &NodeId| map[id.idx()].expect("reachable");
            let content = match &fs.node(n).content {
                Content::Avm(f) => WContent::Avm(f.iter().map(|(k, v)| (*k, m(v))).collect()),
                Content::List { items, tail } => WContent::List {
                    items: items.iter().map(m).collect(),
                    tail: tail.as_ref().map(m),
                },
                Content::Set(e) => WContent::Set(e.iter().map(m).collect()),
            };
            let w = map[n.idx()].unwrap();
            self.nodes[w as usize].content = content;
        }
        map[fs.root.idx()].unwrap()
    }

    pub(crate) fn unify(&mut self, a: WId, b: WId) -> Result<(), UnifyError> {
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            let x = self.find(x);
            let y = self.find(y);
            if x == y {
                continue;
            }
            let tx = self.nodes[x as usize].ty;
            let ty = self.nodes[y as usize].ty;
            let t = self.h.glb(tx, ty).ok_or_else(|| {
                UnifyError::TypeClash(
                    self.h.type_name(tx).to_string(),
                    self.h.type_name(ty).to_string(),
                )
            })?;
            let cx = std::mem::replace(
                &mut self.nodes[x as usize].content,
                WContent::Avm(Vec::new()),
            );
            let cy = std::mem::replace(
                &mut self.nodes[y as usize].content,
                WContent::Avm(Vec::new()),
            );
            self.parent[y as usize] = x;
            self.nodes[x as usize].ty = t;
            let merged = match (cx, cy) {
                (WContent::Avm(fx), WContent::Avm(fy)) => {
                    let mut out = fx;
                    for (f, v) in fy {
                        match out.iter().find(|(k, _)| *k == f) {
                            Some(&(_, w)) => stack.push((w, v)),
                            None => out.push((f, v)),
                        }
                    }
                    out.sort_by_key(|(k, _)| *k);
                    for (f, _) in &out {
                        if !self.h.is_appropriate(t, *f) {
                            return Err(UnifyError::Inappropriate(
                                self.h.feature_name(*f).to_string(),
                                self.h.type_name(t).to_string(),
                            ));
                        }
                    }
                    WContent::Avm(out)
                }
                (WContent::Avm(f), other) | (other, WContent::Avm(f)) => {
                    if !f.is_empty() {
                        return Err(UnifyError::KindClash);
                    }
                    other
                }
                (WContent::Set(ex), WContent::Set(ey)) => {
                    if ex.len() != ey.len() {
                        return Err(UnifyError::SetCardinality);
                    }
                    stack.extend(ex.iter().copied().zip(ey.iter().copied()));
                    WContent::Set(ex)
                }
                (
                    WContent::List {
                        items: ix,
                        tail: tx,
                    },
                    WContent::List {
                        items: iy,
                        tail: ty,
                    },
                ) => {
                    let k = ix.len().min(iy.len());
                    stack.extend(ix[..k].iter().copied().zip(iy[..k].iter().copied()));
                    use std::cmp::Ordering::*;
                    match ix.len().cmp(&iy.len()) {
                        Equal => {
                            let tail = match (tx, ty) {
                                (None, None) => None,
                                (Some(t), None) | (None, Some(t)) => {
                                    let empty = self.list(Vec::new(), None);
                                    stack.push((t, empty));
                                    None
                                }
                                (Some(t1), Some(t2)) => {
                                    stack.push((t1, t2));
                                    Some(t1)
                                }
                            };
                            WContent::List { items: ix, tail }
                        }
                        Greater => {
                            let t2 = ty.ok_or(UnifyError::ListLength)?;
                            let rest = self.list(ix[k..].to_vec(), tx);
                            stack.push((t2, rest));
                            WContent::List {
                                items: ix,
                                tail: tx,
                            }
                        }
                        Less => {
                            let t1 = tx.ok_or(UnifyError::ListLength)?;
                            let rest = self.list(iy[k..].to_vec(), ty);
                            stack.push((t1, rest));
                            WContent::List {
                                items: iy,
                                tail: ty,
                            }
                        }
                    }
                }
                _ => return Err(UnifyError::KindClash),
            };
            self.nodes[x as usize].content = merged;
        }
        Ok(())
    }

    /// Reads the structure rooted at `root` back into an immutable graph,
    /// flattening list tails. Fails on cycles.
    pub(crate) fn finish(&mut self, root: WId) -> Result<FeatureStructure, UnifyError> {
        let mut out: Vec<Node> = Vec::new();
        let mut map: Vec<Option<NodeId>> = vec![None; self.nodes.len()];
        let mut state: Vec<u8> = vec![0; self.nodes.len()];
        let r = self.emit(root, &mut out, &mut map, &mut state)?;
        Ok(FeatureStructure::from_parts(out, r))
    }

    fn emit(
        &mut self,
        x: WId,
        out: &mut Vec<Node>,
        map: &mut [Option<NodeId>],
        state: &mut [u8],
    ) -> Result<NodeId, UnifyError> {
        let x = self.find(x);
        if let Some(id) = map[x as usize] {
            return Ok(id);
        }
        if state[x as usize] == 1 {
            return Err(UnifyError::Cycle);
        }
        state[x as usize] = 1;
        let ty = self.nodes[x as usize].ty;
        let avm_len = match &self.nodes[x as usize].content {
            WContent::Avm(fs) => Some(fs.len()),
            _ => None,
        };
        let content = match avm_len {
            Some(n) => {
                let mut v = Vec::with_capacity(n);
                for i in 0..n {
                    let WContent::Avm(fs) = &self.nodes[x as usize].content else {
                        unreachable!("node kind is fixed during emit")
                    };
                    let (f, c) = fs[i];
                    v.push((f, self.emit(c, out, map, state)?));
                }
                Content::Avm(v.into())
            }
            None => match self.nodes[x as usize].content.clone() {
                WContent::Avm(_) => unreachable!("handled above"),
                WContent::Set(e) => {
                    if e.len() > 1 {
                        return Err(UnifyError::SetCardinality);
                    }
                    let e = match e.first() {
                        Some(&c) => Some(self.emit(c, out, map, state)?),
                        None => None,
                    };
                    Content::Set(e)
                }
                WContent::List { .. } => {
                    // Walk the tail chain; every list node on it is in progress.
                    let mut items = Vec::new();
                    let mut cur = x;
                    let mut chain = vec![];
                    let tail = loop {
                        let WContent::List { items: is, tail } =
                            self.nodes[cur as usize].content.clone()
                        else {
                            unreachable!("chain holds list nodes only")
                        };
                        items.extend(is);
                        let Some(t) = tail else { break None };
                        let t = self.find(t);
                        match &self.nodes[t as usize].content {
                            WContent::List { .. } => {
                                if t == x || chain.contains(&t) || state[t as usize] == 1 {
                                    return Err(UnifyError::Cycle);
                                }
                                chain.push(t);
                                cur = t;
                            }
                            WContent::Avm(fs) if fs.is_empty() => break Some(t),
                            _ => return Err(UnifyError::KindClash),
                        }
                    };
                    for &c in &chain {
                        state[c as usize] = 1;
                    }
                    let mut v = Vec::with_capacity(items.len());
                    for c in items {
                        v.push(self.emit(c, out, map, state)?);
                    }
                    let tail = match tail {
                        Some(t) => Some(self.emit(t, out, map, state)?),
                        None => None,
                    };
                    for &c in &chain {
                        if state[c as usize] == 1 {
                            state[c as usize] = 0;
                        }
                    }
                    Content::List {
                        items: v.into(),
                        tail,
                    }
                }
            },
        };
        let id = NodeId(out.len() as u32);
        out.push(Node { ty, content });
        map[x as usize] = Some(id);
        state[x as usize] = 2;
        Ok(id)
    }
}

/// Most general structure subsumed by both inputs.
pub fn unify(
    h: &TypeHierarchy,
    a: &FeatureStructure,
    b: &FeatureStructure,
) -> Result<FeatureStructure, UnifyError> {
    let mut w = Work::new(h);
    let x = w.embed(a);
    let y = w.embed(b);
    w.unify(x, y)?;
    w.finish(x)
}

/// Unifies `b` into the substructure of `a` at `path` and returns the whole
/// of `a`, so reentrancies elsewhere in `a` observe the new information.
pub fn unify_at(
    h: &TypeHierarchy,
    a: &FeatureStructure,
    path: &Path,
    b: &FeatureStructure,
) -> Result<FeatureStructure, UnifyError> {
    let mut w = Work::new(h);
    let x = w.embed(a);
    let at = w
        .path(x, path)
        .ok_or_else(|| UnifyError::Path(format!("{:?}", path)))?;
    let y = w.embed(b);
    w.unify(at, y)?;
    w.finish(x)
}
