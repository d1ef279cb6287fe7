use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Interned type symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub(crate) u16);

/// Interned feature name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature(pub(crate) u16);

pub const TOP: &str = "*top*";
pub const LIST: &str = "list";
pub const SET: &str = "set";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("type `{0}` declared twice")]
    DuplicateType(String),
    #[error("subtype cycle through `{0}`")]
    Cycle(String),
    #[error("types `{0}` and `{1}` have no unique greatest lower bound (candidates: {2})")]
    AmbiguousGlb(String, String, String),
    #[error("feature `{feature}` is introduced by both `{first}` and `{second}`")]
    FeatureClash {
        feature: String,
        first: String,
        second: String,
    },
}

/// A declared type before closure: name, parents, locally introduced features.
#[derive(Clone, Debug)]
pub struct TypeDecl {
    pub name: String,
    pub parents: Vec<String>,
    pub features: Vec<String>,
}

impl TypeDecl {
    pub fn new(name: &str, parents: &[&str], features: &[&str]) -> Self {
        TypeDecl {
            name: name.to_string(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            features: features.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Type hierarchy with a single top, precomputed greatest lower bounds and
/// the appropriateness table (features licensed per type, inherited downward).
#[derive(Clone)]
pub struct TypeHierarchy {
    names: Vec<String>,
    by_name: HashMap<String, TypeId>,
    parents: Vec<Vec<TypeId>>,
    /// `below[a][b]` iff b is a (reflexive, transitive) subtype of a.
    below: Vec<Vec<bool>>,
    glb: Vec<Option<TypeId>>,
    features: Vec<String>,
    feature_by_name: HashMap<String, Feature>,
    appropriate: Vec<BTreeSet<Feature>>,
}

impl fmt::Debug for TypeHierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TypeHierarchy")
            .field("types", &self.names.len())
            .field("features", &self.features.len())
            .finish()
    }
}

impl TypeHierarchy {
    /// Builds the hierarchy. `*top*`, `list` and `set` are always present;
    /// declarations without parents hang directly under `*top*`.
    pub fn new(decls: &[TypeDecl]) -> Result<Self, HierarchyError> {
        let mut all = vec![
            TypeDecl::new(TOP, &[], &[]),
            TypeDecl::new(LIST, &[TOP], &[]),
            TypeDecl::new(SET, &[TOP], &[]),
        ];
        all.extend(decls.iter().cloned());

        let mut names = Vec::new();
        let mut by_name = HashMap::new();
        for d in &all {
            if by_name.contains_key(&d.name) {
                return Err(HierarchyError::DuplicateType(d.name.clone()));
            }
            by_name.insert(d.name.clone(), TypeId(names.len() as u16));
            names.push(d.name.clone());
        }
        let n = names.len();

        let mut parents = vec![Vec::new(); n];
        for (i, d) in all.iter().enumerate() {
            if i == 0 {
                continue;
            }
            let ps = if d.parents.is_empty() {
                vec![TOP.to_string()]
            } else {
                d.parents.clone()
            };
            for p in ps {
                let pid = *by_name
                    .get(&p)
                    .ok_or_else(|| HierarchyError::UnknownType(p.clone()))?;
                if !parents[i].contains(&pid) {
                    parents[i].push(pid);
                }
            }
        }

        // Ancestor closure by DFS with cycle detection.
        let mut above = vec![vec![false; n]; n];
        let mut state = vec![0u8; n];
        fn visit(
            t: usize,
            parents: &[Vec<TypeId>],
            above: &mut [Vec<bool>],
            state: &mut [u8],
            names: &[String],
        ) -> Result<(), HierarchyError> {
            match state[t] {
                2 => return Ok(()),
                1 => return Err(HierarchyError::Cycle(names[t].clone())),
                _ => {}
            }
            state[t] = 1;
            above[t][t] = true;
            for p in &parents[t] {
                let p = p.0 as usize;
                visit(p, parents, above, state, names)?;
                let row = above[p].clone();
                for (dst, src) in above[t].iter_mut().zip(row) {
                    *dst |= src;
                }
            }
            state[t] = 2;
            Ok(())
        }
        for t in 0..n {
            visit(t, &parents, &mut above, &mut state, &names)?;
        }
        let mut below = vec![vec![false; n]; n];
        for t in 0..n {
            for a in 0..n {
                if above[t][a] {
                    below[a][t] = true;
                }
            }
        }

        let mut glb = vec![None; n * n];
        for a in 0..n {
            for b in a..n {
                let common: Vec<usize> = (0..n).filter(|&c| below[a][c] && below[b][c]).collect();
                let maximal: Vec<usize> = common
                    .iter()
                    .copied()
                    .filter(|&m| !common.iter().any(|&c| c != m && below[c][m]))
                    .collect();
                let g = match maximal.len() {
                    0 => None,
                    1 => Some(TypeId(maximal[0] as u16)),
                    _ => {
                        let cands: Vec<&str> = maximal.iter().map(|&m| names[m].as_str()).collect();
                        return Err(HierarchyError::AmbiguousGlb(
                            names[a].clone(),
                            names[b].clone(),
                            cands.join(", "),
                        ));
                    }
                };
                glb[a * n + b] = g;
                glb[b * n + a] = g;
            }
        }

        let mut features = Vec::new();
        let mut feature_by_name: HashMap<String, Feature> = HashMap::new();
        let mut introduced_by: HashMap<Feature, usize> = HashMap::new();
        let mut local = vec![BTreeSet::new(); n];
        for (i, d) in all.iter().enumerate() {
            for f in &d.features {
                let f = f.to_lowercase();
                let id = match feature_by_name.get(&f) {
                    Some(&id) => id,
                    None => {
                        let id = Feature(features.len() as u16);
                        features.push(f.clone());
                        feature_by_name.insert(f.clone(), id);
                        id
                    }
                };
                if let Some(&prev) = introduced_by.get(&id) {
                    if prev != i {
                        return Err(HierarchyError::FeatureClash {
                            feature: f,
                            first: names[prev].clone(),
                            second: names[i].clone(),
                        });
                    }
                }
                introduced_by.insert(id, i);
                local[i].insert(id);
            }
        }
        let mut appropriate = vec![BTreeSet::new(); n];
        for t in 0..n {
            for a in 0..n {
                if above[t][a] {
                    appropriate[t].extend(local[a].iter().copied());
                }
            }
        }

        Ok(TypeHierarchy {
            names,
            by_name,
            parents,
            below,
            glb,
            features,
            feature_by_name,
            appropriate,
        })
    }

    pub fn top(&self) -> TypeId {
        TypeId(0)
    }

    pub fn list(&self) -> TypeId {
        TypeId(1)
    }

    pub fn set(&self) -> TypeId {
        TypeId(2)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn types(&self) -> impl Iterator<Item = TypeId> + '_ {
        (0..self.names.len()).map(|i| TypeId(i as u16))
    }

    pub fn type_id(&self, name: &str) -> Result<TypeId, HierarchyError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| HierarchyError::UnknownType(name.to_string()))
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.names[t.0 as usize]
    }

    pub fn parents(&self, t: TypeId) -> &[TypeId] {
        &self.parents[t.0 as usize]
    }

    pub fn feature(&self, name: &str) -> Result<Feature, HierarchyError> {
        self.feature_by_name
            .get(&name.to_lowercase())
            .copied()
            .ok_or_else(|| HierarchyError::UnknownFeature(name.to_string()))
    }

    pub fn feature_name(&self, f: Feature) -> &str {
        &self.features[f.0 as usize]
    }

    /// `sub` is a (reflexive) subtype of `sup`.
    pub fn is_subtype(&self, sub: TypeId, sup: TypeId) -> bool {
        self.below[sup.0 as usize][sub.0 as usize]
    }

    pub fn glb(&self, a: TypeId, b: TypeId) -> Option<TypeId> {
        self.glb[a.0 as usize * self.names.len() + b.0 as usize]
    }

    /// Name-level glb; unknown names are configuration errors.
    pub fn glb_by_name(&self, a: &str, b: &str) -> Result<Option<&str>, HierarchyError> {
        let a = self.type_id(a)?;
        let b = self.type_id(b)?;
        Ok(self.glb(a, b).map(|t| self.type_name(t)))
    }

    pub fn is_appropriate(&self, t: TypeId, f: Feature) -> bool {
        self.appropriate[t.0 as usize].contains(&f)
    }

    /// The most general type for which `f` is appropriate.
    pub fn introducer(&self, f: Feature) -> Option<TypeId> {
        self.types()
            .filter(|&t| self.is_appropriate(t, f))
            .find(|&t| self.parents(t).iter().all(|&p| !self.is_appropriate(p, f)))
    }

    pub fn appropriate_features(&self, t: TypeId) -> impl Iterator<Item = Feature> + '_ {
        self.appropriate[t.0 as usize].iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> TypeHierarchy {
        TypeHierarchy::new(&[
            TypeDecl::new("a", &[], &["f"]),
            TypeDecl::new("b", &[], &["g"]),
            TypeDecl::new("ab", &["a", "b"], &[]),
            TypeDecl::new("c", &[], &[]),
        ])
        .unwrap()
    }

    /// Common subtypes by walking parent links upward from every candidate.
    fn brute_glb(h: &TypeHierarchy, a: TypeId, b: TypeId) -> Option<TypeId> {
        fn ancestors(h: &TypeHierarchy, t: TypeId, out: &mut Vec<TypeId>) {
            if !out.contains(&t) {
                out.push(t);
                for &p in h.parents(t) {
                    ancestors(h, p, out);
                }
            }
        }
        let anc = |t| {
            let mut v = Vec::new();
            ancestors(h, t, &mut v);
            v
        };
        let common: Vec<TypeId> = h
            .types()
            .filter(|&c| {
                let up = anc(c);
                up.contains(&a) && up.contains(&b)
            })
            .collect();
        common
            .iter()
            .copied()
            .find(|&m| common.iter().all(|&c| anc(c).contains(&m)))
    }

    #[test]
    fn glb_basics() {
        let h = diamond();
        let a = h.type_id("a").unwrap();
        assert_eq!(h.glb(a, a), Some(a));
        assert_eq!(h.glb(h.top(), a), Some(a));
        assert_eq!(h.glb_by_name("a", "b").unwrap(), Some("ab"));
        assert_eq!(h.glb_by_name("a", "c").unwrap(), None);
        assert!(matches!(
            h.glb_by_name("a", "zzz"),
            Err(HierarchyError::UnknownType(_))
        ));
    }

    #[test]
    fn glb_matches_brute_force() {
        let h = diamond();
        for a in h.types() {
            for b in h.types() {
                assert_eq!(h.glb(a, b), brute_glb(&h, a, b), "{:?} {:?}", a, b);
            }
        }
    }

    #[test]
    fn appropriateness_is_inherited() {
        let h = diamond();
        let ab = h.type_id("ab").unwrap();
        assert!(h.is_appropriate(ab, h.feature("f").unwrap()));
        assert!(h.is_appropriate(ab, h.feature("G").unwrap()));
        assert!(!h.is_appropriate(h.type_id("c").unwrap(), h.feature("f").unwrap()));
    }

    #[test]
    fn rejects_ambiguous_glb() {
        let err = TypeHierarchy::new(&[
            TypeDecl::new("a", &[], &[]),
            TypeDecl::new("b", &[], &[]),
            TypeDecl::new("x", &["a", "b"], &[]),
            TypeDecl::new("y", &["a", "b"], &[]),
        ])
        .unwrap_err();
        assert!(matches!(err, HierarchyError::AmbiguousGlb(..)));
    }

    #[test]
    fn rejects_cycles_and_unknown_parents() {
        let err = TypeHierarchy::new(&[
            TypeDecl::new("a", &["b"], &[]),
            TypeDecl::new("b", &["a"], &[]),
        ])
        .unwrap_err();
        assert!(matches!(err, HierarchyError::Cycle(_)));
        let err = TypeHierarchy::new(&[TypeDecl::new("a", &["nope"], &[])]).unwrap_err();
        assert_eq!(err, HierarchyError::UnknownType("nope".into()));
    }
}
