use std::collections::{BTreeMap, BTreeSet, HashMap};

use proptest::prelude::*;
use pvp_core::tfs::{
    fs_equal, print_fs, read_fs, read_signature, subsumes, unify, Content, FeatureStructure,
    NodeId, TypeHierarchy,
};

const SIG: &str = "
(deftype s () (f g h))
(deftype s1 (s) ())
(deftype s2 (s) ())
(deftype s12 (s1 s2) ())
(deftype x () ())
(deftype x1 (x) ())
(deftype x2 (x) ())
";

fn hierarchy() -> TypeHierarchy {
    read_signature(SIG).unwrap()
}

const ATOMS: &[&str] = &["*top*", "x", "x1", "x2", "s", "s1", "s2", "s12"];
const AVM_TYPES: &[&str] = &["s", "s1", "s2", "s12"];

fn tag() -> impl Strategy<Value = Option<u8>> {
    prop_oneof![3 => Just(None), 1 => (1u8..4).prop_map(Some)]
}

fn tagged(t: Option<u8>, body: String) -> String {
    match t {
        Some(n) => format!("#{} {}", n, body),
        None => body,
    }
}

/// AVM values over f, g, h with tags; `lists` adds list and set values
/// under h.
fn value(lists: bool) -> impl Strategy<Value = String> {
    let leaf = (tag(), prop::sample::select(ATOMS)).prop_map(|(t, a)| tagged(t, a.to_string()));
    leaf.prop_recursive(3, 24, 3, move |inner| {
        let avm = (
            tag(),
            prop::sample::select(AVM_TYPES),
            prop::option::of(inner.clone()),
            prop::option::of(inner.clone()),
            prop::option::of(inner.clone()),
        )
            .prop_map(|(t, ty, f, g, h)| {
                let mut s = format!("({}", ty);
                for (k, v) in [("f", f), ("g", g), ("h", h)] {
                    if let Some(v) = v {
                        s.push_str(&format!(" :{} {}", k, v));
                    }
                }
                s.push(')');
                tagged(t, s)
            });
        if lists {
            let list = (prop::collection::vec(inner.clone(), 0..3), any::<bool>()).prop_map(
                |(items, open)| {
                    let tail = if open { " . list" } else { "" };
                    format!("<{}{}>", items.join(" "), tail)
                },
            );
            let set =
                prop::option::of(inner).prop_map(|e| format!("{{{}}}", e.unwrap_or_default()));
            prop_oneof![3 => avm, 1 => list, 1 => set].boxed()
        } else {
            avm.boxed()
        }
    })
}

fn structure(lists: bool) -> impl Strategy<Value = FeatureStructure> {
    let h = hierarchy();
    value(lists).prop_filter_map("ill-formed value", move |t| read_fs(&h, &t).ok())
}

/// Paths of an acyclic AVM-only structure: path -> (node, type name).
fn paths(h: &TypeHierarchy, fs: &FeatureStructure) -> BTreeMap<Vec<String>, (NodeId, String)> {
    let mut out = BTreeMap::new();
    let mut stack = vec![(Vec::new(), fs.root())];
    while let Some((p, n)) = stack.pop() {
        let node = fs.node(n);
        if let Content::Avm(feats) = &node.content {
            for (f, v) in feats.iter() {
                let mut q = p.clone();
                q.push(h.feature_name(*f).to_string());
                stack.push((q, *v));
            }
        }
        out.insert(p, (n, h.type_name(node.ty).to_string()));
    }
    out
}

/// Unification by closure over paths: merge the path equivalences of both
/// inputs, propagate congruence until nothing changes, then read off the
/// type of each class. `None` on failure.
struct Oracle {
    paths: BTreeSet<Vec<String>>,
    parent: HashMap<Vec<String>, Vec<String>>,
}

impl Oracle {
    fn find(&mut self, p: &Vec<String>) -> Vec<String> {
        let q = self.parent.get(p).cloned().unwrap_or_else(|| p.clone());
        if &q == p {
            return q;
        }
        let r = self.find(&q);
        self.parent.insert(p.clone(), r.clone());
        r
    }

    fn union(&mut self, a: &Vec<String>, b: &Vec<String>) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent.insert(ra, rb);
        true
    }
}

type Partition = BTreeSet<(BTreeSet<Vec<String>>, String)>;

fn partition_of(h: &TypeHierarchy, fs: &FeatureStructure) -> Partition {
    let mut by_node: BTreeMap<NodeId, (BTreeSet<Vec<String>>, String)> = BTreeMap::new();
    for (p, (n, t)) in paths(h, fs) {
        by_node
            .entry(n)
            .or_insert_with(|| (BTreeSet::new(), t))
            .0
            .insert(p);
    }
    by_node.into_values().collect()
}

fn oracle_unify(
    h: &TypeHierarchy,
    a: &FeatureStructure,
    b: &FeatureStructure,
) -> Option<Partition> {
    const MAX_LEN: usize = 16;
    let pa = paths(h, a);
    let pb = paths(h, b);
    let mut o = Oracle {
        paths: BTreeSet::new(),
        parent: HashMap::new(),
    };
    let mut types: Vec<(Vec<String>, String)> = Vec::new();
    for ps in [&pa, &pb] {
        let mut by_node: HashMap<NodeId, Vec<String>> = HashMap::new();
        for (p, (n, t)) in ps.iter() {
            o.paths.insert(p.clone());
            types.push((p.clone(), t.clone()));
            if let Some(q) = by_node.get(n) {
                let q = q.clone();
                o.union(p, &q);
            } else {
                by_node.insert(*n, p.clone());
            }
        }
    }
    loop {
        let mut changed = false;
        let all: Vec<Vec<String>> = o.paths.iter().cloned().collect();
        for p in &all {
            if p.len() > MAX_LEN {
                return None;
            }
            let Some((last, prefix)) = p.split_last() else {
                continue;
            };
            let rp = o.find(&prefix.to_vec());
            for q in &all {
                if q.len() + 1 > MAX_LEN + 1 || o.find(q) != rp || q.as_slice() == prefix {
                    continue;
                }
                let mut ext = q.clone();
                ext.push(last.clone());
                if o.paths.insert(ext.clone()) {
                    changed = true;
                }
                if o.union(p, &ext) {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // A class holding a path and one of its proper extensions is a cycle.
    let all: Vec<Vec<String>> = o.paths.iter().cloned().collect();
    let mut classes: BTreeMap<Vec<String>, BTreeSet<Vec<String>>> = BTreeMap::new();
    for p in &all {
        let r = o.find(p);
        classes.entry(r).or_default().insert(p.clone());
    }
    for members in classes.values() {
        for p in members {
            for q in members {
                if q.len() > p.len() && q.starts_with(p) {
                    return None;
                }
            }
        }
    }
    let mut class_type: BTreeMap<Vec<String>, String> = BTreeMap::new();
    for (p, t) in types {
        let r = o.find(&p);
        let cur = class_type.entry(r).or_insert_with(|| "*top*".to_string());
        let g = h.glb_by_name(cur, &t).unwrap()?;
        *cur = g.to_string();
    }
    let mut out = Partition::new();
    for (r, members) in classes {
        let t = class_type
            .get(&r)
            .cloned()
            .unwrap_or_else(|| "*top*".to_string());
        let tid = h.type_id(&t).unwrap();
        for m in &members {
            for q in &all {
                if q.len() == m.len() + 1 && q.starts_with(m) {
                    let f = h.feature(q.last().unwrap()).unwrap();
                    if !h.is_appropriate(tid, f) {
                        return None;
                    }
                }
            }
        }
        out.insert((members, t));
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn unify_is_commutative(a in structure(true), b in structure(true)) {
        let h = hierarchy();
        match (unify(&h, &a, &b), unify(&h, &b, &a)) {
            (Ok(x), Ok(y)) => prop_assert!(fs_equal(&x, &y)),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn unify_is_idempotent(a in structure(true)) {
        let h = hierarchy();
        let u = unify(&h, &a, &a).unwrap();
        prop_assert!(fs_equal(&u, &a), "{} vs {}", print_fs(&h, &u), print_fs(&h, &a));
    }

    #[test]
    fn unify_is_monotone(a in structure(true), b in structure(true)) {
        let h = hierarchy();
        if let Ok(u) = unify(&h, &a, &b) {
            prop_assert!(subsumes(&h, &a, &u));
            prop_assert!(subsumes(&h, &b, &u));
        }
    }

    #[test]
    fn unify_is_associative(a in structure(true), b in structure(true), c in structure(true)) {
        let h = hierarchy();
        let left = unify(&h, &a, &b).and_then(|ab| unify(&h, &ab, &c));
        let right = unify(&h, &b, &c).and_then(|bc| unify(&h, &a, &bc));
        match (left, right) {
            (Ok(x), Ok(y)) => prop_assert!(fs_equal(&x, &y)),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{:?} vs {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn inputs_are_not_mutated(a in structure(true), b in structure(true)) {
        let h = hierarchy();
        let (ta, tb) = (print_fs(&h, &a), print_fs(&h, &b));
        let _ = unify(&h, &a, &b);
        prop_assert_eq!(print_fs(&h, &a), ta);
        prop_assert_eq!(print_fs(&h, &b), tb);
    }

    #[test]
    fn printing_round_trips(a in structure(true)) {
        let h = hierarchy();
        let back = read_fs(&h, &print_fs(&h, &a)).unwrap();
        prop_assert!(fs_equal(&a, &back));
        prop_assert!(subsumes(&h, &a, &back) && subsumes(&h, &back, &a));
    }

    #[test]
    fn top_subsumes_everything(a in structure(true)) {
        let h = hierarchy();
        prop_assert!(subsumes(&h, &FeatureStructure::top(&h), &a));
        prop_assert!(subsumes(&h, &a, &a));
    }

    #[test]
    fn unify_matches_path_closure_oracle(a in structure(false), b in structure(false)) {
        let h = hierarchy();
        let engine = unify(&h, &a, &b).ok().map(|u| partition_of(&h, &u));
        let oracle = oracle_unify(&h, &a, &b);
        prop_assert_eq!(engine, oracle);
    }
}

#[test]
fn oracle_example_shares_f_and_g() {
    let h = hierarchy();
    let a = read_fs(&h, "(s :f x1 :g #1 x2)").unwrap();
    let b = read_fs(&h, "(s :f #1 :g #1)").unwrap();
    let u = unify(&h, &a, &b);
    // x1 and x2 have no common subtype.
    assert!(u.is_err());
    assert_eq!(oracle_unify(&h, &a, &b), None);

    let a = read_fs(&h, "(s :f s1 :g #1 s2)").unwrap();
    let u = unify(&h, &a, &b).unwrap();
    assert_eq!(print_fs(&h, &u), "(s :f #1 s12 :g #1)");
    assert_eq!(oracle_unify(&h, &a, &b), Some(partition_of(&h, &u)));
}

#[test]
fn closed_lists_of_different_length_clash() {
    let h = hierarchy();
    let a = read_fs(&h, "(s :h <x x>)").unwrap();
    let b = read_fs(&h, "(s :h <x>)").unwrap();
    assert!(unify(&h, &a, &b).is_err());
    let open = read_fs(&h, "(s :h <x1 . list>)").unwrap();
    let u = unify(&h, &a, &open).unwrap();
    assert_eq!(print_fs(&h, &u), "(s :h <x1 x>)");
}

#[test]
fn sets_hold_one_element() {
    let h = hierarchy();
    assert!(read_fs(&h, "(s :h {x x})").is_err());
    let a = read_fs(&h, "(s :h {x1})").unwrap();
    let b = read_fs(&h, "(s :h {})").unwrap();
    assert!(unify(&h, &a, &b).is_err());
}

#[test]
fn cycles_are_rejected() {
    let h = hierarchy();
    let a = read_fs(&h, "(s :f #1 s :g #1)").unwrap();
    let b = read_fs(&h, "(s :f (s :f #2) :g #2)").unwrap();
    assert!(unify(&h, &a, &b).is_err());
}
