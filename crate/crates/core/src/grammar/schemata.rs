//! The five combination schemata.
//!
//! All of them enforce the Head Feature Principle (the mother's HEAD is the
//! head daughter's HEAD node) and the Nonlocal Feature Principle (mother
//! SLASH is the union of the daughters' SLASH, except where the schema
//! introduces or binds an element).

use std::sync::Arc;

use crate::orderdomain::{compact, domain_union, insert_filler_domain, Domain, ElementKind};
use crate::tfs::{FeatureStructure, Path, WId, Work};

use super::{Grammar, Mode, Schema, SchemaError, Sign, Slot};

struct Ctx<'g> {
    g: &'g Grammar,
    w: Work<'g>,
}

impl<'g> Ctx<'g> {
    fn new(g: &'g Grammar) -> Self {
        Ctx {
            g,
            w: Work::new(&g.hierarchy),
        }
    }

    fn at(&mut self, x: WId, p: &Path) -> Result<WId, SchemaError> {
        Ok(self.w.path_or_add(x, p)?)
    }

    fn slash(&mut self, sign: WId) -> Vec<WId> {
        let p = self.g.paths.slash.clone();
        match self.w.path(sign, &p) {
            Some(s) => self.w.set_view(s).unwrap_or_default(),
            None => Vec::new(),
        }
    }

    fn atom(&mut self, ty: crate::tfs::TypeId) -> WId {
        self.w.var(ty)
    }

    /// Daughter value for DTRS: the daughter's type and SYNSEM.
    fn shallow(&mut self, sign: WId) -> Result<WId, SchemaError> {
        let ty = self.w.ty(sign);
        let ss = self.at(sign, &self.g.paths.synsem.clone())?;
        Ok(self.w.avm(ty, vec![(self.g.f.synsem, ss)]))
    }

    fn local(&mut self, head: WId, comps: WId, vcomp: WId) -> WId {
        let f = &self.g.f;
        let cat = self.w.avm(
            self.g.t.cat,
            vec![(f.head, head), (f.comps, comps), (f.vcomp, vcomp)],
        );
        self.w.avm(self.g.t.local, vec![(f.cat, cat)])
    }

    fn union_slash(&mut self, mut a: Vec<WId>, b: Vec<WId>) -> Result<Vec<WId>, SchemaError> {
        for x in b {
            let rx = self.w.find(x);
            if !a.iter().any(|&y| self.w.find(y) == rx) {
                a.push(x);
            }
        }
        if a.len() > 1 {
            return Err(SchemaError::SlashOverflow);
        }
        Ok(a)
    }

    fn mother(&mut self, loc: WId, slash: Vec<WId>, lex: WId, dtrs: WId) -> WId {
        let f = self.g.f.clone();
        let t = &self.g.t;
        let s = self.w.set(slash);
        let inher = self.w.avm(t.inher, vec![(f.slash, s)]);
        let nonloc = self.w.avm(t.nonloc, vec![(f.inher, inher)]);
        let ss = self.w.avm(
            t.synsem,
            vec![(f.loc, loc), (f.nonloc, nonloc), (f.lex, lex)],
        );
        self.w.avm(t.phrasal, vec![(f.synsem, ss), (f.dtrs, dtrs)])
    }

    fn finish(mut self, root: WId) -> Result<FeatureStructure, SchemaError> {
        Ok(self.w.finish(root)?)
    }
}

fn disjoint(a: &Sign, b: &Sign) -> Result<(), SchemaError> {
    if a.footprint().is_disjoint(b.footprint()) {
        Ok(())
    } else {
        Err(SchemaError::Overlap)
    }
}

fn pending(a: &Sign, b: &Sign) -> Result<Option<Arc<Sign>>, SchemaError> {
    match (&a.licenser, &b.licenser) {
        (Some(_), Some(_)) => Err(SchemaError::SlashOverflow),
        (Some(l), None) | (None, Some(l)) => Ok(Some(l.clone())),
        (None, None) => Ok(None),
    }
}

fn complement_element(g: &Grammar, comp: &Sign) -> Result<Domain, SchemaError> {
    if comp.dom.is_empty() {
        return Ok(Domain::empty());
    }
    Ok(Domain::single(compact(
        g,
        comp.dom.elements(),
        comp.synsem(g),
    )?))
}

/// Saturates the last element of the head's COMPS list (or extends an open
/// list by one element).
pub fn apply_head_complement(
    g: &Grammar,
    head: &Arc<Sign>,
    comp: &Arc<Sign>,
) -> Result<Sign, SchemaError> {
    let comps = head
        .fs
        .path_get(&g.paths.comps)
        .map_err(|_| SchemaError::Malformed("head without COMPS"))?;
    let (items, open) = comps
        .list_view()
        .ok_or(SchemaError::Malformed("COMPS is not a list"))?;
    let slot = match (items.len(), open) {
        (0, false) => return Err(SchemaError::NothingToSaturate),
        (_, true) => Slot::Extend,
        (n, false) => Slot::Index(n - 1),
    };
    apply_head_complement_at(g, head, comp, slot)
}

/// Saturates COMPS element `slot` of `head` with `comp`. The mother's COMPS
/// is the head's minus that element; mother LEX is `-`.
pub fn apply_head_complement_at(
    g: &Grammar,
    head: &Arc<Sign>,
    comp: &Arc<Sign>,
    slot: Slot,
) -> Result<Sign, SchemaError> {
    disjoint(head, comp)?;
    let licenser = pending(head, comp)?;
    let p = &g.paths;
    let mut c = Ctx::new(g);
    let h = c.w.embed(&head.fs);
    let k = c.w.embed(&comp.fs);

    let vc = c.at(h, &p.vcomp)?;
    let none = c.atom(g.t.none);
    c.w.unify(vc, none).map_err(|_| SchemaError::VcompPending)?;

    let comps = c.at(h, &p.comps)?;
    let (items, tail) =
        c.w.list_view(comps)
            .ok_or(SchemaError::Malformed("COMPS is not a list"))?;
    let (target, rest) = match slot {
        Slot::Index(i) => {
            if items.is_empty() {
                return Err(SchemaError::NothingToSaturate);
            }
            if i >= items.len() {
                return Err(SchemaError::BadSlot(i));
            }
            let mut rest = items.clone();
            let target = rest.remove(i);
            (target, c.w.list(rest, tail))
        }
        Slot::Extend => {
            let t = tail.ok_or(SchemaError::NothingToSaturate)?;
            let fresh_tail = c.w.var(g.hierarchy.list());
            let x = c.w.var(g.hierarchy.top());
            let ext = c.w.list(vec![x], Some(fresh_tail));
            c.w.unify(t, ext)?;
            (x, c.w.list(items, Some(fresh_tail)))
        }
    };
    let kss = c.at(k, &p.synsem)?;
    c.w.unify(target, kss)?;

    let hd = c.at(h, &p.head)?;
    let loc = c.local(hd, rest, vc);
    let hs = c.slash(h);
    let ks = c.slash(k);
    let slash = c.union_slash(hs, ks)?;
    let lex = c.atom(g.t.minus);
    let hdtr = c.shallow(h)?;
    let kdtr = c.shallow(k)?;
    let kl = c.w.list(vec![kdtr], None);
    let dtrs = c.w.avm(
        g.t.head_comp,
        vec![(g.f.head_dtr, hdtr), (g.f.comp_dtrs, kl)],
    );
    let root = c.mother(loc, slash, lex, dtrs);
    let fs = c.finish(root)?;

    let dom = domain_union(&head.dom, &complement_element(g, comp)?)?;
    Ok(Sign {
        fs,
        dom,
        dtrs: Some(super::Daughters {
            schema: Schema::HeadComplement { slot },
            signs: vec![head.clone(), comp.clone()],
        }),
        licenser,
    })
}

/// The adjunct's MOD unifies with the head's SYNSEM; the mother shares the
/// head's LOC and LEX. The adjunct stays a separate domain element.
pub fn apply_head_adjunct(
    g: &Grammar,
    head: &Arc<Sign>,
    adjunct: &Arc<Sign>,
) -> Result<Sign, SchemaError> {
    disjoint(head, adjunct)?;
    let licenser = pending(head, adjunct)?;
    let p = &g.paths;
    let mut c = Ctx::new(g);
    let h = c.w.embed(&head.fs);
    let a = c.w.embed(&adjunct.fs);
    let m = c.w.path(a, &p.mod_).ok_or(SchemaError::NoMod)?;
    let hss = c.at(h, &p.synsem)?;
    c.w.unify(m, hss)?;

    let loc = c.at(h, &p.loc)?;
    let lex = c.at(h, &p.lex)?;
    let hs = c.slash(h);
    let as_ = c.slash(a);
    let slash = c.union_slash(hs, as_)?;
    let hdtr = c.shallow(h)?;
    let adtr = c.shallow(a)?;
    let dtrs = c.w.avm(
        g.t.head_adj,
        vec![(g.f.head_dtr, hdtr), (g.f.adj_dtr, adtr)],
    );
    let root = c.mother(loc, slash, lex, dtrs);
    let fs = c.finish(root)?;

    let dom = domain_union(&head.dom, &complement_element(g, adjunct)?)?;
    Ok(Sign {
        fs,
        dom,
        dtrs: Some(super::Daughters {
            schema: Schema::HeadAdjunct,
            signs: vec![head.clone(), adjunct.clone()],
        }),
        licenser,
    })
}

/// Verb cluster schema: the cluster daughter's SYNSEM (LEX + required)
/// saturates the head's VCOMP. Mother VCOMP none, LEX +, DOM = head DOM
/// union cluster DOM. Argument attraction follows from the reentrancies in
/// the head's lexical entry.
pub fn apply_verb_cluster(
    g: &Grammar,
    head: &Arc<Sign>,
    cluster: &Arc<Sign>,
) -> Result<Sign, SchemaError> {
    disjoint(head, cluster)?;
    let licenser = pending(head, cluster)?;
    let p = &g.paths;
    let mut c = Ctx::new(g);
    let h = c.w.embed(&head.fs);
    let k = c.w.embed(&cluster.fs);
    let vc = c.at(h, &p.vcomp)?;
    if g.is_a(c.w.ty(vc), g.t.none) {
        return Err(SchemaError::NoVcomp);
    }
    let klex = c.at(k, &p.lex)?;
    let plus = c.atom(g.t.plus);
    c.w.unify(klex, plus)
        .map_err(|_| SchemaError::ClusterNotLex)?;
    let kss = c.at(k, &p.synsem)?;
    c.w.unify(vc, kss)?;

    let hd = c.at(h, &p.head)?;
    let comps = c.at(h, &p.comps)?;
    let none = c.atom(g.t.none);
    let loc = c.local(hd, comps, none);
    let hs = c.slash(h);
    let ks = c.slash(k);
    let slash = c.union_slash(hs, ks)?;
    let lex = c.atom(g.t.plus);
    let hdtr = c.shallow(h)?;
    let kdtr = c.shallow(k)?;
    let empty = c.w.list(Vec::new(), None);
    let dtrs = c.w.avm(
        g.t.head_cluster,
        vec![
            (g.f.head_dtr, hdtr),
            (g.f.cluster_dtr, kdtr),
            (g.f.comp_dtrs, empty),
        ],
    );
    let root = c.mother(loc, slash, lex, dtrs);
    let fs = c.finish(root)?;

    let dom = domain_union(&head.dom, &cluster.dom)?;
    Ok(Sign {
        fs,
        dom,
        dtrs: Some(super::Daughters {
            schema: Schema::VerbCluster,
            signs: vec![head.clone(), cluster.clone()],
        }),
        licenser,
    })
}

/// PVP SLASH introduction: the head's verbal complement is saturated and
/// its LOC goes to SLASH, licensed by an existing verbal projection whose
/// LOC (not LEX) meets the head's requirements. The licenser contributes no
/// domain material.
pub fn apply_pvp_slash_introduction(
    g: &Grammar,
    head: &Arc<Sign>,
    licenser: &Arc<Sign>,
) -> Result<Sign, SchemaError> {
    disjoint(head, licenser)?;
    if licenser.licenser.is_some() {
        return Err(SchemaError::LicenserSlashed);
    }
    if head.licenser.is_some() {
        return Err(SchemaError::SlashOverflow);
    }
    let p = &g.paths;
    let mut c = Ctx::new(g);
    let h = c.w.embed(&head.fs);
    let l = c.w.embed(&licenser.fs);
    let vc = c.at(h, &p.vcomp)?;
    if g.is_a(c.w.ty(vc), g.t.none) {
        return Err(SchemaError::NoVcomp);
    }
    if !c.slash(l).is_empty() {
        return Err(SchemaError::LicenserSlashed);
    }
    if !c.slash(h).is_empty() {
        return Err(SchemaError::SlashOverflow);
    }
    let vloc = match c.w.get(vc, g.f.loc) {
        Some(v) => v,
        None => {
            let v = c.w.var(g.t.local);
            let req = c.w.avm(g.t.synsem, vec![(g.f.loc, v)]);
            c.w.unify(vc, req)?;
            v
        }
    };
    let lloc = c.at(l, &p.loc)?;
    c.w.unify(vloc, lloc)?;
    let none = c.atom(g.t.none);
    c.w.unify(vc, none).ok();

    let hd = c.at(h, &p.head)?;
    let comps = c.at(h, &p.comps)?;
    let none = c.atom(g.t.none);
    let loc = c.local(hd, comps, none);
    let lex = c.atom(g.t.plus);
    let hdtr = c.shallow(h)?;
    let ldtr = c.shallow(l)?;
    let dtrs = c.w.avm(
        g.t.slash_licencing,
        vec![(g.f.head_dtr, hdtr), (g.f.vcomp_dtr, ldtr)],
    );
    let root = c.mother(loc, vec![vloc], lex, dtrs);
    let fs = c.finish(root)?;
    if !g.valence_closed(&fs) {
        return Err(SchemaError::OpenValence);
    }
    Ok(Sign {
        fs,
        dom: head.dom.clone(),
        dtrs: Some(super::Daughters {
            schema: Schema::PvpSlashIntroduction,
            signs: vec![head.clone(), licenser.clone()],
        }),
        licenser: Some(licenser.clone()),
    })
}

/// Binds the head's SLASH element with the filler and inserts the filler's
/// domain material. When the dependency was introduced by a licensing
/// daughter, the filler must be that very sign.
pub fn apply_filler_head(
    g: &Grammar,
    filler: &Arc<Sign>,
    head: &Arc<Sign>,
) -> Result<Sign, SchemaError> {
    if !head.coverage().is_disjoint(filler.footprint()) {
        return Err(SchemaError::Overlap);
    }
    let p = &g.paths;
    let mut c = Ctx::new(g);
    let h = c.w.embed(&head.fs);
    let f = c.w.embed(&filler.fs);
    let hs = c.slash(h);
    let Some(&elem) = hs.first() else {
        return Err(SchemaError::NoSlash);
    };
    if let Some(l) = &head.licenser {
        if !Arc::ptr_eq(l, filler) {
            return Err(SchemaError::LicenserMismatch);
        }
    }
    if filler.licenser.is_some() || !c.slash(f).is_empty() {
        return Err(SchemaError::SlashOverflow);
    }
    let floc = c.at(f, &p.loc)?;
    c.w.unify(elem, floc)?;

    let vform = c
        .at(h, &p.vform)
        .map_err(|_| SchemaError::NotFiniteClause)?;
    let fin = c.atom(g.t.fin);
    c.w.unify(vform, fin)
        .map_err(|_| SchemaError::NotFiniteClause)?;
    let comps = c.at(h, &p.comps)?;
    match c.w.list_view(comps) {
        Some((items, None)) if items.is_empty() => {}
        _ => return Err(SchemaError::NotFiniteClause),
    }

    let loc = c.at(h, &p.loc)?;
    let lex = c.at(h, &p.lex)?;
    let hdtr = c.shallow(h)?;
    let fdtr = c.shallow(f)?;
    let dtrs = c.w.avm(
        g.t.filler_head,
        vec![(g.f.head_dtr, hdtr), (g.f.filler_dtr, fdtr)],
    );
    let root = c.mother(loc, Vec::new(), lex, dtrs);
    let fs = c.finish(root)?;

    let finite: Vec<usize> = head
        .dom
        .elements()
        .iter()
        .filter(|e| e.kind == ElementKind::Verb { finite: true })
        .filter_map(|e| e.coverage.min())
        .collect();
    let [pos] = finite[..] else {
        return Err(SchemaError::NotFiniteClause);
    };
    let dom = insert_filler_domain(g, &head.dom, filler, pos)?;
    Ok(Sign {
        fs,
        dom,
        dtrs: Some(super::Daughters {
            schema: Schema::FillerHead,
            signs: vec![filler.clone(), head.clone()],
        }),
        licenser: None,
    })
}

/// Re-applies `schema` to `signs` (in [`super::Daughters`] order).
pub fn apply(g: &Grammar, schema: Schema, signs: &[Arc<Sign>]) -> Result<Sign, SchemaError> {
    let [a, b] = signs else {
        return Err(SchemaError::Malformed("schemata are binary"));
    };
    match schema {
        Schema::HeadComplement { slot } => apply_head_complement_at(g, a, b, slot),
        Schema::HeadAdjunct => apply_head_adjunct(g, a, b),
        Schema::VerbCluster => apply_verb_cluster(g, a, b),
        Schema::PvpSlashIntroduction => apply_pvp_slash_introduction(g, a, b),
        Schema::FillerHead => apply_filler_head(g, a, b),
    }
}

/// True iff every COMPS and SUBJ list in the sign has determinate length,
/// counting lists still tied to an unsaturated VCOMP as determinate.
pub fn check_comps_closed(g: &Grammar, s: &Sign) -> bool {
    g.valence_closed(&s.fs)
}

/// A phonologically empty verbal sign whose LOC is its own SLASH element and
/// whose COMPS is an open list. `requirement`, when given, is unified into
/// the trace's SYNSEM.
pub fn make_vcomp_trace(
    g: &Grammar,
    requirement: Option<&FeatureStructure>,
    mode: Mode,
) -> Result<Sign, SchemaError> {
    if mode != Mode::Trace {
        return Err(SchemaError::TraceModeOnly);
    }
    let f = g.f.clone();
    let t = g.t.clone();
    let mut c = Ctx::new(g);
    let head = c.w.var(t.verb);
    let comps = c.w.var(g.hierarchy.list());
    let cat = c.w.avm(t.cat, vec![(f.head, head), (f.comps, comps)]);
    let loc = c.w.avm(t.local, vec![(f.cat, cat)]);
    let set = c.w.set(vec![loc]);
    let inher = c.w.avm(t.inher, vec![(f.slash, set)]);
    let nonloc = c.w.avm(t.nonloc, vec![(f.inher, inher)]);
    let ss = c.w.avm(t.synsem, vec![(f.loc, loc), (f.nonloc, nonloc)]);
    let root = c.w.avm(t.trace, vec![(f.synsem, ss)]);
    if let Some(r) = requirement {
        let r = c.w.embed(r);
        c.w.unify(ss, r)?;
    }
    let fs = c.finish(root)?;
    Ok(Sign {
        fs,
        dom: Domain::empty(),
        dtrs: None,
        licenser: None,
    })
}
