use super::{make_glued_object, GluedObject, StalkSel};
use crate::error::{CpmError, Result};
use crate::homalg::{cone_of_square, ChainMap};
use crate::quiverize::QuiverRepObject;

/// Replaces node `v` of piece `p` by a retract-equivalent complex.
/// Requires ψ∘φ = id with φ: C → C′ a quasi-isomorphism. Arrows are
/// conjugated (φ after, ψ before) and comparisons are adjusted on both ends.
pub fn transport_node(x: &GluedObject, p: usize, v: usize, phi: &ChainMap, psi: &ChainMap) -> Result<GluedObject> {
    let rep = x.reps.get(p).ok_or_else(|| CpmError::Invalid(format!("no piece {p}")))?;
    let c = rep.nodes.get(v).ok_or_else(|| CpmError::Invalid(format!("no node {v}")))?;
    if phi.source() != c || psi.target() != c || phi.target() != psi.source() {
        return Err(CpmError::Shape("transport maps do not match node".into()));
    }
    if psi.compose(phi)? != ChainMap::identity(c) {
        return Err(CpmError::Invalid("transport maps are not a retraction".into()));
    }
    let c2 = phi.target().clone();
    let mut nodes = rep.nodes.clone();
    nodes[v] = c2.clone();
    let mut arrows = Vec::with_capacity(rep.arrows.len());
    // per arrow: Into: Cone(a) → Cone(a′), Out: Cone(a′) → Cone(a)
    let mut into = Vec::new();
    let mut out = Vec::new();
    for (i, a) in rep.arrows.iter().enumerate() {
        let qa = &rep.quiver.arrows[i];
        let (s_hit, t_hit) = (qa.source == v, qa.target == v);
        if !s_hit && !t_hit {
            arrows.push(a.clone());
            into.push(None);
            out.push(None);
            continue;
        }
        let src = &rep.nodes[qa.source];
        let tgt = &rep.nodes[qa.target];
        let id_s = ChainMap::identity(src);
        let id_t = ChainMap::identity(tgt);
        let mut a2 = a.clone();
        if s_hit {
            a2 = a2.compose(psi)?;
        }
        if t_hit {
            a2 = phi.compose(&a2)?;
        }
        let a2 = a2.with_ends(nodes[qa.source].clone(), nodes[qa.target].clone())?;
        let (fs, bs) = if s_hit { (phi, psi) } else { (&id_s, &id_s) };
        let (ft, bt) = if t_hit { (phi, psi) } else { (&id_t, &id_t) };
        into.push(Some(cone_of_square(a, &a2, fs, ft)?));
        out.push(Some(cone_of_square(&a2, a, bs, bt)?));
        arrows.push(a2);
    }
    let new_rep = QuiverRepObject::new(rep.quiver.clone(), nodes, arrows)?;
    let into_of = |sel: StalkSel| -> Option<ChainMap> {
        match sel {
            StalkSel::Node(w) if w == v => Some(phi.clone()),
            StalkSel::Arrow(a) => into[a].clone(),
            _ => None,
        }
    };
    let out_of = |sel: StalkSel| -> Option<ChainMap> {
        match sel {
            StalkSel::Node(w) if w == v => Some(psi.clone()),
            StalkSel::Arrow(a) => out[a].clone(),
            _ => None,
        }
    };
    let mut u = Vec::with_capacity(x.u.len());
    for (o, uo) in x.cover.overlaps.iter().zip(&x.u) {
        let mut m = uo.clone();
        if o.from.0 == p {
            if let Some(b) = out_of(o.from.1) {
                m = m.compose(&b)?;
            }
        }
        if o.to.0 == p {
            if let Some(f) = into_of(o.to.1) {
                m = f.compose(&m)?;
            }
        }
        u.push(m);
    }
    let mut reps = x.reps.clone();
    reps[p] = new_rep;
    make_glued_object(&x.cover, reps, u)
}
