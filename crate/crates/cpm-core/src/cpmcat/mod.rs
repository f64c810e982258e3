//! Glued categories over covers by fishbones: objects are local quiver
//! representations plus comparison quasi-isomorphisms between shared stalks.

mod hom;
pub mod random;
mod transport;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use hom::{
    euler_pairing, glued_hom, hom_complex_glued, rep_hom, stalk_functor, GluedHom, RepHom,
};
pub use transport::transport_node;

use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::homalg::json::{complex_from_json, complex_to_json, map_from_json, map_to_json};
use crate::homalg::{cone, is_quasi_iso, ChainComplex, ChainMap};
use crate::quiverize::{piece_quiver, LineQuiver, QuiverRepObject};
use crate::ribbon::{ChordalRibbonGraph, Id, Side, Skeleton, SpokeRef};

pub use crate::quiverize::QuiverRepObject as RepObject;

/// A stalk on one piece: a node complex or the cone of an arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StalkSel {
    Node(usize),
    Arrow(usize),
}

/// Comparison direction: stalk on `from` is compared into stalk on `to`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub from: (usize, StalkSel),
    pub to: (usize, StalkSel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverPresentation {
    pub pieces: Vec<LineQuiver>,
    pub overlaps: Vec<Overlap>,
    /// Present for covers of skeleton graphs (one piece per skeleton piece).
    pub skeleton: Option<Skeleton>,
}

/// External names for stalks of a skeleton cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeSel {
    /// Zero-section cell right of the given foot.
    Cell(Id),
    Spoke(SpokeRef),
}

impl CoverPresentation {
    pub fn from_skeleton(sk: &Skeleton) -> Result<CoverPresentation> {
        let pieces = sk.pieces.iter().map(piece_quiver).collect::<Result<Vec<_>>>()?;
        let mut cov = CoverPresentation { pieces, overlaps: vec![], skeleton: Some(sk.clone()) };
        for fam in &sk.families {
            for (d, u) in fam.strands() {
                let from = cov.resolve(EdgeSel::Spoke(SpokeRef { foot: d, side: Side::Down }))?;
                let to = cov.resolve(EdgeSel::Spoke(SpokeRef { foot: u, side: Side::Up }))?;
                cov.overlaps.push(Overlap { from, to });
            }
        }
        Ok(cov)
    }

    pub fn skeleton(&self) -> Result<&Skeleton> {
        self.skeleton
            .as_ref()
            .ok_or_else(|| CpmError::Invalid("cover has no skeleton".into()))
    }

    pub fn resolve(&self, e: EdgeSel) -> Result<(usize, StalkSel)> {
        let sk = self.skeleton()?;
        let foot = match e {
            EdgeSel::Cell(f) => f,
            EdgeSel::Spoke(s) => s.foot,
        };
        let (p, pos) = sk
            .locate(foot)
            .ok_or_else(|| CpmError::Invalid(format!("unknown foot {foot}")))?;
        let line_shift = usize::from(!sk.pieces[p].circle);
        match e {
            EdgeSel::Cell(_) => Ok((p, StalkSel::Node(pos + line_shift))),
            EdgeSel::Spoke(s) => {
                let fpos = self.pieces[p]
                    .arrow_of(pos, s.side)
                    .ok_or_else(|| CpmError::Invalid(format!("no {:?} spoke at foot {foot}", s.side)))?;
                Ok((p, StalkSel::Arrow(fpos)))
            }
        }
    }

    /// All external stalk names: every cell and every spoke.
    pub fn edges(&self) -> Result<Vec<EdgeSel>> {
        let sk = self.skeleton()?;
        let mut out: Vec<EdgeSel> = sk.feet().map(|f| EdgeSel::Cell(f.id)).collect();
        out.extend(sk.spokes().into_iter().map(EdgeSel::Spoke));
        out.sort();
        Ok(out)
    }

    /// Maps a graph edge (any of its half-edges) to a stalk name.
    pub fn edge_of_half(&self, h: Id) -> Result<EdgeSel> {
        let sk = self.skeleton()?;
        let g = sk.to_graph()?;
        if !g.graph.attach.contains_key(&h) {
            return Err(CpmError::Invalid(format!("unknown edge {h}")));
        }
        if let Some(s) = crate::ribbon::spoke_of_half(h) {
            return Ok(EdgeSel::Spoke(s));
        }
        // zero-section half-edge: name the cell by the foot on its left
        let zo = if g.forward.contains(&h) { h } else { g.graph.iota(h) };
        if g.graph.is_open(h) && !g.forward.contains(&h) {
            return Err(CpmError::Invalid(format!("edge {h} is the left ray of a line")));
        }
        Ok(EdgeSel::Cell(zo / 4))
    }

    pub fn same_shape(&self, o: &CoverPresentation) -> bool {
        self.pieces == o.pieces && self.overlaps == o.overlaps
    }
}

pub fn cover_of(g: &ChordalRibbonGraph) -> Result<CoverPresentation> {
    CoverPresentation::from_skeleton(&Skeleton::from_graph(g)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedObject {
    pub cover: CoverPresentation,
    pub reps: Vec<QuiverRepObject>,
    pub u: Vec<ChainMap>,
}

pub fn local_stalk(rep: &QuiverRepObject, sel: StalkSel) -> Result<ChainComplex> {
    match sel {
        StalkSel::Node(v) => rep
            .nodes
            .get(v)
            .cloned()
            .ok_or_else(|| CpmError::Invalid(format!("no node {v}"))),
        StalkSel::Arrow(a) => cone(
            rep.arrows
                .get(a)
                .ok_or_else(|| CpmError::Invalid(format!("no arrow {a}")))?,
        ),
    }
}

impl GluedObject {
    pub fn field(&self) -> Field {
        self.reps.first().map_or(Field::Q, QuiverRepObject::field)
    }

    pub fn stalk_at(&self, piece: usize, sel: StalkSel) -> Result<ChainComplex> {
        local_stalk(
            self.reps
                .get(piece)
                .ok_or_else(|| CpmError::Invalid(format!("no piece {piece}")))?,
            sel,
        )
    }

    /// Per-overlap diagnostics; empty iff the object is valid.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.reps.len() != self.cover.pieces.len() {
            return vec!["wrong number of local representations".into()];
        }
        if self.u.len() != self.cover.overlaps.len() {
            return vec!["wrong number of comparisons".into()];
        }
        for (i, r) in self.reps.iter().enumerate() {
            if r.quiver != self.cover.pieces[i] {
                out.push(format!("piece {i}: representation on the wrong quiver"));
            }
            for e in r.diagnostics() {
                out.push(format!("piece {i}: {e}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (k, (o, u)) in self.cover.overlaps.iter().zip(&self.u).enumerate() {
            let (Ok(s), Ok(t)) = (self.stalk_at(o.from.0, o.from.1), self.stalk_at(o.to.0, o.to.1)) else {
                out.push(format!("overlap {k}: bad selector"));
                continue;
            };
            if u.source() != &s || u.target() != &t {
                out.push(format!("overlap {k}: comparison has wrong source or target"));
            } else if u.check_closed_degree0().is_err() {
                out.push(format!("overlap {k}: comparison is not closed of degree 0"));
            } else if !is_quasi_iso(u).unwrap_or(false) {
                out.push(format!("overlap {k}: comparison not invertible in homotopy category"));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.diagnostics().is_empty()
    }

    pub fn stalk(&self, e: EdgeSel) -> Result<ChainComplex> {
        let (p, s) = self.cover.resolve(e)?;
        self.stalk_at(p, s)
    }

    /// Shift every local value by k; comparisons shift along.
    pub fn shift(&self, k: i32) -> Result<GluedObject> {
        let mut reps = Vec::new();
        for r in &self.reps {
            reps.push(QuiverRepObject::new(
                r.quiver.clone(),
                r.nodes.iter().map(|c| c.shift(k)).collect(),
                r.arrows.iter().map(|a| a.shift(k)).collect(),
            )?);
        }
        let mut u = Vec::new();
        for (o, m) in self.cover.overlaps.iter().zip(&self.u) {
            let s = local_stalk(&reps[o.from.0], o.from.1)?;
            let t = local_stalk(&reps[o.to.0], o.to.1)?;
            // Cone(f)[k] ≅ Cone(f[k]) by (−1)^k on the source summand
            let mut comps = std::collections::BTreeMap::new();
            {
                let js = cone_shift_twist(&reps[o.from.0], o.from.1, &s, k);
                let jt = cone_shift_twist(&reps[o.to.0], o.to.1, &t, k);
                for (n, c) in m.shift(k).comps() {
                    comps.insert(*n, jt(*n).mul(c).mul(&js(*n)));
                }
            }
            u.push(ChainMap::new(s, t, 0, comps)?);
        }
        make_glued_object(&self.cover, reps, u)
    }

    pub fn to_json(&self) -> Result<Value> {
        let sk = self.cover.skeleton()?;
        Ok(json!({
            "skeleton": serde_json::to_value(sk).map_err(|e| CpmError::Parse(e.to_string()))?,
            "reps": self.reps.iter().map(|r| json!({
                "nodes": r.nodes.iter().map(complex_to_json).collect::<Vec<_>>(),
                "arrows": r.arrows.iter().map(map_to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "u": self.u.iter().map(map_to_json).collect::<Vec<_>>(),
        }))
    }

    pub fn from_json(v: &Value) -> Result<GluedObject> {
        let bad = |s: &str| CpmError::Parse(s.to_string());
        let sk: Skeleton = serde_json::from_value(v.get("skeleton").cloned().ok_or_else(|| bad("missing skeleton"))?)
            .map_err(|e| CpmError::Parse(e.to_string()))?;
        if sk.feet().count() > 4096 {
            return Err(bad("skeleton too large"));
        }
        sk.to_graph()?;
        let cover = CoverPresentation::from_skeleton(&sk)?;
        let reps_v = v.get("reps").and_then(Value::as_array).ok_or_else(|| bad("missing reps"))?;
        if reps_v.len() != cover.pieces.len() {
            return Err(bad("wrong number of reps"));
        }
        let mut reps = Vec::new();
        for (q, r) in cover.pieces.iter().zip(reps_v) {
            let nodes = r
                .get("nodes")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing nodes"))?
                .iter()
                .map(complex_from_json)
                .collect::<Result<Vec<_>>>()?;
            let arrows = r
                .get("arrows")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing arrows"))?
                .iter()
                .map(map_from_json)
                .collect::<Result<Vec<_>>>()?;
            reps.push(QuiverRepObject::new(q.clone(), nodes, arrows)?);
        }
        let u = v
            .get("u")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing u"))?
            .iter()
            .map(map_from_json)
            .collect::<Result<Vec<_>>>()?;
        make_glued_object(&cover, reps, u)
    }
}

fn cone_shift_twist<'a>(
    rep: &'a QuiverRepObject,
    sel: StalkSel,
    c: &'a ChainComplex,
    k: i32,
) -> impl Fn(i32) -> crate::matrix::Matrix + 'a {
    move |n| {
        let field = c.field();
        let mut j = crate::matrix::Matrix::identity(field, c.dim(n));
        if let StalkSel::Arrow(a) = sel {
            if k.rem_euclid(2) == 1 {
                for i in 0..rep.arrows[a].source().dim(n + 1) {
                    j.set(i, i, field.from_i64(-1));
                }
            }
        }
        j
    }
}

pub fn make_glued_object(
    cover: &CoverPresentation,
    reps: Vec<QuiverRepObject>,
    u: Vec<ChainMap>,
) -> Result<GluedObject> {
    let o = GluedObject { cover: cover.clone(), reps, u };
    let errs = o.diagnostics();
    if errs.is_empty() {
        return Ok(o);
    }
    if errs.iter().all(|e| e.contains("not invertible")) {
        return Err(CpmError::NotQuasiIso(errs.join("; ")));
    }
    Err(CpmError::Invalid(errs.join("; ")))
}

/// Direct sum of objects on the same cover.
pub fn direct_sum(xs: &[GluedObject]) -> Result<GluedObject> {
    let first = xs.first().ok_or_else(|| CpmError::Invalid("empty sum".into()))?;
    let field = first.field();
    let cov = &first.cover;
    let mut reps = Vec::new();
    for (p, q) in cov.pieces.iter().enumerate() {
        let nodes: Vec<ChainComplex> = (0..q.nodes.len())
            .map(|v| {
                let parts: Vec<ChainComplex> = xs.iter().map(|x| x.reps[p].nodes[v].clone()).collect();
                ChainComplex::direct_sum(&parts, field)
            })
            .collect();
        let mut arrows = Vec::new();
        for (a, qa) in q.arrows.iter().enumerate() {
            let srcs: Vec<ChainComplex> = xs.iter().map(|x| x.reps[p].nodes[qa.source].clone()).collect();
            let tgts: Vec<ChainComplex> = xs.iter().map(|x| x.reps[p].nodes[qa.target].clone()).collect();
            let entries: Vec<(usize, usize, ChainMap)> =
                xs.iter().enumerate().map(|(i, x)| (i, i, x.reps[p].arrows[a].clone())).collect();
            arrows.push(crate::homalg::block_map(&srcs, &tgts, &entries)?.with_ends(
                nodes[qa.source].clone(),
                nodes[qa.target].clone(),
            )?);
        }
        reps.push(QuiverRepObject::new(q.clone(), nodes, arrows)?);
    }
    let mut u = Vec::new();
    for (k, o) in cov.overlaps.iter().enumerate() {
        let s = local_stalk(&reps[o.from.0], o.from.1)?;
        let t = local_stalk(&reps[o.to.0], o.to.1)?;
        let ss: Vec<ChainComplex> = xs.iter().map(|x| x.u[k].source().clone()).collect();
        let ts: Vec<ChainComplex> = xs.iter().map(|x| x.u[k].target().clone()).collect();
        let entries: Vec<(usize, usize, ChainMap)> =
            xs.iter().enumerate().map(|(i, x)| (i, i, x.u[k].clone())).collect();
        let sum = crate::homalg::block_map(&ss, &ts, &entries)?;
        let pf = stalk_permutation(xs, o.from, &s)?;
        let pt = stalk_permutation(xs, o.to, &t)?;
        u.push(transpose_map(&pt)?.compose(&sum)?.compose(&pf)?);
    }
    make_glued_object(cov, reps, u)
}

/// Coordinate permutation from the stalk of a sum to the sum of the stalks.
/// For a cone, whole^n = (⊕ S_i)^{n+1} ⊕ (⊕ T_i)^n while the sum interleaves
/// S_i^{n+1} ⊕ T_i^n part by part.
fn stalk_permutation(xs: &[GluedObject], at: (usize, StalkSel), whole: &ChainComplex) -> Result<ChainMap> {
    let field = whole.field();
    let parts: Vec<ChainComplex> = xs
        .iter()
        .map(|x| x.stalk_at(at.0, at.1))
        .collect::<Result<Vec<_>>>()?;
    let sum = ChainComplex::direct_sum(&parts, field);
    let mut comps = std::collections::BTreeMap::new();
    for (&n, &dim) in whole.dims() {
        let mut m = crate::matrix::Matrix::zeros(field, sum.dim(n), dim);
        match at.1 {
            StalkSel::Node(_) => m = crate::matrix::Matrix::identity(field, dim),
            StalkSel::Arrow(a) => {
                let dims: Vec<(usize, usize)> = xs
                    .iter()
                    .map(|x| {
                        let f = &x.reps[at.0].arrows[a];
                        (f.source().dim(n + 1), f.target().dim(n))
                    })
                    .collect();
                let s_tot: usize = dims.iter().map(|d| d.0).sum();
                let (mut s_off, mut t_off, mut pos) = (0, s_tot, 0);
                for (sd, td) in dims {
                    for j in 0..sd {
                        m.set(pos + j, s_off + j, field.one());
                    }
                    for j in 0..td {
                        m.set(pos + sd + j, t_off + j, field.one());
                    }
                    s_off += sd;
                    t_off += td;
                    pos += sd + td;
                }
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(whole.clone(), sum, 0, comps)
}

fn transpose_map(p: &ChainMap) -> Result<ChainMap> {
    let comps = p.comps().iter().map(|(n, m)| (*n, m.transpose())).collect();
    ChainMap::new(p.target().clone(), p.source().clone(), 0, comps)
}
