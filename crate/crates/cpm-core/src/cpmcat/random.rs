//! Seeded generators of glued objects.
//!
//! Objects are sums of strings and bands: a run of consecutive cells on one
//! piece carries k[−s] with nonzero scalar arrows between its cells, so the
//! only spokes with non-acyclic stalks are the run's two boundary spokes.
//! Across a glued strand the walk continues on the partner piece with a run
//! whose boundary stalk sits in the same degree, and the comparison maps one
//! boundary generator to the other. Contractible fluff is then mixed in by
//! node transport so differentials and comparisons are not diagonal.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{make_glued_object, transport_node, CoverPresentation, GluedObject, Overlap, StalkSel};
use crate::error::{CpmError, Result};
use crate::field::{Field, Scalar};
use crate::homalg::random::{random_closed_map_with, random_complex_with, random_invertible, rng};
use crate::homalg::{cone, ChainComplex, ChainMap};
use crate::matrix::Matrix;
use crate::quiverize::{quiver_of, Base, Fishbone, LineQuiver, QuiverRepObject};
use crate::ribbon::{Side, SpokeRef};

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub max_summands: usize,
    pub fluff: usize,
    pub degrees: i32,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_summands: 3, fluff: 2, degrees: 1 }
    }
}

#[derive(Clone, Debug)]
struct Run {
    piece: usize,
    nodes: Vec<usize>,
    deg: i32,
    /// interior arrows with their scalars
    inner: Vec<(usize, Scalar)>,
}

struct Crossing {
    overlap: usize,
    from_run: usize,
    to_run: usize,
    lambda: Scalar,
}

/// Pending boundary of a run: (piece, arrow, stalk degree).
type Pending = (usize, usize, i32);

fn node_count(c: &CoverPresentation, p: usize) -> usize {
    c.pieces[p].nodes.len()
}

/// Arrow joining node j and node j+1, if any.
fn link(q: &LineQuiver, j: i64) -> Option<usize> {
    let n = q.nodes.len() as i64;
    if q.cyclic() {
        Some((j + 1).rem_euclid(n) as usize)
    } else if j >= 0 && j + 1 < n {
        Some(j as usize)
    } else {
        None
    }
}

/// (left node, right node) of an arrow.
fn ends(q: &LineQuiver, a: usize) -> (usize, usize) {
    let n = q.nodes.len();
    if q.cyclic() {
        ((a + n - 1) % n, a)
    } else {
        (a, a + 1)
    }
}

fn nonzero(field: Field, r: &mut impl Rng) -> Scalar {
    let v = [1, -1, 2, -2, 3][r.gen_range(0..5)];
    field.from_i64(v)
}

struct Walker<'a> {
    cover: &'a CoverPresentation,
    field: Field,
    runs: Vec<Run>,
    crossings: Vec<Crossing>,
    /// (piece, arrow) -> (overlap, is_from)
    glue: BTreeMap<(usize, usize), (usize, bool)>,
    budget: usize,
}

impl Walker<'_> {
    fn stalk_deg(&self, run: &Run, a: usize) -> i32 {
        let src = self.cover.pieces[run.piece].arrows[a].source;
        if run.nodes.contains(&src) {
            run.deg - 1
        } else {
            run.deg
        }
    }

    /// Run on piece p starting at node z and extending away from arrow a.
    fn run_from(&self, p: usize, a: usize, z: usize, len: usize, s: i32, r: &mut impl Rng) -> (Run, Option<usize>) {
        let q = &self.cover.pieces[p];
        let (l, _) = ends(q, a);
        let step: i64 = if z == l { -1 } else { 1 };
        let n = q.nodes.len() as i64;
        let nodes: Vec<usize> = (0..len as i64)
            .map(|i| {
                let j = z as i64 + step * i;
                if q.cyclic() { j.rem_euclid(n) as usize } else { j as usize }
            })
            .collect();
        let mut inner = Vec::new();
        for w in nodes.windows(2) {
            let left = if step > 0 { w[0] } else { w[1] };
            let lk = link(q, left as i64).expect("consecutive nodes are linked");
            inner.push((lk, nonzero(self.field, r)));
        }
        let last = *nodes.last().expect("nonempty run") as i64;
        let exit = if step > 0 { link(q, last) } else { link(q, last - 1) };
        (Run { piece: p, nodes, deg: s, inner }, exit)
    }

    fn max_len(&self, p: usize, a: usize, z: usize) -> usize {
        let q = &self.cover.pieces[p];
        let n = q.nodes.len();
        if q.cyclic() {
            return n - 1;
        }
        let (l, _) = ends(q, a);
        if z == l {
            z + 1
        } else {
            n - z
        }
    }

    /// Extends from a pending boundary until an open spoke or line end, or,
    /// when `close` is given, until the walk re-enters that boundary.
    fn extend(&mut self, pend: Pending, pend_run: usize, close: Option<(Pending, usize)>, depth: usize, r: &mut impl Rng) -> bool {
        if self.budget == 0 || depth == 0 {
            return false;
        }
        self.budget -= 1;
        let (p, a, t) = pend;
        let Some(&(o, is_from)) = self.glue.get(&(p, a)) else {
            return close.is_none();
        };
        let ov: &Overlap = &self.cover.overlaps[o];
        let (p2, sel) = if is_from { ov.to } else { ov.from };
        let StalkSel::Arrow(a2) = sel else {
            return false;
        };
        let lambda = nonzero(self.field, r);
        let mk = |me: usize, other: usize| if is_from { (me, other) } else { (other, me) };
        if let Some(((cp, ca, ct), crun)) = close {
            if (cp, ca) == (p2, a2) && ct == t {
                let (f, to) = mk(pend_run, crun);
                self.crossings.push(Crossing { overlap: o, from_run: f, to_run: to, lambda });
                return true;
            }
        }
        let q = &self.cover.pieces[p2];
        let qa = &q.arrows[a2];
        let mut opts: Vec<(usize, usize)> = Vec::new();
        for z in [qa.source, qa.target] {
            for len in 1..=self.max_len(p2, a2, z) {
                opts.push((z, len));
            }
        }
        opts.shuffle(r);
        opts.truncate(4);
        for (z, len) in opts {
            let s = if z == qa.source { t + 1 } else { t };
            let (run, exit) = self.run_from(p2, a2, z, len, s, r);
            let save = (self.runs.len(), self.crossings.len());
            self.runs.push(run);
            let me = save.0;
            let (f, to) = mk(pend_run, me);
            self.crossings.push(Crossing { overlap: o, from_run: f, to_run: to, lambda: lambda.clone() });
            let ok = match exit {
                None => close.is_none(),
                Some(b) => {
                    let tb = self.stalk_deg(&self.runs[me], b);
                    self.extend((p2, b, tb), me, close, depth - 1, r)
                }
            };
            if ok {
                return true;
            }
            self.runs.truncate(save.0);
            self.crossings.truncate(save.1);
        }
        false
    }

    fn one_summand(&mut self, degrees: i32, r: &mut impl Rng) -> bool {
        let p = r.gen_range(0..self.cover.pieces.len());
        let q = &self.cover.pieces[p];
        let n = node_count(self.cover, p);
        let s = r.gen_range(-degrees..=degrees);
        if q.cyclic() && r.gen_bool(0.15) {
            // a band living on one circle
            let inner = (0..q.arrows.len()).map(|a| (a, nonzero(self.field, r))).collect();
            self.runs.push(Run { piece: p, nodes: (0..n).collect(), deg: s, inner });
            return true;
        }
        let j0 = r.gen_range(0..n);
        let maxl = if q.cyclic() { n - 1 } else { n - j0 };
        if maxl == 0 {
            return false;
        }
        let len = r.gen_range(1..=maxl);
        let nodes: Vec<usize> = (0..len).map(|i| (j0 + i) % n).collect();
        let mut inner = Vec::new();
        for i in 0..len - 1 {
            inner.push((link(q, (j0 + i) as i64).expect("linked"), nonzero(self.field, r)));
        }
        let left = link(q, j0 as i64 - 1);
        let right = link(q, (j0 + len - 1) as i64);
        let save = (self.runs.len(), self.crossings.len());
        self.runs.push(Run { piece: p, nodes, deg: s, inner });
        let me = save.0;
        let pend = |w: &Walker, b: Option<usize>| b.map(|b| (p, b, w.stalk_deg(&w.runs[me], b)));
        let (lp, rp) = (pend(self, left), pend(self, right));
        self.budget = 400;
        let ok = match (lp, rp) {
            (None, None) => true,
            (Some(x), None) | (None, Some(x)) => self.extend(x, me, None, 8, r),
            (Some(lp), Some(rp)) => {
                if r.gen_bool(0.5) && self.extend(rp, me, Some((lp, me)), 8, r) {
                    true
                } else {
                    self.runs.truncate(me + 1);
                    self.crossings.truncate(save.1);
                    self.extend(rp, me, None, 8, r) && {
                        self.budget = 400;
                        self.extend(lp, me, None, 8, r)
                    }
                }
            }
        };
        if !ok {
            self.runs.truncate(save.0);
            self.crossings.truncate(save.1);
        }
        ok
    }
}

/// Positions of a run's generator: node -> degree -> index among that node's summands.
fn summand_index(runs: &[Run], p: usize) -> BTreeMap<(usize, usize), usize> {
    let mut count: BTreeMap<(usize, i32), usize> = BTreeMap::new();
    let mut out = BTreeMap::new();
    for (ri, run) in runs.iter().enumerate().filter(|(_, r)| r.piece == p) {
        for &v in &run.nodes {
            let c = count.entry((v, run.deg)).or_insert(0);
            out.insert((ri, v), *c);
            *c += 1;
        }
    }
    out
}

fn assemble(cover: &CoverPresentation, field: Field, runs: &[Run], crossings: &[Crossing]) -> Result<GluedObject> {
    let mut reps = Vec::new();
    for (p, q) in cover.pieces.iter().enumerate() {
        let idx = summand_index(runs, p);
        let mut dims: Vec<BTreeMap<i32, usize>> = vec![BTreeMap::new(); q.nodes.len()];
        for run in runs.iter().filter(|r| r.piece == p) {
            for &v in &run.nodes {
                *dims[v].entry(run.deg).or_insert(0) += 1;
            }
        }
        let nodes: Vec<ChainComplex> = dims
            .iter()
            .map(|d| ChainComplex::from_parts(field, d.clone(), BTreeMap::new()))
            .collect();
        let mut arrows = Vec::new();
        for (a, qa) in q.arrows.iter().enumerate() {
            let (sc, tc) = (&nodes[qa.source], &nodes[qa.target]);
            let mut comps: BTreeMap<i32, Matrix> = BTreeMap::new();
            for (ri, run) in runs.iter().enumerate().filter(|(_, r)| r.piece == p) {
                let Some((_, lam)) = run.inner.iter().find(|(x, _)| *x == a) else {
                    continue;
                };
                let m = comps
                    .entry(run.deg)
                    .or_insert_with(|| Matrix::zeros(field, tc.dim(run.deg), sc.dim(run.deg)));
                m.set(idx[&(ri, qa.target)], idx[&(ri, qa.source)], lam.clone());
            }
            arrows.push(ChainMap::new(sc.clone(), tc.clone(), 0, comps)?);
        }
        reps.push(QuiverRepObject::new(q.clone(), nodes, arrows)?);
    }
    // boundary generator position inside a cone stalk
    let gen_pos = |ri: usize, p: usize, a: usize| -> (i32, usize) {
        let run = &runs[ri];
        let idx = summand_index(runs, p);
        let f = &reps[p].arrows[a];
        let qa = &cover.pieces[p].arrows[a];
        if run.nodes.contains(&qa.source) {
            (run.deg - 1, idx[&(ri, qa.source)])
        } else {
            (run.deg, f.source().dim(run.deg + 1) + idx[&(ri, qa.target)])
        }
    };
    let mut u = Vec::new();
    for (o, ov) in cover.overlaps.iter().enumerate() {
        let (StalkSel::Arrow(af), StalkSel::Arrow(at)) = (ov.from.1, ov.to.1) else {
            return Err(CpmError::Invalid("string generator needs spoke overlaps".into()));
        };
        let s = cone(&reps[ov.from.0].arrows[af])?;
        let t = cone(&reps[ov.to.0].arrows[at])?;
        let mut comps: BTreeMap<i32, Matrix> = BTreeMap::new();
        for c in crossings.iter().filter(|c| c.overlap == o) {
            let (d1, i) = gen_pos(c.from_run, ov.from.0, af);
            let (d2, j) = gen_pos(c.to_run, ov.to.0, at);
            debug_assert_eq!(d1, d2);
            let m = comps.entry(d1).or_insert_with(|| Matrix::zeros(field, t.dim(d1), s.dim(d1)));
            m.set(j, i, c.lambda.clone());
        }
        u.push(ChainMap::new(s, t, 0, comps)?);
    }
    make_glued_object(cover, reps, u)
}

/// Random string/band object on a skeleton cover.
pub fn random_glued_object(cover: &CoverPresentation, field: Field, seed: u64) -> Result<GluedObject> {
    random_glued_object_with(cover, field, &mut rng(seed), &GenOptions::default())
}

pub fn random_glued_object_with(cover: &CoverPresentation, field: Field, r: &mut impl Rng, opts: &GenOptions) -> Result<GluedObject> {
    let mut glue = BTreeMap::new();
    for (o, ov) in cover.overlaps.iter().enumerate() {
        if let (StalkSel::Arrow(a), StalkSel::Arrow(b)) = (ov.from.1, ov.to.1) {
            glue.insert((ov.from.0, a), (o, true));
            glue.insert((ov.to.0, b), (o, false));
        }
    }
    let mut w = Walker { cover, field, runs: vec![], crossings: vec![], glue, budget: 0 };
    let want = r.gen_range(1..=opts.max_summands.max(1));
    let mut made = 0;
    for _ in 0..want * 20 {
        if made == want {
            break;
        }
        if w.one_summand(opts.degrees, r) {
            made += 1;
        }
    }
    let mut x = assemble(cover, field, &w.runs, &w.crossings)?;
    for _ in 0..opts.fluff {
        let p = r.gen_range(0..cover.pieces.len());
        let v = r.gen_range(0..cover.pieces[p].nodes.len());
        x = fluff(&x, p, v, r)?;
    }
    Ok(x)
}

/// C′ = P(C ⊕ Cone(id_X))P⁻¹ with φ = P[1; h], ψ = [1, 0]P⁻¹.
pub fn fluff(x: &GluedObject, p: usize, v: usize, r: &mut impl Rng) -> Result<GluedObject> {
    let c = &x.reps[p].nodes[v];
    let field = c.field();
    let xc = random_complex_with(field, r, 2, 1).shift(r.gen_range(-1..=1));
    let e = cone(&ChainMap::identity(&xc))?;
    let h = random_closed_map_with(c, &e, r);
    let sum = ChainComplex::direct_sum(&[c.clone(), e.clone()], field);
    let mut degs: Vec<i32> = sum.dims().keys().copied().collect();
    degs.extend(c.dims().keys());
    degs.sort_unstable();
    degs.dedup();
    let conj: BTreeMap<i32, Matrix> = degs.iter().map(|&n| (n, random_invertible(field, sum.dim(n), r))).collect();
    let mut diffs = BTreeMap::new();
    for &n in &degs {
        if sum.dim(n) > 0 && sum.dim(n + 1) > 0 {
            let inv = conj[&n].inverse().expect("invertible");
            diffs.insert(n, conj[&(n + 1)].mul(&sum.d(n)).mul(&inv));
        }
    }
    let c2 = ChainComplex::new(field, sum.dims().clone(), diffs)?;
    let mut pc = BTreeMap::new();
    let mut qc = BTreeMap::new();
    for &n in &degs {
        let (dc, de) = (c.dim(n), e.dim(n));
        if dc + de == 0 {
            continue;
        }
        let col = Matrix::identity(field, dc).vcat(&h.comp(n));
        pc.insert(n, conj[&n].mul(&col));
        let row = Matrix::identity(field, dc).hcat(&Matrix::zeros(field, dc, de));
        qc.insert(n, row.mul(&conj[&n].inverse().expect("invertible")));
    }
    let phi = ChainMap::new(c.clone(), c2.clone(), 0, pc)?;
    let psi = ChainMap::new(c2, c.clone(), 0, qc)?;
    transport_node(x, p, v, &phi, &psi)
}

/// Random representation of a quiver with random complexes and closed maps.
pub fn random_rep(q: &LineQuiver, field: Field, r: &mut impl Rng, span: i32, max_dim: usize) -> Result<QuiverRepObject> {
    let nodes: Vec<ChainComplex> = (0..q.nodes.len())
        .map(|_| random_complex_with(field, r, span, max_dim))
        .collect();
    let arrows = q
        .arrows
        .iter()
        .map(|a| random_closed_map_with(&nodes[a.source], &nodes[a.target], r))
        .collect();
    QuiverRepObject::new(q.clone(), nodes, arrows)
}

/// Single-piece object from a representation.
pub fn lift(cover: &CoverPresentation, rep: QuiverRepObject) -> Result<GluedObject> {
    if cover.pieces.len() != 1 || !cover.overlaps.is_empty() {
        return Err(CpmError::Invalid("lift needs a single-piece cover".into()));
    }
    make_glued_object(cover, vec![rep], vec![])
}

/// k[−deg] on one node, zero elsewhere.
pub fn skyscraper(q: &LineQuiver, field: Field, node: usize, deg: i32) -> Result<QuiverRepObject> {
    let nodes: Vec<ChainComplex> = (0..q.nodes.len())
        .map(|v| if v == node { ChainComplex::concentrated(field, deg, 1) } else { ChainComplex::zero(field) })
        .collect();
    let arrows = q.arrows.iter().map(|a| ChainMap::zero(&nodes[a.source], &nodes[a.target], 0)).collect();
    QuiverRepObject::new(q.clone(), nodes, arrows)
}

/// Splits a circle quiver with single-sided feet into two arcs: feet [0, m) and
/// [m, n). The arcs overlap in the cells right of feet m−1 and n−1.
pub struct TwoArcCover {
    pub cover: CoverPresentation,
    /// line node -> circle node, per arc
    pub node_maps: [Vec<usize>; 2],
    pub arrow_maps: [Vec<usize>; 2],
}

pub fn two_arc_cover(circle: &LineQuiver, m: usize) -> Result<TwoArcCover> {
    let n = circle.arrows.len();
    if !circle.cyclic() || n != circle.nodes.len() || m == 0 || m >= n {
        return Err(CpmError::Invalid("two-arc split needs a circle with single-sided feet and 0 < m < n".into()));
    }
    let flags: Vec<(bool, bool)> = circle.arrows.iter().map(|a| (a.side == Side::Up, a.side == Side::Down)).collect();
    let arc = |lo: usize, hi: usize| -> Result<(LineQuiver, Vec<usize>, Vec<usize>)> {
        let q = quiver_of(&Fishbone::evenly(Base::Line, &flags[lo..hi])?)?;
        let nodes = (0..=hi - lo).map(|i| (lo + i + n - 1) % n).collect();
        let arrows = (lo..hi).collect();
        Ok((q, nodes, arrows))
    };
    let (qa, na, aa) = arc(0, m)?;
    let (qb, nb, ab) = arc(m, n)?;
    let overlaps = vec![
        Overlap { from: (0, StalkSel::Node(m)), to: (1, StalkSel::Node(0)) },
        Overlap { from: (0, StalkSel::Node(0)), to: (1, StalkSel::Node(n - m)) },
    ];
    Ok(TwoArcCover {
        cover: CoverPresentation { pieces: vec![qa, qb], overlaps, skeleton: None },
        node_maps: [na, nb],
        arrow_maps: [aa, ab],
    })
}

impl TwoArcCover {
    /// Restriction of a circle representation to the two arcs, glued by identities.
    pub fn restrict(&self, rep: &QuiverRepObject) -> Result<GluedObject> {
        let mut reps = Vec::new();
        for (k, q) in self.cover.pieces.iter().enumerate() {
            let nodes: Vec<ChainComplex> = self.node_maps[k].iter().map(|&v| rep.nodes[v].clone()).collect();
            let arrows = self.arrow_maps[k].iter().map(|&a| rep.arrows[a].clone()).collect();
            reps.push(QuiverRepObject::new(q.clone(), nodes, arrows)?);
        }
        let u = self
            .cover
            .overlaps
            .iter()
            .map(|o| {
                let StalkSel::Node(v) = o.from.1 else { unreachable!("node overlaps") };
                ChainMap::identity(&reps[0].nodes[v])
            })
            .collect();
        make_glued_object(&self.cover, reps, u)
    }
}

/// Spoke reference of a piece arrow in a skeleton cover.
pub fn spoke_of_arrow(cover: &CoverPresentation, p: usize, a: usize) -> Result<SpokeRef> {
    let sk = cover.skeleton()?;
    let qa = &cover.pieces[p].arrows[a];
    Ok(SpokeRef { foot: sk.pieces[p].feet[qa.foot].id, side: qa.side })
}
