//! Rewriting one strand family of a dualizable skeleton.
//!
//! The down run δ_0..δ_{n−1} on wheel L and the up run β_0..β_{n−1} on wheel Q
//! are merged into single spokes carrying the composites, and n−1 Kronecker
//! wheels are inserted in a chain between them. Objects are carried across by
//! minimal models of the filtered cones C(δ) and C(β).

use std::collections::BTreeMap;

use crate::cpmcat::{CoverPresentation, EdgeSel, GluedObject, StalkSel};
use crate::error::{CpmError, Result};
use crate::homalg::transfer::{perturb, sdr, sdr_sum, sdr_with_iota, twist, Sdr};
use crate::homalg::{block_map_graded, cone, ChainComplex, ChainMap};
use crate::matrix::Matrix;
use crate::quiverize::QuiverRepObject;
use crate::ribbon::{Family, Foot, Id, Piece, Side, Skeleton, SpokeRef};

/// Names of the rewritten family: the old runs and the inserted wheels (up, down feet).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRewrite {
    pub downs: Vec<Id>,
    pub ups: Vec<Id>,
    pub kron: Vec<(Id, Id)>,
}

impl FamilyRewrite {
    pub fn merged_down(&self) -> Id {
        *self.downs.last().expect("nonempty family")
    }
    pub fn merged_up(&self) -> Id {
        *self.ups.last().expect("nonempty family")
    }
}

fn down(f: Id) -> EdgeSel {
    EdgeSel::Spoke(SpokeRef { foot: f, side: Side::Down })
}
fn up(f: Id) -> EdgeSel {
    EdgeSel::Spoke(SpokeRef { foot: f, side: Side::Up })
}

/// Graph half of the step.
pub fn rewrite_family(sk: &Skeleton, fi: usize) -> Result<(Skeleton, FamilyRewrite)> {
    let fam = sk
        .families
        .get(fi)
        .ok_or_else(|| CpmError::Invalid(format!("no family {fi}")))?;
    let n = fam.len();
    if n < 2 {
        return Err(CpmError::Invalid("family with a single strand needs no rewrite".into()));
    }
    if fam.offset != 1 % n {
        return Err(CpmError::Invalid(format!("family offset {} is not supported", fam.offset)));
    }
    check_run(sk, &fam.downs, Side::Down)?;
    check_run(sk, &fam.ups, Side::Up)?;
    let gone: Vec<Id> = fam.downs[..n - 1].iter().chain(&fam.ups[..n - 1]).copied().collect();
    let mut out = sk.clone();
    out.families.remove(fi);
    for p in &mut out.pieces {
        p.feet.retain(|f| !gone.contains(&f.id));
    }
    let mut next = sk.max_id() + 1;
    let mut kron = Vec::new();
    for _ in 1..n {
        kron.push((next, next + 1));
        out.pieces.push(Piece { circle: true, feet: vec![Foot::up(next), Foot::down(next + 1)] });
        next += 2;
    }
    let mut downs = vec![fam.downs[n - 1]];
    downs.extend(kron.iter().map(|k| k.1));
    let mut ups: Vec<Id> = kron.iter().map(|k| k.0).collect();
    ups.push(fam.ups[n - 1]);
    for (d, u) in downs.into_iter().zip(ups) {
        out.families.push(Family { downs: vec![d], ups: vec![u], offset: 0 });
    }
    out.normalize();
    let rw = FamilyRewrite { downs: fam.downs.clone(), ups: fam.ups.clone(), kron };
    Ok((out, rw))
}

/// The run must be consecutive on one piece with nothing in between.
fn check_run(sk: &Skeleton, run: &[Id], side: Side) -> Result<()> {
    let (p, start) = sk
        .locate(run[0])
        .ok_or_else(|| CpmError::Invalid(format!("unknown foot {}", run[0])))?;
    let piece = &sk.pieces[p];
    let len = piece.feet.len();
    for (k, id) in run.iter().enumerate() {
        let pos = if piece.circle { (start + k) % len } else { start + k };
        match piece.feet.get(pos) {
            Some(f) if f.id == *id && f.side() == Some(side) => {}
            _ => return Err(CpmError::Invalid(format!("run {run:?} is not consecutive"))),
        }
    }
    if piece.circle && run.len() >= len {
        return Err(CpmError::Invalid("run covers a whole circle".into()));
    }
    Ok(())
}

fn overlap_index(cov: &CoverPresentation, d: Id, u: Id) -> Result<usize> {
    let sk = cov.skeleton()?;
    let mut i = 0;
    for fam in &sk.families {
        for (a, b) in fam.strands() {
            if (a, b) == (d, u) {
                return Ok(i);
            }
            i += 1;
        }
    }
    Err(CpmError::Invalid(format!("no strand {d} -> {u}")))
}

fn arrow(x: &GluedObject, e: EdgeSel) -> Result<ChainMap> {
    match x.cover.resolve(e)? {
        (p, StalkSel::Arrow(a)) => Ok(x.reps[p].arrows[a].clone()),
        _ => Err(CpmError::Invalid(format!("{e:?} is not a spoke"))),
    }
}

fn block(field: crate::field::Field, rows: usize, cols: usize, r0: usize, c0: usize, m: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(field, rows, cols);
    out.put(r0, c0, m);
    out
}

/// Degree-one map Cone(a) → Cone(b) sending the source summand of Cone(a)
/// to the target summand of Cone(b) by −id (requires source(a) = target(b)).
fn link(a: &ChainMap, b: &ChainMap, ca: &ChainComplex, cb: &ChainComplex) -> Result<ChainMap> {
    let field = a.field();
    let s = a.source();
    let mut comps = BTreeMap::new();
    for &m in ca.dims().keys() {
        let k = s.dim(m + 1);
        if k == 0 {
            continue;
        }
        let r0 = b.source().dim(m + 2);
        comps.insert(m, block(field, cb.dim(m + 1), ca.dim(m), r0, 0, &Matrix::identity(field, k).neg()));
    }
    ChainMap::new(ca.clone(), cb.clone(), 1, comps)
}

/// Degree-one blocks of the differential of a small model, by summand.
fn blocks_of(small: &ChainComplex, parts: &[ChainComplex]) -> BTreeMap<(usize, usize), ChainMap> {
    let mut out = BTreeMap::new();
    for (j, pj) in parts.iter().enumerate() {
        for (k, pk) in parts.iter().enumerate() {
            let mut comps = BTreeMap::new();
            for &m in pk.dims().keys() {
                let (rows, cols) = (pj.dim(m + 1), pk.dim(m));
                if rows == 0 {
                    continue;
                }
                let r0: usize = parts[..j].iter().map(|c| c.dim(m + 1)).sum();
                let c0: usize = parts[..k].iter().map(|c| c.dim(m)).sum();
                comps.insert(m, small.d(m).block(r0, c0, rows, cols));
            }
            let map = ChainMap::new(pk.clone(), pj.clone(), 1, comps).expect("block shapes");
            if !map.is_zero() {
                out.insert((j, k), map);
            }
        }
    }
    out
}

/// Minimal-model data for one family of one object.
struct Models {
    hs: Vec<ChainComplex>,
    /// blocks [j ← k] in G-labels, from the down side and the up side
    dp: BTreeMap<(usize, usize), ChainMap>,
    dq: BTreeMap<(usize, usize), ChainMap>,
}

impl Models {
    fn n(&self) -> usize {
        self.hs.len()
    }

    /// Pieces of X_i with their blocks.
    fn x_blocks(&self, i: usize) -> BTreeMap<(usize, usize), ChainMap> {
        let top = self.n() - 1;
        let in_p = |j: usize| j >= i || j == top;
        let in_q = |j: usize| j < i || j == top;
        let mut out = BTreeMap::new();
        for ((j, k), m) in &self.dp {
            if in_p(*j) && in_p(*k) {
                out.insert((*j, *k), m.clone());
            }
        }
        for ((j, k), m) in &self.dq {
            if in_q(*j) && in_q(*k) {
                out.insert((*j, *k), m.clone());
            }
        }
        out
    }

    fn sum(&self, order: &[usize], blocks: &BTreeMap<(usize, usize), ChainMap>) -> Result<ChainComplex> {
        let parts: Vec<ChainComplex> = order.iter().map(|j| self.hs[*j].clone()).collect();
        let pos = |j: usize| order.iter().position(|x| *x == j);
        let mut entries = Vec::new();
        for ((j, k), m) in blocks {
            if let (Some(a), Some(b)) = (pos(*j), pos(*k)) {
                entries.push((a, b, m.clone()));
            }
        }
        let field = self.hs[0].field();
        let base = ChainComplex::direct_sum(&parts, field);
        let delta = if entries.is_empty() {
            ChainMap::zero(&base, &base, 1)
        } else {
            block_map_graded(&parts, &parts, 1, &entries)?
        };
        twist(&base, &delta)
    }

    /// Y_i (i ≥ 1): every piece but G_{i−1}, in increasing order.
    fn y_order(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|j| *j != i - 1).collect()
    }

    /// Map Y_i[−1] → H_{i−1} read off the blocks of X_i′ into G_{i−1}.
    fn kron_arrow(&self, i: usize, from_x: usize) -> Result<(ChainComplex, ChainMap)> {
        let order = self.y_order(i);
        let blocks = self.x_blocks(from_x);
        let y = self.sum(&order, &self.x_blocks(i))?;
        let g = &self.hs[i - 1];
        let parts: Vec<ChainComplex> = order.iter().map(|j| self.hs[*j].clone()).collect();
        let mut entries = Vec::new();
        for (b, k) in order.iter().enumerate() {
            if let Some(m) = blocks.get(&(i - 1, *k)) {
                entries.push((0, b, m.clone()));
            }
        }
        let a = y.shift(-1);
        let comps: BTreeMap<i32, Matrix> = if entries.is_empty() {
            BTreeMap::new()
        } else {
            block_map_graded(&parts, std::slice::from_ref(g), 1, &entries)?
                .comps()
                .iter()
                .map(|(m, x)| (m + 1, x.clone()))
                .collect()
        };
        Ok((a.clone(), ChainMap::new(a, g.clone(), 0, comps)?))
    }
}

/// Identity blocks between two orderings of the same summands.
fn permutation(hs: &[ChainComplex], from: &[usize], to: &[usize], src: &ChainComplex, tgt: &ChainComplex) -> Result<ChainMap> {
    let field = src.field();
    let mut comps = BTreeMap::new();
    for &m in src.dims().keys() {
        let mut mat = Matrix::zeros(field, tgt.dim(m), src.dim(m));
        for (b, j) in from.iter().enumerate() {
            let a = to.iter().position(|x| x == j).ok_or_else(|| CpmError::Invalid("orderings differ".into()))?;
            let c0: usize = from[..b].iter().map(|k| hs[*k].dim(m)).sum();
            let r0: usize = to[..a].iter().map(|k| hs[*k].dim(m)).sum();
            mat.put(r0, c0, &Matrix::identity(field, hs[*j].dim(m)));
        }
        comps.insert(m, mat);
    }
    ChainMap::new(src.clone(), tgt.clone(), 0, comps)
}

fn composite(maps: &[ChainMap]) -> Result<ChainMap> {
    let mut out = ChainMap::identity(maps[0].source());
    for m in maps {
        out = m.compose(&out)?;
    }
    Ok(out)
}

/// Object half of the step: `x` lives on the cover of the old skeleton.
pub fn transport_family(x: &GluedObject, new_cover: &CoverPresentation, rw: &FamilyRewrite) -> Result<GluedObject> {
    let n = rw.downs.len();
    let deltas = rw.downs.iter().map(|d| arrow(x, down(*d))).collect::<Result<Vec<_>>>()?;
    let betas = rw.ups.iter().map(|u| arrow(x, up(*u))).collect::<Result<Vec<_>>>()?;
    let cp = deltas.iter().map(cone).collect::<Result<Vec<_>>>()?;
    let cq = betas.iter().map(cone).collect::<Result<Vec<_>>>()?;
    let mut us = Vec::new();
    for j in 0..n {
        let o = overlap_index(&x.cover, rw.downs[j], rw.ups[(j + 1) % n])?;
        us.push(x.u[o].clone());
    }
    let sp = cp.iter().map(sdr).collect::<Result<Vec<Sdr>>>()?;
    let hs: Vec<ChainComplex> = sp.iter().map(|s| s.small.clone()).collect();
    // C(β_k) carries the label of its partner C(δ_{k−1})
    let label = |k: usize| (k + n - 1) % n;
    let mut sq = Vec::new();
    for (k, c) in cq.iter().enumerate() {
        let j = label(k);
        let iota = us[j].compose(&sp[j].iota)?;
        sq.push(sdr_with_iota(c, Some(&iota))?);
    }
    let tp_sum = sdr_sum(&sp)?;
    let tq_sum = sdr_sum(&sq)?;
    let mut ep = Vec::new();
    for j in 1..n {
        ep.push((j - 1, j, link(&deltas[j], &deltas[j - 1], &cp[j], &cp[j - 1])?));
    }
    let mut eq = Vec::new();
    for k in 1..n {
        eq.push((k, k - 1, link(&betas[k - 1], &betas[k], &cq[k - 1], &cq[k])?));
    }
    let tp = perturb(&tp_sum, &block_map_graded(&cp, &cp, 1, &ep)?)?;
    let tq = perturb(&tq_sum, &block_map_graded(&cq, &cq, 1, &eq)?)?;
    let q_order: Vec<usize> = (0..n).map(label).collect();
    let q_parts: Vec<ChainComplex> = q_order.iter().map(|j| hs[*j].clone()).collect();
    let dq = blocks_of(&tq.small, &q_parts)
        .into_iter()
        .map(|((a, b), m)| ((q_order[a], q_order[b]), m))
        .collect();
    let models = Models { dp: blocks_of(&tp.small, &hs), dq, hs: hs.clone() };

    // Kronecker data
    let mut kron_reps = Vec::new();
    for i in 1..n {
        let (a, phi) = models.kron_arrow(i, i - 1)?;
        let (_, psi) = models.kron_arrow(i, i)?;
        kron_reps.push((a, hs[i - 1].clone(), phi, psi));
    }

    let delta = composite(&deltas)?;
    let mut beta_chain = betas.clone();
    beta_chain.reverse();
    let beta = composite(&beta_chain)?;

    // local representations on the new cover
    let sk_new = new_cover.skeleton()?;
    let mut reps = Vec::new();
    for (p, q) in new_cover.pieces.iter().enumerate() {
        let piece = &sk_new.pieces[p];
        let kidx = rw.kron.iter().position(|(a, _)| piece.feet.iter().any(|f| f.id == *a));
        let mut nodes: Vec<Option<ChainComplex>> = vec![None; q.nodes.len()];
        let mut arrows: Vec<Option<ChainMap>> = vec![None; q.arrows.len()];
        for f in &piece.feet {
            let (_, StalkSel::Node(v)) = new_cover.resolve(EdgeSel::Cell(f.id))? else {
                return Err(CpmError::Invalid("cell resolved to an arrow".into()));
            };
            nodes[v] = Some(match kidx {
                Some(i) => {
                    let (a, b, _, _) = &kron_reps[i];
                    if f.id == rw.kron[i].0 { a.clone() } else { b.clone() }
                }
                None => x.stalk(EdgeSel::Cell(f.id))?,
            });
        }
        for f in &piece.feet {
            for side in [Side::Up, Side::Down] {
                if !f.has(side) {
                    continue;
                }
                let e = EdgeSel::Spoke(SpokeRef { foot: f.id, side });
                let (_, StalkSel::Arrow(a)) = new_cover.resolve(e)? else {
                    return Err(CpmError::Invalid("spoke resolved to a node".into()));
                };
                arrows[a] = Some(match kidx {
                    Some(i) => {
                        let (_, _, phi, psi) = &kron_reps[i];
                        if side == Side::Up { phi.clone() } else { psi.clone() }
                    }
                    None if e == down(rw.merged_down()) => delta.clone(),
                    None if e == up(rw.merged_up()) => beta.clone(),
                    None => arrow(x, e)?,
                });
            }
        }
        let nodes: Vec<ChainComplex> = nodes.into_iter().collect::<Option<_>>().ok_or_else(|| CpmError::Invalid("unfilled node".into()))?;
        let arrows: Vec<ChainMap> = arrows.into_iter().collect::<Option<_>>().ok_or_else(|| CpmError::Invalid("unfilled arrow".into()))?;
        // arrows must point at the exact node complexes
        let arrows = arrows
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.with_ends(nodes[q.arrows[i].source].clone(), nodes[q.arrows[i].target].clone()))
            .collect::<Result<Vec<_>>>()?;
        reps.push(QuiverRepObject::new(q.clone(), nodes, arrows)?);
    }

    let stalk = |e: EdgeSel| -> Result<ChainComplex> {
        let (p, s) = new_cover.resolve(e)?;
        crate::cpmcat::local_stalk(&reps[p], s)
    };
    let all: Vec<usize> = (0..n).collect();
    let xi_order = |i: usize| -> Vec<usize> {
        let mut o = models.y_order(i);
        o.push(i - 1);
        o
    };
    let mut u = Vec::new();
    for fam in &sk_new.families {
        for (d, v) in fam.strands() {
            let src = stalk(down(d))?;
            let tgt = stalk(up(v))?;
            let m = if d == rw.merged_down() && v == rw.kron[0].0 {
                // C(δ) → T_P → X_0 → Cone(φ_1)
                let strict = strict_into_telescope(&deltas, &src, &tp.twisted)?;
                let x0 = models.sum(&all, &models.x_blocks(0))?;
                let pi = tp.pi.with_ends(tp.twisted.clone(), x0.clone())?;
                permutation(&hs, &all, &xi_order(1), &x0, &tgt)?.compose(&pi.compose(&strict)?)?
            } else if let Some(i) = rw.kron.iter().position(|k| k.1 == d) {
                if i + 1 < rw.kron.len() {
                    permutation(&hs, &xi_order(i + 1), &xi_order(i + 2), &src, &tgt)?
                } else {
                    // Cone(ψ_{n−1}) → T_Q → C(β)
                    let small = tq.small.clone();
                    let iota = tq.iota.with_ends(small.clone(), tq.twisted.clone())?;
                    let perm = permutation(&hs, &xi_order(n - 1), &q_order, &src, &small)?;
                    collapse_telescope(&betas, &tq.twisted, &tgt)?.compose(&iota.compose(&perm)?)?
                }
            } else {
                let o = overlap_index(&x.cover, d, v)?;
                x.u[o].with_ends(src, tgt)?
            };
            u.push(m);
        }
    }
    crate::cpmcat::make_glued_object(new_cover, reps, u)
}

/// C(δ_{n−1}⋯δ_0) → ⊕_j C(δ_j): source v ↦ partial composites, target identity.
fn strict_into_telescope(deltas: &[ChainMap], src: &ChainComplex, tele: &ChainComplex) -> Result<ChainMap> {
    let field = src.field();
    let n = deltas.len();
    let v0 = deltas[0].source();
    let vn = deltas[n - 1].target();
    let mut partial = vec![ChainMap::identity(v0)];
    for d in &deltas[..n - 1] {
        let next = d.compose(partial.last().expect("seeded"))?;
        partial.push(next);
    }
    let mut comps = BTreeMap::new();
    for &m in src.dims().keys() {
        let mut mat = Matrix::zeros(field, tele.dim(m), src.dim(m));
        let mut r0 = 0;
        for (j, d) in deltas.iter().enumerate() {
            let (s, t) = (d.source().dim(m + 1), d.target().dim(m));
            mat.put(r0, 0, &partial[j].comp(m + 1));
            if j == n - 1 {
                mat.put(r0 + s, v0.dim(m + 1), &Matrix::identity(field, vn.dim(m)));
            }
            r0 += s + t;
        }
        comps.insert(m, mat);
    }
    ChainMap::new(src.clone(), tele.clone(), 0, comps)
}

/// ⊕_k C(β_k) → C(β_0⋯β_{n−1}): the last source summand identically,
/// each target summand W_k by β_0⋯β_{k−1}.
fn collapse_telescope(betas: &[ChainMap], tele: &ChainComplex, tgt: &ChainComplex) -> Result<ChainMap> {
    let field = tgt.field();
    let n = betas.len();
    let w0 = betas[0].target();
    let wn = betas[n - 1].source();
    // prefix[k]: W_k → W_0
    let mut prefix = vec![ChainMap::identity(w0)];
    for b in &betas[..n - 1] {
        let next = prefix.last().expect("seeded").compose(b)?;
        prefix.push(next);
    }
    let mut comps = BTreeMap::new();
    for &m in tele.dims().keys() {
        let mut mat = Matrix::zeros(field, tgt.dim(m), tele.dim(m));
        let top = wn.dim(m + 1);
        let mut c0 = 0;
        for (k, b) in betas.iter().enumerate() {
            let (s, t) = (b.source().dim(m + 1), b.target().dim(m));
            if k == n - 1 {
                mat.put(0, c0, &Matrix::identity(field, s));
            }
            mat.put(top, c0 + s, &prefix[k].comp(m));
            c0 += s + t;
        }
        comps.insert(m, mat);
    }
    ChainMap::new(tele.clone(), tgt.clone(), 0, comps)
}
