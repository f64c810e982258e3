use std::collections::BTreeMap;

use super::{local_stalk, GluedObject, StalkSel};
use crate::error::{CpmError, Result};
use crate::homalg::{
    block_map, equalizer_total, post_compose, pre_compose, ChainComplex, ChainMap, HomLayout,
};
use crate::matrix::Matrix;
use crate::quiverize::QuiverRepObject;

/// Hom of representations: total complex of ⊕_v Hom(M_v, N_v) ⇉ ⊕_a Hom(M_s, N_t)
/// with T(φ)_a = N_a φ_s − φ_t M_a. Degree k is A^k ⊕ B^{k−1}.
pub struct RepHom {
    pub vlay: Vec<HomLayout>,
    pub alay: Vec<HomLayout>,
    pub t: ChainMap,
    pub total: ChainComplex,
    a_dims: BTreeMap<i32, usize>,
}

impl RepHom {
    /// Column offset of Hom^k(M_v, N_v) inside total degree k.
    pub fn node_offset(&self, v: usize, k: i32) -> usize {
        self.vlay[..v].iter().map(|l| l.dim(k)).sum()
    }

    /// Column offset of Hom^{k−1}(M_s, N_t) for arrow a inside total degree k.
    pub fn arrow_offset(&self, a: usize, k: i32) -> usize {
        self.a_dims.get(&k).copied().unwrap_or(0) + self.alay[..a].iter().map(|l| l.dim(k - 1)).sum::<usize>()
    }
}

pub fn rep_hom(m: &QuiverRepObject, n: &QuiverRepObject) -> Result<RepHom> {
    if m.quiver != n.quiver {
        return Err(CpmError::Invalid("representations on different quivers".into()));
    }
    if m.field() != n.field() {
        return Err(CpmError::FieldMismatch("representations over different fields".into()));
    }
    let q = &m.quiver;
    let vlay = (0..q.nodes.len())
        .map(|v| HomLayout::new(&m.nodes[v], &n.nodes[v]))
        .collect::<Result<Vec<_>>>()?;
    let alay = q
        .arrows
        .iter()
        .map(|a| HomLayout::new(&m.nodes[a.source], &n.nodes[a.target]))
        .collect::<Result<Vec<_>>>()?;
    let srcs: Vec<ChainComplex> = vlay.iter().map(HomLayout::complex).collect();
    let tgts: Vec<ChainComplex> = alay.iter().map(HomLayout::complex).collect();
    let mut entries = Vec::new();
    for (i, a) in q.arrows.iter().enumerate() {
        entries.push((i, a.source, post_compose(&vlay[a.source], &alay[i], &n.arrows[i])));
        entries.push((i, a.target, pre_compose(&vlay[a.target], &alay[i], &m.arrows[i]).neg()));
    }
    let field = m.field();
    let t = if tgts.is_empty() {
        ChainMap::zero(&ChainComplex::direct_sum(&srcs, field), &ChainComplex::zero(field), 0)
    } else {
        block_map(&srcs, &tgts, &entries)?
    };
    let total = equalizer_total(&t)?;
    let a_dims = t.source().dims().clone();
    Ok(RepHom { vlay, alay, t, total, a_dims })
}

/// Copies the block of `src` (layout, degree k, source degree n) into the
/// target block at (tgt offset, tgt cols) with sub-position (r0, c0) and sign.
#[allow(clippy::too_many_arguments)]
fn embed(
    out: &mut Matrix,
    src: &HomLayout,
    k: i32,
    n: i32,
    col_base: usize,
    tgt: (usize, usize),
    r0: usize,
    c0: usize,
    sign: i64,
) {
    let Some((off, rows, cols)) = src.block(k, n) else {
        return;
    };
    let field = out.field();
    let s = field.from_i64(sign);
    let (toff, tcols) = tgt;
    for i in 0..rows {
        for j in 0..cols {
            out.set(toff + (r0 + i) * tcols + c0 + j, col_base + off + i * cols + j, s.clone());
        }
    }
}

/// The stalk functor on hom complexes: RepHom(M, N) → Hom(stalk M, stalk N).
/// On a cone, a degree-k element (φ, h) acts by [[(−1)^k φ_s, 0], [(−1)^k h_a, φ_t]].
pub fn stalk_functor(rh: &RepHom, m: &QuiverRepObject, n: &QuiverRepObject, sel: StalkSel) -> Result<(HomLayout, ChainMap)> {
    let field = m.field();
    let total = &rh.total;
    match sel {
        StalkSel::Node(v) => {
            let lay = rh.vlay[v].clone();
            let hc = lay.complex();
            let mut comps = BTreeMap::new();
            for (&k, &dk) in total.dims() {
                let rows = lay.dim(k);
                if rows == 0 {
                    continue;
                }
                let mut mat = Matrix::zeros(field, rows, dk);
                mat.put(0, rh.node_offset(v, k), &Matrix::identity(field, rows));
                comps.insert(k, mat);
            }
            Ok((lay, ChainMap::new(total.clone(), hc, 0, comps)?))
        }
        StalkSel::Arrow(a) => {
            let qa = &m.quiver.arrows[a];
            let (s, t) = (qa.source, qa.target);
            let cm = local_stalk(m, sel)?;
            let cn = local_stalk(n, sel)?;
            let lay = HomLayout::new(&cm, &cn)?;
            let hc = lay.complex();
            let (ms, ns) = (&m.nodes[s], &n.nodes[s]);
            let mut comps = BTreeMap::new();
            for (&k, &dk) in total.dims() {
                let rows = lay.dim(k);
                if rows == 0 {
                    continue;
                }
                let sg = if k.rem_euclid(2) == 0 { 1 } else { -1 };
                let mut mat = Matrix::zeros(field, rows, dk);
                for &deg in cm.dims().keys() {
                    let Some((toff, _, tcols)) = lay.block(k, deg) else {
                        continue;
                    };
                    let top = ns.dim(deg + k + 1);
                    let left = ms.dim(deg + 1);
                    let base_s = rh.node_offset(s, k);
                    let base_t = rh.node_offset(t, k);
                    let base_h = rh.arrow_offset(a, k);
                    embed(&mut mat, &rh.vlay[s], k, deg + 1, base_s, (toff, tcols), 0, 0, sg);
                    embed(&mut mat, &rh.alay[a], k - 1, deg + 1, base_h, (toff, tcols), top, 0, sg);
                    // when s = t the same source block also feeds the lower-right corner
                    let mut tmp = Matrix::zeros(field, rows, dk);
                    embed(&mut tmp, &rh.vlay[t], k, deg, base_t, (toff, tcols), top, left, 1);
                    mat = mat.add(&tmp);
                }
                comps.insert(k, mat);
            }
            Ok((lay, ChainMap::new(total.clone(), hc, 0, comps)?))
        }
    }
}

/// Glued hom: total complex of ⊕_p RepHom_p ⇉ ⊕_o Hom(X_from, Y_to) with
/// T(f)_o = u′_o Ψ_from(f) − Ψ_to(f) u_o.
pub struct GluedHom {
    pub locals: Vec<RepHom>,
    pub t: Option<ChainMap>,
    pub total: ChainComplex,
}

pub fn hom_complex_glued(x: &GluedObject, y: &GluedObject) -> Result<ChainComplex> {
    Ok(glued_hom(x, y)?.total)
}

pub fn glued_hom(x: &GluedObject, y: &GluedObject) -> Result<GluedHom> {
    if !x.cover.same_shape(&y.cover) {
        return Err(CpmError::Invalid("objects live on different covers".into()));
    }
    if x.field() != y.field() {
        return Err(CpmError::FieldMismatch("objects over different fields".into()));
    }
    let locals = x
        .reps
        .iter()
        .zip(&y.reps)
        .map(|(m, n)| rep_hom(m, n))
        .collect::<Result<Vec<_>>>()?;
    if x.cover.overlaps.is_empty() {
        let field = x.field();
        let parts: Vec<ChainComplex> = locals.iter().map(|l| l.total.clone()).collect();
        let total = if parts.len() == 1 {
            parts[0].clone()
        } else {
            ChainComplex::direct_sum(&parts, field)
        };
        return Ok(GluedHom { locals, t: None, total });
    }
    let srcs: Vec<ChainComplex> = locals.iter().map(|l| l.total.clone()).collect();
    let mut tgts = Vec::new();
    let mut entries = Vec::new();
    for (i, (o, (ux, uy))) in x.cover.overlaps.iter().zip(x.u.iter().zip(&y.u)).enumerate() {
        let (pf, sf) = o.from;
        let (pt, st) = o.to;
        let (lf, psi_f) = stalk_functor(&locals[pf], &x.reps[pf], &y.reps[pf], sf)?;
        let (lt, psi_t) = stalk_functor(&locals[pt], &x.reps[pt], &y.reps[pt], st)?;
        let lo = HomLayout::new(ux.source(), uy.target())?;
        let a = post_compose(&lf, &lo, uy).compose(&psi_f)?;
        let b = pre_compose(&lt, &lo, ux).compose(&psi_t)?.neg();
        tgts.push(lo.complex());
        entries.push((i, pf, a));
        entries.push((i, pt, b));
    }
    let t = block_map(&srcs, &tgts, &entries)?;
    let total = equalizer_total(&t)?;
    Ok(GluedHom { locals, t: Some(t), total })
}

pub fn euler_pairing(x: &GluedObject, y: &GluedObject) -> Result<i64> {
    Ok(hom_complex_glued(x, y)?.euler())
}
