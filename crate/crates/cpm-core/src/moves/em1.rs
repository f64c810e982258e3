//! The first elementary move on its local pattern.
//!
//! Left side: a line carrying two consecutive same-side spokes, i.e. a
//! composable pair V →f W →g X. Right side: two one-spoke lines glued along
//! their spoke stalks, carrying (V →f W) and (C(gf)[−1] →p C(g)[−1]) with the
//! comparison Cone(p) → C(f) from the octahedral axiom.

use std::collections::BTreeMap;

use crate::cpmcat::{make_glued_object, CoverPresentation, GluedObject, Overlap, StalkSel};
use crate::error::{CpmError, Result};
use crate::homalg::{cone, octahedral_comparison, ChainComplex, ChainMap, HomLayout};
use crate::matrix::Matrix;
use crate::quiverize::{piece_quiver, QuiverRepObject};
use crate::ribbon::{spoke_half, zout, ChordalRibbonGraph, Foot, Piece, Side, Skeleton, SpokeRef};

use super::{MoveKind, MoveSite};

/// Line with `k` consecutive down spokes (feet 0..k).
pub fn chain_skeleton(k: usize) -> Skeleton {
    Skeleton {
        pieces: vec![Piece { circle: false, feet: (0..k as u32).map(Foot::down).collect() }],
        families: vec![],
    }
}

/// The right-hand graph: two one-spoke lines, the spoke of the first glued to
/// the right ray of the second, whose zero section turns up its spoke.
pub fn em1_right_graph() -> Result<ChordalRibbonGraph> {
    let sk = Skeleton {
        pieces: vec![
            Piece { circle: false, feet: vec![Foot::down(0)] },
            Piece { circle: false, feet: vec![Foot::down(1)] },
        ],
        families: vec![],
    };
    let mut g = sk.to_graph()?;
    let s0 = spoke_half(SpokeRef { foot: 0, side: Side::Down });
    let s1 = spoke_half(SpokeRef { foot: 1, side: Side::Down });
    let r1 = zout(1);
    g.zero.remove(&r1);
    g.forward.remove(&r1);
    g.zero.insert(s1);
    g.forward.insert(s1);
    g.graph.partner.insert(s0, r1);
    g.graph.partner.insert(r1, s0);
    Ok(g)
}

/// Cover of the right-hand graph: piece 1's spoke stalk compared into piece 0's.
pub fn em1_right_cover() -> Result<CoverPresentation> {
    let q = piece_quiver(&Piece { circle: false, feet: vec![Foot::down(0)] })?;
    Ok(CoverPresentation {
        pieces: vec![q.clone(), q],
        overlaps: vec![Overlap { from: (1, StalkSel::Arrow(0)), to: (0, StalkSel::Arrow(0)) }],
        skeleton: None,
    })
}

/// The composable pair carried by a chain object, in composition order.
fn chain_arrows(x: &GluedObject) -> Result<Vec<ChainMap>> {
    let sk = x.cover.skeleton()?;
    if sk.pieces.len() != 1 || !sk.families.is_empty() || sk.pieces[0].circle {
        return Err(CpmError::Pattern("expected a single line without gluing".into()));
    }
    let rep = &x.reps[0];
    let sides: Vec<Option<Side>> = sk.pieces[0].feet.iter().map(Foot::side).collect();
    let mut arrows = rep.arrows.clone();
    match sides.first().copied().flatten() {
        Some(Side::Down) if sides.iter().all(|s| *s == Some(Side::Down)) => {}
        // up arrows run right to left: reading the line backwards gives the chain
        Some(Side::Up) if sides.iter().all(|s| *s == Some(Side::Up)) => arrows.reverse(),
        _ => return Err(CpmError::Pattern("spokes of the run are not all on one side".into())),
    }
    Ok(arrows)
}

fn check_site(site: &MoveSite, len: usize) -> Result<()> {
    if site.downs.len() + site.ups.len() != len {
        return Err(CpmError::Pattern(format!("site names {} spokes, pattern has {len}", site.downs.len() + site.ups.len())));
    }
    Ok(())
}

/// Φ₁ on one composable pair.
pub fn em1_object(f: &ChainMap, g: &ChainMap) -> Result<GluedObject> {
    let (p, wit) = octahedral_comparison(f, g)?;
    let q = piece_quiver(&Piece { circle: false, feet: vec![Foot::down(0)] })?;
    let r0 = QuiverRepObject::new(q.clone(), vec![f.source().clone(), f.target().clone()], vec![f.clone()])?;
    let r1 = QuiverRepObject::new(q, vec![p.source().clone(), p.target().clone()], vec![p.clone()])?;
    make_glued_object(&em1_right_cover()?, vec![r0, r1], vec![wit])
}

pub fn apply_em1(g: &Skeleton, site: &MoveSite, objects: &[GluedObject]) -> Result<(ChordalRibbonGraph, Vec<GluedObject>)> {
    if site.kind != MoveKind::Em1 {
        return Err(CpmError::Pattern("site is not an EM1 site".into()));
    }
    check_site(site, 2)?;
    let run = g.pieces.first().map(|p| p.feet.len());
    if g.pieces.len() != 1 || run != Some(2) {
        return Err(CpmError::Pattern("EM1 needs a line with exactly two spokes".into()));
    }
    let mut out = Vec::new();
    for x in objects {
        let a = chain_arrows(x)?;
        out.push(em1_object(&a[0], &a[1])?);
    }
    Ok((em1_right_graph()?, out))
}

/// Solves ∂s = r for a degree −1 map s (r closed of degree 0), if possible.
fn null_homotopy(r: &ChainMap) -> Result<ChainMap> {
    let lay = HomLayout::new(r.source(), r.target())?;
    let hc = lay.complex();
    let field = r.field();
    let b = lay.vectorize(r);
    let d = hc.d(-1);
    let d = if d.cols() == 0 { Matrix::zeros(field, b.rows(), 0) } else { d };
    let x = d
        .solve(&b)
        .ok_or_else(|| CpmError::Pattern("comparison does not split off the source summand".into()))?;
    Ok(lay.unvectorize(-1, &x))
}

/// Φ₁⁻¹: from (A →m B, C →n D, Cone(n) → Cone(m)) rebuild A →m B → Cone(q) where
/// q: D → B lifts D → Cone(n) → Cone(m) along B → Cone(m).
pub fn em1_inverse_object(x: &GluedObject) -> Result<(ChainMap, ChainMap)> {
    if x.cover.pieces.len() != 2 || x.u.len() != 1 {
        return Err(CpmError::Pattern("expected the two-piece EM1 right-hand cover".into()));
    }
    let m = x.reps[0].arrows.first().ok_or_else(|| CpmError::Pattern("piece 0 has no arrow".into()))?;
    let n = x.reps[1].arrows.first().ok_or_else(|| CpmError::Pattern("piece 1 has no arrow".into()))?;
    let u = &x.u[0];
    let field = m.field();
    let (a, b) = (m.source(), m.target());
    let d = n.target();
    let cm = cone(m)?;
    let cn = cone(n)?;
    // φ = u ∘ incl_D
    let mut inc = BTreeMap::new();
    for &k in d.dims().keys() {
        let mut mat = Matrix::zeros(field, cn.dim(k), d.dim(k));
        mat.put(n.source().dim(k + 1), 0, &Matrix::identity(field, d.dim(k)));
        inc.insert(k, mat);
    }
    let phi = u.compose(&ChainMap::new(d.clone(), cn, 0, inc)?)?;
    // ρ = proj_{A[1]} ∘ φ, and its null-homotopy s lifted into Cone(m)
    let a1 = a.shift(1);
    let mut proj = BTreeMap::new();
    let mut lift = BTreeMap::new();
    for &k in cm.dims().keys() {
        let rows = a1.dim(k);
        let mut p = Matrix::zeros(field, rows, cm.dim(k));
        p.put(0, 0, &Matrix::identity(field, rows));
        lift.insert(k, p.transpose());
        proj.insert(k, p);
    }
    let proj = ChainMap::new(cm.clone(), a1.clone(), 0, proj)?;
    let lift = ChainMap::new(a1, cm.clone(), 0, lift)?;
    let rho = proj.compose(&phi)?;
    let s = null_homotopy(&rho)?;
    let corrected = phi.add(&lift.compose(&s)?.boundary().neg())?;
    let mut qc = BTreeMap::new();
    for &k in d.dims().keys() {
        let full = corrected.comp(k);
        qc.insert(k, full.block(a.dim(k + 1), 0, b.dim(k), d.dim(k)));
    }
    let q = ChainMap::new(d.clone(), b.clone(), 0, qc)?;
    let cq = cone(&q)?;
    let mut gc = BTreeMap::new();
    for &k in b.dims().keys() {
        let mut mat = Matrix::zeros(field, cq.dim(k), b.dim(k));
        mat.put(d.dim(k + 1), 0, &Matrix::identity(field, b.dim(k)));
        gc.insert(k, mat);
    }
    let g = ChainMap::new(b.clone(), cq, 0, gc)?;
    Ok((m.clone(), g))
}

/// Rebuilds a chain object on the line with the given arrows.
pub fn chain_object(arrows: &[ChainMap]) -> Result<GluedObject> {
    let sk = chain_skeleton(arrows.len());
    let cov = CoverPresentation::from_skeleton(&sk)?;
    let mut nodes: Vec<ChainComplex> = vec![arrows[0].source().clone()];
    nodes.extend(arrows.iter().map(|a| a.target().clone()));
    for (i, w) in arrows.windows(2).enumerate() {
        if w[0].target() != w[1].source() {
            return Err(CpmError::Shape(format!("arrows {i} and {} are not composable", i + 1)));
        }
    }
    let rep = QuiverRepObject::new(cov.pieces[0].clone(), nodes, arrows.to_vec())?;
    make_glued_object(&cov, vec![rep], vec![])
}

pub fn apply_em1_inverse(site: &MoveSite, objects: &[GluedObject]) -> Result<(Skeleton, Vec<GluedObject>)> {
    if site.kind != MoveKind::Em1Inv {
        return Err(CpmError::Pattern("site is not an EM1 inverse site".into()));
    }
    let mut out = Vec::new();
    for x in objects {
        let (f, g) = em1_inverse_object(x)?;
        out.push(chain_object(&[f, g])?);
    }
    Ok((chain_skeleton(2), out))
}

/// EM1 iterated along a run of k ≥ 2 spokes: step i applies Φ₁ to the pair
/// (composite of the first i+1 arrows, next arrow). Returns one glued object
/// per step.
pub fn em1_prime_objects(arrows: &[ChainMap]) -> Result<Vec<GluedObject>> {
    if arrows.len() < 2 {
        return Err(CpmError::Pattern("EM1′ needs a run of at least two spokes".into()));
    }
    let mut out = Vec::new();
    let mut head = arrows[0].clone();
    for g in &arrows[1..] {
        out.push(em1_object(&head, g)?);
        head = g.compose(&head)?;
    }
    Ok(out)
}

pub fn apply_em1_prime(g: &Skeleton, site: &MoveSite, objects: &[GluedObject]) -> Result<(Vec<ChordalRibbonGraph>, Vec<Vec<GluedObject>>)> {
    if site.kind != MoveKind::Em1Prime {
        return Err(CpmError::Pattern("site is not an EM1′ site".into()));
    }
    let k = g.pieces.first().map_or(0, |p| p.feet.len());
    if g.pieces.len() != 1 || k < 2 {
        return Err(CpmError::Pattern("EM1′ needs a line with a run of at least two spokes".into()));
    }
    check_site(site, k)?;
    let graphs = (1..k).map(|_| em1_right_graph()).collect::<Result<Vec<_>>>()?;
    let objs = objects
        .iter()
        .map(|x| em1_prime_objects(&chain_arrows(x)?))
        .collect::<Result<Vec<_>>>()?;
    Ok((graphs, objs))
}
