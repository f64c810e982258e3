//! Octahedral comparisons for a composable pair V -f-> W -g-> X.

use std::collections::BTreeMap;

use super::complex::ChainComplex;
use super::map::ChainMap;
use super::ops::cone;
use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Builds a degree-0 map from per-degree lists of (row offset, col offset, block).
pub(crate) fn assemble(
    source: &ChainComplex,
    target: &ChainComplex,
    blocks: impl Fn(i32) -> Vec<(usize, usize, Matrix)>,
) -> Result<ChainMap> {
    let field = source.field();
    let mut comps = BTreeMap::new();
    for &n in source.dims().keys() {
        let mut m = Matrix::zeros(field, target.dim(n), source.dim(n));
        for (r, c, b) in blocks(n) {
            if b.rows() * b.cols() > 0 {
                m.add_at(r, c, &b);
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(source.clone(), target.clone(), 0, comps)
}

fn id(field: Field, n: usize) -> Matrix {
    Matrix::identity(field, n)
}

fn check_pair(f: &ChainMap, g: &ChainMap) -> Result<()> {
    if f.target() != g.source() {
        return Err(CpmError::Shape("middle complexes of f and g differ".into()));
    }
    f.check_closed_degree0()?;
    g.check_closed_degree0()
}

/// p: C(gf)[−1] → C(g)[−1], (v, x) ↦ (f v, x), with a quasi-isomorphism Cone(p) → C(f).
pub fn octahedral_comparison(f: &ChainMap, g: &ChainMap) -> Result<(ChainMap, ChainMap)> {
    check_pair(f, g)?;
    let field = f.field();
    let (v, w) = (f.source(), f.target());
    let gf = g.compose(f)?;
    let cgf1 = cone(&gf)?.shift(-1);
    let cg1 = cone(g)?.shift(-1);
    let p = assemble(&cgf1, &cg1, |n| {
        vec![(0, 0, f.comp(n)), (w.dim(n), v.dim(n), id(field, cgf1.dim(n) - v.dim(n)))]
    })?;
    let cp = cone(&p)?;
    let cf = cone(f)?;
    let wit = assemble(&cp, &cf, |n| {
        // Cone(p)^n = (V^{n+1} ⊕ X^n) ⊕ (W^n ⊕ X^{n−1}); C(f)^n = V^{n+1} ⊕ W^n.
        let a = v.dim(n + 1);
        let first = cgf1.dim(n + 1);
        vec![(0, 0, id(field, a)), (a, first, id(field, w.dim(n)))]
    })?;
    Ok((p, wit))
}

/// Connecting map k: C(g)[−1] → C(f), (w, x) ↦ (0, w), together with
/// quasi-isomorphisms ι: C(gf) → Cone(k) and π: Cone(k) → C(gf), π ∘ ι = id.
pub fn octahedral_connecting(f: &ChainMap, g: &ChainMap) -> Result<(ChainMap, ChainMap, ChainMap)> {
    check_pair(f, g)?;
    let field = f.field();
    let (v, w, x) = (f.source(), f.target(), g.target());
    let gf = g.compose(f)?;
    let cgf = cone(&gf)?;
    let cg1 = cone(g)?.shift(-1);
    let cf = cone(f)?;
    let k = assemble(&cg1, &cf, |n| vec![(v.dim(n + 1), 0, id(field, w.dim(n)))])?;
    let ck = cone(&k)?;
    // Cone(k)^n = (W^{n+1} ⊕ X^n) ⊕ (V^{n+1} ⊕ W^n).
    let iota = assemble(&cgf, &ck, |n| {
        let (w1, xn, v1) = (w.dim(n + 1), x.dim(n), v.dim(n + 1));
        vec![
            (0, 0, f.comp(n + 1).neg()),
            (w1, v1, id(field, xn).neg()),
            (w1 + xn, 0, id(field, v1)),
        ]
    })?;
    let pi = assemble(&ck, &cgf, |n| {
        let (w1, xn, v1) = (w.dim(n + 1), x.dim(n), v.dim(n + 1));
        vec![
            (0, w1 + xn, id(field, v1)),
            (v1, w1, id(field, xn).neg()),
            (v1, w1 + xn + v1, g.comp(n)),
        ]
    })?;
    Ok((k, iota, pi))
}

/// For h: A → B and π: Cone(h)[−1] → A the projection, the quasi-isomorphism
/// θ: Cone(π) → B, (a', b, a) ↦ b − h(a).
pub fn fiber_projection(h: &ChainMap) -> Result<(ChainComplex, ChainMap, ChainMap)> {
    h.check_closed_degree0()?;
    let field = h.field();
    let (a, b) = (h.source(), h.target());
    let fib = cone(h)?.shift(-1);
    // fib^n = A^n ⊕ B^{n−1}
    let pi = assemble(&fib, a, |n| vec![(0, 0, id(field, a.dim(n)))])?;
    let cpi = cone(&pi)?;
    // Cone(π)^n = (A^{n+1} ⊕ B^n) ⊕ A^n
    let theta = assemble(&cpi, b, |n| {
        let a1 = a.dim(n + 1);
        vec![(0, a1, id(field, b.dim(n))), (0, a1 + b.dim(n), h.comp(n).neg())]
    })?;
    Ok((fib, pi, theta))
}

/// Given u: A → B and h: B → C, the map Cone(h ∘ u) → Cone(h), (a, c) ↦ (u a, c).
pub fn cone_precompose(u: &ChainMap, h: &ChainMap) -> Result<ChainMap> {
    let hu = h.compose(u)?;
    let src = cone(&hu)?;
    let tgt = cone(h)?;
    let field = u.field();
    assemble(&src, &tgt, |n| {
        vec![
            (0, 0, u.comp(n + 1)),
            (h.source().dim(n + 1), u.source().dim(n + 1), id(field, h.target().dim(n))),
        ]
    })
}

/// Given h: A → B and u: B → C, the map Cone(h) → Cone(u ∘ h), (a, b) ↦ (a, u b).
pub fn cone_postcompose(h: &ChainMap, u: &ChainMap) -> Result<ChainMap> {
    let uh = u.compose(h)?;
    let src = cone(h)?;
    let tgt = cone(&uh)?;
    let field = u.field();
    let a = h.source();
    assemble(&src, &tgt, |n| {
        vec![(0, 0, id(field, a.dim(n + 1))), (a.dim(n + 1), a.dim(n + 1), u.comp(n))]
    })
}
