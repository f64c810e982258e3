use std::collections::BTreeMap;

use super::complex::ChainComplex;
use super::map::ChainMap;
use crate::error::{CpmError, Result};
use crate::matrix::Matrix;

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Cone(f)^n = S^{n+1} ⊕ T^n with d = [[-d_S, 0], [f, d_T]].
pub fn cone(f: &ChainMap) -> Result<ChainComplex> {
    f.check_closed_degree0()?;
    Ok(cone_unchecked(f))
}

pub(crate) fn cone_unchecked(f: &ChainMap) -> ChainComplex {
    let s = f.source();
    let t = f.target();
    let field = f.field();
    let mut dims = BTreeMap::new();
    for n in degree_span(&[&s.shift(1), t]) {
        dims.insert(n, s.dim(n + 1) + t.dim(n));
    }
    let mut diffs = BTreeMap::new();
    for (&n, &dn) in &dims {
        let dn1 = dims.get(&(n + 1)).copied().unwrap_or(0);
        if dn == 0 || dn1 == 0 {
            continue;
        }
        let mut m = Matrix::zeros(field, dn1, dn);
        let (a, b) = (s.dim(n + 1), s.dim(n + 2));
        m.put(0, 0, &s.d(n + 1).neg());
        m.put(b, 0, &f.comp(n + 1));
        m.put(b, a, &t.d(n));
        diffs.insert(n, m);
    }
    ChainComplex::from_parts(field, dims, diffs)
}

pub(crate) fn degree_span(cs: &[&ChainComplex]) -> Vec<i32> {
    let lo = cs.iter().filter_map(|c| c.min_deg()).min();
    let hi = cs.iter().filter_map(|c| c.max_deg()).max();
    match (lo, hi) {
        (Some(l), Some(h)) => (l..=h).collect(),
        _ => Vec::new(),
    }
}

pub fn is_quasi_iso(f: &ChainMap) -> Result<bool> {
    Ok(cone(f)?.is_acyclic())
}

/// Independent check: f induces isomorphisms on every homology group.
pub fn induces_homology_iso(f: &ChainMap) -> Result<bool> {
    f.check_closed_degree0()?;
    let (is, ps) = homology_splitting(f.source());
    let (it, pt) = homology_splitting(f.target());
    let hs = f.source().homology();
    let ht = f.target().homology();
    if hs != ht {
        return Ok(false);
    }
    for (n, d) in &hs.0 {
        let m = pt.comp(*n).mul(&f.comp(*n)).mul(&is.comp(*n));
        if m.rank() != *d {
            return Ok(false);
        }
    }
    let _ = (it, ps);
    Ok(true)
}

/// Inclusion T -> Cone(f), t ↦ (0, t).
pub fn cone_inclusion(f: &ChainMap, cone_f: &ChainComplex) -> ChainMap {
    let s = f.source();
    let t = f.target();
    let mut comps = BTreeMap::new();
    for &n in t.dims().keys() {
        let mut m = Matrix::zeros(f.field(), cone_f.dim(n), t.dim(n));
        m.put(s.dim(n + 1), 0, &Matrix::identity(f.field(), t.dim(n)));
        comps.insert(n, m);
    }
    ChainMap::new(t.clone(), cone_f.clone(), 0, comps).expect("cone inclusion shape")
}

/// Projection Cone(f) -> S[1], (s, t) ↦ s.
pub fn cone_projection(f: &ChainMap, cone_f: &ChainComplex) -> ChainMap {
    let s1 = f.source().shift(1);
    let mut comps = BTreeMap::new();
    for &n in s1.dims().keys() {
        let mut m = Matrix::zeros(f.field(), s1.dim(n), cone_f.dim(n));
        m.put(0, 0, &Matrix::identity(f.field(), s1.dim(n)));
        comps.insert(n, m);
    }
    ChainMap::new(cone_f.clone(), s1, 0, comps).expect("cone projection shape")
}

/// Map of cones induced by a square with f2 ∘ a = b ∘ f: (s, t) ↦ (a s, b t).
pub fn cone_of_square(f: &ChainMap, f2: &ChainMap, a: &ChainMap, b: &ChainMap) -> Result<ChainMap> {
    let lhs = f2.compose(a)?;
    let rhs = b.compose(f)?;
    if lhs != rhs {
        return Err(CpmError::NotClosed("square does not commute".into()));
    }
    let c1 = cone(f)?;
    let c2 = cone(f2)?;
    let mut comps = BTreeMap::new();
    for &n in c1.dims().keys() {
        let mut m = Matrix::zeros(f.field(), c2.dim(n), c1.dim(n));
        m.put(0, 0, &a.comp(n + 1));
        m.put(f2.source().dim(n + 1), f.source().dim(n + 1), &b.comp(n));
        comps.insert(n, m);
    }
    ChainMap::new(c1, c2, 0, comps)
}

/// Direct sum of degree-0 maps given as blocks (row summand, column summand, map).
pub fn block_map(
    sources: &[ChainComplex],
    targets: &[ChainComplex],
    entries: &[(usize, usize, ChainMap)],
) -> Result<ChainMap> {
    block_map_graded(sources, targets, 0, entries)
}

/// As `block_map`, for blocks of a common degree.
pub fn block_map_graded(
    sources: &[ChainComplex],
    targets: &[ChainComplex],
    degree: i32,
    entries: &[(usize, usize, ChainMap)],
) -> Result<ChainMap> {
    let field = sources
        .first()
        .or(targets.first())
        .map(|c| c.field())
        .ok_or_else(|| CpmError::Invalid("empty block map".into()))?;
    let src = ChainComplex::direct_sum(sources, field);
    let tgt = ChainComplex::direct_sum(targets, field);
    let mut comps: BTreeMap<i32, Matrix> = BTreeMap::new();
    for (i, j, f) in entries {
        if f.degree() != degree || f.source() != &sources[*j] || f.target() != &targets[*i] {
            return Err(CpmError::Shape(format!("block ({i},{j}) does not fit")));
        }
        for (&n, m) in f.comps() {
            let r0: usize = targets[..*i].iter().map(|c| c.dim(n + degree)).sum();
            let c0: usize = sources[..*j].iter().map(|c| c.dim(n)).sum();
            comps
                .entry(n)
                .or_insert_with(|| Matrix::zeros(field, tgt.dim(n + degree), src.dim(n)))
                .add_at(r0, c0, m);
        }
    }
    ChainMap::new(src, tgt, degree, comps)
}

/// Chosen cycle representatives i: H -> C and a projection p: C -> H with
/// p ∘ i = id, both chain maps (H carries zero differential).
pub fn homology_splitting(c: &ChainComplex) -> (ChainMap, ChainMap) {
    let field = c.field();
    let h = c.homology();
    let hc = ChainComplex::from_parts(field, h.0.clone(), BTreeMap::new());
    let mut icomps = BTreeMap::new();
    let mut pcomps = BTreeMap::new();
    for (&n, &dim) in c.dims() {
        let dout = c.d(n);
        let din = c.d(n - 1);
        let z = dout.kernel();
        let bcols = Matrix::extend_columns(&Matrix::zeros(field, dim, 0), &din);
        let b = din.select_cols(&bcols);
        let hcols = Matrix::extend_columns(&b, &z);
        let hm = z.select_cols(&hcols);
        let bh = b.hcat(&hm);
        let wcols = Matrix::extend_columns(&bh, &Matrix::identity(field, dim));
        let full = bh.hcat(&Matrix::identity(field, dim).select_cols(&wcols));
        let inv = full.inverse().expect("basis extension is invertible");
        let hd = hm.cols();
        if hd > 0 {
            icomps.insert(n, hm);
            pcomps.insert(n, inv.block(b.cols(), 0, hd, dim));
        }
    }
    let i = ChainMap::new(hc.clone(), c.clone(), 0, icomps).expect("splitting inclusion");
    let p = ChainMap::new(c.clone(), hc, 0, pcomps).expect("splitting projection");
    (i, p)
}

/// A chain map g: T -> S with H(g) = H(f)^{-1}.
pub fn quasi_inverse(f: &ChainMap) -> Result<ChainMap> {
    if !is_quasi_iso(f)? {
        return Err(CpmError::NotQuasiIso("quasi-inverse of a non-quasi-isomorphism".into()));
    }
    let (is, _) = homology_splitting(f.source());
    let (_, pt) = homology_splitting(f.target());
    let mut comps = BTreeMap::new();
    for (&n, _) in f.source().homology().0.iter() {
        let hf = pt.comp(n).mul(&f.comp(n)).mul(&is.comp(n));
        let inv = hf
            .inverse()
            .ok_or_else(|| CpmError::NotQuasiIso(format!("degree {n}")))?;
        comps.insert(n, is.comp(n).mul(&inv).mul(&pt.comp(n)));
    }
    ChainMap::new(f.target().clone(), f.source().clone(), 0, comps)
}

/// Layout of Hom(C, D): degree k holds blocks Hom(C^n, D^{n+k}) in increasing n,
/// each vectorized row-major.
#[derive(Clone, Debug)]
pub struct HomLayout {
    c: ChainComplex,
    d: ChainComplex,
    blocks: BTreeMap<i32, Vec<(i32, usize, usize, usize)>>,
    dims: BTreeMap<i32, usize>,
}

impl HomLayout {
    pub fn new(c: &ChainComplex, d: &ChainComplex) -> Result<HomLayout> {
        if c.field() != d.field() {
            return Err(CpmError::FieldMismatch("hom between complexes over different fields".into()));
        }
        let mut blocks: BTreeMap<i32, Vec<(i32, usize, usize, usize)>> = BTreeMap::new();
        let mut dims = BTreeMap::new();
        if let (Some(cl), Some(ch), Some(dl), Some(dh)) =
            (c.min_deg(), c.max_deg(), d.min_deg(), d.max_deg())
        {
            for k in (dl - ch)..=(dh - cl) {
                let mut off = 0;
                let mut v = Vec::new();
                for (&n, &cn) in c.dims() {
                    let dn = d.dim(n + k);
                    if dn > 0 {
                        v.push((n, off, dn, cn));
                        off += dn * cn;
                    }
                }
                if off > 0 {
                    dims.insert(k, off);
                    blocks.insert(k, v);
                }
            }
        }
        Ok(HomLayout {
            c: c.clone(),
            d: d.clone(),
            blocks,
            dims,
        })
    }

    pub fn dim(&self, k: i32) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    /// (offset, rows, cols) of the Hom(C^n, D^{n+k}) block in degree k.
    pub fn block(&self, k: i32, n: i32) -> Option<(usize, usize, usize)> {
        self.blocks
            .get(&k)?
            .iter()
            .find(|b| b.0 == n)
            .map(|b| (b.1, b.2, b.3))
    }

    /// The hom complex with δφ = d_D φ − (−1)^k φ d_C.
    pub fn complex(&self) -> ChainComplex {
        let field = self.c.field();
        let mut diffs = BTreeMap::new();
        for (&k, &dk) in &self.dims {
            let dk1 = self.dim(k + 1);
            if dk1 == 0 {
                continue;
            }
            let mut m = Matrix::zeros(field, dk1, dk);
            for &(n, off, rows, cols) in &self.blocks[&k] {
                if let Some((o2, r2, c2)) = self.block(k + 1, n) {
                    let a = self.d.d(n + k).kron(&Matrix::identity(field, cols));
                    debug_assert_eq!(a.shape(), (r2 * c2, rows * cols));
                    m.add_at(o2, off, &a);
                }
                if let Some((o2, r2, c2)) = self.block(k + 1, n - 1) {
                    let b = Matrix::identity(field, rows)
                        .kron(&self.c.d(n - 1).transpose())
                        .signed(-sign(k));
                    debug_assert_eq!(b.shape(), (r2 * c2, rows * cols));
                    m.add_at(o2, off, &b);
                }
            }
            diffs.insert(k, m);
        }
        ChainComplex::from_parts(field, self.dims.clone(), diffs)
    }

    /// Column vector of a degree-k map C -> D.
    pub fn vectorize(&self, f: &ChainMap) -> Matrix {
        let k = f.degree();
        let field = self.c.field();
        let mut v = Matrix::zeros(field, self.dim(k), 1);
        if let Some(bs) = self.blocks.get(&k) {
            for &(n, off, rows, cols) in bs {
                let m = f.comp(n);
                for i in 0..rows {
                    for j in 0..cols {
                        v.set(off + i * cols + j, 0, m.get(i, j).clone());
                    }
                }
            }
        }
        v
    }

    pub fn unvectorize(&self, k: i32, v: &Matrix) -> ChainMap {
        let field = self.c.field();
        let mut comps = BTreeMap::new();
        if let Some(bs) = self.blocks.get(&k) {
            for &(n, off, rows, cols) in bs {
                let mut m = Matrix::zeros(field, rows, cols);
                for i in 0..rows {
                    for j in 0..cols {
                        m.set(i, j, v.get(off + i * cols + j, 0).clone());
                    }
                }
                comps.insert(n, m);
            }
        }
        ChainMap::new(self.c.clone(), self.d.clone(), k, comps).expect("hom layout shape")
    }

    pub fn source(&self) -> &ChainComplex {
        &self.c
    }
    pub fn target(&self) -> &ChainComplex {
        &self.d
    }
    pub fn degrees(&self) -> Vec<i32> {
        self.dims.keys().copied().collect()
    }
}

pub fn hom_complex(c: &ChainComplex, d: &ChainComplex) -> Result<ChainComplex> {
    Ok(HomLayout::new(c, d)?.complex())
}

/// φ ↦ g ∘ φ as a chain map Hom(C, D) -> Hom(C, E), for g: D -> E closed of degree 0.
pub fn post_compose(src: &HomLayout, tgt: &HomLayout, g: &ChainMap) -> ChainMap {
    let field = g.field();
    let mut comps = BTreeMap::new();
    for (&k, bs) in &src.blocks {
        let mut m = Matrix::zeros(field, tgt.dim(k), src.dim(k));
        for &(n, off, _rows, cols) in bs {
            if let Some((o2, _, _)) = tgt.block(k, n) {
                m.add_at(o2, off, &g.comp(n + k).kron(&Matrix::identity(field, cols)));
            }
        }
        comps.insert(k, m);
    }
    ChainMap::new(src.complex(), tgt.complex(), 0, comps).expect("post-composition shape")
}

/// φ ↦ φ ∘ f as a chain map Hom(C, D) -> Hom(B, D), for f: B -> C closed of degree 0.
pub fn pre_compose(src: &HomLayout, tgt: &HomLayout, f: &ChainMap) -> ChainMap {
    let field = f.field();
    let mut comps = BTreeMap::new();
    for (&k, bs) in &src.blocks {
        let mut m = Matrix::zeros(field, tgt.dim(k), src.dim(k));
        for &(n, off, rows, _cols) in bs {
            if let Some((o2, _, _)) = tgt.block(k, n) {
                m.add_at(
                    o2,
                    off,
                    &Matrix::identity(field, rows).kron(&f.comp(n).transpose()),
                );
            }
        }
        comps.insert(k, m);
    }
    ChainMap::new(src.complex(), tgt.complex(), 0, comps).expect("pre-composition shape")
}

/// Homotopy fiber shifted into the equalizer total complex: shift(Cone(T), −1).
/// Degree k is A^k ⊕ B^{k−1} and D(a, b) = (d a, −T a − d b).
pub fn equalizer_total(t: &ChainMap) -> Result<ChainComplex> {
    Ok(cone(t)?.shift(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn q1(deg: i32) -> ChainComplex {
        ChainComplex::concentrated(Field::Q, deg, 1)
    }

    #[test]
    fn cone_of_identity_acyclic() {
        let c = q1(0);
        assert!(cone(&ChainMap::identity(&c)).unwrap().is_acyclic());
    }

    #[test]
    fn cone_from_zero() {
        let z = ChainComplex::zero(Field::Q);
        let w = q1(0);
        let f = ChainMap::zero(&z, &w, 0);
        assert_eq!(cone(&f).unwrap(), w);
    }

    #[test]
    fn cone_to_zero() {
        let v = q1(0);
        let z = ChainComplex::zero(Field::Q);
        let f = ChainMap::zero(&v, &z, 0);
        assert_eq!(cone(&f).unwrap().homology().get(-1), 1);
    }

    #[test]
    fn hom_shapes() {
        let h = hom_complex(&q1(0), &q1(0)).unwrap();
        assert_eq!(h, q1(0));
        let h = hom_complex(&q1(0), &q1(1)).unwrap();
        assert_eq!(h, q1(1));
    }

    #[test]
    fn zero_map_not_quasi_iso() {
        let c = q1(0);
        assert!(!is_quasi_iso(&ChainMap::zero(&c, &c, 0)).unwrap());
        assert!(is_quasi_iso(&ChainMap::identity(&c)).unwrap());
    }
}
