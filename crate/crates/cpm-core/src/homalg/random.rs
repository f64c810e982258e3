//! Seeded generators for complexes and closed maps.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::complex::ChainComplex;
use super::map::ChainMap;
use super::ops::homology_splitting;
use crate::field::Field;
use crate::matrix::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(field: Field, rows: usize, cols: usize, r: &mut impl Rng) -> Matrix {
    let vals: Vec<i64> = (0..rows * cols).map(|_| r.gen_range(-2..=2)).collect();
    Matrix::from_i64(field, rows, cols, &vals)
}

/// Random invertible matrix as a product of unit lower and upper triangular factors.
pub fn random_invertible(field: Field, n: usize, r: &mut impl Rng) -> Matrix {
    let mut l = Matrix::identity(field, n);
    let mut u = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..n {
            let x = field.from_i64(r.gen_range(-2..=2));
            if i > j {
                l.set(i, j, x);
            } else if i < j {
                u.set(i, j, x);
            } else {
                let s = if r.gen_bool(0.5) { 1 } else { -1 };
                u.set(i, i, field.from_i64(s));
            }
        }
    }
    l.mul(&u)
}

/// Direct sum of cycles and contractible pairs in degrees [0, span), conjugated
/// degreewise by random invertible matrices, so d² = 0 by construction.
pub fn random_complex_with(field: Field, r: &mut impl Rng, max_deg_span: i32, max_dim: usize) -> ChainComplex {
    let span = max_deg_span.max(1);
    let cap = max_dim.max(1);
    let mut cyc = BTreeMap::new();
    let mut pairs = BTreeMap::new();
    let mut layout: BTreeMap<i32, usize> = BTreeMap::new();
    for n in 0..span {
        let inc = if n > 0 { pairs[&(n - 1)] } else { 0 };
        let room = cap.saturating_sub(inc);
        let h = r.gen_range(0..=room.min(2));
        let e = if n + 1 < span && room > h { r.gen_range(0..=1) } else { 0 };
        cyc.insert(n, h);
        pairs.insert(n, e);
        layout.insert(n, h + e + inc);
    }
    let mut diffs = BTreeMap::new();
    for n in 0..span - 1 {
        let (a, b) = (layout[&n], layout[&(n + 1)]);
        if a == 0 || b == 0 {
            continue;
        }
        let mut d = Matrix::zeros(field, b, a);
        let inc = if n > 0 { pairs[&(n - 1)] } else { 0 };
        for j in 0..pairs[&n] {
            d.set(cyc[&(n + 1)] + j, cyc[&n] + inc + j, field.one());
        }
        diffs.insert(n, d);
    }
    let conj: BTreeMap<i32, Matrix> = layout
        .iter()
        .map(|(&n, &d)| (n, random_invertible(field, d, r)))
        .collect();
    let mut out = BTreeMap::new();
    for (n, d) in diffs {
        let p0inv = conj[&n].inverse().expect("invertible");
        out.insert(n, conj[&(n + 1)].mul(&d).mul(&p0inv));
    }
    ChainComplex::from_parts(field, layout, out)
}

pub fn random_complex(field: Field, seed: u64, max_deg_span: i32, max_dim: usize) -> ChainComplex {
    random_complex_with(field, &mut rng(seed), max_deg_span, max_dim)
}

/// Random closed degree-0 map: a random map on homology plus a null-homotopic part.
pub fn random_closed_map_with(c: &ChainComplex, d: &ChainComplex, r: &mut impl Rng) -> ChainMap {
    let field = c.field();
    let (_, pc) = homology_splitting(c);
    let (id_, _) = homology_splitting(d);
    let mut comps = BTreeMap::new();
    let mut h = BTreeMap::new();
    for &n in c.dims().keys() {
        if d.dim(n - 1) > 0 {
            h.insert(n, random_matrix(field, d.dim(n - 1), c.dim(n), r));
        }
    }
    let hm = |n: i32| -> Matrix {
        h.get(&n)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(field, d.dim(n - 1), c.dim(n)))
    };
    for &n in c.dims().keys() {
        if d.dim(n) == 0 {
            continue;
        }
        let hc = pc.target().dim(n);
        let hd = id_.source().dim(n);
        let mid = random_matrix(field, hd, hc, r);
        let mut m = id_.comp(n).mul(&mid).mul(&pc.comp(n));
        m = m.add(&d.d(n - 1).mul(&hm(n)));
        m = m.add(&hm(n + 1).mul(&c.d(n)));
        comps.insert(n, m);
    }
    ChainMap::new(c.clone(), d.clone(), 0, comps).expect("random map shape")
}

pub fn random_closed_map(seed: u64, c: &ChainComplex, d: &ChainComplex) -> ChainMap {
    random_closed_map_with(c, d, &mut rng(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = random_complex(Field::Q, 7, 3, 3);
        let b = random_complex(Field::Q, 7, 3, 3);
        assert_eq!(a, b);
        let f = random_closed_map(3, &a, &b);
        assert_eq!(f, random_closed_map(3, &a, &b));
    }

    #[test]
    fn generated_are_valid() {
        for s in 0..40 {
            let c = random_complex(Field::Fp(32003), s, 3, 3);
            assert!(c.validate().is_empty(), "seed {s}");
            let d = random_complex(Field::Fp(32003), s + 1000, 3, 3);
            assert!(random_closed_map(s, &c, &d).is_closed());
        }
    }
}
