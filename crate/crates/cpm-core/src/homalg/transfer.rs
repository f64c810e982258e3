//! Strong deformation retracts onto homology and homotopy transfer of
//! twisting perturbations.

use std::collections::{BTreeMap, BTreeSet};

use super::complex::ChainComplex;
use super::map::ChainMap;
use crate::error::{CpmError, Result};
use crate::matrix::Matrix;

/// ι: H → C, π: C → H, h: C → C of degree −1 with
/// 1 − ιπ = dh + hd, πι = 1, hι = 0, πh = 0, hh = 0. H has zero differential.
#[derive(Clone, Debug)]
pub struct Sdr {
    pub big: ChainComplex,
    pub small: ChainComplex,
    pub iota: ChainMap,
    pub pi: ChainMap,
    pub h: ChainMap,
}

pub fn sdr(c: &ChainComplex) -> Result<Sdr> {
    sdr_with_iota(c, None)
}

/// With `iota` given, its columns are used as the homology basis; it must be a
/// quasi-isomorphism from a complex with zero differential.
pub fn sdr_with_iota(c: &ChainComplex, iota: Option<&ChainMap>) -> Result<Sdr> {
    let field = c.field();
    let small = match iota {
        Some(i) => {
            if i.target() != c || i.degree() != 0 {
                return Err(CpmError::Shape("prescribed inclusion does not land in the complex".into()));
            }
            i.source().clone()
        }
        None => ChainComplex::from_parts(field, c.homology().0, BTreeMap::new()),
    };
    let degs: BTreeSet<i32> = c.dims().keys().copied().collect();
    // complement of the cycles chosen in the previous degree
    let mut prev_l: Option<(i32, Matrix)> = None;
    let mut icomps = BTreeMap::new();
    let mut pcomps = BTreeMap::new();
    let mut hcomps = BTreeMap::new();
    for &n in &degs {
        let dim = c.dim(n);
        let b = match &prev_l {
            Some((m, l)) if *m == n - 1 => c.d(n - 1).mul(l),
            _ => Matrix::zeros(field, dim, 0),
        };
        let z = c.d(n).kernel();
        let hm = match iota {
            Some(i) => i.comp(n),
            None => z.select_cols(&Matrix::extend_columns(&b, &z)),
        };
        let bh = b.hcat(&hm);
        if bh.rank() != bh.cols() || bh.cols() != z.cols() {
            return Err(CpmError::NotQuasiIso(format!("homology basis in degree {n} is not a basis")));
        }
        let lcols = Matrix::extend_columns(&bh, &Matrix::identity(field, dim));
        let l = Matrix::identity(field, dim).select_cols(&lcols);
        let full = bh.hcat(&l);
        let inv = full.inverse().ok_or_else(|| CpmError::Invalid("basis extension failed".into()))?;
        let (nb, nh) = (b.cols(), hm.cols());
        if nh > 0 {
            icomps.insert(n, hm);
            pcomps.insert(n, inv.block(nb, 0, nh, dim));
        }
        if nb > 0 {
            let (_, lprev) = prev_l.as_ref().expect("boundaries come from the previous degree");
            hcomps.insert(n, lprev.mul(&inv.block(0, 0, nb, dim)));
        }
        prev_l = Some((n, l));
    }
    let iota = ChainMap::new(small.clone(), c.clone(), 0, icomps)?;
    let pi = ChainMap::new(c.clone(), small.clone(), 0, pcomps)?;
    let h = ChainMap::new(c.clone(), c.clone(), -1, hcomps)?;
    Ok(Sdr { big: c.clone(), small, iota, pi, h })
}

/// Block-diagonal sum of graded maps of one degree.
pub fn diag(maps: &[ChainMap]) -> Result<ChainMap> {
    let first = maps.first().ok_or_else(|| CpmError::Invalid("empty diagonal".into()))?;
    let field = first.field();
    let k = first.degree();
    let srcs: Vec<ChainComplex> = maps.iter().map(|m| m.source().clone()).collect();
    let tgts: Vec<ChainComplex> = maps.iter().map(|m| m.target().clone()).collect();
    let entries: Vec<(usize, usize, ChainMap)> =
        maps.iter().enumerate().map(|(i, m)| (i, i, m.clone())).collect();
    if maps.iter().any(|m| m.degree() != k || m.field() != field) {
        return Err(CpmError::Shape("diagonal blocks differ in degree or field".into()));
    }
    super::ops::block_map_graded(&srcs, &tgts, k, &entries)
}

pub fn sdr_sum(parts: &[Sdr]) -> Result<Sdr> {
    let field = parts.first().ok_or_else(|| CpmError::Invalid("empty sum".into()))?.big.field();
    let bigs: Vec<ChainComplex> = parts.iter().map(|s| s.big.clone()).collect();
    let smalls: Vec<ChainComplex> = parts.iter().map(|s| s.small.clone()).collect();
    Ok(Sdr {
        big: ChainComplex::direct_sum(&bigs, field),
        small: ChainComplex::direct_sum(&smalls, field),
        iota: diag(&parts.iter().map(|s| s.iota.clone()).collect::<Vec<_>>())?,
        pi: diag(&parts.iter().map(|s| s.pi.clone()).collect::<Vec<_>>())?,
        h: diag(&parts.iter().map(|s| s.h.clone()).collect::<Vec<_>>())?,
    })
}

/// Result of transferring a perturbation: the twisted big complex, the new
/// small complex and the transferred chain maps between them.
#[derive(Clone, Debug)]
pub struct Transferred {
    pub twisted: ChainComplex,
    pub small: ChainComplex,
    pub iota: ChainMap,
    pub pi: ChainMap,
}

/// `base` with `extra` added to its differential (checked).
pub fn twist(base: &ChainComplex, extra: &ChainMap) -> Result<ChainComplex> {
    let field = base.field();
    let mut diffs = BTreeMap::new();
    for &n in base.dims().keys() {
        if base.dim(n + 1) == 0 {
            continue;
        }
        let m = base.d(n).add(&extra.comp(n));
        if !m.is_zero() {
            diffs.insert(n, m);
        }
    }
    ChainComplex::new(field, base.dims().clone(), diffs)
}

/// Perturbs the big differential by `delta` (degree 1, with δh nilpotent) and
/// transfers along the retract.
pub fn perturb(s: &Sdr, delta: &ChainMap) -> Result<Transferred> {
    if delta.source() != &s.big || delta.target() != &s.big || delta.degree() != 1 {
        return Err(CpmError::Shape("perturbation must be a degree-1 endomorphism".into()));
    }
    let twisted = twist(&s.big, delta)?;
    let hc = s.h.neg();
    // A = Σ (δ hc)^m δ
    let mut a = ChainMap::zero(&s.big, &s.big, 1);
    let mut term = delta.clone();
    let bound = s.big.total_dim() + 2;
    for _ in 0..bound {
        if term.is_zero() {
            break;
        }
        a = a.add(&term)?;
        term = delta.compose(&hc.compose(&term)?)?;
    }
    if !term.is_zero() {
        return Err(CpmError::Invalid("perturbation is not nilpotent against the homotopy".into()));
    }
    let iota = s.iota.add(&hc.compose(&a.compose(&s.iota)?)?)?;
    let pi = s.pi.add(&s.pi.compose(&a.compose(&hc)?)?)?;
    let dprime = s.pi.compose(&a.compose(&s.iota)?)?;
    let small = twist(&s.small, &dprime)?;
    let iota = iota.with_ends(small.clone(), twisted.clone())?;
    let pi = pi.with_ends(twisted.clone(), small.clone())?;
    Ok(Transferred { twisted, small, iota, pi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::homalg::random::{random_complex_with, rng};

    #[test]
    fn retract_identities() {
        let mut r = rng(4);
        for _ in 0..30 {
            let c = random_complex_with(Field::Fp(101), &mut r, 4, 3);
            let s = sdr(&c).unwrap();
            let one = ChainMap::identity(&c);
            let lhs = one.add(&s.iota.compose(&s.pi).unwrap().neg()).unwrap();
            let rhs = s.h.boundary();
            // boundary(h) = dh − (−1)^{−1} h d = dh + hd
            assert_eq!(lhs, rhs);
            assert_eq!(s.pi.compose(&s.iota).unwrap(), ChainMap::identity(&s.small));
            assert!(s.h.compose(&s.iota).unwrap().is_zero());
            assert!(s.pi.compose(&s.h).unwrap().is_zero());
            assert!(s.h.compose(&s.h).unwrap().is_zero());
        }
    }

    #[test]
    fn cone_as_perturbation() {
        let mut r = rng(9);
        let f = Field::Fp(101);
        for _ in 0..30 {
            let a = random_complex_with(f, &mut r, 3, 3);
            let b = random_complex_with(f, &mut r, 3, 3);
            let m = crate::homalg::random::random_closed_map_with(&a, &b, &mut r);
            let a1 = a.shift(1);
            let parts = [sdr(&a1).unwrap(), sdr(&b).unwrap()];
            let s = sdr_sum(&parts).unwrap();
            let blk = ChainMap::new(a1.clone(), b.clone(), 1, m.comps().iter().map(|(n, x)| (n - 1, x.clone())).collect()).unwrap();
            let delta = super::super::ops::block_map_graded(&[a1.clone(), b.clone()], &[a1, b], 1, &[(1, 0, blk)]).unwrap();
            let t = perturb(&s, &delta).unwrap();
            assert_eq!(t.twisted, crate::homalg::cone(&m).unwrap());
            assert!(t.iota.is_closed() && t.pi.is_closed());
            assert_eq!(t.pi.compose(&t.iota).unwrap(), ChainMap::identity(&t.small));
            assert_eq!(t.small.homology(), t.twisted.homology());
        }
    }
}
