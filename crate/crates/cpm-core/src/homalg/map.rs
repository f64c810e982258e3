use std::collections::BTreeMap;

use super::complex::ChainComplex;
use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Graded map of degree k: component n sends source^n to target^{n+k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    degree: i32,
    comps: BTreeMap<i32, Matrix>,
}

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl ChainMap {
    /// Unchecked apart from shapes; components for degrees where either side
    /// vanishes are dropped.
    pub fn new(
        source: ChainComplex,
        target: ChainComplex,
        degree: i32,
        comps: BTreeMap<i32, Matrix>,
    ) -> Result<ChainMap> {
        if source.field() != target.field() {
            return Err(CpmError::FieldMismatch("source and target fields differ".into()));
        }
        let mut kept = BTreeMap::new();
        for (n, m) in comps {
            let want = (target.dim(n + degree), source.dim(n));
            if want.0 == 0 || want.1 == 0 {
                continue;
            }
            if m.shape() != want {
                return Err(CpmError::Shape(format!(
                    "component {n} is {:?}, expected {:?}",
                    m.shape(),
                    want
                )));
            }
            if m.field() != source.field() {
                return Err(CpmError::FieldMismatch(format!("component {n}")));
            }
            if !m.is_zero() {
                kept.insert(n, m);
            }
        }
        Ok(ChainMap {
            source,
            target,
            degree,
            comps: kept,
        })
    }

    pub fn zero(source: &ChainComplex, target: &ChainComplex, degree: i32) -> ChainMap {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn identity(c: &ChainComplex) -> ChainMap {
        let comps = c
            .dims()
            .iter()
            .map(|(n, d)| (*n, Matrix::identity(c.field(), *d)))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            degree: 0,
            comps,
        }
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }
    pub fn target(&self) -> &ChainComplex {
        &self.target
    }
    pub fn degree(&self) -> i32 {
        self.degree
    }
    pub fn field(&self) -> Field {
        self.source.field()
    }

    pub fn comp(&self, n: i32) -> Matrix {
        match self.comps.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(
                self.field(),
                self.target.dim(n + self.degree),
                self.source.dim(n),
            ),
        }
    }

    pub fn comps(&self) -> &BTreeMap<i32, Matrix> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(|m| m.is_zero())
    }

    /// d_T f - (-1)^k f d_S, as a map of degree k+1.
    pub fn boundary(&self) -> ChainMap {
        let k = self.degree;
        let mut comps = BTreeMap::new();
        let mut degs: std::collections::BTreeSet<i32> = self.source.dims().keys().copied().collect();
        degs.extend(self.source.dims().keys().map(|n| n - 1));
        for n in degs {
            let rows = self.target.dim(n + k + 1);
            let cols = self.source.dim(n);
            if rows == 0 || cols == 0 {
                continue;
            }
            let a = self.target.d(n + k).mul(&self.comp(n));
            let b = self.comp(n + 1).mul(&self.source.d(n)).signed(sign(k));
            let m = a.sub(&b);
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: k + 1,
            comps,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.boundary().is_zero()
    }

    pub fn check_closed_degree0(&self) -> Result<()> {
        if self.degree != 0 {
            return Err(CpmError::NotClosed(format!("degree {}", self.degree)));
        }
        if !self.is_closed() {
            return Err(CpmError::NotClosed("f d ≠ d f".into()));
        }
        Ok(())
    }

    /// self ∘ other.
    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap> {
        if other.target != self.source {
            return Err(CpmError::Shape("composition of non-composable maps".into()));
        }
        let mut comps = BTreeMap::new();
        for &n in other.source.dims().keys() {
            let m = self.comp(n + other.degree).mul(&other.comp(n));
            comps.insert(n, m);
        }
        ChainMap::new(
            other.source.clone(),
            self.target.clone(),
            self.degree + other.degree,
            comps,
        )
    }

    pub fn add(&self, o: &ChainMap) -> Result<ChainMap> {
        if self.source != o.source || self.target != o.target || self.degree != o.degree {
            return Err(CpmError::Shape("sum of maps with different shapes".into()));
        }
        let mut comps = self.comps.clone();
        for (n, m) in &o.comps {
            let v = match comps.get(n) {
                Some(a) => a.add(m),
                None => m.clone(),
            };
            comps.insert(*n, v);
        }
        comps.retain(|_, m| !m.is_zero());
        Ok(ChainMap {
            comps,
            ..self.clone()
        })
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap {
            comps: self.comps.iter().map(|(n, m)| (*n, m.neg())).collect(),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: &crate::field::Scalar) -> ChainMap {
        ChainMap {
            comps: self.comps.iter().map(|(n, m)| (*n, m.scale(s))).filter(|(_, m)| !m.is_zero()).collect(),
            ..self.clone()
        }
    }

    /// f[k]: source[k] -> target[k], components (f[k])_n = f_{n+k}. Degree-0 only.
    pub fn shift(&self, k: i32) -> ChainMap {
        assert_eq!(self.degree, 0, "shift of a graded map");
        ChainMap {
            source: self.source.shift(k),
            target: self.target.shift(k),
            degree: 0,
            comps: self.comps.iter().map(|(n, m)| (n - k, m.clone())).collect(),
        }
    }

    /// Replaces source/target by equal complexes (used after re-deriving them).
    pub fn with_ends(&self, source: ChainComplex, target: ChainComplex) -> Result<ChainMap> {
        ChainMap::new(source, target, self.degree, self.comps.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_closed() {
        let f = Field::Q;
        let c = ChainComplex::from_parts(
            f,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, Matrix::identity(f, 1))]),
        );
        assert!(ChainMap::identity(&c).is_closed());
    }
}
