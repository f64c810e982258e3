use std::collections::BTreeMap;

use crate::error::{CpmError, Result};
use crate::field::Field;
use crate::matrix::Matrix;

/// Bounded cochain complex of finite-dimensional vector spaces.
/// `d(n)` maps degree n to degree n+1 and has shape dim(n+1) x dim(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    field: Field,
    dims: BTreeMap<i32, usize>,
    diffs: BTreeMap<i32, Matrix>,
}

/// Homology dimensions by degree; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyProfile(pub BTreeMap<i32, usize>);

impl HomologyProfile {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn get(&self, n: i32) -> usize {
        self.0.get(&n).copied().unwrap_or(0)
    }
    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .map(|(n, d)| if n.rem_euclid(2) == 0 { *d as i64 } else { -(*d as i64) })
            .sum()
    }
    pub fn shifted(&self, k: i32) -> HomologyProfile {
        HomologyProfile(self.0.iter().map(|(n, d)| (n - k, *d)).collect())
    }
}

impl ChainComplex {
    /// Builds a complex without checking d^2 = 0 (see `validate`). Zero-dimensional
    /// degrees, differentials touching them and zero differentials are dropped.
    pub fn from_parts(
        field: Field,
        dims: BTreeMap<i32, usize>,
        diffs: BTreeMap<i32, Matrix>,
    ) -> ChainComplex {
        let dims: BTreeMap<i32, usize> = dims.into_iter().filter(|(_, d)| *d > 0).collect();
        let diffs = diffs
            .into_iter()
            .filter(|(n, m)| dims.contains_key(n) && dims.contains_key(&(n + 1)) && !m.is_zero())
            .collect();
        ChainComplex { field, dims, diffs }
    }

    /// Checked constructor: shape and d^2 = 0 violations are errors.
    pub fn new(
        field: Field,
        dims: BTreeMap<i32, usize>,
        diffs: BTreeMap<i32, Matrix>,
    ) -> Result<ChainComplex> {
        for (n, m) in &diffs {
            if m.field() != field {
                return Err(CpmError::FieldMismatch(format!("differential in degree {n}")));
            }
            let src = dims.get(n).copied().unwrap_or(0);
            let tgt = dims.get(&(n + 1)).copied().unwrap_or(0);
            if m.shape() != (tgt, src) && !(m.rows() * m.cols() == 0 && src * tgt == 0) {
                return Err(CpmError::Shape(format!(
                    "d_{n} is {}x{}, expected {tgt}x{src}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let c = ChainComplex::from_parts(field, dims, diffs);
        let diag = c.validate();
        if diag.is_empty() {
            Ok(c)
        } else {
            Err(CpmError::Invalid(diag.join("; ")))
        }
    }

    pub fn zero(field: Field) -> ChainComplex {
        ChainComplex {
            field,
            dims: BTreeMap::new(),
            diffs: BTreeMap::new(),
        }
    }

    /// k^dim concentrated in one degree.
    pub fn concentrated(field: Field, deg: i32, dim: usize) -> ChainComplex {
        ChainComplex::from_parts(field, BTreeMap::from([(deg, dim)]), BTreeMap::new())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self, n: i32) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i32, usize> {
        &self.dims
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.dims.keys().copied().collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn min_deg(&self) -> Option<i32> {
        self.dims.keys().next().copied()
    }

    pub fn max_deg(&self) -> Option<i32> {
        self.dims.keys().next_back().copied()
    }

    pub fn d(&self, n: i32) -> Matrix {
        match self.diffs.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.field, self.dim(n + 1), self.dim(n)),
        }
    }

    pub fn euler(&self) -> i64 {
        self.dims
            .iter()
            .map(|(n, d)| if n.rem_euclid(2) == 0 { *d as i64 } else { -(*d as i64) })
            .sum()
    }

    /// Violations of d^2 = 0 and of shape/field consistency. Empty iff valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (n, m) in &self.diffs {
            if m.field() != self.field {
                out.push(format!("field mismatch at degree {n}"));
            }
            if m.shape() != (self.dim(n + 1), self.dim(*n)) {
                out.push(format!("shape mismatch at degree {n}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for n in self.diffs.keys() {
            if self.diffs.contains_key(&(n + 1)) && !self.d(n + 1).mul(&self.d(*n)).is_zero() {
                out.push(format!("d²≠0 at degree {n}"));
            }
        }
        out
    }

    pub fn homology(&self) -> HomologyProfile {
        let mut h = BTreeMap::new();
        for (&n, &dim) in &self.dims {
            let out_rank = self.diffs.get(&n).map_or(0, |m| m.rank());
            let in_rank = self.diffs.get(&(n - 1)).map_or(0, |m| m.rank());
            let v = dim - out_rank - in_rank;
            if v > 0 {
                h.insert(n, v);
            }
        }
        HomologyProfile(h)
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_zero()
    }

    /// R^n = C^{n+k}, d_R = (-1)^k d_C.
    pub fn shift(&self, k: i32) -> ChainComplex {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        ChainComplex {
            field: self.field,
            dims: self.dims.iter().map(|(n, d)| (n - k, *d)).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(n, m)| (n - k, m.signed(sign)))
                .collect(),
        }
    }

    /// Offsets of each summand in every degree of the direct sum.
    pub fn direct_sum(parts: &[ChainComplex], field: Field) -> ChainComplex {
        let mut dims: BTreeMap<i32, usize> = BTreeMap::new();
        for p in parts {
            for (n, d) in &p.dims {
                *dims.entry(*n).or_default() += d;
            }
        }
        let mut diffs = BTreeMap::new();
        for (&n, &dn) in &dims {
            let dn1 = dims.get(&(n + 1)).copied().unwrap_or(0);
            if dn1 == 0 {
                continue;
            }
            let mut m = Matrix::zeros(field, dn1, dn);
            let (mut r, mut c) = (0, 0);
            for p in parts {
                m.put(r, c, &p.d(n));
                r += p.dim(n + 1);
                c += p.dim(n);
            }
            diffs.insert(n, m);
        }
        ChainComplex::from_parts(field, dims, diffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_line(n: usize) -> ChainComplex {
        // Q -id-> Q -id-> ... in degrees 0..n-1
        let f = Field::Q;
        let dims = (0..n as i32).map(|i| (i, 1)).collect();
        let diffs = (0..n as i32 - 1)
            .map(|i| (i, Matrix::identity(f, 1)))
            .collect();
        ChainComplex::from_parts(f, dims, diffs)
    }

    #[test]
    fn zero_differentials_are_valid() {
        let c = ChainComplex::concentrated(Field::Q, 0, 3);
        assert!(c.validate().is_empty());
        assert_eq!(c.homology().get(0), 3);
    }

    #[test]
    fn identity_squared_flagged() {
        let c = q_line(3);
        assert_eq!(c.validate(), vec!["d²≠0 at degree 0".to_string()]);
    }

    #[test]
    fn two_term_identity_acyclic() {
        assert!(q_line(2).is_acyclic());
    }

    #[test]
    fn shift_conventions() {
        let c = ChainComplex::concentrated(Field::Q, 0, 1);
        assert_eq!(c.shift(0), c);
        assert_eq!(c.shift(1).dim(-1), 1);
        let l = q_line(2);
        assert_eq!(l.shift(1).d(-1).get(0, 0).to_text(), "-1");
        assert_eq!(l.shift(1).shift(-1), l);
    }
}
