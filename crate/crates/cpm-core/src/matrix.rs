//! Dense matrices over an exact field.

use crate::error::{CpmError, Result};
use crate::field::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: Field, rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(CpmError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|s| !field.contains(s)) {
            return Err(CpmError::FieldMismatch(format!("entry {bad} not in {field:?}")));
        }
        Ok(Matrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn from_i64(field: Field, rows: usize, cols: usize, vals: &[i64]) -> Matrix {
        assert_eq!(vals.len(), rows * cols);
        Matrix {
            field,
            rows,
            cols,
            data: vals.iter().map(|&x| field.from_i64(x)).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        assert_eq!(self.field, o.field, "matrix product field");
        let mut out = Matrix::zeros(self.field, self.rows, o.cols);
        if let Field::Fp(p) = self.field {
            let a = self.to_u64();
            let b = o.to_u64();
            let mut acc = vec![0u64; o.cols];
            for i in 0..self.rows {
                acc.iter_mut().for_each(|x| *x = 0);
                for k in 0..self.cols {
                    let x = a[i * self.cols + k];
                    if x == 0 {
                        continue;
                    }
                    for (j, s) in acc.iter_mut().enumerate() {
                        *s = (*s + x * b[k * o.cols + j]) % p;
                    }
                }
                for (j, s) in acc.iter().enumerate() {
                    out.data[i * o.cols + j] = Scalar::Fp { v: *s, p };
                }
            }
            return out;
        }
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let y = o.get(k, j);
                    if y.is_zero() {
                        continue;
                    }
                    let idx = i * o.cols + j;
                    out.data[idx] = out.data[idx].add_ref(&x.mul_ref(y));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.shape(), o.shape(), "matrix sum shape");
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul_ref(s)).collect(),
        }
    }

    pub fn signed(&self, sign: i64) -> Matrix {
        if sign >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    /// Writes `block` with its top-left corner at (r0, c0).
    pub fn put(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// Adds `block` into the region with top-left corner (r0, c0).
    pub fn add_at(&mut self, r0: usize, c0: usize, block: &Matrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                let b = block.get(i, j);
                if !b.is_zero() {
                    let idx = (r0 + i) * self.cols + c0 + j;
                    self.data[idx] = self.data[idx].add_ref(b);
                }
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        m
    }

    /// Kronecker product.
    pub fn kron(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        m.set(i * o.rows + k, j * o.cols + l, a.mul_ref(o.get(k, l)));
                    }
                }
            }
        }
        m
    }

    fn to_u64(&self) -> Vec<u64> {
        self.data
            .iter()
            .map(|s| match s {
                Scalar::Fp { v, .. } => *v,
                Scalar::Q(_) => unreachable!(),
            })
            .collect()
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv();
            for j in c..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    if m.get(r, j).is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        if let Field::Fp(p) = self.field {
            return rank_fp(self.to_u64(), self.rows, self.cols, p);
        }
        self.rref().1.len()
    }

    /// Some x with self·x = b (b a single column), if the system is consistent.
    pub fn solve(&self, b: &Matrix) -> Option<Matrix> {
        assert_eq!((b.rows, b.cols), (self.rows, 1));
        let (r, piv) = self.hcat(b).rref();
        if piv.contains(&self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.field, self.cols, 1);
        for (i, &c) in piv.iter().enumerate() {
            x.set(c, 0, r.get(i, self.cols).clone());
        }
        Some(x)
    }

    /// Basis of the null space, as columns of the returned matrix.
    pub fn kernel(&self) -> Matrix {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        for (t, &f) in free.iter().enumerate() {
            k.set(f, t, self.field.one());
            for (i, &pc) in piv.iter().enumerate() {
                k.set(pc, t, r.get(i, f).neg_ref());
            }
        }
        k
    }

    /// Columns `cols` of self, as a new matrix.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.field, self.rows, cols.len());
        for (t, &c) in cols.iter().enumerate() {
            for i in 0..self.rows {
                m.set(i, t, self.get(i, c).clone());
            }
        }
        m
    }

    pub fn hcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        let mut m = Matrix::zeros(self.field, self.rows, self.cols + o.cols);
        m.put(0, 0, self);
        m.put(0, self.cols, o);
        m
    }

    pub fn vcat(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols);
        let mut m = Matrix::zeros(self.field, self.rows + o.rows, self.cols);
        m.put(0, 0, self);
        m.put(self.rows, 0, o);
        m
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hcat(&Matrix::identity(self.field, n));
        let (r, piv) = aug.rref();
        if piv.len() < n || (0..n).any(|i| piv[i] != i) {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    /// Greedy choice of columns of `self` extending the span of `base` to a basis
    /// of span(base) + span(self); returns the chosen column indices.
    pub fn extend_columns(base: &Matrix, cand: &Matrix) -> Vec<usize> {
        let mut cur = base.clone();
        let mut rank = cur.rank();
        let mut chosen = Vec::new();
        for c in 0..cand.cols {
            let trial = cur.hcat(&cand.select_cols(&[c]));
            let r = trial.rank();
            if r > rank {
                cur = trial;
                rank = r;
                chosen.push(c);
            }
        }
        chosen
    }
}

fn rank_fp(mut a: Vec<u64>, rows: usize, cols: usize, p: u64) -> usize {
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = {
            let mut b = a[r * cols + c];
            let mut e = p - 2;
            let mut x = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    x = x * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            x
        };
        for j in c..cols {
            a[r * cols + j] = a[r * cols + j] * inv % p;
        }
        for i in (r + 1)..rows {
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            for j in c..cols {
                let s = a[r * cols + j];
                if s != 0 {
                    a[i * cols + j] = (a[i * cols + j] + (p - f) * s) % p;
                }
            }
        }
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        for f in [Field::Q, Field::Fp(32003)] {
            let m = Matrix::from_i64(f, 2, 3, &[1, 2, 3, 2, 4, 6]);
            assert_eq!(m.rank(), 1);
            let k = m.kernel();
            assert_eq!(k.cols(), 2);
            assert!(m.mul(&k).is_zero());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = Field::Q;
        let m = Matrix::from_i64(f, 2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(f, 2));
        assert!(Matrix::from_i64(f, 2, 2, &[1, 1, 1, 1]).inverse().is_none());
    }

    #[test]
    fn kron_shape() {
        let f = Field::Q;
        let a = Matrix::identity(f, 2);
        let b = Matrix::from_i64(f, 1, 3, &[1, 2, 3]);
        let k = a.kron(&b);
        assert_eq!(k.shape(), (2, 6));
        assert_eq!(k.get(1, 5).to_text(), "3");
    }
}
