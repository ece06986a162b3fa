//! Compressed sparse row matrices over real or complex entries.
//!
//! Stiffness and mass matrices are assembled once per (grid, medium) pair as
//! real CSR with identical sparsity patterns; frequency systems are formed by
//! the pattern-preserving combination `K - zeta M` without reassembly.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::{Error, Result};

/// Field of matrix entries. Implemented for `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_re(x: f64) -> Self;
    /// Complex conjugate (identity on reals).
    fn conj(self) -> Self;
    /// Squared modulus.
    fn abs2(self) -> f64;
    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_re(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
}

/// Conjugated dot product `sum conj(a_i) b_i`.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s += x.conj() * *y;
    }
    s
}

/// Euclidean norm.
pub fn nrm2<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.abs2()).sum::<f64>().sqrt()
}

/// `y += alpha x`.
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<T>,
}

impl<T: Scalar> Csr<T> {
    /// Builds from (row, col, value) triplets; duplicates are summed in
    /// insertion order, keeping assembly deterministic.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(u32, u32, T)>,
    ) -> Result<Self> {
        for &(r, c, _) in &triplets {
            if r as usize >= nrows || c as usize >= ncols {
                return Err(Error::SingularAssembly(format!(
                    "triplet ({r}, {c}) outside {nrows}x{ncols}"
                )));
            }
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_counts = vec![0usize; nrows];
        let mut col = Vec::with_capacity(triplets.len());
        let mut val: Vec<T> = Vec::with_capacity(triplets.len());
        let mut prev: Option<(u32, u32)> = None;
        for (r, c, v) in triplets {
            if prev == Some((r, c)) {
                *val.last_mut().expect("nonempty after first push") += v;
            } else {
                col.push(c);
                val.push(v);
                row_counts[r as usize] += 1;
                prev = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        for i in 0..nrows {
            row_ptr[i + 1] = row_ptr[i] + row_counts[i];
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col,
            val,
        })
    }

    /// Builds directly from per-row (column, value) lists, columns sorted.
    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, T)>>) -> Result<Self> {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0usize);
        let nnz: usize = rows.iter().map(|r| r.len()).sum();
        let mut col = Vec::with_capacity(nnz);
        let mut val = Vec::with_capacity(nnz);
        for row in rows {
            let mut last: Option<u32> = None;
            for (c, v) in row {
                if c as usize >= ncols {
                    return Err(Error::SingularAssembly(format!(
                        "column {c} outside width {ncols}"
                    )));
                }
                if let Some(p) = last {
                    if c <= p {
                        return Err(Error::SingularAssembly(
                            "row columns must be strictly increasing".into(),
                        ));
                    }
                }
                last = Some(c);
                col.push(c);
                val.push(v);
            }
            row_ptr.push(col.len());
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col,
            val,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[T]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col[lo..hi], &self.val[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&(j as u32)) {
            Ok(p) => vals[p],
            Err(_) => T::zero(),
        }
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let lo = self.row_ptr[i];
            let hi = self.row_ptr[i + 1];
            let mut s = T::zero();
            for k in lo..hi {
                s += self.val[k] * x[self.col[k] as usize];
            }
            y[i] = s;
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.nrows).map(|i| self.get(i, i)).collect()
    }

    /// `b - Ax`.
    pub fn residual(&self, x: &[T], b: &[T]) -> Vec<T> {
        let mut r = self.matvec(x);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = *bi - *ri;
        }
        r
    }

    pub fn rel_residual(&self, x: &[T], b: &[T]) -> f64 {
        let bn = nrm2(b);
        if bn == 0.0 {
            return nrm2(&self.residual(x, b));
        }
        nrm2(&self.residual(x, b)) / bn
    }

    /// Maximum of `|A_ij - A_ji|` over stored entries; zero for Galerkin
    /// matrices up to roundoff.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.nrows {
            let (cols, vals) = self.row(i);
            for (c, v) in cols.iter().zip(vals) {
                let d = (*v - self.get(*c as usize, i)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn same_pattern<U>(&self, other: &Csr<U>) -> bool {
        self.nrows == other.nrows
            && self.ncols == other.ncols
            && self.row_ptr == other.row_ptr
            && self.col == other.col
    }

    /// Applies `f` to every stored value, keeping the pattern.
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Csr<U> {
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col: self.col.clone(),
            val: self.val.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// `alpha K + beta M` for pattern-identical real matrices, producing entries
/// in any scalar field. This is how the frequency system `K - i omega M` and
/// the time-step system `rho M/dt + theta K` are formed without reassembly.
pub fn combine<T: Scalar>(k: &Csr<f64>, alpha: T, m: &Csr<f64>, beta: T) -> Result<Csr<T>> {
    if !k.same_pattern(m) {
        return Err(Error::GridMismatch(
            "stiffness and mass patterns differ".into(),
        ));
    }
    Ok(Csr {
        nrows: k.nrows,
        ncols: k.ncols,
        row_ptr: k.row_ptr.clone(),
        col: k.col.clone(),
        val: k
            .val
            .iter()
            .zip(&m.val)
            .map(|(&a, &b)| alpha * T::from_re(a) + beta * T::from_re(b))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let t = vec![
            (1u32, 2u32, 3.0),
            (0, 0, 1.0),
            (1, 2, 0.5),
            (2, 1, -2.0),
            (0, 2, 4.0),
        ];
        let a = Csr::from_triplets(3, 3, t).unwrap();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(1, 2), 3.5);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(0, 2), 4.0);
        assert_eq!(a.get(2, 1), -2.0);
        assert_eq!(a.get(2, 2), 0.0);
        let y = a.matvec(&[1.0, 2.0, 3.0]);
        assert_eq!(y, vec![13.0, 10.5, -4.0]);
    }

    #[test]
    fn triplets_reject_out_of_range() {
        assert!(Csr::from_triplets(2, 2, vec![(2u32, 0u32, 1.0)]).is_err());
    }

    #[test]
    fn empty_rows_are_allowed() {
        let a = Csr::from_triplets(4, 4, vec![(0u32, 0u32, 2.0), (3, 3, 5.0)]).unwrap();
        let y = a.matvec(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(y, vec![2.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn from_rows_matches_triplets() {
        let a = Csr::from_rows(3, vec![vec![(0, 1.0), (2, 4.0)], vec![(2, 3.5)], vec![(1, -2.0)]])
            .unwrap();
        let b = Csr::from_triplets(
            3,
            3,
            vec![(0u32, 0u32, 1.0), (0, 2, 4.0), (1, 2, 3.5), (2, 1, -2.0)],
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(Csr::<f64>::from_rows(3, vec![vec![(1, 1.0), (1, 2.0)]]).is_err());
    }

    #[test]
    fn combine_builds_complex_shift() {
        let k = Csr::from_triplets(2, 2, vec![(0u32, 0u32, 2.0), (0, 1, -1.0), (1, 1, 2.0)])
            .unwrap();
        let m = Csr::from_triplets(2, 2, vec![(0u32, 0u32, 1.0), (0, 1, 0.5), (1, 1, 1.0)])
            .unwrap();
        let s = combine(&k, Complex64::new(1.0, 0.0), &m, Complex64::new(0.0, -3.0)).unwrap();
        assert_eq!(s.get(0, 0), Complex64::new(2.0, -3.0));
        assert_eq!(s.get(0, 1), Complex64::new(-1.0, -1.5));
        let bad = Csr::from_triplets(2, 2, vec![(0u32, 0u32, 1.0)]).unwrap();
        assert!(combine(&k, Complex64::new(1.0, 0.0), &bad, Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn symmetry_defect_detects_asymmetry() {
        let sym = Csr::from_triplets(
            2,
            2,
            vec![(0u32, 0u32, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)],
        )
        .unwrap();
        assert_eq!(sym.symmetry_defect(), 0.0);
        let asym = Csr::from_triplets(2, 2, vec![(0u32, 1u32, 1.0)]).unwrap();
        assert_eq!(asym.symmetry_defect(), 1.0);
    }

    #[test]
    fn blas_helpers() {
        let a = [Complex64::new(1.0, 1.0), Complex64::new(0.0, -2.0)];
        let b = [Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0)];
        let d = dot(&a, &b);
        // conj(a) . b = (1-i)(2) + (2i)(1+i) = 2 - 2i + 2i - 2 = 0
        assert!((d - Complex64::new(0.0, 0.0)).norm() < 1e-15);
        assert!((nrm2(&a) - 6.0f64.sqrt()).abs() < 1e-15);
        let mut y = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        axpy(Complex64::new(0.0, 1.0), &b, &mut y);
        assert!((y[0] - Complex64::new(1.0, 2.0)).norm() < 1e-15);
    }
}
