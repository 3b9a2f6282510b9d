//! Dense complex matrices and the permanent.
//!
//! The matrices in this crate are small (circuit generators, sector blocks),
//! so a plain row-major layout with direct loops is the whole story.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Error;
use crate::NUMERIC_TOL;

/// A dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Copies `block` into this matrix with its top-left corner at (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    /// The sub-matrix at rows [r0, r0+nr) × cols [c0, c0+nc).
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        let mut out = Mat::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &Mat) -> Mat {
        let mut out = Mat::zeros(self.rows + other.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, self.cols, other);
        out
    }

    /// max |self·self† − I|, the unitarity defect for square matrices.
    pub fn unitarity_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        self.mul(&self.dagger()).max_abs_diff(&Mat::identity(self.rows))
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A square matrix checked to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    mat: Mat,
}

impl UnitaryMatrix {
    /// Verifies `U·U† = I` within [`NUMERIC_TOL`].
    pub fn new(mat: Mat) -> Result<Self, Error> {
        if mat.rows() != mat.cols() {
            return Err(Error::DimensionMismatch { expected: mat.rows(), actual: mat.cols() });
        }
        let deviation = mat.unitarity_defect();
        if deviation > NUMERIC_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryMatrix { mat })
    }

    /// Skips the unitarity check. For callers that already hold a proof,
    /// e.g. products of verified factors.
    pub fn new_unchecked(mat: Mat) -> Self {
        assert_eq!(mat.rows(), mat.cols());
        UnitaryMatrix { mat }
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix { mat: Mat::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.mat[(i, j)]
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix { mat: self.mat.mul(&other.mat) }
    }

    pub fn dagger(&self) -> UnitaryMatrix {
        UnitaryMatrix { mat: self.mat.dagger() }
    }

    pub fn direct_sum(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix { mat: self.mat.direct_sum(&other.mat) }
    }
}

/// Permanent by Ryser's formula with Gray-code row-sum updates, O(2^n · n).
///
/// The empty matrix has permanent 1.
pub fn permanent(m: &Mat) -> Complex64 {
    assert_eq!(m.rows(), m.cols(), "permanent needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    assert!(n < 63, "permanent order too large");
    let mut sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_gray: u64 = 0;
    for g in 1..(1u64 << n) {
        let gray = g ^ (g >> 1);
        let bit = gray ^ prev_gray;
        let j = bit.trailing_zeros() as usize;
        if gray & bit != 0 {
            for i in 0..n {
                sums[i] += m[(i, j)];
            }
        } else {
            for i in 0..n {
                sums[i] -= m[(i, j)];
            }
        }
        prev_gray = gray;
        let prod = sums.iter().fold(Complex64::new(1.0, 0.0), |acc, s| acc * s);
        if (n as u32 - gray.count_ones()) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Sum over permutations, for cross-checking Ryser on small orders.
    fn permanent_naive(m: &Mat) -> Complex64 {
        fn go(m: &Mat, row: usize, used: &mut [bool]) -> Complex64 {
            let n = m.rows();
            if row == n {
                return c(1.0, 0.0);
            }
            let mut acc = c(0.0, 0.0);
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    acc += m[(row, j)] * go(m, row + 1, used);
                    used[j] = false;
                }
            }
            acc
        }
        let mut used = vec![false; m.rows()];
        go(m, 0, &mut used)
    }

    #[test]
    fn permanent_empty_and_scalar() {
        assert_eq!(permanent(&Mat::zeros(0, 0)), c(1.0, 0.0));
        let mut m = Mat::zeros(1, 1);
        m[(0, 0)] = c(2.5, -1.0);
        assert_eq!(permanent(&m), c(2.5, -1.0));
    }

    #[test]
    fn permanent_matches_naive_expansion() {
        // Deterministic pseudo-random entries.
        let mut seed = 1u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for n in 1..=5 {
            let mut m = Mat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = c(next(), next());
                }
            }
            let diff = (permanent(&m) - permanent_naive(&m)).norm();
            assert!(diff < 1e-12, "order {n}: diff {diff}");
        }
    }

    #[test]
    fn identity_is_unitary_and_products_check_out() {
        let u = UnitaryMatrix::new(Mat::identity(3)).unwrap();
        assert_eq!(u.dim(), 3);
        let x = Mat::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let x = UnitaryMatrix::new(x).unwrap();
        assert_eq!(x.mul(&x).mat().max_abs_diff(&Mat::identity(2)), 0.0);
    }

    #[test]
    fn non_unitary_rejected() {
        let mut m = Mat::identity(2);
        m[(0, 0)] = c(2.0, 0.0);
        assert!(matches!(UnitaryMatrix::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn direct_sum_layout() {
        let a = Mat::identity(1);
        let mut b = Mat::zeros(2, 2);
        b[(0, 1)] = c(1.0, 0.0);
        b[(1, 0)] = c(1.0, 0.0);
        let s = a.direct_sum(&b);
        assert_eq!(s[(0, 0)], c(1.0, 0.0));
        assert_eq!(s[(1, 2)], c(1.0, 0.0));
        assert_eq!(s[(2, 1)], c(1.0, 0.0));
        assert_eq!(s[(1, 1)], c(0.0, 0.0));
    }
}
