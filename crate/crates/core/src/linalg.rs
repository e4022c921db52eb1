//! Dense matrices over the rationals with exact row reduction.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
  rows: usize,
  cols: usize,
  data: Vec<BigRational>,
}

impl Matrix {
  pub fn zeros(rows: usize, cols: usize) -> Self {
    Self { rows, cols, data: vec![BigRational::zero(); rows * cols] }
  }

  pub fn identity(n: usize) -> Self {
    let mut m = Self::zeros(n, n);
    for i in 0..n {
      m.set(i, i, BigRational::one());
    }
    m
  }

  pub fn from_integers(rows: usize, cols: usize, entries: &[i64]) -> Self {
    assert_eq!(entries.len(), rows * cols);
    let data = entries.iter().map(|&e| BigRational::from_integer(BigInt::from(e))).collect();
    Self { rows, cols, data }
  }

  pub fn rows(&self) -> usize {
    self.rows
  }

  pub fn cols(&self) -> usize {
    self.cols
  }

  pub fn get(&self, r: usize, c: usize) -> &BigRational {
    &self.data[r * self.cols + c]
  }

  pub fn set(&mut self, r: usize, c: usize, value: BigRational) {
    self.data[r * self.cols + c] = value;
  }

  pub fn add_integer(&mut self, r: usize, c: usize, value: i64) {
    let slot = &mut self.data[r * self.cols + c];
    *slot += BigRational::from_integer(BigInt::from(value));
  }

  pub fn is_zero(&self) -> bool {
    self.data.iter().all(Zero::is_zero)
  }

  pub fn mul(&self, other: &Self) -> Self {
    assert_eq!(self.cols, other.rows, "dimension mismatch in product");
    let mut out = Self::zeros(self.rows, other.cols);
    for i in 0..self.rows {
      for k in 0..self.cols {
        let a = self.get(i, k);
        if a.is_zero() {
          continue;
        }
        for j in 0..other.cols {
          let b = other.get(k, j);
          if !b.is_zero() {
            let v = out.get(i, j) + a * b;
            out.set(i, j, v);
          }
        }
      }
    }
    out
  }

  pub fn trace(&self) -> BigRational {
    assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
    (0..self.rows).fold(BigRational::zero(), |acc, i| acc + self.get(i, i))
  }

  /// Columns `indices` of `self`, in the given order.
  pub fn select_columns(&self, indices: &[usize]) -> Self {
    let mut out = Self::zeros(self.rows, indices.len());
    for r in 0..self.rows {
      for (c, &j) in indices.iter().enumerate() {
        out.set(r, c, self.get(r, j).clone());
      }
    }
    out
  }

  fn hconcat(&self, other: &Self) -> Self {
    assert_eq!(self.rows, other.rows);
    let cols = self.cols + other.cols;
    let mut out = Self::zeros(self.rows, cols);
    for r in 0..self.rows {
      for c in 0..self.cols {
        out.set(r, c, self.get(r, c).clone());
      }
      for c in 0..other.cols {
        out.set(r, self.cols + c, other.get(r, c).clone());
      }
    }
    out
  }

  fn swap_rows(&mut self, a: usize, b: usize) {
    if a != b {
      for c in 0..self.cols {
        self.data.swap(a * self.cols + c, b * self.cols + c);
      }
    }
  }

  /// Reduced row echelon form over the first `limit` columns; returns the pivot columns.
  /// Pivot rows are chosen as the first nonzero entry at or below the current row.
  fn reduce(&mut self, limit: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..limit {
      if row == self.rows {
        break;
      }
      let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
        continue;
      };
      self.swap_rows(row, p);
      let inv = self.get(row, col).recip();
      for c in col..self.cols {
        let v = self.get(row, c) * &inv;
        self.set(row, c, v);
      }
      for r in 0..self.rows {
        if r == row {
          continue;
        }
        let factor = self.get(r, col).clone();
        if factor.is_zero() {
          continue;
        }
        for c in col..self.cols {
          let v = self.get(r, c) - &factor * self.get(row, c);
          self.set(r, c, v);
        }
      }
      pivots.push(col);
      row += 1;
    }
    pivots
  }

  pub fn rank(&self) -> usize {
    let mut m = self.clone();
    let cols = m.cols;
    m.reduce(cols).len()
  }

  /// Basis of the null space as the columns of an `cols × nullity` matrix, one vector per
  /// free column.
  pub fn kernel_basis(&self) -> Self {
    let mut r = self.clone();
    let cols = r.cols;
    let pivots = r.reduce(cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Self::zeros(cols, free.len());
    for (k, &f) in free.iter().enumerate() {
      basis.set(f, k, BigRational::one());
      for (i, &p) in pivots.iter().enumerate() {
        basis.set(p, k, -r.get(i, f).clone());
      }
    }
    basis
  }

  /// Basis of the column space: the pivot columns of `self`.
  pub fn column_basis(&self) -> Self {
    let mut r = self.clone();
    let cols = r.cols;
    let pivots = r.reduce(cols);
    self.select_columns(&pivots)
  }

  /// Solves `self · X = rhs` for `self` of full column rank. `None` when `self` is rank
  /// deficient or the system is inconsistent.
  pub fn solve_full_column_rank(&self, rhs: &Self) -> Option<Self> {
    assert_eq!(self.rows, rhs.rows);
    let k = self.cols;
    let mut aug = self.hconcat(rhs);
    let pivots = aug.reduce(k);
    if pivots.len() != k {
      return None;
    }
    for r in k..aug.rows {
      if (k..aug.cols).any(|c| !aug.get(r, c).is_zero()) {
        return None;
      }
    }
    let mut x = Self::zeros(k, rhs.cols);
    for r in 0..k {
      for c in 0..rhs.cols {
        x.set(r, c, aug.get(r, k + c).clone());
      }
    }
    Some(x)
  }
}

impl fmt::Debug for Matrix {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
    for r in 0..self.rows {
      let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
      writeln!(f, "  {}", row.join(" "))?;
    }
    write!(f, "]")
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
  }

  #[test]
  fn rank_and_kernel() {
    let m = Matrix::from_integers(2, 3, &[1, 2, 3, 2, 4, 6]);
    assert_eq!(m.rank(), 1);
    let k = m.kernel_basis();
    assert_eq!((k.rows(), k.cols()), (3, 2));
    assert!(m.mul(&k).is_zero());
    assert_eq!(k.rank(), 2);
  }

  #[test]
  fn column_basis_uses_pivot_columns() {
    let m = Matrix::from_integers(3, 3, &[0, 1, 1, 0, 1, 1, 0, 0, 1]);
    let b = m.column_basis();
    assert_eq!(b, m.select_columns(&[1, 2]));
  }

  #[test]
  fn solve_restricted_operator() {
    // W = span{(1,1,0)}, M swaps the first two coordinates: M|W = 1.
    let basis = Matrix::from_integers(3, 1, &[1, 1, 0]);
    let swap = Matrix::from_integers(3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]);
    let t = basis.solve_full_column_rank(&swap.mul(&basis)).unwrap();
    assert_eq!(t.trace(), q(1));
    // (1,0,0) is not invariant.
    let e1 = Matrix::from_integers(3, 1, &[1, 0, 0]);
    assert!(e1.solve_full_column_rank(&swap.mul(&e1)).is_none());
  }

  #[test]
  fn empty_shapes() {
    let m = Matrix::zeros(0, 4);
    assert_eq!(m.kernel_basis().cols(), 4);
    assert_eq!(Matrix::zeros(3, 0).column_basis().cols(), 0);
    let t = Matrix::zeros(2, 0).solve_full_column_rank(&Matrix::zeros(2, 0)).unwrap();
    assert_eq!(t.trace(), q(0));
    assert_eq!(Matrix::identity(3).trace(), q(3));
  }
}
