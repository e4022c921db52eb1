//! Compactly supported homology of locally compact open simplex sets, with the traces of
//! the induced map.
//!
//! For locally compact `U` the compactly supported theory is that of the pair
//! `(cl U, cl U \ U)`, whose relative chain groups have the simplices of `U` as basis. The
//! boundary and the chain map are the ambient ones with every frontier simplex deleted.
//! Traces are taken on homology; over a field they agree with the traces on the dual
//! cochain complex.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::{same_ambient, OpenSimplexSet, SimplexId};
use crate::linalg::Matrix;
use crate::simpmap::SimplicialSelfMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
  #[error("map and set live over different complexes")]
  AmbientMismatch,
  #[error("set is not locally compact: frontier simplex {frontier} has face {face} inside the set")]
  NotLocallyCompact { frontier: String, face: String },
  #[error("set is not invariant under the map: {0}")]
  NotPairInvariant(String),
  #[error("induced map does not commute with the boundary in degree {0}")]
  NotChainMap(usize),
  #[error("subspace in degree {0} is not invariant under the induced map")]
  InconsistentSolve(usize),
  #[error("trace in degree {degree} is not an integer: {value}")]
  NonIntegralTrace { degree: usize, value: String },
}

/// Relative chain complex of `(cl U, cl U \ U)` with the induced endomorphism.
#[derive(Debug, Clone)]
pub struct CompactSupportComplex {
  basis: Vec<Vec<SimplexId>>,
  /// `boundaries[p]`: `C_p → C_{p-1}`; `boundaries[0]` has zero rows.
  boundaries: Vec<Matrix>,
  endomorphisms: Vec<Matrix>,
}

impl CompactSupportComplex {
  /// Complex in degrees `0..=dim(ambient)`.
  pub fn new(map: &SimplicialSelfMap, set: &OpenSimplexSet) -> Result<Self, HomologyError> {
    let top = set.ambient().dimension().map_or(0, |d| d + 1);
    Self::with_degrees(map, set, top)
  }

  /// Complex in degrees `0..degrees`; degrees above the ambient dimension are zero.
  pub fn with_degrees(
    map: &SimplicialSelfMap,
    set: &OpenSimplexSet,
    degrees: usize,
  ) -> Result<Self, HomologyError> {
    if !same_ambient(map.ambient(), set.ambient()) {
      return Err(HomologyError::AmbientMismatch);
    }
    let ambient = set.ambient();
    if let Some((frontier, face)) = set.local_compactness_violation() {
      return Err(HomologyError::NotLocallyCompact {
        frontier: ambient.simplex(frontier).to_string(),
        face: ambient.simplex(face).to_string(),
      });
    }
    if let Some(violation) = map.pair_invariance_violation(set) {
      return Err(HomologyError::NotPairInvariant(violation.describe(ambient)));
    }

    let mut basis: Vec<Vec<SimplexId>> = vec![Vec::new(); degrees];
    for id in set.iter() {
      let dim = ambient.simplex(id).dim();
      if dim < degrees {
        basis[dim].push(id);
      }
    }
    let position: Vec<HashMap<SimplexId, usize>> =
      basis.iter().map(|b| b.iter().enumerate().map(|(i, &id)| (id, i)).collect()).collect();

    let mut boundaries = Vec::with_capacity(degrees);
    let mut endomorphisms = Vec::with_capacity(degrees);
    for p in 0..degrees {
      let n = basis[p].len();
      let rows = if p == 0 { 0 } else { basis[p - 1].len() };
      let mut boundary = Matrix::zeros(rows, n);
      let mut endo = Matrix::zeros(n, n);
      for (j, &id) in basis[p].iter().enumerate() {
        if p > 0 {
          for (i, face) in ambient.facets(id).iter().enumerate() {
            if let Some(&row) = position[p - 1].get(face) {
              boundary.add_integer(row, j, if i % 2 == 0 { 1 } else { -1 });
            }
          }
        }
        if let Some(term) = map.chain_coefficient(id) {
          if let Some(&row) = position[p].get(&term.target) {
            endo.add_integer(row, j, term.sign);
          }
        }
      }
      boundaries.push(boundary);
      endomorphisms.push(endo);
    }

    let complex = Self { basis, boundaries, endomorphisms };
    for p in 1..degrees {
      let lhs = complex.boundaries[p].mul(&complex.endomorphisms[p]);
      let rhs = complex.endomorphisms[p - 1].mul(&complex.boundaries[p]);
      if lhs != rhs {
        return Err(HomologyError::NotChainMap(p));
      }
    }
    Ok(complex)
  }

  pub fn degrees(&self) -> usize {
    self.basis.len()
  }

  pub fn basis(&self, degree: usize) -> &[SimplexId] {
    self.basis.get(degree).map_or(&[], Vec::as_slice)
  }

  pub fn boundary(&self, degree: usize) -> &Matrix {
    &self.boundaries[degree]
  }

  pub fn endomorphism(&self, degree: usize) -> &Matrix {
    &self.endomorphisms[degree]
  }

  /// `Σ_p (-1)^p tr(M_p)` at chain level.
  pub fn chain_trace(&self) -> BigRational {
    self.endomorphisms.iter().enumerate().fold(BigRational::zero(), |acc, (p, m)| {
      if p % 2 == 0 {
        acc + m.trace()
      } else {
        acc - m.trace()
      }
    })
  }

  /// `∂_p ∘ ∂_{p+1} = 0` in every degree.
  pub fn is_complex(&self) -> bool {
    (1..self.degrees().saturating_sub(1)).all(|p| self.boundaries[p].mul(&self.boundaries[p + 1]).is_zero())
  }
}

/// Betti numbers and induced-map traces per degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
  pub betti: Vec<usize>,
  pub traces: Vec<i64>,
  pub lefschetz: i64,
}

impl HomologySummary {
  /// Betti number in `degree`; zero past the computed range.
  pub fn betti(&self, degree: usize) -> usize {
    self.betti.get(degree).copied().unwrap_or(0)
  }

  pub fn trace(&self, degree: usize) -> i64 {
    self.traces.get(degree).copied().unwrap_or(0)
  }
}

/// Trace of `endo` restricted to the invariant subspace spanned by the columns of `basis`.
fn restricted_trace(endo: &Matrix, basis: &Matrix, degree: usize) -> Result<BigRational, HomologyError> {
  if basis.cols() == 0 {
    return Ok(BigRational::zero());
  }
  let image = endo.mul(basis);
  basis.solve_full_column_rank(&image).map(|t| t.trace()).ok_or(HomologyError::InconsistentSolve(degree))
}

fn to_integer(value: BigRational, degree: usize) -> Result<i64, HomologyError> {
  let non_integral = || HomologyError::NonIntegralTrace { degree, value: value.to_string() };
  if !value.is_integer() {
    return Err(non_integral());
  }
  value.numer().to_i64().ok_or_else(non_integral)
}

/// `tr(g_*, H_p) = tr(g|ker ∂_p) − tr(g|im ∂_{p+1})` in every degree.
pub fn homology_traces(complex: &CompactSupportComplex) -> Result<HomologySummary, HomologyError> {
  let degrees = complex.degrees();
  let mut betti = Vec::with_capacity(degrees);
  let mut traces = Vec::with_capacity(degrees);
  for p in 0..degrees {
    let n = complex.basis(p).len();
    let cycles = if p == 0 { Matrix::identity(n) } else { complex.boundary(p).kernel_basis() };
    let boundaries =
      if p + 1 < degrees { complex.boundary(p + 1).column_basis() } else { Matrix::zeros(n, 0) };
    let endo = complex.endomorphism(p);
    let trace = restricted_trace(endo, &cycles, p)? - restricted_trace(endo, &boundaries, p)?;
    betti.push(cycles.cols() - boundaries.cols());
    traces.push(to_integer(trace, p)?);
  }
  let lefschetz = traces.iter().enumerate().map(|(p, t)| if p % 2 == 0 { *t } else { -*t }).sum();
  Ok(HomologySummary { betti, traces, lefschetz })
}

/// Sheaf-theoretic Lefschetz number of the constant rank-one sheaf on `set`.
pub fn l_hom(map: &SimplicialSelfMap, set: &OpenSimplexSet) -> Result<i64, HomologyError> {
  homology_traces(&CompactSupportComplex::new(map, set)?).map(|s| s.lefschetz)
}
