//! The combinatorial Lefschetz number: alternating trace of the induced chain map restricted
//! to the simplices of an incomplete subcomplex.

use crate::complex::{same_ambient, ComplexError, OpenSimplexSet};
use crate::simpmap::SimplicialSelfMap;

/// `Σ_p (-1)^p Σ_{σ ∈ U, dim σ = p} c(σ)`, where `c(σ)` is the diagonal entry of the chain
/// map at `σ`.
///
/// Needs no invariance of `set`; the identities that relate this number to cohomology do.
pub fn lambda_c(map: &SimplicialSelfMap, set: &OpenSimplexSet) -> Result<i64, ComplexError> {
  if !same_ambient(map.ambient(), set.ambient()) {
    return Err(ComplexError::AmbientMismatch);
  }
  let ambient = set.ambient();
  Ok(
    set
      .iter()
      .filter_map(|id| {
        let term = map.chain_coefficient(id).filter(|t| t.target == id)?;
        let parity = if ambient.simplex(id).dim().is_multiple_of(2) { 1 } else { -1 };
        Some(parity * term.sign)
      })
      .sum(),
  )
}

#[cfg(test)]
mod tests {
  use std::sync::Arc;

  use super::*;
  use crate::complex::SimplicialComplex;

  fn complex(maximal: &[&[usize]], n: usize) -> Arc<SimplicialComplex> {
    let raw: Vec<Vec<usize>> = maximal.iter().map(|v| v.to_vec()).collect();
    Arc::new(SimplicialComplex::build(&raw, n).unwrap())
  }

  #[test]
  fn rotation_of_circle_fixes_nothing() {
    let circle = complex(&[&[0, 1], &[0, 2], &[1, 2]], 3);
    let rot = SimplicialSelfMap::new(Arc::clone(&circle), vec![1, 2, 0]).unwrap();
    assert_eq!(lambda_c(&rot, &OpenSimplexSet::full(circle)).unwrap(), 0);
  }

  #[test]
  fn swap_on_closed_edge() {
    let edge = complex(&[&[0, 1]], 2);
    let swap = SimplicialSelfMap::new(Arc::clone(&edge), vec![1, 0]).unwrap();
    assert_eq!(lambda_c(&swap, &OpenSimplexSet::full(Arc::clone(&edge))).unwrap(), 1);
    let open = OpenSimplexSet::from_simplices(edge, &[vec![0, 1]]).unwrap();
    assert_eq!(lambda_c(&swap, &open).unwrap(), 1);
  }

  #[test]
  fn identity_gives_euler_characteristic() {
    let k = complex(&[&[0, 1, 2], &[2, 3], &[3, 4, 5]], 6);
    let id = SimplicialSelfMap::identity(Arc::clone(&k));
    let full = OpenSimplexSet::full(Arc::clone(&k));
    assert_eq!(lambda_c(&id, &full).unwrap(), full.euler_cc());
    let open = OpenSimplexSet::from_simplices(k, &[vec![0, 1, 2], vec![2, 3], vec![4]]).unwrap();
    assert_eq!(lambda_c(&id, &open).unwrap(), 1);
  }

  #[test]
  fn ambient_mismatch_is_rejected() {
    let a = complex(&[&[0, 1]], 2);
    let b = complex(&[&[0, 1, 2]], 3);
    let id = SimplicialSelfMap::identity(a);
    assert_eq!(lambda_c(&id, &OpenSimplexSet::full(b)), Err(ComplexError::AmbientMismatch));
  }
}
