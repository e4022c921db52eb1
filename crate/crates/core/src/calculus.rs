//! Constructible functions and integration with respect to the Lefschetz number.
//!
//! Functions are constant on open simplices, so a function is a value per simplex and two
//! representations can be compared pointwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{same_ambient, OpenSimplexSet, SimplexId, SimplicialComplex};
use crate::lefschetz::lambda_c;
use crate::sheaf::{associated_sheaf, sheaf_lefschetz, Part, SheafError};
use crate::simpmap::SimplicialSelfMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
  #[error("set lives over a different complex")]
  AmbientMismatch,
  #[error("{0} values given for {1} simplices")]
  LengthMismatch(usize, usize),
  #[error("level set for value 0 given explicitly")]
  ZeroLevel,
  #[error("level sets for values {first} and {second} overlap at simplex {simplex}")]
  OverlappingLevels { first: i64, second: i64, simplex: String },
  #[error("level set for value {value} is not locally compact: frontier simplex {frontier} has face {face} inside the set")]
  NotLocallyCompact { value: i64, frontier: String, face: String },
  #[error("term {term} is not admissible: {detail}")]
  InvalidTerm { term: usize, detail: String },
  #[error(transparent)]
  Sheaf(#[from] SheafError),
}

/// A ℤ-valued function constant on open simplices, stored by its nonzero level sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructibleFunction {
  ambient: Arc<SimplicialComplex>,
  levels: BTreeMap<i64, OpenSimplexSet>,
}

impl ConstructibleFunction {
  /// Builds `Σ value·1_set`. Entries with the same value are merged. Level sets must be
  /// disjoint, and each merged level set locally compact.
  pub fn new(
    ambient: Arc<SimplicialComplex>,
    levels: impl IntoIterator<Item = (i64, OpenSimplexSet)>,
  ) -> Result<Self, CalculusError> {
    let mut merged: BTreeMap<i64, OpenSimplexSet> = BTreeMap::new();
    let mut owner: BTreeMap<SimplexId, i64> = BTreeMap::new();
    for (value, set) in levels {
      if !same_ambient(&ambient, set.ambient()) {
        return Err(CalculusError::AmbientMismatch);
      }
      if value == 0 {
        return Err(CalculusError::ZeroLevel);
      }
      for id in set.iter() {
        if let Some(first) = owner.insert(id, value) {
          if first != value {
            return Err(CalculusError::OverlappingLevels {
              first,
              second: value,
              simplex: ambient.simplex(id).to_string(),
            });
          }
        }
      }
      let next = match merged.remove(&value) {
        Some(existing) => existing.union(&set).map_err(|_| CalculusError::AmbientMismatch)?,
        None => set,
      };
      merged.insert(value, next);
    }
    merged.retain(|_, set| !set.is_empty());
    let function = Self { ambient, levels: merged };
    function.check_local_compactness()?;
    Ok(function)
  }

  /// Level sets already known to be disjoint; local compactness is not checked.
  pub(crate) fn from_disjoint_levels(
    ambient: Arc<SimplicialComplex>,
    levels: BTreeMap<i64, OpenSimplexSet>,
  ) -> Self {
    Self { ambient, levels }
  }

  /// From one value per simplex, in canonical simplex order.
  pub fn from_values(ambient: Arc<SimplicialComplex>, values: &[i64]) -> Result<Self, CalculusError> {
    if values.len() != ambient.len() {
      return Err(CalculusError::LengthMismatch(values.len(), ambient.len()));
    }
    let mut buckets: BTreeMap<i64, Vec<SimplexId>> = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
      if v != 0 {
        buckets.entry(v).or_default().push(SimplexId(i));
      }
    }
    let levels: Vec<(i64, OpenSimplexSet)> =
      buckets.into_iter().map(|(v, ids)| (v, OpenSimplexSet::new(Arc::clone(&ambient), ids))).collect();
    Self::new(ambient, levels)
  }

  pub fn zero(ambient: Arc<SimplicialComplex>) -> Self {
    Self { ambient, levels: BTreeMap::new() }
  }

  pub fn ambient(&self) -> &Arc<SimplicialComplex> {
    &self.ambient
  }

  /// Nonzero level sets by value.
  pub fn levels(&self) -> &BTreeMap<i64, OpenSimplexSet> {
    &self.levels
  }

  pub fn value(&self, id: SimplexId) -> i64 {
    self.levels.iter().find(|(_, set)| set.contains(id)).map_or(0, |(&v, _)| v)
  }

  /// One value per simplex, canonical order.
  pub fn values(&self) -> Vec<i64> {
    let mut out = vec![0; self.ambient.len()];
    for (&v, set) in &self.levels {
      for id in set.iter() {
        out[id.index()] = v;
      }
    }
    out
  }

  pub fn check_local_compactness(&self) -> Result<(), CalculusError> {
    for (&value, set) in &self.levels {
      if let Some((frontier, face)) = set.local_compactness_violation() {
        return Err(CalculusError::NotLocallyCompact {
          value,
          frontier: self.ambient.simplex(frontier).to_string(),
          face: self.ambient.simplex(face).to_string(),
        });
      }
    }
    Ok(())
  }
}

/// A formal sum `Σ c_j·1_{U_j}`; the sets may overlap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
  ambient: Arc<SimplicialComplex>,
  terms: Vec<(i64, OpenSimplexSet)>,
}

impl Representation {
  pub fn new(ambient: Arc<SimplicialComplex>) -> Self {
    Self { ambient, terms: Vec::new() }
  }

  pub fn push(&mut self, coefficient: i64, set: OpenSimplexSet) -> Result<(), CalculusError> {
    if !same_ambient(&self.ambient, set.ambient()) {
      return Err(CalculusError::AmbientMismatch);
    }
    self.terms.push((coefficient, set));
    Ok(())
  }

  pub fn terms(&self) -> &[(i64, OpenSimplexSet)] {
    &self.terms
  }

  pub fn ambient(&self) -> &Arc<SimplicialComplex> {
    &self.ambient
  }

  /// Term lists concatenated.
  pub fn concat(&self, other: &Self) -> Result<Self, CalculusError> {
    if !same_ambient(&self.ambient, &other.ambient) {
      return Err(CalculusError::AmbientMismatch);
    }
    let mut terms = self.terms.clone();
    terms.extend(other.terms.iter().cloned());
    Ok(Self { ambient: Arc::clone(&self.ambient), terms })
  }

  /// The represented function, one value per simplex.
  pub fn pointwise(&self) -> Vec<i64> {
    let mut out = vec![0; self.ambient.len()];
    for (c, set) in &self.terms {
      for id in set.iter() {
        out[id.index()] += c;
      }
    }
    out
  }
}

/// `Σ_j c_j · Λ_c(g, U_j)`. Every term set must be locally compact and pair-invariant.
pub fn integrate(map: &SimplicialSelfMap, rep: &Representation) -> Result<i64, CalculusError> {
  if !same_ambient(map.ambient(), &rep.ambient) {
    return Err(CalculusError::AmbientMismatch);
  }
  let ambient = &rep.ambient;
  let mut total = 0;
  for (term, (c, set)) in rep.terms.iter().enumerate() {
    if let Some((frontier, face)) = set.local_compactness_violation() {
      let detail = format!(
        "not locally compact: frontier simplex {} has face {} inside the set",
        ambient.simplex(frontier),
        ambient.simplex(face)
      );
      return Err(CalculusError::InvalidTerm { term, detail });
    }
    if let Some(violation) = map.pair_invariance_violation(set) {
      return Err(CalculusError::InvalidTerm { term, detail: violation.describe(ambient) });
    }
    total += c * lambda_c(map, set).map_err(|_| CalculusError::AmbientMismatch)?;
  }
  Ok(total)
}

/// `h = Σ_j j·1_{h^{-1}(j)}`, one term per nonzero value, by increasing value.
pub fn canonical_representation(h: &ConstructibleFunction) -> Representation {
  Representation {
    ambient: Arc::clone(&h.ambient),
    terms: h.levels.iter().map(|(&v, set)| (v, set.clone())).collect(),
  }
}

/// Integral as the difference of the sheaf Lefschetz numbers of the positive and negative
/// parts of `h`.
pub fn barrow(map: &SimplicialSelfMap, h: &ConstructibleFunction) -> Result<i64, CalculusError> {
  let positive = sheaf_lefschetz(map, &associated_sheaf(h, Part::Positive)?)?;
  let negative = sheaf_lefschetz(map, &associated_sheaf(h, Part::Negative)?)?;
  Ok(positive - negative)
}

#[cfg(test)]
mod tests {
  use super::*;

  fn complex(maximal: &[&[usize]], n: usize) -> Arc<SimplicialComplex> {
    let raw: Vec<Vec<usize>> = maximal.iter().map(|v| v.to_vec()).collect();
    Arc::new(SimplicialComplex::build(&raw, n).unwrap())
  }

  fn set(k: &Arc<SimplicialComplex>, s: &[&[usize]]) -> OpenSimplexSet {
    let raw: Vec<Vec<usize>> = s.iter().map(|v| v.to_vec()).collect();
    OpenSimplexSet::from_simplices(Arc::clone(k), &raw).unwrap()
  }

  #[test]
  fn integral_of_constant_is_scaled_euler_characteristic() {
    let t = complex(&[&[0, 1, 2], &[2, 3]], 4);
    let id = SimplicialSelfMap::identity(Arc::clone(&t));
    let mut rep = Representation::new(Arc::clone(&t));
    rep.push(7, OpenSimplexSet::full(Arc::clone(&t))).unwrap();
    assert_eq!(integrate(&id, &rep).unwrap(), 7);
  }

  #[test]
  fn vertices_and_edges_of_circle() {
    let circle = complex(&[&[0, 1], &[0, 2], &[1, 2]], 3);
    let id = SimplicialSelfMap::identity(Arc::clone(&circle));
    let mut rep = Representation::new(Arc::clone(&circle));
    rep.push(2, set(&circle, &[&[0], &[1], &[2]])).unwrap();
    rep.push(3, set(&circle, &[&[0, 1], &[0, 2], &[1, 2]])).unwrap();
    assert_eq!(integrate(&id, &rep).unwrap(), -3);
  }

  #[test]
  fn canonical_representation_orders_and_merges() {
    let t = complex(&[&[0, 1, 2]], 3);
    let h = ConstructibleFunction::new(
      Arc::clone(&t),
      [(1, set(&t, &[&[0]])), (3, set(&t, &[&[0, 1, 2]])), (1, set(&t, &[&[1]]))],
    )
    .unwrap();
    let rep = canonical_representation(&h);
    let coefficients: Vec<i64> = rep.terms().iter().map(|(c, _)| *c).collect();
    assert_eq!(coefficients, vec![1, 3]);
    assert_eq!(rep.terms()[0].1, set(&t, &[&[0], &[1]]));
    assert_eq!(rep.pointwise(), h.values());

    let zero = ConstructibleFunction::zero(Arc::clone(&t));
    let rep = canonical_representation(&zero);
    assert!(rep.terms().is_empty());
    assert_eq!(integrate(&SimplicialSelfMap::identity(t), &rep).unwrap(), 0);
  }

  #[test]
  fn function_validation() {
    let t = complex(&[&[0, 1, 2]], 3);
    assert!(matches!(
      ConstructibleFunction::new(Arc::clone(&t), [(1, set(&t, &[&[0, 1]])), (2, set(&t, &[&[0, 1]]))]),
      Err(CalculusError::OverlappingLevels { first: 1, second: 2, .. })
    ));
    assert!(matches!(
      ConstructibleFunction::new(Arc::clone(&t), [(2, set(&t, &[&[0, 1, 2], &[0]]))]),
      Err(CalculusError::NotLocallyCompact { value: 2, .. })
    ));
    assert_eq!(
      ConstructibleFunction::new(Arc::clone(&t), [(0, set(&t, &[&[0]]))]),
      Err(CalculusError::ZeroLevel)
    );
  }

  #[test]
  fn barrow_on_negative_point() {
    let t = complex(&[&[0, 1, 2]], 3);
    let id = SimplicialSelfMap::identity(Arc::clone(&t));
    let h = ConstructibleFunction::new(Arc::clone(&t), [(-2, set(&t, &[&[1]]))]).unwrap();
    assert_eq!(barrow(&id, &h).unwrap(), -2);
    assert_eq!(integrate(&id, &canonical_representation(&h)).unwrap(), -2);
  }

  #[test]
  fn barrow_on_difference_of_indicators() {
    let edge = complex(&[&[0, 1], &[2, 3]], 4);
    let swap = SimplicialSelfMap::new(Arc::clone(&edge), vec![1, 0, 2, 3]).unwrap();
    // U = closed edge 01 with swap (Λ = 1), V = open edge 23 fixed (Λ = −1).
    let h = ConstructibleFunction::new(
      Arc::clone(&edge),
      [(1, set(&edge, &[&[0], &[1], &[0, 1]])), (-1, set(&edge, &[&[2, 3]]))],
    )
    .unwrap();
    assert_eq!(barrow(&swap, &h).unwrap(), 1 - (-1));
    assert_eq!(integrate(&swap, &canonical_representation(&h)).unwrap(), 2);
  }

  #[test]
  fn invalid_terms_are_named() {
    let path = complex(&[&[0, 2], &[1, 2]], 3);
    let swap = SimplicialSelfMap::new(Arc::clone(&path), vec![1, 0, 2]).unwrap();
    let mut rep = Representation::new(Arc::clone(&path));
    rep.push(1, set(&path, &[&[2]])).unwrap();
    rep.push(1, set(&path, &[&[0, 2]])).unwrap();
    assert!(matches!(integrate(&swap, &rep), Err(CalculusError::InvalidTerm { term: 1, .. })));
  }
}
