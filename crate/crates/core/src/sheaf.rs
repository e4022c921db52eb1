//! Constructible sheaves in associated form: a direct sum of extensions by zero of constant
//! sheaves, one per piece of a disjoint family of locally compact open simplex sets.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::calculus::ConstructibleFunction;
use crate::complex::{same_ambient, OpenSimplexSet, SimplicialComplex};
use crate::homology::{l_hom, HomologyError};
use crate::simpmap::SimplicialSelfMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
  #[error("piece {0} lives over a different complex")]
  AmbientMismatch(usize),
  #[error("piece {0} has empty support")]
  EmptySupport(usize),
  #[error("pieces {first} and {second} overlap at simplex {simplex}")]
  Overlap { first: usize, second: usize, simplex: String },
  #[error("support of piece {piece} is not locally compact: frontier simplex {frontier} has face {face} inside the support")]
  NotLocallyCompact { piece: usize, frontier: String, face: String },
  #[error("piece {piece} is not compatible with the map: {detail}")]
  Incompatible { piece: usize, detail: String },
  #[error("piece {piece}: {source}")]
  Homology { piece: usize, source: HomologyError },
}

/// `(i_j)_! ℝ^{rank}` on the open simplex set `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafPiece {
  pub support: OpenSimplexSet,
  pub rank: u64,
}

/// A c-constructible sheaf stored as its associated direct sum.
///
/// Supports are pairwise disjoint, nonempty and locally compact. They need not cover the
/// ambient complex; uncovered simplices carry the zero stalk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructibleSheaf {
  ambient: Arc<SimplicialComplex>,
  pieces: Vec<SheafPiece>,
}

impl ConstructibleSheaf {
  pub fn new(ambient: Arc<SimplicialComplex>, pieces: Vec<SheafPiece>) -> Result<Self, SheafError> {
    let mut owner = BTreeMap::new();
    for (index, piece) in pieces.iter().enumerate() {
      if !same_ambient(&ambient, piece.support.ambient()) {
        return Err(SheafError::AmbientMismatch(index));
      }
      if piece.support.is_empty() {
        return Err(SheafError::EmptySupport(index));
      }
      for id in piece.support.iter() {
        if let Some(first) = owner.insert(id, index) {
          return Err(SheafError::Overlap { first, second: index, simplex: ambient.simplex(id).to_string() });
        }
      }
      if let Some((frontier, face)) = piece.support.local_compactness_violation() {
        return Err(SheafError::NotLocallyCompact {
          piece: index,
          frontier: ambient.simplex(frontier).to_string(),
          face: ambient.simplex(face).to_string(),
        });
      }
    }
    Ok(Self { ambient, pieces })
  }

  /// The constant sheaf of the given rank on the whole complex.
  pub fn constant(ambient: Arc<SimplicialComplex>, rank: u64) -> Self {
    let pieces = if ambient.is_empty() {
      Vec::new()
    } else {
      vec![SheafPiece { support: OpenSimplexSet::full(Arc::clone(&ambient)), rank }]
    };
    Self { ambient, pieces }
  }

  pub fn ambient(&self) -> &Arc<SimplicialComplex> {
    &self.ambient
  }

  pub fn pieces(&self) -> &[SheafPiece] {
    &self.pieces
  }

  /// Every rank multiplied by `factor`.
  pub fn scaled(&self, factor: u64) -> Self {
    let pieces =
      self.pieces.iter().map(|p| SheafPiece { support: p.support.clone(), rank: p.rank * factor }).collect();
    Self { ambient: Arc::clone(&self.ambient), pieces }
  }

  /// Pieces intersected with `subset`, empty intersections dropped.
  pub fn restrict(&self, subset: &OpenSimplexSet) -> Result<Self, SheafError> {
    let mut pieces = Vec::new();
    for (index, piece) in self.pieces.iter().enumerate() {
      let support = piece.support.intersection(subset).map_err(|_| SheafError::AmbientMismatch(index))?;
      if !support.is_empty() {
        pieces.push(SheafPiece { support, rank: piece.rank });
      }
    }
    Self::new(Arc::clone(&self.ambient), pieces)
  }

  /// First piece of positive rank whose support is not pair-invariant under `map`.
  pub fn compatibility_violation(&self, map: &SimplicialSelfMap) -> Option<SheafError> {
    if !same_ambient(&self.ambient, map.ambient()) {
      return Some(SheafError::AmbientMismatch(0));
    }
    self.pieces.iter().enumerate().filter(|(_, p)| p.rank > 0).find_map(|(piece, p)| {
      map
        .pair_invariance_violation(&p.support)
        .map(|v| SheafError::Incompatible { piece, detail: v.describe(&self.ambient) })
    })
  }

  pub fn is_compatible(&self, map: &SimplicialSelfMap) -> bool {
    self.compatibility_violation(map).is_none()
  }
}

/// `L_c(X, g, F) = Σ_j rank_j · L_c(X_j, g)`, from the decomposition of compactly supported
/// cohomology along the pieces. Rank-zero pieces contribute nothing and are skipped.
pub fn sheaf_lefschetz(map: &SimplicialSelfMap, sheaf: &ConstructibleSheaf) -> Result<i64, SheafError> {
  if let Some(err) = sheaf.compatibility_violation(map) {
    return Err(err);
  }
  let mut total = 0i64;
  for (piece, p) in sheaf.pieces.iter().enumerate().filter(|(_, p)| p.rank > 0) {
    let value = l_hom(map, &p.support).map_err(|source| SheafError::Homology { piece, source })?;
    total += p.rank as i64 * value;
  }
  Ok(total)
}

/// Stalk dimension as a function: `rank` on each piece, zero elsewhere. Pieces of equal
/// rank share a level set.
pub fn associated_function(sheaf: &ConstructibleSheaf) -> ConstructibleFunction {
  let mut levels: BTreeMap<i64, OpenSimplexSet> = BTreeMap::new();
  for p in sheaf.pieces.iter().filter(|p| p.rank > 0) {
    let value = p.rank as i64;
    let merged = match levels.remove(&value) {
      Some(existing) => existing.union(&p.support).expect("pieces share the ambient"),
      None => p.support.clone(),
    };
    levels.insert(value, merged);
  }
  ConstructibleFunction::from_disjoint_levels(Arc::clone(&sheaf.ambient), levels)
}

/// Which part of a ℤ-valued function to realize as a sheaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
  /// `⊕_{j>0} ℝ^j` on `h^{-1}(j)`.
  Positive,
  /// `⊕_{j<0} ℝ^{-j}` on `h^{-1}(j)`.
  Negative,
}

/// The sheaf whose pieces are the level sets of `h` of the chosen sign, with rank `|j|`.
pub fn associated_sheaf(h: &ConstructibleFunction, part: Part) -> Result<ConstructibleSheaf, SheafError> {
  let pieces = h
    .levels()
    .iter()
    .filter(|(&value, _)| match part {
      Part::Positive => value > 0,
      Part::Negative => value < 0,
    })
    .map(|(&value, set)| SheafPiece { support: set.clone(), rank: value.unsigned_abs() })
    .collect();
  ConstructibleSheaf::new(Arc::clone(h.ambient()), pieces)
}
