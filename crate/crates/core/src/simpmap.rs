//! Simplicial self-maps given by vertex maps.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::complex::{OpenSimplexSet, Simplex, SimplexId, SimplicialComplex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
  #[error("vertex map has length {found}, expected {expected}")]
  LengthMismatch { expected: usize, found: usize },
  #[error("image {image} of vertex {vertex} is out of range (vertex_count = {vertex_count})")]
  ImageOutOfRange { vertex: usize, image: usize, vertex_count: usize },
  #[error("image {image} of simplex {simplex} is not a simplex of the complex")]
  NotSimplicial { simplex: Simplex, image: Simplex },
}

/// How the orientation sign of a non-degenerate image is computed.
///
/// `FlippedOdd` reports `+1` where the true sign is `-1`. It exists only as a mutation
/// sentinel for the property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
  #[default]
  Oriented,
  #[doc(hidden)]
  FlippedOdd,
}

/// One column entry of the induced chain map: `[σ] ↦ sign·[target]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainTerm {
  pub target: SimplexId,
  pub sign: i64,
}

/// Why a set fails pair invariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvarianceViolation {
  /// The image of a member leaves `cl(U)`.
  LeavesClosure { simplex: SimplexId, image: SimplexId },
  /// The image of a frontier simplex leaves the frontier.
  LeavesFrontier { simplex: SimplexId, image: SimplexId },
}

impl InvarianceViolation {
  pub fn describe(&self, ambient: &SimplicialComplex) -> String {
    match *self {
      Self::LeavesClosure { simplex, image } => format!(
        "image {} of member {} is outside the closure",
        ambient.simplex(image),
        ambient.simplex(simplex)
      ),
      Self::LeavesFrontier { simplex, image } => format!(
        "image {} of frontier simplex {} is outside the frontier",
        ambient.simplex(image),
        ambient.simplex(simplex)
      ),
    }
  }
}

/// A simplicial self-map of a complex, determined by where it sends vertices.
#[derive(Clone)]
pub struct SimplicialSelfMap {
  ambient: Arc<SimplicialComplex>,
  vertex_images: Vec<usize>,
  simplex_images: Vec<SimplexId>,
  sign_rule: SignRule,
}

impl SimplicialSelfMap {
  /// Validates that `vertex_images` sends every simplex onto a simplex.
  pub fn new(ambient: Arc<SimplicialComplex>, vertex_images: Vec<usize>) -> Result<Self, MapError> {
    let n = ambient.vertex_count();
    if vertex_images.len() != n {
      return Err(MapError::LengthMismatch { expected: n, found: vertex_images.len() });
    }
    if let Some((vertex, &image)) = vertex_images.iter().enumerate().find(|(_, &w)| w >= n) {
      return Err(MapError::ImageOutOfRange { vertex, image, vertex_count: n });
    }
    let mut simplex_images = Vec::with_capacity(ambient.len());
    for simplex in ambient.simplices() {
      let image = Simplex::from_vertex_set(simplex.vertices().iter().map(|&v| vertex_images[v]));
      match ambient.id_of(&image) {
        Some(id) => simplex_images.push(id),
        None => return Err(MapError::NotSimplicial { simplex: simplex.clone(), image }),
      }
    }
    Ok(Self { ambient, vertex_images, simplex_images, sign_rule: SignRule::Oriented })
  }

  pub fn identity(ambient: Arc<SimplicialComplex>) -> Self {
    let images = (0..ambient.vertex_count()).collect();
    Self::new(ambient, images).expect("identity is simplicial")
  }

  /// The same map with a different sign rule.
  #[doc(hidden)]
  pub fn with_sign_rule(mut self, rule: SignRule) -> Self {
    self.sign_rule = rule;
    self
  }

  pub fn sign_rule(&self) -> SignRule {
    self.sign_rule
  }

  pub fn ambient(&self) -> &Arc<SimplicialComplex> {
    &self.ambient
  }

  pub fn vertex_images(&self) -> &[usize] {
    &self.vertex_images
  }

  /// The image simplex `g(σ)`, possibly of lower dimension.
  pub fn image(&self, id: SimplexId) -> SimplexId {
    self.simplex_images[id.index()]
  }

  /// Entry of the induced chain map on `σ`, or `None` when `g` collapses `σ`.
  pub fn chain_coefficient(&self, id: SimplexId) -> Option<ChainTerm> {
    let source = self.ambient.simplex(id);
    let target = self.image(id);
    if self.ambient.simplex(target).dim() != source.dim() {
      return None;
    }
    let images: Vec<usize> = source.vertices().iter().map(|&v| self.vertex_images[v]).collect();
    let inversions = (0..images.len())
      .flat_map(|i| (i + 1..images.len()).map(move |j| (i, j)))
      .filter(|&(i, j)| images[i] > images[j])
      .count();
    let sign = match (inversions % 2, self.sign_rule) {
      (0, _) | (_, SignRule::FlippedOdd) => 1,
      _ => -1,
    };
    Some(ChainTerm { target, sign })
  }

  /// First violation of pair invariance, if any.
  pub fn pair_invariance_violation(&self, set: &OpenSimplexSet) -> Option<InvarianceViolation> {
    let (closure, frontier) = set.closure_and_frontier();
    for simplex in set.iter() {
      let image = self.image(simplex);
      if !closure.contains(image) {
        return Some(InvarianceViolation::LeavesClosure { simplex, image });
      }
    }
    for simplex in frontier.iter() {
      let image = self.image(simplex);
      if !frontier.contains(image) {
        return Some(InvarianceViolation::LeavesFrontier { simplex, image });
      }
    }
    None
  }

  /// `g` maps the pair `(cl U, cl U \ U)` into itself.
  pub fn is_pair_invariant(&self, set: &OpenSimplexSet) -> bool {
    self.pair_invariance_violation(set).is_none()
  }

  /// Weakly connected components of the functional graph `σ ↦ g(σ)`, ordered by smallest
  /// member.
  pub fn simplex_orbits(&self) -> Vec<OpenSimplexSet> {
    let n = self.ambient.len();
    let mut classes = UnionFind::<usize>::new(n);
    for (i, image) in self.simplex_images.iter().enumerate() {
      classes.union(i, image.index());
    }
    let mut groups: Vec<Vec<SimplexId>> = Vec::new();
    let mut slot = HashMap::new();
    for i in 0..n {
      let root = classes.find_mut(i);
      let g = *slot.entry(root).or_insert_with(|| {
        groups.push(Vec::new());
        groups.len() - 1
      });
      groups[g].push(SimplexId(i));
    }
    groups.into_iter().map(|ids| OpenSimplexSet::new(Arc::clone(&self.ambient), ids)).collect()
  }

  /// `self ∘ other`.
  pub fn compose(&self, other: &Self) -> Self {
    let images = other.vertex_images.iter().map(|&v| self.vertex_images[v]).collect();
    Self::new(Arc::clone(&self.ambient), images).expect("composition of simplicial maps is simplicial")
  }

  /// Bijective on vertices.
  pub fn is_permutation(&self) -> bool {
    let mut seen = vec![false; self.vertex_images.len()];
    self.vertex_images.iter().all(|&w| !std::mem::replace(&mut seen[w], true))
  }
}

impl fmt::Debug for SimplicialSelfMap {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.debug_struct("SimplicialSelfMap").field("vertex_images", &self.vertex_images).finish()
  }
}
