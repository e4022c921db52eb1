//! Finite abstract simplicial complexes and incomplete subcomplexes.
//!
//! A [`SimplicialComplex`] is stored face-closed, with its simplices in a canonical order:
//! by dimension first, then lexicographically by vertex list. Every simplex is identified by
//! its position in that order ([`SimplexId`]), so per-degree bases built from ids are already
//! lexicographically sorted.
//!
//! An [`OpenSimplexSet`] is a set of *open* simplices of an ambient complex. It need not be
//! closed under faces; a half-open edge `{0, 01}` is a perfectly good member of this type.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
  #[error("simplex is empty")]
  EmptySimplex,
  #[error("simplex {0:?} is not strictly increasing")]
  NotStrictlyIncreasing(Vec<usize>),
  #[error("vertex {vertex} in simplex {simplex:?} is out of range (vertex_count = {vertex_count})")]
  VertexOutOfRange { simplex: Vec<usize>, vertex: usize, vertex_count: usize },
  #[error("simplex {0:?} is not in the ambient complex")]
  UnknownSimplex(Vec<usize>),
  #[error("sets live over different ambient complexes")]
  AmbientMismatch,
}

/// A simplex given by its strictly increasing vertex list.
///
/// Ordering is by dimension, then lexicographic on vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<usize>);

impl Simplex {
  /// Checks that `vertices` is nonempty and strictly increasing.
  pub fn new(vertices: Vec<usize>) -> Result<Self, ComplexError> {
    if vertices.is_empty() {
      return Err(ComplexError::EmptySimplex);
    }
    if vertices.windows(2).any(|w| w[0] >= w[1]) {
      return Err(ComplexError::NotStrictlyIncreasing(vertices));
    }
    Ok(Self(vertices))
  }

  /// Builds a simplex from an arbitrary vertex collection, sorting and deduplicating.
  pub fn from_vertex_set(vertices: impl IntoIterator<Item = usize>) -> Self {
    let set: BTreeSet<usize> = vertices.into_iter().collect();
    Self(set.into_iter().collect())
  }

  pub fn vertices(&self) -> &[usize] {
    &self.0
  }

  pub fn dim(&self) -> usize {
    self.0.len() - 1
  }

  /// Codimension-one faces, the `i`-th obtained by deleting the `i`-th vertex.
  pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
    let n = if self.0.len() > 1 { self.0.len() } else { 0 };
    (0..n).map(move |i| {
      let mut v = self.0.clone();
      v.remove(i);
      Simplex(v)
    })
  }

  pub fn is_face_of(&self, other: &Simplex) -> bool {
    self.0.len() <= other.0.len() && self.0.iter().all(|v| other.0.binary_search(v).is_ok())
  }
}

impl Ord for Simplex {
  fn cmp(&self, other: &Self) -> Ordering {
    self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
  }
}

impl PartialOrd for Simplex {
  fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
    Some(self.cmp(other))
  }
}

impl fmt::Debug for Simplex {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{:?}", self.0)
  }
}

impl fmt::Display for Simplex {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
    write!(f, "[{}]", parts.join(","))
  }
}

/// Position of a simplex in the canonical order of its complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexId(pub usize);

impl SimplexId {
  pub fn index(self) -> usize {
    self.0
  }
}

/// A finite, face-closed abstract simplicial complex.
#[derive(Clone)]
pub struct SimplicialComplex {
  vertex_count: usize,
  simplices: Vec<Simplex>,
  lookup: HashMap<Simplex, SimplexId>,
  /// Codimension-one faces of each simplex, in deletion order (sign `(-1)^i`).
  facets: Vec<Vec<SimplexId>>,
}

impl SimplicialComplex {
  /// Face closure of `maximal`, on vertices `0..vertex_count`.
  pub fn build(maximal: &[Vec<usize>], vertex_count: usize) -> Result<Self, ComplexError> {
    let mut all = BTreeSet::new();
    for raw in maximal {
      let simplex = Simplex::new(raw.clone())?;
      if let Some(&vertex) = simplex.vertices().iter().find(|&&v| v >= vertex_count) {
        return Err(ComplexError::VertexOutOfRange { simplex: raw.clone(), vertex, vertex_count });
      }
      let k = simplex.0.len();
      assert!(k < usize::BITS as usize, "simplex too large to enumerate faces");
      for mask in 1usize..(1 << k) {
        let face: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| simplex.0[i]).collect();
        all.insert(Simplex(face));
      }
    }
    Ok(Self::from_sorted(all.into_iter().collect(), vertex_count))
  }

  fn from_sorted(simplices: Vec<Simplex>, vertex_count: usize) -> Self {
    let lookup: HashMap<Simplex, SimplexId> =
      simplices.iter().enumerate().map(|(i, s)| (s.clone(), SimplexId(i))).collect();
    let facets = simplices.iter().map(|s| s.facets().map(|f| lookup[&f]).collect()).collect();
    Self { vertex_count, simplices, lookup, facets }
  }

  pub fn vertex_count(&self) -> usize {
    self.vertex_count
  }

  pub fn len(&self) -> usize {
    self.simplices.len()
  }

  pub fn is_empty(&self) -> bool {
    self.simplices.is_empty()
  }

  /// Top dimension, `None` for the empty complex.
  pub fn dimension(&self) -> Option<usize> {
    self.simplices.last().map(Simplex::dim)
  }

  pub fn simplices(&self) -> &[Simplex] {
    &self.simplices
  }

  pub fn ids(&self) -> impl Iterator<Item = SimplexId> {
    (0..self.simplices.len()).map(SimplexId)
  }

  pub fn simplex(&self, id: SimplexId) -> &Simplex {
    &self.simplices[id.0]
  }

  pub fn id_of(&self, simplex: &Simplex) -> Option<SimplexId> {
    self.lookup.get(simplex).copied()
  }

  /// Looks up a raw vertex list, validating it on the way.
  pub fn find(&self, vertices: &[usize]) -> Result<SimplexId, ComplexError> {
    let simplex = Simplex::new(vertices.to_vec())?;
    self.id_of(&simplex).ok_or_else(|| ComplexError::UnknownSimplex(vertices.to_vec()))
  }

  /// Codimension-one faces; the `i`-th carries boundary sign `(-1)^i`.
  pub fn facets(&self, id: SimplexId) -> &[SimplexId] {
    &self.facets[id.0]
  }

  /// All proper faces of a simplex.
  pub fn proper_faces(&self, id: SimplexId) -> BTreeSet<SimplexId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<SimplexId> = self.facets(id).to_vec();
    while let Some(f) = stack.pop() {
      if seen.insert(f) {
        stack.extend_from_slice(self.facets(f));
      }
    }
    seen
  }

  /// Maximal simplices in canonical order.
  pub fn maximal_simplices(&self) -> Vec<&Simplex> {
    let mut covered = vec![false; self.len()];
    for id in self.ids() {
      for &f in self.facets(id) {
        covered[f.0] = true;
      }
    }
    self.ids().filter(|id| !covered[id.0]).map(|id| self.simplex(id)).collect()
  }
}

impl PartialEq for SimplicialComplex {
  fn eq(&self, other: &Self) -> bool {
    self.vertex_count == other.vertex_count && self.simplices == other.simplices
  }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.debug_struct("SimplicialComplex")
      .field("vertex_count", &self.vertex_count)
      .field("maximal", &self.maximal_simplices())
      .finish()
  }
}

/// Two handles refer to the same ambient complex.
pub fn same_ambient(a: &Arc<SimplicialComplex>, b: &Arc<SimplicialComplex>) -> bool {
  Arc::ptr_eq(a, b) || a == b
}

/// A set of open simplices of an ambient complex (an incomplete subcomplex).
#[derive(Clone)]
pub struct OpenSimplexSet {
  ambient: Arc<SimplicialComplex>,
  members: BTreeSet<SimplexId>,
}

impl OpenSimplexSet {
  pub fn new(ambient: Arc<SimplicialComplex>, members: impl IntoIterator<Item = SimplexId>) -> Self {
    let members: BTreeSet<SimplexId> = members.into_iter().collect();
    assert!(members.iter().all(|m| m.0 < ambient.len()), "simplex id outside ambient complex");
    Self { ambient, members }
  }

  pub fn empty(ambient: Arc<SimplicialComplex>) -> Self {
    Self { ambient, members: BTreeSet::new() }
  }

  /// Every simplex of the ambient complex.
  pub fn full(ambient: Arc<SimplicialComplex>) -> Self {
    let members = ambient.ids().collect();
    Self { ambient, members }
  }

  pub fn from_simplices(
    ambient: Arc<SimplicialComplex>,
    simplices: &[Vec<usize>],
  ) -> Result<Self, ComplexError> {
    let members = simplices.iter().map(|s| ambient.find(s)).collect::<Result<BTreeSet<_>, _>>()?;
    Ok(Self { ambient, members })
  }

  pub fn ambient(&self) -> &Arc<SimplicialComplex> {
    &self.ambient
  }

  pub fn members(&self) -> &BTreeSet<SimplexId> {
    &self.members
  }

  pub fn iter(&self) -> impl Iterator<Item = SimplexId> + '_ {
    self.members.iter().copied()
  }

  pub fn simplices(&self) -> impl Iterator<Item = &Simplex> + '_ {
    self.members.iter().map(|&id| self.ambient.simplex(id))
  }

  pub fn contains(&self, id: SimplexId) -> bool {
    self.members.contains(&id)
  }

  pub fn len(&self) -> usize {
    self.members.len()
  }

  pub fn is_empty(&self) -> bool {
    self.members.is_empty()
  }

  fn with_members(&self, members: BTreeSet<SimplexId>) -> Self {
    Self { ambient: Arc::clone(&self.ambient), members }
  }

  fn check_ambient(&self, other: &Self) -> Result<(), ComplexError> {
    if same_ambient(&self.ambient, &other.ambient) {
      Ok(())
    } else {
      Err(ComplexError::AmbientMismatch)
    }
  }

  pub fn union(&self, other: &Self) -> Result<Self, ComplexError> {
    self.check_ambient(other)?;
    Ok(self.with_members(self.members.union(&other.members).copied().collect()))
  }

  pub fn intersection(&self, other: &Self) -> Result<Self, ComplexError> {
    self.check_ambient(other)?;
    Ok(self.with_members(self.members.intersection(&other.members).copied().collect()))
  }

  pub fn difference(&self, other: &Self) -> Result<Self, ComplexError> {
    self.check_ambient(other)?;
    Ok(self.with_members(self.members.difference(&other.members).copied().collect()))
  }

  /// Complement in the ambient complex.
  pub fn complement(&self) -> Self {
    self.with_members(self.ambient.ids().filter(|id| !self.members.contains(id)).collect())
  }

  pub fn is_disjoint(&self, other: &Self) -> bool {
    self.members.is_disjoint(&other.members)
  }

  /// All faces of members, members included.
  pub fn closure(&self) -> Self {
    let mut closed = self.members.clone();
    let mut stack: Vec<SimplexId> = self.members.iter().copied().collect();
    while let Some(id) = stack.pop() {
      for &f in self.ambient.facets(id) {
        if closed.insert(f) {
          stack.push(f);
        }
      }
    }
    self.with_members(closed)
  }

  /// `cl(U) \ U`.
  pub fn frontier(&self) -> Self {
    let closure = self.closure();
    self.with_members(closure.members.difference(&self.members).copied().collect())
  }

  pub fn closure_and_frontier(&self) -> (Self, Self) {
    let closure = self.closure();
    let frontier = self.with_members(closure.members.difference(&self.members).copied().collect());
    (closure, frontier)
  }

  /// Closed under taking faces.
  pub fn is_face_closed(&self) -> bool {
    self.members.iter().all(|&id| self.ambient.facets(id).iter().all(|f| self.members.contains(f)))
  }

  /// First witness that the frontier is not face-closed: a frontier simplex together with a
  /// codimension-one face of it that lies in `U` itself.
  pub fn local_compactness_violation(&self) -> Option<(SimplexId, SimplexId)> {
    let frontier = self.frontier();
    frontier.members.iter().find_map(|&id| {
      self.ambient.facets(id).iter().find(|f| !frontier.members.contains(f)).map(|&f| (id, f))
    })
  }

  /// `U` is locally compact iff `cl(U) \ U` is a subcomplex.
  pub fn is_locally_compact(&self) -> bool {
    self.local_compactness_violation().is_none()
  }

  /// Classes of the face-incidence relation restricted to members, ordered by smallest member.
  pub fn connected_components(&self) -> Vec<Self> {
    let ids: Vec<SimplexId> = self.members.iter().copied().collect();
    let position: HashMap<SimplexId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut classes = UnionFind::<usize>::new(ids.len());
    for (i, &id) in ids.iter().enumerate() {
      for face in self.ambient.proper_faces(id) {
        if let Some(&j) = position.get(&face) {
          classes.union(i, j);
        }
      }
    }
    let mut groups: Vec<(usize, BTreeSet<SimplexId>)> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for (i, &id) in ids.iter().enumerate() {
      let root = classes.find_mut(i);
      let g = *slot.entry(root).or_insert_with(|| {
        groups.push((i, BTreeSet::new()));
        groups.len() - 1
      });
      groups[g].1.insert(id);
    }
    groups.into_iter().map(|(_, members)| self.with_members(members)).collect()
  }

  /// Compactly supported Euler characteristic, `sum (-1)^dim`.
  pub fn euler_cc(&self) -> i64 {
    self.simplices().map(|s| if s.dim() % 2 == 0 { 1 } else { -1 }).sum()
  }

  /// Members of dimension exactly `dim`.
  pub fn skeleton_layer(&self, dim: usize) -> Self {
    self.with_members(
      self.members.iter().copied().filter(|&id| self.ambient.simplex(id).dim() == dim).collect(),
    )
  }

  /// Highest dimension among members.
  pub fn dimension(&self) -> Option<usize> {
    self.simplices().map(Simplex::dim).max()
  }

  /// Members as raw vertex lists, canonical order.
  pub fn to_vertex_lists(&self) -> Vec<Vec<usize>> {
    self.simplices().map(|s| s.vertices().to_vec()).collect()
  }
}

impl PartialEq for OpenSimplexSet {
  fn eq(&self, other: &Self) -> bool {
    same_ambient(&self.ambient, &other.ambient) && self.members == other.members
  }
}

impl Eq for OpenSimplexSet {}

impl fmt::Debug for OpenSimplexSet {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.debug_set().entries(self.simplices()).finish()
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  fn triangle() -> Arc<SimplicialComplex> {
    Arc::new(SimplicialComplex::build(&[vec![0, 1, 2]], 3).unwrap())
  }

  fn set(k: &Arc<SimplicialComplex>, s: &[&[usize]]) -> OpenSimplexSet {
    let raw: Vec<Vec<usize>> = s.iter().map(|v| v.to_vec()).collect();
    OpenSimplexSet::from_simplices(Arc::clone(k), &raw).unwrap()
  }

  #[test]
  fn face_closure_counts() {
    assert_eq!(triangle().len(), 7);
    assert_eq!(SimplicialComplex::build(&[vec![0, 1], vec![1, 2]], 3).unwrap().len(), 5);
    // Brute force: faces of 012 (7) plus 3 and 23.
    let k = SimplicialComplex::build(&[vec![0, 1, 2], vec![2, 3]], 4).unwrap();
    let mut brute = BTreeSet::new();
    for m in [vec![0, 1, 2], vec![2, 3]] {
      for mask in 1u32..(1 << m.len()) {
        let f: Vec<usize> =
          m.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &v)| v).collect();
        brute.insert(f);
      }
    }
    assert_eq!(brute.len(), 9);
    assert_eq!(k.len(), 9);
  }

  #[test]
  fn canonical_order_is_dimension_then_lex() {
    let k = triangle();
    let lists: Vec<Vec<usize>> = k.simplices().iter().map(|s| s.vertices().to_vec()).collect();
    assert_eq!(lists, vec![vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]);
  }

  #[test]
  fn build_rejects_bad_input() {
    assert!(matches!(
      SimplicialComplex::build(&[vec![1, 0]], 2),
      Err(ComplexError::NotStrictlyIncreasing(_))
    ));
    assert!(matches!(
      SimplicialComplex::build(&[vec![0, 0]], 2),
      Err(ComplexError::NotStrictlyIncreasing(_))
    ));
    assert!(matches!(
      SimplicialComplex::build(&[vec![0, 3]], 3),
      Err(ComplexError::VertexOutOfRange { vertex: 3, .. })
    ));
    assert!(matches!(SimplicialComplex::build(&[vec![]], 3), Err(ComplexError::EmptySimplex)));
  }

  #[test]
  fn closure_and_frontier_examples() {
    let k = triangle();
    let (cl, fr) = set(&k, &[&[0, 1]]).closure_and_frontier();
    assert_eq!(cl, set(&k, &[&[0], &[1], &[0, 1]]));
    assert_eq!(fr, set(&k, &[&[0], &[1]]));

    let fr = set(&k, &[&[0, 1, 2]]).frontier();
    assert_eq!(fr.len(), 6);

    let (cl, fr) = set(&k, &[&[0], &[0, 1]]).closure_and_frontier();
    assert_eq!(cl, set(&k, &[&[0], &[1], &[0, 1]]));
    assert_eq!(fr, set(&k, &[&[1]]));
  }

  #[test]
  fn local_compactness_examples() {
    let k = triangle();
    assert!(set(&k, &[&[0], &[0, 1]]).is_locally_compact());
    let bad = set(&k, &[&[0, 1, 2], &[0]]);
    assert!(!bad.is_locally_compact());
    let (frontier_simplex, face) = bad.local_compactness_violation().unwrap();
    assert_eq!(k.simplex(face).vertices(), &[0]);
    assert!(k.simplex(face).is_face_of(k.simplex(frontier_simplex)));
    assert!(OpenSimplexSet::full(Arc::clone(&k)).is_locally_compact());
    assert!(set(&k, &[&[0], &[1], &[0, 1]]).is_locally_compact());
    assert!(OpenSimplexSet::empty(k).is_locally_compact());
  }

  #[test]
  fn components_examples() {
    let k = Arc::new(SimplicialComplex::build(&[vec![0, 1], vec![2, 3]], 4).unwrap());
    assert_eq!(set(&k, &[&[0, 1], &[2, 3]]).connected_components().len(), 2);
    assert_eq!(set(&k, &[&[0], &[0, 1], &[1]]).connected_components().len(), 1);
    let t = triangle();
    assert_eq!(set(&t, &[&[0, 1, 2], &[0, 1]]).connected_components().len(), 1);
    // Open triangle plus an opposite vertex still touches through the closure.
    assert_eq!(set(&t, &[&[0, 1, 2], &[2]]).connected_components().len(), 1);
    // Two vertices of an open edge without the edge: disconnected.
    let comps = set(&t, &[&[2], &[0]]).connected_components();
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0], set(&t, &[&[0]]));
  }

  #[test]
  fn euler_and_layers() {
    let k = triangle();
    let all = OpenSimplexSet::full(Arc::clone(&k));
    assert_eq!(all.euler_cc(), 1);
    assert_eq!(set(&k, &[&[0, 1]]).euler_cc(), -1);
    assert_eq!(set(&k, &[&[0, 1, 2]]).euler_cc(), 1);
    assert_eq!(all.skeleton_layer(1).len(), 3);
    assert!(all.skeleton_layer(5).is_empty());
    assert_eq!(set(&k, &[&[0], &[0, 1], &[0, 1, 2]]).skeleton_layer(0), set(&k, &[&[0]]));
  }

  #[test]
  fn from_simplices_rejects_unknown() {
    let k = Arc::new(SimplicialComplex::build(&[vec![0, 1]], 3).unwrap());
    assert!(matches!(OpenSimplexSet::from_simplices(k, &[vec![1, 2]]), Err(ComplexError::UnknownSimplex(_))));
  }
}
