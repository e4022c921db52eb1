//! Deterministic random instances and the property suites run over them.
//!
//! Every case is generated from its own seed, derived from the suite seed, the property
//! and the case index, so a suite run is reproducible and cases can run in parallel.
//! Evaluation of a property on an [`Instance`] is deterministic; a failing case carries its
//! serialized instance and re-running [`check_instance`] on it reproduces the failure.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::calculus::{barrow, canonical_representation, integrate, ConstructibleFunction, Representation};
use crate::complex::{OpenSimplexSet, SimplicialComplex};
use crate::document::{Instance, InstanceDocument};
use crate::homology::{homology_traces, l_hom, CompactSupportComplex};
use crate::lefschetz::lambda_c;
use crate::sheaf::{
  associated_function, associated_sheaf, sheaf_lefschetz, ConstructibleSheaf, Part, SheafPiece,
};
use crate::simpmap::{SignRule, SimplicialSelfMap};

const MAP_RETRIES: usize = 1000;
const SET_RETRIES: usize = 64;
const VALUE_RETRIES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
  #[error("invalid budget: {0}")]
  InvalidBudget(&'static str),
  #[error("unknown property {0:?}")]
  UnknownProperty(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceBudget {
  pub max_vertices: usize,
  pub max_dimension: usize,
  pub case_count: usize,
  pub seed: u64,
}

impl Default for InstanceBudget {
  fn default() -> Self {
    Self { max_vertices: 8, max_dimension: 3, case_count: 100, seed: 0 }
  }
}

impl InstanceBudget {
  pub fn validate(&self) -> Result<(), VerifyError> {
    if self.max_vertices == 0 {
      return Err(VerifyError::InvalidBudget("max_vertices must be at least 1"));
    }
    if self.case_count == 0 {
      return Err(VerifyError::InvalidBudget("case_count must be at least 1"));
    }
    Ok(())
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
  Hopf,
  Additivity,
  DimAdditivity,
  Representation,
  Barrow,
  WellDefined,
  Cofibration,
  Vanishing,
  Scaling,
  Wedge,
}

impl Property {
  pub const ALL: [Property; 10] = [
    Property::Hopf,
    Property::Additivity,
    Property::DimAdditivity,
    Property::Representation,
    Property::Barrow,
    Property::WellDefined,
    Property::Cofibration,
    Property::Vanishing,
    Property::Scaling,
    Property::Wedge,
  ];

  pub fn name(self) -> &'static str {
    match self {
      Self::Hopf => "hopf",
      Self::Additivity => "additivity",
      Self::DimAdditivity => "dim-additivity",
      Self::Representation => "representation",
      Self::Barrow => "barrow",
      Self::WellDefined => "well-defined",
      Self::Cofibration => "cofibration",
      Self::Vanishing => "vanishing",
      Self::Scaling => "scaling",
      Self::Wedge => "wedge",
    }
  }
}

impl fmt::Display for Property {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(self.name())
  }
}

impl FromStr for Property {
  type Err = VerifyError;

  fn from_str(s: &str) -> Result<Self, Self::Err> {
    Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| VerifyError::UnknownProperty(s.to_string()))
  }
}

/// Result of evaluating one property on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
  pub pass: bool,
  pub lhs: Option<i64>,
  pub rhs: Option<i64>,
  pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
  pub case: usize,
  pub check: Check,
  /// Present only for failures.
  pub instance: Option<InstanceDocument>,
}

#[derive(Debug, Clone)]
pub struct PropertyReport {
  pub property: Property,
  pub cases: usize,
  pub outcomes: Vec<CaseOutcome>,
  pub elapsed: Duration,
}

impl PropertyReport {
  pub fn failures(&self) -> impl Iterator<Item = &CaseOutcome> {
    self.outcomes.iter().filter(|o| !o.check.pass)
  }

  pub fn failure_count(&self) -> usize {
    self.failures().count()
  }

  pub fn passed(&self) -> bool {
    self.failure_count() == 0
  }

  /// One JSON object per case, without timing.
  pub fn json_lines(&self) -> Vec<String> {
    self
      .outcomes
      .iter()
      .map(|o| {
        let mut value = json!({
          "property": self.property.name(),
          "case": o.case,
          "pass": o.check.pass,
          "lhs": o.check.lhs,
          "rhs": o.check.rhs,
        });
        if let Some(detail) = &o.check.detail {
          value["detail"] = json!(detail);
        }
        if let Some(doc) = &o.instance {
          value["instance"] = serde_json::to_value(doc).expect("document serializes");
        }
        value.to_string()
      })
      .collect()
  }
}

fn splitmix(mut x: u64) -> u64 {
  x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
  x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
  x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
  x ^ (x >> 31)
}

fn case_seed(seed: u64, property: Property, case: usize) -> u64 {
  splitmix(seed ^ splitmix(((property as u64) << 40) ^ case as u64))
}

/// Random complexes, maps, invariant sets, sheaves and functions.
pub struct Generator {
  rng: ChaCha8Rng,
  budget: InstanceBudget,
}

/// Which vertex maps to propose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapBias {
  Any,
  Permutation,
}

impl Generator {
  pub fn new(budget: InstanceBudget, seed: u64) -> Self {
    Self { rng: ChaCha8Rng::seed_from_u64(seed), budget }
  }

  pub fn rng(&mut self) -> &mut ChaCha8Rng {
    &mut self.rng
  }

  fn random_permutation(&mut self, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut self.rng);
    p
  }

  /// Face closure of random maximal simplices, with every vertex present. Half of the time
  /// the simplex list is closed under a random vertex permutation, which is returned.
  pub fn complex(&mut self) -> (Arc<SimplicialComplex>, Option<Vec<usize>>) {
    let n = self.rng.gen_range(1..=self.budget.max_vertices);
    let top = self.budget.max_dimension.min(n - 1);
    let count = self.rng.gen_range(1..=n.max(2));
    let mut maximal: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for _ in 0..count {
      let dim = self.rng.gen_range(0..=top);
      let mut s = rand::seq::index::sample(&mut self.rng, n, dim + 1).into_vec();
      s.sort_unstable();
      maximal.push(s);
    }
    let symmetry = self.rng.gen_bool(0.5).then(|| self.random_permutation(n));
    if let Some(p) = &symmetry {
      let mut closed: Vec<Vec<usize>> = Vec::new();
      for s in &maximal {
        let mut current = s.clone();
        loop {
          if closed.contains(&current) {
            break;
          }
          closed.push(current.clone());
          current = current.iter().map(|&v| p[v]).collect();
          current.sort_unstable();
        }
      }
      maximal = closed;
    }
    let complex = SimplicialComplex::build(&maximal, n).expect("generated simplices are valid");
    (Arc::new(complex), symmetry)
  }

  /// Rejection-sampled simplicial map. After [`MAP_RETRIES`] rejections the complex is
  /// replaced by a full skeleton of a simplex, on which every permutation is simplicial.
  pub fn map(
    &mut self,
    complex: Arc<SimplicialComplex>,
    symmetry: Option<&[usize]>,
    bias: MapBias,
  ) -> (Arc<SimplicialComplex>, SimplicialSelfMap) {
    let n = complex.vertex_count();
    for _ in 0..MAP_RETRIES {
      let kind = match bias {
        MapBias::Any => self.rng.gen_range(0..4),
        MapBias::Permutation => self.rng.gen_range(0..2),
      };
      let images = match (kind, symmetry) {
        (0, Some(p)) => {
          // A power of the symmetry, so that fixed simplices occur.
          let power = self.rng.gen_range(1..=3);
          (0..n).map(|v| (0..power).fold(v, |w, _| p[w])).collect()
        }
        (0 | 1, _) => self.random_permutation(n),
        (2, _) => (0..n).map(|_| self.rng.gen_range(0..n)).collect(),
        _ => (0..n).map(|v| if self.rng.gen_bool(0.6) { v } else { self.rng.gen_range(0..n) }).collect(),
      };
      if let Ok(map) = SimplicialSelfMap::new(Arc::clone(&complex), images) {
        return (complex, map);
      }
    }
    let top = self.budget.max_dimension.min(n - 1);
    let mut faces: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let subsets = (0..n).fold(vec![Vec::new()], |acc: Vec<Vec<usize>>, v| {
      let mut next = acc.clone();
      next.extend(acc.into_iter().filter(|s| s.len() <= top).map(|mut s| {
        s.push(v);
        s
      }));
      next
    });
    faces.extend(subsets.into_iter().filter(|s| s.len() == top + 1));
    let complex = Arc::new(SimplicialComplex::build(&faces, n).expect("skeleton is valid"));
    let images = self.random_permutation(n);
    let map = SimplicialSelfMap::new(Arc::clone(&complex), images).expect("permutations preserve skeleta");
    (complex, map)
  }

  fn random_orbit_union(
    &mut self,
    orbits: &[OpenSimplexSet],
    ambient: &Arc<SimplicialComplex>,
  ) -> OpenSimplexSet {
    let p = self.rng.gen_range(0.2..0.8);
    let chosen = orbits.iter().filter(|_| self.rng.gen_bool(p)).flat_map(|o| o.iter());
    OpenSimplexSet::new(Arc::clone(ambient), chosen.collect::<Vec<_>>())
  }

  /// A nonempty locally compact pair-invariant union of simplex orbits; the whole complex
  /// if none is found.
  pub fn invariant_set(&mut self, map: &SimplicialSelfMap) -> OpenSimplexSet {
    let ambient = map.ambient();
    let orbits = map.simplex_orbits();
    for _ in 0..SET_RETRIES {
      let set = self.random_orbit_union(&orbits, ambient);
      if !set.is_empty() && admissible(map, &set) {
        return set;
      }
    }
    OpenSimplexSet::full(Arc::clone(ambient))
  }

  /// Up to `max_pieces` disjoint admissible orbit unions.
  pub fn partition(&mut self, map: &SimplicialSelfMap, max_pieces: usize) -> Vec<OpenSimplexSet> {
    let ambient = map.ambient();
    let orbits = map.simplex_orbits();
    for _ in 0..SET_RETRIES {
      let k = self.rng.gen_range(1..=max_pieces);
      let mut groups = vec![Vec::new(); k + 1];
      for orbit in &orbits {
        let label = self.rng.gen_range(0..=k);
        groups[label].extend(orbit.iter());
      }
      groups.pop();
      let pieces: Vec<OpenSimplexSet> = groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| OpenSimplexSet::new(Arc::clone(ambient), g))
        .collect();
      if !pieces.is_empty() && pieces.iter().all(|p| admissible(map, p)) {
        return pieces;
      }
    }
    if ambient.is_empty() {
      Vec::new()
    } else {
      vec![OpenSimplexSet::full(Arc::clone(ambient))]
    }
  }

  /// Random values on pieces such that the merged level sets stay admissible. Falls back
  /// to distinct values.
  fn piece_values(
    &mut self,
    map: &SimplicialSelfMap,
    pieces: &[OpenSimplexSet],
    draw: impl Fn(&mut ChaCha8Rng) -> i64,
    distinct: impl Fn(usize) -> i64,
  ) -> Vec<i64> {
    for _ in 0..VALUE_RETRIES {
      let values: Vec<i64> = pieces.iter().map(|_| draw(&mut self.rng)).collect();
      if merged_levels_admissible(map, pieces, &values) {
        return values;
      }
    }
    (0..pieces.len()).map(distinct).collect()
  }

  /// Compatible sheaf with ranks in `0..=5`.
  pub fn sheaf(&mut self, map: &SimplicialSelfMap) -> ConstructibleSheaf {
    let pieces = self.partition(map, 3);
    let ranks = self.piece_values(map, &pieces, |r| r.gen_range(0..=5), |i| i as i64 + 1);
    let pieces = pieces
      .into_iter()
      .zip(ranks)
      .map(|(support, rank)| SheafPiece { support, rank: rank as u64 })
      .collect();
    ConstructibleSheaf::new(Arc::clone(map.ambient()), pieces).expect("generated pieces are valid")
  }

  /// Function with admissible level sets; values in `-5..=5`, or `0..=5` when
  /// `nonnegative`.
  pub fn function(&mut self, map: &SimplicialSelfMap, nonnegative: bool) -> ConstructibleFunction {
    let pieces = self.partition(map, 4);
    let values = if nonnegative {
      self.piece_values(map, &pieces, |r| r.gen_range(0..=5), |i| i as i64 + 1)
    } else {
      self.piece_values(
        map,
        &pieces,
        |r| r.gen_range(-5..=5),
        |i| if i % 2 == 0 { i as i64 + 1 } else { -(i as i64 + 1) },
      )
    };
    let levels = pieces.into_iter().zip(values).filter(|(_, v)| *v != 0).map(|(s, v)| (v, s));
    ConstructibleFunction::new(Arc::clone(map.ambient()), levels.collect::<Vec<_>>())
      .expect("generated levels are valid")
  }

  fn base(&mut self, bias: MapBias) -> Instance {
    let (complex, symmetry) = self.complex();
    let (complex, map) = self.map(complex, symmetry.as_deref(), bias);
    Instance::bare(complex, map)
  }

  /// Wedge of circles, wedge of boundaries of tetrahedra, or a graph, with a map that
  /// permutes the wedge summands.
  pub fn wedge(&mut self) -> Instance {
    let kind =
      if self.budget.max_dimension >= 2 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..2) };
    let instance = match kind {
      0 => {
        let k = self.rng.gen_range(1..=3);
        let (maximal, images) = self.wedge_of_spheres(k, 1);
        wedge_instance(1 + 2 * k, &maximal, images)
      }
      1 => {
        let graph = InstanceBudget { max_dimension: 1, ..self.budget };
        let mut inner = Generator { rng: self.rng.clone(), budget: graph };
        let instance = inner.base(MapBias::Any);
        self.rng = inner.rng;
        instance
      }
      _ => {
        let k = self.rng.gen_range(1..=2);
        let (maximal, images) = self.wedge_of_spheres(k, 2);
        wedge_instance(1 + 3 * k, &maximal, images)
      }
    };
    let sheaf = self.sheaf(&instance.map);
    Instance { sheaf: Some(sheaf), ..instance }
  }

  /// `k` copies of the boundary of an `(n+1)`-simplex sharing vertex 0. The map permutes the
  /// copies and permutes the non-base vertices inside each.
  fn wedge_of_spheres(&mut self, k: usize, n: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let per = n + 1;
    let vertices = |i: usize| -> Vec<usize> { (0..per).map(|j| 1 + per * i + j).collect() };
    let mut maximal = Vec::new();
    for i in 0..k {
      let mut all = vec![0];
      all.extend(vertices(i));
      for skip in 0..all.len() {
        let mut face = all.clone();
        face.remove(skip);
        maximal.push(face);
      }
    }
    let target = self.random_permutation(k);
    let mut images = vec![0; 1 + per * k];
    for (i, &t) in target.iter().enumerate() {
      let inner = self.random_permutation(per);
      let (src, dst) = (vertices(i), vertices(t));
      for j in 0..per {
        images[src[j]] = dst[inner[j]];
      }
    }
    (maximal, images)
  }
}

fn wedge_instance(vertex_count: usize, maximal: &[Vec<usize>], images: Vec<usize>) -> Instance {
  let complex = Arc::new(SimplicialComplex::build(maximal, vertex_count).expect("wedge is valid"));
  let map = SimplicialSelfMap::new(Arc::clone(&complex), images).expect("wedge symmetry is simplicial");
  Instance::bare(complex, map)
}

/// Figure-eight with its two loops exchanged, carrying the constant rank-one sheaf. Only
/// the wedge point is fixed.
pub fn figure_eight_swap() -> Instance {
  let maximal = vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![0, 4], vec![3, 4]];
  let instance = wedge_instance(5, &maximal, vec![0, 3, 4, 1, 2]);
  let sheaf = ConstructibleSheaf::constant(Arc::clone(&instance.complex), 1);
  Instance { sheaf: Some(sheaf), ..instance }
}

/// Locally compact and pair-invariant.
pub fn admissible(map: &SimplicialSelfMap, set: &OpenSimplexSet) -> bool {
  set.is_locally_compact() && map.is_pair_invariant(set)
}

fn merged_levels_admissible(map: &SimplicialSelfMap, pieces: &[OpenSimplexSet], values: &[i64]) -> bool {
  let mut levels: BTreeMap<i64, Vec<&OpenSimplexSet>> = BTreeMap::new();
  for (piece, &v) in pieces.iter().zip(values) {
    if v != 0 {
      levels.entry(v).or_default().push(piece);
    }
  }
  levels.values().all(|group| {
    let ids: Vec<_> = group.iter().flat_map(|s| s.iter()).collect();
    admissible(map, &OpenSimplexSet::new(Arc::clone(map.ambient()), ids))
  })
}

/// A general-purpose random instance: complex, map, an admissible set `U`, a compatible
/// sheaf and a ℤ-valued function.
pub fn random_instance(budget: &InstanceBudget, seed: u64) -> Result<Instance, VerifyError> {
  budget.validate()?;
  let mut gen = Generator::new(*budget, seed);
  let mut instance = gen.base(MapBias::Any);
  let set = gen.invariant_set(&instance.map);
  instance.sets.insert("U".into(), set);
  instance.sheaf = Some(gen.sheaf(&instance.map));
  instance.function = Some(gen.function(&instance.map, false));
  Ok(instance)
}

/// The instance for one case of a suite.
pub fn generate_case(property: Property, budget: &InstanceBudget, case: usize) -> Instance {
  if property == Property::Wedge && case == 0 {
    return figure_eight_swap();
  }
  let mut gen = Generator::new(*budget, case_seed(budget.seed, property, case));
  match property {
    Property::Hopf | Property::Vanishing => {
      let mut inst = gen.base(MapBias::Any);
      let set = gen.invariant_set(&inst.map);
      inst.sets.insert("U".into(), set);
      inst
    }
    Property::Additivity => {
      let mut inst = gen.base(MapBias::Any);
      let (u, v) = disjoint_pair(&mut gen, &inst.map);
      inst.sets.insert("U".into(), u);
      inst.sets.insert("V".into(), v);
      inst
    }
    Property::DimAdditivity => {
      let mut inst = gen.base(MapBias::Any);
      let mut found = layered_set(&mut gen, &inst.map);
      while found.is_none() {
        inst = gen.base(MapBias::Permutation);
        found = layered_set(&mut gen, &inst.map);
      }
      inst.sets.insert("D".into(), found.expect("loop exits with a set"));
      inst
    }
    Property::Representation => {
      let mut inst = gen.base(MapBias::Any);
      inst.sheaf = Some(gen.sheaf(&inst.map));
      inst.function = Some(gen.function(&inst.map, true));
      inst
    }
    Property::Barrow | Property::WellDefined => {
      let mut inst = gen.base(MapBias::Any);
      inst.function = Some(gen.function(&inst.map, false));
      inst
    }
    Property::Cofibration => {
      let bias = if gen.rng().gen_bool(0.5) { MapBias::Any } else { MapBias::Permutation };
      let mut inst = gen.base(bias);
      let sheaf = gen.sheaf(&inst.map);
      let sub = cofibration_subcomplex(&mut gen, &inst.map, &sheaf);
      inst.sets.insert("A".into(), sub);
      inst.sheaf = Some(sheaf);
      inst
    }
    Property::Scaling => {
      let mut inst = gen.base(MapBias::Any);
      inst.sheaf = Some(gen.sheaf(&inst.map));
      inst
    }
    Property::Wedge => gen.wedge(),
  }
}

fn disjoint_pair(gen: &mut Generator, map: &SimplicialSelfMap) -> (OpenSimplexSet, OpenSimplexSet) {
  let ambient = Arc::clone(map.ambient());
  let orbits = map.simplex_orbits();
  for _ in 0..SET_RETRIES {
    let (mut u, mut v) = (Vec::new(), Vec::new());
    for orbit in &orbits {
      match gen.rng().gen_range(0..3) {
        0 => u.extend(orbit.iter()),
        1 => v.extend(orbit.iter()),
        _ => {}
      }
    }
    let u = OpenSimplexSet::new(Arc::clone(&ambient), u);
    let v = OpenSimplexSet::new(Arc::clone(&ambient), v);
    let union = u.union(&v).expect("same ambient");
    if !u.is_empty() && !v.is_empty() && [&u, &v, &union].iter().all(|s| admissible(map, s)) {
      return (u, v);
    }
  }
  (gen.invariant_set(map), OpenSimplexSet::empty(ambient))
}

fn layered_set(gen: &mut Generator, map: &SimplicialSelfMap) -> Option<OpenSimplexSet> {
  let candidates = (0..SET_RETRIES).map(|_| gen.invariant_set(map)).collect::<Vec<_>>();
  let full = OpenSimplexSet::full(Arc::clone(map.ambient()));
  candidates.into_iter().chain(std::iter::once(full)).find(|d| {
    admissible(map, d) && (0..=d.dimension().unwrap_or(0)).all(|i| admissible(map, &d.skeleton_layer(i)))
  })
}

/// An invariant subcomplex `A` whose complement, and the restrictions of `sheaf` to both,
/// are admissible. Falls back to the empty subcomplex.
fn cofibration_subcomplex(
  gen: &mut Generator,
  map: &SimplicialSelfMap,
  sheaf: &ConstructibleSheaf,
) -> OpenSimplexSet {
  let ambient = Arc::clone(map.ambient());
  let orbits = map.simplex_orbits();
  for _ in 0..SET_RETRIES {
    let sub = gen.random_orbit_union(&orbits, &ambient).closure();
    if sub.is_empty() || sub.len() == ambient.len() {
      continue;
    }
    if cofibration_admissible(map, sheaf, &sub) {
      return sub;
    }
  }
  OpenSimplexSet::empty(ambient)
}

fn cofibration_admissible(map: &SimplicialSelfMap, sheaf: &ConstructibleSheaf, sub: &OpenSimplexSet) -> bool {
  let rest = sub.complement();
  if !admissible(map, sub) || !admissible(map, &rest) {
    return false;
  }
  [sub, &rest].iter().all(|part| match sheaf.restrict(part) {
    Ok(restricted) => restricted.is_compatible(map),
    Err(_) => false,
  })
}

/// Accumulates comparisons; the first mismatch or error decides the outcome.
struct Comparisons {
  first: Option<(i64, i64)>,
  failure: Option<Check>,
}

impl Comparisons {
  fn new() -> Self {
    Self { first: None, failure: None }
  }

  fn compare<E: fmt::Display>(&mut self, label: &str, lhs: Result<i64, E>, rhs: Result<i64, E>) {
    if self.failure.is_some() {
      return;
    }
    match (lhs, rhs) {
      (Ok(l), Ok(r)) if l == r => {
        self.first.get_or_insert((l, r));
      }
      (Ok(l), Ok(r)) => {
        self.failure = Some(Check {
          pass: false,
          lhs: Some(l),
          rhs: Some(r),
          detail: Some(format!("{label}: {l} != {r}")),
        })
      }
      (l, r) => {
        let detail = match (&l, &r) {
          (Err(e), _) => format!("{label}: left side failed: {e}"),
          (_, Err(e)) => format!("{label}: right side failed: {e}"),
          _ => unreachable!(),
        };
        self.failure = Some(Check { pass: false, lhs: l.ok(), rhs: r.ok(), detail: Some(detail) });
      }
    }
  }

  fn finish(self) -> Check {
    self.failure.unwrap_or_else(|| {
      let (l, r) = self.first.map_or((None, None), |(l, r)| (Some(l), Some(r)));
      Check { pass: true, lhs: l, rhs: r, detail: None }
    })
  }
}

fn missing(what: &str) -> Check {
  Check { pass: false, lhs: None, rhs: None, detail: Some(format!("instance has no {what}")) }
}

fn s<E: fmt::Display>(r: Result<i64, E>) -> Result<i64, String> {
  r.map_err(|e| e.to_string())
}

/// Deterministic split of a function into a representation with more, smaller terms. Each
/// level set is cut along simplex orbits into admissible chunks; each coefficient `j` is
/// written as `1 + (j - 1)`; and `+1_X - 1_X` is appended.
pub fn split_representation(map: &SimplicialSelfMap, h: &ConstructibleFunction) -> Representation {
  let ambient = Arc::clone(h.ambient());
  let orbits = map.simplex_orbits();
  let mut rep = Representation::new(Arc::clone(&ambient));
  for (&value, level) in h.levels() {
    let mut chunks = Vec::new();
    let mut pending = OpenSimplexSet::empty(Arc::clone(&ambient));
    for orbit in &orbits {
      let part = orbit.intersection(level).expect("same ambient");
      if part.is_empty() {
        continue;
      }
      pending = pending.union(&part).expect("same ambient");
      if admissible(map, &pending) {
        chunks.push(std::mem::replace(&mut pending, OpenSimplexSet::empty(Arc::clone(&ambient))));
      }
    }
    if !pending.is_empty() {
      chunks = vec![level.clone()];
    }
    for chunk in chunks {
      rep.push(1, chunk.clone()).expect("same ambient");
      if value != 1 {
        rep.push(value - 1, chunk).expect("same ambient");
      }
    }
  }
  if !ambient.is_empty() {
    rep.push(1, OpenSimplexSet::full(Arc::clone(&ambient))).expect("same ambient");
    rep.push(-1, OpenSimplexSet::full(ambient)).expect("same ambient");
  }
  rep
}

fn mismatches(a: &[i64], b: &[i64]) -> i64 {
  a.iter().zip(b).filter(|(x, y)| x != y).count() as i64
}

/// Evaluates `property` on `instance`, with the chain-map signs computed by `rule`.
pub fn check_instance(property: Property, instance: &Instance, rule: SignRule) -> Check {
  let map = instance.map.clone().with_sign_rule(rule);
  let full = OpenSimplexSet::full(Arc::clone(&instance.complex));
  let mut cmp = Comparisons::new();
  match property {
    Property::Hopf => {
      let Some(u) = instance.set("U") else {
        return missing("set U");
      };
      cmp.compare("lambda_c = l_hom", s(lambda_c(&map, u)), s(l_hom(&map, u)));
    }
    Property::Additivity => {
      let (Some(u), Some(v)) = (instance.set("U"), instance.set("V")) else {
        return missing("sets U and V");
      };
      let union = u.union(v).expect("same ambient");
      let sum = |f: &dyn Fn(&OpenSimplexSet) -> Result<i64, String>| Ok::<i64, String>(f(u)? + f(v)?);
      let lambda = |x: &OpenSimplexSet| s(lambda_c(&map, x));
      let lhom = |x: &OpenSimplexSet| s(l_hom(&map, x));
      cmp.compare("lambda_c over disjoint union", lambda(&union), sum(&lambda));
      if [u, v, &union].iter().all(|x| admissible(&map, x)) {
        cmp.compare("l_hom over disjoint union", lhom(&union), sum(&lhom));
      }
    }
    Property::DimAdditivity => {
      let Some(d) = instance.set("D") else {
        return missing("set D");
      };
      let top = d.dimension().unwrap_or(0);
      let layers: Result<i64, String> = (0..=top).map(|i| s(l_hom(&map, &d.skeleton_layer(i)))).sum();
      cmp.compare("l_hom over skeleton layers", s(l_hom(&map, d)), layers);
    }
    Property::Representation => {
      let Some(sheaf) = &instance.sheaf else {
        return missing("sheaf");
      };
      let rep = canonical_representation(&associated_function(sheaf));
      cmp.compare("sheaf Lefschetz = integral", s(sheaf_lefschetz(&map, sheaf)), s(integrate(&map, &rep)));
      if let Some(h) = &instance.function {
        match associated_sheaf(h, Part::Positive) {
          Ok(assoc) => {
            cmp.compare(
              "converse: sheaf of h",
              s(sheaf_lefschetz(&map, &assoc)),
              s(integrate(&map, &canonical_representation(h))),
            );
            let back = associated_function(&assoc).values();
            cmp.compare::<String>("converse: round trip", Ok(mismatches(&back, &h.values())), Ok(0));
          }
          Err(e) => cmp.compare("converse: sheaf of h", Err(e.to_string()), Ok(0)),
        }
      }
    }
    Property::Barrow => {
      let Some(h) = &instance.function else {
        return missing("function");
      };
      cmp.compare("barrow = integral", s(barrow(&map, h)), s(integrate(&map, &canonical_representation(h))));
    }
    Property::WellDefined => {
      let Some(h) = &instance.function else {
        return missing("function");
      };
      let canonical = canonical_representation(h);
      let split = split_representation(&instance.map, h);
      cmp.compare("merged = split integral", s(integrate(&map, &canonical)), s(integrate(&map, &split)));
      cmp.compare::<String>("pointwise equality", Ok(mismatches(&split.pointwise(), &h.values())), Ok(0));
    }
    Property::Cofibration => {
      let (Some(sheaf), Some(sub)) = (&instance.sheaf, instance.set("A")) else {
        return missing("sheaf and set A");
      };
      let rest = sub.complement();
      let part = |x: &OpenSimplexSet| -> Result<i64, String> {
        let restricted = sheaf.restrict(x).map_err(|e| e.to_string())?;
        s(sheaf_lefschetz(&map, &restricted))
      };
      let sum = part(&rest).and_then(|r| Ok(r + part(sub)?));
      cmp.compare("L_c(X) = L_c(X - A) + L_c(A)", s(sheaf_lefschetz(&map, sheaf)), sum);
    }
    Property::Vanishing => {
      let Some(u) = instance.set("U") else {
        return missing("set U");
      };
      let top = instance.complex.dimension().map_or(0, |d| d + 1);
      let above =
        CompactSupportComplex::with_degrees(&map, u, top + 3).map_err(|e| e.to_string()).and_then(|c| {
          let summary = homology_traces(&c).map_err(|e| e.to_string())?;
          Ok(
            (top..top + 3)
              .map(|p| (summary.betti(p) + c.basis(p).len()) as i64 + summary.trace(p).abs())
              .sum::<i64>(),
          )
        });
      cmp.compare("betti and traces above the dimension", above, Ok(0));
    }
    Property::Scaling => {
      let lambda = s(lambda_c(&map, &full));
      for n in [1u64, 2, 5, 0] {
        let constant = ConstructibleSheaf::constant(Arc::clone(&instance.complex), n);
        cmp.compare(
          &format!("constant rank {n}"),
          s(sheaf_lefschetz(&map, &constant)),
          lambda.clone().map(|l| n as i64 * l),
        );
      }
      if let Some(sheaf) = &instance.sheaf {
        let base = s(sheaf_lefschetz(&map, sheaf));
        for m in [2u64, 5, 0] {
          cmp.compare(
            &format!("ranks scaled by {m}"),
            s(sheaf_lefschetz(&map, &sheaf.scaled(m))),
            base.clone().map(|b| m as i64 * b),
          );
        }
      }
    }
    Property::Wedge => {
      let Some(sheaf) = &instance.sheaf else {
        return missing("sheaf");
      };
      let rep = canonical_representation(&associated_function(sheaf));
      cmp.compare("sheaf Lefschetz = integral", s(sheaf_lefschetz(&map, sheaf)), s(integrate(&map, &rep)));
      cmp.compare("lambda_c = l_hom on X", s(lambda_c(&map, &full)), s(l_hom(&map, &full)));
    }
  }
  cmp.finish()
}

pub fn run_property_suite(
  property: Property,
  budget: &InstanceBudget,
) -> Result<PropertyReport, VerifyError> {
  run_property_suite_with(property, budget, SignRule::Oriented)
}

/// As [`run_property_suite`], with a chosen sign rule for the chain map.
pub fn run_property_suite_with(
  property: Property,
  budget: &InstanceBudget,
  rule: SignRule,
) -> Result<PropertyReport, VerifyError> {
  budget.validate()?;
  let start = Instant::now();
  let outcomes: Vec<CaseOutcome> = (0..budget.case_count)
    .into_par_iter()
    .map(|case| {
      let instance = generate_case(property, budget, case);
      let check = check_instance(property, &instance, rule);
      let instance = (!check.pass).then(|| instance.to_document());
      CaseOutcome { case, check, instance }
    })
    .collect();
  Ok(PropertyReport { property, cases: budget.case_count, outcomes, elapsed: start.elapsed() })
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn property_names_round_trip() {
    for p in Property::ALL {
      assert_eq!(p.name().parse::<Property>().unwrap(), p);
    }
    assert_eq!("nope".parse::<Property>(), Err(VerifyError::UnknownProperty("nope".into())));
  }

  #[test]
  fn budget_validation() {
    let bad = InstanceBudget { max_vertices: 0, ..Default::default() };
    assert!(bad.validate().is_err());
    let bad = InstanceBudget { case_count: 0, ..Default::default() };
    assert!(run_property_suite(Property::Hopf, &bad).is_err());
  }

  #[test]
  fn single_vertex_budget_forces_identity() {
    let budget = InstanceBudget { max_vertices: 1, ..Default::default() };
    for seed in 0..20 {
      let inst = random_instance(&budget, seed).unwrap();
      assert_eq!(inst.complex.len(), 1);
      assert_eq!(inst.map.vertex_images(), &[0]);
    }
  }

  #[test]
  fn same_seed_same_instance() {
    let budget = InstanceBudget::default();
    for seed in [0, 1, 99] {
      assert_eq!(random_instance(&budget, seed).unwrap(), random_instance(&budget, seed).unwrap());
    }
  }

  #[test]
  fn generated_sets_are_admissible() {
    let budget = InstanceBudget::default();
    for seed in 0..40 {
      let inst = random_instance(&budget, seed).unwrap();
      assert!(admissible(&inst.map, inst.set("U").unwrap()));
      assert!(inst.sheaf.as_ref().unwrap().is_compatible(&inst.map));
      let h = inst.function.as_ref().unwrap();
      assert!(h.levels().values().all(|l| admissible(&inst.map, l)));
    }
  }

  #[test]
  fn figure_eight_is_first_wedge_case() {
    let inst = generate_case(Property::Wedge, &InstanceBudget::default(), 0);
    let check = check_instance(Property::Wedge, &inst, SignRule::Oriented);
    assert!(check.pass);
    assert_eq!(check.lhs, Some(1));
  }

  #[test]
  fn split_representation_matches_pointwise() {
    let budget = InstanceBudget::default();
    for seed in 0..30 {
      let inst = random_instance(&budget, seed).unwrap();
      let h = inst.function.as_ref().unwrap();
      assert_eq!(split_representation(&inst.map, h).pointwise(), h.values());
    }
  }
}
