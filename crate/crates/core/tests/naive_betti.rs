//! Betti numbers of relative pairs from a separate, deliberately plain implementation:
//! simplices enumerated as vertex subsets, boundary matrices reduced modulo a large prime.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use lefschetz_calculus::verify::{random_instance, InstanceBudget};
use lefschetz_calculus::{homology_traces, CompactSupportComplex, OpenSimplexSet, SimplicialSelfMap};

const P: i64 = 1_000_003;

fn rank_mod_p(mut rows: Vec<Vec<i64>>) -> usize {
  let cols = rows.first().map_or(0, Vec::len);
  let mut rank = 0;
  for c in 0..cols {
    let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
      continue;
    };
    rows.swap(rank, pivot);
    let inv = pow(rows[rank][c], P - 2);
    let pivot_row = rows[rank].clone();
    for (r, row) in rows.iter_mut().enumerate() {
      if r != rank && row[c] != 0 {
        let factor = row[c] * inv % P;
        for (x, p) in row.iter_mut().zip(&pivot_row) {
          *x = (*x - factor * p).rem_euclid(P);
        }
      }
    }
    rank += 1;
  }
  rank
}

fn pow(mut b: i64, mut e: i64) -> i64 {
  let mut acc = 1;
  b = b.rem_euclid(P);
  while e > 0 {
    if e & 1 == 1 {
      acc = acc * b % P;
    }
    b = b * b % P;
    e >>= 1;
  }
  acc
}

/// Betti numbers of the chain complex spanned by `cells`, whose boundary drops faces
/// outside `cells` (the relative complex of the closure modulo the frontier).
fn naive_betti(cells: &BTreeSet<Vec<usize>>, top: usize) -> Vec<usize> {
  let by_dim: Vec<Vec<&Vec<usize>>> =
    (0..=top + 1).map(|d| cells.iter().filter(|s| s.len() == d + 1).collect()).collect();
  let index: Vec<BTreeMap<&Vec<usize>, usize>> =
    by_dim.iter().map(|v| v.iter().enumerate().map(|(i, s)| (*s, i)).collect()).collect();
  // rank of the boundary from degree d to degree d-1
  let boundary_rank = |d: usize| -> usize {
    if d == 0 || d > top {
      return 0;
    }
    let mut rows = vec![vec![0i64; by_dim[d].len()]; by_dim[d - 1].len()];
    for (j, s) in by_dim[d].iter().enumerate() {
      for i in 0..s.len() {
        let mut face = (*s).clone();
        face.remove(i);
        if let Some(&r) = index[d - 1].get(&face) {
          rows[r][j] = if i % 2 == 0 { 1 } else { P - 1 };
        }
      }
    }
    rank_mod_p(rows)
  };
  (0..=top).map(|d| by_dim[d].len() - boundary_rank(d) - boundary_rank(d + 1)).collect()
}

fn subsets(s: &[usize]) -> Vec<Vec<usize>> {
  (1u32..1 << s.len())
    .map(|mask| s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
    .collect()
}

#[test]
fn closed_complexes_agree_with_a_mod_p_reducer() {
  let budget = InstanceBudget { max_vertices: 6, max_dimension: 3, case_count: 1, seed: 0 };
  for seed in 0..150 {
    let inst = random_instance(&budget, seed).unwrap();
    let mut cells = BTreeSet::new();
    for s in inst.complex.maximal_simplices() {
      cells.extend(subsets(s.vertices()));
    }
    let top = inst.complex.dimension().unwrap();
    let id = SimplicialSelfMap::identity(Arc::clone(&inst.complex));
    let full = OpenSimplexSet::full(Arc::clone(&inst.complex));
    let summary = homology_traces(&CompactSupportComplex::new(&id, &full).unwrap()).unwrap();
    let ours: Vec<usize> = (0..=top).map(|d| summary.betti(d)).collect();
    assert_eq!(ours, naive_betti(&cells, top), "seed {seed}");
    assert_eq!(
      summary.traces.iter().map(|&t| t as usize).collect::<Vec<_>>()[..=top],
      ours[..],
      "seed {seed}"
    );
  }
}

#[test]
fn relative_pairs_agree_with_a_mod_p_reducer() {
  let budget = InstanceBudget { max_vertices: 6, max_dimension: 3, case_count: 1, seed: 0 };
  let mut checked = 0;
  for seed in 0..300u64 {
    let inst = random_instance(&budget, seed).unwrap();
    let mask = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let ids = inst.complex.ids().filter(|id| mask >> (id.index() % 64) & 1 == 1);
    let u = OpenSimplexSet::new(Arc::clone(&inst.complex), ids);
    if u.is_empty() || !u.is_locally_compact() {
      continue;
    }
    let cells: BTreeSet<Vec<usize>> = u.simplices().map(|s| s.vertices().to_vec()).collect();
    let top = inst.complex.dimension().unwrap();
    let id = SimplicialSelfMap::identity(Arc::clone(&inst.complex));
    let summary = homology_traces(&CompactSupportComplex::new(&id, &u).unwrap()).unwrap();
    let ours: Vec<usize> = (0..=top).map(|d| summary.betti(d)).collect();
    assert_eq!(ours, naive_betti(&cells, top), "seed {seed}");
    checked += 1;
  }
  assert!(checked >= 50, "only {checked} locally compact samples");
}
