use lefschetz_calculus::document::{parse_instance, PAPER_EXAMPLE};
use lefschetz_calculus::{
  associated_function, barrow, canonical_representation, integrate, l_hom, lambda_c, sheaf_lefschetz,
};

#[test]
fn per_piece_values_match_the_homology_oracle() {
  let inst = parse_instance(PAPER_EXAMPLE).unwrap();
  let expected = [("X1", 1), ("X2", 1), ("X3", -1), ("X4", 0), ("X5", 0)];
  for (name, value) in expected {
    let set = inst.set(name).unwrap();
    assert_eq!(lambda_c(&inst.map, set).unwrap(), value, "lambda_c on {name}");
    assert_eq!(l_hom(&inst.map, set).unwrap(), value, "l_hom on {name}");
  }
}

#[test]
fn weighted_total_is_three() {
  let inst = parse_instance(PAPER_EXAMPLE).unwrap();
  let sheaf = inst.sheaf.as_ref().unwrap();
  let h = inst.function.as_ref().unwrap();
  assert_eq!(sheaf_lefschetz(&inst.map, sheaf).unwrap(), 3);
  assert_eq!(integrate(&inst.map, &canonical_representation(h)).unwrap(), 3);
  assert_eq!(barrow(&inst.map, h).unwrap(), 3);
  assert_eq!(&associated_function(sheaf), h);
}

#[test]
fn canonical_representation_merges_equal_values() {
  let inst = parse_instance(PAPER_EXAMPLE).unwrap();
  let rep = canonical_representation(inst.function.as_ref().unwrap());
  let values: Vec<i64> = rep.terms().iter().map(|(c, _)| *c).collect();
  assert_eq!(values, vec![1, 2, 3, 4]);
}

#[test]
fn whole_complex_lefschetz_number() {
  let inst = parse_instance(PAPER_EXAMPLE).unwrap();
  let full = lefschetz_calculus::OpenSimplexSet::full(inst.complex.clone());
  assert_eq!(lambda_c(&inst.map, &full).unwrap(), l_hom(&inst.map, &full).unwrap());
}
