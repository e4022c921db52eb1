//! Single-file JSON instance documents.
//!
//! ```json
//! {
//!   "vertex_count": 3,
//!   "maximal": [[0,1],[0,2],[1,2]],
//!   "map": [1,2,0],
//!   "sets": {"V": [[0],[1],[2]]},
//!   "sheaf": [{"set": "V", "rank": 2}, {"set": [[0,1],[0,2],[1,2]], "rank": 5}],
//!   "function": [{"value": -1, "set": "V"}]
//! }
//! ```
//!
//! `maximal` is face-closed on load. `map` defaults to the identity. A `set` reference is
//! either the name of an entry of `sets` or an inline list of simplices.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{CalculusError, ConstructibleFunction};
use crate::complex::{ComplexError, OpenSimplexSet, Simplex, SimplicialComplex};
use crate::sheaf::{ConstructibleSheaf, SheafError, SheafPiece};
use crate::simpmap::{MapError, SimplicialSelfMap};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
  #[error("line {line}, column {column}: {message}")]
  Syntax { line: usize, column: usize, message: String },
  #[error("{path}: {message}")]
  Invalid { path: String, message: String },
}

impl DocumentError {
  fn invalid(path: impl Into<String>, message: impl ToString) -> Self {
    Self::Invalid { path: path.into(), message: message.to_string() }
  }

  /// Document path of a validation error, if any.
  pub fn path(&self) -> Option<&str> {
    match self {
      Self::Invalid { path, .. } => Some(path),
      Self::Syntax { .. } => None,
    }
  }
}

/// A set given by name or inline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetRef {
  Named(String),
  Inline(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafEntry {
  pub set: SetRef,
  pub rank: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
  pub value: i64,
  pub set: SetRef,
}

/// The raw document, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
  pub vertex_count: usize,
  pub maximal: Vec<Vec<usize>>,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub map: Option<Vec<usize>>,
  #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
  pub sets: BTreeMap<String, Vec<Vec<usize>>>,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub sheaf: Option<Vec<SheafEntry>>,
  #[serde(default, skip_serializing_if = "Option::is_none")]
  pub function: Option<Vec<FunctionEntry>>,
}

impl InstanceDocument {
  pub fn from_json(text: &str) -> Result<Self, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
      line: e.line(),
      column: e.column(),
      message: e.to_string(),
    })
  }

  /// Pretty JSON with one top-level key per line and simplices kept inline.
  pub fn to_json(&self) -> String {
    fn compact<T: Serialize>(value: &T) -> String {
      serde_json::to_string(value).expect("serializable")
    }
    let mut fields = vec![
      format!("  \"vertex_count\": {}", self.vertex_count),
      format!("  \"maximal\": {}", compact(&self.maximal)),
    ];
    if let Some(map) = &self.map {
      fields.push(format!("  \"map\": {}", compact(map)));
    }
    if !self.sets.is_empty() {
      let body: Vec<String> =
        self.sets.iter().map(|(name, set)| format!("    {}: {}", compact(name), compact(set))).collect();
      fields.push(format!("  \"sets\": {{\n{}\n  }}", body.join(",\n")));
    }
    if let Some(sheaf) = &self.sheaf {
      fields.push(format!("  \"sheaf\": {}", list(sheaf.iter().map(compact))));
    }
    if let Some(function) = &self.function {
      fields.push(format!("  \"function\": {}", list(function.iter().map(compact))));
    }
    let mut out = String::from("{\n");
    let _ = write!(out, "{}\n}}\n", fields.join(",\n"));
    out
  }
}

fn list(items: impl Iterator<Item = String>) -> String {
  let items: Vec<String> = items.map(|s| format!("    {s}")).collect();
  if items.is_empty() {
    "[]".into()
  } else {
    format!("[\n{}\n  ]", items.join(",\n"))
  }
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
  pub complex: Arc<SimplicialComplex>,
  pub map: SimplicialSelfMap,
  pub sets: BTreeMap<String, OpenSimplexSet>,
  pub sheaf: Option<ConstructibleSheaf>,
  pub function: Option<ConstructibleFunction>,
}

impl PartialEq for Instance {
  fn eq(&self, other: &Self) -> bool {
    self.complex == other.complex
      && self.map.vertex_images() == other.map.vertex_images()
      && self.sets == other.sets
      && self.sheaf == other.sheaf
      && self.function == other.function
  }
}

/// Parses and validates a JSON document.
pub fn parse_instance(text: &str) -> Result<Instance, DocumentError> {
  Instance::from_document(&InstanceDocument::from_json(text)?)
}

impl Instance {
  /// Identity map, no sets, sheaf or function.
  pub fn bare(complex: Arc<SimplicialComplex>, map: SimplicialSelfMap) -> Self {
    Self { complex, map, sets: BTreeMap::new(), sheaf: None, function: None }
  }

  pub fn set(&self, name: &str) -> Option<&OpenSimplexSet> {
    self.sets.get(name)
  }

  pub fn from_document(doc: &InstanceDocument) -> Result<Self, DocumentError> {
    for (i, raw) in doc.maximal.iter().enumerate() {
      let simplex =
        Simplex::new(raw.clone()).map_err(|e| DocumentError::invalid(format!("maximal[{i}]"), e))?;
      if let Some(v) = simplex.vertices().iter().find(|&&v| v >= doc.vertex_count) {
        return Err(DocumentError::invalid(
          format!("maximal[{i}]"),
          format!("vertex {v} is out of range (vertex_count = {})", doc.vertex_count),
        ));
      }
    }
    let complex = Arc::new(
      SimplicialComplex::build(&doc.maximal, doc.vertex_count)
        .map_err(|e| DocumentError::invalid("maximal", e))?,
    );

    let map = match &doc.map {
      None => SimplicialSelfMap::identity(Arc::clone(&complex)),
      Some(images) => SimplicialSelfMap::new(Arc::clone(&complex), images.clone()).map_err(|e| match e {
        MapError::ImageOutOfRange { vertex, .. } => DocumentError::invalid(format!("map[{vertex}]"), e),
        other => DocumentError::invalid("map", other),
      })?,
    };

    let mut sets = BTreeMap::new();
    for (name, raw) in &doc.sets {
      let set = resolve_inline(&complex, raw, &format!("sets.{name}"))?;
      sets.insert(name.clone(), set);
    }

    let sheaf = match &doc.sheaf {
      None => None,
      Some(entries) => {
        let mut pieces = Vec::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
          let support = resolve(&complex, &sets, &entry.set, &format!("sheaf[{i}].set"))?;
          pieces.push(SheafPiece { support, rank: entry.rank });
        }
        Some(ConstructibleSheaf::new(Arc::clone(&complex), pieces).map_err(|e| sheaf_error(entries, e))?)
      }
    };

    let function = match &doc.function {
      None => None,
      Some(entries) => {
        let mut levels = Vec::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
          let path = format!("function[{i}]");
          if entry.value == 0 {
            return Err(DocumentError::invalid(path, CalculusError::ZeroLevel));
          }
          levels.push((entry.value, resolve(&complex, &sets, &entry.set, &format!("{path}.set"))?));
        }
        Some(
          ConstructibleFunction::new(Arc::clone(&complex), levels).map_err(|e| function_error(entries, e))?,
        )
      }
    };

    Ok(Self { complex, map, sets, sheaf, function })
  }

  /// Serializable form. Sheaf pieces and level sets equal to a named set refer to it by
  /// name; the rest are written inline.
  pub fn to_document(&self) -> InstanceDocument {
    let reference = |set: &OpenSimplexSet| -> SetRef {
      match self.sets.iter().find(|(_, named)| *named == set) {
        Some((name, _)) => SetRef::Named(name.clone()),
        None => SetRef::Inline(set.to_vertex_lists()),
      }
    };
    let is_identity = self.map.vertex_images().iter().enumerate().all(|(i, &v)| i == v);
    InstanceDocument {
      vertex_count: self.complex.vertex_count(),
      maximal: self.complex.maximal_simplices().into_iter().map(|s| s.vertices().to_vec()).collect(),
      map: (!is_identity).then(|| self.map.vertex_images().to_vec()),
      sets: self.sets.iter().map(|(n, s)| (n.clone(), s.to_vertex_lists())).collect(),
      sheaf: self.sheaf.as_ref().map(|sheaf| {
        sheaf.pieces().iter().map(|p| SheafEntry { set: reference(&p.support), rank: p.rank }).collect()
      }),
      function: self.function.as_ref().map(|h| {
        h.levels().iter().map(|(&value, set)| FunctionEntry { value, set: reference(set) }).collect()
      }),
    }
  }
}

fn resolve_inline(
  complex: &Arc<SimplicialComplex>,
  raw: &[Vec<usize>],
  path: &str,
) -> Result<OpenSimplexSet, DocumentError> {
  for (i, s) in raw.iter().enumerate() {
    complex.find(s).map_err(|e: ComplexError| DocumentError::invalid(format!("{path}[{i}]"), e))?;
  }
  OpenSimplexSet::from_simplices(Arc::clone(complex), raw).map_err(|e| DocumentError::invalid(path, e))
}

fn resolve(
  complex: &Arc<SimplicialComplex>,
  sets: &BTreeMap<String, OpenSimplexSet>,
  reference: &SetRef,
  path: &str,
) -> Result<OpenSimplexSet, DocumentError> {
  match reference {
    SetRef::Named(name) => {
      sets.get(name).cloned().ok_or_else(|| DocumentError::invalid(path, format!("no set named {name:?}")))
    }
    SetRef::Inline(raw) => resolve_inline(complex, raw, path),
  }
}

fn describe(reference: &SetRef) -> String {
  match reference {
    SetRef::Named(name) => format!("set {name:?}"),
    SetRef::Inline(_) => "inline set".into(),
  }
}

fn sheaf_error(entries: &[SheafEntry], err: SheafError) -> DocumentError {
  match &err {
    SheafError::Overlap { first, second, simplex } => DocumentError::invalid(
      format!("sheaf[{second}]"),
      format!(
        "pieces sheaf[{first}] ({}) and sheaf[{second}] ({}) overlap at simplex {simplex}",
        describe(&entries[*first].set),
        describe(&entries[*second].set)
      ),
    ),
    SheafError::EmptySupport(i) | SheafError::AmbientMismatch(i) => {
      DocumentError::invalid(format!("sheaf[{i}]"), err)
    }
    SheafError::NotLocallyCompact { piece, .. }
    | SheafError::Incompatible { piece, .. }
    | SheafError::Homology { piece, .. } => DocumentError::invalid(format!("sheaf[{piece}]"), err),
  }
}

fn function_error(entries: &[FunctionEntry], err: CalculusError) -> DocumentError {
  let index_of = |value: i64| entries.iter().rposition(|e| e.value == value);
  match &err {
    CalculusError::OverlappingLevels { second, .. }
    | CalculusError::NotLocallyCompact { value: second, .. } => match index_of(*second) {
      Some(i) => DocumentError::invalid(format!("function[{i}]"), err),
      None => DocumentError::invalid("function", err),
    },
    _ => DocumentError::invalid("function", err),
  }
}

/// The bundled five-piece example, as shipped in `data/paper_example.json`.
pub const PAPER_EXAMPLE: &str = include_str!("../data/paper_example.json");

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn minimal_document() {
    let inst = parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1,2]]}"#).unwrap();
    assert_eq!(inst.complex.len(), 7);
    assert_eq!(inst.map.vertex_images(), &[0, 1, 2]);
  }

  #[test]
  fn syntax_errors_carry_position() {
    let err = parse_instance("{\n  \"vertex_count\": 3,\n  \"maximal\": [[0,1,]\n}").unwrap_err();
    assert!(matches!(err, DocumentError::Syntax { line: 3, .. }), "{err:?}");
    let err = parse_instance(r#"{"vertex_count": 3, "maximal": [], "extra": 1}"#).unwrap_err();
    assert!(matches!(err, DocumentError::Syntax { .. }));
  }

  #[test]
  fn out_of_range_image_names_field() {
    let err = parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1,2]], "map": [0, 7, 2]}"#).unwrap_err();
    assert_eq!(err.path(), Some("map[1]"));
    let err =
      parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1],[1,2]], "map": [0, 2, 0]}"#).unwrap_err();
    assert_eq!(err.path(), Some("map"));
  }

  #[test]
  fn bad_maximal_and_sets() {
    let err = parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1],[2,1]]}"#).unwrap_err();
    assert_eq!(err.path(), Some("maximal[1]"));
    let err = parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1],[2,4]]}"#).unwrap_err();
    assert_eq!(err.path(), Some("maximal[1]"));
    let err = parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1],[2]], "sets": {"A": [[0],[1,2]]}}"#)
      .unwrap_err();
    assert_eq!(err.path(), Some("sets.A[1]"));
    let err =
      parse_instance(r#"{"vertex_count": 3, "maximal": [[0,1]], "sheaf": [{"set": "B", "rank": 1}]}"#)
        .unwrap_err();
    assert_eq!(err.path(), Some("sheaf[0].set"));
  }

  #[test]
  fn overlapping_sheaf_pieces_name_both() {
    let text = r#"{"vertex_count": 3, "maximal": [[0,1,2]],
      "sets": {"A": [[0,1]], "B": [[0,1],[0,1,2]]},
      "sheaf": [{"set": "A", "rank": 1}, {"set": "B", "rank": 2}]}"#;
    let err = parse_instance(text).unwrap_err();
    assert_eq!(err.path(), Some("sheaf[1]"));
    let message = err.to_string();
    assert!(
      message.contains("sheaf[0]") && message.contains("\"A\"") && message.contains("\"B\""),
      "{message}"
    );
  }

  #[test]
  fn function_errors() {
    let text = r#"{"vertex_count": 3, "maximal": [[0,1,2]],
      "function": [{"value": 1, "set": [[0,1]]}, {"value": 2, "set": [[0,1]]}]}"#;
    assert_eq!(parse_instance(text).unwrap_err().path(), Some("function[1]"));
    let text = r#"{"vertex_count": 3, "maximal": [[0,1,2]], "function": [{"value": 0, "set": [[0]]}]}"#;
    assert_eq!(parse_instance(text).unwrap_err().path(), Some("function[0]"));
  }

  #[test]
  fn bundled_example_round_trips() {
    let inst = parse_instance(PAPER_EXAMPLE).unwrap();
    let text = inst.to_document().to_json();
    let again = parse_instance(&text).unwrap();
    assert_eq!(inst, again);
    assert_eq!(again.to_document().to_json(), text);
  }
}
