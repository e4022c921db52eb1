//! Combinatorial and sheaf-theoretic Lefschetz numbers of simplicial self-maps, computed in
//! exact arithmetic, together with integration of constructible functions against the
//! Lefschetz number.
//!
//! The pieces, bottom up:
//!
//! * [`complex`]: finite simplicial complexes and open simplex sets (incomplete subcomplexes).
//! * [`simpmap`]: simplicial self-maps and their induced chain-level coefficients.
//! * [`lefschetz`]: the combinatorial Lefschetz number `Λ_c(U, g)`.
//! * [`homology`]: compactly supported homology over ℚ and the trace of the induced map.
//! * [`sheaf`]: constructible sheaves in associated form and `L_c(X, g, F)`.
//! * [`calculus`]: constructible functions, the Lefschetz integral and Barrow's rule.
//! * [`document`]: the JSON instance format.
//! * [`verify`]: random instance generation and property suites.
//! * [`cli`]: the `lefschetz` command-line front end.

pub mod calculus;
pub mod cli;
pub mod complex;
pub mod document;
pub mod homology;
pub mod lefschetz;
pub mod linalg;
pub mod sheaf;
pub mod simpmap;
pub mod verify;

pub use calculus::{barrow, canonical_representation, integrate, ConstructibleFunction, Representation};
pub use complex::{OpenSimplexSet, Simplex, SimplexId, SimplicialComplex};
pub use homology::{homology_traces, l_hom, CompactSupportComplex, HomologySummary};
pub use lefschetz::lambda_c;
pub use sheaf::{
  associated_function, associated_sheaf, sheaf_lefschetz, ConstructibleSheaf, Part, SheafPiece,
};
pub use simpmap::SimplicialSelfMap;
