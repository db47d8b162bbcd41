//! Posets of full expansion classes for generalised Thompson groups, exact
//! rational homology of their order complexes, and the bookkeeping that
//! turns those computations into statements about group homology.

pub mod arith;
pub mod bigjson;
pub mod bitset;
pub mod conj;
pub mod error;
pub mod fj;
pub mod homology;
pub mod les;
pub mod matching;
pub mod poset;
pub mod signature;
pub mod stein;
pub mod zfn;

pub use error::{Error, Result};
pub use homology::{betti_reduced, BettiVector};
pub use poset::{ComplexDump, FinitePoset, OrderComplex, OrderViolation, PosetDump};
pub use signature::{derived_constants, ColourSet, ColourSignature, DerivedConstants};
pub use conj::{reconcile_counts, weyl_group, CountingConvention, OrbitTypeVector};
pub use fj::{centralizer_poincare, fj_summand_indices, fj_total_dimension, PoincarePolynomial, ThetaDimsTable};
pub use les::{derive_2v, derive_vanishing, Derivation, VanishingCertificate};
pub use stein::{build_z_poset, cross_validate_quillen, QuillenReport};
pub use zfn::{build_zfn_poset, contractibility_dichotomy, zfn_betti, zfn_dimension, FullClass, ZfnPoset};
