//! Stability in many-to-one matching markets where firms may see workers
//! as complements: preference classification, matrix and hypergraph
//! balancedness certificates, stable matching search, the rounding of
//! stable fractional matchings, technology trees, and an exhaustive oracle.

pub mod balance;
pub mod bitset;
pub mod corpus;
pub mod error;
pub mod gen;
pub mod io;
pub mod model;
pub mod oracle;
pub mod prefs;
pub mod scalar;
pub mod solver;
pub mod techtree;

pub use balance::{
    is_balanced, is_totally_balanced, is_totally_unimodular, Certificate, Witness, ZeroOneMatrix, DEFAULT_CAP,
};
pub use bitset::{IndexSet, WorkerSet};
pub use error::{Error, Result};
pub use model::{Employer, FirmId, FirmPreference, Market, Matching, WorkerId};
pub use scalar::{ExactInteger, ExactScalar};
pub use solver::{find_stable_matching, solve, FractionalMatching, SolveOptions};
pub use techtree::TechnologyTree;

pub use num_bigint::BigInt;
pub use num_rational::{BigRational, Rational64};

/// Fractional matching over 64-bit rationals.
pub type Fractional = FractionalMatching<Rational64>;
/// Fractional matching over arbitrary-precision rationals.
pub type BigFractional = FractionalMatching<BigRational>;
