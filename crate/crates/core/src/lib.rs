//! Domino shuffling on the dP3 lattice.
//!
//! Builds the diamond graphs `D_m`, grows and samples their perfect matchings
//! with the shuffle, computes height functions, and checks the matching counts
//! and three-variable generating functions against independent oracles.

pub mod diamond;
pub mod enumerate;
pub mod error;
pub mod genfun;
pub mod height;
pub mod json;
pub mod lattice;
pub mod matching;
pub mod order;
pub mod render;
pub mod shuffle;
pub mod verify;

pub use diamond::{build_diamond, matching_size, Diamond, SizeReport};
pub use error::{Error, Result};
pub use height::{height_function, HeightFunction};
pub use lattice::{LatticePoint, Orientation, Square};
pub use matching::Matching;
pub use order::Order;

/// Generating-function polynomials with exact integer coefficients.
pub type ZPoly = genfun::LaurentPoly<num_bigint::BigInt>;

/// Integer type used for Kasteleyn determinants.
pub type KasteleynInt = num_bigint::BigInt;

/// Floating-point type used for drawing.
pub type Coord = f64;
