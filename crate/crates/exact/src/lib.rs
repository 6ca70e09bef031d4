//! Exact arithmetic substrate: rationals, rational functions, nilpotent
//! extensions, sparse polynomials, truncated series and linear algebra.

pub mod error;
pub mod linalg;
pub mod mpoly;
pub mod multi;
pub mod parse;
pub mod ratfunc;
pub mod ring;
pub mod scalar;
pub mod series;

pub use error::{ExactError, Result};
pub use linalg::{KernelImage, QMatrix, QuotientSpace};
pub use mpoly::MPoly;
pub use multi::Mi;
pub use ratfunc::RatFunc;
pub use ring::{q, qf, Dual, DiffRing, Local, Ring, Q};
pub use scalar::Scalar;
pub use series::{invert_map, series_compose, series_invert, Series, Shape, TruncSeries};
