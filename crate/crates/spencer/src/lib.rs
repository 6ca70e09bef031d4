//! Jet groupoids of Lie groupoid models, algebroid brackets, and the linear
//! and nonlinear Spencer operators, all evaluated in exact arithmetic.

pub mod action;
pub mod algebroid;
pub mod brackets;
pub mod checks;
pub mod coef;
pub mod error;
pub mod groupoid;
pub mod jet;
pub mod nijenhuis;
pub mod nonlinear;
pub mod ptable;
pub mod random;

pub use algebroid::{AlgebroidChart, Chart, Violation};
pub use error::{Error, Result};
