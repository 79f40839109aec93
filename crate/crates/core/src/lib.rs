//! Risk measures on finite probability spaces, their combinations over
//! scenario sets, and oracle checks of the resulting dual and ES-mixture
//! representations.

pub mod cli;
pub mod combinators;
pub mod duality;
pub mod elicit;
pub mod error;
pub mod kusuoka;
pub mod lp;
pub mod measures;
pub mod orders;
pub mod prob;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod suite;
pub mod workspace;

pub use error::{Error, Result};
