//! Classification of rational transfer functions as negative imaginary,
//! strictly negative imaginary, positive real or weakly strictly positive
//! real, and stability certificates for their feedback interconnections.

pub mod error;
pub mod interconnect;
pub mod lticore;
pub mod netlist;
pub mod physical;
pub mod properties;
pub mod simoracle;

pub use error::{Error, Result};
