pub mod cli;
pub mod error;
pub mod harness;
pub mod io;
pub mod msf;
pub mod numcore;
pub mod scalarfact;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex64;
