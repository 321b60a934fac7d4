pub mod cli;
pub mod config;
pub mod deriv;
pub mod entanglement;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod special;
pub mod state;
pub mod taylor;
pub mod transforms;
pub mod wkb;

pub use error::{Error, Result};
pub use num_complex::Complex64;
