//! Exact algebra of Jacobi diagrams on few strands, Drinfeld associators,
//! Lie-algebra weight systems and the graded Grothendieck-Teichmuller Lie algebra.

pub mod associators;
pub mod diagrams;
pub mod error;
pub mod grt;
pub mod kohno;
pub mod kontsevich;
pub mod lie;
pub mod linalg;
pub mod modular;
pub mod scalar;
pub mod series;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::{FormalScalar, Rat, Symbol};
