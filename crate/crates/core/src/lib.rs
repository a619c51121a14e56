//! Geometric complexity of unitaries and open-system quantum channels.
//!
//! Operators are dense complex matrices. Composite spaces use the
//! `system ⊗ environment` ordering with the system as the slow index.

pub mod coherence;
pub mod complexity;
pub mod dilation;
pub mod error;
pub mod geometry;
pub mod gksl;
pub mod interchange;
pub mod intrinsic;
pub mod operator;
pub mod pauli;
pub mod random;
pub mod report;
pub mod spectral;
pub mod tolerance;

pub use error::{GqcError, Result};
pub use operator::{ComplexMatrix, DensityOperator, HermitianOperator, UnitaryOperator};
pub use tolerance::ToleranceConfig;
