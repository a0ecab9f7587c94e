//! Smoothed prime-power and zeta-zero measures, band-limited probes, the
//! explicit-formula pairings between them and transport-type bounds on their
//! discrepancy, at desk scale.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases at
//! the crate root fix the scalar to `f64`, which is what the tolerances in the
//! documentation refer to.

pub mod calibration;
pub mod error;
pub mod explicit_formula;
pub mod grid;
pub mod kernels;
pub mod measures;
pub mod pipeline;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod summation;
pub mod transport;
pub mod zerodata;

pub use error::{Error, Result};
pub use grid::{GridSpec, GriddedDensity};
pub use kernels::{EtaFamily, Kernel, KernelFamily};
pub use measures::{AtomicMeasure, FluctuationReport};
pub use scalar::Real;
pub use zerodata::{ZeroSource, ZeroTable};

pub type Kernel64 = Kernel<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type GriddedDensity64 = GriddedDensity<f64>;
pub type AtomicMeasure64 = AtomicMeasure<f64>;
