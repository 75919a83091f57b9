//! Evaluation stack for volumetric segmentation challenges: NRRD volume I/O,
//! overlap/surface-distance metrics, stochastic test-set augmentation,
//! Sobol'-index robustness scoring, weighted rank aggregation, and
//! surface/tetrahedral mesh quality assessment.

pub mod augment;
pub mod error;
pub mod grid;
pub mod harness;
pub mod mesh;
pub mod metrics;
pub mod nrrd;
pub mod ranking;
pub mod sensitivity;

pub use error::{Error, Result};
