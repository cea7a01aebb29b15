//! Quadratic residue patterns modulo a prime, and the curves, surfaces and
//! graphs whose point counts control them.
//!
//! Everything is exact integer or dyadic arithmetic except the statistics in
//! [`stats`], which work in `f64`.

pub mod curves;
pub mod dyadic;
pub mod error;
pub mod ffield;
pub mod graphs;
pub mod patterns;
pub mod stats;
pub mod surfaces;
pub mod verify;

pub use curves::{CurveSpec, FieldDegree, JacobsthalPair, TraceRecord};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use ffield::{PrimeModulus, QuadExt, ResidueTable};
pub use graphs::{FourGraph, GammaPolynomial, GammaSample, GraphCountRecord};
pub use patterns::{BoundaryCorrection, Letter, PatternCountRecord, PatternWord};
pub use stats::{ClassFilter, EmpiricalDistribution, ReferenceMeasure, TraceSample};
pub use surfaces::{QuarticTwists, SurfaceCountRecord};
pub use verify::{Fault, Suite, SuiteReport, VerifyOptions};
