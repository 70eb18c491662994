//! Numerical toolkit for the capacity pre-log of noncoherent, peak-power
//! limited fading channels with memory.
//!
//! * [`spectra`]: piecewise-constant spectral densities, autocovariances,
//!   zero-set measures and the spectral log-integral.
//! * [`toeplitz`] and [`eigen`]: Toeplitz covariances and the finite-n
//!   log-determinant rate that converges to the spectral log-integral.
//! * [`bounds`]: capacity lower/upper bounds, pre-log bounds and reports.
//! * [`processes`]: sample paths of the fading processes and the channel.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod processes;
pub mod spectra;
pub mod toeplitz;

pub use bounds::{BoundCurve, BoundKind, FadingModel, MarginalLaw, PrelogReport};
pub use error::{Error, Result};
pub use spectra::{AutocovarianceSeq, Segment, SpectralDensity};
pub use toeplitz::ToeplitzCov;
