//! Numerical tools for harmonic and quasiregular maps of the unit disk:
//! truncated power series, boundary signals and their conjugates, integral
//! means, exponent fits and a catalog of test families.

pub mod analysis;
pub mod boundary;
pub mod catalog;
pub mod error;
mod fft;
pub mod means;
pub mod series;
pub mod verify;

pub use num_complex::Complex64;

pub use analysis::{FitModel, FitReport, RadiusWindow, RatioReport};
pub use boundary::{BoundarySignal, FourierCoeffs};
pub use catalog::{ExampleSpec, Subject};
pub use error::{HqrError, Result};
pub use means::{CircleResolution, CircleSubject, Part, RadialProfile};
pub use series::{AnalyticSeries, HarmonicMap, QrReport};
