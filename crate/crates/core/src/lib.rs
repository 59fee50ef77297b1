//! Concurrence homology.
//!
//! Binary observations are turned into a descending filtration of simplicial
//! complexes: the frame at frequency level `f` holds every set of variables
//! that is simultaneously active in at least `f` observations. Holes in the
//! frames, measured by persistent homology over Z/2, reflect weak or negative
//! high-order association among the variables.
//!
//! The crate is organised as a pipeline:
//!
//! * [`signal`]: robust-CV variable dropping, time- and Fourier-domain dichotomization.
//! * [`complex`]: concurrence counts, the filtered complex, contingency and log-linear checks.
//! * [`persistence`]: the persistence diagram, single-frame Betti numbers, plots.
//! * [`summaries`]: moments of a diagram and Euler characteristics of frames.
//! * [`localization`]: short cycles, narrow and adjacent classes, cycle lifespans.
//! * [`nullmodel`]: synthetic fixtures.

pub mod complex;
pub mod error;
pub mod gf2;
pub mod localization;
pub mod matrix;
pub mod nullmodel;
pub mod persistence;
pub mod signal;
pub mod summaries;

pub use complex::{build_filtered_complex, BuildOptions, FilteredComplex, Simplex};
pub use error::{Error, Result};
pub use localization::{ChainGF2, ShortCycleRecord};
pub use matrix::{BinaryMatrix, SeriesMatrix};
pub use persistence::{compute_persistence, PersistenceDiagram, PersistencePair};
pub use summaries::MomentVector;
