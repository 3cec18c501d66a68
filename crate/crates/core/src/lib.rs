//! Reflection-symmetry detection from products of complex wavelet
//! convolutions.
//!
//! A *stencil* is a pair of Morlet wavelets mounted at `p ± (d/2)(cos α, sin α)`
//! with carriers tilted by `±β` around the perpendicular to the line joining
//! them. The conjugate product of the two responses is phase-coherent when
//! the image is mirror-symmetric about the line through `p` perpendicular to
//! the stencil. Sweeping `(α, β, d)` and accumulating those products yields
//!
//! * a Hough-like `(ρ, δ)` accumulator whose peaks are symmetry lines
//!   ([`symmetry::accumulate_lines`], [`detect::extract_lines`]),
//! * along-line vote histograms whose Haar response brackets the symmetric
//!   object ([`detect::extract_segments`]),
//! * with `β = 0` and `d` near a diameter, an image-space map whose peaks are
//!   centers of near-circular shapes ([`symmetry::accumulate_centers`]).
//!
//! [`eval`] scores detections against ground-truth segments.

pub mod conv;
pub mod detect;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod symmetry;
pub mod synth;
pub mod wavelets;

pub use conv::{BorderMode, ComplexMap, Image};
pub use detect::{Center, PeakParams, SymmetryLine, SymmetrySegment};
pub use error::{Error, Result};
pub use geometry::Point;
pub use symmetry::{CenterLikelihoodMap, LineAccumulator, StencilConfig, SweepParams};
pub use wavelets::{HaarKernel, MorletKernel, WaveletGeometry};
