//! Numerical realization of the horospherical Radon transform on the
//! de Sitter surface Y = SL(2,R)/SO(1,1), with a group-case backend.
//!
//! The crate is organized bottom-up:
//!
//! * [`quadrature`] — adaptive Gauss-Kronrod integration, singular and
//!   whole-line variants, and weighted Fourier sums;
//! * [`sl2`] — the exact 2x2 layer: involutions, Iwasawa / polar / open-orbit
//!   decompositions, the variety norm, phi_0 and Theta;
//! * [`variety`] — the hyperboloid model of Y, its invariant measure, the
//!   wave operator, horocycle curves and translated charts;
//! * [`funcspace`] — concrete function families with decay metadata:
//!   discrete-series eigenfunctions, Gaussian bumps, Schwartz seminorms;
//! * [`radon`] — the Radon transform, its translates, the dual transform and
//!   the associated convergence/decay diagnostics;
//! * [`spectral`] — the A-Fourier transform, open-orbit Poisson functionals,
//!   the Fourier transform on Y and the Fourier-Radon identity;
//! * [`groupcase`] — SL(2,R) viewed as a symmetric space under left-right
//!   translation: double-unipotent transform and Fubini mechanics;
//! * [`verify`] — the named verification suites driven by the CLI and the
//!   acceptance tests.

pub mod error;
pub mod quadrature;
pub mod sl2;
pub mod variety;
pub mod funcspace;
pub mod radon;
pub mod spectral;

pub use error::{Error, Result};
