//! Scattering of one- and two-photon wavepackets on a single two-level atom
//! in a one-dimensional propagation model.
//!
//! - [`response`] applies the analytic response kernels and holds the
//!   rectangular-pulse closed forms.
//! - [`dynamics`] integrates the equations of motion in the lab frame and
//!   serves as an independent oracle for the kernels.
//! - [`spectral`] analyzes two-photon outputs in k-space.
//! - [`pairgen`] models weak coherent inputs and photon-pair generation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod pairgen;
pub mod params;
pub mod pulse;
pub mod response;
pub mod spectral;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use fourier::{
    local_fourier_1d, local_fourier_2d, local_fourier_2d_with_cutoff, KDecomposition,
};
pub use grid::{
    inner_product, l2_distance, max_abs_difference, Axis, Grid1D, Grid2D, Wavefunction,
};
pub use params::PhysicalParams;
