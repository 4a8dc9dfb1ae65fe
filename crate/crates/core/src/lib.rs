//! Discrete harmonic-analysis operators on product rectangles `R = I1 × I2`
//! and verification of biparametric Poincaré-type inequalities.
//!
//! The crate discretizes a rectangle (product of one- or two-dimensional
//! cubes) by a midpoint grid and implements, over the grid-aligned rectangle
//! family:
//!
//! - the slice fractional integrals of order 1 and their composition `T`
//!   ([`fractional`]);
//! - slice, strong and dual maximal operators with empirical operator-norm
//!   estimation ([`maximal`]);
//! - Muckenhoupt `A_p`/`A_1` constants, slice constants and the dual-weight
//!   identity ([`weights`]);
//! - the non-standard oscillation `π_R(f)` and mixed-gradient fields
//!   ([`oscillation`]);
//! - per-inequality verification reports and weight sweeps ([`verify`]);
//! - the Rubio de Francia iteration and its properties ([`extrapolation`]).
//!
//! Brute-force reference implementations live in [`oracle`] and back the
//! fast paths in the test suites.
//!
//! With the default `parallel` feature the data-parallel kernels run on
//! rayon; disabling it gives a sequential build with bitwise-identical
//! results (every parallel site is a max-reduction or writes disjoint
//! outputs).

pub mod error;
pub mod exec;
pub mod extrapolation;
pub mod fractional;
pub mod grid;
pub mod maximal;
pub mod oracle;
pub mod oscillation;
pub mod sat;
pub mod verify;
pub mod weights;

pub use error::{CoreError, Result};
pub use grid::{build_product_grid, integrate, lp_norm, sample, weak_lp_norm};
pub use grid::{Axis, AxisGrid, Cube, GridFn, Point, ProductGrid, Rect};
