//! Symbolic differential geometry and symmetry verification.
//!
//! The crate is organised as a stack:
//!
//! * [`expr`] — a self-contained symbolic expression kernel (parsing,
//!   printing, exact differentiation, substitution, canonical
//!   normalization, numeric evaluation, probabilistic zero testing).
//! * [`geometry`] — tensor calculus over a coordinate chart: curvature,
//!   the Laplace–Beltrami operator, Lie derivatives, covariant Hessians,
//!   conformal rescalings.
//! * [`symmetry`] — classification of vector fields against a metric
//!   (Killing / homothetic / special conformal / proper conformal) and
//!   verification of the symmetry constraint equations of Klein–Gordon
//!   and Schrödinger operators and of the Noether condition for
//!   classical Lagrangians.
//! * [`dynamics`] — the numeric back end: Euler–Lagrange extraction,
//!   fixed-step RK4 integration, first-integral drift measurement,
//!   pointwise PDE residuals and modified Bessel functions.
//! * [`catalog`] — a machine-readable library of metrics, vector
//!   fields, potentials, Lagrangians, first integrals and verification
//!   scenarios, each with sampling domains and default instantiations
//!   for arbitrary functions.
//!
//! Everything below [`catalog`] is pure: expressions are immutable and
//! all operations are functions from values to values, so the whole
//! stack is safe to share across threads. The crate is `no_std`
//! (`alloc` is required); float math goes through `libm`.

#![no_std]

extern crate alloc;

pub mod catalog;
pub mod dynamics;
pub mod expr;
pub mod geometry;
pub mod symmetry;

pub use expr::{Bindings, Expr, SampleDomain, ZeroOptions, ZeroVerdict};
pub use geometry::{Chart, Metric, PdeModel, VectorField};
pub use symmetry::{CkvClass, ConstraintReport, Lagrangian, PointSymmetry};
