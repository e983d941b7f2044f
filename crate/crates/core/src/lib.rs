//! ktrunc: a numerical engine for extremal sums of fractional integrals over
//! orthogonal subspace frames.
//!
//! The operators act on bounded scalar fields u via principal-value integrals
//! J_V u(x) over affine subspace slices with kernel |z|^{-(dim V + 2s)},
//! summed over the mutually orthogonal blocks of a partitioned orthonormal
//! frame and extremized (sup or inf) over all such frames. They interpolate
//! between one-directional fractional derivatives and the fractional
//! Laplacian, and converge to the truncated Laplacians (partial sums of
//! Hessian eigenvalues) as s -> 1.
//!
//! The crate provides:
//! - exact scalar constants and their s -> 1 calibration ([`kernels`]),
//! - frame sampling and retraction on the partitioned Stiefel manifold
//!   ([`frames`]),
//! - a catalog of analytic fields with known operator values plus
//!   grid-backed fields ([`fields`], [`grid`]),
//! - singular quadrature for the subspace integrals ([`quadrature`]),
//! - extremal operator evaluation with structured candidate seeding
//!   ([`operators`]),
//! - a monotone Dirichlet solver with barrier envelopes, Hopf fits, and
//!   principal-eigenvalue bounds ([`dirichlet`], [`eigen`]),
//! - the verification campaign behind the `ktrunc` CLI ([`verify`]).

pub mod error;
pub mod linalg;
pub mod kernels;
pub mod frames;
pub mod sphere;
pub mod fields;
pub mod grid;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
