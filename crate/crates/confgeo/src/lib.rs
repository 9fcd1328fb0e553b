//! Numerical toolkit for conformal geodesics of three-dimensional
//! metrics given as coordinate expressions.
//!
//! The crate integrates the third-order conformal geodesic equation,
//! computes Frenet-type curve invariants and the torsion Lagrangian
//! `L = l V / A^2`, and verifies its variational properties (order of
//! the Euler-Lagrange equation, rank of its symbol, on-shell vanishing,
//! and conformal divergence identities) by exact truncated-Taylor
//! arithmetic rather than symbolic algebra.
//!
//! Start with [`metric::MetricSpec`] for metric input, [`geodesics`]
//! for integration, [`frenet`] for invariants, [`variational`] and
//! [`conformal`] for the verification probes, and [`verify`] for the
//! packaged suites behind the `confgeo` command-line tool. The `book/`
//! directory of the repository walks through the same material chapter
//! by chapter.

pub mod conformal;
pub mod error;
pub mod expr;
pub mod frenet;
pub mod geodesics;
pub mod geometry;
pub mod linalg;
pub mod metric;
pub mod num;
pub mod variational;
pub mod verify;

mod guide;

pub use error::{Error, Result};
