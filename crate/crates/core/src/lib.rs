//! Numerical laboratory for Carleman-type weight sequences and the division
//! estimates they control.
//!
//! - [`weights`]: weight sequences M = (M_j), kept in the log domain, with
//!   regularity diagnostics (log-convexity, the product inequality, moderate
//!   growth, strong non-quasianalyticity).
//! - [`assoc`]: the associated function h_M(t) = inf_j t^j M_j, recovery of
//!   M_j from it, and doubling/bracketing witnesses.
//! - [`series`]: exact truncated multivariate Taylor expansions over
//!   arbitrary-precision rationals: recentering, products, reciprocals,
//!   derivative extraction.
//! - [`geometry`]: rational zero sets, exact squared distances, probe grids
//!   with nesting refinement.
//! - [`lojasiewicz`]: growth profiles and envelope fits for derivatives of
//!   reciprocals near a zero set, an axis probe family with closed-form
//!   derivatives, and a certification pipeline for products with a flat
//!   factor.
//! - [`flatness`]: the flat model exp(-x^(-1/alpha)) and its quotient by the
//!   coordinate function.
//!
//! Determinism is a hard requirement here: all transcendental kernels route
//! through `libm` (so `std` vs `no_std` builds agree bit for bit), exact
//! arithmetic uses big rationals, iteration orders are fixed, and no
//! hash-based containers appear anywhere.
//!
//! The crate is `no_std`-compatible (`alloc` required); the `std` feature
//! only adds `std::error::Error` impls for the error types.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod assoc;
pub mod flatness;
pub mod geometry;
pub mod lojasiewicz;
pub mod math;
pub mod series;
pub mod weights;
