//! Exact calculus of bounded-variation functions on compact metric graphs:
//! jump-aware total variation and perimeter, Cheeger constants and cuts with
//! max-flow/min-cut duality certificates, 1-Laplacian eigenpairs, and the
//! spectral gap of the standard Kirchhoff Laplacian.
//!
//! All combinatorial quantities are computed in exact rational arithmetic;
//! only the spectral module uses binary64 floats.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

#[cfg(test)]
pub(crate) mod testutil;

pub mod cheeger;
pub mod duality;
pub mod field;
pub mod function;
pub mod graph;
pub mod lp;
pub mod measures;
pub mod rational;
pub mod spectral;
pub mod subset;

pub use cheeger::{
    cheeger_cut, cheeger_within, is_calibrable, path_convexity_probe, ratio, rayleigh_tv,
    CheegerError, CheegerOptions, CheegerResult, CutPattern, RayleighMode, SegTag,
};
pub use duality::{
    construct_eigenpair_from_cut, dual_extreme_field, dual_feasible, dual_flow, dual_norm,
    verify_eigenpair, CheegerCertificate, DualNormOutcome, DualityError, Eigenpair,
    EigenRejection, VerifyOutcome,
};
pub use field::VectorFieldZ;
pub use function::{MedianSet, PiecewiseFunction};
pub use graph::{EdgeEnd, GraphError, MetricGraph, VertexClass};
pub use lp::{Cmp, LinearProgram, LpError, LpOutcome};
pub use measures::{
    coarea_residual, du_total, green_residual, jump_variation, perimeter, total_variation,
    MeasureError,
};
pub use rational::Rat;
pub use subset::{Arc, GraphSubset, SubsetError};
