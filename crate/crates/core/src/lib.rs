//! Coisotropic Ekeland–Hofer capacities of convex bodies.
//!
//! The capacity `c^{n,k}(D)` of a convex body `D` in `R^{2n}` is the minimal
//! positive action of a leafwise chord on `∂D`: a characteristic on the
//! boundary that starts and ends in the coisotropic subspace `R^{n,k}` with
//! endpoints differing by a vector of `V0`. This crate computes it by
//! minimizing the Clarke dual functional over truncated Fourier loops, and
//! provides closed-form spectra and capacity formulas to check against.
//!
//! ```
//! use coiso_core::{minimize_capacity, Body, CoisoIndex, SolverOptions};
//!
//! let ball = Body::ball(2, 1.0).unwrap();
//! let idx = CoisoIndex::new(2, 1).unwrap();
//! let opts = SolverOptions { modes: 8, starts: 4, ..Default::default() };
//! let est = minimize_capacity(&ball, idx, &opts).unwrap();
//! assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod body;
pub mod calculus;
pub mod dual;
pub mod error;
pub mod fourier;
pub mod spectrum;
pub mod symplectic;

pub use body::{Body, BodySpec, DualEstimate, Smoothness};
pub use calculus::{
    axiom_harness, axiom_harness_with, closed_form_capacity, disc_capacity,
    nontriviality_constants, product_capacity, product_index_chain, AxiomReport, FactorCapacity,
};
pub use dual::{
    dual_functional, minimize_capacity, reconstruct_chord, verify_chord, CapacityEstimate, Chord,
    ChordReport, DualProblem, SolverOptions, VerifyTolerances,
};
pub use error::{Error, Result};
pub use fourier::FourierLoop;
pub use spectrum::{
    ellipsoid_min_action, ellipsoid_spectrum, planar_chord_actions, w_domain_curve, PlanarCurve,
    Spectrum, WDomain,
};
pub use symplectic::{
    apply_j, in_sp2nk, leaf_equivalent, omega0, project, sp2nk_sample, CoisoIndex, PhasePoint,
    Subspace, SympMatrix,
};
