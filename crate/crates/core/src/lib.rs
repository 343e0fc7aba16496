//! Finite optimal measurements for estimating N copies of an unknown pure
//! qubit state, built from quadrature rules on the sphere.
//!
//! A weighted point set {(Ω_k, w_k)} that integrates every spherical
//! harmonic of degree ≤ N exactly yields the measurement
//! {c_k |Ω_k⟩⟨Ω_k|^{⊗N}} with c_k = (N+1) w_k / 4π, whose average fidelity
//! reaches the optimum (N+1)/(N+2). The crate builds such rules
//! ([`quadrature::product_rule`]), certifies arbitrary point sets
//! ([`quadrature::certify`]), verifies the resulting measurements
//! ([`povm`]) and plays the estimation game by Monte Carlo ([`simulator`]).

// `!(x > 0.0)` is used on purpose so NaN is rejected too; the recurrences
// index several parallel arrays by degree.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod harmonics;
pub mod orthopoly;
pub mod polyhedra;
pub mod povm;
pub mod quadrature;
pub mod simulator;
pub mod sphere;
pub mod table;

pub use error::{Error, Result};
pub use harmonics::{harmonic_row, ylm, HarmonicIndex, HarmonicRow};
pub use orthopoly::{assoc_legendre, gauss_legendre_rule, legendre_eval, GaussLegendreRule};
pub use povm::{
    dicke_amplitudes, exact_score, mixed_legendre_bound, mixed_min_elements,
    operator_completeness_residual, povm_from_quadrature, scalar_completeness_residual,
    schur_moment_residual, subspace_completeness_residuals, DickeVector, FinitePovm, PovmElement,
};
pub use quadrature::{
    certify, detect_strength, ingest_pointset, lebedev_count, product_rule, CertificationReport,
    SphericalQuadrature, WeightMode, WeightedPoint,
};
pub use simulator::{run_game, score_by_direction, SimulationReport};
pub use sphere::{overlap_sq, Direction, Rotation, SphereSampler, UnitVector};
