//! Gaussian processes with singular covariance: covariance models, singular
//! norms, pathwise integrals and Monte Carlo checks of the calculus built on
//! them.

pub mod models;
pub mod quadrature;
pub mod piecewise;
pub mod norms;
pub mod hermite;
pub mod integrals;
pub mod simulation;
pub mod smooth;
pub mod verification;
pub mod cli;
