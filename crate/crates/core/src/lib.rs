//! Copula regression for continuous and binary responses.
//!
//! Continuous responses are handled by semi-parametric pseudo-maximum
//! likelihood: kernel-smoothed margins, a parametric copula, and the
//! conditional mean computed from the copula density. Binary responses are
//! modelled through a latent success probability `Z` coupled to the
//! covariates by a copula, fitted by Monte-Carlo score-gradient ascent.
//! [`simlab`] holds the simulation designs, baselines and metrics used to
//! benchmark both.

pub mod bocr;
pub mod copula;
pub mod data;
pub mod error;
pub mod kendall;
pub mod marginals;
pub mod model_io;
pub mod quadrature;
pub mod regression;
pub mod simlab;
pub mod special;

pub use bocr::{BocrModel, FitConfig, FitTrace, Pooling};
pub use copula::{project_params, CopulaParams, CopulaSpec, Family, PseudoObservation};
pub use data::Dataset;
pub use error::{Error, Result};
pub use marginals::{fit_empirical, LatentParams, MarginalModel};
pub use regression::{CrModel, EvalSet};
