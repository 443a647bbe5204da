//! Simulation designs, baselines, metrics and the replication harness.

pub mod baselines;
pub mod bench;
pub mod dgp;
pub mod experiment;
pub mod metrics;

pub use baselines::{fit_logit, fit_ols, LogitFit, OlsFit};
pub use bench::{run_table, BenchOverrides, TableId, TableReport};
pub use dgp::{generate, DgpId};
pub use experiment::{run_experiment, Convention, ExperimentConfig, Method, MethodResult, Metrics, MetricsReport};
pub use metrics::{auc, ks_stat};
