//! Reference fitters and the synthetic ground truth used to check them.

mod brute;
mod elicit;
mod eta;

pub use brute::{brute_force_fit, BruteForceResult, GridAxis, GridSpec, DEFAULT_MAX_POINTS};
pub use elicit::{
    compare_to_oracle, consistency_rho, elicit, ElicitConfig, ElicitationReport, OracleComparison,
};
pub use eta::{EtaConfig, EtaSampler};

pub(crate) use eta::softmax;
