use thiserror::Error;

use crate::time::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    /// Raised when D_max is not larger than the one-way propagation delay.
    #[error("delay bound unsatisfiable for ONU {onu}: D_max {d_max} <= T_rtt/2 {half_rtt}")]
    DelayBoundUnsatisfiable {
        onu: usize,
        d_max: SimTime,
        half_rtt: SimTime,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A protocol invariant broke during a run. This always indicates a bug
    /// in the scheduler or the engine, never a property of the workload.
    #[error("protocol invariant violated at {at}: {what}")]
    Invariant { at: SimTime, what: String },
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
