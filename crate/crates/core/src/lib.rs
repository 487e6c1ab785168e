//! Discrete-event simulation of energy-efficient upstream scheduling in
//! TWDM passive optical networks.

pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod schedule_book;
pub mod scheduler;
pub mod time;
pub mod traffic;
pub mod types;

pub use config::{DelayPolicy, SchedulerKind, SimConfig, TrafficKind};
pub use engine::{run, run_observed, Grant};
pub use error::{Result, SimError};
pub use metrics::{eta_max, RunStats};
pub use time::SimTime;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/timing.md")]
    pub mod timing {}
    #[doc = include_str!("../../../book/src/scheduler.md")]
    pub mod scheduler {}
    #[doc = include_str!("../../../book/src/receivers.md")]
    pub mod receivers {}
    #[doc = include_str!("../../../book/src/traffic.md")]
    pub mod traffic {}
}
