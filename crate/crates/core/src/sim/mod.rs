//! Discrete-event simulation of a mobile network running the discovery
//! protocol.

pub mod catalog;
pub mod config;
pub mod energy;
pub mod engine;
pub mod matrix;
pub mod metrics;
pub mod mobility;
pub mod workload;

pub use catalog::Catalog;
pub use config::{ConfigError, CorrelationSource, SimConfig};
pub use engine::{run, Links, Placement, RunOutput, Scenario, Simulation, TraceKind, TraceRecord, Workload};
pub use matrix::CorrelationMatrix;
pub use metrics::MetricsReport;
pub use workload::{ScheduledRequest, WorkloadKind};
