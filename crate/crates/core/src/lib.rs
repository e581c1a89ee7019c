//! Deterministic two-tier macro/femtocell LTE handover simulator.
//!
//! A single macro eNB overlays a building of apartments, each hosting
//! closed-access femto access points. UEs walk randomly, measure every cell
//! each tick and one of four handover algorithms decides when to move them
//! between tiers. Runs are reproducible from a seed regardless of thread
//! count.
//!
//! ```
//! use femtoho::{run, Algorithm, SimConfig};
//!
//! let cfg = SimConfig {
//!     algorithm: Algorithm::Proposed,
//!     sim_duration_s: 2.0,
//!     ..SimConfig::default()
//! };
//! let (events, report) = run(&cfg).unwrap();
//! assert!(report.fap_assignment_probability >= 0.0);
//! assert!(events.to_csv().starts_with("tick,ue_id,event"));
//! ```

pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod filtering;
pub mod handover;
pub mod metrics;
pub mod mobility;
pub mod plot;
pub mod propagation;
pub mod rng;
pub mod scenario;

pub use config::{Admission, Algorithm, SimConfig};
pub use engine::{
    replay_two_cell_trace, run, run_algorithms, run_replications, run_replications_with,
    run_scenario, sweep, with_threads, AlgorithmRun, Event, EventLog, TraceOutcome,
};
pub use error::{Error, Result};
pub use handover::{Decision, DecisionConfig, DecisionInput, EventKind, Mode, Reason, Verdict};
pub use metrics::{Metric, MetricsReport, SweepRow, SweepTable};
pub use propagation::PropagationModel;
pub use scenario::{build_scenario, CellId, Scenario, UeId};
