//! Handover decision algorithms and the per-UE execution state machine.

pub mod decision;
pub mod machine;

pub use decision::{
    decide_proposed, decide_rss, decide_rss_pathloss, decide_speed, inbound_rss, outbound_rss,
    shannon_capacity_bps, Candidate, Decision, DecisionConfig, DecisionInput, Mode, Reason,
    Verdict, PROPOSED_GATE_ORDER,
};
pub use machine::{apply_ttt_and_execute, Counters, EventKind, HandoverState, HoEvent, Timing};
