//! The four handover decision algorithms.
//!
//! All four see the same [`DecisionInput`] and return a [`Decision`]. They
//! are pure functions; timing (time-to-trigger, execution delay) is handled
//! by [`super::machine`].

use std::fmt;

use crate::config::{Admission, Algorithm, SimConfig};
use crate::mobility::{speed_class, SpeedClass};
use crate::scenario::{CellId, CellKind, Traffic, UeId};

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionConfig {
    pub hmm_db: f64,
    pub s_f_th_dbm: f64,
    pub rsrp_th_f_dbm: f64,
    pub speed_low_kmh: f64,
    pub speed_high_kmh: f64,
    pub ttt_reactive_s: f64,
    pub proactive_margin_reduction_db: f64,
    pub sinr_min_db: f64,
    pub exec_delay_s: f64,
    pub pingpong_window_s: f64,
    pub ho_failure_threshold_dbm: f64,
    pub admission: Admission,
    pub bandwidth_hz: f64,
}

impl Default for DecisionConfig {
    fn default() -> Self {
        Self::from_config(&SimConfig::default())
    }
}

impl DecisionConfig {
    pub fn from_config(cfg: &SimConfig) -> Self {
        DecisionConfig {
            hmm_db: cfg.hmm_db,
            s_f_th_dbm: cfg.s_f_th_dbm,
            rsrp_th_f_dbm: cfg.rsrp_th_f_dbm,
            speed_low_kmh: cfg.speed_low_kmh,
            speed_high_kmh: cfg.speed_high_kmh,
            ttt_reactive_s: cfg.ttt_reactive_s,
            proactive_margin_reduction_db: cfg.proactive_margin_reduction_db,
            sinr_min_db: cfg.sinr_min_db,
            exec_delay_s: cfg.exec_delay_s,
            pingpong_window_s: cfg.pingpong_window_s,
            ho_failure_threshold_dbm: cfg.ho_failure_threshold_dbm,
            admission: cfg.admission,
            bandwidth_hz: cfg.bandwidth_hz,
        }
    }

    /// Hysteresis margin applied under `mode`.
    pub fn margin(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Proactive => self.hmm_db - self.proactive_margin_reduction_db,
            Mode::Standard | Mode::Reactive => self.hmm_db,
        }
    }

    /// Time-to-trigger applied under `mode`.
    pub fn ttt_s(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Proactive => 0.0,
            Mode::Standard | Mode::Reactive => self.ttt_reactive_s,
        }
    }
}

/// One cell as seen by the deciding UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cell_id: CellId,
    pub kind: CellKind,
    pub raw_rsrp_dbm: f64,
    pub filtered_rsrp_dbm: f64,
    /// Combined femto/macro parameter; equals the filtered RSRP for the macro.
    pub combined_dbm: f64,
    pub path_loss_db: f64,
    /// SINR the UE would see if this cell served it.
    pub sinr_db: f64,
    pub in_whitelist: bool,
    pub load_ues: u32,
    pub capacity_ues: u32,
    pub heading_toward: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionInput {
    pub ue_id: UeId,
    pub serving: CellId,
    pub serving_kind: CellKind,
    pub candidates: Vec<Candidate>,
    pub speed_kmh: f64,
    pub traffic: Traffic,
    pub required_rate_bps: f64,
    pub sinr_serving_db: f64,
}

impl DecisionInput {
    pub fn speed_class(&self, cfg: &DecisionConfig) -> SpeedClass {
        speed_class(self.speed_kmh, cfg.speed_low_kmh, cfg.speed_high_kmh)
    }

    pub fn candidate(&self, id: CellId) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.cell_id == id)
    }

    pub fn macro_cell(&self) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.kind == CellKind::Macro)
    }

    /// Strongest whitelisted femto by filtered RSRP, other than the serving
    /// cell. Ties go to the earliest candidate.
    pub fn best_whitelisted_femto(&self) -> Option<&Candidate> {
        let mut best: Option<&Candidate> = None;
        for c in &self.candidates {
            if c.kind != CellKind::Femto || !c.in_whitelist || c.cell_id == self.serving {
                continue;
            }
            if best.is_none_or(|b| c.filtered_rsrp_dbm > b.filtered_rsrp_dbm) {
                best = Some(c);
            }
        }
        best
    }

    fn has_femto_candidate(&self) -> bool {
        self.candidates
            .iter()
            .any(|c| c.kind == CellKind::Femto && c.cell_id != self.serving)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Stay,
    HandoverTo(CellId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Reason {
    NoCandidate,
    SpeedReject,
    DirectionReject,
    AccessReject,
    BandwidthReject,
    SignalReject,
    SinrReject,
    PathLossReject,
    Triggered,
}

impl Reason {
    pub fn token(self) -> &'static str {
        match self {
            Reason::NoCandidate => "no-candidate",
            Reason::SpeedReject => "speed-reject",
            Reason::DirectionReject => "direction-reject",
            Reason::AccessReject => "access-reject",
            Reason::BandwidthReject => "bandwidth-reject",
            Reason::SignalReject => "rss-fail",
            Reason::SinrReject => "sinr-reject",
            Reason::PathLossReject => "pathloss-reject",
            Reason::Triggered => "triggered",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// Execution mode attached to a decision; selects margin and TTT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Full margin and TTT (the RSS-family algorithms).
    Standard,
    /// Reduced margin, no TTT (real-time traffic).
    Proactive,
    /// Full margin and TTT (non-real-time traffic).
    Reactive,
}

impl Mode {
    pub fn for_traffic(traffic: Traffic) -> Mode {
        if traffic.is_real_time() {
            Mode::Proactive
        } else {
            Mode::Reactive
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Mode::Standard => "standard",
            Mode::Proactive => "proactive",
            Mode::Reactive => "reactive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decision {
    pub verdict: Verdict,
    pub reason: Reason,
    pub mode: Mode,
}

impl Decision {
    pub fn stay(reason: Reason, mode: Mode) -> Self {
        Decision {
            verdict: Verdict::Stay,
            reason,
            mode,
        }
    }

    pub fn handover(target: CellId, mode: Mode) -> Self {
        Decision {
            verdict: Verdict::HandoverTo(target),
            reason: Reason::Triggered,
            mode,
        }
    }
}

/// Inbound test: above the femto threshold compare the combined parameter
/// against macro + margin, below it compare the femto RSRP directly.
pub fn inbound_rss(femto: &Candidate, macro_cell: &Candidate, threshold_dbm: f64, margin_db: f64) -> bool {
    let f = femto.filtered_rsrp_dbm;
    let m = macro_cell.filtered_rsrp_dbm;
    (f > threshold_dbm && femto.combined_dbm > m + margin_db) || (f < threshold_dbm && f > m + margin_db)
}

/// Outbound test, the mirror of [`inbound_rss`] for a femto-served UE.
pub fn outbound_rss(femto: &Candidate, macro_cell: &Candidate, threshold_dbm: f64, margin_db: f64) -> bool {
    let f = femto.filtered_rsrp_dbm;
    let m = macro_cell.filtered_rsrp_dbm;
    (f < threshold_dbm && f + margin_db < m) || (f > threshold_dbm && femto.combined_dbm < m + margin_db)
}

fn serving_and_macro(input: &DecisionInput) -> Option<(&Candidate, &Candidate)> {
    Some((input.candidate(input.serving)?, input.macro_cell()?))
}

pub fn decide_rss(input: &DecisionInput, cfg: &DecisionConfig) -> Decision {
    let mode = Mode::Standard;
    let Some((serving, macro_cell)) = serving_and_macro(input) else {
        return Decision::stay(Reason::NoCandidate, mode);
    };
    let hmm = cfg.margin(mode);
    match input.serving_kind {
        CellKind::Macro => {
            let Some(femto) = input.best_whitelisted_femto() else {
                return Decision::stay(Reason::NoCandidate, mode);
            };
            if inbound_rss(femto, macro_cell, cfg.s_f_th_dbm, hmm) {
                Decision::handover(femto.cell_id, mode)
            } else {
                Decision::stay(Reason::SignalReject, mode)
            }
        }
        CellKind::Femto => {
            if outbound_rss(serving, macro_cell, cfg.s_f_th_dbm, hmm) {
                Decision::handover(macro_cell.cell_id, mode)
            } else {
                Decision::stay(Reason::SignalReject, mode)
            }
        }
    }
}

pub fn decide_rss_pathloss(input: &DecisionInput, cfg: &DecisionConfig) -> Decision {
    let mode = Mode::Standard;
    let Some((serving, macro_cell)) = serving_and_macro(input) else {
        return Decision::stay(Reason::NoCandidate, mode);
    };
    let hmm = cfg.margin(mode);
    match input.serving_kind {
        CellKind::Macro => {
            let Some(femto) = input.best_whitelisted_femto() else {
                return Decision::stay(Reason::NoCandidate, mode);
            };
            let above_threshold = femto.filtered_rsrp_dbm > cfg.rsrp_th_f_dbm;
            let above_macro = femto.filtered_rsrp_dbm > macro_cell.filtered_rsrp_dbm + hmm;
            if !(above_threshold && above_macro) {
                Decision::stay(Reason::SignalReject, mode)
            } else if femto.path_loss_db >= macro_cell.path_loss_db {
                Decision::stay(Reason::PathLossReject, mode)
            } else {
                Decision::handover(femto.cell_id, mode)
            }
        }
        CellKind::Femto => {
            if macro_cell.filtered_rsrp_dbm <= serving.filtered_rsrp_dbm + hmm {
                Decision::stay(Reason::SignalReject, mode)
            } else if macro_cell.path_loss_db >= serving.path_loss_db {
                Decision::stay(Reason::PathLossReject, mode)
            } else {
                Decision::handover(macro_cell.cell_id, mode)
            }
        }
    }
}

pub fn decide_speed(input: &DecisionInput, cfg: &DecisionConfig) -> Decision {
    let mode = Mode::for_traffic(input.traffic);
    let Some((serving, macro_cell)) = serving_and_macro(input) else {
        return Decision::stay(Reason::NoCandidate, mode);
    };
    let hmm = cfg.margin(mode);
    match input.serving_kind {
        CellKind::Macro => {
            let Some(femto) = input.best_whitelisted_femto() else {
                return Decision::stay(Reason::NoCandidate, mode);
            };
            match input.speed_class(cfg) {
                SpeedClass::High => return Decision::stay(Reason::SpeedReject, mode),
                SpeedClass::Medium if !femto.heading_toward => {
                    return Decision::stay(Reason::DirectionReject, mode)
                }
                SpeedClass::Medium | SpeedClass::Low => {}
            }
            if inbound_rss(femto, macro_cell, cfg.s_f_th_dbm, hmm) {
                Decision::handover(femto.cell_id, mode)
            } else {
                Decision::stay(Reason::SignalReject, mode)
            }
        }
        CellKind::Femto => {
            if outbound_rss(serving, macro_cell, cfg.s_f_th_dbm, hmm) {
                Decision::handover(macro_cell.cell_id, mode)
            } else {
                Decision::stay(Reason::SignalReject, mode)
            }
        }
    }
}

/// Shannon capacity of the whole carrier at `sinr_db`.
pub fn shannon_capacity_bps(bandwidth_hz: f64, sinr_db: f64) -> f64 {
    bandwidth_hz * (1.0 + 10f64.powf(sinr_db / 10.0)).log2()
}

fn admits(candidate: &Candidate, input: &DecisionInput, cfg: &DecisionConfig) -> bool {
    match cfg.admission {
        Admission::Headcount => candidate.load_ues < candidate.capacity_ues,
        Admission::Rate => {
            let share = shannon_capacity_bps(cfg.bandwidth_hz, candidate.sinr_db)
                / (candidate.load_ues as f64 + 1.0);
            share >= input.required_rate_bps
        }
    }
}

/// Gate chain evaluated in this order for a macro-served UE.
pub const PROPOSED_GATE_ORDER: [Reason; 5] = [
    Reason::SpeedReject,
    Reason::AccessReject,
    Reason::BandwidthReject,
    Reason::SignalReject,
    Reason::SinrReject,
];

pub fn decide_proposed(input: &DecisionInput, cfg: &DecisionConfig) -> Decision {
    let mode = Mode::for_traffic(input.traffic);
    let Some((serving, macro_cell)) = serving_and_macro(input) else {
        return Decision::stay(Reason::NoCandidate, mode);
    };
    let hmm = cfg.margin(mode);
    match input.serving_kind {
        CellKind::Macro => {
            if input.speed_class(cfg) == SpeedClass::High {
                return Decision::stay(Reason::SpeedReject, mode);
            }
            if !input.has_femto_candidate() {
                return Decision::stay(Reason::NoCandidate, mode);
            }
            let Some(femto) = input.best_whitelisted_femto() else {
                return Decision::stay(Reason::AccessReject, mode);
            };
            if !admits(femto, input, cfg) {
                return Decision::stay(Reason::BandwidthReject, mode);
            }
            let signal_ok = femto.filtered_rsrp_dbm > cfg.s_f_th_dbm
                && femto.combined_dbm > macro_cell.filtered_rsrp_dbm + hmm;
            if !signal_ok {
                return Decision::stay(Reason::SignalReject, mode);
            }
            if femto.sinr_db < cfg.sinr_min_db {
                return Decision::stay(Reason::SinrReject, mode);
            }
            Decision::handover(femto.cell_id, mode)
        }
        CellKind::Femto => {
            if outbound_rss(serving, macro_cell, cfg.s_f_th_dbm, hmm) {
                Decision::handover(macro_cell.cell_id, mode)
            } else {
                Decision::stay(Reason::SignalReject, mode)
            }
        }
    }
}

impl Algorithm {
    pub fn decide(self, input: &DecisionInput, cfg: &DecisionConfig) -> Decision {
        match self {
            Algorithm::Rss => decide_rss(input, cfg),
            Algorithm::RssPathloss => decide_rss_pathloss(input, cfg),
            Algorithm::Speed => decide_speed(input, cfg),
            Algorithm::Proposed => decide_proposed(input, cfg),
        }
    }
}
