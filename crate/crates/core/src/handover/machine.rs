//! Per-UE handover execution: time-to-trigger, execution delay, failures
//! and ping-pong bookkeeping.
//!
//! Timing is counted in whole ticks. A trigger needs
//! `max(1, ⌈TTT / dt⌉)` consecutive ticks naming the same target before
//! execution starts; execution then takes `⌈exec_delay / dt⌉` further ticks.
//! While executing, the UE stays on its source cell and ignores new
//! verdicts. If the source RSRP drops below the failure threshold during
//! execution the handover fails and the UE re-attaches to the strongest
//! cell it is allowed on.

use std::fmt;

use super::decision::{Decision, DecisionConfig, Mode, Verdict};
use crate::scenario::CellId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    HoStart,
    HoComplete,
    HoFail,
}

impl EventKind {
    pub fn token(self) -> &'static str {
        match self {
            EventKind::HoStart => "ho_start",
            EventKind::HoComplete => "ho_complete",
            EventKind::HoFail => "ho_fail",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HoEvent {
    pub kind: EventKind,
    pub from: CellId,
    pub to: CellId,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub ho_count: u64,
    pub pingpong_count: u64,
    pub ho_failures: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    target: CellId,
    ticks: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Execution {
    target: CellId,
    remaining: u32,
}

/// Tick counts derived from a [`DecisionConfig`] and the tick length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub dt_s: f64,
    pub ttt_standard_ticks: u32,
    pub ttt_proactive_ticks: u32,
    pub exec_ticks: u32,
    pub pingpong_window_s: f64,
    pub failure_threshold_dbm: f64,
}

fn ticks_for(duration_s: f64, dt_s: f64) -> u32 {
    (duration_s / dt_s - 1e-9).ceil().max(0.0) as u32
}

impl Timing {
    pub fn new(cfg: &DecisionConfig, dt_s: f64) -> Self {
        Timing {
            dt_s,
            ttt_standard_ticks: ticks_for(cfg.ttt_s(Mode::Standard), dt_s).max(1),
            ttt_proactive_ticks: ticks_for(cfg.ttt_s(Mode::Proactive), dt_s).max(1),
            exec_ticks: ticks_for(cfg.exec_delay_s, dt_s),
            pingpong_window_s: cfg.pingpong_window_s,
            failure_threshold_dbm: cfg.ho_failure_threshold_dbm,
        }
    }

    fn ttt_ticks(&self, mode: Mode) -> u32 {
        match mode {
            Mode::Proactive => self.ttt_proactive_ticks,
            Mode::Standard | Mode::Reactive => self.ttt_standard_ticks,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandoverState {
    serving: CellId,
    pending: Option<Pending>,
    exec: Option<Execution>,
    previous: Option<CellId>,
    last_ho_time_s: f64,
    counters: Counters,
}

impl HandoverState {
    pub fn new(serving: CellId) -> Self {
        HandoverState {
            serving,
            pending: None,
            exec: None,
            previous: None,
            last_ho_time_s: f64::NEG_INFINITY,
            counters: Counters::default(),
        }
    }

    pub fn serving(&self) -> CellId {
        self.serving
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn is_executing(&self) -> bool {
        self.exec.is_some()
    }

    /// Ticks the current trigger has persisted for, if any.
    pub fn pending_ticks(&self) -> Option<(CellId, u32)> {
        self.pending.map(|p| (p.target, p.ticks))
    }

    fn complete(&mut self, target: CellId, now_s: f64, events: &mut Vec<HoEvent>, timing: &Timing) {
        let from = self.serving;
        let pingpong = self.previous == Some(target)
            && now_s - self.last_ho_time_s <= timing.pingpong_window_s + 1e-9;
        self.counters.ho_count += 1;
        if pingpong {
            self.counters.pingpong_count += 1;
        }
        self.previous = Some(from);
        self.last_ho_time_s = now_s;
        self.serving = target;
        events.push(HoEvent {
            kind: EventKind::HoComplete,
            from,
            to: target,
            reason: if pingpong { "pingpong" } else { "ok" },
        });
    }

    /// Advances the state by one tick.
    ///
    /// `serving_rsrp_dbm` is this tick's measured RSRP of the serving cell;
    /// `strongest_allowed` is consulted only when an execution fails.
    pub fn step(
        &mut self,
        decision: &Decision,
        tick: u64,
        timing: &Timing,
        serving_rsrp_dbm: f64,
        strongest_allowed: impl FnOnce() -> CellId,
        events: &mut Vec<HoEvent>,
    ) {
        let now_s = tick as f64 * timing.dt_s;
        if let Some(mut exec) = self.exec {
            if serving_rsrp_dbm < timing.failure_threshold_dbm {
                let from = self.serving;
                let to = strongest_allowed();
                self.counters.ho_failures += 1;
                self.serving = to;
                self.exec = None;
                self.pending = None;
                events.push(HoEvent {
                    kind: EventKind::HoFail,
                    from,
                    to,
                    reason: "rsrp-below-threshold",
                });
                return;
            }
            exec.remaining -= 1;
            if exec.remaining == 0 {
                self.exec = None;
                self.complete(exec.target, now_s, events, timing);
            } else {
                self.exec = Some(exec);
            }
            return;
        }

        let target = match decision.verdict {
            Verdict::Stay => {
                self.pending = None;
                return;
            }
            Verdict::HandoverTo(t) if t == self.serving => {
                self.pending = None;
                return;
            }
            Verdict::HandoverTo(t) => t,
        };
        let ticks = match self.pending {
            Some(p) if p.target == target => p.ticks + 1,
            _ => 1,
        };
        if ticks < timing.ttt_ticks(decision.mode) {
            self.pending = Some(Pending { target, ticks });
            return;
        }
        self.pending = None;
        events.push(HoEvent {
            kind: EventKind::HoStart,
            from: self.serving,
            to: target,
            reason: decision.mode.token(),
        });
        if timing.exec_ticks == 0 {
            self.complete(target, now_s, events, timing);
        } else {
            self.exec = Some(Execution {
                target,
                remaining: timing.exec_ticks,
            });
        }
    }
}

/// Functional wrapper over [`HandoverState::step`] returning the new state
/// and the events emitted this tick.
pub fn apply_ttt_and_execute(
    state: &HandoverState,
    decision: &Decision,
    tick: u64,
    timing: &Timing,
    serving_rsrp_dbm: f64,
    strongest_allowed: impl FnOnce() -> CellId,
) -> (HandoverState, Vec<HoEvent>) {
    let mut next = state.clone();
    let mut events = Vec::new();
    next.step(decision, tick, timing, serving_rsrp_dbm, strongest_allowed, &mut events);
    (next, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handover::decision::Reason;

    const A: CellId = CellId(0);
    const B: CellId = CellId(1);

    fn go(to: CellId, mode: Mode) -> Decision {
        Decision::handover(to, mode)
    }

    fn stay() -> Decision {
        Decision::stay(Reason::SignalReject, Mode::Standard)
    }

    fn timing(ttt: f64, exec: f64) -> Timing {
        let cfg = DecisionConfig {
            ttt_reactive_s: ttt,
            exec_delay_s: exec,
            pingpong_window_s: 1.0,
            ..DecisionConfig::default()
        };
        Timing::new(&cfg, 0.1)
    }

    fn drive(state: &mut HandoverState, decisions: &[Decision], t: &Timing) -> Vec<(u64, HoEvent)> {
        let mut log = Vec::new();
        for (i, d) in decisions.iter().enumerate() {
            let mut ev = Vec::new();
            state.step(d, i as u64 + 1, t, -70.0, || A, &mut ev);
            log.extend(ev.into_iter().map(|e| (i as u64 + 1, e)));
        }
        log
    }

    #[test]
    fn tick_counts() {
        let t = timing(0.4, 0.2);
        assert_eq!(t.ttt_standard_ticks, 4);
        assert_eq!(t.ttt_proactive_ticks, 1);
        assert_eq!(t.exec_ticks, 2);
    }

    #[test]
    fn stay_forever_means_no_handover() {
        let mut s = HandoverState::new(A);
        let log = drive(&mut s, &vec![stay(); 100], &timing(0.4, 0.2));
        assert!(log.is_empty());
        assert_eq!(s.counters(), Counters::default());
    }

    #[test]
    fn trigger_must_persist_for_ttt() {
        let t = timing(0.4, 0.2);
        let mut s = HandoverState::new(A);
        // Three ticks (TTT − dt), then the trigger lapses.
        let mut seq = vec![go(B, Mode::Standard); 3];
        seq.push(stay());
        let log = drive(&mut s, &seq, &t);
        assert!(log.is_empty());
        assert_eq!(s.pending_ticks(), None);

        // Four consecutive ticks start execution; two more complete it.
        let mut s = HandoverState::new(A);
        let log = drive(&mut s, &[go(B, Mode::Standard); 6], &t);
        let kinds: Vec<_> = log.iter().map(|(k, e)| (*k, e.kind)).collect();
        assert_eq!(kinds, vec![(4, EventKind::HoStart), (6, EventKind::HoComplete)]);
        assert_eq!(s.serving(), B);
    }

    #[test]
    fn proactive_starts_immediately() {
        let t = timing(0.4, 0.0);
        let mut s = HandoverState::new(A);
        let log = drive(&mut s, &[go(B, Mode::Proactive)], &t);
        assert_eq!(log.len(), 2);
        assert_eq!(s.serving(), B);
        assert_eq!(s.counters().ho_count, 1);
    }

    #[test]
    fn pingpong_within_window() {
        // A→B at t = 0.1 s, B→A at t = 0.6 s.
        let t = timing(0.0, 0.0);
        let mut s = HandoverState::new(A);
        let mut seq = vec![go(B, Mode::Proactive)];
        seq.extend(vec![stay(); 4]);
        seq.push(go(A, Mode::Proactive));
        drive(&mut s, &seq, &t);
        assert_eq!(s.counters().ho_count, 2);
        assert_eq!(s.counters().pingpong_count, 1);
    }

    #[test]
    fn return_after_window_is_not_pingpong() {
        let t = timing(0.0, 0.0);
        let mut s = HandoverState::new(A);
        let mut seq = vec![go(B, Mode::Proactive)];
        seq.extend(vec![stay(); 15]);
        seq.push(go(A, Mode::Proactive));
        drive(&mut s, &seq, &t);
        assert_eq!(s.counters().ho_count, 2);
        assert_eq!(s.counters().pingpong_count, 0);
    }

    #[test]
    fn failure_during_execution() {
        let t = timing(0.0, 0.2);
        let mut s = HandoverState::new(A);
        let mut ev = Vec::new();
        s.step(&go(B, Mode::Proactive), 1, &t, -70.0, || A, &mut ev);
        assert!(s.is_executing());
        s.step(&stay(), 2, &t, -115.0, || B, &mut ev);
        assert_eq!(ev.last().unwrap().kind, EventKind::HoFail);
        assert_eq!(s.serving(), B);
        assert_eq!(s.counters().ho_failures, 1);
        assert_eq!(s.counters().ho_count, 0);
        assert!(!s.is_executing());
    }

    #[test]
    fn verdicts_ignored_while_executing() {
        let t = timing(0.0, 0.3);
        let mut s = HandoverState::new(A);
        let seq = [go(B, Mode::Proactive), stay(), go(CellId(5), Mode::Proactive), stay()];
        drive(&mut s, &seq, &t);
        assert_eq!(s.serving(), B);
    }

    #[test]
    fn changing_target_restarts_ttt() {
        let t = timing(0.3, 0.0);
        let mut s = HandoverState::new(A);
        let seq = [go(B, Mode::Standard), go(B, Mode::Standard), go(CellId(2), Mode::Standard)];
        drive(&mut s, &seq, &t);
        assert_eq!(s.pending_ticks(), Some((CellId(2), 1)));
    }

    #[test]
    fn functional_wrapper() {
        let t = timing(0.0, 0.0);
        let s = HandoverState::new(A);
        let (n, ev) = apply_ttt_and_execute(&s, &go(B, Mode::Proactive), 1, &t, -70.0, || A);
        assert_eq!(n.serving(), B);
        assert_eq!(ev.len(), 2);
        assert_eq!(s.serving(), A);
    }

    proptest::proptest! {
        #[test]
        fn pingpongs_never_exceed_handovers(seq in proptest::collection::vec(0u8..3, 1..300)) {
            let t = timing(0.2, 0.1);
            let mut s = HandoverState::new(A);
            let decisions: Vec<Decision> = seq.iter().map(|v| match v {
                0 => stay(),
                1 => go(A, Mode::Proactive),
                _ => go(B, Mode::Standard),
            }).collect();
            let log = drive(&mut s, &decisions, &t);
            let c = s.counters();
            proptest::prop_assert!(c.pingpong_count <= c.ho_count);
            // Completed handovers chain: each starts where the previous ended.
            let mut serving = A;
            for (_, e) in log.iter().filter(|(_, e)| e.kind == EventKind::HoComplete) {
                proptest::prop_assert_eq!(e.from, serving);
                serving = e.to;
            }
            proptest::prop_assert_eq!(serving, s.serving());
        }
    }
}
