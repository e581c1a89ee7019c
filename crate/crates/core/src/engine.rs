//! Discrete-time simulation loop.
//!
//! Every tick, for every UE in id order: move, measure all links (plus
//! optional measurement noise), update the RSRP filters, then for each
//! algorithm under evaluation decide and advance the handover state
//! machine, and finally record metrics. Mobility and radio measurements do
//! not depend on attachment, so several algorithms can share one trace and
//! be compared pairwise. Cell loads are snapshotted at the start of each
//! tick so the processing order of UEs does not leak into decisions.

use std::fmt;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::config::{Algorithm, SimConfig};
use crate::error::{Error, Result};
use crate::filtering::{combined_parameter, CombineParams, FilterState};
use crate::handover::{
    Candidate, Counters, Decision, DecisionConfig, DecisionInput, EventKind, HandoverState, HoEvent,
    Mode, Reason, Timing,
};
use crate::metrics::{MetricsAccumulator, MetricsReport, SweepTable};
use crate::mobility::{self, Arena, MobilityState};
use crate::propagation::{self, PropagationModel};
use crate::rng::{self, Purpose};
use crate::scenario::{build_scenario, CellId, CellKind, Scenario, Traffic, UeClass, UeId};

pub const EVENT_LOG_HEADER: &str = "tick,ue_id,event,from_cell,to_cell,reason";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub tick: u64,
    pub ue_id: UeId,
    pub kind: EventKind,
    pub from: CellId,
    pub to: CellId,
    pub reason: &'static str,
}

impl Event {
    fn new(tick: u64, ue_id: UeId, ho: HoEvent) -> Self {
        Event {
            tick,
            ue_id,
            kind: ho.kind,
            from: ho.from,
            to: ho.to,
            reason: ho.reason,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.tick, self.ue_id, self.kind, self.from, self.to, self.reason
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventLog {
    pub events: Vec<Event>,
}

impl EventLog {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Header line followed by one line per event.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.events.len() + 1));
        out.push_str(EVENT_LOG_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

/// Result of one algorithm over one simulated trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub events: EventLog,
    pub report: MetricsReport,
    /// Serving cell of every UE at the end of the run.
    pub final_serving: Vec<CellId>,
}

struct UeRuntime {
    mobility: MobilityState,
    arena: Arena,
    mobility_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    shadowing: Vec<f64>,
    allowed: Vec<bool>,
    filters: Vec<FilterState>,
    path_loss: Vec<f64>,
    raw: Vec<f64>,
    filtered: Vec<f64>,
    sinr: Vec<f64>,
}

struct AlgorithmRuntime {
    algorithm: Algorithm,
    states: Vec<HandoverState>,
    loads: Vec<u32>,
    events: Vec<Event>,
    metrics: MetricsAccumulator,
}

struct Simulation<'a> {
    scenario: &'a Scenario,
    model: PropagationModel,
    decision: DecisionConfig,
    timing: Timing,
    combine: CombineParams,
    measurement_noise_db: f64,
    ues: Vec<UeRuntime>,
    mw_scratch: Vec<f64>,
}

fn strongest_allowed(raw: &[f64], allowed: &[bool]) -> CellId {
    let mut best = 0usize;
    for (i, (p, ok)) in raw.iter().zip(allowed).enumerate() {
        if *ok && *p > raw[best] {
            best = i;
        }
    }
    CellId(best as u32)
}

impl<'a> Simulation<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        let cfg = &scenario.config;
        let model = PropagationModel::from_config(cfg);
        let decision = DecisionConfig::from_config(cfg);
        let timing = Timing::new(&decision, cfg.tick_s);
        let footprint = scenario.building.footprint();
        let n_cells = scenario.cells.len();
        let ues = scenario
            .ues
            .iter()
            .map(|ue| {
                let confine = (ue.class == UeClass::Fue && cfg.confine_fues).then_some(footprint);
                UeRuntime {
                    mobility: MobilityState {
                        position: ue.position,
                        speed_kmh: ue.speed_kmh,
                        heading_rad: ue.heading_rad,
                        epoch_remaining_s: cfg.epoch_s,
                    },
                    arena: Arena {
                        bounds: scenario.bounds,
                        confine,
                        epoch_s: cfg.epoch_s,
                    },
                    mobility_rng: rng::stream(cfg.seed, Purpose::Mobility, ue.id.0),
                    noise_rng: rng::stream(cfg.seed, Purpose::MeasurementNoise, ue.id.0),
                    shadowing: model.draw_shadowing(cfg.seed, ue.id, &scenario.cells),
                    allowed: scenario.cells.iter().map(|c| c.admits(ue.id)).collect(),
                    filters: vec![FilterState::new(cfg.beta); n_cells],
                    path_loss: vec![0.0; n_cells],
                    raw: vec![0.0; n_cells],
                    filtered: vec![0.0; n_cells],
                    sinr: vec![0.0; n_cells],
                }
            })
            .collect();
        Simulation {
            scenario,
            model,
            decision,
            timing,
            combine: CombineParams { alpha: cfg.alpha },
            measurement_noise_db: cfg.measurement_noise_db,
            ues,
            mw_scratch: Vec::with_capacity(n_cells),
        }
    }

    /// Measures, filters and computes SINR for one UE at its current position.
    fn measure(&mut self, u: usize) -> Result<()> {
        let scenario = self.scenario;
        let ue = &mut self.ues[u];
        let position = ue.mobility.position;
        for (i, cell) in scenario.cells.iter().enumerate() {
            let pl = self.model.link_path_loss(scenario, cell, position);
            let mut rsrp = cell.tx_power_dbm - pl - ue.shadowing[i];
            if self.measurement_noise_db > 0.0 {
                let z: f64 = StandardNormal.sample(&mut ue.noise_rng);
                rsrp += self.measurement_noise_db * z;
            }
            if !rsrp.is_finite() {
                return Err(Error::NonFinite {
                    ue_id: u as u32,
                    cell_id: cell.id.0,
                });
            }
            ue.path_loss[i] = pl;
            ue.raw[i] = rsrp;
            ue.filtered[i] = ue.filters[i].update(rsrp);
        }
        let mut sinr = std::mem::take(&mut ue.sinr);
        // Only cells the UE may attach to are ever judged on SINR.
        propagation::sinr_all_into(
            &ue.filtered,
            self.model.noise_floor_dbm,
            Some(&ue.allowed),
            &mut self.mw_scratch,
            &mut sinr,
        );
        ue.sinr = sinr;
        Ok(())
    }

    fn fill_candidates(&self, u: usize, input: &mut DecisionInput) {
        let ue = &self.ues[u];
        let spec = &self.scenario.ues[u];
        let macro_filtered = ue.filtered[0];
        let velocity = mobility::velocity_mps(ue.mobility.speed_kmh, ue.mobility.heading_rad);
        input.ue_id = spec.id;
        input.speed_kmh = spec.speed_kmh;
        input.traffic = spec.traffic;
        input.required_rate_bps = spec.required_rate_bps;
        input.candidates.clear();
        for (i, cell) in self.scenario.cells.iter().enumerate() {
            let (combined, toward) = match cell.kind {
                CellKind::Macro => (ue.filtered[i], false),
                CellKind::Femto => (
                    combined_parameter(ue.filtered[i], macro_filtered, self.combine),
                    mobility::moving_toward(velocity, ue.mobility.position, cell.position),
                ),
            };
            input.candidates.push(Candidate {
                cell_id: cell.id,
                kind: cell.kind,
                raw_rsrp_dbm: ue.raw[i],
                filtered_rsrp_dbm: ue.filtered[i],
                combined_dbm: combined,
                path_loss_db: ue.path_loss[i],
                sinr_db: ue.sinr[i],
                in_whitelist: ue.allowed[i],
                load_ues: 0,
                capacity_ues: cell.capacity_ues,
                heading_toward: toward,
            });
        }
    }

    fn run(mut self, algorithms: &[Algorithm]) -> Result<Vec<AlgorithmRun>> {
        let cfg = &self.scenario.config;
        let n_ues = self.ues.len();
        let n_cells = self.scenario.cells.len();
        let eligible: Vec<bool> = self
            .scenario
            .ues
            .iter()
            .map(|u| u.class == UeClass::Mue || cfg.include_fues)
            .collect();

        for u in 0..n_ues {
            self.measure(u)?;
        }
        let mut runtimes: Vec<AlgorithmRuntime> = algorithms
            .iter()
            .map(|alg| {
                let states: Vec<HandoverState> = self
                    .ues
                    .iter()
                    .map(|ue| HandoverState::new(strongest_allowed(&ue.raw, &ue.allowed)))
                    .collect();
                let mut metrics = MetricsAccumulator::new(*alg, eligible.clone());
                for (u, s) in states.iter().enumerate() {
                    metrics.record_attachment(u, self.scenario.cell(s.serving()).kind == CellKind::Femto);
                }
                AlgorithmRuntime {
                    algorithm: *alg,
                    states,
                    loads: vec![0; n_cells],
                    events: Vec::new(),
                    metrics,
                }
            })
            .collect();

        let mut input = DecisionInput {
            ue_id: UeId(0),
            serving: CellId::MACRO,
            serving_kind: CellKind::Macro,
            candidates: Vec::with_capacity(n_cells),
            speed_kmh: 0.0,
            traffic: Traffic::RealTimeVoip,
            required_rate_bps: 0.0,
            sinr_serving_db: 0.0,
        };
        let idle = Decision::stay(Reason::NoCandidate, Mode::Standard);
        let mut ho_events = Vec::new();

        for tick in 1..=cfg.tick_count() {
            for rt in &mut runtimes {
                rt.loads.iter_mut().for_each(|l| *l = 0);
                for s in &rt.states {
                    rt.loads[s.serving().0 as usize] += 1;
                }
            }
            for u in 0..n_ues {
                let ue = &mut self.ues[u];
                ue.mobility = mobility::step(&ue.mobility, cfg.tick_s, &ue.arena, &mut ue.mobility_rng);
                self.measure(u)?;
                self.fill_candidates(u, &mut input);
                let ue = &self.ues[u];
                for rt in &mut runtimes {
                    let state = &mut rt.states[u];
                    let serving = state.serving();
                    let decision = if state.is_executing() {
                        idle
                    } else {
                        input.serving = serving;
                        input.serving_kind = self.scenario.cell(serving).kind;
                        input.sinr_serving_db = ue.sinr[serving.0 as usize];
                        for c in &mut input.candidates {
                            c.load_ues = rt.loads[c.cell_id.0 as usize];
                        }
                        rt.algorithm.decide(&input, &self.decision)
                    };
                    ho_events.clear();
                    state.step(
                        &decision,
                        tick,
                        &self.timing,
                        ue.raw[serving.0 as usize],
                        || strongest_allowed(&ue.raw, &ue.allowed),
                        &mut ho_events,
                    );
                    for ho in &ho_events {
                        let event = Event::new(tick, UeId(u as u32), *ho);
                        rt.metrics.record(&event);
                        rt.events.push(event);
                    }
                    let on_fap = self.scenario.cell(state.serving()).kind == CellKind::Femto;
                    rt.metrics.record_attachment(u, on_fap);
                }
            }
        }

        Ok(runtimes
            .into_iter()
            .map(|rt| AlgorithmRun {
                algorithm: rt.algorithm,
                report: rt.metrics.finalize(),
                final_serving: rt.states.iter().map(|s| s.serving()).collect(),
                events: EventLog { events: rt.events },
            })
            .collect())
    }
}

/// Runs `algorithms` over one shared mobility and radio trace.
pub fn run_algorithms(config: &SimConfig, algorithms: &[Algorithm]) -> Result<Vec<AlgorithmRun>> {
    let scenario = build_scenario(config)?;
    run_scenario(&scenario, algorithms)
}

/// Like [`run_algorithms`] on an already built scenario.
pub fn run_scenario(scenario: &Scenario, algorithms: &[Algorithm]) -> Result<Vec<AlgorithmRun>> {
    Simulation::new(scenario).run(algorithms)
}

/// Single run of `config.algorithm`.
pub fn run(config: &SimConfig) -> Result<(EventLog, MetricsReport)> {
    let mut out = run_algorithms(config, &[config.algorithm])?;
    let r = out.pop().expect("one algorithm");
    Ok((r.events, r.report))
}

/// `n` runs of `config.algorithm` with seeds `base_seed + i`, in seed order.
pub fn run_replications(config: &SimConfig, n: u32, base_seed: u64) -> Result<Vec<MetricsReport>> {
    Ok(run_replications_with(config, &[config.algorithm], n, base_seed)?
        .into_iter()
        .map(|mut reps| reps.pop().expect("one algorithm"))
        .collect())
}

/// `n` replications of a shared-trace comparison. Element `i` holds the
/// reports for seed `base_seed + i`, one per algorithm in the given order.
pub fn run_replications_with(
    config: &SimConfig,
    algorithms: &[Algorithm],
    n: u32,
    base_seed: u64,
) -> Result<Vec<Vec<MetricsReport>>> {
    config.ensure_valid()?;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let cfg = SimConfig {
                seed: base_seed.wrapping_add(i as u64),
                ..config.clone()
            };
            Ok(run_algorithms(&cfg, algorithms)?
                .into_iter()
                .map(|r| r.report)
                .collect())
        })
        .collect()
}

/// Distance sweep: `replications` shared-trace comparisons of `algorithms`
/// at every eNB-FAP distance, seeds `config.seed + r`.
pub fn sweep(
    config: &SimConfig,
    distances: &[f64],
    replications: u32,
    algorithms: &[Algorithm],
) -> Result<SweepTable> {
    let configs: Vec<SimConfig> = distances
        .iter()
        .map(|&d| SimConfig {
            enb_fap_distance_m: d,
            ..config.clone()
        })
        .collect();
    for cfg in &configs {
        cfg.ensure_valid()?;
    }
    let jobs: Vec<(usize, u32)> = (0..configs.len())
        .flat_map(|d| (0..replications).map(move |r| (d, r)))
        .collect();
    let flat: Vec<Vec<MetricsReport>> = jobs
        .par_iter()
        .map(|&(d, r)| {
            let cfg = SimConfig {
                seed: config.seed.wrapping_add(r as u64),
                ..configs[d].clone()
            };
            Ok(run_algorithms(&cfg, algorithms)?
                .into_iter()
                .map(|run| run.report)
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut it = flat.into_iter();
    let reports: Vec<Vec<Vec<MetricsReport>>> = configs
        .iter()
        .map(|_| it.by_ref().take(replications as usize).collect())
        .collect();
    Ok(SweepTable::from_reports(distances, algorithms, &reports))
}

/// Runs `f` on a rayon pool with `threads` workers (0 = rayon's default).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Outcome of replaying a two-cell RSRP trace through one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceOutcome {
    pub counters: Counters,
    pub events: Vec<Event>,
    pub serving: Vec<CellId>,
}

/// Drives the filter, decision and execution pipeline with a synthetic
/// trace of raw RSRP samples for one macro cell (id 0) and one whitelisted
/// femto (id 1), bypassing geometry.
pub fn replay_two_cell_trace(
    config: &SimConfig,
    algorithm: Algorithm,
    macro_dbm: &[f64],
    femto_dbm: &[f64],
    speed_kmh: f64,
    traffic: Traffic,
) -> TraceOutcome {
    assert_eq!(macro_dbm.len(), femto_dbm.len(), "trace lengths differ");
    let decision_cfg = DecisionConfig::from_config(config);
    let timing = Timing::new(&decision_cfg, config.tick_s);
    let combine = CombineParams { alpha: config.alpha };
    let noise = propagation::noise_floor_dbm(config.bandwidth_hz, config.noise_figure_db);
    let mut fm = FilterState::new(config.beta);
    let mut ff = FilterState::new(config.beta);
    let allowed = [true, true];
    let mut state: Option<HandoverState> = None;
    let mut counters_events = Vec::new();
    let mut serving_trace = Vec::with_capacity(macro_dbm.len());
    let mut ho = Vec::new();

    for (k, (&m, &f)) in macro_dbm.iter().zip(femto_dbm).enumerate() {
        let m_bar = fm.update(m);
        let f_bar = ff.update(f);
        let raw = [m, f];
        let sinr = propagation::sinr_all_db(&[m_bar, f_bar], noise);
        let st = state.get_or_insert_with(|| HandoverState::new(strongest_allowed(&raw, &allowed)));
        if k > 0 {
            let serving = st.serving();
            let input = DecisionInput {
                ue_id: UeId(0),
                serving,
                serving_kind: if serving == CellId::MACRO {
                    CellKind::Macro
                } else {
                    CellKind::Femto
                },
                candidates: vec![
                    Candidate {
                        cell_id: CellId::MACRO,
                        kind: CellKind::Macro,
                        raw_rsrp_dbm: m,
                        filtered_rsrp_dbm: m_bar,
                        combined_dbm: m_bar,
                        path_loss_db: config.macro_tx_dbm - m_bar,
                        sinr_db: sinr[0],
                        in_whitelist: true,
                        load_ues: 0,
                        capacity_ues: u32::MAX,
                        heading_toward: false,
                    },
                    Candidate {
                        cell_id: CellId(1),
                        kind: CellKind::Femto,
                        raw_rsrp_dbm: f,
                        filtered_rsrp_dbm: f_bar,
                        combined_dbm: combined_parameter(f_bar, m_bar, combine),
                        path_loss_db: config.fap_tx_dbm - f_bar,
                        sinr_db: sinr[1],
                        in_whitelist: true,
                        load_ues: 0,
                        capacity_ues: config.fap_capacity(),
                        heading_toward: true,
                    },
                ],
                speed_kmh,
                traffic,
                required_rate_bps: config.voip_rate_bps,
                sinr_serving_db: sinr[serving.0 as usize],
            };
            let decision = algorithm.decide(&input, &decision_cfg);
            ho.clear();
            st.step(
                &decision,
                k as u64,
                &timing,
                raw[serving.0 as usize],
                || strongest_allowed(&raw, &allowed),
                &mut ho,
            );
            counters_events.extend(ho.iter().map(|e| Event::new(k as u64, UeId(0), *e)));
        }
        serving_trace.push(st.serving());
    }
    TraceOutcome {
        counters: state.map(|s| s.counters()).unwrap_or_default(),
        events: counters_events,
        serving: serving_trace,
    }
}
