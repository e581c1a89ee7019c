//! Shared helpers for the integration tests: an independent brute-force
//! evaluator of the four decision rules and a random input generator.
//!
//! The evaluator deliberately shares no code with the library's decision
//! module: it reads only plain numbers off the input, recomputes every
//! condition as a bit and looks the verdict up from those bits.

#![allow(dead_code)]

use femtoho::handover::{Candidate, DecisionConfig, DecisionInput};
use femtoho::scenario::{CellId, CellKind, Traffic, UeId};
use femtoho::{Admission, Algorithm};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    /// Target cell id, or `None` for stay.
    pub target: Option<u32>,
    /// Reason token; only meaningful for the proposed algorithm.
    pub reason: &'static str,
}

fn stay(reason: &'static str) -> Expected {
    Expected { target: None, reason }
}

fn go(id: u32) -> Expected {
    Expected {
        target: Some(id),
        reason: "triggered",
    }
}

/// Flattened view of one candidate.
#[derive(Clone, Copy)]
struct Row {
    id: u32,
    femto: bool,
    f: f64,
    s: f64,
    pl: f64,
    sinr: f64,
    member: bool,
    load: u32,
    cap: u32,
    toward: bool,
}

fn rows(input: &DecisionInput) -> Vec<Row> {
    input
        .candidates
        .iter()
        .map(|c| Row {
            id: c.cell_id.0,
            femto: c.kind == CellKind::Femto,
            f: c.filtered_rsrp_dbm,
            s: c.combined_dbm,
            pl: c.path_loss_db,
            sinr: c.sinr_db,
            member: c.in_whitelist,
            load: c.load_ues,
            cap: c.capacity_ues,
            toward: c.heading_toward,
        })
        .collect()
}

/// Strongest member femto other than the serving cell; first wins ties.
fn best_member(rows: &[Row], serving: u32) -> Option<Row> {
    let eligible: Vec<Row> = rows
        .iter()
        .copied()
        .filter(|r| r.femto && r.member && r.id != serving)
        .collect();
    let top = eligible.iter().map(|r| r.f).fold(f64::NEG_INFINITY, f64::max);
    eligible.into_iter().find(|r| r.f == top)
}

/// Bits: 0 = f > th, 1 = f < th, 2 = s > m + h, 3 = f > m + h.
fn inbound_bits(fem: &Row, m: f64, th: f64, h: f64) -> u8 {
    (fem.f > th) as u8 | ((fem.f < th) as u8) << 1 | ((fem.s > m + h) as u8) << 2 | ((fem.f > m + h) as u8) << 3
}

fn inbound_fires(bits: u8) -> bool {
    // (bit0 & bit2) | (bit1 & bit3)
    (bits & 0b0101 == 0b0101) || (bits & 0b1010 == 0b1010)
}

/// Bits: 0 = f < th, 1 = f + h < m, 2 = f > th, 3 = s < m + h.
fn outbound_bits(fem: &Row, m: f64, th: f64, h: f64) -> u8 {
    (fem.f < th) as u8 | ((fem.f + h < m) as u8) << 1 | ((fem.f > th) as u8) << 2 | ((fem.s < m + h) as u8) << 3
}

fn outbound_fires(bits: u8) -> bool {
    (bits & 0b0011 == 0b0011) || (bits & 0b1100 == 0b1100)
}

fn is_real_time(t: Traffic) -> bool {
    matches!(t, Traffic::RealTimeVoip | Traffic::RealTimeVideo)
}

fn class(speed: f64, cfg: &DecisionConfig) -> u8 {
    if speed > cfg.speed_high_kmh {
        2
    } else if speed >= cfg.speed_low_kmh {
        1
    } else {
        0
    }
}

fn shannon(bw: f64, sinr_db: f64) -> f64 {
    bw * (1.0 + 10f64.powf(sinr_db / 10.0)).ln() / std::f64::consts::LN_2
}

pub fn expected(alg: Algorithm, input: &DecisionInput, cfg: &DecisionConfig) -> Expected {
    let rows = rows(input);
    let serving = input.serving.0;
    let Some(mac) = rows.iter().copied().find(|r| !r.femto) else {
        return stay("no-candidate");
    };
    let Some(srv) = rows.iter().copied().find(|r| r.id == serving) else {
        return stay("no-candidate");
    };
    let rt = is_real_time(input.traffic);
    let reduced = cfg.hmm_db - cfg.proactive_margin_reduction_db;
    let mode_margin = if rt { reduced } else { cfg.hmm_db };
    let th = cfg.s_f_th_dbm;
    let on_macro = input.serving_kind == CellKind::Macro;

    match alg {
        Algorithm::Rss => {
            if on_macro {
                match best_member(&rows, serving) {
                    None => stay("no-candidate"),
                    Some(b) if inbound_fires(inbound_bits(&b, mac.f, th, cfg.hmm_db)) => go(b.id),
                    Some(_) => stay("rss-fail"),
                }
            } else if outbound_fires(outbound_bits(&srv, mac.f, th, cfg.hmm_db)) {
                go(mac.id)
            } else {
                stay("rss-fail")
            }
        }
        Algorithm::RssPathloss => {
            if on_macro {
                let Some(b) = best_member(&rows, serving) else {
                    return stay("no-candidate");
                };
                let a = b.f > cfg.rsrp_th_f_dbm;
                let bb = b.f > mac.f + cfg.hmm_db;
                let c = b.pl < mac.pl;
                match (a && bb, c) {
                    (true, true) => go(b.id),
                    (true, false) => stay("pathloss-reject"),
                    _ => stay("rss-fail"),
                }
            } else {
                let a = mac.f > srv.f + cfg.hmm_db;
                let c = mac.pl < srv.pl;
                match (a, c) {
                    (true, true) => go(mac.id),
                    (true, false) => stay("pathloss-reject"),
                    _ => stay("rss-fail"),
                }
            }
        }
        Algorithm::Speed => {
            if on_macro {
                let Some(b) = best_member(&rows, serving) else {
                    return stay("no-candidate");
                };
                match class(input.speed_kmh, cfg) {
                    2 => return stay("speed-reject"),
                    1 if !b.toward => return stay("direction-reject"),
                    _ => {}
                }
                if inbound_fires(inbound_bits(&b, mac.f, th, mode_margin)) {
                    go(b.id)
                } else {
                    stay("rss-fail")
                }
            } else if outbound_fires(outbound_bits(&srv, mac.f, th, mode_margin)) {
                go(mac.id)
            } else {
                stay("rss-fail")
            }
        }
        Algorithm::Proposed => {
            if !on_macro {
                return if outbound_fires(outbound_bits(&srv, mac.f, th, mode_margin)) {
                    go(mac.id)
                } else {
                    stay("rss-fail")
                };
            }
            if class(input.speed_kmh, cfg) == 2 {
                return stay("speed-reject");
            }
            if !rows.iter().any(|r| r.femto && r.id != serving) {
                return stay("no-candidate");
            }
            let Some(b) = best_member(&rows, serving) else {
                return stay("access-reject");
            };
            let room = match cfg.admission {
                Admission::Headcount => b.load < b.cap,
                Admission::Rate => {
                    shannon(cfg.bandwidth_hz, b.sinr) / (b.load as f64 + 1.0) >= input.required_rate_bps
                }
            };
            if !room {
                return stay("bandwidth-reject");
            }
            if !(b.f > th && b.s > mac.f + mode_margin) {
                return stay("rss-fail");
            }
            if b.sinr < cfg.sinr_min_db {
                return stay("sinr-reject");
            }
            go(b.id)
        }
    }
}

/// Values on a coarse lattice so that equalities and threshold ties occur.
fn level(rng: &mut impl Rng, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step) as i64;
    lo + rng.gen_range(0..=n) as f64 * step
}

pub const SPEEDS: [f64; 10] = [0.0, 3.0, 4.99, 5.0, 7.0, 10.0, 10.01, 15.0, 30.0, 120.0];

/// A random decision input with one macro cell and one to three femtos.
pub fn random_input(rng: &mut impl Rng, alpha: f64) -> DecisionInput {
    let n_femto = rng.gen_range(1..=3u32);
    let mut candidates = Vec::new();
    let macro_f = level(rng, -100.0, -50.0, 1.0);
    candidates.push(Candidate {
        cell_id: CellId(0),
        kind: CellKind::Macro,
        raw_rsrp_dbm: macro_f + level(rng, -2.0, 2.0, 1.0),
        filtered_rsrp_dbm: macro_f,
        combined_dbm: macro_f,
        path_loss_db: level(rng, 90.0, 130.0, 5.0),
        sinr_db: level(rng, -10.0, 20.0, 1.0),
        in_whitelist: true,
        load_ues: rng.gen_range(0..50),
        capacity_ues: u32::MAX,
        heading_toward: rng.gen(),
    });
    for i in 1..=n_femto {
        let f = level(rng, -100.0, -40.0, 1.0);
        candidates.push(Candidate {
            cell_id: CellId(i),
            kind: CellKind::Femto,
            raw_rsrp_dbm: f + level(rng, -2.0, 2.0, 1.0),
            filtered_rsrp_dbm: f,
            combined_dbm: f + alpha * macro_f,
            path_loss_db: level(rng, 50.0, 130.0, 5.0),
            sinr_db: level(rng, -10.0, 10.0, 1.0),
            in_whitelist: rng.gen_bool(0.7),
            load_ues: rng.gen_range(0..=10),
            capacity_ues: rng.gen_range(8..=10),
            heading_toward: rng.gen(),
        });
    }
    let serving_idx = if rng.gen_bool(0.6) { 0 } else { rng.gen_range(1..=n_femto) };
    let serving = candidates[serving_idx as usize];
    let traffic = *[Traffic::RealTimeVoip, Traffic::RealTimeVideo, Traffic::NonRealTime]
        .choose(rng)
        .unwrap();
    DecisionInput {
        ue_id: UeId(0),
        serving: serving.cell_id,
        serving_kind: serving.kind,
        speed_kmh: *SPEEDS.choose(rng).unwrap(),
        traffic,
        required_rate_bps: *[64e3, 1e6, 5e7].choose(rng).unwrap(),
        sinr_serving_db: serving.sinr_db,
        candidates,
    }
}

/// Decision configs the grid is evaluated under.
pub fn decision_configs() -> Vec<DecisionConfig> {
    let base = DecisionConfig::default();
    vec![
        base.clone(),
        DecisionConfig {
            hmm_db: 0.0,
            proactive_margin_reduction_db: 0.0,
            ..base.clone()
        },
        DecisionConfig {
            hmm_db: 5.0,
            s_f_th_dbm: -60.0,
            rsrp_th_f_dbm: -80.0,
            admission: Admission::Rate,
            ..base
        },
    ]
}

/// Runs the full randomized grid; returns the number of points checked and
/// a description of the first disagreement, if any.
pub fn run_oracle_grid(points: usize, seed: u64) -> (usize, Option<String>) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let configs = decision_configs();
    let mut checked = 0;
    for i in 0..points {
        let alpha = if i % 4 == 3 { 0.1 } else { 0.0 };
        let input = random_input(&mut rng, alpha);
        let cfg = &configs[i % configs.len()];
        for alg in Algorithm::ALL {
            let got = alg.decide(&input, cfg);
            let want = expected(alg, &input, cfg);
            let got_target = match got.verdict {
                femtoho::Verdict::Stay => None,
                femtoho::Verdict::HandoverTo(c) => Some(c.0),
            };
            let reason_ok = alg != Algorithm::Proposed || got.reason.token() == want.reason;
            if got_target != want.target || !reason_ok {
                return (
                    checked,
                    Some(format!(
                        "point {i} {alg}: got {got:?}, oracle {want:?}, input {input:?}, cfg {cfg:?}"
                    )),
                );
            }
            checked += 1;
        }
    }
    (checked, None)
}
