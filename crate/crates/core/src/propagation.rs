//! Link budget: path loss, static shadowing, RSRP, noise floor and SINR.
//!
//! Macro links use `128.1 + 37.6·log10(d_km)` with a 10 m minimum distance
//! and an outdoor-to-indoor penetration loss when the UE is inside the
//! building. Femto links use `38.46 + 20·log10(d_m)` plus a fixed loss per
//! wall crossed. All cells share one carrier, so every non-serving cell is
//! an interferer.

use rand_distr::{Distribution, Normal};

use crate::config::SimConfig;
use crate::rng::{self, Purpose};
use crate::scenario::{Cell, CellId, CellKind, Point, Scenario, UeId};

// glibc's log10 is a wrapper around log and costs twice as much; this sits
// on the per-tick hot path.
#[inline]
fn fast_log10(x: f64) -> f64 {
    x.ln() * std::f64::consts::LOG10_E
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    (dbm * (std::f64::consts::LN_10 / 10.0)).exp()
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Thermal noise over `bandwidth_hz` at 290 K plus the receiver noise figure.
pub fn noise_floor_dbm(bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    -174.0 + 10.0 * bandwidth_hz.log10() + noise_figure_db
}

/// Per-link measurement for one UE and one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub cell_id: CellId,
    /// Distance-dependent loss including walls and building penetration,
    /// excluding shadowing.
    pub path_loss_db: f64,
    pub shadowing_db: f64,
    pub rsrp_dbm: f64,
    pub sinr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationModel {
    pub macro_intercept_db: f64,
    pub macro_slope_db: f64,
    pub macro_min_distance_m: f64,
    pub femto_intercept_db: f64,
    pub femto_slope_db: f64,
    pub femto_min_distance_m: f64,
    pub wall_loss_db: f64,
    pub penetration_loss_db: f64,
    pub shadowing_macro_db: f64,
    pub shadowing_femto_db: f64,
    pub noise_floor_dbm: f64,
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self::from_config(&SimConfig::default())
    }
}

impl PropagationModel {
    pub fn from_config(cfg: &SimConfig) -> Self {
        PropagationModel {
            macro_intercept_db: cfg.macro_pl_intercept_db,
            macro_slope_db: cfg.macro_pl_slope_db,
            macro_min_distance_m: cfg.macro_min_distance_m,
            femto_intercept_db: cfg.femto_pl_intercept_db,
            femto_slope_db: cfg.femto_pl_slope_db,
            femto_min_distance_m: cfg.femto_min_distance_m,
            wall_loss_db: cfg.wall_loss_db,
            penetration_loss_db: cfg.penetration_loss_db,
            shadowing_macro_db: cfg.shadowing_macro_db,
            shadowing_femto_db: cfg.shadowing_femto_db,
            noise_floor_dbm: noise_floor_dbm(cfg.bandwidth_hz, cfg.noise_figure_db),
        }
    }

    pub fn path_loss_macro(&self, distance_m: f64) -> f64 {
        let d = distance_m.max(self.macro_min_distance_m);
        self.macro_intercept_db + self.macro_slope_db * fast_log10(d / 1000.0)
    }

    pub fn path_loss_femto(&self, distance_m: f64, walls: u32) -> f64 {
        let d = distance_m.max(self.femto_min_distance_m);
        self.femto_intercept_db + self.femto_slope_db * fast_log10(d) + walls as f64 * self.wall_loss_db
    }

    /// Loss from `cell` to a UE at `position`, without shadowing.
    pub fn link_path_loss(&self, scenario: &Scenario, cell: &Cell, position: Point) -> f64 {
        let d = cell.position.distance(position);
        match cell.kind {
            CellKind::Macro => {
                let indoor = if scenario.is_indoor(position) {
                    self.penetration_loss_db
                } else {
                    0.0
                };
                self.path_loss_macro(d) + indoor
            }
            CellKind::Femto => {
                self.path_loss_femto(d, scenario.wall_count(cell.position, position))
            }
        }
    }

    pub fn rsrp_dbm(&self, scenario: &Scenario, cell: &Cell, position: Point, shadowing_db: f64) -> f64 {
        cell.tx_power_dbm - self.link_path_loss(scenario, cell, position) - shadowing_db
    }

    pub fn shadowing_sigma(&self, kind: CellKind) -> f64 {
        match kind {
            CellKind::Macro => self.shadowing_macro_db,
            CellKind::Femto => self.shadowing_femto_db,
        }
    }

    /// Static shadowing for every cell as seen by `ue`, indexed by cell id.
    /// Drawn once per run from the UE's shadowing stream.
    pub fn draw_shadowing(&self, seed: u64, ue: UeId, cells: &[Cell]) -> Vec<f64> {
        let mut rng = rng::stream(seed, Purpose::Shadowing, ue.0);
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        cells
            .iter()
            .map(|c| {
                let z: f64 = std_normal.sample(&mut rng);
                z * self.shadowing_sigma(c.kind)
            })
            .collect()
    }

    /// Computes every link of one UE. `out` is indexed by cell id.
    pub fn measure_all(
        &self,
        scenario: &Scenario,
        position: Point,
        shadowing: &[f64],
        out: &mut Vec<LinkSample>,
    ) {
        out.clear();
        for cell in &scenario.cells {
            let pl = self.link_path_loss(scenario, cell, position);
            let sh = shadowing[cell.id.0 as usize];
            out.push(LinkSample {
                cell_id: cell.id,
                path_loss_db: pl,
                shadowing_db: sh,
                rsrp_dbm: cell.tx_power_dbm - pl - sh,
                sinr_db: f64::NAN,
            });
        }
        let rsrp: Vec<f64> = out.iter().map(|l| l.rsrp_dbm).collect();
        let sinr = sinr_all_db(&rsrp, self.noise_floor_dbm);
        for (link, s) in out.iter_mut().zip(sinr) {
            link.sinr_db = s;
        }
    }
}

/// SINR of cell `serving` given the received power of every co-channel cell.
pub fn sinr_db(serving: usize, rsrp_dbm: &[f64], noise_dbm: f64) -> f64 {
    let signal = dbm_to_mw(rsrp_dbm[serving]);
    let interference: f64 = rsrp_dbm
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != serving)
        .map(|(_, p)| dbm_to_mw(*p))
        .sum();
    10.0 * (signal / (interference + dbm_to_mw(noise_dbm))).log10()
}

/// SINR for each cell as if it were serving, in one pass.
pub fn sinr_all_db(rsrp_dbm: &[f64], noise_dbm: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(rsrp_dbm.len());
    let mut scratch = Vec::with_capacity(rsrp_dbm.len());
    sinr_all_into(rsrp_dbm, noise_dbm, None, &mut scratch, &mut out);
    out
}

/// Allocation-free form of [`sinr_all_db`] for the simulation loop. Cells
/// outside `wanted` (when given) still interfere but their own SINR is left
/// as NaN.
pub fn sinr_all_into(
    rsrp_dbm: &[f64],
    noise_dbm: f64,
    wanted: Option<&[bool]>,
    mw: &mut Vec<f64>,
    out: &mut Vec<f64>,
) {
    mw.clear();
    mw.extend(rsrp_dbm.iter().map(|p| dbm_to_mw(*p)));
    let noise = dbm_to_mw(noise_dbm);
    let total: f64 = mw.iter().sum::<f64>() + noise;
    out.clear();
    for (i, s) in mw.iter().enumerate() {
        if wanted.is_some_and(|w| !w[i]) {
            out.push(f64::NAN);
            continue;
        }
        // Subtracting from the total loses precision when one cell
        // dominates; fall back to an explicit sum in that case.
        let rest = total - s;
        let denom = if rest > 1e-6 * total {
            rest
        } else {
            mw.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p)
                .sum::<f64>()
                + noise
        };
        out.push(10.0 * fast_log10(s / denom));
    }
}
