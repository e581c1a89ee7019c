//! Simulation configuration.
//!
//! [`SimConfig`] holds every tunable of the simulator in one flat struct so a
//! `key = value` config file maps directly onto it. Defaults reproduce the
//! reference scenario: 20 MHz carrier, 43 dBm macro, 20 dBm femto access
//! points, a 5×5 grid of 100 m² apartments with one FAP and nine CSG users
//! each.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Handover decision algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Filtered RSS with combined decision parameter and hysteresis margin.
    Rss,
    /// Filtered RSS plus a path-loss comparison.
    RssPathloss,
    /// Speed class gating with proactive/reactive execution.
    Speed,
    /// Speed, access, bandwidth, signal/SINR and traffic gate chain.
    Proposed,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Rss,
        Algorithm::RssPathloss,
        Algorithm::Speed,
        Algorithm::Proposed,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Algorithm::Rss => "rss",
            Algorithm::RssPathloss => "rss-pathloss",
            Algorithm::Speed => "speed",
            Algorithm::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "rss" => Ok(Algorithm::Rss),
            "rss-pathloss" => Ok(Algorithm::RssPathloss),
            "speed" => Ok(Algorithm::Speed),
            "proposed" => Ok(Algorithm::Proposed),
            other => Err(format!(
                "unknown algorithm `{other}` (expected rss, rss-pathloss, speed or proposed)"
            )),
        }
    }
}

/// How the bandwidth gate of the proposed algorithm admits a UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// Admit while the number of attached UEs is below capacity.
    Headcount,
    /// Admit when the Shannon capacity at the candidate SINR, shared equally
    /// among the attached UEs plus the newcomer, covers its required rate.
    Rate,
}

impl FromStr for Admission {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "headcount" => Ok(Admission::Headcount),
            "rate" => Ok(Admission::Rate),
            other => Err(format!("unknown admission mode `{other}` (expected headcount or rate)")),
        }
    }
}

impl fmt::Display for Admission {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Admission::Headcount => "headcount",
            Admission::Rate => "rate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    // scenario
    pub bandwidth_hz: f64,
    pub macro_tx_dbm: f64,
    pub fap_tx_dbm: f64,
    pub apartment_side_m: f64,
    pub grid_rows: u32,
    pub grid_cols: u32,
    pub faps_per_apartment: u32,
    pub csg_users_per_fap: u32,
    pub mue_count: u32,
    /// Width of the outdoor ring around the building where MUEs are placed;
    /// also the margin of the mobility bounding box.
    pub area_margin_m: f64,
    /// Number of FAPs each MUE is a CSG member of.
    pub mue_whitelist_size: u32,
    pub fue_speed_kmh: f64,
    /// MUE speeds, assigned round-robin over the MUE population.
    pub mue_speeds_kmh: Vec<f64>,
    pub voip_rate_bps: f64,
    pub video_rate_bps: f64,
    /// Fraction of UEs carrying non-real-time traffic; the rest split evenly
    /// between VoIP and video.
    pub non_real_time_fraction: f64,
    /// `None` ("auto") sizes each FAP for its whole CSG member set,
    /// residents plus enrolled MUEs.
    pub fap_capacity_ues: Option<u32>,
    pub tick_s: f64,
    pub sim_duration_s: f64,
    pub enb_fap_distance_m: f64,
    pub seed: u64,
    pub algorithm: Algorithm,

    // propagation
    pub macro_pl_intercept_db: f64,
    pub macro_pl_slope_db: f64,
    pub macro_min_distance_m: f64,
    pub femto_pl_intercept_db: f64,
    pub femto_pl_slope_db: f64,
    pub femto_min_distance_m: f64,
    pub wall_loss_db: f64,
    pub penetration_loss_db: f64,
    pub shadowing_macro_db: f64,
    pub shadowing_femto_db: f64,
    pub measurement_noise_db: f64,
    pub noise_figure_db: f64,

    // mobility
    pub epoch_s: f64,
    pub confine_fues: bool,

    // filtering
    pub beta: f64,
    pub alpha: f64,

    // handover
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

    // metrics
    pub include_fues: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            bandwidth_hz: 20e6,
            macro_tx_dbm: 43.0,
            fap_tx_dbm: 20.0,
            apartment_side_m: 10.0,
            grid_rows: 5,
            grid_cols: 5,
            faps_per_apartment: 1,
            csg_users_per_fap: 9,
            mue_count: 30,
            area_margin_m: 50.0,
            mue_whitelist_size: 1,
            fue_speed_kmh: 3.0,
            mue_speeds_kmh: vec![3.0, 7.0, 30.0],
            voip_rate_bps: 64e3,
            video_rate_bps: 1e6,
            non_real_time_fraction: 0.0,
            fap_capacity_ues: None,
            tick_s: 0.1,
            sim_duration_s: 60.0,
            enb_fap_distance_m: 100.0,
            seed: 1,
            algorithm: Algorithm::Proposed,

            macro_pl_intercept_db: 128.1,
            macro_pl_slope_db: 37.6,
            macro_min_distance_m: 10.0,
            femto_pl_intercept_db: 38.46,
            femto_pl_slope_db: 20.0,
            femto_min_distance_m: 0.1,
            wall_loss_db: 10.0,
            penetration_loss_db: 20.0,
            shadowing_macro_db: 8.0,
            shadowing_femto_db: 4.0,
            measurement_noise_db: 1.0,
            noise_figure_db: 9.0,

            epoch_s: 5.0,
            confine_fues: true,

            beta: 0.9,
            alpha: 0.0,

            hmm_db: 2.0,
            s_f_th_dbm: -72.0,
            rsrp_th_f_dbm: -72.0,
            speed_low_kmh: 5.0,
            speed_high_kmh: 10.0,
            ttt_reactive_s: 0.4,
            proactive_margin_reduction_db: 2.0,
            sinr_min_db: -4.0,
            exec_delay_s: 0.2,
            pingpong_window_s: 1.0,
            ho_failure_threshold_dbm: -110.0,
            admission: Admission::Headcount,

            include_fues: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| format!("{key}: cannot parse `{}`", value.trim()))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("{key}: expected true or false, got `{other}`")),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|item| parse_num::<f64>(key, item))
        .collect()
}

impl SimConfig {
    /// Every key accepted by [`SimConfig::set`], in declaration order.
    pub const KEYS: &'static [&'static str] = &[
        "bandwidth_hz",
        "macro_tx_dbm",
        "fap_tx_dbm",
        "apartment_side_m",
        "grid_rows",
        "grid_cols",
        "faps_per_apartment",
        "csg_users_per_fap",
        "mue_count",
        "area_margin_m",
        "mue_whitelist_size",
        "fue_speed_kmh",
        "mue_speeds_kmh",
        "voip_rate_bps",
        "video_rate_bps",
        "non_real_time_fraction",
        "fap_capacity_ues",
        "tick_s",
        "sim_duration_s",
        "enb_fap_distance_m",
        "seed",
        "algorithm",
        "macro_pl_intercept_db",
        "macro_pl_slope_db",
        "macro_min_distance_m",
        "femto_pl_intercept_db",
        "femto_pl_slope_db",
        "femto_min_distance_m",
        "wall_loss_db",
        "penetration_loss_db",
        "shadowing_macro_db",
        "shadowing_femto_db",
        "measurement_noise_db",
        "noise_figure_db",
        "epoch_s",
        "confine_fues",
        "beta",
        "alpha",
        "hmm_db",
        "s_f_th_dbm",
        "rsrp_th_f_dbm",
        "speed_low_kmh",
        "speed_high_kmh",
        "ttt_reactive_s",
        "proactive_margin_reduction_db",
        "sinr_min_db",
        "exec_delay_s",
        "pingpong_window_s",
        "ho_failure_threshold_dbm",
        "admission",
        "include_fues",
    ];

    /// Assigns one field from its textual form.
    ///
    /// Returns [`Error::UnknownKey`] for a key that is not a field name and
    /// [`Error::Usage`] when the value does not parse.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let r: Result<(), String> = (|| {
            match key {
                "bandwidth_hz" => self.bandwidth_hz = parse_num(key, value)?,
                "macro_tx_dbm" => self.macro_tx_dbm = parse_num(key, value)?,
                "fap_tx_dbm" => self.fap_tx_dbm = parse_num(key, value)?,
                "apartment_side_m" => self.apartment_side_m = parse_num(key, value)?,
                "grid_rows" => self.grid_rows = parse_num(key, value)?,
                "grid_cols" => self.grid_cols = parse_num(key, value)?,
                "faps_per_apartment" => self.faps_per_apartment = parse_num(key, value)?,
                "csg_users_per_fap" => self.csg_users_per_fap = parse_num(key, value)?,
                "mue_count" => self.mue_count = parse_num(key, value)?,
                "area_margin_m" => self.area_margin_m = parse_num(key, value)?,
                "mue_whitelist_size" => self.mue_whitelist_size = parse_num(key, value)?,
                "fue_speed_kmh" => self.fue_speed_kmh = parse_num(key, value)?,
                "mue_speeds_kmh" => self.mue_speeds_kmh = parse_list(key, value)?,
                "voip_rate_bps" => self.voip_rate_bps = parse_num(key, value)?,
                "video_rate_bps" => self.video_rate_bps = parse_num(key, value)?,
                "non_real_time_fraction" => self.non_real_time_fraction = parse_num(key, value)?,
                "fap_capacity_ues" => {
                    self.fap_capacity_ues = match value.trim() {
                        "auto" => None,
                        v => Some(parse_num(key, v)?),
                    }
                }
                "tick_s" => self.tick_s = parse_num(key, value)?,
                "sim_duration_s" => self.sim_duration_s = parse_num(key, value)?,
                "enb_fap_distance_m" => self.enb_fap_distance_m = parse_num(key, value)?,
                "seed" => self.seed = parse_num(key, value)?,
                "algorithm" => self.algorithm = value.parse()?,
                "macro_pl_intercept_db" => self.macro_pl_intercept_db = parse_num(key, value)?,
                "macro_pl_slope_db" => self.macro_pl_slope_db = parse_num(key, value)?,
                "macro_min_distance_m" => self.macro_min_distance_m = parse_num(key, value)?,
                "femto_pl_intercept_db" => self.femto_pl_intercept_db = parse_num(key, value)?,
                "femto_pl_slope_db" => self.femto_pl_slope_db = parse_num(key, value)?,
                "femto_min_distance_m" => self.femto_min_distance_m = parse_num(key, value)?,
                "wall_loss_db" => self.wall_loss_db = parse_num(key, value)?,
                "penetration_loss_db" => self.penetration_loss_db = parse_num(key, value)?,
                "shadowing_macro_db" => self.shadowing_macro_db = parse_num(key, value)?,
                "shadowing_femto_db" => self.shadowing_femto_db = parse_num(key, value)?,
                "measurement_noise_db" => self.measurement_noise_db = parse_num(key, value)?,
                "noise_figure_db" => self.noise_figure_db = parse_num(key, value)?,
                "epoch_s" => self.epoch_s = parse_num(key, value)?,
                "confine_fues" => self.confine_fues = parse_bool(key, value)?,
                "beta" => self.beta = parse_num(key, value)?,
                "alpha" => self.alpha = parse_num(key, value)?,
                "hmm_db" => self.hmm_db = parse_num(key, value)?,
                "s_f_th_dbm" => self.s_f_th_dbm = parse_num(key, value)?,
                "rsrp_th_f_dbm" => self.rsrp_th_f_dbm = parse_num(key, value)?,
                "speed_low_kmh" => self.speed_low_kmh = parse_num(key, value)?,
                "speed_high_kmh" => self.speed_high_kmh = parse_num(key, value)?,
                "ttt_reactive_s" => self.ttt_reactive_s = parse_num(key, value)?,
                "proactive_margin_reduction_db" => {
                    self.proactive_margin_reduction_db = parse_num(key, value)?
                }
                "sinr_min_db" => self.sinr_min_db = parse_num(key, value)?,
                "exec_delay_s" => self.exec_delay_s = parse_num(key, value)?,
                "pingpong_window_s" => self.pingpong_window_s = parse_num(key, value)?,
                "ho_failure_threshold_dbm" => self.ho_failure_threshold_dbm = parse_num(key, value)?,
                "admission" => self.admission = value.parse()?,
                "include_fues" => self.include_fues = parse_bool(key, value)?,
                _ => return Err(String::new()),
            }
            Ok(())
        })();
        match r {
            Ok(()) => Ok(()),
            Err(msg) if msg.is_empty() => Err(Error::UnknownKey(key.to_string())),
            Err(msg) => Err(Error::Usage(msg)),
        }
    }

    /// Overlays `key = value` lines onto `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::ConfigParse {
                    line: idx + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            match self.set(key, value) {
                Ok(()) => {}
                Err(Error::Usage(message)) => {
                    return Err(Error::ConfigParse {
                        line: idx + 1,
                        message,
                    })
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Lists every violated invariant; empty when the config is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let finite = [
            ("bandwidth_hz", self.bandwidth_hz),
            ("macro_tx_dbm", self.macro_tx_dbm),
            ("fap_tx_dbm", self.fap_tx_dbm),
            ("apartment_side_m", self.apartment_side_m),
            ("area_margin_m", self.area_margin_m),
            ("fue_speed_kmh", self.fue_speed_kmh),
            ("voip_rate_bps", self.voip_rate_bps),
            ("video_rate_bps", self.video_rate_bps),
            ("non_real_time_fraction", self.non_real_time_fraction),
            ("tick_s", self.tick_s),
            ("sim_duration_s", self.sim_duration_s),
            ("enb_fap_distance_m", self.enb_fap_distance_m),
            ("macro_pl_intercept_db", self.macro_pl_intercept_db),
            ("macro_pl_slope_db", self.macro_pl_slope_db),
            ("macro_min_distance_m", self.macro_min_distance_m),
            ("femto_pl_intercept_db", self.femto_pl_intercept_db),
            ("femto_pl_slope_db", self.femto_pl_slope_db),
            ("femto_min_distance_m", self.femto_min_distance_m),
            ("wall_loss_db", self.wall_loss_db),
            ("penetration_loss_db", self.penetration_loss_db),
            ("shadowing_macro_db", self.shadowing_macro_db),
            ("shadowing_femto_db", self.shadowing_femto_db),
            ("measurement_noise_db", self.measurement_noise_db),
            ("noise_figure_db", self.noise_figure_db),
            ("epoch_s", self.epoch_s),
            ("beta", self.beta),
            ("alpha", self.alpha),
            ("hmm_db", self.hmm_db),
            ("s_f_th_dbm", self.s_f_th_dbm),
            ("rsrp_th_f_dbm", self.rsrp_th_f_dbm),
            ("speed_low_kmh", self.speed_low_kmh),
            ("speed_high_kmh", self.speed_high_kmh),
            ("ttt_reactive_s", self.ttt_reactive_s),
            ("proactive_margin_reduction_db", self.proactive_margin_reduction_db),
            ("sinr_min_db", self.sinr_min_db),
            ("exec_delay_s", self.exec_delay_s),
            ("pingpong_window_s", self.pingpong_window_s),
            ("ho_failure_threshold_dbm", self.ho_failure_threshold_dbm),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                v.push(format!("{name} must be finite"));
            }
        }
        let mut positive = |name: &str, value: f64| {
            if value.is_finite() && value <= 0.0 {
                v.push(format!("{name} must be > 0"));
            }
        };
        positive("bandwidth_hz", self.bandwidth_hz);
        positive("tick_s", self.tick_s);
        positive("apartment_side_m", self.apartment_side_m);
        positive("epoch_s", self.epoch_s);
        positive("pingpong_window_s", self.pingpong_window_s);
        positive("macro_min_distance_m", self.macro_min_distance_m);
        positive("femto_min_distance_m", self.femto_min_distance_m);

        for (name, value) in [("grid_rows", self.grid_rows), ("grid_cols", self.grid_cols)] {
            if value < 1 {
                v.push(format!("{name} must be ≥ 1"));
            }
        }
        let mut non_negative = |name: &str, value: f64| {
            if value.is_finite() && value < 0.0 {
                v.push(format!("{name} must be ≥ 0"));
            }
        };
        non_negative("enb_fap_distance_m", self.enb_fap_distance_m);
        non_negative("sim_duration_s", self.sim_duration_s);
        non_negative("area_margin_m", self.area_margin_m);
        non_negative("fue_speed_kmh", self.fue_speed_kmh);
        non_negative("shadowing_macro_db", self.shadowing_macro_db);
        non_negative("shadowing_femto_db", self.shadowing_femto_db);
        non_negative("measurement_noise_db", self.measurement_noise_db);
        non_negative("wall_loss_db", self.wall_loss_db);
        non_negative("penetration_loss_db", self.penetration_loss_db);
        non_negative("hmm_db", self.hmm_db);
        non_negative("ttt_reactive_s", self.ttt_reactive_s);
        non_negative("exec_delay_s", self.exec_delay_s);
        non_negative("speed_low_kmh", self.speed_low_kmh);
        non_negative("voip_rate_bps", self.voip_rate_bps);
        non_negative("video_rate_bps", self.video_rate_bps);

        if self.mue_speeds_kmh.iter().any(|s| !s.is_finite() || *s < 0.0) {
            v.push("mue_speeds_kmh entries must be finite and ≥ 0".to_string());
        }
        if self.mue_count > 0 && self.mue_speeds_kmh.is_empty() {
            v.push("mue_speeds_kmh must not be empty when mue_count > 0".to_string());
        }
        if self.beta.is_finite() && !(0.0..1.0).contains(&self.beta) {
            v.push("beta must be in [0, 1)".to_string());
        }
        if self.alpha.is_finite() && !(0.0..=1.0).contains(&self.alpha) {
            v.push("alpha must be in [0, 1]".to_string());
        }
        if self.non_real_time_fraction.is_finite()
            && !(0.0..=1.0).contains(&self.non_real_time_fraction)
        {
            v.push("non_real_time_fraction must be in [0, 1]".to_string());
        }
        if self.speed_low_kmh.is_finite()
            && self.speed_high_kmh.is_finite()
            && self.speed_high_kmh < self.speed_low_kmh
        {
            v.push("speed_high_kmh must be ≥ speed_low_kmh".to_string());
        }
        if self.faps_per_apartment < 1 {
            v.push("faps_per_apartment must be ≥ 1".to_string());
        }
        let fap_count = self.grid_rows as u64 * self.grid_cols as u64 * self.faps_per_apartment as u64;
        if self.mue_count > 0 && self.mue_whitelist_size as u64 > fap_count {
            v.push("mue_whitelist_size must not exceed the number of FAPs".to_string());
        }
        v
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }

    /// Number of simulation ticks, `⌈sim_duration_s / tick_s⌉`.
    pub fn tick_count(&self) -> u64 {
        let ratio = self.sim_duration_s / self.tick_s;
        // Absorb representation error so 60.0 / 0.1 gives 600, not 601.
        (ratio - 1e-9).ceil().max(0.0) as u64
    }

    /// Nominal FAP capacity; with "auto" the scenario raises it to the
    /// full CSG member count once visitors are enrolled.
    pub fn fap_capacity(&self) -> u32 {
        self.fap_capacity_ues.unwrap_or(self.csg_users_per_fap)
    }
}
