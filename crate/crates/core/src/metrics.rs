//! Per-run metrics and distance-sweep aggregation.
//!
//! The FAP assignment probability is the share of eligible UE-ticks spent
//! attached to any femto cell. Eligible UEs are the macro users by default
//! (the population for which inbound handover is meaningful); resident FUEs
//! can be included with `include_fues`. Handover counts are taken from the
//! event stream of the same population.

use std::fmt;
use std::str::FromStr;

use crate::config::Algorithm;
use crate::engine::Event;
use crate::handover::EventKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    FapAssignmentProbability,
    HandoversPerUe,
    PingpongsPerUe,
    FailuresPerUe,
    HoCount,
    PingpongCount,
    HoFailureCount,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::FapAssignmentProbability,
        Metric::HandoversPerUe,
        Metric::PingpongsPerUe,
        Metric::FailuresPerUe,
        Metric::HoCount,
        Metric::PingpongCount,
        Metric::HoFailureCount,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Metric::FapAssignmentProbability => "fap_assignment_probability",
            Metric::HandoversPerUe => "handovers_per_ue",
            Metric::PingpongsPerUe => "pingpongs_per_ue",
            Metric::FailuresPerUe => "ho_failures_per_ue",
            Metric::HoCount => "ho_count",
            Metric::PingpongCount => "pingpong_count",
            Metric::HoFailureCount => "ho_failure_count",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| format!("unknown metric `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub algorithm: Algorithm,
    pub eligible_ues: u32,
    pub ue_ticks: u64,
    pub fap_ue_ticks: u64,
    pub fap_assignment_probability: f64,
    pub ho_count: u64,
    pub pingpong_count: u64,
    pub ho_failure_count: u64,
}

impl MetricsReport {
    fn per_ue(&self, count: u64) -> f64 {
        if self.eligible_ues == 0 {
            0.0
        } else {
            count as f64 / self.eligible_ues as f64
        }
    }

    pub fn value(&self, metric: Metric) -> f64 {
        match metric {
            Metric::FapAssignmentProbability => self.fap_assignment_probability,
            Metric::HandoversPerUe => self.per_ue(self.ho_count),
            Metric::PingpongsPerUe => self.per_ue(self.pingpong_count),
            Metric::FailuresPerUe => self.per_ue(self.ho_failure_count),
            Metric::HoCount => self.ho_count as f64,
            Metric::PingpongCount => self.pingpong_count as f64,
            Metric::HoFailureCount => self.ho_failure_count as f64,
        }
    }
}

/// Streaming accumulator for one algorithm in one run.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    algorithm: Algorithm,
    eligible: Vec<bool>,
    ue_ticks: u64,
    fap_ue_ticks: u64,
    ho_count: u64,
    pingpong_count: u64,
    ho_failure_count: u64,
}

impl MetricsAccumulator {
    /// `eligible[ue]` marks the UEs that count toward the report.
    pub fn new(algorithm: Algorithm, eligible: Vec<bool>) -> Self {
        MetricsAccumulator {
            algorithm,
            eligible,
            ue_ticks: 0,
            fap_ue_ticks: 0,
            ho_count: 0,
            pingpong_count: 0,
            ho_failure_count: 0,
        }
    }

    /// Records one UE-tick of attachment.
    pub fn record_attachment(&mut self, ue: usize, on_fap: bool) {
        if self.eligible[ue] {
            self.ue_ticks += 1;
            if on_fap {
                self.fap_ue_ticks += 1;
            }
        }
    }

    pub fn record(&mut self, event: &Event) {
        if !self.eligible[event.ue_id.0 as usize] {
            return;
        }
        match event.kind {
            EventKind::HoComplete => {
                self.ho_count += 1;
                if event.reason == "pingpong" {
                    self.pingpong_count += 1;
                }
            }
            EventKind::HoFail => self.ho_failure_count += 1,
            EventKind::HoStart => {}
        }
    }

    pub fn finalize(&self) -> MetricsReport {
        MetricsReport {
            algorithm: self.algorithm,
            eligible_ues: self.eligible.iter().filter(|e| **e).count() as u32,
            ue_ticks: self.ue_ticks,
            fap_ue_ticks: self.fap_ue_ticks,
            fap_assignment_probability: if self.ue_ticks == 0 {
                0.0
            } else {
                self.fap_ue_ticks as f64 / self.ue_ticks as f64
            },
            ho_count: self.ho_count,
            pingpong_count: self.pingpong_count,
            ho_failure_count: self.ho_failure_count,
        }
    }
}

/// Mean and sample standard deviation (n − 1 denominator; 0 for n ≤ 1).
/// Summation runs over the values sorted by magnitude so the result does not
/// depend on input order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if sorted.len() < 2 {
        return (mean, 0.0);
    }
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    dev.sort_by(|a, b| a.total_cmp(b));
    (mean, (dev.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub distance_m: f64,
    pub algorithm: Algorithm,
    pub metric: Metric,
    pub mean: f64,
    pub std: f64,
    pub replications: u32,
}

pub const SWEEP_CSV_HEADER: &str = "distance_m,algorithm,metric,mean,std,replications";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Builds rows from per-distance replication reports.
    ///
    /// `reports[d][r]` holds the reports of replication `r` at distance `d`,
    /// one per algorithm in `algorithms` order.
    pub fn from_reports(
        distances: &[f64],
        algorithms: &[Algorithm],
        reports: &[Vec<Vec<MetricsReport>>],
    ) -> SweepTable {
        let mut rows = Vec::new();
        for (d_idx, distance) in distances.iter().enumerate() {
            let reps = &reports[d_idx];
            for (a_idx, alg) in algorithms.iter().enumerate() {
                for metric in Metric::ALL {
                    let values: Vec<f64> = reps.iter().map(|r| r[a_idx].value(metric)).collect();
                    let (mean, std) = mean_std(&values);
                    rows.push(SweepRow {
                        distance_m: *distance,
                        algorithm: *alg,
                        metric,
                        mean,
                        std,
                        replications: values.len() as u32,
                    });
                }
            }
        }
        SweepTable { rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn distances(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.distance_m) {
                out.push(r.distance_m);
            }
        }
        out
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut out: Vec<Algorithm> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.algorithm) {
                out.push(r.algorithm);
            }
        }
        out
    }

    pub fn get(&self, distance_m: f64, algorithm: Algorithm, metric: Metric) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.distance_m == distance_m && r.algorithm == algorithm && r.metric == metric)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_sig(r.distance_m, 6),
                r.algorithm,
                r.metric,
                fmt_sig(r.mean, 6),
                fmt_sig(r.std, 6),
                r.replications
            ));
        }
        out
    }
}

/// Formats like C's `%.{sig}g`: `sig` significant digits, trailing zeros
/// trimmed, scientific notation outside `[1e-4, 10^sig)`.
pub fn fmt_sig(value: f64, sig: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return format!("{value}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{value:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{CellId, UeId};

    fn ev(ue: u32, kind: EventKind, reason: &'static str) -> Event {
        Event {
            tick: 1,
            ue_id: UeId(ue),
            kind,
            from: CellId(0),
            to: CellId(1),
            reason,
        }
    }

    #[test]
    fn full_occupancy_is_probability_one() {
        let mut acc = MetricsAccumulator::new(Algorithm::Rss, vec![true]);
        for _ in 0..50 {
            acc.record_attachment(0, true);
        }
        let r = acc.finalize();
        assert_eq!(r.fap_assignment_probability, 1.0);
        assert_eq!((r.ho_count, r.pingpong_count), (0, 0));
    }

    #[test]
    fn alternating_attachment_is_half() {
        let mut acc = MetricsAccumulator::new(Algorithm::Rss, vec![true]);
        for t in 0..101 {
            acc.record_attachment(0, t % 2 == 1);
        }
        let p = acc.finalize().fap_assignment_probability;
        assert!((p - 0.5).abs() <= 1.0 / 101.0);
    }

    #[test]
    fn only_eligible_ues_count() {
        let mut acc = MetricsAccumulator::new(Algorithm::Rss, vec![false, true]);
        acc.record_attachment(0, true);
        acc.record_attachment(1, false);
        acc.record(&ev(0, EventKind::HoComplete, "ok"));
        acc.record(&ev(1, EventKind::HoComplete, "pingpong"));
        acc.record(&ev(1, EventKind::HoStart, "proactive"));
        acc.record(&ev(1, EventKind::HoFail, "rsrp-below-threshold"));
        let r = acc.finalize();
        assert_eq!(r.fap_assignment_probability, 0.0);
        assert_eq!((r.ho_count, r.pingpong_count, r.ho_failure_count), (1, 1, 1));
        assert_eq!(r.eligible_ues, 1);
        assert_eq!(r.value(Metric::HandoversPerUe), 1.0);
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        assert_eq!(mean_std(&[2.0, 2.0, 2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.290_994_448_735_805_6).abs() < 1e-12);
    }

    #[test]
    fn fmt_sig_matches_printf_g() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(50.0, 6), "50");
        assert_eq!(fmt_sig(0.123456789, 6), "0.123457");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e+06");
        assert_eq!(fmt_sig(0.00001234, 6), "1.234e-05");
        assert_eq!(fmt_sig(-2.5, 6), "-2.5");
        assert_eq!(fmt_sig(999999.5, 6), "1e+06");
        assert_eq!(fmt_sig(0.0001, 6), "0.0001");
    }

    fn report(alg: Algorithm, p: f64, ho: u64) -> MetricsReport {
        MetricsReport {
            algorithm: alg,
            eligible_ues: 10,
            ue_ticks: 100,
            fap_ue_ticks: (p * 100.0) as u64,
            fap_assignment_probability: p,
            ho_count: ho,
            pingpong_count: 0,
            ho_failure_count: 0,
        }
    }

    #[test]
    fn single_rep_row_equals_report() {
        let t = SweepTable::from_reports(
            &[50.0],
            &[Algorithm::Proposed],
            &[vec![vec![report(Algorithm::Proposed, 0.25, 7)]]],
        );
        let row = t.get(50.0, Algorithm::Proposed, Metric::FapAssignmentProbability).unwrap();
        assert_eq!((row.mean, row.std, row.replications), (0.25, 0.0, 1));
        let row = t.get(50.0, Algorithm::Proposed, Metric::HandoversPerUe).unwrap();
        assert_eq!(row.mean, 0.7);
        assert!(t.to_csv().starts_with("distance_m,algorithm,metric,mean,std,replications\n"));
    }

    #[test]
    fn row_count_is_distances_times_algorithms() {
        let distances: Vec<f64> = (1..=10).map(|i| i as f64 * 50.0).collect();
        let reports: Vec<Vec<Vec<MetricsReport>>> = distances
            .iter()
            .map(|_| vec![Algorithm::ALL.iter().map(|a| report(*a, 0.1, 1)).collect()])
            .collect();
        let t = SweepTable::from_reports(&distances, &Algorithm::ALL, &reports);
        assert_eq!(t.rows.len(), 10 * 4 * Metric::ALL.len());
        assert_eq!(t.distances().len(), 10);
        assert_eq!(t.algorithms(), Algorithm::ALL.to_vec());
    }

    proptest::proptest! {
        #[test]
        fn aggregation_is_permutation_invariant(
            mut values in proptest::collection::vec(0.0f64..1.0, 1..30),
            seed in 0u64..1000,
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let a = mean_std(&values);
            values.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            proptest::prop_assert_eq!(a, mean_std(&values));
        }
    }
}
