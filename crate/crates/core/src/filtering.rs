//! Exponential-window smoothing of RSRP samples and the combined femto/macro
//! decision parameter.
//!
//! The window `w[j] = (1 − β)·β^j` is applied recursively:
//! `s̄[k] = (1 − β)·s[k] + β·s̄[k − 1]`, seeded with the first sample. The
//! weights sum to one, so a constant input passes through unchanged.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterState {
    beta: f64,
    last: Option<f64>,
}

impl FilterState {
    /// # Panics
    /// If `beta` is outside `[0, 1)`.
    pub fn new(beta: f64) -> Self {
        assert!((0.0..1.0).contains(&beta), "beta must be in [0, 1), got {beta}");
        FilterState { beta, last: None }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn last(&self) -> Option<f64> {
        self.last
    }

    /// Folds in one sample and returns the filtered value.
    pub fn update(&mut self, sample: f64) -> f64 {
        let filtered = match self.last {
            None => sample,
            // Same as (1 − β)·s + β·prev, but exact when s == prev.
            Some(prev) => prev + (1.0 - self.beta) * (sample - prev),
        };
        self.last = Some(filtered);
        filtered
    }
}

/// Functional form of [`FilterState::update`].
pub fn filter_update(state: FilterState, sample: f64) -> (FilterState, f64) {
    let mut next = state;
    let filtered = next.update(sample);
    (next, filtered)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombineParams {
    pub alpha: f64,
}

/// `s_pro = s̄_f + α·s̄_m`, computed on dBm values as-is.
pub fn combined_parameter(filtered_femto_dbm: f64, filtered_macro_dbm: f64, params: CombineParams) -> f64 {
    filtered_femto_dbm + params.alpha * filtered_macro_dbm
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Expanded window sum including the weight left on the seed sample.
    fn convolution_oracle(samples: &[f64], beta: f64) -> Vec<f64> {
        (0..samples.len())
            .map(|k| {
                let mut acc = beta.powi(k as i32) * samples[0];
                for j in 0..k {
                    acc += (1.0 - beta) * beta.powi(j as i32) * samples[k - j];
                }
                acc
            })
            .collect()
    }

    fn run(beta: f64, samples: &[f64]) -> Vec<f64> {
        let mut f = FilterState::new(beta);
        samples.iter().map(|s| f.update(*s)).collect()
    }

    #[test]
    fn beta_zero_is_identity() {
        let xs = [-70.0, -65.5, -90.0, -40.0];
        assert_eq!(run(0.0, &xs), xs.to_vec());
    }

    #[test]
    fn constant_input_passes_through() {
        for beta in [0.0, 0.5, 0.9, 0.99] {
            assert!(run(beta, &[-73.25; 500]).iter().all(|v| *v == -73.25));
        }
    }

    #[test]
    fn half_beta_example() {
        assert_eq!(run(0.5, &[0.0, 10.0, 10.0]), vec![0.0, 5.0, 7.5]);
        assert_eq!(convolution_oracle(&[0.0, 10.0, 10.0], 0.5), vec![0.0, 5.0, 7.5]);
    }

    #[test]
    fn functional_form_matches() {
        let (s, v) = filter_update(FilterState::new(0.5), 4.0);
        assert_eq!(v, 4.0);
        let (_, v) = filter_update(s, 8.0);
        assert_eq!(v, 6.0);
    }

    #[test]
    #[should_panic]
    fn beta_one_is_rejected() {
        FilterState::new(1.0);
    }

    #[test]
    fn combined_parameter_examples() {
        let p0 = CombineParams { alpha: 0.0 };
        assert_eq!(combined_parameter(-80.0, -60.0, p0), -80.0);
        let p1 = CombineParams { alpha: 1.0 };
        assert_eq!(combined_parameter(-80.0, -60.0, p1), -140.0);
    }

    proptest::proptest! {
        #[test]
        fn recursion_matches_convolution(
            samples in proptest::collection::vec(-120.0f64..-20.0, 1..260),
            beta in proptest::sample::select(vec![0.0, 0.5, 0.9, 0.99]),
        ) {
            let got = run(beta, &samples);
            let want = convolution_oracle(&samples, beta);
            for (g, w) in got.iter().zip(&want) {
                proptest::prop_assert!((g - w).abs() < 1e-9, "{} vs {}", g, w);
            }
        }

        #[test]
        fn output_bounded_by_input_history(
            samples in proptest::collection::vec(-120.0f64..-20.0, 1..100),
            beta in 0.0f64..0.999,
        ) {
            let out = run(beta, &samples);
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (s, o) in samples.iter().zip(&out) {
                lo = lo.min(*s);
                hi = hi.max(*s);
                proptest::prop_assert!(*o >= lo - 1e-9 && *o <= hi + 1e-9);
            }
        }

        #[test]
        fn combined_monotone_in_macro(f in -120.0f64..-20.0, m in -120.0f64..-20.0, dm in 0.001f64..30.0, alpha in 0.001f64..=1.0) {
            let p = CombineParams { alpha };
            proptest::prop_assert!(combined_parameter(f, m + dm, p) > combined_parameter(f, m, p));
            proptest::prop_assert_eq!(combined_parameter(f, m, CombineParams { alpha: 0.0 }), f);
        }
    }
}
