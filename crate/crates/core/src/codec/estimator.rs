use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TimeBounds;

/// Window count from the interval variance:
/// `L = ceil(Δ_t / (2·sqrt(σ)))`, clamped to `[1, l_max]`. A zero variance
/// maps to `l_max`.
pub fn const_window_count(variance: f64, bounds: &TimeBounds, l_max: u32) -> u32 {
    let l_max = l_max.max(1);
    if !(variance > 0.0) {
        return l_max;
    }
    let ratio = bounds.range() / (2.0 * variance.sqrt());
    if ratio >= f64::from(l_max) {
        l_max
    } else {
        (ratio.ceil() as u32).clamp(1, l_max)
    }
}

/// Population mean and variance of the buffer.
pub fn running_stats(buffer: &[f64]) -> Result<(f64, f64)> {
    if buffer.len() <= 1 {
        return Err(Error::invalid(format!(
            "statistics window needs more than one sample, got {}",
            buffer.len()
        )));
    }
    let m = buffer.len() as f64;
    let mean = buffer.iter().sum::<f64>() / m;
    let var = buffer.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / m;
    Ok((mean, var))
}

/// Settings of the dynamic-window estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorParams {
    /// Trailing window length `m`.
    pub window: u32,
    /// Update cadence `l`.
    pub cadence: u32,
    pub l_init: u32,
    pub l_max: u32,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            window: 40,
            cadence: 5,
            l_init: 4,
            l_max: 64,
        }
    }
}

impl EstimatorParams {
    pub fn validate(&self) -> Result<()> {
        if self.window <= 1 {
            return Err(Error::invalid(format!("estimator window m must exceed 1, got {}", self.window)));
        }
        if self.cadence == 0 {
            return Err(Error::invalid("estimator cadence l must be at least 1"));
        }
        if !(1..=self.l_max).contains(&self.l_init) {
            return Err(Error::invalid(format!(
                "need 1 <= L_init <= L_max, got L_init={} L_max={}",
                self.l_init, self.l_max
            )));
        }
        Ok(())
    }
}

/// Running estimator shared by the DCIF encoder and decoder. Both sides
/// feed it reconstructed intervals so their window counts stay equal.
#[derive(Debug, Clone)]
pub struct EstimatorState {
    params: EstimatorParams,
    bounds: TimeBounds,
    buffer: VecDeque<f64>,
    seen: u64,
    current: u32,
    mean: f64,
    variance: f64,
}

impl EstimatorState {
    pub fn new(params: EstimatorParams, bounds: TimeBounds) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            bounds,
            buffer: VecDeque::with_capacity(params.window as usize + 1),
            seen: 0,
            current: params.l_init,
            mean: f64::NAN,
            variance: f64::NAN,
        })
    }

    pub fn params(&self) -> &EstimatorParams {
        &self.params
    }

    /// Window count in effect for the next sample.
    pub fn current(&self) -> u32 {
        self.current
    }

    /// Latest `μ̂`, NaN before the first update.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Latest `σ̂`, NaN before the first update.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn buffer(&self) -> impl Iterator<Item = &f64> {
        self.buffer.iter()
    }

    /// Feeds one reconstructed interval. Returns true when the window count
    /// changed.
    pub fn observe(&mut self, interval: f64) -> bool {
        let m = self.params.window as usize;
        self.buffer.push_back(interval);
        if self.buffer.len() > m {
            self.buffer.pop_front();
        }
        self.seen += 1;
        let m64 = u64::from(self.params.window);
        if self.seen < m64 || (self.seen - m64) % u64::from(self.params.cadence) != 0 {
            return false;
        }
        let (mean, var) = running_stats(self.buffer.make_contiguous()).expect("window length checked above");
        self.mean = mean;
        self.variance = var;
        let next = const_window_count(var, &self.bounds, self.params.l_max);
        let changed = next != self.current;
        self.current = next;
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn bounds() -> TimeBounds {
        TimeBounds::new(0.0375 / 28.0, 0.0375 / 28.0 + 5.357e-4).unwrap()
    }

    #[test]
    fn window_count_examples() {
        assert_eq!(const_window_count(1e-8, &bounds(), 64), 3);
        let half = bounds().range() / 2.0;
        assert_eq!(const_window_count(half * half, &bounds(), 64), 1);
        assert_eq!(const_window_count(4.0 * half * half, &bounds(), 64), 1);
        assert_eq!(const_window_count(0.0, &bounds(), 64), 64);
        assert_eq!(const_window_count(1e-30, &bounds(), 64), 64);
        assert_eq!(const_window_count(1e-8, &bounds(), 2), 2);
    }

    #[test]
    fn stats_examples() {
        assert_eq!(running_stats(&[2.5; 10]).unwrap(), (2.5, 0.0));
        let (a, b) = (1.2e-3, 1.5e-3);
        let (m, v) = running_stats(&[a, b]).unwrap();
        assert!((m - (a + b) / 2.0).abs() < 1e-18);
        assert!((v - ((a - b) / 2.0f64).powi(2)).abs() < 1e-22);
        assert!(running_stats(&[1.0]).is_err());
        assert!(running_stats(&[]).is_err());
    }

    /// Two-pass oracle written independently: sums in reverse order and
    /// uses the textbook deviation form.
    fn oracle(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mut s = 0.0;
        for x in xs.iter().rev() {
            s += x;
        }
        let mu = s / n;
        let mut ss = 0.0;
        for x in xs.iter().rev() {
            let d = x - mu;
            ss += d * d;
        }
        (mu, ss / n)
    }

    #[test]
    fn stats_match_two_pass_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let buf: Vec<f64> = (0..40).map(|_| rng.gen_range(1.3e-3..1.9e-3)).collect();
        let (m, v) = running_stats(&buf).unwrap();
        let (om, ov) = oracle(&buf);
        assert!((m - om).abs() / om < 1e-12);
        assert!((v - ov).abs() / ov < 1e-12);
    }

    #[test]
    fn estimator_updates_on_cadence() {
        let params = EstimatorParams {
            window: 4,
            cadence: 2,
            l_init: 3,
            l_max: 64,
        };
        let mut est = EstimatorState::new(params, bounds()).unwrap();
        let mut updates = vec![];
        for i in 0..10 {
            est.observe(1.4e-3 + 1e-5 * f64::from(i % 3));
            updates.push(est.variance().is_nan());
        }
        // first update after 4 samples, then every 2
        assert_eq!(updates, [true, true, true, false, false, false, false, false, false, false]);
        let v = est.variance();
        let (_, expected) = running_stats(&[1.4e-3 + 1e-5 * 0.0, 1.4e-3 + 1e-5 * 1.0, 1.4e-3 + 2e-5, 1.4e-3]).unwrap();
        // after 10 samples the buffer holds samples 6..10 → i%3 = 0,1,2,0
        assert!((v - expected).abs() < 1e-20);
    }

    #[test]
    fn constant_stream_goes_to_l_max() {
        let mut est = EstimatorState::new(EstimatorParams::default(), bounds()).unwrap();
        for _ in 0..39 {
            assert!(!est.observe(1.5e-3));
            assert_eq!(est.current(), 4);
        }
        assert!(est.observe(1.5e-3));
        assert_eq!(est.current(), 64);
    }

    #[test]
    fn rejects_bad_params() {
        let bad = [
            EstimatorParams { window: 1, ..Default::default() },
            EstimatorParams { cadence: 0, ..Default::default() },
            EstimatorParams { l_init: 0, ..Default::default() },
            EstimatorParams { l_init: 65, ..Default::default() },
        ];
        for p in bad {
            assert!(EstimatorState::new(p, bounds()).is_err());
        }
    }

    proptest! {
        // any bounded sample set has variance strictly below (range/2)^2
        // unless it sits on the two endpoints in equal halves
        #[test]
        fn popoviciu(xs in proptest::collection::vec(0.0f64..1.0, 2..80)) {
            let b = bounds();
            let ts: Vec<f64> = xs.iter().map(|f| b.dt_min + f * b.range()).collect();
            let (_, v) = running_stats(&ts).unwrap();
            prop_assert!(v <= (b.range() / 2.0).powi(2) * (1.0 + 1e-12));
            prop_assert!(const_window_count(v, &b, 64) >= 1);
        }
    }
}
