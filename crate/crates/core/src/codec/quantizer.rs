use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::TimeBounds;

/// K-level midrise quantizer over the full interval range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    levels: u32,
    bounds: TimeBounds,
    step: f64,
}

impl QuantizerConfig {
    pub fn new(levels: u32, bounds: TimeBounds) -> Result<Self> {
        if levels == 0 {
            return Err(Error::invalid("level count K must be at least 1"));
        }
        Ok(Self {
            levels,
            bounds,
            step: bounds.range() / f64::from(levels),
        })
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn bounds(&self) -> TimeBounds {
        self.bounds
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}

/// Midrise code and reconstruction; out-of-range inputs clamp to the edge
/// cells.
pub fn uniform_quantize(t: f64, cfg: &QuantizerConfig) -> (u32, f64) {
    let code = cell(t - cfg.bounds.dt_min, cfg.step, cfg.levels);
    (code, cfg.bounds.dt_min + (f64::from(code) + 0.5) * cfg.step)
}

/// `clamp(floor(offset/step), 0, count−1)`.
fn cell(offset: f64, step: f64, count: u32) -> u32 {
    if !(step > 0.0) {
        return 0;
    }
    let idx = (offset / step).floor();
    if idx <= 0.0 || idx.is_nan() {
        0
    } else if idx >= f64::from(count - 1) {
        count - 1
    } else {
        idx as u32
    }
}

/// `L` equal windows tiling `[Δt_min, Δt_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPartition {
    windows: u32,
    width: f64,
    bounds: TimeBounds,
}

impl WindowPartition {
    pub fn new(windows: u32, bounds: TimeBounds) -> Result<Self> {
        if windows == 0 {
            return Err(Error::invalid("window count L must be at least 1"));
        }
        Ok(Self {
            windows,
            width: bounds.range() / f64::from(windows),
            bounds,
        })
    }

    pub fn windows(&self) -> u32 {
        self.windows
    }

    /// Window width `W = Δ_t/L`.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn bounds(&self) -> TimeBounds {
        self.bounds
    }

    /// Lower edge of window `w`.
    pub fn window_start(&self, w: u32) -> f64 {
        self.bounds.dt_min + f64::from(w) * self.width
    }

    pub fn locate(&self, t: f64) -> u32 {
        cell(t - self.bounds.dt_min, self.width, self.windows)
    }

    /// Effective step `W/K`.
    pub fn step(&self, levels: u32) -> f64 {
        self.width / f64::from(levels)
    }

    /// Window index, residual code and reconstruction of `t`.
    pub fn quantize(&self, t: f64, levels: u32) -> (u32, u32, f64) {
        let w = self.locate(t);
        let r = cell(t - self.bounds.dt_min - f64::from(w) * self.width, self.step(levels), levels);
        (w, r, self.reconstruct(w, r, levels))
    }

    pub fn reconstruct(&self, w: u32, r: u32, levels: u32) -> f64 {
        self.window_start(w) + (f64::from(r) + 0.5) * self.step(levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bounds() -> TimeBounds {
        TimeBounds::new(0.0375 / 28.0, 0.0375 / 20.0).unwrap()
    }

    #[test]
    fn edges() {
        let cfg = QuantizerConfig::new(64, bounds()).unwrap();
        let (code, t) = uniform_quantize(cfg.bounds().dt_min, &cfg);
        assert_eq!(code, 0);
        assert!((t - (cfg.bounds().dt_min + 0.5 * cfg.step())).abs() < 1e-18);
        assert_eq!(uniform_quantize(cfg.bounds().dt_max, &cfg).0, 63);
        assert_eq!(uniform_quantize(1.0, &cfg).0, 63);
        assert_eq!(uniform_quantize(0.0, &cfg).0, 0);
        assert!(QuantizerConfig::new(0, bounds()).is_err());
    }

    #[test]
    fn hand_computed_code() {
        let b = TimeBounds::new(1.3393e-3, 1.8750e-3).unwrap();
        let cfg = QuantizerConfig::new(64, b).unwrap();
        let (code, t) = uniform_quantize(1.6e-3, &cfg);
        assert_eq!(code, 31);
        assert!((t - 1.6030e-3).abs() < 1e-7);
    }

    #[test]
    fn single_window_matches_uniform() {
        let cfg = QuantizerConfig::new(256, bounds()).unwrap();
        let part = WindowPartition::new(1, bounds()).unwrap();
        for i in 0..=1000 {
            let t = bounds().dt_min + bounds().range() * f64::from(i) / 1000.0;
            let (code, tu) = uniform_quantize(t, &cfg);
            let (w, r, tw) = part.quantize(t, 256);
            assert_eq!((w, r), (0, code));
            assert_eq!(tu.to_bits(), tw.to_bits());
        }
    }

    #[test]
    fn windows_tile_the_range() {
        let part = WindowPartition::new(7, bounds()).unwrap();
        assert_eq!(part.window_start(0), bounds().dt_min);
        assert!((part.window_start(7) - bounds().dt_max).abs() < 1e-18);
        assert!(WindowPartition::new(0, bounds()).is_err());
    }

    proptest! {
        #[test]
        fn midrise_bound(frac in 0.0f64..=1.0, bits in 1u32..16, windows in 1u32..65) {
            let b = bounds();
            let t = b.dt_min + frac * b.range();
            let levels = 1u32 << bits;
            let part = WindowPartition::new(windows, b).unwrap();
            let (w, r, that) = part.quantize(t, levels);
            prop_assert!(w < windows && r < levels);
            let half = 0.5 * part.step(levels);
            prop_assert!((that - t).abs() <= half * (1.0 + 1e-9));
        }
    }
}
