//! Counter-based behavioral mode: a free-running clock counts ticks between
//! firings; the low bits of the count are the residual and the high bits the
//! window. The windows tile `[0, 2^bits/f_clk)`, not the interval bounds, so
//! this path is kept apart from the quantizers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Splits `floor(t·f_clk)` into `(high, low)` where `low` has
/// `residual_bits` bits. Counts that need more than `counter_bits` bits
/// overflow.
pub fn counter_encode(t: f64, clock_hz: f64, residual_bits: u32, counter_bits: u32) -> Result<(u64, u64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("interval must be finite and non-negative, got {t}")));
    }
    if !(clock_hz > 0.0) || !clock_hz.is_finite() {
        return Err(Error::invalid(format!("clock rate must be positive, got {clock_hz}")));
    }
    if counter_bits > 63 || residual_bits > counter_bits {
        return Err(Error::invalid(format!(
            "need residual_bits <= counter_bits <= 63, got {residual_bits} and {counter_bits}"
        )));
    }
    let ticks = (t * clock_hz).floor();
    let limit = (1u64 << counter_bits) as f64;
    if ticks >= limit {
        return Err(Error::CounterOverflow {
            ticks: if ticks >= u64::MAX as f64 { u64::MAX } else { ticks as u64 },
            width: counter_bits,
        });
    }
    let ticks = ticks as u64;
    Ok((ticks >> residual_bits, ticks & ((1u64 << residual_bits) - 1)))
}

/// Centre of the clock tick identified by `(high, low)`.
pub fn counter_decode(high: u64, low: u64, clock_hz: f64, residual_bits: u32) -> f64 {
    let ticks = (high << residual_bits) | low;
    (ticks as f64 + 0.5) / clock_hz
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterConfig {
    pub clock_hz: f64,
    pub residual_bits: u32,
    pub counter_bits: u32,
}

/// Counter codes for a whole interval sequence. `high` is `Some` only when
/// it differs from the previous sample's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterStream {
    pub config: CounterConfig,
    pub records: Vec<(Option<u64>, u64)>,
}

impl CounterStream {
    /// Emissions of the high part, including the first.
    pub fn emissions(&self) -> usize {
        self.records.iter().filter(|r| r.0.is_some()).count()
    }

    /// Residual bits plus high bits at emissions.
    pub fn total_bits(&self) -> u64 {
        let hi = u64::from(self.config.counter_bits - self.config.residual_bits);
        self.records.len() as u64 * u64::from(self.config.residual_bits) + self.emissions() as u64 * hi
    }

    pub fn decode(&self) -> Result<Vec<f64>> {
        let mut high = None;
        self.records
            .iter()
            .enumerate()
            .map(|(i, &(h, low))| {
                if h.is_some() {
                    high = h;
                }
                let h = high.ok_or_else(|| Error::malformed(format!("record {i}: missing high bits")))?;
                Ok(counter_decode(h, low, self.config.clock_hz, self.config.residual_bits))
            })
            .collect()
    }
}

pub fn counter_compress(intervals: &[f64], config: CounterConfig) -> Result<CounterStream> {
    let mut prev = None;
    let mut records = Vec::with_capacity(intervals.len());
    for &t in intervals {
        let (h, low) = counter_encode(t, config.clock_hz, config.residual_bits, config.counter_bits)?;
        records.push(((prev != Some(h)).then_some(h), low));
        prev = Some(h);
    }
    Ok(CounterStream { config, records })
}
