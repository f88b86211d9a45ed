//! Integrate-and-fire encoder.
//!
//! Between firings the integrator accumulates `(b + x(t))/κ`; it fires and
//! resets when the accumulated value reaches `δ`. Each crossing solves
//! `b·(t − t_n) + ∫_{t_n}^{t} x = κδ` by Newton steps kept inside a
//! shrinking bracket, falling back to bisection.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{time_bounds, TemParams, TimeBounds};
use crate::signal::BandlimitedSignal;

/// Slack allowed on the interval bounds before the encoder reports an
/// inconsistency.
pub const BOUND_SLACK: f64 = 1e-9;
/// Crossing times are refined until the bracket is this narrow (seconds).
pub const CROSSING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiringSequence {
    pub t0: f64,
    pub intervals: Vec<f64>,
    pub params: TemParams,
}

impl FiringSequence {
    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `t_0, t_1, …, t_N` by accumulating the intervals.
    pub fn firing_times(&self) -> Vec<f64> {
        crate::decoder::firing_times(self.t0, &self.intervals)
    }

    /// Two-section CSV: `t0,bias,kappa,delta` with its values, then an
    /// `interval` column.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t0,bias,kappa,delta\n");
        let p = &self.params;
        let _ = writeln!(out, "{},{},{},{}", self.t0, p.bias(), p.kappa(), p.delta());
        out.push_str("interval\n");
        for t in &self.intervals {
            let _ = writeln!(out, "{t}");
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        if lines.next() != Some("t0,bias,kappa,delta") {
            return Err(Error::invalid("firing CSV must start with the t0,bias,kappa,delta header"));
        }
        let values = lines.next().ok_or_else(|| Error::invalid("missing firing header values"))?;
        let v: Vec<f64> = values
            .split(',')
            .map(|f| f.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("bad firing header {values:?}: {e}")))?;
        let [t0, bias, kappa, delta] = v[..] else {
            return Err(Error::invalid(format!("firing header needs 4 values, got {values:?}")));
        };
        if lines.next() != Some("interval") {
            return Err(Error::invalid("missing interval column header"));
        }
        let intervals = lines
            .map(|l| l.parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("bad interval: {e}")))?;
        Ok(Self {
            t0,
            intervals,
            params: TemParams::new(bias, kappa, delta)?,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text).map_err(|e| Error::parse(path, e.to_string()))
    }
}

/// Amplitude measurements `y_n = ∫_{t_n}^{t_{n+1}} x = −b·T_n + κδ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeq {
    pub values: Vec<f64>,
}

pub fn measurements(fs: &FiringSequence) -> MeasurementSeq {
    measurements_from(&fs.params, &fs.intervals)
}

pub(crate) fn measurements_from(params: &TemParams, intervals: &[f64]) -> MeasurementSeq {
    let b = params.bias();
    let kd = params.kappa_delta();
    MeasurementSeq {
        values: intervals.iter().map(|&t| -b * t + kd).collect(),
    }
}

/// Runs the integrator from zero at `t_start` and records every firing
/// that completes before `t_end`.
pub fn encode(sig: &BandlimitedSignal, p: &TemParams, t_start: f64, t_end: f64) -> Result<FiringSequence> {
    let c = sig.amplitude_bound();
    p.validate_for(c)?;
    let bounds = time_bounds(p, c)?;
    if !(t_end - t_start >= bounds.dt_max) {
        return Err(Error::invalid(format!(
            "encoding window [{t_start}, {t_end}] is shorter than dt_max = {}",
            bounds.dt_max
        )));
    }

    let crossing = Crossing {
        sig,
        bias: p.bias(),
        kd: p.kappa_delta(),
        bounds,
    };
    let t0 = crossing.next_from(t_start)?;
    if t0 > t_end {
        return Err(Error::InsufficientData(format!("no firing before {t_end}")));
    }
    let mut intervals = Vec::new();
    let mut t = t0;
    loop {
        let next = crossing.next_from(t)?;
        if next > t_end {
            break;
        }
        let interval = next - t;
        if !bounds.contains(interval, BOUND_SLACK) {
            return Err(Error::InternalConsistency(format!(
                "interval {interval:e} at t = {t} escapes [{:e}, {:e}]",
                bounds.dt_min, bounds.dt_max
            )));
        }
        intervals.push(interval);
        t = next;
    }
    Ok(FiringSequence {
        t0,
        intervals,
        params: *p,
    })
}

struct Crossing<'a> {
    sig: &'a BandlimitedSignal,
    bias: f64,
    kd: f64,
    bounds: TimeBounds,
}

impl Crossing<'_> {
    /// Integral residual `b·(t − a) + ∫_a^t x − κδ`, increasing in `t`.
    fn residual(&self, a: f64, t: f64) -> f64 {
        self.bias * (t - a) + self.sig.integral(a, t) - self.kd
    }

    fn next_from(&self, a: f64) -> Result<f64> {
        let mut lo = a;
        let mut hi = a + self.bounds.dt_max * (1.0 + BOUND_SLACK);
        if self.residual(a, hi) < 0.0 {
            return Err(Error::InternalConsistency(format!(
                "no threshold crossing within dt_max of t = {a}"
            )));
        }
        let mut t = a + self.kd / self.bias;
        for _ in 0..200 {
            let f = self.residual(a, t);
            if f == 0.0 {
                return Ok(t);
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if hi - lo <= CROSSING_TOL {
                break;
            }
            let slope = self.bias + self.sig.evaluate(t);
            let step = f / slope;
            let newton = t - step;
            if slope > 0.0 && newton > lo && newton < hi {
                t = newton;
                if step.abs() < 0.25 * CROSSING_TOL {
                    return Ok(t);
                }
            } else {
                t = 0.5 * (lo + hi);
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Firing rate over the Nyquist rate `Ω/π`.
pub fn oversampling_factor(fs: &FiringSequence, omega: f64) -> Result<f64> {
    if fs.intervals.is_empty() {
        return Err(Error::InsufficientData("need at least two firings".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    let elapsed: f64 = fs.intervals.iter().sum();
    let rate = fs.intervals.len() as f64 / elapsed;
    Ok(rate / (omega / std::f64::consts::PI))
}
