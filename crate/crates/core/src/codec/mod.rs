//! Interval quantization and the compressed record stream.
//!
//! Three modes share one record format:
//!
//! - `Uniform`: a K-level quantizer over `[Δt_min, Δt_max]`, no windows.
//! - `Ccif`: a constant number of windows `L`; each sample carries a K-level
//!   residual inside its window and the window index only when it differs
//!   from the previous sample's.
//! - `Dcif`: like `Ccif`, but `L` follows a running variance estimate over the
//!   last `m` reconstructed intervals, updated every `l` samples. The decoder
//!   runs the same estimator on its own output, so `L` is never transmitted.
//!   The first sample after an `L` change always carries its window index.

mod binary;
mod bits;
mod counter;
mod estimator;
mod quantizer;

use serde::{Deserialize, Serialize};

use crate::encoder::FiringSequence;
use crate::error::{Error, Result};
use crate::params::TimeBounds;

pub use binary::{read_stream, write_stream, BitReader, BitWriter, HEADER_LEN, MAGIC};
pub use bits::{bit_cost, bits_for, AccountingMode, BitReport};
pub use counter::{counter_compress, counter_decode, counter_encode, CounterConfig, CounterStream};
pub use estimator::{const_window_count, running_stats, EstimatorParams, EstimatorState};
pub use quantizer::{uniform_quantize, QuantizerConfig, WindowPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Uniform,
    Ccif { windows: u32 },
    Dcif(EstimatorParams),
}

impl Mode {
    pub fn is_windowed(&self) -> bool {
        !matches!(self, Mode::Uniform)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Uniform => "uniform",
            Mode::Ccif { .. } => "ccif",
            Mode::Dcif(_) => "dcif",
        }
    }
}

/// Everything the decoder needs besides the records. `κδ` is implied by the
/// bias and the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamHeader {
    pub mode: Mode,
    pub levels: u32,
    pub bounds: TimeBounds,
    pub t0: f64,
    pub bias: f64,
    /// Band edge in rad/s; 0 when unknown.
    pub omega: f64,
}

impl StreamHeader {
    /// `κδ = 2b / (1/Δt_min + 1/Δt_max)`.
    pub fn kappa_delta(&self) -> f64 {
        2.0 * self.bias / (1.0 / self.bounds.dt_min + 1.0 / self.bounds.dt_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    /// Window index, present only when it is transmitted.
    pub window: Option<u32>,
    pub residual: u32,
    /// Window count in effect for this sample. Implied by the header and the
    /// preceding records; it is not serialized.
    pub windows: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompressedStream {
    pub header: StreamHeader,
    pub records: Vec<Record>,
}

impl CompressedStream {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Number of records that carry a window index.
    pub fn window_emissions(&self) -> usize {
        self.records.iter().filter(|r| r.window.is_some()).count()
    }

    /// Sets the band edge recorded in the header.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.header.omega = omega;
        self
    }

    /// Time-averaged window count.
    pub fn mean_windows(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| f64::from(r.windows)).sum::<f64>() / self.records.len() as f64
    }
}

/// Intervals and the window count used for each, as recovered by the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedStream {
    pub intervals: Vec<f64>,
    pub window_counts: Vec<u32>,
}

fn header(fs: &FiringSequence, mode: Mode, levels: u32, bounds: TimeBounds) -> Result<StreamHeader> {
    if levels == 0 {
        return Err(Error::invalid("level count K must be at least 1"));
    }
    Ok(StreamHeader {
        mode,
        levels,
        bounds,
        t0: fs.t0,
        bias: fs.params.bias(),
        omega: 0.0,
    })
}

/// Baseline: one K-level code per interval, no windows.
pub fn uniform_encode(fs: &FiringSequence, levels: u32, bounds: TimeBounds) -> Result<CompressedStream> {
    let header = header(fs, Mode::Uniform, levels, bounds)?;
    let cfg = QuantizerConfig::new(levels, bounds)?;
    let records = fs
        .intervals
        .iter()
        .map(|&t| Record {
            window: None,
            residual: uniform_quantize(t, &cfg).0,
            windows: 1,
        })
        .collect();
    Ok(CompressedStream { header, records })
}

pub fn ccif_encode(fs: &FiringSequence, windows: u32, levels: u32, bounds: TimeBounds) -> Result<CompressedStream> {
    let header = header(fs, Mode::Ccif { windows }, levels, bounds)?;
    let part = WindowPartition::new(windows, bounds)?;
    let mut prev = None;
    let records = fs
        .intervals
        .iter()
        .map(|&t| {
            let (w, r, _) = part.quantize(t, levels);
            let emit = prev != Some(w);
            prev = Some(w);
            Record {
                window: emit.then_some(w),
                residual: r,
                windows,
            }
        })
        .collect();
    Ok(CompressedStream { header, records })
}

pub fn dcif_encode(
    fs: &FiringSequence,
    levels: u32,
    est: EstimatorParams,
    bounds: TimeBounds,
) -> Result<CompressedStream> {
    let header = header(fs, Mode::Dcif(est), levels, bounds)?;
    let mut state = EstimatorState::new(est, bounds)?;
    let mut prev = None;
    let mut force = true;
    let mut records = Vec::with_capacity(fs.len());
    for &t in &fs.intervals {
        let windows = state.current();
        let part = WindowPartition::new(windows, bounds)?;
        let (w, r, that) = part.quantize(t, levels);
        let emit = force || prev != Some(w);
        records.push(Record {
            window: emit.then_some(w),
            residual: r,
            windows,
        });
        prev = Some(w);
        force = state.observe(that);
    }
    Ok(CompressedStream { header, records })
}

/// Reconstructed intervals `T̂_n = Δt_min + w_n·W + (r_n + 1/2)·W/K`.
pub fn decode_stream(cs: &CompressedStream) -> Result<Vec<f64>> {
    Ok(decode_detailed(cs)?.intervals)
}

/// Decodes the stream, replaying the window-count estimator in dcif mode.
pub fn decode_detailed(cs: &CompressedStream) -> Result<DecodedStream> {
    let mut decoder = RecordDecoder::new(&cs.header)?;
    let mut intervals = Vec::with_capacity(cs.len());
    let mut window_counts = Vec::with_capacity(cs.len());
    for (n, rec) in cs.records.iter().enumerate() {
        let windows = decoder.windows();
        let t = decoder
            .push(rec.window, rec.residual)
            .map_err(|e| Error::malformed(format!("record {n}: {e}")))?;
        intervals.push(t);
        window_counts.push(windows);
    }
    Ok(DecodedStream {
        intervals,
        window_counts,
    })
}

/// Sample-by-sample decoder state. The binary reader needs the window count
/// before it can read each record, so decoding is incremental.
pub(crate) struct RecordDecoder {
    levels: u32,
    bounds: TimeBounds,
    windowed: bool,
    fixed: u32,
    estimator: Option<EstimatorState>,
    current: Option<u32>,
    force: bool,
}

impl RecordDecoder {
    pub(crate) fn new(header: &StreamHeader) -> Result<Self> {
        if header.levels == 0 {
            return Err(Error::malformed("level count K is zero"));
        }
        let (fixed, estimator) = match header.mode {
            Mode::Uniform => (1, None),
            Mode::Ccif { windows } => {
                if windows == 0 {
                    return Err(Error::malformed("window count L is zero"));
                }
                (windows, None)
            }
            Mode::Dcif(p) => (
                p.l_init,
                Some(EstimatorState::new(p, header.bounds).map_err(|e| Error::malformed(e.to_string()))?),
            ),
        };
        Ok(Self {
            levels: header.levels,
            bounds: header.bounds,
            windowed: header.mode.is_windowed(),
            fixed,
            estimator,
            current: None,
            force: true,
        })
    }

    pub(crate) fn windows(&self) -> u32 {
        self.estimator.as_ref().map_or(self.fixed, EstimatorState::current)
    }

    pub(crate) fn push(&mut self, window: Option<u32>, residual: u32) -> std::result::Result<f64, String> {
        let windows = self.windows();
        if residual >= self.levels {
            return Err(format!("residual code {residual} >= K = {}", self.levels));
        }
        let w = match (self.windowed, window) {
            (false, None) => 0,
            (false, Some(_)) => return Err("uniform stream carries a window index".into()),
            (true, Some(w)) if w >= windows => return Err(format!("window index {w} >= L = {windows}")),
            (true, Some(w)) => w,
            (true, None) if self.force => return Err("missing window index".into()),
            (true, None) => self.current.ok_or("missing window index")?,
        };
        self.current = Some(w);
        let part = WindowPartition::new(windows, self.bounds).map_err(|e| e.to_string())?;
        let t = part.reconstruct(w, residual, self.levels);
        self.force = match self.estimator.as_mut() {
            Some(est) => est.observe(t),
            None => false,
        };
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::TemParams;

    fn bounds() -> TimeBounds {
        TimeBounds::new(1.0e-3, 2.0e-3).unwrap()
    }

    fn fs(intervals: Vec<f64>) -> FiringSequence {
        FiringSequence {
            t0: 0.0,
            intervals,
            params: TemParams::new(30.0, 0.5, 0.075).unwrap(),
        }
    }

    /// Window `w` of `L` equal windows, at fraction `f` of its width.
    fn at(w: u32, l: u32, f: f64) -> f64 {
        let b = bounds();
        b.dt_min + (f64::from(w) + f) * b.range() / f64::from(l)
    }

    #[test]
    fn single_window_emission() {
        let seq = fs((0..20).map(|i| at(2, 4, 0.1 + 0.04 * f64::from(i))).collect());
        let cs = ccif_encode(&seq, 4, 16, bounds()).unwrap();
        assert_eq!(cs.window_emissions(), 1);
        assert_eq!(cs.records[0].window, Some(2));
        assert_eq!(cs.len(), 20);
    }

    #[test]
    fn window_changes_are_counted() {
        // windows 1 1 2 2 2 0 0 3 3 1: four changes
        let ws = [1, 1, 2, 2, 2, 0, 0, 3, 3, 1];
        let seq = fs(ws.iter().map(|&w| at(w, 4, 0.5)).collect());
        let cs = ccif_encode(&seq, 4, 8, bounds()).unwrap();
        assert_eq!(cs.window_emissions(), 5);
        let emitted: Vec<_> = cs.records.iter().filter_map(|r| r.window).collect();
        assert_eq!(emitted, [1, 2, 0, 3, 1]);
    }

    #[test]
    fn empty_sequence_keeps_header() {
        let cs = ccif_encode(&fs(vec![]), 4, 8, bounds()).unwrap();
        assert!(cs.is_empty());
        assert_eq!(cs.header.levels, 8);
        assert!(decode_stream(&cs).unwrap().is_empty());
    }

    #[test]
    fn single_window_decodes_like_uniform() {
        let seq = fs((0..200).map(|i| 1.0e-3 + 1.0e-3 * f64::from(i) / 199.0).collect());
        let a = decode_stream(&ccif_encode(&seq, 1, 256, bounds()).unwrap()).unwrap();
        let b = decode_stream(&uniform_encode(&seq, 256, bounds()).unwrap()).unwrap();
        let cfg = QuantizerConfig::new(256, bounds()).unwrap();
        for ((x, y), &t) in a.iter().zip(&b).zip(&seq.intervals) {
            assert_eq!(x.to_bits(), y.to_bits());
            assert_eq!(x.to_bits(), uniform_quantize(t, &cfg).1.to_bits());
        }
    }

    #[test]
    fn hand_built_stream() {
        // L=4, K=8 over [1ms, 2ms]: W = 0.25ms, step = 31.25us
        let header = StreamHeader {
            mode: Mode::Ccif { windows: 4 },
            levels: 8,
            bounds: bounds(),
            t0: 0.0,
            bias: 30.0,
            omega: 0.0,
        };
        let rec = |window, residual| Record { window, residual, windows: 4 };
        let cs = CompressedStream {
            header,
            records: vec![rec(Some(1), 0), rec(None, 7), rec(Some(3), 3)],
        };
        let t = decode_stream(&cs).unwrap();
        let expect = [1.0e-3 + 0.25e-3 + 0.5 * 31.25e-6, 1.0e-3 + 0.25e-3 + 7.5 * 31.25e-6, 1.0e-3 + 0.75e-3 + 3.5 * 31.25e-6];
        for (a, b) in t.iter().zip(expect) {
            assert!((a - b).abs() < 1e-18, "{a} vs {b}");
        }
        assert!((expect[0] - 1.265625e-3).abs() < 1e-18);
        assert!((expect[1] - 1.484375e-3).abs() < 1e-18);
        assert!((expect[2] - 1.859375e-3).abs() < 1e-18);
    }

    #[test]
    fn malformed_streams_are_rejected() {
        let header = StreamHeader {
            mode: Mode::Ccif { windows: 4 },
            levels: 8,
            bounds: bounds(),
            t0: 0.0,
            bias: 30.0,
            omega: 0.0,
        };
        let rec = |window, residual| Record { window, residual, windows: 4 };
        for records in [vec![rec(Some(1), 8)], vec![rec(Some(4), 0)], vec![rec(None, 0)]] {
            let cs = CompressedStream { header, records };
            assert!(matches!(decode_stream(&cs), Err(Error::MalformedStream(_))));
        }
        let uni = CompressedStream {
            header: StreamHeader { mode: Mode::Uniform, ..header },
            records: vec![rec(Some(0), 0)],
        };
        assert!(decode_stream(&uni).is_err());
    }

    #[test]
    fn roundtrip_within_half_step() {
        let seq = fs((0..500).map(|i| 1.0e-3 + 1.0e-3 * ((f64::from(i) * 0.37).sin() * 0.5 + 0.5)).collect());
        for l in [1, 2, 5, 8] {
            let cs = ccif_encode(&seq, l, 64, bounds()).unwrap();
            let half = 0.5 * WindowPartition::new(l, bounds()).unwrap().step(64);
            for (a, b) in decode_stream(&cs).unwrap().iter().zip(&seq.intervals) {
                assert!((a - b).abs() <= half * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn dcif_constant_stream_saturates() {
        let seq = fs(vec![1.5e-3; 200]);
        let est = EstimatorParams::default();
        let cs = dcif_encode(&seq, 64, est, bounds()).unwrap();
        assert!(cs.records[..40].iter().all(|r| r.windows == 4));
        assert!(cs.records[40..].iter().all(|r| r.windows == 64));
        // forced emission right after the change
        assert!(cs.records[40].window.is_some());
        let dec = decode_detailed(&cs).unwrap();
        assert_eq!(dec.window_counts, cs.records.iter().map(|r| r.windows).collect::<Vec<_>>());
    }

    #[test]
    fn dcif_is_deterministic_and_synchronized() {
        let seq = fs((0..800).map(|i| 1.5e-3 + 4.0e-4 * (f64::from(i) * 0.05).sin() * (f64::from(i) * 0.003).cos()).collect());
        let est = EstimatorParams::default();
        let a = dcif_encode(&seq, 256, est, bounds()).unwrap();
        let b = dcif_encode(&seq, 256, est, bounds()).unwrap();
        assert_eq!(a, b);
        let dec = decode_detailed(&a).unwrap();
        let enc_l: Vec<u32> = a.records.iter().map(|r| r.windows).collect();
        assert_eq!(dec.window_counts, enc_l);
        assert!(enc_l.iter().any(|&l| l != 4));
        for ((t, that), l) in seq.intervals.iter().zip(&dec.intervals).zip(&enc_l) {
            let half = 0.5 * bounds().range() / f64::from(*l) / 256.0;
            assert!((t - that).abs() <= half * (1.0 + 1e-9));
        }
    }

    #[test]
    fn kappa_delta_from_header() {
        let p = TemParams::new(35.0, 0.5, 0.075).unwrap();
        let b = crate::params::time_bounds(&p, 11.3).unwrap();
        let h = StreamHeader {
            mode: Mode::Uniform,
            levels: 2,
            bounds: b,
            t0: 0.0,
            bias: 35.0,
            omega: 1.0,
        };
        assert!((h.kappa_delta() - 0.0375).abs() < 1e-15);
    }
}
