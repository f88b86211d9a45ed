//! Monte-Carlo trials, sweeps over bits/bandwidth/scheme, and the
//! compression table.
//!
//! A trial runs generate → encode → quantize → decode → reconstruct →
//! measure and is a pure function of its [`TrialConfig`]. The signal and its
//! firing sequence do not depend on the scheme or the bit depth, so
//! [`Prepared`] holds them and is reused across those axes.

mod checks;
mod config;
mod emit;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::codec::{
    bit_cost, ccif_encode, const_window_count, dcif_encode, decode_detailed, running_stats, uniform_encode,
    AccountingMode, CompressedStream, EstimatorParams,
};
use crate::decoder::{firing_times, mse_db, reconstruct_with, ReconstructionConfig};
use crate::encoder::{encode, oversampling_factor, FiringSequence};
use crate::error::{Error, Result};
use crate::params::{amplitude_bound, hz_to_rad, rad_to_hz, time_bounds, TemParams, TimeBounds};
use crate::signal::BandlimitedSignal;

pub use checks::{
    interpolate, summarize, table1, Check, Curve, PaperStudy, Summary, Table1Row, AVG_L_BAND,
    COMPRESSION_BAND_PERCENT, IMPROVEMENT_BAND_DB, MATCH_ALLOWANCE_DB, ORDER_ALLOWANCE_DB,
    OVERHEAD_CEILING_PERCENT,
};
pub use config::{default_out_dir, parse_bits, KeyValues, OUT_DIR_VAR};
pub use emit::{plot_script, read_csv, write_csv, write_plot_script, CSV_COLUMNS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BiasMode {
    /// `b` given directly.
    Fixed(f64),
    /// `b = α·c`.
    Alpha(f64),
}

impl BiasMode {
    pub fn label(&self) -> String {
        match self {
            BiasMode::Fixed(b) => format!("b={b}"),
            BiasMode::Alpha(a) => format!("alpha={a}"),
        }
    }
}

impl std::str::FromStr for BiasMode {
    type Err = Error;

    /// `fixed:35`, `b=35`, `alpha:6` or `alpha=6`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, value) = s
            .split_once([':', '='])
            .ok_or_else(|| Error::invalid(format!("bias mode {s:?} should look like fixed:35 or alpha:6")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad number in bias mode {s:?}")))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "fixed" | "b" => Ok(BiasMode::Fixed(v)),
            "alpha" | "a" => Ok(BiasMode::Alpha(v)),
            other => Err(Error::invalid(format!("unknown bias mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for BiasMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BiasMode::Fixed(b) => write!(f, "fixed:{b}"),
            BiasMode::Alpha(a) => write!(f, "alpha:{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Iftem,
    /// Constant windows; `None` derives `L` from the interval variance.
    Ccif { windows: Option<u32> },
    Dcif,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Iftem => "iftem",
            Scheme::Ccif { .. } => "ccif",
            Scheme::Dcif => "dcif",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    /// `iftem`, `ccif`, `ccif:L` or `dcif`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.split_once(':') {
            None => match s.as_str() {
                "iftem" | "if" | "uniform" => Ok(Scheme::Iftem),
                "ccif" => Ok(Scheme::Ccif { windows: None }),
                "dcif" => Ok(Scheme::Dcif),
                _ => Err(Error::invalid(format!("unknown scheme {s:?}"))),
            },
            Some(("ccif", l)) => {
                let l: u32 = l.parse().map_err(|_| Error::invalid(format!("bad window count in {s:?}")))?;
                if l == 0 {
                    return Err(Error::invalid("window count must be at least 1"));
                }
                Ok(Scheme::Ccif { windows: Some(l) })
            }
            _ => Err(Error::invalid(format!("unknown scheme {s:?}"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Ccif { windows: Some(l) } => write!(f, "ccif:{l}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    /// Band edge in rad/s.
    pub omega: f64,
    pub energy: f64,
    /// Support length in Nyquist spacings `π/Ω`.
    pub duration_nyquist: f64,
    pub seed: u64,
    pub bias: BiasMode,
    pub kappa: f64,
    pub delta: f64,
    pub scheme: Scheme,
    /// `log2 K`.
    pub bits: u32,
    pub estimator: EstimatorParams,
    pub accounting: AccountingMode,
}

impl Default for TrialConfig {
    /// 80 Hz band edge, `E = 0.8`, 16 Nyquist spacings, `κ = 0.5`,
    /// `δ = 0.075`, `b = 35`, CCIF at 8 bits.
    fn default() -> Self {
        Self {
            omega: hz_to_rad(80.0),
            energy: 0.8,
            duration_nyquist: 16.0,
            seed: 0,
            bias: BiasMode::Fixed(35.0),
            kappa: 0.5,
            delta: 0.075,
            scheme: Scheme::Ccif { windows: None },
            bits: 8,
            estimator: EstimatorParams::default(),
            accounting: AccountingMode::Paper,
        }
    }
}

impl TrialConfig {
    pub fn duration(&self) -> f64 {
        self.duration_nyquist * PI / self.omega
    }

    pub fn levels(&self) -> Result<u32> {
        if !(1..=31).contains(&self.bits) {
            return Err(Error::invalid(format!("bits must lie in 1..=31, got {}", self.bits)));
        }
        Ok(1 << self.bits)
    }

    pub fn tem_params(&self) -> Result<TemParams> {
        let c = amplitude_bound(self.energy, self.omega)?;
        match self.bias {
            BiasMode::Fixed(b) => TemParams::new(b, self.kappa, self.delta),
            BiasMode::Alpha(a) => TemParams::with_alpha(a, c, self.kappa, self.delta),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.levels()?;
        self.estimator.validate()?;
        let p = self.tem_params()?;
        p.validate_for(amplitude_bound(self.energy, self.omega)?)?;
        if !(self.duration_nyquist >= 10.0) {
            return Err(Error::invalid(format!(
                "duration must cover at least 10 Nyquist spacings, got {}",
                self.duration_nyquist
            )));
        }
        Ok(())
    }

    /// Short description used as error context.
    pub fn describe(&self) -> String {
        format!(
            "trial f={}Hz {} {} bits={} seed={}",
            rad_to_hz(self.omega),
            self.bias,
            self.scheme,
            self.bits,
            self.seed
        )
    }
}

/// Signal, sampler and firing sequence shared by every scheme and bit depth.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: TrialConfig,
    pub signal: BandlimitedSignal,
    pub params: TemParams,
    pub bounds: TimeBounds,
    pub firings: FiringSequence,
    /// Constant window count from the variance of the exact intervals.
    pub ccif_windows: u32,
    pub oversampling: f64,
    recon: ReconstructionConfig,
}

impl Prepared {
    /// Generates and encodes the signal for `cfg`. The scheme and bit depth
    /// of `cfg` are ignored.
    pub fn new(cfg: &TrialConfig) -> Result<Self> {
        cfg.validate().map_err(|e| e.in_trial(cfg.describe()))?;
        let signal = BandlimitedSignal::generate(cfg.omega, cfg.energy, cfg.duration(), cfg.seed)
            .map_err(|e| e.in_trial(cfg.describe()))?;
        Self::from_signal(cfg, signal)
    }

    /// Encodes a given signal with the sampler of `cfg`. The band edge of
    /// the signal replaces the one in `cfg`.
    pub fn from_signal(cfg: &TrialConfig, signal: BandlimitedSignal) -> Result<Self> {
        let cfg = TrialConfig { omega: signal.omega(), ..*cfg };
        let build = || -> Result<Self> {
            let params = cfg.tem_params()?;
            let bounds = time_bounds(&params, signal.amplitude_bound())?;
            let firings = encode(&signal, &params, 0.0, signal.duration())?;
            if firings.len() < 2 {
                return Err(Error::InsufficientData(format!("only {} intervals encoded", firings.len())));
            }
            let (_, var) = running_stats(&firings.intervals)?;
            let ccif_windows = const_window_count(var, &bounds, cfg.estimator.l_max);
            let oversampling = oversampling_factor(&firings, cfg.omega)?;
            Ok(Self {
                config: cfg,
                signal: signal.clone(),
                params,
                bounds,
                firings,
                ccif_windows,
                oversampling,
                recon: ReconstructionConfig::new(cfg.omega),
            })
        };
        build().map_err(|e| e.in_trial(cfg.describe()))
    }

    pub fn reconstruction_config(&self) -> &ReconstructionConfig {
        &self.recon
    }

    /// Quantizes the firing sequence with the given scheme.
    pub fn compress(&self, scheme: Scheme, bits: u32) -> Result<CompressedStream> {
        let cfg = TrialConfig { scheme, bits, ..self.config };
        let levels = cfg.levels()?;
        let cs = match scheme {
            Scheme::Iftem => uniform_encode(&self.firings, levels, self.bounds)?,
            Scheme::Ccif { windows } => {
                ccif_encode(&self.firings, windows.unwrap_or(self.ccif_windows), levels, self.bounds)?
            }
            Scheme::Dcif => dcif_encode(&self.firings, levels, self.config.estimator, self.bounds)?,
        };
        Ok(cs.with_omega(self.config.omega))
    }

    /// Error in dB of the reconstruction from `intervals`.
    pub fn error_db(&self, intervals: &[f64]) -> Result<f64> {
        let times = firing_times(self.firings.t0, intervals);
        let rec = reconstruct_with(&times, self.params.bias(), self.params.kappa_delta(), &self.recon)?;
        let truth: Vec<f64> = rec.times.iter().map(|&t| self.signal.evaluate(t)).collect();
        mse_db(&truth, &rec.values, self.recon.grid_spacing, self.recon.trim_fraction)
    }

    /// Error of the reconstruction from the exact intervals.
    pub fn exact_error_db(&self) -> Result<f64> {
        self.error_db(&self.firings.intervals)
            .map_err(|e| e.in_trial(format!("{} unquantized", self.config.describe())))
    }

    pub fn run(&self, scheme: Scheme, bits: u32) -> Result<TrialMetrics> {
        let cfg = TrialConfig { scheme, bits, ..self.config };
        let go = || -> Result<TrialMetrics> {
            let cs = self.compress(scheme, bits)?;
            let decoded = decode_detailed(&cs)?;
            let report = bit_cost(&cs, self.config.accounting);
            Ok(TrialMetrics {
                mse_db: self.error_db(&decoded.intervals)?,
                total_bits: report.total_bits,
                residual_bits: report.residual_bits,
                window_bits: report.window_bits,
                flag_bits: report.flag_bits,
                overhead_percent: report.overhead_percent,
                avg_l: cs.mean_windows(),
                firing_count: self.firings.len(),
                oversampling: self.oversampling,
            })
        };
        go().map_err(|e| e.in_trial(cfg.describe()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub mse_db: f64,
    pub total_bits: u64,
    pub residual_bits: u64,
    pub window_bits: u64,
    pub flag_bits: u64,
    pub overhead_percent: f64,
    /// Mean window count over the samples.
    pub avg_l: f64,
    /// Number of intervals.
    pub firing_count: usize,
    pub oversampling: f64,
}

impl TrialMetrics {
    pub fn bits_per_sample(&self) -> f64 {
        self.total_bits as f64 / self.firing_count.max(1) as f64
    }
}

pub fn run_trial(cfg: &TrialConfig) -> Result<TrialMetrics> {
    Prepared::new(cfg)?.run(cfg.scheme, cfg.bits)
}

/// Grid of a sweep. Rows come out ordered by frequency, bias mode, scheme,
/// bits, then seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub base: TrialConfig,
    /// Band edges in rad/s.
    pub omegas: Vec<f64>,
    pub biases: Vec<BiasMode>,
    pub schemes: Vec<Scheme>,
    pub bits: Vec<u32>,
    pub seeds: Vec<u64>,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
}

impl SweepGrid {
    /// Default desk-scale grid: 5/20/40/80 Hz, both bias modes, all three
    /// schemes, 6..=15 bits, 20 seeds.
    pub fn desk() -> Self {
        Self {
            base: TrialConfig::default(),
            omegas: [5.0, 20.0, 40.0, 80.0].map(hz_to_rad).to_vec(),
            biases: vec![BiasMode::Fixed(35.0), BiasMode::Alpha(6.0)],
            schemes: vec![Scheme::Iftem, Scheme::Ccif { windows: None }, Scheme::Dcif],
            bits: (6..=15).collect(),
            seeds: (0..20).collect(),
            threads: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.omegas.len() * self.biases.len() * self.schemes.len() * self.bits.len() * self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One CSV row: a trial, or a mean/std aggregate over seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// `trial`, `mean` or `std`.
    pub kind: String,
    pub freq_hz: f64,
    pub bias: String,
    pub scheme: String,
    pub bits: u32,
    pub seed: Option<u64>,
    pub mse_db: f64,
    pub total_bits: f64,
    pub residual_bits: f64,
    pub window_bits: f64,
    pub flag_bits: f64,
    pub overhead_percent: f64,
    pub avg_l: f64,
    pub firing_count: f64,
    pub oversampling: f64,
    pub bits_per_sample: f64,
    /// Number of seeds in an aggregate row; 1 for a successful trial.
    pub count: u32,
    pub error: String,
}

impl Row {
    fn trial(cfg: &TrialConfig, result: std::result::Result<TrialMetrics, String>) -> Self {
        let mut row = Row {
            kind: "trial".into(),
            freq_hz: rad_to_hz(cfg.omega),
            bias: cfg.bias.to_string(),
            scheme: cfg.scheme.to_string(),
            bits: cfg.bits,
            seed: Some(cfg.seed),
            mse_db: f64::NAN,
            total_bits: f64::NAN,
            residual_bits: f64::NAN,
            window_bits: f64::NAN,
            flag_bits: f64::NAN,
            overhead_percent: f64::NAN,
            avg_l: f64::NAN,
            firing_count: f64::NAN,
            oversampling: f64::NAN,
            bits_per_sample: f64::NAN,
            count: 0,
            error: String::new(),
        };
        match result {
            Ok(m) => {
                row.mse_db = m.mse_db;
                row.total_bits = m.total_bits as f64;
                row.residual_bits = m.residual_bits as f64;
                row.window_bits = m.window_bits as f64;
                row.flag_bits = m.flag_bits as f64;
                row.overhead_percent = m.overhead_percent;
                row.avg_l = m.avg_l;
                row.firing_count = m.firing_count as f64;
                row.oversampling = m.oversampling;
                row.bits_per_sample = m.bits_per_sample();
                row.count = 1;
            }
            Err(e) => row.error = e,
        }
        row
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_empty()
    }

    fn values(&self) -> [f64; 10] {
        [
            self.mse_db,
            self.total_bits,
            self.residual_bits,
            self.window_bits,
            self.flag_bits,
            self.overhead_percent,
            self.avg_l,
            self.firing_count,
            self.oversampling,
            self.bits_per_sample,
        ]
    }

    fn with_values(mut self, v: [f64; 10]) -> Self {
        [
            self.mse_db,
            self.total_bits,
            self.residual_bits,
            self.window_bits,
            self.flag_bits,
            self.overhead_percent,
            self.avg_l,
            self.firing_count,
            self.oversampling,
            self.bits_per_sample,
        ] = v;
        self
    }
}

/// Mean and population standard deviation over the successful trial rows
/// of each (frequency, bias, scheme, bits) group, in first-seen order.
pub fn aggregate(rows: &[Row]) -> Vec<Row> {
    let mut groups: Vec<(Row, Vec<[f64; 10]>)> = Vec::new();
    for r in rows.iter().filter(|r| r.kind == "trial") {
        let pos = groups.iter().position(|(g, _)| {
            g.freq_hz == r.freq_hz && g.bias == r.bias && g.scheme == r.scheme && g.bits == r.bits
        });
        let idx = pos.unwrap_or_else(|| {
            groups.push((r.clone(), Vec::new()));
            groups.len() - 1
        });
        if r.is_ok() {
            groups[idx].1.push(r.values());
        }
    }
    let mut out = Vec::with_capacity(2 * groups.len());
    for (proto, vals) in groups {
        let n = vals.len();
        let mut mean = [f64::NAN; 10];
        let mut std = [f64::NAN; 10];
        if n > 0 {
            for j in 0..10 {
                let m = vals.iter().map(|v| v[j]).sum::<f64>() / n as f64;
                mean[j] = m;
                std[j] = (vals.iter().map(|v| (v[j] - m).powi(2)).sum::<f64>() / n as f64).sqrt();
            }
        }
        let base = Row {
            seed: None,
            count: n as u32,
            error: String::new(),
            ..proto
        };
        out.push(Row { kind: "mean".into(), ..base.clone() }.with_values(mean));
        out.push(Row { kind: "std".into(), ..base }.with_values(std));
    }
    out
}

/// Runs every grid point and appends the aggregate rows. Failed trials keep
/// their row with the error text and are left out of the aggregates.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<Row>> {
    use rayon::prelude::*;

    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    // One unit per prepared signal: (frequency, bias, seed).
    let mut units = Vec::new();
    for (fi, &omega) in grid.omegas.iter().enumerate() {
        for (bi, &bias) in grid.biases.iter().enumerate() {
            for (si, &seed) in grid.seeds.iter().enumerate() {
                units.push((fi, bi, si, TrialConfig { omega, bias, seed, ..grid.base }));
            }
        }
    }
    let (ns, nb, nd) = (grid.schemes.len(), grid.bits.len(), grid.seeds.len());
    let work = |&(fi, bi, si, cfg): &(usize, usize, usize, TrialConfig)| -> Vec<(usize, Row)> {
        let prepared = Prepared::new(&cfg);
        let mut out = Vec::with_capacity(ns * nb);
        for (ki, &scheme) in grid.schemes.iter().enumerate() {
            for (ti, &bits) in grid.bits.iter().enumerate() {
                let trial = TrialConfig { scheme, bits, ..cfg };
                let result = match &prepared {
                    Ok(p) => p.run(scheme, bits).map_err(|e| e.to_string()),
                    Err(e) => Err(e.to_string()),
                };
                let index = (((fi * grid.biases.len() + bi) * ns + ki) * nb + ti) * nd + si;
                out.push((index, Row::trial(&trial, result)));
            }
        }
        out
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(grid.threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let mut indexed: Vec<(usize, Row)> = pool.install(|| units.par_iter().flat_map_iter(work).collect());
    indexed.sort_by_key(|(i, _)| *i);
    let mut rows: Vec<Row> = indexed.into_iter().map(|(_, r)| r).collect();
    let agg = aggregate(&rows);
    rows.extend(agg);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_modes_and_schemes() {
        assert_eq!("fixed:35".parse::<BiasMode>().unwrap(), BiasMode::Fixed(35.0));
        assert_eq!("alpha=6".parse::<BiasMode>().unwrap(), BiasMode::Alpha(6.0));
        assert!("beta:2".parse::<BiasMode>().is_err());
        assert_eq!("ccif:4".parse::<Scheme>().unwrap(), Scheme::Ccif { windows: Some(4) });
        assert_eq!("DCIF".parse::<Scheme>().unwrap(), Scheme::Dcif);
        assert!("ccif:0".parse::<Scheme>().is_err());
        for s in ["iftem", "ccif", "ccif:7", "dcif"] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn single_window_ccif_equals_iftem() {
        let cfg = TrialConfig { seed: 3, ..TrialConfig::default() };
        let p = Prepared::new(&cfg).unwrap();
        for bits in [6, 10] {
            let a = p.run(Scheme::Iftem, bits).unwrap();
            let b = p.run(Scheme::Ccif { windows: Some(1) }, bits).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = TrialConfig { seed: 8, scheme: Scheme::Dcif, bits: 9, ..TrialConfig::default() };
        let a = run_trial(&cfg).unwrap();
        let b = run_trial(&cfg).unwrap();
        assert_eq!(a.mse_db.to_bits(), b.mse_db.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_carry_context() {
        let cfg = TrialConfig { bias: BiasMode::Fixed(1.0), ..TrialConfig::default() };
        let err = run_trial(&cfg).unwrap_err();
        assert!(matches!(err, Error::Trial { .. }));
        assert!(err.to_string().contains("seed=0"));
        assert!(run_trial(&TrialConfig { bits: 0, ..TrialConfig::default() }).is_err());
    }

    #[test]
    fn tiny_sweep_matches_run_trial() {
        let grid = SweepGrid {
            base: TrialConfig { seed: 0, ..TrialConfig::default() },
            omegas: vec![hz_to_rad(80.0)],
            biases: vec![BiasMode::Alpha(6.0)],
            schemes: vec![Scheme::Dcif],
            bits: vec![7],
            seeds: vec![5],
            threads: 1,
        };
        let rows = sweep(&grid).unwrap();
        assert_eq!(rows.len(), 3);
        let direct = run_trial(&TrialConfig {
            bias: BiasMode::Alpha(6.0),
            scheme: Scheme::Dcif,
            bits: 7,
            seed: 5,
            ..TrialConfig::default()
        })
        .unwrap();
        assert_eq!(rows[0].mse_db, direct.mse_db);
        assert_eq!(rows[0].total_bits, direct.total_bits as f64);
        assert_eq!(rows[1].kind, "mean");
        assert_eq!(rows[1].mse_db, direct.mse_db);
        assert_eq!(rows[2].mse_db, 0.0);
    }

    #[test]
    fn sweep_records_failures_and_keeps_order() {
        let grid = SweepGrid {
            base: TrialConfig::default(),
            omegas: vec![hz_to_rad(80.0)],
            biases: vec![BiasMode::Fixed(1.0), BiasMode::Fixed(35.0)],
            schemes: vec![Scheme::Iftem, Scheme::Ccif { windows: None }],
            bits: vec![6, 8],
            seeds: vec![0, 1],
            threads: 1,
        };
        let rows = sweep(&grid).unwrap();
        let trials: Vec<&Row> = rows.iter().filter(|r| r.kind == "trial").collect();
        assert_eq!(trials.len(), 16);
        assert!(trials[..8].iter().all(|r| !r.is_ok()));
        assert!(trials[8..].iter().all(|r| r.is_ok()));
        let order: Vec<(String, u32, u64)> =
            trials[8..].iter().map(|r| (r.scheme.clone(), r.bits, r.seed.unwrap())).collect();
        assert_eq!(order[0], ("iftem".into(), 6, 0));
        assert_eq!(order[1], ("iftem".into(), 6, 1));
        assert_eq!(order[2], ("iftem".into(), 8, 0));
        assert_eq!(order[4], ("ccif".into(), 6, 0));
        assert!(sweep(&SweepGrid { seeds: vec![], ..grid }).is_err());
    }

    #[test]
    fn more_bits_do_not_hurt() {
        let p = Prepared::new(&TrialConfig { seed: 2, ..TrialConfig::default() }).unwrap();
        for scheme in [Scheme::Iftem, Scheme::Ccif { windows: None }, Scheme::Dcif] {
            let mut prev = f64::INFINITY;
            for bits in 6..=15 {
                let db = p.run(scheme, bits).unwrap().mse_db;
                assert!(db <= prev + 0.5, "{scheme} at {bits} bits: {db} after {prev}");
                prev = db;
            }
        }
    }
}
