//! Aggregate comparisons between schemes: matched-bit MSE gaps, the
//! compression table, window overhead and scheme ordering.

use serde::{Deserialize, Serialize};

use super::{sweep, BiasMode, Row, Scheme, SweepGrid, TrialConfig};
use crate::error::{Error, Result};
use crate::params::hz_to_rad;

/// Allowed range of the mean MSE change of a windowed scheme against the
/// baseline at matched total bits.
pub const IMPROVEMENT_BAND_DB: (f64, f64) = (-25.0, -3.0);
/// A windowed scheme at `K−2` bits may trail the baseline at `K` by this much.
pub const MATCH_ALLOWANCE_DB: f64 = 2.0;
pub const COMPRESSION_BAND_PERCENT: (f64, f64) = (8.0, 23.0);
pub const OVERHEAD_CEILING_PERCENT: f64 = 7.0;
pub const AVG_L_BAND: (f64, f64) = (2.0, 8.0);
/// CCIF may trail DCIF by this much.
pub const ORDER_ALLOWANCE_DB: f64 = 0.5;

/// Piecewise-linear curve, sorted by `x`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Curve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Curve {
    pub fn new(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (x, y) = points.into_iter().unzip();
        Self { x, y }
    }
}

/// Linear interpolation; outside the curve the end segment is extended.
/// NaN for fewer than two points.
pub fn interpolate(curve: &Curve, x: f64) -> f64 {
    let n = curve.x.len();
    if n < 2 {
        return if n == 1 && curve.x[0] == x { curve.y[0] } else { f64::NAN };
    }
    let i = match curve.x.iter().position(|&v| v >= x) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    };
    let (x0, x1, y0, y1) = (curve.x[i], curve.x[i + 1], curve.y[i], curve.y[i + 1]);
    if x1 == x0 {
        return 0.5 * (y0 + y1);
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Seed-averaged metrics of one (frequency, bias, scheme, bits) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub freq_hz: f64,
    pub bias: String,
    pub scheme: String,
    pub bits: u32,
    pub mse_db: f64,
    pub bits_per_sample: f64,
    pub total_bits: f64,
    pub overhead_percent: f64,
    pub avg_l: f64,
    pub count: u32,
}

/// The mean rows of a sweep.
pub fn summarize(rows: &[Row]) -> Vec<Summary> {
    rows.iter()
        .filter(|r| r.kind == "mean")
        .map(|r| Summary {
            freq_hz: r.freq_hz,
            bias: r.bias.clone(),
            scheme: r.scheme.clone(),
            bits: r.bits,
            mse_db: r.mse_db,
            bits_per_sample: r.bits_per_sample,
            total_bits: r.total_bits,
            overhead_percent: r.overhead_percent,
            avg_l: r.avg_l,
            count: r.count,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub cif_bits: u32,
    pub if_bits: u32,
    pub if_mse_db: f64,
    pub ccif_mse_db: f64,
    pub dcif_mse_db: f64,
    /// `100·(1 − bits_CCIF(K−2)/bits_IF(K))`.
    pub ccif_compression: f64,
    pub dcif_compression: f64,
}

/// Outcome of one aggregate check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub details: Vec<String>,
}

impl Check {
    fn new(name: &str) -> Self {
        Self { name: name.into(), pass: true, details: Vec::new() }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

/// Sweep at one band edge over both bias modes, all schemes and 6..=15
/// bits, reduced to seed means.
#[derive(Debug, Clone)]
pub struct PaperStudy {
    pub rows: Vec<Row>,
    pub summaries: Vec<Summary>,
    pub seeds: usize,
}

impl PaperStudy {
    /// 80 Hz, `E = 0.8`, 16 Nyquist spacings, `b = 35` and `α = 6`.
    pub fn grid(seeds: usize, threads: usize) -> SweepGrid {
        SweepGrid {
            base: TrialConfig::default(),
            omegas: vec![hz_to_rad(80.0)],
            biases: vec![BiasMode::Fixed(35.0), BiasMode::Alpha(6.0)],
            schemes: vec![Scheme::Iftem, Scheme::Ccif { windows: None }, Scheme::Dcif],
            bits: (6..=15).collect(),
            seeds: (0..seeds as u64).collect(),
            threads,
        }
    }

    pub fn run(grid: &SweepGrid) -> Result<Self> {
        Ok(Self::from_rows(sweep(grid)?, grid.seeds.len()))
    }

    pub fn from_rows(rows: Vec<Row>, seeds: usize) -> Self {
        let summaries = summarize(&rows);
        Self { rows, summaries, seeds }
    }

    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.kind == "trial" && !r.is_ok()).collect()
    }

    pub fn biases(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.summaries {
            if !out.contains(&s.bias) {
                out.push(s.bias.clone());
            }
        }
        out
    }

    pub fn get(&self, bias: &str, scheme: &str, bits: u32) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.bias == bias && s.scheme == scheme && s.bits == bits)
    }

    /// MSE against bits per sample.
    pub fn curve(&self, bias: &str, scheme: &str) -> Curve {
        Curve::new(
            self.summaries
                .iter()
                .filter(|s| s.bias == bias && s.scheme == scheme)
                .map(|s| (s.bits_per_sample, s.mse_db))
                .collect(),
        )
    }

    /// Mean MSE of `scheme` at `bits` minus `reference` interpolated at the
    /// same total bits per sample.
    pub fn matched_gap(&self, bias: &str, scheme: &str, reference: &str, bits: u32) -> Option<f64> {
        let s = self.get(bias, scheme, bits)?;
        let r = interpolate(&self.curve(bias, reference), s.bits_per_sample);
        r.is_finite().then_some(s.mse_db - r)
    }

    fn complete(&self, check: &mut Check) {
        let failed = self.failures();
        if !failed.is_empty() {
            check.record(false, format!("{} trials failed, first: {}", failed.len(), failed[0].error));
        }
    }

    /// Windowed schemes against the baseline at matched total bits, 8..=12.
    pub fn improvement(&self) -> Check {
        let mut c = Check::new("MSE gain at matched total bits");
        self.complete(&mut c);
        let (lo, hi) = IMPROVEMENT_BAND_DB;
        for bias in self.biases() {
            for scheme in ["ccif", "dcif"] {
                for bits in 8..=12 {
                    match self.matched_gap(&bias, scheme, "iftem", bits) {
                        Some(g) => c.record(
                            (lo..=hi).contains(&g),
                            format!("{bias} {scheme} {bits} bits: {g:+.2} dB (band [{lo}, {hi}])"),
                        ),
                        None => c.record(false, format!("{bias} {scheme} {bits} bits: missing data")),
                    }
                }
            }
        }
        c
    }

    pub fn table1(&self, bias: &str) -> Vec<Table1Row> {
        (6..=13)
            .filter_map(|cif_bits| {
                let base = self.get(bias, "iftem", cif_bits + 2)?;
                let cc = self.get(bias, "ccif", cif_bits)?;
                let dc = self.get(bias, "dcif", cif_bits)?;
                Some(Table1Row {
                    cif_bits,
                    if_bits: cif_bits + 2,
                    if_mse_db: base.mse_db,
                    ccif_mse_db: cc.mse_db,
                    dcif_mse_db: dc.mse_db,
                    ccif_compression: 100.0 * (1.0 - cc.total_bits / base.total_bits),
                    dcif_compression: 100.0 * (1.0 - dc.total_bits / base.total_bits),
                })
            })
            .collect()
    }

    /// Windowed schemes at `K−2` bits against the baseline at `K` bits.
    pub fn table1_check(&self) -> Check {
        let mut c = Check::new("compression table");
        self.complete(&mut c);
        let (lo, hi) = COMPRESSION_BAND_PERCENT;
        for bias in self.biases() {
            let rows = self.table1(&bias);
            if rows.len() != 8 {
                c.record(false, format!("{bias}: {} of 8 rows available", rows.len()));
            }
            let mut prev = [f64::INFINITY; 2];
            for r in &rows {
                for (i, (name, mse, comp)) in
                    [("ccif", r.ccif_mse_db, r.ccif_compression), ("dcif", r.dcif_mse_db, r.dcif_compression)]
                        .into_iter()
                        .enumerate()
                {
                    let gap = mse - r.if_mse_db;
                    let ok = gap <= MATCH_ALLOWANCE_DB && (lo..=hi).contains(&comp) && comp < prev[i];
                    c.record(
                        ok,
                        format!(
                            "{bias} {name} {} vs iftem {} bits: MSE gap {gap:+.2} dB, compression {comp:.2}%",
                            r.cif_bits, r.if_bits
                        ),
                    );
                    prev[i] = comp;
                }
            }
        }
        c
    }

    /// Mean window overhead over bias modes and 6..=15 bits, and the DCIF
    /// average window count.
    pub fn overhead(&self) -> Check {
        let mut c = Check::new("window overhead");
        self.complete(&mut c);
        for bias in self.biases() {
            for scheme in ["ccif", "dcif"] {
                let vals: Vec<&Summary> =
                    self.summaries.iter().filter(|s| s.bias == bias && s.scheme == scheme).collect();
                if vals.is_empty() {
                    c.record(false, format!("{bias} {scheme}: missing data"));
                    continue;
                }
                let n = vals.len() as f64;
                let ovh = vals.iter().map(|s| s.overhead_percent).sum::<f64>() / n;
                let avg_l = vals.iter().map(|s| s.avg_l).sum::<f64>() / n;
                c.record(
                    ovh <= OVERHEAD_CEILING_PERCENT,
                    format!("{bias} {scheme}: mean overhead {ovh:.2}% (ceiling {OVERHEAD_CEILING_PERCENT}%), mean L {avg_l:.2}"),
                );
                if scheme == "dcif" {
                    let (lo, hi) = AVG_L_BAND;
                    c.record((lo..=hi).contains(&avg_l), format!("{bias} dcif: mean L {avg_l:.2} in [{lo}, {hi}]"));
                }
            }
        }
        c
    }

    /// CCIF against DCIF at matched total bits, every bit depth.
    pub fn ordering(&self) -> Check {
        let mut c = Check::new("CCIF not worse than DCIF");
        self.complete(&mut c);
        for bias in self.biases() {
            for bits in 6..=15 {
                match self.matched_gap(&bias, "ccif", "dcif", bits) {
                    Some(g) => c.record(
                        g <= ORDER_ALLOWANCE_DB,
                        format!("{bias} {bits} bits: ccif - dcif = {g:+.2} dB"),
                    ),
                    None => c.record(false, format!("{bias} {bits} bits: missing data")),
                }
            }
        }
        c
    }
}

/// Compression table for the band edge, bias and sampler in `base`.
pub fn table1(base: &TrialConfig, seeds: usize, threads: usize) -> Result<Vec<Table1Row>> {
    if seeds == 0 {
        return Err(Error::invalid("need at least one seed"));
    }
    let grid = SweepGrid {
        base: *base,
        omegas: vec![base.omega],
        biases: vec![base.bias],
        schemes: vec![Scheme::Iftem, Scheme::Ccif { windows: None }, Scheme::Dcif],
        bits: (6..=15).collect(),
        seeds: (0..seeds as u64).collect(),
        threads,
    };
    let study = PaperStudy::run(&grid)?;
    if let Some(r) = study.failures().first() {
        return Err(Error::InternalConsistency(format!("trial failed: {}", r.error)));
    }
    Ok(study.table1(&base.bias.to_string()))
}
