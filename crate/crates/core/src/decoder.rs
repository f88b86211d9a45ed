//! Recovery of the input from firing times.
//!
//! Each interval gives one linear measurement `y_n = ∫_{t_n}^{t_{n+1}} x`.
//! The input is modeled as a sum of lowpass kernels `g(t) = sin(Ωt)/(πt)`
//! centred at the interval midpoints, and the coefficients solve a
//! ridge-regularized least-squares problem.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::encoder::measurements_from;
use crate::error::{Error, Result};
use crate::params::TemParams;
use crate::quad::GaussLegendre;

/// Floor of the dB metric for numerically identical signals.
pub const MSE_FLOOR_DB: f64 = -200.0;
/// Systems whose estimated condition number exceeds this are rejected.
const MAX_CONDITION: f64 = 1e15;

/// `t̂_0 = t0`, `t̂_{n+1} = t̂_n + T̂_n`.
pub fn firing_times(t0: f64, intervals: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(intervals.len() + 1);
    let mut t = t0;
    out.push(t);
    for &dt in intervals {
        t += dt;
        out.push(t);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    /// Band edge in rad/s.
    pub omega: f64,
    /// Output grid spacing in seconds.
    pub grid_spacing: f64,
    /// Ridge weight relative to the mean diagonal of `AᵀA`.
    pub regularization: f64,
    pub quadrature_points: usize,
    /// Fraction of the duration dropped at each end by the error metric.
    pub trim_fraction: f64,
}

impl ReconstructionConfig {
    /// Defaults: grid at an eighth of the Nyquist spacing, `ε = 1e-8`,
    /// 16-point quadrature, 10% trim.
    pub fn new(omega: f64) -> Self {
        Self {
            omega,
            grid_spacing: PI / (8.0 * omega),
            regularization: 1e-8,
            quadrature_points: 16,
            trim_fraction: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::invalid(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.grid_spacing > 0.0) || self.grid_spacing > PI / (4.0 * self.omega) * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "grid spacing {} must lie in (0, π/(4Ω)] = (0, {}]",
                self.grid_spacing,
                PI / (4.0 * self.omega)
            )));
        }
        if !(self.regularization > 0.0) {
            return Err(Error::invalid("regularization must be positive"));
        }
        if self.quadrature_points == 0 {
            return Err(Error::invalid("need at least one quadrature point"));
        }
        if !(0.0..=0.25).contains(&self.trim_fraction) {
            return Err(Error::invalid(format!(
                "trim fraction must lie in [0, 0.25], got {}",
                self.trim_fraction
            )));
        }
        Ok(())
    }
}

/// `x̂(t) = Σ c_k·g(t − s_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    pub omega: f64,
    pub centers: Vec<f64>,
    pub coefficients: Vec<f64>,
}

impl KernelModel {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.centers
            .iter()
            .zip(&self.coefficients)
            .map(|(&s, &c)| c * kernel(self.omega, t - s))
            .sum()
    }
}

fn kernel(omega: f64, u: f64) -> f64 {
    if u.abs() < 1e-9 / omega {
        omega / PI
    } else {
        (omega * u).sin() / (PI * u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructedSignal {
    pub model: KernelModel,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `‖Ac − y‖₂`.
    pub residual_norm: f64,
    /// Rough condition estimate of the regularized normal matrix.
    pub condition: f64,
    /// False when some interval exceeds the Nyquist spacing `π/Ω`.
    pub density_ok: bool,
}

impl ReconstructedSignal {
    /// Two columns, `time,value`.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("time,value\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            let _ = writeln!(s, "{t:e},{v:e}");
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

pub fn reconstruct(times: &[f64], params: &TemParams, cfg: &ReconstructionConfig) -> Result<ReconstructedSignal> {
    reconstruct_with(times, params.bias(), params.kappa_delta(), cfg)
}

/// Same as [`reconstruct`], with the sampler given by `b` and `κδ` alone.
pub fn reconstruct_with(
    times: &[f64],
    bias: f64,
    kappa_delta: f64,
    cfg: &ReconstructionConfig,
) -> Result<ReconstructedSignal> {
    cfg.validate()?;
    if times.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "reconstruction needs at least 3 firings, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("firing times must be strictly increasing"));
    }
    let omega = cfg.omega;
    let intervals: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    let p = TemParams::new(bias, 1.0, kappa_delta)?;
    let y = DVector::from_vec(measurements_from(&p, &intervals).values);
    let n = intervals.len();
    let centers: Vec<f64> = times.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let a = assemble(times, &centers, omega, cfg.quadrature_points);

    let ata = a.transpose() * &a;
    let lambda = cfg.regularization * ata.trace() / n as f64;
    let mut normal = ata;
    for i in 0..n {
        normal[(i, i)] += lambda;
    }
    let rhs = a.transpose() * &y;
    let fail = |reason: &str, condition: f64| Error::Reconstruction {
        reason: reason.to_string(),
        residual_norm: f64::NAN,
        condition,
    };
    let chol = normal.cholesky().ok_or_else(|| fail("normal matrix is not positive definite", f64::INFINITY))?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d.abs()), hi.max(d.abs())));
    let condition = (hi / lo).powi(2);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(fail("normal matrix is too ill-conditioned", condition));
    }
    let c = chol.solve(&rhs);
    let residual_norm = (&a * &c - &y).norm();
    if !residual_norm.is_finite() || c.iter().any(|v| !v.is_finite()) {
        return Err(Error::Reconstruction {
            reason: "solution is not finite".into(),
            residual_norm,
            condition,
        });
    }

    let model = KernelModel {
        omega,
        centers,
        coefficients: c.iter().copied().collect(),
    };
    let grid = output_grid(times[0], times[n], cfg.grid_spacing);
    let values = grid.iter().map(|&t| model.evaluate(t)).collect();
    let density_ok = intervals.iter().all(|&t| t < PI / omega);
    Ok(ReconstructedSignal {
        model,
        times: grid,
        values,
        residual_norm,
        condition,
        density_ok,
    })
}

/// Evenly spaced grid from `a` up to and including the last point `≤ b`.
pub fn output_grid(a: f64, b: f64, spacing: f64) -> Vec<f64> {
    let n = ((b - a) / spacing + 1e-9).floor() as usize;
    (0..=n).map(|i| a + i as f64 * spacing).collect()
}

/// `A[n,k] = ∫_{t_n}^{t_{n+1}} g(τ − s_k) dτ`. The sine of the difference is
/// expanded so each node and centre needs a single sine and cosine.
fn assemble(times: &[f64], centers: &[f64], omega: f64, points: usize) -> DMatrix<f64> {
    let rule = GaussLegendre::new(points);
    let n = centers.len();
    let cs: Vec<(f64, f64)> = centers.iter().map(|&s| (omega * s).sin_cos()).collect();
    let mut a = DMatrix::zeros(n, n);
    let mut nodes = Vec::with_capacity(points);
    for row in 0..n {
        nodes.clear();
        nodes.extend(rule.mapped(times[row], times[row + 1]).map(|(t, w)| {
            let (s, c) = (omega * t).sin_cos();
            (t, w, s, c)
        }));
        for (k, &(ss, sc)) in cs.iter().enumerate() {
            let sk = centers[k];
            let mut acc = 0.0;
            for &(t, w, s, c) in &nodes {
                let u = t - sk;
                acc += w * if (omega * u).abs() < 1e-3 {
                    kernel(omega, u)
                } else {
                    (s * sc - c * ss) / (PI * u)
                };
            }
            a[(row, k)] = acc;
        }
    }
    a
}

/// `20·log10 ‖x − x̂‖` with the norm approximated by
/// `sqrt(spacing·Σ d²)` over the samples left after dropping
/// `floor(trim·len)` at each end.
pub fn mse_db(x: &[f64], xhat: &[f64], spacing: f64, trim: f64) -> Result<f64> {
    if x.len() != xhat.len() {
        return Err(Error::invalid(format!("grid mismatch: {} vs {} samples", x.len(), xhat.len())));
    }
    if !(spacing > 0.0) {
        return Err(Error::invalid("grid spacing must be positive"));
    }
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::invalid(format!("trim fraction must lie in [0, 0.5), got {trim}")));
    }
    let cut = (trim * x.len() as f64).floor() as usize;
    let range = cut..x.len() - cut;
    let ss: f64 = x[range.clone()].iter().zip(&xhat[range]).map(|(a, b)| (a - b).powi(2)).sum();
    let norm = (spacing * ss).sqrt();
    Ok(if norm > 0.0 { (20.0 * norm.log10()).max(MSE_FLOOR_DB) } else { MSE_FLOOR_DB })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::encode;
    use crate::params::{amplitude_bound, hz_to_rad, time_bounds};
    use crate::signal::BandlimitedSignal;
    use crate::codec::{uniform_encode, decode_stream};

    #[test]
    fn firing_time_examples() {
        assert_eq!(firing_times(0.5, &[]), [0.5]);
        assert_eq!(firing_times(0.0, &[1e-3, 2e-3]), [0.0, 1e-3, 3e-3]);
    }

    #[test]
    fn mse_examples() {
        assert_eq!(mse_db(&[1.0, 0.0, 0.0], &[0.0; 3], 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(mse_db(&[1.0, 2.0], &[1.0, 2.0], 0.1, 0.0).unwrap(), MSE_FLOOR_DB);
        let x: Vec<f64> = (0..100).map(|i| f64::from(i).sin()).collect();
        let trimmed: f64 = x[10..90].iter().map(|v| v * v).sum::<f64>() * 0.01;
        let got = mse_db(&x, &vec![0.0; 100], 0.01, 0.1).unwrap();
        assert!((got - 10.0 * trimmed.log10()).abs() < 1e-12);
        assert!(mse_db(&[1.0], &[1.0, 2.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let omega = hz_to_rad(80.0);
        assert!(ReconstructionConfig::new(omega).validate().is_ok());
        let coarse = ReconstructionConfig { grid_spacing: PI / (2.0 * omega), ..ReconstructionConfig::new(omega) };
        assert!(coarse.validate().is_err());
        let no_ridge = ReconstructionConfig { regularization: 0.0, ..ReconstructionConfig::new(omega) };
        assert!(no_ridge.validate().is_err());
        let trim = ReconstructionConfig { trim_fraction: 0.3, ..ReconstructionConfig::new(omega) };
        assert!(trim.validate().is_err());
    }

    fn setup(seed: u64) -> (BandlimitedSignal, TemParams) {
        let omega = hz_to_rad(80.0);
        let sig = BandlimitedSignal::generate(omega, 0.8, 16.0 * PI / omega, seed).unwrap();
        let c = amplitude_bound(0.8, omega).unwrap();
        (sig, TemParams::with_alpha(6.0, c, 0.5, 0.075).unwrap())
    }

    fn error_db(sig: &BandlimitedSignal, rec: &ReconstructedSignal) -> f64 {
        let truth: Vec<f64> = rec.times.iter().map(|&t| sig.evaluate(t)).collect();
        mse_db(&truth, &rec.values, PI / (8.0 * sig.omega()), 0.1).unwrap()
    }

    #[test]
    fn zero_measurements_give_zero() {
        let p = TemParams::new(35.0, 0.5, 0.075).unwrap();
        let t = p.kappa_delta() / p.bias();
        let times = firing_times(0.0, &vec![t; 60]);
        let rec = reconstruct(&times, &p, &ReconstructionConfig::new(hz_to_rad(80.0))).unwrap();
        assert!(rec.values.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn unquantized_recovery() {
        let (sig, p) = setup(11);
        let fs = encode(&sig, &p, 0.0, sig.duration()).unwrap();
        let rec = reconstruct(&fs.firing_times(), &p, &ReconstructionConfig::new(sig.omega())).unwrap();
        assert!(rec.density_ok);
        let db = error_db(&sig, &rec);
        assert!(db <= -40.0, "{db} dB");
    }

    #[test]
    fn more_bits_help() {
        let (sig, p) = setup(4);
        let fs = encode(&sig, &p, 0.0, sig.duration()).unwrap();
        let bounds = time_bounds(&p, sig.amplitude_bound()).unwrap();
        let cfg = ReconstructionConfig::new(sig.omega());
        let db = |bits: u32| {
            let q = decode_stream(&uniform_encode(&fs, 1 << bits, bounds).unwrap()).unwrap();
            error_db(&sig, &reconstruct(&firing_times(fs.t0, &q), &p, &cfg).unwrap())
        };
        assert!(db(12) < db(6));
    }

    #[test]
    fn quantized_time_drift() {
        let (sig, p) = setup(2);
        let fs = encode(&sig, &p, 0.0, sig.duration()).unwrap();
        let bounds = time_bounds(&p, sig.amplitude_bound()).unwrap();
        let q = decode_stream(&uniform_encode(&fs, 64, bounds).unwrap()).unwrap();
        let half = 0.5 * bounds.range() / 64.0;
        let exact = fs.firing_times();
        for (n, (a, b)) in firing_times(fs.t0, &q).iter().zip(&exact).enumerate() {
            assert!((a - b).abs() <= n as f64 * half * (1.0 + 1e-9) + 1e-15);
        }
    }

    #[test]
    fn quadrature_refinement_is_stable() {
        let (sig, p) = setup(5);
        let fs = encode(&sig, &p, 0.0, sig.duration()).unwrap();
        let times = fs.firing_times();
        let centers: Vec<f64> = times.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let a16 = assemble(&times, &centers, sig.omega(), 16);
        let a24 = assemble(&times, &centers, sig.omega(), 24);
        assert!((a16 - a24).amax() <= 1e-10 * sig.omega() / PI * bounds_width(&times));
    }

    fn bounds_width(times: &[f64]) -> f64 {
        times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_short_or_unordered_input() {
        let p = TemParams::new(35.0, 0.5, 0.075).unwrap();
        let cfg = ReconstructionConfig::new(hz_to_rad(80.0));
        assert!(matches!(reconstruct(&[0.0, 1e-3], &p, &cfg), Err(Error::InsufficientData(_))));
        assert!(reconstruct(&[0.0, 1e-3, 1e-3, 2e-3], &p, &cfg).is_err());
    }

    #[test]
    fn csv_export() {
        let p = TemParams::new(35.0, 0.5, 0.075).unwrap();
        let times = firing_times(0.0, &[1.1e-3; 10]);
        let rec = reconstruct(&times, &p, &ReconstructionConfig::new(hz_to_rad(80.0))).unwrap();
        let text = rec.to_csv_string();
        assert!(text.starts_with("time,value\n"));
        assert_eq!(text.lines().count(), rec.times.len() + 1);
    }
}
