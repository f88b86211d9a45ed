//! Finite sinc-series test signals.
//!
//! A signal is `x(t) = Σ a_k·sinc((t − k·h)/h)` with `h = π/Ω`, so it is
//! bandlimited to `Ω` and interpolates its coefficients on the grid.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::params::{amplitude_bound, SignalSpec};
use crate::quad::GaussLegendre;

/// Coefficients at each end that are ramped toward zero.
const TAPER_LEN: usize = 5;
/// Minimum support length in grid spacings.
const MIN_SPACINGS: f64 = 10.0;
/// Energy quadrature panels per grid spacing.
const ENERGY_PANELS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BandlimitedSignal {
    omega: f64,
    spacing: f64,
    duration: f64,
    coefficients: Vec<f64>,
    energy: f64,
}

impl BandlimitedSignal {
    /// Draws i.i.d. uniform coefficients on the grid covering `[0, duration]`,
    /// tapers both ends and rescales so the energy over the support is
    /// exactly `energy`. Deterministic in `seed`.
    pub fn generate(omega: f64, energy: f64, duration: f64, seed: u64) -> Result<Self> {
        amplitude_bound(energy, omega)?;
        let spacing = PI / omega;
        if !(duration >= MIN_SPACINGS * spacing * (1.0 - 1e-12)) {
            return Err(Error::invalid(format!(
                "support {duration} s is shorter than {MIN_SPACINGS} grid spacings ({} s)",
                MIN_SPACINGS * spacing
            )));
        }
        let n = (duration / spacing + 1e-9).floor() as usize;
        let mut coefficients = vec![0.0; n + 1];
        if energy == 0.0 {
            return Ok(Self {
                omega,
                spacing,
                duration,
                coefficients,
                energy,
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for a in coefficients.iter_mut() {
            *a = rng.gen_range(-1.0..1.0);
        }
        for i in 0..TAPER_LEN {
            let ramp = (i + 1) as f64 / (TAPER_LEN + 1) as f64;
            coefficients[i] *= ramp;
            coefficients[n - i] *= ramp;
        }

        let mut sig = Self {
            omega,
            spacing,
            duration,
            coefficients,
            energy: 0.0,
        };
        let measured = sig.measure_energy(ENERGY_PANELS);
        let scale = (energy / measured).sqrt();
        sig.coefficients.iter_mut().for_each(|a| *a *= scale);
        sig.energy = energy;
        Ok(sig)
    }

    /// Builds a signal from explicit grid coefficients; the recorded energy
    /// is measured by quadrature.
    pub fn from_coefficients(omega: f64, coefficients: Vec<f64>, duration: f64) -> Result<Self> {
        amplitude_bound(0.0, omega)?;
        if !(duration > 0.0) {
            return Err(Error::invalid(format!("support must be positive, got {duration}")));
        }
        let mut sig = Self {
            omega,
            spacing: PI / omega,
            duration,
            coefficients,
            energy: 0.0,
        };
        sig.energy = sig.measure_energy(ENERGY_PANELS);
        Ok(sig)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Grid spacing `π/Ω`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// The recorded energy `E`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn spec(&self) -> SignalSpec {
        SignalSpec::new(self.omega, self.energy).expect("validated at construction")
    }

    /// `sqrt(EΩ/π)` for the recorded energy.
    pub fn amplitude_bound(&self) -> f64 {
        self.spec().amplitude_bound()
    }

    /// Sums the full series. With `u = t/h`, every kernel shares
    /// `sin(πu)` up to sign, so one sine is evaluated per call.
    pub fn evaluate(&self, t: f64) -> f64 {
        let u = t / self.spacing;
        let nearest = u.round();
        let r = u - nearest;
        if r == 0.0 && nearest >= 0.0 && (nearest as usize) < self.coefficients.len() {
            return self.coefficients[nearest as usize];
        }
        // sin(πu) = (−1)^n·sin(πr) with n the nearest integer.
        let s = (PI * r).sin();
        let mut sum = 0.0;
        let mut sign = if (nearest as i64) % 2 == 0 { 1.0 } else { -1.0 };
        for (k, &a) in self.coefficients.iter().enumerate() {
            if a != 0.0 {
                let d = u - k as f64;
                sum += if d == 0.0 { a } else { a * sign * s / (PI * d) };
            }
            sign = -sign;
        }
        sum
    }

    /// `∫_a^b x(τ) dτ` by adaptive Gauss-Legendre.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        thread_local! {
            static RULE: GaussLegendre = GaussLegendre::new(16);
        }
        let tol = 1e-14 * self.amplitude_bound().max(1e-300) * (b - a).abs();
        RULE.with(|g| g.adaptive(&|t| self.evaluate(t), a, b, tol))
    }

    /// `∫ x² ` over the support, by composite 16-point Gauss-Legendre.
    pub fn measure_energy(&self, panels_per_spacing: usize) -> f64 {
        let g = GaussLegendre::new(16);
        let panels = ((self.duration / self.spacing) * panels_per_spacing as f64).ceil().max(1.0) as usize;
        let width = self.duration / panels as f64;
        (0..panels)
            .map(|i| {
                let a = i as f64 * width;
                g.integrate(|t| self.evaluate(t).powi(2), a, a + width)
            })
            .sum()
    }

    /// Text form: a header line `omega,energy,duration` followed by one
    /// coefficient per line, all in shortest round-trip notation.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{},{},{}", self.omega, self.energy, self.duration);
        for a in &self.coefficients {
            let _ = writeln!(out, "{a}");
        }
        out
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::invalid("empty signal file"))?;
        let fields: Vec<f64> = header
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("bad signal header {header:?}: {e}")))?;
        let [omega, energy, duration] = fields[..] else {
            return Err(Error::invalid(format!("signal header needs 3 fields, got {header:?}")));
        };
        amplitude_bound(energy, omega)?;
        let coefficients = lines
            .map(|l| l.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::invalid(format!("bad coefficient: {e}")))?;
        Ok(Self {
            omega,
            spacing: PI / omega,
            duration,
            coefficients,
            energy,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text).map_err(|e| Error::parse(path, e.to_string()))
    }

    /// Same signal with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coefficients.iter_mut().for_each(|a| *a *= s);
        out.energy *= s * s;
        out
    }
}
