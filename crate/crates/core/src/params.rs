//! Sampler parameters and the closed-form quantities derived from them.
//!
//! Frequencies are in radians per second throughout the library. Use
//! [`hz_to_rad`] at the boundary when a band edge is given in hertz.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for `b = α·c` when α is recorded.
const ALPHA_REL_TOL: f64 = 1e-12;

pub fn hz_to_rad(hz: f64) -> f64 {
    2.0 * PI * hz
}

pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// The integrate-and-fire sampler: bias `b`, integrator scale `κ` and
/// firing threshold `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemParams {
    bias: f64,
    kappa: f64,
    delta: f64,
    alpha: Option<f64>,
}

impl TemParams {
    pub fn new(bias: f64, kappa: f64, delta: f64) -> Result<Self> {
        for (name, v) in [("bias", bias), ("kappa", kappa), ("delta", delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            bias,
            kappa,
            delta,
            alpha: None,
        })
    }

    /// Sets the bias to `α·c` and records `α`.
    pub fn with_alpha(alpha: f64, amplitude: f64, kappa: f64, delta: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
        }
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha mode needs a positive amplitude bound, got {amplitude}"
            )));
        }
        let mut p = Self::new(alpha * amplitude, kappa, delta)?;
        p.alpha = Some(alpha);
        Ok(p)
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// `κδ`, the area under `b + x(t)` between two firings.
    pub fn kappa_delta(&self) -> f64 {
        self.kappa * self.delta
    }

    /// Checks `b > c` and, when α is recorded, `b = α·c`.
    pub fn validate_for(&self, amplitude: f64) -> Result<()> {
        if !(self.bias > amplitude) {
            return Err(Error::InfeasibleSampler {
                bias: self.bias,
                amplitude,
            });
        }
        if let Some(alpha) = self.alpha {
            let expected = alpha * amplitude;
            if (self.bias - expected).abs() > ALPHA_REL_TOL * expected {
                return Err(Error::invalid(format!(
                    "bias {} is not alpha*c = {expected}",
                    self.bias
                )));
            }
        }
        Ok(())
    }
}

/// The bandlimited signal class: band edge `Ω`, energy `E` and the derived
/// amplitude bound `c = sqrt(EΩ/π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    omega: f64,
    energy: f64,
    amplitude_bound: f64,
}

impl SignalSpec {
    pub fn new(omega: f64, energy: f64) -> Result<Self> {
        Ok(Self {
            omega,
            energy,
            amplitude_bound: amplitude_bound(energy, omega)?,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn amplitude_bound(&self) -> f64 {
        self.amplitude_bound
    }

    /// Spacing of the Nyquist grid, `π/Ω`.
    pub fn nyquist_spacing(&self) -> f64 {
        PI / self.omega
    }
}

/// The range `[Δt_min, Δt_max]` that contains every inter-firing interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeBounds {
    pub dt_min: f64,
    pub dt_max: f64,
}

impl TimeBounds {
    pub fn new(dt_min: f64, dt_max: f64) -> Result<Self> {
        if !(dt_min > 0.0 && dt_max >= dt_min && dt_max.is_finite()) {
            return Err(Error::invalid(format!(
                "bounds need 0 < dt_min <= dt_max, got [{dt_min}, {dt_max}]"
            )));
        }
        Ok(Self { dt_min, dt_max })
    }

    /// `Δ_t = Δt_max − Δt_min`.
    pub fn range(&self) -> f64 {
        self.dt_max - self.dt_min
    }

    pub fn contains(&self, t: f64, rel_slack: f64) -> bool {
        t >= self.dt_min * (1.0 - rel_slack) && t <= self.dt_max * (1.0 + rel_slack)
    }
}

/// Amplitude bound of a `2Ω`-bandlimited signal of energy `E`.
pub fn amplitude_bound(energy: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    if !(energy >= 0.0 && energy.is_finite()) {
        return Err(Error::invalid(format!("energy must be nonnegative, got {energy}")));
    }
    Ok((energy * omega / PI).sqrt())
}

pub fn time_bounds(p: &TemParams, amplitude: f64) -> Result<TimeBounds> {
    if !(amplitude >= 0.0) {
        return Err(Error::invalid(format!("amplitude bound must be nonnegative, got {amplitude}")));
    }
    if !(p.bias > amplitude) {
        return Err(Error::InfeasibleSampler {
            bias: p.bias,
            amplitude,
        });
    }
    let kd = p.kappa_delta();
    Ok(TimeBounds {
        dt_min: kd / (p.bias + amplitude),
        dt_max: kd / (p.bias - amplitude),
    })
}

/// Whether the firing rate is guaranteed to exceed the Nyquist rate,
/// i.e. `Δt_max < π/Ω`.
pub fn check_density(p: &TemParams, amplitude: f64, omega: f64) -> Result<bool> {
    if !(omega > 0.0) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    let bounds = time_bounds(p, amplitude)?;
    Ok(bounds.dt_max < PI / omega)
}

/// Uniform K-level step over the full interval range, written in terms of
/// `α = b/c`.
pub fn iftem_step(p: &TemParams, amplitude: f64, levels: u32) -> Result<f64> {
    ccif_step(p, amplitude, levels, 1)
}

/// Step of a K-level quantizer applied inside one of `L` equal windows.
pub fn ccif_step(p: &TemParams, amplitude: f64, levels: u32, windows: u32) -> Result<f64> {
    if levels == 0 {
        return Err(Error::invalid("level count K must be at least 1"));
    }
    if windows == 0 {
        return Err(Error::invalid("window count L must be at least 1"));
    }
    if !(amplitude > 0.0) {
        return Err(Error::invalid(format!(
            "step size needs a positive amplitude bound, got {amplitude}"
        )));
    }
    p.validate_for(amplitude)?;
    let alpha = p.bias / amplitude;
    let lk = f64::from(windows) * f64::from(levels);
    Ok(p.kappa_delta() / ((alpha - 1.0) * (alpha + 1.0)) * 2.0 / (amplitude * lk))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn paper(bias: f64) -> TemParams {
        TemParams::new(bias, 0.5, 0.075).unwrap()
    }

    #[test]
    fn amplitude_bound_examples() {
        assert!(rel(amplitude_bound(0.8, 20.0 * PI).unwrap(), 4.0) < 1e-15);
        assert_eq!(amplitude_bound(0.0, 123.0).unwrap(), 0.0);
        assert!(rel(amplitude_bound(PI, 1.0).unwrap(), 1.0) < 1e-15);
        assert!(amplitude_bound(1.0, 0.0).is_err());
        assert!(amplitude_bound(1.0, -2.0).is_err());
    }

    #[test]
    fn amplitude_bound_is_monotone() {
        let mut prev = 0.0;
        for i in 0..50 {
            let v = amplitude_bound(0.1 * f64::from(i), 10.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        prev = 0.0;
        for i in 1..50 {
            let v = amplitude_bound(0.8, f64::from(i)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn time_bounds_examples() {
        let b = time_bounds(&paper(35.0), 4.0).unwrap();
        assert!(rel(b.dt_min, 0.0375 / 39.0) < 1e-14);
        assert!(rel(b.dt_max, 0.0375 / 31.0) < 1e-14);
        assert!((b.dt_min - 9.6154e-4).abs() < 1e-8);
        assert!((b.dt_max - 1.2097e-3).abs() < 1e-7);

        let b = time_bounds(&paper(24.0), 4.0).unwrap();
        assert!((b.dt_min - 1.3393e-3).abs() < 1e-7);
        assert!((b.dt_max - 1.8750e-3).abs() < 1e-12);

        let b = time_bounds(&paper(24.0), 0.0).unwrap();
        assert_eq!(b.dt_min, b.dt_max);
        assert_eq!(b.dt_min, 0.0375 / 24.0);
        assert_eq!(b.range(), 0.0);
    }

    #[test]
    fn time_bounds_rejects_weak_bias() {
        assert!(matches!(
            time_bounds(&paper(4.0), 4.0),
            Err(Error::InfeasibleSampler { .. })
        ));
        assert!(time_bounds(&paper(3.0), 4.0).is_err());
    }

    #[test]
    fn density_examples() {
        let p = paper(24.0);
        assert!(check_density(&p, 4.0, 62.8319).unwrap());
        assert!(!check_density(&p, 4.0, 2.0 * PI * 400.0).unwrap());
        assert!(!check_density(&p, 24.0 - 1e-9, 62.8319).unwrap());
    }

    #[test]
    fn iftem_step_examples() {
        let p = TemParams::with_alpha(6.0, 4.0, 0.5, 0.075).unwrap();
        let step = iftem_step(&p, 4.0, 64).unwrap();
        assert!(rel(step, (0.0375 / 35.0) * (2.0 / 256.0)) < 1e-14);
        assert!((step - 8.3705e-6).abs() < 1e-10);
        let b = time_bounds(&p, 4.0).unwrap();
        assert!(rel(step, b.range() / 64.0) < 1e-12);
        assert!((b.range() - 5.3571e-4).abs() < 1e-8);
        assert!(rel(iftem_step(&p, 4.0, 1).unwrap(), b.range()) < 1e-12);
        assert!(iftem_step(&p, 4.0, 0).is_err());
    }

    #[test]
    fn ccif_step_examples() {
        let p = TemParams::with_alpha(6.0, 4.0, 0.5, 0.075).unwrap();
        let base = iftem_step(&p, 4.0, 64).unwrap();
        assert_eq!(ccif_step(&p, 4.0, 64, 1).unwrap(), base);
        let s4 = ccif_step(&p, 4.0, 64, 4).unwrap();
        assert!((s4 - 2.0926e-6).abs() < 1e-10);
        for l in [2u32, 3, 5, 8] {
            let s = ccif_step(&p, 4.0, 64, l).unwrap();
            assert!(rel(f64::from(l) * s, base) < 1e-12);
            assert!(s < base);
        }
        assert!(ccif_step(&p, 4.0, 64, 0).is_err());
    }

    #[test]
    fn alpha_invariant_is_checked() {
        let p = TemParams::with_alpha(6.0, 4.0, 0.5, 0.075).unwrap();
        assert_eq!(p.bias(), 24.0);
        assert!(p.validate_for(4.0).is_ok());
        assert!(p.validate_for(4.1).is_err());
        assert!(TemParams::with_alpha(1.0, 4.0, 0.5, 0.075).is_err());
        assert!(TemParams::new(0.0, 0.5, 0.075).is_err());
        assert!(TemParams::new(1.0, -0.5, 0.075).is_err());
    }
}
