//! Flat `key = value` configuration text. Blank lines and `#` comments are
//! skipped. Frequencies are read in the unit named by `omega_unit` (`hz`
//! by default, meaning `Ω = 2π·f`; `rad` takes rad/s).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{BiasMode, Scheme, SweepGrid, TrialConfig};
use crate::codec::EstimatorParams;
use crate::error::{Error, Result};
use crate::params::{hz_to_rad, rad_to_hz};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "CIFTEM_OUT_DIR";

const KEYS: &[&str] = &[
    "accounting",
    "bias",
    "biases",
    "bits",
    "delta",
    "duration_nyquist",
    "energy",
    "kappa",
    "l",
    "l_init",
    "l_max",
    "m",
    "omega",
    "omega_unit",
    "omegas",
    "scheme",
    "schemes",
    "seed",
    "seeds",
    "threads",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {}: expected key = value, got {raw:?}", n + 1)))?;
            kv.set(k, v).map_err(|e| Error::invalid(format!("line {}: {e}", n + 1)))?;
        }
        Ok(kv)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| Error::parse(path, e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::invalid(format!("unknown config key {key:?}")));
        }
        self.map.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    /// Entries of `other` replace those of `self`.
    pub fn merge(&mut self, other: &KeyValues) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.map {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::invalid(format!("{key}: cannot parse {v:?}"))))
            .transpose()
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(s.trim())).collect())
            .transpose()
    }

    fn rad_per_unit(&self) -> Result<bool> {
        match self.get("omega_unit").unwrap_or("hz").to_ascii_lowercase().as_str() {
            "hz" => Ok(false),
            "rad" | "rad/s" => Ok(true),
            other => Err(Error::invalid(format!("omega_unit must be hz or rad, got {other:?}"))),
        }
    }

    fn to_omega(&self, v: f64) -> Result<f64> {
        Ok(if self.rad_per_unit()? { v } else { hz_to_rad(v) })
    }

    /// Trial settings; missing keys keep the values of `base`.
    pub fn trial_config(&self, base: &TrialConfig) -> Result<TrialConfig> {
        let mut c = *base;
        if let Some(v) = self.num::<f64>("omega")? {
            c.omega = self.to_omega(v)?;
        }
        if let Some(v) = self.num("energy")? {
            c.energy = v;
        }
        if let Some(v) = self.num("duration_nyquist")? {
            c.duration_nyquist = v;
        }
        if let Some(v) = self.num("seed")? {
            c.seed = v;
        }
        if let Some(v) = self.get("bias") {
            c.bias = v.parse()?;
        }
        if let Some(v) = self.num("kappa")? {
            c.kappa = v;
        }
        if let Some(v) = self.num("delta")? {
            c.delta = v;
        }
        if let Some(v) = self.get("scheme") {
            c.scheme = v.parse()?;
        }
        if let Some(v) = self.get("bits") {
            // a sweep range keeps its first value for a single trial
            c.bits = parse_bits(v)?[0];
        }
        let e = &mut c.estimator;
        for (key, slot) in [("m", &mut e.window), ("l", &mut e.cadence), ("l_init", &mut e.l_init), ("l_max", &mut e.l_max)] {
            if let Some(v) = self.num(key)? {
                *slot = v;
            }
        }
        if let Some(v) = self.get("accounting") {
            c.accounting = v.parse()?;
        }
        Ok(c)
    }

    /// Sweep grid; missing keys keep the values of `base`.
    pub fn sweep_grid(&self, base: &SweepGrid) -> Result<SweepGrid> {
        let mut g = base.clone();
        g.base = self.trial_config(&base.base)?;
        if let Some(v) = self.list("omegas", |s| {
            s.parse::<f64>().map_err(|_| Error::invalid(format!("omegas: cannot parse {s:?}")))
        })? {
            g.omegas = v.into_iter().map(|w| self.to_omega(w)).collect::<Result<_>>()?;
        }
        if let Some(v) = self.list("biases", str::parse::<BiasMode>)? {
            g.biases = v;
        }
        if let Some(v) = self.list("schemes", str::parse::<Scheme>)? {
            g.schemes = v;
        }
        // single-valued keys narrow the grid when the list form is absent
        if self.get("omegas").is_none() && self.get("omega").is_some() {
            g.omegas = vec![g.base.omega];
        }
        if self.get("biases").is_none() && self.get("bias").is_some() {
            g.biases = vec![g.base.bias];
        }
        if self.get("schemes").is_none() && self.get("scheme").is_some() {
            g.schemes = vec![g.base.scheme];
        }
        if let Some(v) = self.get("bits") {
            g.bits = parse_bits(v)?;
        }
        if let Some(n) = self.num::<u64>("seeds")? {
            let first = self.num::<u64>("seed")?.unwrap_or(0);
            g.seeds = (first..first + n).collect();
        }
        if let Some(v) = self.num("threads")? {
            g.threads = v;
        }
        Ok(g)
    }

    /// Every key needed to rerun `c`.
    pub fn from_trial(c: &TrialConfig) -> Self {
        let EstimatorParams { window, cadence, l_init, l_max } = c.estimator;
        let mut kv = Self::new();
        let entries = [
            ("omega_unit", "hz".to_string()),
            ("omega", rad_to_hz(c.omega).to_string()),
            ("energy", c.energy.to_string()),
            ("duration_nyquist", c.duration_nyquist.to_string()),
            ("seed", c.seed.to_string()),
            ("bias", c.bias.to_string()),
            ("kappa", c.kappa.to_string()),
            ("delta", c.delta.to_string()),
            ("scheme", c.scheme.to_string()),
            ("bits", c.bits.to_string()),
            ("m", window.to_string()),
            ("l", cadence.to_string()),
            ("l_init", l_init.to_string()),
            ("l_max", l_max.to_string()),
            ("accounting", c.accounting.to_string()),
        ];
        for (k, v) in entries {
            kv.map.insert(k.into(), v);
        }
        kv
    }

    pub fn from_grid(g: &SweepGrid) -> Self {
        let mut kv = Self::from_trial(&g.base);
        let join = |v: Vec<String>| v.join(",");
        kv.map.remove("scheme");
        kv.map.remove("bias");
        kv.map.insert("omegas".into(), join(g.omegas.iter().map(|w| rad_to_hz(*w).to_string()).collect()));
        kv.map.insert("biases".into(), join(g.biases.iter().map(ToString::to_string).collect()));
        kv.map.insert("schemes".into(), join(g.schemes.iter().map(ToString::to_string).collect()));
        kv.map.insert("bits".into(), join(g.bits.iter().map(ToString::to_string).collect()));
        let contiguous = g.seeds.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous && !g.seeds.is_empty() {
            kv.map.insert("seed".into(), g.seeds[0].to_string());
            kv.map.insert("seeds".into(), g.seeds.len().to_string());
        }
        kv.map.insert("threads".into(), g.threads.to_string());
        kv
    }
}

/// `6-15`, `6..15`, or a comma list.
pub fn parse_bits(v: &str) -> Result<Vec<u32>> {
    let bad = || Error::invalid(format!("bits: cannot parse {v:?}"));
    let range = v.split_once("..").or_else(|| v.split_once('-'));
    let out: Vec<u32> = match range {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            (a..=b).collect()
        }
        None => v
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?,
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Directory named by the environment variable, or `out`.
pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}
