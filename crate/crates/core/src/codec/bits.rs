use serde::{Deserialize, Serialize};

use super::{CompressedStream, Mode};

/// Bits needed to index `n` values: `ceil(log2 n)`, zero for `n <= 1`.
pub fn bits_for(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccountingMode {
    /// Residual bits plus window bits at emissions.
    #[default]
    Paper,
    /// Adds a one-bit change flag per sample in windowed modes.
    SelfDelimiting,
}

impl std::str::FromStr for AccountingMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(Self::Paper),
            "self-delimiting" | "self_delimiting" | "selfdelimiting" => Ok(Self::SelfDelimiting),
            other => Err(crate::Error::invalid(format!("unknown accounting mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for AccountingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Paper => "paper",
            Self::SelfDelimiting => "self-delimiting",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitReport {
    pub total_bits: u64,
    pub residual_bits: u64,
    pub window_bits: u64,
    pub flag_bits: u64,
    /// `100·(window_bits + flag_bits)/residual_bits`, 0 when there are no
    /// residual bits.
    pub overhead_percent: f64,
    pub mode: AccountingMode,
}

impl BitReport {
    /// Average bits per sample.
    pub fn bits_per_sample(&self, samples: usize) -> f64 {
        if samples == 0 {
            0.0
        } else {
            self.total_bits as f64 / samples as f64
        }
    }
}

pub fn bit_cost(cs: &CompressedStream, mode: AccountingMode) -> BitReport {
    let n = cs.records.len() as u64;
    let residual_bits = n * u64::from(bits_for(cs.header.levels));
    let window_bits: u64 = cs
        .records
        .iter()
        .filter(|r| r.window.is_some())
        .map(|r| u64::from(bits_for(r.windows)))
        .sum();
    let flag_bits = match (mode, cs.header.mode) {
        (AccountingMode::SelfDelimiting, Mode::Ccif { .. } | Mode::Dcif(_)) => n,
        _ => 0,
    };
    let overhead_percent = if residual_bits == 0 {
        0.0
    } else {
        100.0 * (window_bits + flag_bits) as f64 / residual_bits as f64
    };
    BitReport {
        total_bits: residual_bits + window_bits + flag_bits,
        residual_bits,
        window_bits,
        flag_bits,
        overhead_percent,
        mode,
    }
}
