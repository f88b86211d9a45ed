//! Integrate-and-fire time encoding (IF-TEM) of bandlimited signals with
//! window-compressed quantization of the inter-firing intervals.
//!
//! The pipeline is split into stages that can be used on their own:
//!
//! - [`params`]: sampler parameters and the closed-form bounds and step sizes.
//! - [`signal`]: random finite-energy bandlimited test signals.
//! - [`encoder`]: the integrate-and-fire dynamics producing a [`FiringSequence`].
//! - [`codec`]: uniform, constant-window (CCIF) and dynamic-window (DCIF)
//!   quantization of intervals, the compressed record stream, its binary
//!   format and bit accounting.
//! - [`decoder`]: firing-time recovery, ridge-regularized least-squares
//!   reconstruction and the dB error metric.
//! - [`experiment`]: trials, sweeps and the compression table, plus CSV and
//!   plot-script output.
//!
//! ```
//! use ciftem::{amplitude_bound, encode, hz_to_rad, BandlimitedSignal, TemParams};
//!
//! let omega = hz_to_rad(80.0);
//! let sig = BandlimitedSignal::generate(omega, 0.8, 0.1, 3).unwrap();
//! let c = amplitude_bound(0.8, omega).unwrap();
//! let params = TemParams::with_alpha(6.0, c, 0.5, 0.075).unwrap();
//! let fs = encode(&sig, &params, 0.0, 0.1).unwrap();
//! assert!(fs.len() > 100);
//! ```

pub mod codec;
pub mod decoder;
pub mod encoder;
mod error;
pub mod experiment;
pub mod params;
mod quad;
pub mod signal;

pub use codec::{
    bit_cost, ccif_encode, counter_encode, dcif_encode, decode_stream, uniform_encode,
    AccountingMode, BitReport, CompressedStream, EstimatorParams, Mode, QuantizerConfig, Record,
    StreamHeader, WindowPartition,
};
pub use decoder::{
    firing_times, mse_db, reconstruct, reconstruct_with, ReconstructedSignal, ReconstructionConfig,
};
pub use encoder::{encode, measurements, oversampling_factor, FiringSequence, MeasurementSeq};
pub use error::{Error, Result};
pub use params::{
    amplitude_bound, ccif_step, check_density, hz_to_rad, iftem_step, rad_to_hz, time_bounds,
    SignalSpec, TemParams, TimeBounds,
};
pub use quad::GaussLegendre;
pub use signal::BandlimitedSignal;
