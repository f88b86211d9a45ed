//! Binary container: a 64-byte little-endian header followed by bit-packed
//! records, most significant bit first.
//!
//! | bytes  | field                                     |
//! |--------|-------------------------------------------|
//! | 0..4   | magic `CIFT`                              |
//! | 4      | format version (1)                        |
//! | 5      | mode: 0 uniform, 1 ccif, 2 dcif           |
//! | 6..8   | L (ccif) or m (dcif), u16                 |
//! | 8..10  | l (dcif), u16                             |
//! | 10..12 | L_init (dcif), u16                        |
//! | 12..14 | L_max (dcif), u16                         |
//! | 14..16 | reserved, zero                            |
//! | 16..20 | K, u32                                    |
//! | 20..24 | record count N, u32                       |
//! | 24..64 | t0, Δt_min, Δt_max, b, Ω as f64           |
//!
//! In windowed modes every record starts with a change flag, followed by the
//! window index (`ceil(log2 L)` bits) when the flag is set. The residual code
//! takes `ceil(log2 K)` bits.

use super::bits::bits_for;
use super::{CompressedStream, EstimatorParams, Mode, Record, RecordDecoder, StreamHeader};
use crate::error::{Error, Result};
use crate::params::TimeBounds;

pub const MAGIC: [u8; 4] = *b"CIFT";
pub const HEADER_LEN: usize = 64;
const VERSION: u8 = 1;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, high bit first.
    pub fn write(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            if self.used % 8 == 0 {
                self.bytes.push(0);
            }
            if (value >> i) & 1 == 1 {
                let last = self.bytes.last_mut().expect("byte pushed above");
                *last |= 0x80 >> (self.used % 8);
            }
            self.used += 1;
        }
    }

    pub fn bit_len(&self) -> u64 {
        u64::from(self.used)
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Option<u64> {
        let mut v = 0u64;
        for _ in 0..width {
            let byte = *self.bytes.get((self.pos / 8) as usize)?;
            let bit = (byte >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | u64::from(bit);
            self.pos += 1;
        }
        Some(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }
}

fn u16_field(v: u32, what: &str) -> Result<u16> {
    u16::try_from(v).map_err(|_| Error::invalid(format!("{what} = {v} does not fit the binary header")))
}

pub fn write_stream(cs: &CompressedStream) -> Result<Vec<u8>> {
    let h = &cs.header;
    let mut out = Vec::with_capacity(HEADER_LEN + cs.records.len() * 4);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    let (code, a, b, c, d) = match h.mode {
        Mode::Uniform => (0u8, 0, 0, 0, 0),
        Mode::Ccif { windows } => (1, u16_field(windows, "L")?, 0, 0, 0),
        Mode::Dcif(p) => (
            2,
            u16_field(p.window, "m")?,
            u16_field(p.cadence, "l")?,
            u16_field(p.l_init, "L_init")?,
            u16_field(p.l_max, "L_max")?,
        ),
    };
    out.push(code);
    for v in [a, b, c, d, 0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&h.levels.to_le_bytes());
    let n = u32::try_from(cs.records.len()).map_err(|_| Error::invalid("too many records for the binary format"))?;
    out.extend_from_slice(&n.to_le_bytes());
    for v in [h.t0, h.bounds.dt_min, h.bounds.dt_max, h.bias, h.omega] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(out.len(), HEADER_LEN);

    let rbits = bits_for(h.levels);
    let windowed = h.mode.is_windowed();
    let mut w = BitWriter::new();
    for rec in &cs.records {
        if windowed {
            match rec.window {
                Some(idx) => {
                    w.write(1, 1);
                    w.write(u64::from(idx), bits_for(rec.windows));
                }
                None => w.write(0, 1),
            }
        }
        w.write(u64::from(rec.residual), rbits);
    }
    out.extend(w.into_bytes());
    Ok(out)
}

fn le_u16(b: &[u8], at: usize) -> u32 {
    u32::from(u16::from_le_bytes([b[at], b[at + 1]]))
}

fn le_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4-byte slice"))
}

fn le_f64(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn read_stream(bytes: &[u8]) -> Result<CompressedStream> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::malformed(format!("stream shorter than the {HEADER_LEN}-byte header")));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::malformed("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::malformed(format!("unsupported format version {}", bytes[4])));
    }
    let mode = match bytes[5] {
        0 => Mode::Uniform,
        1 => Mode::Ccif { windows: le_u16(bytes, 6) },
        2 => Mode::Dcif(EstimatorParams {
            window: le_u16(bytes, 6),
            cadence: le_u16(bytes, 8),
            l_init: le_u16(bytes, 10),
            l_max: le_u16(bytes, 12),
        }),
        m => return Err(Error::malformed(format!("unknown mode byte {m}"))),
    };
    let levels = le_u32(bytes, 16);
    let n = le_u32(bytes, 20) as usize;
    let bounds = TimeBounds::new(le_f64(bytes, 32), le_f64(bytes, 40))
        .map_err(|e| Error::malformed(format!("bad bounds: {e}")))?;
    let header = StreamHeader {
        mode,
        levels,
        bounds,
        t0: le_f64(bytes, 24),
        bias: le_f64(bytes, 48),
        omega: le_f64(bytes, 56),
    };

    let mut decoder = RecordDecoder::new(&header)?;
    let rbits = bits_for(levels);
    let windowed = mode.is_windowed();
    let mut reader = BitReader::new(&bytes[HEADER_LEN..]);
    let truncated = |i: usize| Error::malformed(format!("stream truncated at record {i}"));
    let mut records = Vec::with_capacity(n.min(1 << 24));
    for i in 0..n {
        let windows = decoder.windows();
        let window = if windowed && reader.read(1).ok_or_else(|| truncated(i))? == 1 {
            Some(reader.read(bits_for(windows)).ok_or_else(|| truncated(i))? as u32)
        } else {
            None
        };
        let residual = reader.read(rbits).ok_or_else(|| truncated(i))? as u32;
        decoder
            .push(window, residual)
            .map_err(|e| Error::malformed(format!("record {i}: {e}")))?;
        records.push(Record { window, residual, windows });
    }
    let used = HEADER_LEN as u64 + reader.position().div_ceil(8);
    if used != bytes.len() as u64 {
        return Err(Error::malformed(format!(
            "{} trailing bytes after {n} records",
            bytes.len() as u64 - used
        )));
    }
    Ok(CompressedStream { header, records })
}
