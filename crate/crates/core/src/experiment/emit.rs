use std::path::Path;

use super::Row;
use crate::error::{Error, Result};

/// Column order of sweep CSV files.
pub const CSV_COLUMNS: [&str; 18] = [
    "kind",
    "freq_hz",
    "bias",
    "scheme",
    "bits",
    "seed",
    "mse_db",
    "total_bits",
    "residual_bits",
    "window_bits",
    "flag_bits",
    "overhead_percent",
    "avg_l",
    "firing_count",
    "oversampling",
    "bits_per_sample",
    "count",
    "error",
];

pub fn write_csv(rows: &[Row], path: &Path) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::parse(path, format!("{other:?}")),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io)?;
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e.to_string()))?;
    let header = r.headers().map_err(|e| Error::parse(path, e.to_string()))?;
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::parse(path, "unexpected CSV header"));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::parse(path, e.to_string())))
        .collect()
}

/// Python script plotting mean MSE against bits per scheme, one panel per
/// bias mode, from the CSV file `csv_name` next to it.
pub fn plot_script(csv_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
# Plots mean MSE against bits from {csv_name}.
import csv
import os
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(list)
with open(os.path.join(here, "{csv_name}")) as f:
    for row in csv.DictReader(f):
        if row["kind"] != "mean":
            continue
        key = (row["freq_hz"], row["bias"], row["scheme"])
        curves[key].append((int(row["bits"]), float(row["mse_db"])))

panels = sorted({{(k[0], k[1]) for k in curves}})
fig, axes = plt.subplots(1, len(panels), figsize=(5 * len(panels), 4), squeeze=False)
for ax, (freq, bias) in zip(axes[0], panels):
    for (f, b, scheme), pts in sorted(curves.items()):
        if (f, b) != (freq, bias):
            continue
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=scheme)
    ax.set_title(f"{{bias}}, {{freq}} Hz")
    ax.set_xlabel("bits (log2 K)")
    ax.set_ylabel("MSE [dB]")
    ax.grid(True)
    ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "mse_vs_bits.png"), dpi=150)
"#
    )
}

pub fn write_plot_script(path: &Path, csv_name: &str) -> Result<()> {
    std::fs::write(path, plot_script(csv_name)).map_err(|e| Error::io(path, e))
}
