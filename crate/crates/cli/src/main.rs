use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ciftem::codec::{bit_cost, decode_detailed, read_stream, write_stream};
use ciftem::decoder::reconstruct_with;
use ciftem::experiment::{
    default_out_dir, table1, write_csv, write_plot_script, KeyValues, PaperStudy, Prepared, Row, SweepGrid,
    TrialConfig,
};
use ciftem::{firing_times, BandlimitedSignal, Error, ReconstructionConfig};

#[derive(Parser)]
#[command(name = "ciftem", version, about = "Integrate-and-fire time encoding with window-compressed intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or load) a signal, encode it and write the compressed stream.
    Encode(EncodeArgs),
    /// Read a compressed stream and write decoded intervals and the reconstruction.
    Decode(DecodeArgs),
    /// Run one trial and print its metrics.
    Trial(TrialArgs),
    /// Run a grid of trials and write CSV plus a plot script.
    Sweep(SweepArgs),
    /// Compression of CIF schemes at K-2 bits against the baseline at K bits.
    Table1(Table1Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum OmegaUnit {
    Hz,
    Rad,
}

/// Trial settings. Explicit flags override `--config` and `--set`.
#[derive(Args, Default)]
struct Settings {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra key=value overrides, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Unit of --omega and --omegas: hz means Ω = 2π·f.
    #[arg(long, value_enum)]
    omega_unit: Option<OmegaUnit>,
    /// Band edge.
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    energy: Option<f64>,
    /// Support length in Nyquist spacings π/Ω.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// fixed:B or alpha:A.
    #[arg(long)]
    bias: Option<String>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// iftem, ccif, ccif:L or dcif.
    #[arg(long)]
    scheme: Option<String>,
    /// log2 of the level count, or a range such as 6-15 for sweeps.
    #[arg(long, conflicts_with = "levels")]
    bits: Option<String>,
    /// Level count K; must be a power of two.
    #[arg(long)]
    levels: Option<u32>,
    /// Estimator window m.
    #[arg(long)]
    m: Option<u32>,
    /// Estimator update cadence l.
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    l_init: Option<u32>,
    #[arg(long)]
    l_max: Option<u32>,
    /// paper or self-delimiting.
    #[arg(long)]
    accounting: Option<String>,
}

impl Settings {
    fn key_values(&self) -> Result<KeyValues, Error> {
        let mut kv = match &self.config {
            Some(p) => KeyValues::load(p)?,
            None => KeyValues::new(),
        };
        for s in &self.sets {
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("--set expects KEY=VALUE, got {s:?}")))?;
            kv.set(k, v)?;
        }
        let mut put = |k: &str, v: Option<String>| -> Result<(), Error> {
            if let Some(v) = v {
                kv.set(k, &v)?;
            }
            Ok(())
        };
        put("omega_unit", self.omega_unit.map(|u| match u {
            OmegaUnit::Hz => "hz".to_string(),
            OmegaUnit::Rad => "rad".to_string(),
        }))?;
        put("omega", self.omega.map(|v| v.to_string()))?;
        put("energy", self.energy.map(|v| v.to_string()))?;
        put("duration_nyquist", self.duration.map(|v| v.to_string()))?;
        put("seed", self.seed.map(|v| v.to_string()))?;
        put("bias", self.bias.clone())?;
        put("kappa", self.kappa.map(|v| v.to_string()))?;
        put("delta", self.delta.map(|v| v.to_string()))?;
        put("scheme", self.scheme.clone())?;
        put("bits", self.bits.clone())?;
        if let Some(k) = self.levels {
            if !k.is_power_of_two() || k < 2 {
                return Err(Error::InvalidArgument(format!("level count K = {k} is not a power of two")));
            }
            put("bits", Some(k.trailing_zeros().to_string()))?;
        }
        put("m", self.m.map(|v| v.to_string()))?;
        put("l", self.l.map(|v| v.to_string()))?;
        put("l_init", self.l_init.map(|v| v.to_string()))?;
        put("l_max", self.l_max.map(|v| v.to_string()))?;
        put("accounting", self.accounting.clone())?;
        Ok(kv)
    }

    fn trial(&self) -> Result<TrialConfig, Error> {
        self.key_values()?.trial_config(&TrialConfig::default())
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    settings: Settings,
    /// Signal CSV to encode instead of generating one.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Compressed stream output.
    #[arg(long, short)]
    out: PathBuf,
    /// Also write the unquantized firing sequence as CSV.
    #[arg(long)]
    firings: Option<PathBuf>,
    /// Also write the generated signal as CSV.
    #[arg(long)]
    save_signal: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Compressed stream input.
    input: PathBuf,
    /// Decoded intervals CSV.
    #[arg(long)]
    intervals: Option<PathBuf>,
    /// Reconstructed signal CSV (time,value).
    #[arg(long)]
    reconstruction: Option<PathBuf>,
    /// Band edge in rad/s when the stream header lacks one.
    #[arg(long)]
    omega: Option<f64>,
}

#[derive(Args)]
struct TrialArgs {
    #[command(flatten)]
    settings: Settings,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    settings: Settings,
    /// Comma-separated band edges, in --omega-unit.
    #[arg(long)]
    omegas: Option<String>,
    /// Comma-separated bias modes.
    #[arg(long)]
    biases: Option<String>,
    /// Comma-separated schemes.
    #[arg(long)]
    schemes: Option<String>,
    /// Number of seeds, starting at --seed.
    #[arg(long)]
    seeds: Option<u64>,
    /// Use 100 seeds.
    #[arg(long, conflicts_with = "seeds")]
    full: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory; defaults to $CIFTEM_OUT_DIR or ./out.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Evaluate the scheme comparisons on each band edge and fail if any
    /// does not hold.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct Table1Args {
    #[command(flatten)]
    settings: Settings,
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn out_dir(arg: &Option<PathBuf>) -> Result<PathBuf, Error> {
    let dir = arg.clone().unwrap_or_else(default_out_dir);
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

/// Resolved config written next to an output file.
fn config_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".config.txt");
    output.with_file_name(name)
}

fn encode(args: &EncodeArgs) -> Result<(), Error> {
    let cfg = args.settings.trial()?;
    cfg.validate()?;
    let prepared = match &args.signal {
        None => Prepared::new(&cfg)?,
        Some(path) => {
            let sig = BandlimitedSignal::load(path)?;
            let cfg = TrialConfig {
                omega: sig.omega(),
                energy: sig.energy(),
                duration_nyquist: sig.duration() / sig.spacing(),
                ..cfg
            };
            Prepared::from_signal(&cfg, sig)?
        }
    };
    let cs = prepared.compress(cfg.scheme, cfg.bits)?;
    let bytes = write_stream(&cs)?;
    write_text(&config_path(&args.out), &KeyValues::from_trial(&prepared.config).to_text())?;
    std::fs::write(&args.out, &bytes).map_err(|e| Error::Io { path: args.out.clone(), source: e })?;
    if let Some(p) = &args.firings {
        prepared.firings.save(p)?;
    }
    if let Some(p) = &args.save_signal {
        prepared.signal.save(p)?;
    }
    let report = bit_cost(&cs, cfg.accounting);
    println!(
        "{} intervals, {} scheme, K = {}, mean L = {:.2}",
        cs.len(),
        cfg.scheme,
        cs.header.levels,
        cs.mean_windows()
    );
    println!(
        "{} bits ({} residual, {} window, {} flag), overhead {:.2}%, file {} bytes",
        report.total_bits,
        report.residual_bits,
        report.window_bits,
        report.flag_bits,
        report.overhead_percent,
        bytes.len()
    );
    Ok(())
}

fn decode(args: &DecodeArgs) -> Result<(), Error> {
    let bytes = std::fs::read(&args.input).map_err(|e| Error::Io { path: args.input.clone(), source: e })?;
    let cs = read_stream(&bytes)?;
    let dec = decode_detailed(&cs)?;
    println!("{} records, mode {}, K = {}", cs.len(), cs.header.mode.name(), cs.header.levels);
    if let Some(p) = &args.intervals {
        let mut s = String::from("interval,windows\n");
        for (t, l) in dec.intervals.iter().zip(&dec.window_counts) {
            let _ = writeln!(s, "{t:e},{l}");
        }
        write_text(p, &s)?;
    }
    if let Some(p) = &args.reconstruction {
        let omega = args.omega.filter(|w| *w > 0.0).unwrap_or(cs.header.omega);
        if !(omega > 0.0) {
            return Err(Error::InvalidArgument("stream has no band edge; pass --omega".into()));
        }
        let times = firing_times(cs.header.t0, &dec.intervals);
        let rec = reconstruct_with(&times, cs.header.bias, cs.header.kappa_delta(), &ReconstructionConfig::new(omega))?;
        if !rec.density_ok {
            eprintln!("warning: some interval exceeds the Nyquist spacing; recovery is not guaranteed");
        }
        rec.save(p)?;
        println!("reconstruction: {} grid points, residual {:.3e}", rec.times.len(), rec.residual_norm);
    }
    Ok(())
}

fn trial(args: &TrialArgs) -> Result<(), Error> {
    let cfg = args.settings.trial()?;
    let m = ciftem::experiment::run_trial(&cfg)?;
    print!("{}", KeyValues::from_trial(&cfg).to_text());
    println!("mse_db = {:.3}", m.mse_db);
    println!("total_bits = {}", m.total_bits);
    println!("residual_bits = {}", m.residual_bits);
    println!("window_bits = {}", m.window_bits);
    println!("flag_bits = {}", m.flag_bits);
    println!("overhead_percent = {:.3}", m.overhead_percent);
    println!("avg_l = {:.3}", m.avg_l);
    println!("firing_count = {}", m.firing_count);
    println!("oversampling = {:.3}", m.oversampling);
    Ok(())
}

/// Runs the scheme comparisons on every band edge in the rows. Returns
/// whether all of them hold.
fn check_rows(rows: &[Row], seeds: usize) -> bool {
    let mut freqs: Vec<f64> = rows.iter().map(|r| r.freq_hz).collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup();
    let mut all = true;
    for f in freqs {
        let subset: Vec<Row> = rows.iter().filter(|r| r.freq_hz == f).cloned().collect();
        let study = PaperStudy::from_rows(subset, seeds);
        for c in [study.improvement(), study.table1_check(), study.overhead(), study.ordering()] {
            println!("{f} Hz {}: {}", c.name, if c.pass { "PASS" } else { "FAIL" });
            for d in c.details.iter().filter(|d| d.starts_with("FAIL")) {
                println!("    {d}");
            }
            all &= c.pass;
        }
    }
    all
}

fn sweep_cmd(args: &SweepArgs) -> Result<bool, Error> {
    let mut kv = args.settings.key_values()?;
    for (k, v) in [("omegas", &args.omegas), ("biases", &args.biases), ("schemes", &args.schemes)] {
        if let Some(v) = v {
            kv.set(k, v)?;
        }
    }
    if args.full {
        kv.set("seeds", "100")?;
    } else if let Some(n) = args.seeds {
        kv.set("seeds", &n.to_string())?;
    }
    if let Some(t) = args.threads {
        kv.set("threads", &t.to_string())?;
    }
    let grid = kv.sweep_grid(&SweepGrid::desk())?;
    let dir = out_dir(&args.out_dir)?;
    KeyValues::from_grid(&grid).save(&dir.join("sweep.config.txt"))?;
    eprintln!("running {} trials into {}", grid.len(), dir.display());
    let rows = ciftem::experiment::sweep(&grid)?;
    write_csv(&rows, &dir.join("sweep.csv"))?;
    write_plot_script(&dir.join("plot_mse.py"), "sweep.csv")?;
    let failed = rows.iter().filter(|r| r.kind == "trial" && !r.is_ok()).count();
    println!("{} rows written, {failed} failed trials", rows.len());
    for r in rows.iter().filter(|r| r.kind == "mean") {
        println!(
            "{:>5} Hz {:<9} {:<7} {:>2} bits  {:>8.2} dB  {:>6.3} bits/sample  L {:.2}",
            r.freq_hz, r.bias, r.scheme, r.bits, r.mse_db, r.bits_per_sample, r.avg_l
        );
    }
    Ok(if args.check { check_rows(&rows, grid.seeds.len()) } else { true })
}

fn table1_cmd(args: &Table1Args) -> Result<(), Error> {
    let cfg = args.settings.trial()?;
    let rows = table1(&cfg, args.seeds, args.threads)?;
    let dir = out_dir(&args.out_dir)?;
    KeyValues::from_trial(&cfg).save(&dir.join("table1.config.txt"))?;
    let mut s = String::from("cif_bits,if_bits,if_mse_db,ccif_mse_db,dcif_mse_db,ccif_compression,dcif_compression\n");
    println!("CIF bits  IF bits  IF dB     CCIF dB   DCIF dB   CCIF %   DCIF %");
    for r in &rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.cif_bits, r.if_bits, r.if_mse_db, r.ccif_mse_db, r.dcif_mse_db, r.ccif_compression, r.dcif_compression
        );
        println!(
            "{:>8}  {:>7}  {:>8.2}  {:>8.2}  {:>8.2}  {:>6.2}  {:>6.2}",
            r.cif_bits, r.if_bits, r.if_mse_db, r.ccif_mse_db, r.dcif_mse_db, r.ccif_compression, r.dcif_compression
        );
    }
    write_text(&dir.join("table1.csv"), &s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(a) => encode(a).map(|_| true),
        Command::Decode(a) => decode(a).map(|_| true),
        Command::Trial(a) => trial(a).map(|_| true),
        Command::Sweep(a) => sweep_cmd(a),
        Command::Table1(a) => table1_cmd(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
