//! Experiment drivers behind the `diffneuro` binary.
//!
//! * `trace`: one deterministic run of a given bit string, exporting every
//!   intermediate signal.
//! * `sweep`: BER over a 1-D or 2-D parameter grid, one CSV row per point.
//! * `ber`: a single BER estimate printed as a JSON record.
//!
//! Streams are derived from `(seed, trial, stage, device)` and never from the
//! grid point, so every point of a sweep sees the same payloads and noise
//! (common random numbers) and a one-point sweep equals `ber` on that config.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{validate, SystemConfig};
use crate::error::{Error, Result};
use crate::export;
use crate::link;
use crate::receiver::{monte_carlo_ber, BerEstimate};
use crate::rng::{derive_stream, StreamLabel};
use crate::types::{Bits, TimeGrid};

/// Read `path` (or start from defaults), then apply overrides and the seed.
pub fn load_config<S: AsRef<str>>(
    path: Option<&Path>,
    overrides: &[S],
    seed: Option<u64>,
) -> Result<SystemConfig> {
    let text = match path {
        Some(p) => fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut cfg = SystemConfig::parse_with_overrides(&text, overrides)?;
    if let Some(seed) = seed {
        cfg.sim.seed = seed;
    }
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct TraceSummary {
    pub decoded: Bits,
    pub relay_bits: Bits,
    pub spikes: Vec<f64>,
    /// Largest per-device current amplitude (μA/cm²).
    pub max_amplitude: f64,
    pub files: Vec<PathBuf>,
}

/// Simulate `bits` once and write the trace file set into `outdir`.
pub fn cmd_trace(cfg: &SystemConfig, bits: &Bits, outdir: &Path) -> Result<TraceSummary> {
    let mut cfg = cfg.clone();
    cfg.tx.nbits = bits.len();
    let cfg = validate(cfg)?;
    let stream = derive_stream(cfg.sim.seed, &[StreamLabel::Trial(0)]);
    let out = link::simulate(&cfg, bits, &stream)?;

    fs::create_dir_all(outdir)?;
    let mut files = Vec::new();
    let mut create = |name: &str| -> Result<BufWriter<File>> {
        let p = outdir.join(name);
        files.push(p.clone());
        Ok(BufWriter::new(File::create(p)?))
    };

    let mut w = create("concentration.csv")?;
    export::write_concentrations(&mut w, &out.concentrations)?;
    w.flush()?;

    let fast = out.cnd.membrane.signal.grid;
    let mut w = create("current.csv")?;
    export::write_currents(&mut w, fast, &out.cnd.currents, &out.cnd.total_current)?;
    w.flush()?;

    let mut w = create("membrane.csv")?;
    export::write_membrane(&mut w, &out.cnd.membrane.signal)?;
    w.flush()?;

    let rendered = export::render_spikes(&out.cnd.spikes, fast, cfg.neuron.v0, 30.0);
    let mut w = create("spike_waveform.csv")?;
    export::write_membrane(&mut w, &rendered.clone())?;
    w.flush()?;

    if let Some(p) = &out.rx_potential {
        let mut w = create("receiver.csv")?;
        export::write_membrane(&mut w, &p.signal)?;
        w.flush()?;
    }

    let mut w = create("spikes.txt")?;
    export::write_spikes(&mut w, &out.cnd.spikes)?;
    w.flush()?;

    let mut w = create("decoded.txt")?;
    writeln!(w, "{}", out.decoded)?;
    w.flush()?;

    let max_amplitude = out
        .cnd
        .currents
        .iter()
        .flat_map(|c| c.amplitudes.iter().copied())
        .fold(0.0, f64::max);
    Ok(TraceSummary {
        decoded: out.decoded,
        relay_bits: out.cnd.bits,
        spikes: out.cnd.spikes.times().to_vec(),
        max_amplitude,
        files,
    })
}

/// Parameter grid for [`cmd_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
    pub second: Option<(String, Vec<f64>)>,
}

impl SweepSpec {
    pub fn one(param: &str, values: &[f64]) -> Self {
        Self {
            param: param.into(),
            values: values.to_vec(),
            second: None,
        }
    }

    pub fn two(param: &str, values: &[f64], param2: &str, values2: &[f64]) -> Self {
        Self {
            param: param.into(),
            values: values.to_vec(),
            second: Some((param2.into(), values2.to_vec())),
        }
    }

    fn check(&self, base: &SystemConfig) -> Result<()> {
        let axes = std::iter::once((&self.param, &self.values))
            .chain(self.second.as_ref().map(|(p, v)| (p, v)));
        for (p, vals) in axes {
            if vals.is_empty() {
                return Err(Error::InvalidSweep(format!("no values given for {p}")));
            }
            if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "{p}: value {bad} is not finite"
                )));
            }
            base.with_param(p, vals[0])?;
        }
        Ok(())
    }

    /// `(v1, v2)` for every grid point in row order.
    pub fn points(&self) -> Vec<(f64, Option<f64>)> {
        let mut pts = Vec::new();
        for &v1 in &self.values {
            match &self.second {
                None => pts.push((v1, None)),
                Some((_, vals2)) => pts.extend(vals2.iter().map(|&v2| (v1, Some(v2)))),
            }
        }
        pts
    }
}

/// Parse a comma-separated list of numbers.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidSweep(format!("bad value {s:?}: {e}")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param1: f64,
    pub param2: Option<f64>,
    pub estimate: BerEstimate,
}

impl SweepRow {
    fn csv(&self) -> String {
        let p2 = self.param2.map(|v| v.to_string()).unwrap_or_default();
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{}",
            self.param1, p2, e.pe, e.ci95.0, e.ci95.1, e.trials
        )
    }
}

/// Run the sweep, writing `sweep.csv` into `outdir` one flushed row at a time.
pub fn cmd_sweep(
    cfg: &SystemConfig,
    spec: &SweepSpec,
    trials: u64,
    outdir: &Path,
) -> Result<Vec<SweepRow>> {
    fs::create_dir_all(outdir)?;
    let mut w = BufWriter::new(File::create(outdir.join("sweep.csv"))?);
    sweep_to(cfg, spec, trials, &mut w, |_, _| {})
}

/// Sweep into any writer; `progress(done, total)` fires after each row.
pub fn sweep_to<W: Write>(
    cfg: &SystemConfig,
    spec: &SweepSpec,
    trials: u64,
    mut w: W,
    mut progress: impl FnMut(usize, usize),
) -> Result<Vec<SweepRow>> {
    spec.check(cfg)?;
    let p2_name = spec.second.as_ref().map(|(p, _)| p.as_str()).unwrap_or("");
    writeln!(
        w,
        "{} param1={} param2={}",
        export::CSV_VERSION,
        spec.param,
        p2_name
    )?;
    writeln!(w, "param1,param2,pe,ci_lo,ci_hi,trials")?;
    w.flush()?;
    let points = spec.points();
    let mut rows = Vec::with_capacity(points.len());
    for (done, (v1, v2)) in points.iter().copied().enumerate() {
        let mut point = cfg.with_param(&spec.param, v1)?;
        if let (Some((p2, _)), Some(v2)) = (&spec.second, v2) {
            point = point.with_param(p2, v2)?;
        }
        let point = validate(point)?;
        let row = SweepRow {
            param1: v1,
            param2: v2,
            estimate: monte_carlo_ber(&point, trials)?,
        };
        writeln!(w, "{}", row.csv())?;
        w.flush()?;
        rows.push(row);
        progress(done + 1, points.len());
    }
    Ok(rows)
}

/// Single BER estimate on `cfg`.
pub fn cmd_ber(cfg: &SystemConfig, trials: u64) -> Result<BerEstimate> {
    let cfg = validate(cfg.clone())?;
    monte_carlo_ber(&cfg, trials)
}

pub fn ber_json(est: &BerEstimate) -> String {
    serde_json::to_string(&est.record()).expect("record serializes")
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidBits(_) | Error::InvalidSweep(_) => 2,
        Error::NumericalInstability { .. } => 3,
        Error::Io(_) => 4,
        _ => 1,
    }
}

/// Grid on which `trace` samples currents and membrane potential.
pub fn fast_grid(cfg: &SystemConfig) -> TimeGrid {
    TimeGrid::spanning(0.0, cfg.tx.nbits as f64 * cfg.tx.slot_ms, cfg.sim.dt_fast)
}
