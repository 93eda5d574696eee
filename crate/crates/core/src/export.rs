//! CSV and text writers for traces, spike lists and sweep tables.
//!
//! Every CSV starts with a `# diffneuro-csv v1` comment line. Numbers use
//! Rust's shortest round-trip formatting, so identical inputs give identical
//! bytes.

use std::io::{self, Write};

use crate::neuro::CurrentWaveform;
use crate::types::{SampledSignal, SpikeTrain, TimeGrid};

pub const CSV_VERSION: &str = "# diffneuro-csv v1";

/// Single signal as `t_ms,value,units`.
pub fn write_signal_csv<W: Write>(mut w: W, signal: &SampledSignal) -> io::Result<()> {
    writeln!(w, "{CSV_VERSION}")?;
    writeln!(w, "t_ms,value,units")?;
    let units = signal.units.as_str();
    for (t, v) in signal.grid.times().zip(&signal.values) {
        writeln!(w, "{t},{v},{units}")?;
    }
    Ok(())
}

/// Several signals on one grid as `t_ms,<name>...`.
pub fn write_columns_csv<W: Write>(
    mut w: W,
    grid: TimeGrid,
    columns: &[(String, &[f64])],
    units: &str,
) -> io::Result<()> {
    writeln!(w, "{CSV_VERSION} units={units}")?;
    write!(w, "t_ms")?;
    for (name, _) in columns {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    for (i, t) in grid.times().enumerate() {
        write!(w, "{t}")?;
        for (_, vals) in columns {
            write!(w, ",{}", vals[i])?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Per-device concentration traces (all on one grid).
pub fn write_concentrations<W: Write>(w: W, traces: &[SampledSignal]) -> io::Result<()> {
    let grid = traces[0].grid;
    let cols: Vec<(String, &[f64])> = traces
        .iter()
        .enumerate()
        .map(|(k, s)| (format!("cnd{k}"), s.values.as_slice()))
        .collect();
    write_columns_csv(w, grid, &cols, "molecules_per_um3")
}

/// Per-device currents plus their sum, sampled on `grid`.
pub fn write_currents<W: Write>(
    w: W,
    grid: TimeGrid,
    currents: &[CurrentWaveform],
    total: &CurrentWaveform,
) -> io::Result<()> {
    let sampled: Vec<Vec<f64>> = currents
        .iter()
        .chain(std::iter::once(total))
        .map(|c| c.sample(grid).values)
        .collect();
    let cols: Vec<(String, &[f64])> = sampled
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let name = if k == currents.len() {
                "total".to_string()
            } else {
                format!("cnd{k}")
            };
            (name, v.as_slice())
        })
        .collect();
    write_columns_csv(w, grid, &cols, "uA_per_cm2")
}

/// Membrane potential as `t_ms,V_mV`.
pub fn write_membrane<W: Write>(w: W, signal: &SampledSignal) -> io::Result<()> {
    write_columns_csv(w, signal.grid, &[("V_mV".into(), &signal.values)], "mV")
}

/// One spike time (ms) per line.
pub fn write_spikes<W: Write>(mut w: W, train: &SpikeTrain) -> io::Result<()> {
    for t in train.times() {
        writeln!(w, "{t}")?;
    }
    Ok(())
}

/// Stylised action-potential waveform for plotting a spike train: a 1 ms
/// rise to `peak`, a 2 ms fall to an undershoot, then recovery to `rest`.
pub fn render_spikes(train: &SpikeTrain, grid: TimeGrid, rest: f64, peak: f64) -> SampledSignal {
    let undershoot = rest - 10.0;
    let shape = |s: f64| -> f64 {
        if s < 0.0 {
            rest
        } else if s < 1.0 {
            rest + (peak - rest) * s
        } else if s < 3.0 {
            peak + (undershoot - peak) * (s - 1.0) / 2.0
        } else if s < 8.0 {
            undershoot + (rest - undershoot) * (s - 3.0) / 5.0
        } else {
            rest
        }
    };
    SampledSignal::from_fn(grid, crate::types::Units::Mv, |t| {
        let idx = train.times().partition_point(|&tj| tj <= t);
        match idx {
            0 => rest,
            i => shape(t - train.times()[i - 1]),
        }
    })
}
