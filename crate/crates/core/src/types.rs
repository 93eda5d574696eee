use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite binary sequence (payload `X`, relay bits `Y` or decoded `Z`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(values: Vec<bool>) -> Self {
        Self(values)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Self(v)
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidBits("empty bit string".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidBits(format!("unexpected symbol {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Uniform sampling grid, times in ms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "grid step must be positive");
        assert!(n >= 1, "grid needs at least one sample");
        Self { t0, dt, n }
    }

    /// Grid with samples at both ends of `[t0, t0 + duration]`.
    pub fn spanning(t0: f64, duration: f64, dt: f64) -> Self {
        let steps = (duration / dt).round() as usize;
        Self::new(t0, dt, steps + 1)
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.time(i))
    }

    pub fn covers(&self, a: f64, b: f64) -> bool {
        let tol = 1e-9 * self.dt.max(1.0);
        a >= self.t0 - tol && b <= self.end() + tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    MoleculesPerUm3,
    UaPerCm2,
    Mv,
}

impl Units {
    pub fn as_str(self) -> &'static str {
        match self {
            Units::MoleculesPerUm3 => "molecules_per_um3",
            Units::UaPerCm2 => "uA_per_cm2",
            Units::Mv => "mV",
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Values on a [`TimeGrid`] with a physical unit attached.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub units: Units,
}

impl SampledSignal {
    pub fn new(grid: TimeGrid, values: Vec<f64>, units: Units) -> Self {
        assert_eq!(grid.n, values.len(), "values must match the grid length");
        Self {
            grid,
            values,
            units,
        }
    }

    pub fn constant(grid: TimeGrid, value: f64, units: Units) -> Self {
        Self::new(grid, vec![value; grid.n], units)
    }

    pub fn from_fn(grid: TimeGrid, units: Units, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().map(f).collect();
        Self::new(grid, values, units)
    }

    /// Linear interpolation; clamps outside the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let x = (t - self.grid.t0) / self.grid.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let i = x.floor() as usize;
        if i >= self.grid.n - 1 {
            return self.values[self.grid.n - 1];
        }
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// Trapezoidal integral of the piecewise-linear interpolant over `[a, b]`.
    ///
    /// Returns `None` when the interval is not covered by the grid.
    pub fn integrate(&self, a: f64, b: f64) -> Option<f64> {
        if !self.grid.covers(a, b) || b < a {
            return None;
        }
        let g = &self.grid;
        let a = a.max(g.t0);
        let b = b.min(g.end());
        let ia = ((a - g.t0) / g.dt).ceil() as usize;
        let ib = ((b - g.t0) / g.dt).floor() as usize;
        if ia > ib {
            // no grid point inside: single trapezoid
            return Some(0.5 * (self.value_at(a) + self.value_at(b)) * (b - a));
        }
        let mut sum = 0.5 * (self.value_at(a) + self.values[ia]) * (g.time(ia) - a);
        for i in ia..ib {
            sum += 0.5 * (self.values[i] + self.values[i + 1]) * g.dt;
        }
        sum += 0.5 * (self.values[ib] + self.value_at(b)) * (b - g.time(ib));
        Some(sum)
    }
}

/// Sorted action-potential times (ms) separated by at least the refractory period.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpikeTrain {
    times: Vec<f64>,
    refractory: f64,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>, refractory: f64) -> Result<Self> {
        if !(refractory >= 0.0) {
            return Err(Error::InvalidSpikeTrain(format!(
                "refractory period {refractory} must be non-negative"
            )));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidSpikeTrain(format!(
                    "times not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
            if w[1] - w[0] < refractory {
                return Err(Error::InvalidSpikeTrain(format!(
                    "gap {} ms below refractory period {refractory} ms",
                    w[1] - w[0]
                )));
            }
        }
        Ok(Self { times, refractory })
    }

    pub fn empty(refractory: f64) -> Self {
        Self {
            times: Vec::new(),
            refractory,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn refractory(&self) -> f64 {
        self.refractory
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sub-train keeping the spikes for which `keep` returns true.
    pub(crate) fn retain(&self, mut keep: impl FnMut(f64) -> bool) -> Self {
        Self {
            times: self.times.iter().copied().filter(|&t| keep(t)).collect(),
            refractory: self.refractory,
        }
    }
}
