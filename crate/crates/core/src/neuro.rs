//! CND transduction and neural firing.
//!
//! Each device turns its per-slot molecule count into a sine current of
//! amplitude μ·Q_rx. The currents of all devices enter one neuron, whose
//! membrane potential comes either from the linear spike-response kernel or
//! from Hodgkin-Huxley integration. Spikes are upward crossings of θ₁ outside
//! the absolute refractory period.

use std::f64::consts::PI;

use crate::config::{Backend, CndParams, HhConstants, NeuronParams, ValidatedConfig};
use crate::diffusion::received_quantity;
use crate::error::{Error, Result};
use crate::types::{Bits, SampledSignal, SpikeTrain, TimeGrid, Units};

/// Anything that can supply an injected current density (μA/cm²) at time t (ms).
pub trait Stimulus {
    fn at(&self, t_ms: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Stimulus for F {
    fn at(&self, t_ms: f64) -> f64 {
        self(t_ms)
    }
}

/// Slot-wise sine current `amplitude_i · sin(2π·a·t + b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentWaveform {
    /// Per-slot amplitude (μA/cm²).
    pub amplitudes: Vec<f64>,
    pub slot_ms: f64,
    pub freq_hz: f64,
    pub phase: f64,
    pub rectify: bool,
}

impl CurrentWaveform {
    #[inline]
    pub fn value_at(&self, t_ms: f64) -> f64 {
        if t_ms < 0.0 {
            return 0.0;
        }
        let slot = (t_ms / self.slot_ms) as usize;
        let Some(&amp) = self.amplitudes.get(slot) else {
            return 0.0;
        };
        if amp == 0.0 {
            return 0.0;
        }
        let v = amp * (2.0 * PI * self.freq_hz * 1e-3 * t_ms + self.phase).sin();
        if self.rectify {
            v.max(0.0)
        } else {
            v
        }
    }

    pub fn sample(&self, grid: TimeGrid) -> SampledSignal {
        SampledSignal::from_fn(grid, Units::UaPerCm2, |t| self.value_at(t))
    }

    fn same_carrier(&self, other: &Self) -> bool {
        self.slot_ms == other.slot_ms
            && self.freq_hz == other.freq_hz
            && self.phase == other.phase
            && self.rectify == other.rectify
            && self.amplitudes.len() == other.amplitudes.len()
    }

    /// Pointwise sum of waveforms sharing one carrier.
    pub fn sum(waves: &[CurrentWaveform]) -> Option<CurrentWaveform> {
        let (first, rest) = waves.split_first()?;
        let mut total = first.clone();
        for w in rest {
            if !first.same_carrier(w) {
                return None;
            }
            for (a, b) in total.amplitudes.iter_mut().zip(&w.amplitudes) {
                *a += b;
            }
        }
        Some(total)
    }
}

impl Stimulus for CurrentWaveform {
    fn at(&self, t_ms: f64) -> f64 {
        self.value_at(t_ms)
    }
}

/// Current generated by one device from its per-slot molecule counts.
pub fn inspired_current(qrx_per_slot: &[f64], cnd: &CndParams, slot_ms: f64) -> CurrentWaveform {
    let mu_ua = cnd.mu * 1e-3;
    CurrentWaveform {
        amplitudes: qrx_per_slot.iter().map(|&q| mu_ua * q).collect(),
        slot_ms,
        freq_hz: cnd.a,
        phase: cnd.b,
        rectify: cnd.rectify,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembraneTrace {
    pub signal: SampledSignal,
}

impl MembraneTrace {
    pub fn threshold_crossings(&self, theta1: f64, tau_abs: f64) -> SpikeTrain {
        detect_spikes(self, theta1, tau_abs)
    }
}

/// Linear membrane response `V0 + Σ_k (ν ⊛ A_k)` with the exponential kernel
/// `ν(s) = (R_m/τ_m)·exp(−s/τ_m)`.
///
/// Currents are held constant over each step, which makes the recursion exact
/// for piecewise-constant input. No reset is applied after threshold crossings.
pub fn srm_potential(
    currents: &[SampledSignal],
    neuron: &NeuronParams,
    grid: TimeGrid,
) -> Result<MembraneTrace> {
    if currents.iter().any(|c| c.grid != grid) {
        return Err(Error::GridMismatch);
    }
    let decay = (-grid.dt / neuron.srm_tau_m).exp();
    let drive = neuron.srm_r_m * (1.0 - decay);
    let mut values = Vec::with_capacity(grid.n);
    let mut u = 0.0;
    values.push(neuron.v0);
    for i in 1..grid.n {
        let input: f64 = currents.iter().map(|c| c.values[i - 1]).sum();
        u = u * decay + drive * input;
        values.push(neuron.v0 + u);
    }
    Ok(MembraneTrace {
        signal: SampledSignal::new(grid, values, Units::Mv),
    })
}

#[inline]
fn vtrap(x: f64, y: f64) -> f64 {
    // x / (exp(x/y) - 1), continuous through x = 0
    let r = x / y;
    if r.abs() < 1e-6 {
        y * (1.0 - r / 2.0)
    } else {
        x / r.exp_m1()
    }
}

#[derive(Debug, Clone, Copy)]
struct HhState {
    v: f64,
    m: f64,
    h: f64,
    n: f64,
}

fn hh_rates(v: f64) -> [(f64, f64); 3] {
    let am = 0.1 * vtrap(25.0 - v, 10.0);
    let bm = 4.0 * (-v / 18.0).exp();
    let ah = 0.07 * (-v / 20.0).exp();
    let bh = 1.0 / (((30.0 - v) / 10.0).exp() + 1.0);
    let an = 0.01 * vtrap(10.0 - v, 10.0);
    let bn = 0.125 * (-v / 80.0).exp();
    [(am, bm), (ah, bh), (an, bn)]
}

fn hh_deriv(s: HhState, i_ext: f64, k: &HhConstants) -> HhState {
    let [(am, bm), (ah, bh), (an, bn)] = hh_rates(s.v);
    let i_na = k.g_na * s.m * s.m * s.m * s.h * (s.v - k.e_na);
    let i_k = k.g_k * s.n * s.n * s.n * s.n * (s.v - k.e_k);
    let i_l = k.g_l * (s.v - k.e_l);
    HhState {
        v: (i_ext - i_na - i_k - i_l) / k.c_m,
        m: am * (1.0 - s.m) - bm * s.m,
        h: ah * (1.0 - s.h) - bh * s.h,
        n: an * (1.0 - s.n) - bn * s.n,
    }
}

fn axpy(s: HhState, d: HhState, h: f64) -> HhState {
    HhState {
        v: s.v + h * d.v,
        m: s.m + h * d.m,
        h: s.h + h * d.h,
        n: s.n + h * d.n,
    }
}

/// Hodgkin-Huxley membrane driven by `stimulus`, fourth-order Runge-Kutta
/// with the drive held constant over each step.
///
/// The model is integrated in the original depolarisation convention (rest at
/// 0 mV, gates at their resting steady state) and reported shifted by V0.
pub fn hh_integrate<S: Stimulus + ?Sized>(
    stimulus: &S,
    neuron: &NeuronParams,
    grid: TimeGrid,
) -> Result<MembraneTrace> {
    let k = &neuron.hh;
    let [(am, bm), (ah, bh), (an, bn)] = hh_rates(0.0);
    let mut s = HhState {
        v: 0.0,
        m: am / (am + bm),
        h: ah / (ah + bh),
        n: an / (an + bn),
    };
    let dt = grid.dt;
    let mut values = Vec::with_capacity(grid.n);
    values.push(neuron.v0 + s.v);
    for i in 1..grid.n {
        // Drive held at its mid-step value: switches on grid nodes stay exact,
        // smooth drive is second order in dt.
        let i_mid = stimulus.at(0.5 * (grid.time(i - 1) + grid.time(i)));
        let k1 = hh_deriv(s, i_mid, k);
        let k2 = hh_deriv(axpy(s, k1, 0.5 * dt), i_mid, k);
        let k3 = hh_deriv(axpy(s, k2, 0.5 * dt), i_mid, k);
        let k4 = hh_deriv(axpy(s, k3, dt), i_mid, k);
        s = HhState {
            v: s.v + dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            m: s.m + dt / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m),
            h: s.h + dt / 6.0 * (k1.h + 2.0 * k2.h + 2.0 * k3.h + k4.h),
            n: s.n + dt / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n),
        };
        if !(s.v.is_finite() && s.m.is_finite() && s.h.is_finite() && s.n.is_finite())
            || s.v.abs() > 1e4
        {
            return Err(Error::NumericalInstability { t_ms: grid.time(i) });
        }
        values.push(neuron.v0 + s.v);
    }
    Ok(MembraneTrace {
        signal: SampledSignal::new(grid, values, Units::Mv),
    })
}

/// Upward crossings of `theta1`, located by linear interpolation, with
/// crossings inside `tau_abs` of the previous spike suppressed.
pub fn detect_spikes(trace: &MembraneTrace, theta1: f64, tau_abs: f64) -> SpikeTrain {
    let sig = &trace.signal;
    let mut times: Vec<f64> = Vec::new();
    for i in 1..sig.values.len() {
        let (a, b) = (sig.values[i - 1], sig.values[i]);
        if a < theta1 && b >= theta1 {
            let t = sig.grid.time(i - 1) + sig.grid.dt * (theta1 - a) / (b - a);
            if times.last().is_none_or(|&last| t - last >= tau_abs) {
                times.push(t);
            }
        }
    }
    SpikeTrain::new(times, tau_abs).expect("crossings are sorted and refractory-spaced")
}

/// `Y_i = 1` iff at least one spike falls in `[iT, (i+1)T)`.
pub fn spikes_to_bits(train: &SpikeTrain, slot_ms: f64, nbits: usize) -> Bits {
    let mut bits = vec![false; nbits];
    for &t in train.times() {
        if t >= 0.0 {
            let slot = (t / slot_ms).floor() as usize;
            if slot < nbits {
                bits[slot] = true;
            }
        }
    }
    Bits::new(bits)
}

/// Everything the CND stage produces, kept for trace export.
#[derive(Debug, Clone)]
pub struct CndOutput {
    /// `qrx[k][i]`: molecules received by device k in slot i.
    pub qrx: Vec<Vec<f64>>,
    pub currents: Vec<CurrentWaveform>,
    pub total_current: CurrentWaveform,
    pub membrane: MembraneTrace,
    pub spikes: SpikeTrain,
    pub bits: Bits,
}

/// Reception, transduction, membrane response and spike detection for the
/// whole device cluster.
pub fn cnd_stage(traces: &[SampledSignal], cfg: &ValidatedConfig) -> Result<CndOutput> {
    let m = cfg.cnd.m;
    if traces.len() != m {
        return Err(Error::DeviceCount {
            expected: m,
            got: traces.len(),
        });
    }
    let nbits = cfg.tx.nbits;
    let slot_ms = cfg.tx.slot_ms;
    let qrx = traces
        .iter()
        .map(|tr| {
            (0..nbits)
                .map(|i| received_quantity(tr, i, slot_ms, cfg.reception_gain))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let currents: Vec<CurrentWaveform> = qrx
        .iter()
        .map(|q| inspired_current(q, &cfg.cnd, slot_ms))
        .collect();
    let total_current = CurrentWaveform::sum(&currents).expect("devices share one carrier");
    let grid = TimeGrid::spanning(0.0, cfg.duration_ms(), cfg.sim.dt_fast);
    let membrane = match cfg.neuron.backend {
        Backend::Srm => srm_potential(&[total_current.sample(grid)], &cfg.neuron, grid)?,
        Backend::Hh => hh_integrate(&total_current, &cfg.neuron, grid)?,
    };
    let spikes = detect_spikes(&membrane, cfg.neuron.theta1, cfg.neuron.tau_abs);
    let bits = spikes_to_bits(&spikes, slot_ms, nbits);
    Ok(CndOutput {
        qrx,
        currents,
        total_current,
        membrane,
        spikes,
        bits,
    })
}

/// Time of the first spike, if any.
pub fn first_spike_time(trace: &MembraneTrace, theta1: f64) -> Option<f64> {
    detect_spikes(trace, theta1, 0.0).times().first().copied()
}
