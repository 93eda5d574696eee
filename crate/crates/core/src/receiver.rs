//! Matched-filter decoding and Monte-Carlo bit error rate estimation.
//!
//! The decision statistic of slot i is
//!
//! ```text
//! γ_i = max over lags τ in slot i of  ⟨V − V0, h(· − τ)⟩ / ⟨h, h⟩
//! ```
//!
//! so a single clean EPSP of magnitude `hp` scores exactly 1. The sampled
//! alpha function is `C·k·r^k` with `r = exp(−dt/tp)`, which lets the
//! correlation at every lag be computed with a two-state backward recursion
//! instead of an explicit convolution.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RxMode, RxParams, ValidatedConfig};
use crate::error::{Error, Result};
use crate::link;
use crate::neuro::{spikes_to_bits, MembraneTrace};
use crate::rng::{derive_stream, RandomStream, StreamLabel};
use crate::types::{Bits, SpikeTrain};

/// EPSP template the receiver correlates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpspTemplate {
    pub hp: f64,
    pub tp: f64,
    /// Resting level subtracted from the potential before correlating.
    pub baseline: f64,
}

impl EpspTemplate {
    pub fn from_config(cfg: &ValidatedConfig) -> Self {
        Self {
            hp: cfg.relay.hp,
            tp: cfg.relay.tp,
            baseline: cfg.neuron.v0,
        }
    }
}

/// Normalised correlation at every sample index of the trace.
fn correlation_profile(potential: &MembraneTrace, template: &EpspTemplate) -> Vec<f64> {
    let sig = &potential.signal;
    let dt = sig.grid.dt;
    let r = (-dt / template.tp).exp();
    let rho = r * r;
    let c = template.hp * std::f64::consts::E * dt / template.tp;
    let energy_over_c = c * rho * (1.0 + rho) / (1.0 - rho).powi(3);
    let n = sig.values.len();
    let mut gamma = vec![0.0; n];
    let (mut a, mut b) = (0.0, 0.0);
    for m in (0..n).rev() {
        // b: Σ_{k≥1} k·x[m+k]·r^k, a: Σ_{k≥0} x[m+k]·r^k
        b = r * (b + a);
        a = (sig.values[m] - template.baseline) + r * a;
        gamma[m] = b / energy_over_c;
    }
    gamma
}

fn slot_lags(
    potential: &MembraneTrace,
    slot: usize,
    slot_ms: f64,
) -> Result<std::ops::Range<usize>> {
    let g = &potential.signal.grid;
    let start = slot as f64 * slot_ms;
    let end = start + slot_ms;
    if !g.covers(start, end) {
        return Err(Error::SlotOutOfRange {
            slot,
            start_ms: g.t0,
            end_ms: g.end(),
        });
    }
    let first = ((start - g.t0) / g.dt - 1e-9).ceil().max(0.0) as usize;
    let last = (((end - g.t0) / g.dt - 1e-9).ceil() as usize).min(g.n);
    Ok(first..last)
}

fn max_over(profile: &[f64], lags: std::ops::Range<usize>) -> f64 {
    profile[lags]
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// γ for one slot.
pub fn correlation_gamma(
    potential: &MembraneTrace,
    slot: usize,
    slot_ms: f64,
    template: &EpspTemplate,
) -> Result<f64> {
    let lags = slot_lags(potential, slot, slot_ms)?;
    Ok(max_over(&correlation_profile(potential, template), lags))
}

/// γ for slots `0..nbits`, sharing one correlation pass.
pub fn gammas(
    potential: &MembraneTrace,
    slot_ms: f64,
    nbits: usize,
    template: &EpspTemplate,
) -> Result<Vec<f64>> {
    let ranges = (0..nbits)
        .map(|i| slot_lags(potential, i, slot_ms))
        .collect::<Result<Vec<_>>>()?;
    let profile = correlation_profile(potential, template);
    Ok(ranges.into_iter().map(|r| max_over(&profile, r)).collect())
}

/// What the receiver observes.
#[derive(Debug, Clone, Copy)]
pub enum Observation<'a> {
    Potential(&'a MembraneTrace),
    Spikes(&'a SpikeTrain),
}

/// `Z_i = 1` iff `γ_i ≥ θ₂` (correlation mode) or slot i holds a spike
/// (spike-count mode).
pub fn decode(
    obs: Observation<'_>,
    rx: &RxParams,
    template: &EpspTemplate,
    slot_ms: f64,
    nbits: usize,
) -> Result<Bits> {
    match (rx.mode, obs) {
        (RxMode::Correlation, Observation::Potential(p)) => {
            Ok(threshold(&gammas(p, slot_ms, nbits, template)?, rx.theta2))
        }
        (RxMode::SpikeCount, Observation::Spikes(s)) => Ok(spikes_to_bits(s, slot_ms, nbits)),
        (RxMode::Correlation, Observation::Spikes(_)) => Err(Error::InvalidSweep(
            "correlation decoding needs a membrane potential".into(),
        )),
        (RxMode::SpikeCount, Observation::Potential(_)) => Err(Error::InvalidSweep(
            "spike-count decoding needs a spike train".into(),
        )),
    }
}

pub fn threshold(gammas: &[f64], theta2: f64) -> Bits {
    Bits::new(gammas.iter().map(|&g| g >= theta2).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCounts {
    pub errors: u64,
    /// Sent 1, received 0.
    pub misses: u64,
    /// Sent 0, received 1.
    pub false_alarms: u64,
    pub ones: u64,
    pub zeros: u64,
}

pub fn bit_errors(tx: &Bits, rx: &Bits) -> Result<ErrorCounts> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            tx: tx.len(),
            rx: rx.len(),
        });
    }
    let mut c = ErrorCounts::default();
    for (x, z) in tx.iter().zip(rx.iter()) {
        match (x, z) {
            (true, false) => c.misses += 1,
            (false, true) => c.false_alarms += 1,
            _ => {}
        }
        if x {
            c.ones += 1;
        } else {
            c.zeros += 1;
        }
    }
    c.errors = c.misses + c.false_alarms;
    Ok(c)
}

/// Joint counts of (source X, relay Y, decoded Z) over all simulated bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JointCounts {
    cells: [[[u64; 2]; 2]; 2],
}

impl JointCounts {
    pub fn record(&mut self, x: &Bits, y: &Bits, z: &Bits) {
        for ((x, y), z) in x.iter().zip(y.iter()).zip(z.iter()) {
            self.cells[x as usize][y as usize][z as usize] += 1;
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    self.cells[x][y][z] += other.cells[x][y][z];
                }
            }
        }
        self
    }

    pub fn count(&self, x: Option<bool>, y: Option<bool>, z: Option<bool>) -> u64 {
        let pick = |f: Option<bool>, v: usize| f.is_none_or(|b| b as usize == v);
        let mut n = 0;
        for xi in 0..2 {
            for yi in 0..2 {
                for zi in 0..2 {
                    if pick(x, xi) && pick(y, yi) && pick(z, zi) {
                        n += self.cells[xi][yi][zi];
                    }
                }
            }
        }
        n
    }

    pub fn total(&self) -> u64 {
        self.count(None, None, None)
    }

    fn ratio(num: u64, den: u64) -> Option<f64> {
        (den > 0).then(|| num as f64 / den as f64)
    }

    pub fn p_y_given_x(&self, y: bool, x: bool) -> Option<f64> {
        Self::ratio(
            self.count(Some(x), Some(y), None),
            self.count(Some(x), None, None),
        )
    }

    pub fn p_z_given_y(&self, z: bool, y: bool) -> Option<f64> {
        Self::ratio(
            self.count(None, Some(y), Some(z)),
            self.count(None, Some(y), None),
        )
    }

    pub fn p_z_given_xy(&self, z: bool, x: bool, y: bool) -> Option<f64> {
        Self::ratio(
            self.count(Some(x), Some(y), Some(z)),
            self.count(Some(x), Some(y), None),
        )
    }

    /// Error rate from the X/Z counts alone.
    pub fn pe_direct(&self) -> f64 {
        let errors =
            self.count(Some(true), None, Some(false)) + self.count(Some(false), None, Some(true));
        errors as f64 / self.total().max(1) as f64
    }

    /// Error rate rebuilt by total probability over the relay bit:
    /// `Σ_x P(x) Σ_y P(y|x)·P(z≠x | x, y)`.
    pub fn pe_through_relay(&self) -> f64 {
        let total = self.total().max(1) as f64;
        let mut pe = 0.0;
        for x in [false, true] {
            let px = self.count(Some(x), None, None) as f64 / total;
            for y in [false, true] {
                if let (Some(py), Some(pz)) = (self.p_y_given_x(y, x), self.p_z_given_xy(!x, x, y))
                {
                    pe += px * py * pz;
                }
            }
        }
        pe
    }

    /// Same rebuild assuming Z depends on X only through Y, i.e. with the
    /// X-marginal conditionals `P(z|y)`. Approximate whenever the decoder
    /// sees more than the slot bit.
    pub fn pe_markov(&self) -> f64 {
        let total = self.total().max(1) as f64;
        let mut pe = 0.0;
        for x in [false, true] {
            let px = self.count(Some(x), None, None) as f64 / total;
            for y in [false, true] {
                if let (Some(py), Some(pz)) = (self.p_y_given_x(y, x), self.p_z_given_y(!x, y)) {
                    pe += px * py * pz;
                }
            }
        }
        pe
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerEstimate {
    pub trials: u64,
    pub bit_errors: u64,
    pub bits_total: u64,
    pub pe: f64,
    pub ci95: (f64, f64),
    pub decomposition: JointCounts,
}

/// Flat record written by the `ber` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerRecord {
    pub pe: f64,
    pub trials: u64,
    pub bits_total: u64,
    pub bit_errors: u64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub p_y0_given_x1: Option<f64>,
    pub p_y1_given_x0: Option<f64>,
    pub p_z0_given_y1: Option<f64>,
    pub p_z1_given_y0: Option<f64>,
}

impl BerEstimate {
    pub fn from_counts(trials: u64, joint: JointCounts) -> Self {
        let bits_total = joint.total();
        let bit_errors =
            joint.count(Some(true), None, Some(false)) + joint.count(Some(false), None, Some(true));
        let pe = bit_errors as f64 / bits_total.max(1) as f64;
        Self {
            trials,
            bit_errors,
            bits_total,
            pe,
            ci95: normal_ci95(pe, bits_total),
            decomposition: joint,
        }
    }

    pub fn record(&self) -> BerRecord {
        let d = &self.decomposition;
        BerRecord {
            pe: self.pe,
            trials: self.trials,
            bits_total: self.bits_total,
            bit_errors: self.bit_errors,
            ci95_lo: self.ci95.0,
            ci95_hi: self.ci95.1,
            p_y0_given_x1: d.p_y_given_x(false, true),
            p_y1_given_x0: d.p_y_given_x(true, false),
            p_z0_given_y1: d.p_z_given_y(false, true),
            p_z1_given_y0: d.p_z_given_y(true, false),
        }
    }
}

/// Normal-approximation binomial interval, clipped to [0, 1].
pub fn normal_ci95(pe: f64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let half = 1.959_963_984_540_054 * (pe * (1.0 - pe) / n as f64).sqrt();
    ((pe - half).max(0.0), (pe + half).min(1.0))
}

/// i.i.d. equiprobable payload.
pub fn random_payload(nbits: usize, stream: &mut RandomStream) -> Bits {
    Bits::new((0..nbits).map(|_| stream.bernoulli(0.5)).collect())
}

/// Relay and decoded bits for one payload.
pub struct ChannelOutput {
    pub relay: Bits,
    pub decoded: Bits,
}

/// Monte-Carlo driver over an arbitrary channel.
///
/// Trial `t` draws its payload from stream `(seed, [trial:t, stage:payload])`
/// and hands `channel` the stream `(seed, [trial:t])`. Trials run in parallel;
/// the first failing trial aborts the estimate.
pub fn estimate_ber<F>(trials: u64, nbits: usize, seed: u64, channel: F) -> Result<BerEstimate>
where
    F: Fn(&Bits, &RandomStream) -> Result<ChannelOutput> + Sync,
{
    let joint = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_stream = derive_stream(seed, &[StreamLabel::Trial(t)]);
            let mut payload_stream = trial_stream.child(StreamLabel::Stage("payload"));
            let x = random_payload(nbits, &mut payload_stream);
            let out = channel(&x, &trial_stream)?;
            let mut j = JointCounts::default();
            j.record(&x, &out.relay, &out.decoded);
            Ok(j)
        })
        .collect::<Result<Vec<_>>>()?
        .iter()
        .fold(JointCounts::default(), |acc, j| acc.merge(j));
    Ok(BerEstimate::from_counts(trials, joint))
}

/// BER of the full link under `cfg`, `trials` payloads of `tx.nbits` bits.
pub fn monte_carlo_ber(cfg: &ValidatedConfig, trials: u64) -> Result<BerEstimate> {
    if trials == 0 {
        return Err(Error::InvalidSweep("trials must be at least 1".into()));
    }
    estimate_ber(trials, cfg.tx.nbits, cfg.sim.seed, |x, stream| {
        let out = link::simulate(cfg, x, stream)?;
        Ok(ChannelOutput {
            relay: out.cnd.bits,
            decoded: out.decoded,
        })
    })
}
