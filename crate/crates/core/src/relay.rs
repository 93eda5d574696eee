//! Neural transmission through a chain of single-neuron hops.
//!
//! A hop thins the incoming spikes by vesicle release, turns every released
//! spike into an alpha-shaped EPSP of random amplitude, adds Gaussian membrane
//! noise and fires the next neuron wherever the result crosses θ₁. The firing
//! decision uses the EPSP sum scaled by a synaptic gain, since θ₁ − V0 is many
//! times the size of a single unit EPSP.

use crate::config::{QDist, RelayParams, ValidatedConfig};
use crate::error::Result;
use crate::neuro::{detect_spikes, MembraneTrace};
use crate::rng::{RandomStream, StreamLabel};
use crate::types::{SampledSignal, SpikeTrain, TimeGrid, Units};

/// EPSPs are dropped once `t − t_j` exceeds this many time-to-peaks
/// (the alpha function is below 1e-15·hp there).
const EPSP_SUPPORT_TP: f64 = 40.0;

#[derive(Debug, Clone)]
pub struct RelayHopResult {
    pub released: SpikeTrain,
    pub potential: MembraneTrace,
    pub output: SpikeTrain,
}

/// Alpha function `(hp/tp)·t·exp(1 − t/tp)`, zero for negative t.
#[inline]
pub fn epsp_shape(t: f64, hp: f64, tp: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        hp / tp * t * (1.0 - t / tp).exp()
    }
}

/// Keep each spike independently with probability `p`.
pub fn vesicle_release(train: &SpikeTrain, p: f64, stream: &mut RandomStream) -> SpikeTrain {
    if p >= 1.0 {
        return train.clone();
    }
    train.retain(|_| stream.bernoulli(p))
}

fn epsp_trace(
    released: &SpikeTrain,
    relay: &RelayParams,
    q_dist: QDist,
    gain: f64,
    v0: f64,
    grid: TimeGrid,
    stream: &RandomStream,
) -> MembraneTrace {
    let mut q_stream = stream.child(StreamLabel::Stage("epsp_amplitude"));
    let mut values = vec![0.0; grid.n];
    let support = EPSP_SUPPORT_TP * relay.tp;
    for &tj in released.times() {
        let q = q_dist.sample(&mut q_stream) * gain;
        if q == 0.0 {
            continue;
        }
        let first = (((tj - grid.t0) / grid.dt).floor().max(0.0)) as usize;
        let last = ((((tj + support) - grid.t0) / grid.dt).ceil() as usize).min(grid.n);
        for (i, v) in values.iter_mut().enumerate().take(last).skip(first) {
            *v += q * epsp_shape(grid.time(i) - tj, relay.hp, relay.tp);
        }
    }
    if relay.sigma2 > 0.0 {
        let mut noise = stream.child(StreamLabel::Stage("neural_noise"));
        for v in values.iter_mut() {
            *v += relay.sigma2 * noise.standard_normal();
        }
    }
    for v in values.iter_mut() {
        *v += v0;
    }
    MembraneTrace {
        signal: SampledSignal::new(grid, values, Units::Mv),
    }
}

/// Postsynaptic potential `V0 + Σ_j (q_j/hp)·h(t − t_j) + n₂(t)`.
pub fn postsynaptic_potential(
    released: &SpikeTrain,
    relay: &RelayParams,
    q_dist: QDist,
    v0: f64,
    grid: TimeGrid,
    stream: &RandomStream,
) -> MembraneTrace {
    epsp_trace(released, relay, q_dist, 1.0, v0, grid, stream)
}

/// One hop: release, EPSP summation with synaptic gain, threshold firing.
pub fn relay_neuron(
    input: &SpikeTrain,
    cfg: &ValidatedConfig,
    grid: TimeGrid,
    stream: &RandomStream,
) -> RelayHopResult {
    let mut release_stream = stream.child(StreamLabel::Stage("vesicle_release"));
    let released = vesicle_release(input, cfg.relay.p, &mut release_stream);
    let potential = epsp_trace(
        &released,
        &cfg.relay,
        cfg.q_dist,
        cfg.relay.gain,
        cfg.neuron.v0,
        grid,
        stream,
    );
    let output = detect_spikes(&potential, cfg.neuron.theta1, cfg.neuron.tau_abs);
    RelayHopResult {
        released,
        potential,
        output,
    }
}

/// `hops`-fold relay; zero hops hands the input through untouched.
pub fn transmit_chain(
    input: &SpikeTrain,
    hops: usize,
    cfg: &ValidatedConfig,
    grid: TimeGrid,
    stream: &RandomStream,
) -> Result<SpikeTrain> {
    let mut train = input.clone();
    for hop in 0..hops {
        train = relay_neuron(&train, cfg, grid, &stream.child(StreamLabel::Hop(hop))).output;
    }
    Ok(train)
}
