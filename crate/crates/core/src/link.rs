//! One end-to-end pass: transmitter → diffusion → CNDs → relay → receiver.

use crate::config::{RxMode, ValidatedConfig};
use crate::diffusion::{encode_ook, sample_concentration};
use crate::error::{Error, Result};
use crate::neuro::{cnd_stage, CndOutput, MembraneTrace};
use crate::receiver::{decode, EpspTemplate, Observation};
use crate::relay::{postsynaptic_potential, transmit_chain};
use crate::rng::{RandomStream, StreamLabel};
use crate::types::{Bits, SampledSignal, SpikeTrain, TimeGrid};

#[derive(Debug, Clone)]
pub struct LinkOutput {
    /// Concentration seen by each device.
    pub concentrations: Vec<SampledSignal>,
    pub cnd: CndOutput,
    /// Spike train arriving at the receiver.
    pub relayed: SpikeTrain,
    /// Receiver-side potential (correlation mode only).
    pub rx_potential: Option<MembraneTrace>,
    pub decoded: Bits,
}

pub fn simulate(
    cfg: &ValidatedConfig,
    payload: &Bits,
    stream: &RandomStream,
) -> Result<LinkOutput> {
    let nbits = cfg.tx.nbits;
    if payload.len() != nbits {
        return Err(Error::LengthMismatch {
            tx: payload.len(),
            rx: nbits,
        });
    }
    let duration = cfg.duration_ms();
    let schedule = encode_ook(payload, &cfg.tx);
    let slow = TimeGrid::spanning(0.0, duration, cfg.sim.dt_slow);
    let diffusion_stream = stream.child(StreamLabel::Stage("diffusion"));
    let concentrations: Vec<SampledSignal> = cfg
        .cnd
        .r
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut s = diffusion_stream.child(StreamLabel::Cnd(k));
            sample_concentration(r, slow, &schedule, &cfg.diffusion, &mut s)
        })
        .collect();

    let cnd = cnd_stage(&concentrations, cfg)?;

    let fast = cnd.membrane.signal.grid;
    let relayed = transmit_chain(
        &cnd.spikes,
        cfg.relay.n,
        cfg,
        fast,
        &stream.child(StreamLabel::Stage("relay")),
    )?;

    let template = EpspTemplate::from_config(cfg);
    let (rx_potential, decoded) = match cfg.rx.mode {
        RxMode::Correlation => {
            let potential = postsynaptic_potential(
                &relayed,
                &cfg.relay,
                cfg.q_dist,
                cfg.neuron.v0,
                fast,
                &stream.child(StreamLabel::Stage("receiver")),
            );
            let z = decode(
                Observation::Potential(&potential),
                &cfg.rx,
                &template,
                cfg.tx.slot_ms,
                nbits,
            )?;
            (Some(potential), z)
        }
        RxMode::SpikeCount => {
            let z = decode(
                Observation::Spikes(&relayed),
                &cfg.rx,
                &template,
                cfg.tx.slot_ms,
                nbits,
            )?;
            (None, z)
        }
    };

    Ok(LinkOutput {
        concentrations,
        cnd,
        relayed,
        rx_potential,
        decoded,
    })
}
