//! OOK transmitter and the free-space diffusion channel.
//!
//! Noisy concentration samples are clamped at zero after the Gaussian channel
//! noise is added. The clamp lifts the noise floor slightly: with no emissions
//! the mean sample is σ₁/√(2π) rather than 0.

use crate::config::{DiffusionParams, TxParams};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::types::{Bits, SampledSignal, TimeGrid, Units};

/// Impulse emissions at slot starts: `Qtx` molecules for a 1, none for a 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionSchedule {
    pub slot_bits: Bits,
    pub q_tx: f64,
    pub slot_ms: f64,
}

impl EmissionSchedule {
    /// Molecules released at the start of slot `i`.
    pub fn quantity(&self, slot: usize) -> f64 {
        if slot < self.slot_bits.len() && self.slot_bits.get(slot) {
            self.q_tx
        } else {
            0.0
        }
    }

    /// `(time_ms, molecules)` for every non-empty emission.
    pub fn impulses(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.slot_bits
            .iter()
            .enumerate()
            .filter(|&(_, b)| b)
            .map(|(i, _)| (i as f64 * self.slot_ms, self.q_tx))
    }
}

pub fn encode_ook(bits: &Bits, tx: &TxParams) -> EmissionSchedule {
    EmissionSchedule {
        slot_bits: bits.clone(),
        q_tx: tx.q_tx,
        slot_ms: tx.slot_ms,
    }
}

/// Point-source heat kernel g(x, t) in 1/μm³, with `t` in ms and `d` in μm²/s.
///
/// Zero for `t <= 0`.
#[inline]
pub fn green_kernel(x: f64, t_ms: f64, d_um2_per_s: f64) -> f64 {
    if t_ms <= 0.0 {
        return 0.0;
    }
    let four_dt = 4.0 * d_um2_per_s * 1e-3 * t_ms;
    (std::f64::consts::PI * four_dt).powf(-1.5) * (-x * x / four_dt).exp()
}

/// Noise-free concentration (molecules/μm³) at distance `r` and time `t`.
///
/// Sums the emissions of the current slot and at most `isi_memory` slots
/// before it.
pub fn concentration_at(
    r: f64,
    t_ms: f64,
    schedule: &EmissionSchedule,
    d_um2_per_s: f64,
    isi_memory: usize,
) -> f64 {
    if t_ms <= 0.0 {
        return 0.0;
    }
    let current = (t_ms / schedule.slot_ms).floor() as usize;
    let first = current.saturating_sub(isi_memory);
    let last = current.min(schedule.slot_bits.len().saturating_sub(1));
    (first..=last)
        .map(|i| {
            let q = schedule.quantity(i);
            if q == 0.0 {
                0.0
            } else {
                q * green_kernel(r, t_ms - i as f64 * schedule.slot_ms, d_um2_per_s)
            }
        })
        .sum()
}

/// Concentration trace at one device with i.i.d. Gaussian noise per sample,
/// clamped at zero.
pub fn sample_concentration(
    r: f64,
    grid: TimeGrid,
    schedule: &EmissionSchedule,
    diffusion: &DiffusionParams,
    stream: &mut RandomStream,
) -> SampledSignal {
    let values = grid
        .times()
        .map(|t| {
            let c = concentration_at(r, t, schedule, diffusion.d, diffusion.isi_memory);
            if diffusion.sigma1 > 0.0 {
                (c + diffusion.sigma1 * stream.standard_normal()).max(0.0)
            } else {
                c
            }
        })
        .collect();
    SampledSignal::new(grid, values, Units::MoleculesPerUm3)
}

/// Molecules received in `slot`: `gain` times the slot-mean concentration.
///
/// `gain` is ε₁·V_r·ρ/ε₋₁ (see [`crate::ValidatedConfig::reception_gain`]);
/// the time integral is taken in units of the slot length.
pub fn received_quantity(
    trace: &SampledSignal,
    slot: usize,
    slot_ms: f64,
    gain: f64,
) -> Result<f64> {
    let a = slot as f64 * slot_ms;
    let b = a + slot_ms;
    let integral = trace.integrate(a, b).ok_or(Error::SlotOutOfRange {
        slot,
        start_ms: trace.grid.t0,
        end_ms: trace.grid.end(),
    })?;
    Ok(gain * integral / slot_ms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive_stream, StreamLabel};

    fn tx(q: f64, t: f64) -> TxParams {
        TxParams {
            q_tx: q,
            slot_ms: t,
            nbits: 4,
        }
    }

    #[test]
    fn ook_schedule() {
        let s = encode_ook(&"1011".parse().unwrap(), &tx(1e5, 100.0));
        let imp: Vec<_> = s.impulses().collect();
        assert_eq!(imp, vec![(0.0, 1e5), (200.0, 1e5), (300.0, 1e5)]);
        let silent = encode_ook(&"0000".parse().unwrap(), &tx(1e5, 100.0));
        assert_eq!(silent.impulses().count(), 0);
        let one = encode_ook(&"1".parse().unwrap(), &tx(1e5, 100.0));
        assert_eq!(one.impulses().collect::<Vec<_>>(), vec![(0.0, 1e5)]);
    }

    #[test]
    fn kernel_values() {
        assert_eq!(green_kernel(3.0, 0.0, 0.1), 0.0);
        assert_eq!(green_kernel(3.0, -5.0, 0.1), 0.0);
        // (4π·0.1 μm²/s · 1 s)^(-3/2)
        let g = green_kernel(0.0, 1000.0, 0.1);
        assert!((g - 0.709_880_430_437_930_9).abs() < 1e-12, "{g}");
    }

    #[test]
    fn kernel_mass_is_one() {
        for &t in &[10.0f64, 100.0, 1000.0] {
            let d = 0.1;
            let sigma = (2.0 * d * 1e-3 * t).sqrt();
            let rmax = 14.0 * sigma;
            let n = 20_000;
            let h = rmax / n as f64;
            // composite Simpson
            let f = |x: f64| 4.0 * std::f64::consts::PI * x * x * green_kernel(x, t, d);
            let mut s = f(0.0) + f(rmax);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let mass = s * h / 3.0;
            assert!((mass - 1.0).abs() < 1e-6, "t = {t}: {mass}");
        }
    }

    #[test]
    fn single_impulse_value() {
        let s = encode_ook(&"1".parse().unwrap(), &tx(1e5, 10_000.0));
        let c = concentration_at(1.0, 2500.0, &s, 0.1, 5);
        // 1e5 · (π)^(-3/2) · e^(-1)
        let expected = 1e5 * std::f64::consts::PI.powf(-1.5) * (-1.0f64).exp();
        assert!((c - expected).abs() / expected < 1e-12);
        assert!((c - 6606.641).abs() < 1e-3);
    }

    #[test]
    fn zero_schedule_is_silent() {
        let s = encode_ook(&"0000".parse().unwrap(), &tx(1e5, 100.0));
        for t in [0.0, 50.0, 150.0, 399.0] {
            assert_eq!(concentration_at(15.0, t, &s, 1000.0, 5), 0.0);
        }
    }

    #[test]
    fn superposition_is_linear() {
        let both = encode_ook(&"1010".parse().unwrap(), &tx(1e5, 100.0));
        let first = encode_ook(&"1000".parse().unwrap(), &tx(1e5, 100.0));
        let second = encode_ook(&"0010".parse().unwrap(), &tx(1e5, 100.0));
        for t in [10.0, 120.0, 230.0, 390.0] {
            let lhs = concentration_at(12.0, t, &both, 1000.0, 5);
            let rhs = concentration_at(12.0, t, &first, 1000.0, 5)
                + concentration_at(12.0, t, &second, 1000.0, 5);
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn decays_with_distance() {
        let s = encode_ook(&"1".parse().unwrap(), &tx(1e5, 1000.0));
        let mut prev = f64::INFINITY;
        for r in (1..40).map(|k| k as f64 * 0.5) {
            let c = concentration_at(r, 30.0, &s, 1000.0, 5);
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn isi_truncation_is_sound() {
        // default acceptance-style channel: D = 5000 μm²/s, r = 15..20 μm, T = 100 ms
        let bits: Bits = "111111111111".parse().unwrap();
        let s = encode_ook(&bits, &tx(1e5, 100.0));
        let full_memory = bits.len();
        for r in [15.0, 20.0] {
            for t in (0..120).map(|k| k as f64 * 10.0 + 0.5) {
                let trunc = concentration_at(r, t, &s, 5000.0, 5);
                let full = concentration_at(r, t, &s, 5000.0, full_memory);
                let total = full.max(1e-12);
                assert!((full - trunc) / total < 0.25, "r={r} t={t}");
            }
        }
        // the omitted tail is one slot's share of a t^(-3/2) decay
        let full = concentration_at(15.0, 1150.0, &s, 5000.0, 12);
        let tail = full - concentration_at(15.0, 1150.0, &s, 5000.0, 5);
        assert!(tail > 0.0 && tail / full < 0.1, "{tail} of {full}");
    }

    #[test]
    fn noise_off_is_deterministic_trace() {
        let s = encode_ook(&"1011".parse().unwrap(), &tx(1e5, 100.0));
        let p = DiffusionParams {
            d: 1000.0,
            sigma1: 0.0,
            isi_memory: 5,
        };
        let grid = TimeGrid::spanning(0.0, 400.0, 1.0);
        let mut st = derive_stream(1, &[StreamLabel::Stage("diffusion")]);
        let tr = sample_concentration(15.0, grid, &s, &p, &mut st);
        for (i, t) in grid.times().enumerate() {
            assert_eq!(tr.values[i], concentration_at(15.0, t, &s, 1000.0, 5));
        }
    }

    #[test]
    fn clamped_noise_floor_mean() {
        let s = encode_ook(&Bits::zeros(1), &tx(1e5, 1e6));
        let p = DiffusionParams {
            d: 0.1,
            sigma1: 0.1,
            isi_memory: 5,
        };
        let grid = TimeGrid::new(0.0, 1.0, 1_000_000);
        let mut st = derive_stream(9, &[StreamLabel::Stage("diffusion")]);
        let tr = sample_concentration(15.0, grid, &s, &p, &mut st);
        let mean = tr.values.iter().sum::<f64>() / tr.values.len() as f64;
        let expected = 0.1 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((mean - expected).abs() < 5e-4, "{mean} vs {expected}");
        assert!(tr.values.iter().all(|&v| v >= 0.0));

        let mut st2 = derive_stream(9, &[StreamLabel::Stage("diffusion")]);
        let again = sample_concentration(15.0, grid, &s, &p, &mut st2);
        assert_eq!(tr, again);
    }

    #[test]
    fn received_quantity_of_constant_trace() {
        let grid = TimeGrid::spanning(0.0, 300.0, 1.0);
        let c = SampledSignal::constant(grid, 2.0, Units::MoleculesPerUm3);
        let gain = 0.1 * 301.0 / 0.08;
        let q = received_quantity(&c, 1, 100.0, gain).unwrap();
        assert!((q - 376.25 * 2.0).abs() < 1e-9);
        let zero = SampledSignal::constant(grid, 0.0, Units::MoleculesPerUm3);
        assert_eq!(received_quantity(&zero, 0, 100.0, gain).unwrap(), 0.0);
        assert!(matches!(
            received_quantity(&c, 3, 100.0, gain),
            Err(Error::SlotOutOfRange { slot: 3, .. })
        ));
    }

    #[test]
    fn trapezoid_matches_refined_quadrature() {
        let s = encode_ook(&"11".parse().unwrap(), &tx(1e5, 100.0));
        let f = |t: f64| concentration_at(15.0, t, &s, 5000.0, 5);
        let grid = TimeGrid::spanning(0.0, 200.0, 1.0);
        let trace = SampledSignal::from_fn(grid, Units::MoleculesPerUm3, f);
        let q = received_quantity(&trace, 1, 100.0, 1.0).unwrap();
        // midpoint Riemann sum at 1 μs
        let n = 100_000;
        let h = 100.0 / n as f64;
        let fine: f64 = (0..n).map(|i| f(100.0 + (i as f64 + 0.5) * h)).sum::<f64>() * h / 100.0;
        assert!((q - fine).abs() / fine < 1e-3, "{q} vs {fine}");
    }
}
