//! System configuration: schema, defaults, overrides and validation.
//!
//! Files are flat TOML documents whose keys are the dotted field paths, e.g.
//!
//! ```text
//! tx.Qtx = 100000
//! cnd.r = [15, 16, 17, 18, 19, 20]
//! neuron.backend = "HH"
//! ```
//!
//! Absent keys take the default parameter set; unknown keys are rejected.
//! Quantities are stored in the units they are written in. [`validate`]
//! converts them once into the internal unit system and keeps the result in
//! [`ValidatedConfig`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::ConfigError;

/// Avogadro's number times 10⁻⁶ (μmol) divided by 10¹⁵ μm³ per litre.
const UMOL_PER_L_TO_PER_UM3: f64 = 6.022_140_76e23 * 1e-6 / 1e15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TxParams {
    /// Molecules emitted at the start of a "1" slot.
    #[serde(rename = "Qtx")]
    pub q_tx: f64,
    /// Slot length (ms).
    #[serde(rename = "T")]
    pub slot_ms: f64,
    pub nbits: usize,
}

impl Default for TxParams {
    fn default() -> Self {
        Self {
            q_tx: 1e5,
            slot_ms: 100.0,
            nbits: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionParams {
    /// Diffusion coefficient (μm²/s).
    #[serde(rename = "D")]
    pub d: f64,
    /// Channel noise standard deviation (molecules/μm³).
    pub sigma1: f64,
    /// Number of prior slots whose emissions still contribute.
    pub isi_memory: usize,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            d: 0.1,
            sigma1: 0.1,
            isi_memory: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CndParams {
    #[serde(rename = "M")]
    pub m: usize,
    /// Transmitter distance of every device (μm).
    pub r: Vec<f64>,
    pub eps_bind: f64,
    pub eps_release: f64,
    /// Receptor concentration (μmol/L).
    pub rho: f64,
    /// Receiving volume (μm³).
    #[serde(rename = "Vr")]
    pub vr: f64,
    /// Current per received molecule (nA/cm²).
    pub mu: f64,
    /// Sine frequency (Hz).
    pub a: f64,
    /// Sine phase (rad).
    pub b: f64,
    /// Drop the negative half-waves of the stimulation current.
    pub rectify: bool,
}

impl Default for CndParams {
    fn default() -> Self {
        Self {
            m: 6,
            r: vec![15.0, 16.0, 17.0, 18.0, 19.0, 20.0],
            eps_bind: 0.1,
            eps_release: 0.08,
            rho: 0.5,
            vr: 1.0,
            mu: 20.0,
            a: 40.0,
            b: 0.0,
            rectify: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    #[serde(rename = "SRM")]
    Srm,
    #[serde(rename = "HH")]
    Hh,
}

/// Hodgkin-Huxley constants in the original convention (depolarisation from
/// rest, rest at 0 mV). Conductances in mS/cm², capacitance in μF/cm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HhConstants {
    pub c_m: f64,
    pub g_na: f64,
    pub g_k: f64,
    pub g_l: f64,
    pub e_na: f64,
    pub e_k: f64,
    pub e_l: f64,
}

impl Default for HhConstants {
    fn default() -> Self {
        Self {
            c_m: 1.0,
            g_na: 120.0,
            g_k: 36.0,
            g_l: 0.3,
            e_na: 115.0,
            e_k: -12.0,
            e_l: 10.613,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NeuronParams {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub theta1: f64,
    pub tau_abs: f64,
    pub hh: HhConstants,
    pub backend: Backend,
    /// Passive membrane time constant of the linear response kernel (ms).
    pub srm_tau_m: f64,
    /// Steady-state depolarisation per μA/cm² of sustained current (mV).
    pub srm_r_m: f64,
}

impl Default for NeuronParams {
    fn default() -> Self {
        Self {
            v0: -70.0,
            theta1: -55.0,
            tau_abs: 15.0,
            hh: HhConstants::default(),
            backend: Backend::Hh,
            srm_tau_m: 10.0,
            srm_r_m: 15.0,
        }
    }
}

/// Distribution of EPSP amplitudes, in multiples of `hp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QDist {
    Point(f64),
    /// Normal(mean, std) floored at zero.
    TruncNormal {
        mean: f64,
        std: f64,
    },
}

impl QDist {
    pub fn sample(&self, stream: &mut crate::rng::RandomStream) -> f64 {
        match *self {
            QDist::Point(v) => v,
            QDist::TruncNormal { mean, std } => stream.normal(mean, std).max(0.0),
        }
    }
}

impl fmt::Display for QDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QDist::Point(v) => write!(f, "point({v})"),
            QDist::TruncNormal { mean, std } => write!(f, "truncnorm({mean}, {std})"),
        }
    }
}

impl FromStr for QDist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let open = s
            .find('(')
            .ok_or_else(|| format!("malformed q_dist {s:?}"))?;
        if !s.ends_with(')') {
            return Err(format!("malformed q_dist {s:?}"));
        }
        let name = s[..open].trim();
        let args = s[open + 1..s.len() - 1]
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("q_dist argument: {e}"))?;
        let dist = match (name, args.as_slice()) {
            ("point", [v]) => QDist::Point(*v),
            ("truncnorm", [mean, std]) => QDist::TruncNormal {
                mean: *mean,
                std: *std,
            },
            _ => return Err(format!("unknown q_dist {s:?}")),
        };
        match dist {
            QDist::Point(v) if !(v >= 0.0 && v.is_finite()) => {
                Err(format!("q_dist point value {v} must be non-negative"))
            }
            QDist::TruncNormal { mean, std }
                if !(mean.is_finite() && std >= 0.0 && std.is_finite()) =>
            {
                Err(format!("q_dist truncnorm({mean}, {std}) is invalid"))
            }
            d => Ok(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelayParams {
    /// Number of relay neurons between the CND neuron and the receiver.
    #[serde(rename = "N")]
    pub n: usize,
    /// Vesicle release probability.
    pub p: f64,
    pub q_dist: String,
    /// EPSP magnitude (mV).
    pub hp: f64,
    /// EPSP time to peak (ms).
    pub tp: f64,
    /// Postsynaptic noise standard deviation (mV).
    pub sigma2: f64,
    /// Synaptic gain applied to EPSPs when a relay neuron decides to fire.
    pub gain: f64,
}

impl Default for RelayParams {
    fn default() -> Self {
        Self {
            n: 0,
            p: 0.9,
            q_dist: "truncnorm(1, 0.2)".into(),
            hp: 1.0,
            tp: 0.5,
            sigma2: 0.1,
            gain: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RxMode {
    Correlation,
    SpikeCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RxParams {
    pub theta2: f64,
    pub mode: RxMode,
}

impl Default for RxParams {
    fn default() -> Self {
        Self {
            theta2: 1.0,
            mode: RxMode::Correlation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    /// Membrane integration step (ms).
    pub dt_fast: f64,
    /// Concentration sampling step (ms).
    pub dt_slow: f64,
    /// At most [`MAX_SEED`], the largest TOML integer.
    pub seed: u64,
}

pub const MAX_SEED: u64 = i64::MAX as u64;

fn seed_violation(seed: u64) -> ConfigError {
    ConfigError::single(format!("sim.seed must be at most {MAX_SEED}, got {seed}"))
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt_fast: 0.01,
            dt_slow: 1.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub tx: TxParams,
    pub diffusion: DiffusionParams,
    pub cnd: CndParams,
    pub neuron: NeuronParams,
    pub relay: RelayParams,
    pub rx: RxParams,
    pub sim: SimParams,
}

impl SystemConfig {
    /// Parse a config document, then apply `key=value` overrides in order.
    pub fn parse_with_overrides<S: AsRef<str>>(
        text: &str,
        overrides: &[S],
    ) -> Result<Self, ConfigError> {
        let mut table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::single(format!("parse error: {e}")))?;
        for ov in overrides {
            let ov = ov.as_ref();
            let (key, value) = ov
                .split_once('=')
                .ok_or_else(|| ConfigError::single(format!("override {ov:?} is not key=value")))?;
            set_path(&mut table, key.trim(), parse_value(value.trim()))?;
        }
        Self::from_table(table)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Self::parse_with_overrides::<&str>(text, &[])
    }

    fn from_table(table: Table) -> Result<Self, ConfigError> {
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::single(e.message().to_string()))
    }

    fn to_table(&self) -> Result<Table, ConfigError> {
        if self.sim.seed > MAX_SEED {
            return Err(seed_violation(self.sim.seed));
        }
        match Value::try_from(self) {
            Ok(Value::Table(t)) => Ok(t),
            Ok(_) => unreachable!("config serializes to a table"),
            Err(e) => Err(ConfigError::single(e.to_string())),
        }
    }

    /// Flat `section.key = value` rendering; parses back to an equal config.
    pub fn to_flat_string(&self) -> Result<String, ConfigError> {
        fn emit(prefix: &str, table: &Table, out: &mut String) {
            for (k, v) in table {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                match v {
                    Value::Table(t) => emit(&path, t, out),
                    other => {
                        out.push_str(&path);
                        out.push_str(" = ");
                        out.push_str(&other.to_string());
                        out.push('\n');
                    }
                }
            }
        }
        let mut out = String::new();
        emit("", &self.to_table()?, &mut out);
        Ok(out)
    }

    /// Set a numeric field addressed by its dotted path.
    ///
    /// Changing `cnd.M` re-spaces `cnd.r` evenly over its current range so the
    /// device list keeps matching the device count.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self, ConfigError> {
        if !value.is_finite() {
            return Err(ConfigError::single(format!(
                "{path}: value {value} is not finite"
            )));
        }
        let mut table = self.to_table()?;
        let current = get_path(&table, path)
            .ok_or_else(|| ConfigError::single(format!("unknown parameter {path}")))?;
        let new = match current {
            Value::Integer(_) => {
                if value.fract() != 0.0 {
                    return Err(ConfigError::single(format!(
                        "{path} is an integer field, got {value}"
                    )));
                }
                Value::Integer(value as i64)
            }
            Value::Float(_) => Value::Float(value),
            _ => {
                return Err(ConfigError::single(format!(
                    "{path} is not a numeric field"
                )))
            }
        };
        set_path(&mut table, path, new)?;
        let mut cfg = Self::from_table(table)?;
        if path == "cnd.M" && cfg.cnd.r.len() != cfg.cnd.m && !cfg.cnd.r.is_empty() {
            cfg.cnd.r = respace(&cfg.cnd.r, cfg.cnd.m);
        }
        Ok(cfg)
    }
}

fn respace(r: &[f64], m: usize) -> Vec<f64> {
    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == 1 {
        return vec![lo];
    }
    (0..m)
        .map(|k| lo + (hi - lo) * k as f64 / (m - 1) as f64)
        .collect()
}

fn parse_value(text: &str) -> Value {
    format!("v = {text}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(text.to_string()))
}

fn get_path<'a>(table: &'a Table, path: &str) -> Option<&'a Value> {
    let mut parts = path.split('.');
    let mut cur = table.get(parts.next()?)?;
    for p in parts {
        cur = cur.as_table()?.get(p)?;
    }
    Some(cur)
}

fn set_path(table: &mut Table, path: &str, value: Value) -> Result<(), ConfigError> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::single(format!("malformed key {path:?}")));
    }
    let (last, parents) = parts.split_last().unwrap();
    let mut cur = table;
    for p in parents {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| ConfigError::single(format!("{path}: {p} is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

/// A configuration that passed [`validate`], with the derived quantities in
/// internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    raw: SystemConfig,
    /// Receptor density (receptors/μm³).
    pub rho_per_um3: f64,
    /// ε₁·V_r·ρ / ε₋₁, molecules per (molecules/μm³) of slot-mean concentration.
    pub reception_gain: f64,
    /// Current per received molecule (μA/cm²).
    pub mu_ua: f64,
    pub q_dist: QDist,
}

impl ValidatedConfig {
    pub fn raw(&self) -> &SystemConfig {
        &self.raw
    }

    pub fn into_raw(self) -> SystemConfig {
        self.raw
    }

    /// Total simulated duration (ms).
    pub fn duration_ms(&self) -> f64 {
        self.raw.tx.nbits as f64 * self.raw.tx.slot_ms
    }
}

impl std::ops::Deref for ValidatedConfig {
    type Target = SystemConfig;

    fn deref(&self) -> &SystemConfig {
        &self.raw
    }
}

/// Check every invariant, reporting all violations at once.
pub fn validate(cfg: SystemConfig) -> Result<ValidatedConfig, ConfigError> {
    let mut v = Vec::new();
    if cfg.sim.seed > MAX_SEED {
        v.extend(seed_violation(cfg.sim.seed).violations);
    }
    let mut positive = |name: &str, x: f64| {
        if !(x > 0.0 && x.is_finite()) {
            v.push(format!("{name} must be positive and finite, got {x}"));
        }
    };
    positive("tx.Qtx", cfg.tx.q_tx);
    positive("tx.T", cfg.tx.slot_ms);
    positive("diffusion.D", cfg.diffusion.d);
    positive("cnd.eps_bind", cfg.cnd.eps_bind);
    positive("cnd.eps_release", cfg.cnd.eps_release);
    positive("cnd.rho", cfg.cnd.rho);
    positive("cnd.Vr", cfg.cnd.vr);
    positive("cnd.mu", cfg.cnd.mu);
    positive("cnd.a", cfg.cnd.a);
    positive("neuron.tau_abs", cfg.neuron.tau_abs);
    positive("neuron.hh.c_m", cfg.neuron.hh.c_m);
    positive("neuron.srm_tau_m", cfg.neuron.srm_tau_m);
    positive("neuron.srm_r_m", cfg.neuron.srm_r_m);
    positive("relay.hp", cfg.relay.hp);
    positive("relay.tp", cfg.relay.tp);
    positive("relay.gain", cfg.relay.gain);
    positive("sim.dt_fast", cfg.sim.dt_fast);
    positive("sim.dt_slow", cfg.sim.dt_slow);

    let mut non_negative = |name: &str, x: f64| {
        if !(x >= 0.0 && x.is_finite()) {
            v.push(format!("{name} must be non-negative and finite, got {x}"));
        }
    };
    non_negative("diffusion.sigma1", cfg.diffusion.sigma1);
    non_negative("relay.sigma2", cfg.relay.sigma2);
    non_negative("neuron.hh.g_na", cfg.neuron.hh.g_na);
    non_negative("neuron.hh.g_k", cfg.neuron.hh.g_k);
    non_negative("neuron.hh.g_l", cfg.neuron.hh.g_l);

    for (name, x) in [
        ("cnd.b", cfg.cnd.b),
        ("neuron.V0", cfg.neuron.v0),
        ("neuron.theta1", cfg.neuron.theta1),
        ("neuron.hh.e_na", cfg.neuron.hh.e_na),
        ("neuron.hh.e_k", cfg.neuron.hh.e_k),
        ("neuron.hh.e_l", cfg.neuron.hh.e_l),
        ("rx.theta2", cfg.rx.theta2),
    ] {
        if !x.is_finite() {
            v.push(format!("{name} must be finite, got {x}"));
        }
    }

    if cfg.tx.nbits < 1 {
        v.push("tx.nbits must be at least 1".into());
    }
    if cfg.cnd.m < 1 {
        v.push("cnd.M must be at least 1".into());
    }
    if cfg.cnd.r.len() != cfg.cnd.m {
        v.push(format!(
            "cnd.M = {} but cnd.r lists {} distances",
            cfg.cnd.m,
            cfg.cnd.r.len()
        ));
    }
    if let Some(bad) = cfg.cnd.r.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
        v.push(format!("cnd.r distances must be positive, got {bad}"));
    }
    if !(cfg.neuron.theta1 > cfg.neuron.v0) {
        v.push(format!(
            "neuron.theta1 ({}) must exceed neuron.V0 ({})",
            cfg.neuron.theta1, cfg.neuron.v0
        ));
    }
    if !(0.0..=1.0).contains(&cfg.relay.p) {
        v.push(format!("relay.p must lie in [0, 1], got {}", cfg.relay.p));
    }
    if cfg.neuron.backend == Backend::Hh && cfg.sim.dt_fast > 0.025 {
        v.push(format!(
            "sim.dt_fast = {} ms exceeds the 0.025 ms limit of the HH backend",
            cfg.sim.dt_fast
        ));
    }
    if cfg.sim.dt_fast > cfg.relay.tp / 5.0 {
        v.push(format!(
            "sim.dt_fast = {} ms is too coarse to resolve relay.tp = {} ms",
            cfg.sim.dt_fast, cfg.relay.tp
        ));
    }
    if cfg.sim.dt_slow > cfg.tx.slot_ms {
        v.push("sim.dt_slow must not exceed tx.T".into());
    }
    let q_dist = match cfg.relay.q_dist.parse::<QDist>() {
        Ok(q) => Some(q),
        Err(e) => {
            v.push(format!("relay.q_dist: {e}"));
            None
        }
    };

    if !v.is_empty() {
        return Err(ConfigError { violations: v });
    }
    let rho_per_um3 = cfg.cnd.rho * UMOL_PER_L_TO_PER_UM3;
    Ok(ValidatedConfig {
        rho_per_um3,
        reception_gain: cfg.cnd.eps_bind * cfg.cnd.vr * rho_per_um3 / cfg.cnd.eps_release,
        mu_ua: cfg.cnd.mu * 1e-3,
        q_dist: q_dist.unwrap(),
        raw: cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = validate(SystemConfig::default()).unwrap();
        assert_eq!(cfg.diffusion.d, 0.1);
        assert_eq!(cfg.tx.q_tx, 1e5);
        assert_eq!(cfg.cnd.m, 6);
        assert_eq!(cfg.neuron.v0, -70.0);
        assert_eq!(cfg.rx.theta2, 1.0);
        assert!((cfg.rho_per_um3 - 301.107).abs() < 1e-3);
        assert!((cfg.reception_gain - 1.25 * 301.107).abs() < 1e-2);
    }

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(SystemConfig::parse("").unwrap(), SystemConfig::default());
    }

    #[test]
    fn length_mismatch_rejected() {
        let cfg = SystemConfig::parse("cnd.M = 3\ncnd.r = [15, 16, 17, 18, 19]").unwrap();
        let err = validate(cfg).unwrap_err();
        assert!(err.violations.iter().any(|m| m.contains("cnd.r lists 5")));
    }

    #[test]
    fn zero_release_rate_rejected() {
        let cfg = SystemConfig::parse("cnd.eps_release = 0").unwrap();
        let err = validate(cfg).unwrap_err();
        assert!(err.violations.iter().any(|m| m.contains("eps_release")));
    }

    #[test]
    fn all_violations_reported() {
        let cfg = SystemConfig::parse(
            "diffusion.D = -1\nrelay.p = 1.5\nneuron.theta1 = -80\ncnd.eps_release = 0",
        )
        .unwrap();
        let err = validate(cfg).unwrap_err();
        assert_eq!(err.violations.len(), 4, "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(SystemConfig::parse("tx.bogus = 1").is_err());
        assert!(SystemConfig::parse("nosuch.T = 1").is_err());
    }

    #[test]
    fn overrides_apply_in_order() {
        let cfg = SystemConfig::parse_with_overrides(
            "tx.T = 200",
            &["tx.T=300", "neuron.backend=SRM", "relay.q_dist=point(1)"],
        )
        .unwrap();
        assert_eq!(cfg.tx.slot_ms, 300.0);
        assert_eq!(cfg.neuron.backend, Backend::Srm);
        assert_eq!(validate(cfg).unwrap().q_dist, QDist::Point(1.0));
    }

    #[test]
    fn flat_round_trip() {
        let mut cfg = SystemConfig::default();
        cfg.cnd.vr = 0.125;
        cfg.sim.seed = u32::MAX as u64 + 7;
        let text = cfg.to_flat_string().unwrap();
        assert!(text.contains("cnd.Vr = 0.125"));
        assert_eq!(SystemConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn seed_beyond_toml_range_is_rejected() {
        let mut cfg = SystemConfig::default();
        cfg.sim.seed = MAX_SEED;
        assert!(cfg.to_flat_string().is_ok());
        cfg.sim.seed = MAX_SEED + 1;
        assert!(cfg.to_flat_string().is_err());
        assert!(cfg.with_param("cnd.mu", 1.0).is_err());
        assert!(validate(cfg).is_err());
    }

    #[test]
    fn with_param_respaces_devices() {
        let cfg = SystemConfig::default().with_param("cnd.M", 11.0).unwrap();
        assert_eq!(cfg.cnd.r.len(), 11);
        assert_eq!(cfg.cnd.r[0], 15.0);
        assert_eq!(cfg.cnd.r[10], 20.0);
        assert!(validate(cfg).is_ok());
        assert!(SystemConfig::default().with_param("cnd.M", 2.5).is_err());
        assert!(SystemConfig::default().with_param("cnd.nope", 1.0).is_err());
        let t = SystemConfig::default().with_param("tx.T", 250.0).unwrap();
        assert_eq!(t.tx.slot_ms, 250.0);
    }

    #[test]
    fn q_dist_descriptors() {
        assert_eq!("point(0.5)".parse::<QDist>().unwrap(), QDist::Point(0.5));
        assert_eq!(
            "truncnorm(1, 0.2)".parse::<QDist>().unwrap(),
            QDist::TruncNormal {
                mean: 1.0,
                std: 0.2
            }
        );
        assert!("gamma(1)".parse::<QDist>().is_err());
        assert!("truncnorm(1, -1)".parse::<QDist>().is_err());
    }
}
