//! Overhead fractions, achievable rates, required transmit power, total power
//! consumption and energy efficiency.
//!
//! Two-phase schemes (relay, hybrid) are reported at the constraint level
//! `P = (P₁ + P₂)/2` with the power split that equalizes both hop SNRs.

use serde::{Deserialize, Serialize};

use crate::rbd::EffectiveGains;
use crate::{Error, Result};

/// Channel knowledge used to configure the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Csi {
    #[serde(alias = "icsi")]
    Instantaneous,
    #[serde(alias = "scsi")]
    Statistical,
}

impl Csi {
    pub fn label(self) -> &'static str {
        match self {
            Csi::Instantaneous => "icsi",
            Csi::Statistical => "scsi",
        }
    }
}

/// Where the surface sits for the surface-only scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrsPlacement {
    #[serde(alias = "NearRelay")]
    NearRelay,
    #[serde(alias = "NearSource")]
    NearSource,
}

/// One evaluated series. The relay scheme carries no CSI mode, and the hybrid
/// scheme always uses the surface next to the relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeConfig {
    Relay,
    Irs { csi: Csi, placement: IrsPlacement },
    Hybrid { csi: Csi },
}

impl SchemeConfig {
    pub fn is_two_phase(&self) -> bool {
        !matches!(self, SchemeConfig::Irs { .. })
    }

    pub fn csi(&self) -> Option<Csi> {
        match *self {
            SchemeConfig::Relay => None,
            SchemeConfig::Irs { csi, .. } | SchemeConfig::Hybrid { csi } => Some(csi),
        }
    }

    /// Surface placement this series is evaluated with (`None` for the relay).
    pub fn placement(&self) -> Option<IrsPlacement> {
        match *self {
            SchemeConfig::Relay => None,
            SchemeConfig::Irs { placement, .. } => Some(placement),
            SchemeConfig::Hybrid { .. } => Some(IrsPlacement::NearRelay),
        }
    }

    /// Scheme name as written to CSV.
    pub fn scheme_label(&self) -> &'static str {
        match self {
            SchemeConfig::Relay => "relay",
            SchemeConfig::Irs {
                placement: IrsPlacement::NearRelay,
                ..
            } => "irs-near-relay",
            SchemeConfig::Irs {
                placement: IrsPlacement::NearSource,
                ..
            } => "irs-near-source",
            SchemeConfig::Hybrid { .. } => "hybrid",
        }
    }

    pub fn csi_label(&self) -> &'static str {
        self.csi().map_or("none", Csi::label)
    }

    /// Number of links whose pilots are sent per coherence interval (per hop
    /// for the two-phase schemes).
    pub fn links_to_estimate(&self, m: usize) -> usize {
        match self {
            SchemeConfig::Relay => 1,
            SchemeConfig::Irs {
                csi: Csi::Instantaneous,
                ..
            } => m,
            SchemeConfig::Hybrid {
                csi: Csi::Instantaneous,
            } => m + 1,
            SchemeConfig::Irs {
                csi: Csi::Statistical,
                ..
            }
            | SchemeConfig::Hybrid {
                csi: Csi::Statistical,
            } => 1,
        }
    }

    /// Whether the surface is reconfigured every coherence interval.
    fn reconfigures(&self) -> bool {
        self.csi() == Some(Csi::Instantaneous)
    }

    fn uses_surface(&self) -> bool {
        !matches!(self, SchemeConfig::Relay)
    }
}

/// Hardware and propagation constants, all powers in Watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub noise_power: f64,
    pub bandwidth: f64,
    pub amplifier_efficiency: f64,
    pub p_source: f64,
    pub p_relay: f64,
    pub p_dest: f64,
    pub p_static_uc: f64,
    pub p_dynamic_uc: f64,
    pub mu: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            noise_power: crate::dbm_to_watts(-107.0),
            bandwidth: 10e6,
            amplifier_efficiency: 0.5,
            p_source: 0.1,
            p_relay: 0.1,
            p_dest: 0.1,
            p_static_uc: 1e-3,
            p_dynamic_uc: 5e-3,
            mu: 0.9,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::invalid("noise power must be positive"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        if !(self.amplifier_efficiency > 0.0 && self.amplifier_efficiency <= 1.0) {
            return Err(Error::invalid("amplifier efficiency must lie in (0, 1]"));
        }
        let powers = [
            self.p_source,
            self.p_relay,
            self.p_dest,
            self.p_static_uc,
            self.p_dynamic_uc,
        ];
        if powers.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid("hardware powers must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return Err(Error::invalid("reflection amplitude must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Frame layout in samples. `guard` is the gap between pilots and data that
/// instantaneous designs need to compute and feed back the surface phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameParams {
    pub coherence_len: u64,
    pub pilots_per_link: u64,
    pub guard: u64,
}

impl FrameParams {
    pub fn validate(&self) -> Result<()> {
        if self.coherence_len == 0 {
            return Err(Error::invalid("coherence interval must be positive"));
        }
        if self.pilots_per_link == 0 {
            return Err(Error::invalid("at least one pilot per link is required"));
        }
        Ok(())
    }
}

/// Why a realization could not be served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Infeasibility {
    /// Pilots and guard consume the whole coherence interval.
    FrameOverhead,
    /// Some effective gain is zero, so no finite power reaches the target.
    ZeroGain,
}

/// Data fraction of the coherence interval, halved for half-duplex schemes.
pub fn overhead_fraction(cfg: &SchemeConfig, frame: &FrameParams, m: usize) -> Result<f64> {
    frame.validate()?;
    let tc = frame.coherence_len as i128;
    let pilots = frame.pilots_per_link as i128 * cfg.links_to_estimate(m) as i128;
    let guard = if cfg.reconfigures() {
        frame.guard as i128
    } else {
        0
    };
    let data = tc - pilots - guard;
    let denom = if cfg.is_two_phase() { 2 * tc } else { tc };
    let eta = data as f64 / denom as f64;
    if data <= 0 {
        return Err(Error::InfeasibleFrame { eta });
    }
    Ok(eta)
}

/// Gain seen by the single equivalent link: `β` for one hop, or
/// `2β₁β₂/(β₁+β₂)` for two hops under the equal-SNR split.
fn equivalent_gain(cfg: &SchemeConfig, gains: &EffectiveGains) -> Result<f64> {
    if !gains.is_valid() {
        return Err(Error::invalid("gains must be finite and non-negative"));
    }
    match (cfg.is_two_phase(), gains.second_hop) {
        (false, None) => Ok(gains.first_hop),
        (true, Some(second)) => {
            let first = gains.first_hop;
            if first == 0.0 || second == 0.0 {
                Ok(0.0)
            } else {
                Ok(2.0 / (1.0 / first + 1.0 / second))
            }
        }
        _ => Err(Error::invalid("gain count does not match the scheme")),
    }
}

/// Rate in bits/s/Hz at constraint power `power`.
pub fn achievable_rate(
    cfg: &SchemeConfig,
    eta: f64,
    gains: &EffectiveGains,
    power: f64,
    noise_power: f64,
) -> Result<f64> {
    if !(power >= 0.0) {
        return Err(Error::invalid("transmit power must be non-negative"));
    }
    let snr = power * equivalent_gain(cfg, gains)? / noise_power;
    Ok(eta * snr.ln_1p() / std::f64::consts::LN_2)
}

/// Constraint-level power that reaches `rate_threshold`.
pub fn required_power(
    cfg: &SchemeConfig,
    eta: f64,
    gains: &EffectiveGains,
    rate_threshold: f64,
    noise_power: f64,
) -> Result<f64> {
    if !(rate_threshold >= 0.0 && rate_threshold.is_finite()) {
        return Err(Error::invalid("rate threshold must be non-negative"));
    }
    if !(eta > 0.0) {
        return Err(Error::InfeasibleFrame { eta });
    }
    let beta = equivalent_gain(cfg, gains)?;
    if beta == 0.0 {
        return Err(Error::Infeasible(Infeasibility::ZeroGain));
    }
    let snr = (rate_threshold / eta * std::f64::consts::LN_2).exp_m1();
    let power = snr * noise_power / beta;
    if !power.is_finite() {
        return Err(Error::Infeasible(Infeasibility::ZeroGain));
    }
    Ok(power)
}

/// Per-phase powers `(P₁, P₂)` that equalize both hop SNRs at constraint `power`.
pub fn power_split(gains: &EffectiveGains, power: f64) -> Option<(f64, f64)> {
    let (b1, b2) = (gains.first_hop, gains.second_hop?);
    if b1 + b2 == 0.0 {
        return None;
    }
    Some((2.0 * power * b2 / (b1 + b2), 2.0 * power * b1 / (b1 + b2)))
}

/// Total consumed power in Watts for transmit power `tx_power`.
pub fn total_power(cfg: &SchemeConfig, tx_power: f64, m: usize, sys: &SystemParams) -> f64 {
    let endpoints = if cfg.is_two_phase() {
        0.5 * sys.p_source + 0.5 * sys.p_dest + sys.p_relay
    } else {
        sys.p_source + sys.p_dest
    };
    let surface = if cfg.uses_surface() {
        let dynamic = if cfg.reconfigures() {
            sys.p_dynamic_uc
        } else {
            0.0
        };
        m as f64 * (sys.p_static_uc + dynamic)
    } else {
        0.0
    };
    tx_power / sys.amplifier_efficiency + endpoints + surface
}

/// Bits per Joule delivered at `rate_threshold` bits/s/Hz.
pub fn energy_efficiency(rate_threshold: f64, total: f64, bandwidth: f64) -> Result<f64> {
    if !(total > 0.0) {
        return Err(Error::invalid("total power must be positive"));
    }
    Ok(rate_threshold * bandwidth / total)
}

/// Power figures of one scheme at one rate threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerReport {
    pub required_tx_power: f64,
    pub total_power: f64,
    pub energy_efficiency: f64,
    pub rate_threshold: f64,
}

/// Full link budget of one scheme for given gains.
pub fn power_report(
    cfg: &SchemeConfig,
    frame: &FrameParams,
    m: usize,
    gains: &EffectiveGains,
    rate_threshold: f64,
    sys: &SystemParams,
) -> Result<PowerReport> {
    let eta = overhead_fraction(cfg, frame, m)?;
    let required_tx_power = required_power(cfg, eta, gains, rate_threshold, sys.noise_power)?;
    let total = total_power(cfg, required_tx_power, m, sys);
    Ok(PowerReport {
        required_tx_power,
        total_power: total,
        energy_efficiency: energy_efficiency(rate_threshold, total, sys.bandwidth)?,
        rate_threshold,
    })
}
