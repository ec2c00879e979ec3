//! Reflective beamforming designs and the effective channel gains they produce.
//!
//! Cascaded products use the plain transpose `h_outᵀ Θ h_in` (no conjugation).
//! Under instantaneous CSI every reflected term is phase-aligned with the
//! direct path; under statistical CSI the surface is fixed at `Θ = μI`.

use std::f64::consts::TAU;

use crate::channel::ChannelRealization;
use crate::linkbudget::{Csi, SchemeConfig};
use crate::{Error, Result, C64};

/// Per-cell reflection amplitudes and phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionConfig {
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
}

/// Maps a phase onto `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl ReflectionConfig {
    pub fn new(amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::invalid(
                "amplitude and phase vectors differ in length",
            ));
        }
        if amplitudes.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::invalid("reflection amplitudes must lie in [0, 1]"));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("phases must be finite"));
        }
        let phases = phases.into_iter().map(wrap_phase).collect();
        Ok(Self { amplitudes, phases })
    }

    /// `Θ = μI`.
    pub fn uniform(m: usize, mu: f64) -> Result<Self> {
        Self::new(vec![mu; m], vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Diagonal of `Θ`: `μ_m e^{jθ_m}`.
    pub fn coefficients(&self) -> Vec<C64> {
        self.amplitudes
            .iter()
            .zip(&self.phases)
            .map(|(&a, &p)| C64::from_polar(a, p))
            .collect()
    }
}

/// Effective power gains of one scheme: a single gain for the one-phase
/// surface link, two for the relayed schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains {
    pub first_hop: f64,
    pub second_hop: Option<f64>,
}

impl EffectiveGains {
    pub fn single(gain: f64) -> Self {
        Self {
            first_hop: gain,
            second_hop: None,
        }
    }

    pub fn two_hop(first: f64, second: f64) -> Self {
        Self {
            first_hop: first,
            second_hop: Some(second),
        }
    }

    pub fn is_valid(&self) -> bool {
        let ok = |g: f64| g >= 0.0 && g.is_finite();
        ok(self.first_hop) && self.second_hop.is_none_or(ok)
    }
}

fn check_lengths(a: &[C64], b: &[C64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "channel vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `Σ_m a_m b_m`.
fn transpose_product(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `Σ_m |a_m b_m|`.
fn magnitude_sum(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).norm()).sum()
}

/// Phase design that aligns every cascaded term with the direct path (or with
/// the real axis when there is none).
pub fn icsi_phases_cascade(
    h_out: &[C64],
    h_in: &[C64],
    direct: Option<C64>,
    mu: f64,
) -> Result<ReflectionConfig> {
    check_lengths(h_out, h_in)?;
    let reference = direct.map_or(0.0, |d| d.arg());
    let phases = h_out
        .iter()
        .zip(h_in)
        .map(|(o, i)| reference - (o * i).arg())
        .collect();
    ReflectionConfig::new(vec![mu; h_out.len()], phases)
}

/// `|direct + h_outᵀ Θ h_in|²` for an arbitrary surface configuration.
pub fn cascade_gain(
    direct: C64,
    h_out: &[C64],
    h_in: &[C64],
    theta: &ReflectionConfig,
) -> Result<f64> {
    check_lengths(h_out, h_in)?;
    if theta.len() != h_out.len() {
        return Err(Error::invalid(
            "reflection config does not match channel length",
        ));
    }
    let reflected: C64 = h_out
        .iter()
        .zip(h_in)
        .zip(theta.coefficients())
        .map(|((o, i), c)| o * c * i)
        .sum();
    Ok((direct + reflected).norm_sqr())
}

/// `(μ Σ_m |h_ID,m h_SI,m|)²`.
pub fn gain_irs_icsi(h_id: &[C64], h_si: &[C64], mu: f64) -> Result<f64> {
    check_lengths(h_id, h_si)?;
    Ok((mu * magnitude_sum(h_id, h_si)).powi(2))
}

/// `|μ h_IDᵀ h_SI|²`.
pub fn gain_irs_scsi(h_id: &[C64], h_si: &[C64], mu: f64) -> Result<f64> {
    check_lengths(h_id, h_si)?;
    Ok((transpose_product(h_id, h_si) * mu).norm_sqr())
}

/// `(|direct| + μ Σ_m |h_out,m h_in,m|)²`.
pub fn gain_hop_icsi(direct: C64, h_out: &[C64], h_in: &[C64], mu: f64) -> Result<f64> {
    check_lengths(h_out, h_in)?;
    Ok((direct.norm() + mu * magnitude_sum(h_out, h_in)).powi(2))
}

/// `|direct + μ h_outᵀ h_in|²`.
pub fn gain_hop_scsi(direct: C64, h_out: &[C64], h_in: &[C64], mu: f64) -> Result<f64> {
    check_lengths(h_out, h_in)?;
    Ok((direct + transpose_product(h_out, h_in) * mu).norm_sqr())
}

/// Gains of one scheme on one realization.
pub fn effective_gains(
    cfg: &SchemeConfig,
    h: &ChannelRealization,
    mu: f64,
) -> Result<EffectiveGains> {
    Ok(match cfg {
        SchemeConfig::Relay => EffectiveGains::two_hop(h.h_sr.norm_sqr(), h.h_rd.norm_sqr()),
        SchemeConfig::Irs {
            csi: Csi::Instantaneous,
            ..
        } => EffectiveGains::single(gain_irs_icsi(&h.h_id, &h.h_si, mu)?),
        SchemeConfig::Irs {
            csi: Csi::Statistical,
            ..
        } => EffectiveGains::single(gain_irs_scsi(&h.h_id, &h.h_si, mu)?),
        SchemeConfig::Hybrid {
            csi: Csi::Instantaneous,
        } => EffectiveGains::two_hop(
            gain_hop_icsi(h.h_sr, &h.h_ir, &h.h_si, mu)?,
            gain_hop_icsi(h.h_rd, &h.h_id, &h.h_ri, mu)?,
        ),
        SchemeConfig::Hybrid {
            csi: Csi::Statistical,
        } => EffectiveGains::two_hop(
            gain_hop_scsi(h.h_sr, &h.h_ir, &h.h_si, mu)?,
            gain_hop_scsi(h.h_rd, &h.h_id, &h.h_ri, mu)?,
        ),
    })
}
