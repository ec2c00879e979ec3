//! TOML experiment files.
//!
//! Every key is optional and falls back to the default deployment (1.9 GHz
//! carrier, λ/8 unit-cell spacing, nodes on a 200 m line). Unknown keys are
//! rejected. A file may be layered on top of one of the built-in presets; its
//! keys then override the preset's.
//!
//! ```toml
//! [frame]
//! coherence_samples = 1000
//!
//! [experiment]
//! sweep = "M"
//! values = [16, 64, 144]
//! series = [
//!     { scheme = "relay" },
//!     { scheme = "irs", csi = "statistical", scenario = "near-source" },
//!     { scheme = "hybrid", csi = "instantaneous" },
//! ]
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Deployment, PathLossModel, Point};
use crate::linkbudget::{Csi, IrsPlacement, SchemeConfig, SystemParams};
use crate::montecarlo::{Averaging, ExperimentConfig, FrameRule, GuardRule, SweepAxis};
use crate::{dbm_to_watts, Error, Result, SPEED_OF_LIGHT};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub geometry: GeometrySection,
    pub pathloss: PathLossSection,
    pub system: SystemSection,
    pub frame: FrameSection,
    pub experiment: ExperimentSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub source: [f64; 3],
    pub relay: [f64; 3],
    pub destination: [f64; 3],
    /// Surface position for the hybrid scheme and `near-relay` series.
    pub irs_near_relay: [f64; 3],
    pub irs_near_source: [f64; 3],
    pub irs_normal: [f64; 3],
    pub carrier_frequency_hz: f64,
    pub spacing_wavelengths: f64,
    /// Unit cells per side when the sweep runs over the rate threshold.
    pub m_d: usize,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            source: [0.0, 0.0, 0.0],
            relay: [100.0, 0.0, 0.0],
            destination: [200.0, 0.0, 0.0],
            irs_near_relay: [100.0, 2.0, 8.0],
            irs_near_source: [0.0, 2.0, 8.0],
            irs_normal: [0.0, -1.0, 0.0],
            carrier_frequency_hz: 1.9e9,
            spacing_wavelengths: 0.125,
            m_d: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossSection {
    pub reference_distance_m: f64,
    pub offset_db: f64,
    pub alpha_irs: f64,
    pub alpha_relay: f64,
}

impl Default for PathLossSection {
    fn default() -> Self {
        let m = PathLossModel::default();
        Self {
            reference_distance_m: m.reference_distance,
            offset_db: m.offset_db,
            alpha_irs: m.alpha_irs,
            alpha_relay: m.alpha_relay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    pub amplifier_efficiency: f64,
    pub p_source_mw: f64,
    pub p_relay_mw: f64,
    pub p_destination_mw: f64,
    pub p_static_uc_mw: f64,
    pub p_dynamic_uc_mw: f64,
    pub reflection_amplitude: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            noise_dbm: -107.0,
            bandwidth_hz: 10e6,
            amplifier_efficiency: 0.5,
            p_source_mw: 100.0,
            p_relay_mw: 100.0,
            p_destination_mw: 100.0,
            p_static_uc_mw: 1.0,
            p_dynamic_uc_mw: 5.0,
            reflection_amplitude: 0.9,
        }
    }
}

/// `"M"` (one guard sample per unit cell) or a fixed sample count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GuardSetting {
    Fixed(u64),
    Rule(GuardName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GuardName {
    #[serde(rename = "M")]
    PerElement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub coherence_samples: u64,
    pub pilots_per_link: u64,
    pub guard: GuardSetting,
}

impl Default for FrameSection {
    fn default() -> Self {
        Self {
            coherence_samples: 10_000,
            pilots_per_link: 1,
            guard: GuardSetting::Rule(GuardName::PerElement),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Relay,
    Irs,
    #[serde(alias = "hrn")]
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub scheme: SchemeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csi: Option<Csi>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<IrsPlacement>,
}

impl SeriesEntry {
    fn resolve(&self) -> std::result::Result<SchemeConfig, String> {
        let csi = || {
            self.csi.ok_or_else(|| {
                format!("{:?} series needs a `csi` mode", self.scheme).to_lowercase()
            })
        };
        Ok(match self.scheme {
            SchemeKind::Relay => SchemeConfig::Relay,
            SchemeKind::Irs => SchemeConfig::Irs {
                csi: csi()?,
                placement: self.scenario.unwrap_or(IrsPlacement::NearRelay),
            },
            SchemeKind::Hybrid => SchemeConfig::Hybrid { csi: csi()? },
        })
    }

    fn from_scheme(cfg: &SchemeConfig) -> Self {
        match *cfg {
            SchemeConfig::Relay => Self {
                scheme: SchemeKind::Relay,
                csi: None,
                scenario: None,
            },
            SchemeConfig::Irs { csi, placement } => Self {
                scheme: SchemeKind::Irs,
                csi: Some(csi),
                scenario: Some(placement),
            },
            SchemeConfig::Hybrid { csi } => Self {
                scheme: SchemeKind::Hybrid,
                csi: Some(csi),
                scenario: None,
            },
        }
    }
}

/// Every series: relay, surface at both placements under both CSI modes,
/// and hybrid under both CSI modes.
pub fn all_series() -> Vec<SchemeConfig> {
    use Csi::*;
    use IrsPlacement::*;
    vec![
        SchemeConfig::Relay,
        SchemeConfig::Irs {
            csi: Instantaneous,
            placement: NearRelay,
        },
        SchemeConfig::Irs {
            csi: Statistical,
            placement: NearRelay,
        },
        SchemeConfig::Irs {
            csi: Instantaneous,
            placement: NearSource,
        },
        SchemeConfig::Irs {
            csi: Statistical,
            placement: NearSource,
        },
        SchemeConfig::Hybrid { csi: Instantaneous },
        SchemeConfig::Hybrid { csi: Statistical },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "M")]
    Elements,
    #[serde(rename = "R_th")]
    RateThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingSetting {
    Log,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub sweep: SweepVariable,
    pub values: Vec<f64>,
    /// Target rate (bits/s/Hz) for unit-cell sweeps.
    pub rate_threshold: f64,
    pub realizations: usize,
    pub seed: u64,
    pub averaging: AveragingSetting,
    pub series: Vec<SeriesEntry>,
}

/// `M = m_d²` for `m_d = 4..=16`.
pub fn default_element_sweep() -> Vec<f64> {
    (4..=16).map(|m_d: u32| (m_d * m_d) as f64).collect()
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            sweep: SweepVariable::Elements,
            values: default_element_sweep(),
            rate_threshold: 3.0,
            realizations: 10_000,
            seed: 1,
            averaging: AveragingSetting::Log,
            series: all_series().iter().map(SeriesEntry::from_scheme).collect(),
        }
    }
}

/// Built-in experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Slow fading (τ_c = 10⁴), R_th = 3, sweep over M.
    Fig2a,
    /// Fast fading (τ_c = 10³), R_th = 3, sweep over M.
    Fig2b,
    /// τ_c = 10⁴, M = 144, sweep over R_th.
    Fig2c,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "fig2a" => Some(Preset::Fig2a),
            "fig2b" => Some(Preset::Fig2b),
            "fig2c" => Some(Preset::Fig2c),
            _ => None,
        }
    }

    pub fn config(self) -> ConfigFile {
        let mut cfg = ConfigFile::default();
        match self {
            Preset::Fig2a => {}
            Preset::Fig2b => cfg.frame.coherence_samples = 1000,
            Preset::Fig2c => {
                cfg.geometry.m_d = 12;
                cfg.experiment.sweep = SweepVariable::RateThreshold;
                cfg.experiment.values = (2..=48).map(|k| k as f64 * 0.25).collect();
            }
        }
        cfg
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key = ...` inside `[section]`, if the key is written out.
fn locate_key(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

fn parse_file(text: &str) -> Result<(ConfigFile, toml::Table)> {
    let to_err = |e: toml::de::Error| Error::Config {
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().to_string(),
    };
    let table: toml::Table = toml::from_str(text).map_err(to_err)?;
    let file: ConfigFile = toml::from_str(text).map_err(to_err)?;
    Ok((file, table))
}

fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

impl ConfigFile {
    /// Parses a config file on its own.
    pub fn parse(text: &str) -> Result<Self> {
        let (file, _) = parse_file(text)?;
        file.check(text)?;
        Ok(file)
    }

    /// Parses `text` layered over `preset`.
    pub fn parse_over(preset: Preset, text: &str) -> Result<Self> {
        let (_, overlay) = parse_file(text)?;
        let mut base = toml::Table::try_from(preset.config()).map_err(|e| Error::Config {
            line: None,
            message: e.to_string(),
        })?;
        merge(&mut base, overlay);
        let merged: ConfigFile = base
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config {
                line: None,
                message: e.message().to_string(),
            })?;
        merged.check(text)?;
        Ok(merged)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config {
            line: None,
            message: e.to_string(),
        })
    }

    /// Range checks; `text` is only used to point at the offending line.
    fn check(&self, text: &str) -> Result<()> {
        let fail = |section: &str, key: &str, message: String| Error::Config {
            line: locate_key(text, section, key),
            message: format!("{section}.{key}: {message}"),
        };
        let g = &self.geometry;
        for (key, p) in [
            ("source", g.source),
            ("relay", g.relay),
            ("destination", g.destination),
            ("irs_near_relay", g.irs_near_relay),
            ("irs_near_source", g.irs_near_source),
            ("irs_normal", g.irs_normal),
        ] {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(fail("geometry", key, "coordinates must be finite".into()));
            }
        }
        if g.irs_normal.iter().all(|c| *c == 0.0) {
            return Err(fail(
                "geometry",
                "irs_normal",
                "must be a non-zero vector".into(),
            ));
        }
        if !(g.carrier_frequency_hz > 0.0 && g.carrier_frequency_hz.is_finite()) {
            return Err(fail(
                "geometry",
                "carrier_frequency_hz",
                "must be positive".into(),
            ));
        }
        if !(g.spacing_wavelengths > 0.0 && g.spacing_wavelengths.is_finite()) {
            return Err(fail(
                "geometry",
                "spacing_wavelengths",
                "must be positive".into(),
            ));
        }
        if g.m_d == 0 {
            return Err(fail("geometry", "m_d", "must be at least 1".into()));
        }

        let p = &self.pathloss;
        if !(p.reference_distance_m > 0.0) {
            return Err(fail(
                "pathloss",
                "reference_distance_m",
                "must be positive".into(),
            ));
        }
        if !(p.alpha_irs > 0.0) {
            return Err(fail("pathloss", "alpha_irs", "must be positive".into()));
        }
        if !(p.alpha_relay > 0.0) {
            return Err(fail("pathloss", "alpha_relay", "must be positive".into()));
        }
        if !p.offset_db.is_finite() {
            return Err(fail("pathloss", "offset_db", "must be finite".into()));
        }

        let s = &self.system;
        if !s.noise_dbm.is_finite() {
            return Err(fail("system", "noise_dbm", "must be finite".into()));
        }
        if !(s.bandwidth_hz > 0.0 && s.bandwidth_hz.is_finite()) {
            return Err(fail("system", "bandwidth_hz", "must be positive".into()));
        }
        if !(s.amplifier_efficiency > 0.0 && s.amplifier_efficiency <= 1.0) {
            return Err(fail(
                "system",
                "amplifier_efficiency",
                format!("must lie in (0, 1], got {}", s.amplifier_efficiency),
            ));
        }
        for (key, v) in [
            ("p_source_mw", s.p_source_mw),
            ("p_relay_mw", s.p_relay_mw),
            ("p_destination_mw", s.p_destination_mw),
            ("p_static_uc_mw", s.p_static_uc_mw),
            ("p_dynamic_uc_mw", s.p_dynamic_uc_mw),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(fail("system", key, "must be non-negative".into()));
            }
        }
        if !(0.0..=1.0).contains(&s.reflection_amplitude) {
            return Err(fail(
                "system",
                "reflection_amplitude",
                "must lie in [0, 1]".into(),
            ));
        }

        let f = &self.frame;
        if f.coherence_samples == 0 {
            return Err(fail(
                "frame",
                "coherence_samples",
                "must be positive".into(),
            ));
        }
        if f.pilots_per_link == 0 {
            return Err(fail(
                "frame",
                "pilots_per_link",
                "must be at least 1".into(),
            ));
        }

        let e = &self.experiment;
        if e.values.is_empty() || e.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(fail(
                "experiment",
                "values",
                "must be non-empty and strictly increasing".into(),
            ));
        }
        match e.sweep {
            SweepVariable::Elements => {
                if let Some(bad) = e.values.iter().find(|v| {
                    !(v.fract() == 0.0
                        && **v >= 1.0
                        && crate::geometry::side_length(**v as usize).is_some())
                }) {
                    return Err(fail(
                        "experiment",
                        "values",
                        format!("{bad} is not a perfect-square unit-cell count"),
                    ));
                }
            }
            SweepVariable::RateThreshold => {
                if e.values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(fail(
                        "experiment",
                        "values",
                        "rate thresholds must be positive".into(),
                    ));
                }
            }
        }
        if !(e.rate_threshold > 0.0 && e.rate_threshold.is_finite()) {
            return Err(fail(
                "experiment",
                "rate_threshold",
                "must be positive".into(),
            ));
        }
        if e.realizations == 0 {
            return Err(fail(
                "experiment",
                "realizations",
                "must be at least 1".into(),
            ));
        }
        if e.series.is_empty() {
            return Err(fail(
                "experiment",
                "series",
                "at least one series is required".into(),
            ));
        }
        for (i, entry) in e.series.iter().enumerate() {
            entry
                .resolve()
                .map_err(|m| fail("experiment", "series", format!("entry {}: {m}", i + 1)))?;
        }
        self.to_experiment().map_err(|err| Error::Config {
            line: None,
            message: err.to_string(),
        })?;
        Ok(())
    }

    /// Converts to SI units.
    pub fn to_experiment(&self) -> Result<ExperimentConfig> {
        let g = &self.geometry;
        let pt = |a: [f64; 3]| Point::new(a[0], a[1], a[2]);
        let wavelength = SPEED_OF_LIGHT / g.carrier_frequency_hz;
        let deployment = Deployment {
            source: pt(g.source),
            relay: pt(g.relay),
            destination: pt(g.destination),
            irs_near_relay: pt(g.irs_near_relay),
            irs_near_source: pt(g.irs_near_source),
            orientation: pt(g.irs_normal),
            spacing: g.spacing_wavelengths * wavelength,
            wavelength,
        };
        let p = &self.pathloss;
        let s = &self.system;
        let mw = |v: f64| v / 1000.0;
        let e = &self.experiment;
        let series = e
            .series
            .iter()
            .map(|s| s.resolve().map_err(Error::InvalidArgument))
            .collect::<Result<Vec<_>>>()?;
        let config = ExperimentConfig {
            deployment,
            pathloss: PathLossModel {
                reference_distance: p.reference_distance_m,
                offset_db: p.offset_db,
                alpha_irs: p.alpha_irs,
                alpha_relay: p.alpha_relay,
            },
            system: SystemParams {
                noise_power: dbm_to_watts(s.noise_dbm),
                bandwidth: s.bandwidth_hz,
                amplifier_efficiency: s.amplifier_efficiency,
                p_source: mw(s.p_source_mw),
                p_relay: mw(s.p_relay_mw),
                p_dest: mw(s.p_destination_mw),
                p_static_uc: mw(s.p_static_uc_mw),
                p_dynamic_uc: mw(s.p_dynamic_uc_mw),
                mu: s.reflection_amplitude,
            },
            frame: FrameRule {
                coherence_len: self.frame.coherence_samples,
                pilots_per_link: self.frame.pilots_per_link,
                guard: match self.frame.guard {
                    GuardSetting::Fixed(n) => GuardRule::Fixed(n),
                    GuardSetting::Rule(GuardName::PerElement) => GuardRule::PerElement,
                },
            },
            series,
            sweep: match e.sweep {
                SweepVariable::Elements => {
                    SweepAxis::Elements(e.values.iter().map(|v| *v as usize).collect())
                }
                SweepVariable::RateThreshold => SweepAxis::RateThreshold(e.values.clone()),
            },
            elements: g.m_d * g.m_d,
            rate_threshold: e.rate_threshold,
            realizations: e.realizations,
            master_seed: e.seed,
            averaging: match e.averaging {
                AveragingSetting::Log => Averaging::Log,
                AveragingSetting::Linear => Averaging::Linear,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

/// Loads a config file (optionally over a preset) and resolves it.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    load(Some(path), None)
}

/// Resolves a preset, a file, or a file layered over a preset.
pub fn load(path: Option<&Path>, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let file = match (path, preset) {
        (Some(path), preset) => {
            let text = std::fs::read_to_string(path)?;
            match preset {
                Some(p) => ConfigFile::parse_over(p, &text)?,
                None => ConfigFile::parse(&text)?,
            }
        }
        (None, Some(p)) => p.config(),
        (None, None) => ConfigFile::default(),
    };
    file.to_experiment()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err_line(e: Error) -> Option<usize> {
        match e {
            Error::Config { line, .. } => line,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = ConfigFile::parse("").unwrap();
        assert_eq!(cfg, ConfigFile::default());
        let exp = cfg.to_experiment().unwrap();
        assert!((exp.system.noise_power - dbm_to_watts(-107.0)).abs() < 1e-30);
        assert_eq!(exp.system.mu, 0.9);
        assert_eq!(exp.system.bandwidth, 1e7);
        assert_eq!(exp.system.amplifier_efficiency, 0.5);
        assert_eq!(exp.system.p_source, 0.1);
        assert_eq!(exp.system.p_dynamic_uc, 0.005);
        assert_eq!(exp.system.p_static_uc, 0.001);
        assert_eq!(exp.frame.pilots_per_link, 1);
        assert_eq!(exp.frame.guard, GuardRule::PerElement);
        let lambda = SPEED_OF_LIGHT / 1.9e9;
        assert!((exp.deployment.spacing - lambda / 8.0).abs() < 1e-15);
        assert_eq!(exp.deployment.irs_near_relay, Point::new(100., 2., 8.));
        assert_eq!(exp.series.len(), 7);
    }

    #[test]
    fn empty_system_section_gives_defaults() {
        assert_eq!(
            ConfigFile::parse("[system]\n").unwrap().system,
            SystemSection::default()
        );
    }

    #[test]
    fn zero_amplifier_efficiency_rejected_with_line() {
        let text = "[system]\nnoise_dbm = -100.0\namplifier_efficiency = 0.0\n";
        let err = ConfigFile::parse(text).unwrap_err();
        assert!(err.to_string().contains("amplifier_efficiency"), "{err}");
        assert_eq!(err_line(err), Some(3));
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let text = "[system]\nnoise_dbm = -100.0\n\n[frame]\ncoherence = 5\n";
        let err = ConfigFile::parse(text).unwrap_err();
        assert!(err.to_string().contains("coherence"), "{err}");
        assert_eq!(err_line(err), Some(5));
        assert!(ConfigFile::parse("[nonsense]\n").is_err());
    }

    #[test]
    fn malformed_file_rejected() {
        let err = ConfigFile::parse("[system\nnoise_dbm = 1").unwrap_err();
        assert!(err_line(err).is_some());
        assert!(ConfigFile::parse("[system]\nnoise_dbm = \"loud\"\n").is_err());
    }

    #[test]
    fn near_source_scenario() {
        let text = "[experiment]\nseries = [{ scheme = \"irs\", csi = \"statistical\", scenario = \"NearSource\" }]\n";
        let exp = ConfigFile::parse(text).unwrap().to_experiment().unwrap();
        let cfg = exp.series[0];
        assert_eq!(
            cfg,
            SchemeConfig::Irs {
                csi: Csi::Statistical,
                placement: IrsPlacement::NearSource
            }
        );
        let layout = exp.deployment.layout(cfg.placement().unwrap()).unwrap();
        assert_eq!(layout.irs_center, Point::new(0., 2., 8.));
    }

    #[test]
    fn series_needs_csi() {
        let err =
            ConfigFile::parse("[experiment]\nseries = [{ scheme = \"hybrid\" }]\n").unwrap_err();
        assert_eq!(err_line(err), Some(2));
        // Relay ignores csi.
        let exp =
            ConfigFile::parse("[experiment]\nseries = [{ scheme = \"relay\", csi = \"icsi\" }]\n")
                .unwrap()
                .to_experiment()
                .unwrap();
        assert_eq!(exp.series, vec![SchemeConfig::Relay]);
    }

    #[test]
    fn sweep_values_validated() {
        assert!(ConfigFile::parse("[experiment]\nvalues = [16, 20]\n").is_err());
        assert!(ConfigFile::parse("[experiment]\nvalues = [64, 16]\n").is_err());
        assert!(
            ConfigFile::parse("[experiment]\nsweep = \"R_th\"\nvalues = [0.0, 1.0]\n").is_err()
        );
        let exp = ConfigFile::parse("[experiment]\nsweep = \"R_th\"\nvalues = [1, 2.5]\n")
            .unwrap()
            .to_experiment()
            .unwrap();
        assert_eq!(exp.sweep, SweepAxis::RateThreshold(vec![1.0, 2.5]));
    }

    #[test]
    fn guard_setting_forms() {
        let exp = ConfigFile::parse("[frame]\nguard = 7\n")
            .unwrap()
            .to_experiment()
            .unwrap();
        assert_eq!(exp.frame.guard, GuardRule::Fixed(7));
        let exp = ConfigFile::parse("[frame]\nguard = \"M\"\n")
            .unwrap()
            .to_experiment()
            .unwrap();
        assert_eq!(exp.frame.guard, GuardRule::PerElement);
        assert!(ConfigFile::parse("[frame]\nguard = \"N\"\n").is_err());
    }

    #[test]
    fn presets() {
        let a = Preset::Fig2a.config().to_experiment().unwrap();
        assert_eq!(a.frame.coherence_len, 10_000);
        assert_eq!(a.rate_threshold, 3.0);
        assert_eq!(
            a.sweep,
            SweepAxis::Elements((4..=16).map(|d| d * d).collect())
        );
        let b = Preset::Fig2b.config().to_experiment().unwrap();
        assert_eq!(b.frame.coherence_len, 1000);
        let c = Preset::Fig2c.config().to_experiment().unwrap();
        assert_eq!(c.elements, 144);
        assert_eq!(c.frame.coherence_len, 10_000);
        match c.sweep {
            SweepAxis::RateThreshold(v) => {
                assert_eq!(v.first(), Some(&0.5));
                assert_eq!(v.last(), Some(&12.0));
            }
            _ => panic!("fig2c sweeps the rate"),
        }
        assert_eq!(Preset::parse("fig2b"), Some(Preset::Fig2b));
        assert_eq!(Preset::parse("fig3"), None);
    }

    #[test]
    fn file_overrides_preset() {
        let cfg =
            ConfigFile::parse_over(Preset::Fig2c, "[experiment]\nrealizations = 10\n").unwrap();
        assert_eq!(cfg.experiment.realizations, 10);
        assert_eq!(cfg.experiment.sweep, SweepVariable::RateThreshold);
        assert!(ConfigFile::parse_over(Preset::Fig2a, "[experiment]\nbogus = 1\n").is_err());
    }

    #[test]
    fn resolved_round_trip() {
        let text = "[system]\nnoise_dbm = -101.3\n[frame]\nguard = 3\n[experiment]\nsweep = \"R_th\"\nvalues = [0.7, 1.9]\naveraging = \"linear\"\n";
        let first = ConfigFile::parse(text).unwrap();
        let again = ConfigFile::parse(&first.to_toml().unwrap()).unwrap();
        assert_eq!(first, again);
        assert_eq!(
            first.to_experiment().unwrap(),
            again.to_experiment().unwrap()
        );
        for preset in [Preset::Fig2a, Preset::Fig2b, Preset::Fig2c] {
            let c = preset.config();
            assert_eq!(
                ConfigFile::parse(&c.to_toml().unwrap())
                    .unwrap()
                    .to_experiment()
                    .unwrap(),
                c.to_experiment().unwrap()
            );
        }
    }
}
