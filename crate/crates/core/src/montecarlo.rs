//! Paired Monte Carlo evaluation and parameter sweeps.
//!
//! Every realization index draws one set of unit-variance Gaussians that is
//! scaled for each surface placement, so all series see the same fading.
//! Realizations may run on any number of threads; results are collected in
//! index order and reduced sequentially, which makes the output independent
//! of scheduling.

use rayon::prelude::*;

use crate::channel::{
    build_correlation, psd_sqrt, realization_rng, ChannelModel, ChannelRealization,
};
use crate::geometry::{scenario_variances, side_length, Deployment, LinkVariances, PathLossModel};
use crate::linkbudget::{
    energy_efficiency, overhead_fraction, power_report, required_power, total_power, FrameParams,
    Infeasibility, IrsPlacement, PowerReport, SchemeConfig, SystemParams,
};
use crate::rbd::{effective_gains, EffectiveGains};
use crate::{watts_to_dbm, Error, Result};

/// How per-realization required powers are combined into one figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Averaging {
    /// Mean of the dBm values (geometric mean in Watts).
    #[default]
    Log,
    /// Arithmetic mean in Watts.
    Linear,
}

/// Guard interval for instantaneous designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardRule {
    /// One guard sample per unit cell.
    PerElement,
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameRule {
    pub coherence_len: u64,
    pub pilots_per_link: u64,
    pub guard: GuardRule,
}

impl FrameRule {
    pub fn at(&self, m: usize) -> FrameParams {
        FrameParams {
            coherence_len: self.coherence_len,
            pilots_per_link: self.pilots_per_link,
            guard: match self.guard {
                GuardRule::PerElement => m as u64,
                GuardRule::Fixed(g) => g,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Number of unit cells; each must be a perfect square.
    Elements(Vec<usize>),
    /// Target rate in bits/s/Hz.
    RateThreshold(Vec<f64>),
}

impl SweepAxis {
    pub fn variable(&self) -> &'static str {
        match self {
            SweepAxis::Elements(_) => "M",
            SweepAxis::RateThreshold(_) => "R_th",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Elements(v) => v.len(),
            SweepAxis::RateThreshold(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fully resolved experiment in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub deployment: Deployment,
    pub pathloss: PathLossModel,
    pub system: SystemParams,
    pub frame: FrameRule,
    pub series: Vec<SchemeConfig>,
    pub sweep: SweepAxis,
    /// Unit-cell count used when the sweep runs over the rate threshold.
    pub elements: usize,
    /// Rate threshold used when the sweep runs over the unit-cell count.
    pub rate_threshold: f64,
    pub realizations: usize,
    pub master_seed: u64,
    pub averaging: Averaging,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.pathloss.validate()?;
        self.system.validate()?;
        self.frame.at(1).validate()?;
        if self.realizations == 0 {
            return Err(Error::invalid("at least one realization is required"));
        }
        if self.series.is_empty() {
            return Err(Error::invalid("no series configured"));
        }
        if !(self.deployment.spacing > 0.0) {
            return Err(Error::invalid("unit-cell spacing must be positive"));
        }
        if !(self.deployment.wavelength > 0.0 && self.deployment.wavelength.is_finite()) {
            return Err(Error::invalid("wavelength must be positive"));
        }
        let check_m = |m: usize| {
            side_length(m)
                .map(|_| ())
                .ok_or_else(|| Error::invalid(format!("M = {m} is not a non-zero perfect square")))
        };
        match &self.sweep {
            SweepAxis::Elements(values) => {
                if values.is_empty() || values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(
                        "sweep values must be non-empty and strictly increasing",
                    ));
                }
                values.iter().try_for_each(|&m| check_m(m))?;
                if !(self.rate_threshold > 0.0 && self.rate_threshold.is_finite()) {
                    return Err(Error::invalid("rate threshold must be positive"));
                }
            }
            SweepAxis::RateThreshold(values) => {
                if values.is_empty() || values.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::invalid(
                        "sweep values must be non-empty and strictly increasing",
                    ));
                }
                if values.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
                    return Err(Error::invalid("rate thresholds must be positive"));
                }
                check_m(self.elements)?;
            }
        }
        for placement in [IrsPlacement::NearRelay, IrsPlacement::NearSource] {
            self.deployment.layout(placement)?;
        }
        Ok(())
    }
}

/// One draw, scaled for both surface placements.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRealization {
    pub near_relay: ChannelRealization,
    pub near_source: ChannelRealization,
}

impl PairedRealization {
    /// The same realization for both placements.
    pub fn shared(h: ChannelRealization) -> Self {
        Self {
            near_relay: h.clone(),
            near_source: h,
        }
    }

    pub fn for_scheme(&self, cfg: &SchemeConfig) -> &ChannelRealization {
        match cfg.placement() {
            Some(IrsPlacement::NearSource) => &self.near_source,
            _ => &self.near_relay,
        }
    }
}

/// Everything a per-realization evaluation needs besides the channels.
#[derive(Debug, Clone, Copy)]
pub struct EvalContext<'a> {
    pub frame: &'a FrameParams,
    pub m: usize,
    pub system: &'a SystemParams,
}

/// Outcome of one scheme on one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkOutcome {
    Feasible(PowerReport),
    Infeasible(Infeasibility),
}

impl LinkOutcome {
    fn from_result(r: Result<PowerReport>) -> Result<Self> {
        match r {
            Ok(report) => Ok(LinkOutcome::Feasible(report)),
            Err(e) => e.infeasibility().map(LinkOutcome::Infeasible).ok_or(e),
        }
    }

    pub fn report(&self) -> Option<&PowerReport> {
        match self {
            LinkOutcome::Feasible(r) => Some(r),
            LinkOutcome::Infeasible(_) => None,
        }
    }
}

/// Evaluates every series on one (paired) realization at one rate threshold.
pub fn evaluate_realization(
    realization: &PairedRealization,
    series: &[SchemeConfig],
    ctx: &EvalContext<'_>,
    rate_threshold: f64,
) -> Result<Vec<LinkOutcome>> {
    series
        .iter()
        .map(|cfg| {
            let h = realization.for_scheme(cfg);
            if h.dim() != ctx.m {
                return Err(Error::invalid(format!(
                    "realization has {} cells, expected {}",
                    h.dim(),
                    ctx.m
                )));
            }
            let gains = effective_gains(cfg, h, ctx.system.mu)?;
            LinkOutcome::from_result(power_report(
                cfg,
                ctx.frame,
                ctx.m,
                &gains,
                rate_threshold,
                ctx.system,
            ))
        })
        .collect()
}

/// Mean, spread and dBm value of a set of feasible samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub mean_dbm: f64,
    pub std_err: f64,
    pub count: usize,
}

fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Summarizes positive power samples in Watts; `None` when there are none.
pub fn summarize(values: &[f64], averaging: Averaging) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let count = values.len();
    Some(match averaging {
        Averaging::Linear => {
            let (mean, std_err) = mean_and_std_err(values);
            Summary {
                mean,
                mean_dbm: watts_to_dbm(mean),
                std_err,
                count,
            }
        }
        Averaging::Log => {
            let dbm: Vec<f64> = values.iter().map(|&w| watts_to_dbm(w)).collect();
            let (mean_dbm, se_db) = mean_and_std_err(&dbm);
            let mean = crate::dbm_to_watts(mean_dbm);
            // Delta method: d(gm)/d(dBm) = gm · ln10 / 10.
            Summary {
                mean,
                mean_dbm,
                std_err: mean * std::f64::consts::LN_10 / 10.0 * se_db,
                count,
            }
        }
    })
}

/// One CSV row: a series at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub series: SchemeConfig,
    pub sweep_variable: &'static str,
    pub sweep_value: f64,
    pub m: usize,
    pub rate_threshold: f64,
    /// `None` when every realization was infeasible.
    pub tx_power: Option<Summary>,
    pub mean_total_power: Option<f64>,
    pub energy_efficiency: Option<f64>,
    pub infeasible_count: usize,
    pub realizations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Series-major: all sweep points of the first series, then the next.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, series: &SchemeConfig, sweep_value: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.series == *series && r.sweep_value == sweep_value)
    }

    pub fn series_rows<'a>(
        &'a self,
        series: &'a SchemeConfig,
    ) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.series == *series)
    }
}

/// Per-realization gains of every series at one unit-cell count.
struct GainTable {
    m: usize,
    /// `gains[i][s]`: realization `i`, series `s`.
    gains: Vec<Vec<EffectiveGains>>,
}

fn placement_variances(
    config: &ExperimentConfig,
    m_d: usize,
    placement: IrsPlacement,
) -> Result<LinkVariances> {
    let layout = config.deployment.layout(placement)?;
    let grid = config.deployment.grid(m_d, placement)?;
    scenario_variances(&layout, &grid, &config.pathloss)
}

/// Draws realization `index` for both placements.
pub fn draw_paired(
    unit: &ChannelModel,
    near_relay: &LinkVariances,
    near_source: &LinkVariances,
    seed: u64,
    index: u64,
) -> PairedRealization {
    let mut rng = realization_rng(seed, index);
    let h = unit.draw_unit(&mut rng);
    PairedRealization {
        near_relay: h.scaled(near_relay),
        near_source: h.scaled(near_source),
    }
}

fn gain_table(config: &ExperimentConfig, m: usize) -> Result<GainTable> {
    let m_d =
        side_length(m).ok_or_else(|| Error::invalid(format!("M = {m} is not a perfect square")))?;
    // Correlation depends only on the lattice, not on where it is placed.
    let grid = config.deployment.grid(m_d, IrsPlacement::NearRelay)?;
    let correlation = build_correlation(&grid, config.deployment.wavelength)?;
    let unit = ChannelModel::from_root(psd_sqrt(&correlation)?, LinkVariances::UNIT);
    let near_relay = placement_variances(config, m_d, IrsPlacement::NearRelay)?;
    let near_source = placement_variances(config, m_d, IrsPlacement::NearSource)?;
    let mu = config.system.mu;

    let gains = (0..config.realizations as u64)
        .into_par_iter()
        .map(|i| {
            let pair = draw_paired(&unit, &near_relay, &near_source, config.master_seed, i);
            config
                .series
                .iter()
                .map(|cfg| effective_gains(cfg, pair.for_scheme(cfg), mu))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainTable { m, gains })
}

fn sweep_rows(
    config: &ExperimentConfig,
    table: &GainTable,
    rate_threshold: f64,
    sweep_value: f64,
    out: &mut Vec<(usize, SweepRow)>,
) -> Result<()> {
    let m = table.m;
    let frame = config.frame.at(m);
    let sys = &config.system;
    for (s, cfg) in config.series.iter().enumerate() {
        let mut powers = Vec::with_capacity(table.gains.len());
        let mut infeasible = 0;
        match overhead_fraction(cfg, &frame, m) {
            Ok(eta) => {
                for row in &table.gains {
                    match required_power(cfg, eta, &row[s], rate_threshold, sys.noise_power) {
                        Ok(p) => powers.push(p),
                        Err(e) if e.infeasibility().is_some() => infeasible += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            Err(e) if e.infeasibility().is_some() => infeasible = table.gains.len(),
            Err(e) => return Err(e),
        }
        let tx_power = summarize(&powers, config.averaging);
        let mean_total_power = tx_power.map(|t| total_power(cfg, t.mean, m, sys));
        let ee = mean_total_power
            .map(|t| energy_efficiency(rate_threshold, t, sys.bandwidth))
            .transpose()?;
        out.push((
            s,
            SweepRow {
                series: *cfg,
                sweep_variable: config.sweep.variable(),
                sweep_value,
                m,
                rate_threshold,
                tx_power,
                mean_total_power,
                energy_efficiency: ee,
                infeasible_count: infeasible,
                realizations: config.realizations,
                seed: config.master_seed,
            },
        ));
    }
    Ok(())
}

/// Runs the configured sweep. Parallelism comes from the ambient rayon pool.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let mut rows = Vec::new();
    match &config.sweep {
        SweepAxis::Elements(values) => {
            for &m in values {
                let table = gain_table(config, m)?;
                sweep_rows(config, &table, config.rate_threshold, m as f64, &mut rows)?;
            }
        }
        SweepAxis::RateThreshold(values) => {
            let table = gain_table(config, config.elements)?;
            for &r in values {
                sweep_rows(config, &table, r, r, &mut rows)?;
            }
        }
    }
    // Stable sort keeps sweep order within each series.
    rows.sort_by_key(|(s, _)| *s);
    Ok(SweepResult {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelRealization;
    use crate::config::ConfigFile;
    use crate::linkbudget::{Csi, FrameParams};
    use crate::C64;

    fn small_config(series: Vec<SchemeConfig>, realizations: usize) -> ExperimentConfig {
        let mut cfg = ConfigFile::default().to_experiment().unwrap();
        cfg.series = series;
        cfg.sweep = SweepAxis::Elements(vec![16]);
        cfg.realizations = realizations;
        cfg
    }

    fn tx(result: &SweepResult, i: usize) -> Summary {
        result.rows[i].tx_power.unwrap()
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[2.0; 5], Averaging::Linear).unwrap();
        assert_eq!((s.mean, s.std_err, s.count), (2.0, 0.0, 5));
        let s = summarize(&[2.0; 5], Averaging::Log).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-12 && s.std_err.abs() < 1e-12);
        let s = summarize(&[1.0], Averaging::Linear).unwrap();
        assert!((s.mean_dbm - 30.0).abs() < 1e-12);
        let s = summarize(&[1.0, 3.0], Averaging::Linear).unwrap();
        assert_eq!((s.mean, s.std_err), (2.0, 1.0));
        // Geometric mean under log averaging.
        let s = summarize(&[0.1, 10.0], Averaging::Log).unwrap();
        assert!((s.mean - 1.0).abs() < 1e-12);
        assert!(summarize(&[], Averaging::Log).is_none());
    }

    #[test]
    fn single_realization_matches_direct_evaluation() {
        let series = crate::config::all_series();
        let mut cfg = small_config(series.clone(), 1);
        cfg.averaging = Averaging::Linear;
        let result = run_sweep(&cfg).unwrap();

        let grid = cfg.deployment.grid(4, IrsPlacement::NearRelay).unwrap();
        let unit = ChannelModel::new(
            &build_correlation(&grid, cfg.deployment.wavelength).unwrap(),
            LinkVariances::UNIT,
        )
        .unwrap();
        let nr = placement_variances(&cfg, 4, IrsPlacement::NearRelay).unwrap();
        let ns = placement_variances(&cfg, 4, IrsPlacement::NearSource).unwrap();
        let pair = draw_paired(&unit, &nr, &ns, cfg.master_seed, 0);
        let frame = cfg.frame.at(16);
        let ctx = EvalContext {
            frame: &frame,
            m: 16,
            system: &cfg.system,
        };
        let outcomes = evaluate_realization(&pair, &series, &ctx, cfg.rate_threshold).unwrap();
        for (i, o) in outcomes.iter().enumerate() {
            let report = o.report().unwrap();
            assert_eq!(tx(&result, i).mean, report.required_tx_power);
            assert!(
                (result.rows[i].energy_efficiency.unwrap() - report.energy_efficiency).abs()
                    <= 1e-9 * report.energy_efficiency
            );
        }
    }

    #[test]
    fn earlier_realizations_unchanged_when_n_grows() {
        let series = vec![SchemeConfig::Irs {
            csi: Csi::Instantaneous,
            placement: IrsPlacement::NearSource,
        }];
        let mut cfg = small_config(series, 8);
        cfg.averaging = Averaging::Linear;
        let singles: Vec<f64> = (0..8)
            .map(|i| {
                let c = cfg.clone();
                let grid = c.deployment.grid(4, IrsPlacement::NearRelay).unwrap();
                let unit = ChannelModel::new(
                    &build_correlation(&grid, c.deployment.wavelength).unwrap(),
                    LinkVariances::UNIT,
                )
                .unwrap();
                let nr = placement_variances(&c, 4, IrsPlacement::NearRelay).unwrap();
                let ns = placement_variances(&c, 4, IrsPlacement::NearSource).unwrap();
                let pair = draw_paired(&unit, &nr, &ns, c.master_seed, i);
                let frame = c.frame.at(16);
                let ctx = EvalContext {
                    frame: &frame,
                    m: 16,
                    system: &c.system,
                };
                evaluate_realization(&pair, &c.series, &ctx, c.rate_threshold).unwrap()[0]
                    .report()
                    .unwrap()
                    .required_tx_power
            })
            .collect();
        for n in [4usize, 8] {
            cfg.realizations = n;
            let mean = tx(&run_sweep(&cfg).unwrap(), 0).mean;
            let expect = singles[..n].iter().sum::<f64>() / n as f64;
            assert!((mean - expect).abs() <= 1e-12 * expect, "n = {n}");
        }
    }

    #[test]
    fn hybrid_without_reflection_is_the_relay() {
        let mut cfg = small_config(
            vec![
                SchemeConfig::Relay,
                SchemeConfig::Hybrid {
                    csi: Csi::Statistical,
                },
            ],
            200,
        );
        cfg.system.mu = 0.0;
        let r = run_sweep(&cfg).unwrap();
        let (relay, hybrid) = (tx(&r, 0), tx(&r, 1));
        assert!((relay.mean - hybrid.mean).abs() <= 1e-12 * relay.mean);
        // Only the static surface power differs.
        let extra = r.rows[1].mean_total_power.unwrap() - r.rows[0].mean_total_power.unwrap();
        assert!((extra - 16.0 * cfg.system.p_static_uc).abs() < 1e-12);
    }

    #[test]
    fn single_cell_csi_modes_coincide() {
        let series = vec![
            SchemeConfig::Irs {
                csi: Csi::Instantaneous,
                placement: IrsPlacement::NearRelay,
            },
            SchemeConfig::Irs {
                csi: Csi::Statistical,
                placement: IrsPlacement::NearRelay,
            },
        ];
        let mut cfg = small_config(series, 100);
        cfg.sweep = SweepAxis::Elements(vec![1]);
        cfg.frame.guard = GuardRule::Fixed(0);
        let r = run_sweep(&cfg).unwrap();
        assert!((tx(&r, 0).mean - tx(&r, 1).mean).abs() <= 1e-12 * tx(&r, 0).mean);
    }

    #[test]
    fn unit_magnitude_realization() {
        let one = C64::new(1.0, 0.0);
        let v = vec![one; 4];
        let h = ChannelRealization {
            h_sr: one,
            h_rd: one,
            h_si: v.clone(),
            h_ir: v.clone(),
            h_ri: v.clone(),
            h_id: v,
        };
        let system = SystemParams {
            mu: 1.0,
            noise_power: 1.0,
            ..SystemParams::default()
        };
        let frame = FrameParams {
            coherence_len: 100,
            pilots_per_link: 1,
            guard: 0,
        };
        let ctx = EvalContext {
            frame: &frame,
            m: 4,
            system: &system,
        };
        let series = [
            SchemeConfig::Irs {
                csi: Csi::Instantaneous,
                placement: IrsPlacement::NearRelay,
            },
            SchemeConfig::Irs {
                csi: Csi::Statistical,
                placement: IrsPlacement::NearRelay,
            },
            SchemeConfig::Hybrid {
                csi: Csi::Instantaneous,
            },
            SchemeConfig::Relay,
        ];
        let out = evaluate_realization(&PairedRealization::shared(h), &series, &ctx, 1.0).unwrap();
        let p = |i: usize| out[i].report().unwrap().required_tx_power;
        // IRS: gain 16; iCSI η = 96/100, sCSI η = 99/100.
        assert!((p(0) - (2f64.powf(1.0 / 0.96) - 1.0) / 16.0).abs() < 1e-12);
        assert!((p(1) - (2f64.powf(1.0 / 0.99) - 1.0) / 16.0).abs() < 1e-12);
        // Hybrid hops: (1 + 4)² each; η = (100 - 4 - 1) / 200.
        assert!((p(2) - (2f64.powf(1.0 / 0.475) - 1.0) / 25.0).abs() < 1e-12);
        // Relay: unit gains, η = 99 / 200.
        assert!((p(3) - (2f64.powf(1.0 / 0.495) - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_frame_counts_every_realization() {
        let mut cfg = small_config(
            vec![
                SchemeConfig::Irs {
                    csi: Csi::Instantaneous,
                    placement: IrsPlacement::NearRelay,
                },
                SchemeConfig::Relay,
            ],
            10,
        );
        cfg.frame.coherence_len = 20;
        let r = run_sweep(&cfg).unwrap();
        assert_eq!(r.rows[0].infeasible_count, 10);
        assert!(r.rows[0].tx_power.is_none() && r.rows[0].energy_efficiency.is_none());
        assert_eq!(r.rows[1].infeasible_count, 0);
    }

    #[test]
    fn rows_are_series_major() {
        let mut cfg = small_config(
            vec![
                SchemeConfig::Relay,
                SchemeConfig::Hybrid {
                    csi: Csi::Statistical,
                },
            ],
            5,
        );
        cfg.sweep = SweepAxis::Elements(vec![4, 16]);
        let r = run_sweep(&cfg).unwrap();
        let keys: Vec<_> = r
            .rows
            .iter()
            .map(|row| (row.series.scheme_label(), row.sweep_value))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("relay", 4.0),
                ("relay", 16.0),
                ("hybrid", 4.0),
                ("hybrid", 16.0)
            ]
        );
        assert!(r.row(&SchemeConfig::Relay, 16.0).is_some());
        assert_eq!(r.series_rows(&SchemeConfig::Relay).count(), 2);
    }

    #[test]
    fn statistical_gain_mean_matches_trace() {
        let cfg = small_config(vec![], 1);
        let grid = cfg.deployment.grid(4, IrsPlacement::NearRelay).unwrap();
        let r = build_correlation(&grid, cfg.deployment.wavelength).unwrap();
        let unit = ChannelModel::new(&r, LinkVariances::UNIT).unwrap();
        let n = 20_000;
        let mean = (0..n)
            .map(|i| {
                let h = unit.draw_unit(&mut realization_rng(9, i));
                crate::rbd::gain_irs_scsi(&h.h_id, &h.h_si, 0.9).unwrap()
            })
            .sum::<f64>()
            / n as f64;
        let expect = 0.81 * r.trace_of_square();
        assert!(
            ((mean - expect) / expect).abs() < 0.03,
            "{mean} vs {expect}"
        );
    }
}
