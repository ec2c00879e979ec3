//! Independent cross-checks: closed-form ergodic SNRs, random and exhaustive
//! phase searches, and a grid search over the two-hop power split.
//!
//! Nothing here reuses the gain formulas from [`crate::rbd`]; each check
//! evaluates the raw SNR expression directly.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;

use crate::channel::{
    realization_rng, sample_scalar_channel, sample_vector_channel, CorrelationMatrix,
};
use crate::rbd::ReflectionConfig;
use crate::{Error, Result, C64};

/// Largest surface the exhaustive phase search accepts.
pub const BRUTE_FORCE_MAX_M: usize = 4;
/// Largest per-cell phase grid the exhaustive search accepts.
pub const BRUTE_FORCE_MAX_K: usize = 16;

/// `tr(R Θ R Θᴴ)` for diagonal `Θ`, returned as a complex number so callers
/// can confirm the imaginary part vanishes.
pub fn trace_r_theta(r: &CorrelationMatrix, theta: &ReflectionConfig) -> Result<C64> {
    let m = r.dim();
    if theta.len() != m {
        return Err(Error::invalid(format!(
            "reflection config has {} cells, correlation {m}",
            theta.len()
        )));
    }
    let e = r.entries();
    let t = theta.coefficients();
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..m {
        for k in 0..m {
            acc += e[(n, k)] * t[k] * e[(k, n)] * t[n].conj();
        }
    }
    Ok(acc)
}

/// Expected SNR of the surface-only link, `(P/σ²) ρ_ID ρ_SI tr(RΘRΘᴴ)`.
pub fn ergodic_snr_irs(
    power: f64,
    noise_power: f64,
    rho_id: f64,
    rho_si: f64,
    r: &CorrelationMatrix,
    theta: &ReflectionConfig,
) -> Result<f64> {
    Ok(power / noise_power * rho_id * rho_si * trace_r_theta(r, theta)?.re)
}

/// Expected SNR of one hybrid hop, `(P/σ²)(ρ_direct + ρ_out ρ_in tr(RΘRΘᴴ))`.
pub fn ergodic_snr_hrn_hop(
    power: f64,
    noise_power: f64,
    rho_direct: f64,
    rho_out: f64,
    rho_in: f64,
    r: &CorrelationMatrix,
    theta: &ReflectionConfig,
) -> Result<f64> {
    Ok(power / noise_power * (rho_direct + rho_out * rho_in * trace_r_theta(r, theta)?.re))
}

/// Largest `tr(RΘRΘᴴ)` over `trials` random unit-modulus phase vectors with
/// amplitude `mu`. Should never exceed `μ² tr(R²)`.
pub fn scsi_optimality_check<R: Rng + ?Sized>(
    r: &CorrelationMatrix,
    mu: f64,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let m = r.dim();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..trials {
        let phases = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
        let theta = ReflectionConfig::new(vec![mu; m], phases)?;
        best = best.max(trace_r_theta(r, &theta)?.re);
    }
    Ok(best)
}

/// `|direct + Σ_m μ h_out,m h_in,m e^{jθ_m}|²` evaluated term by term.
fn composite_snr(direct: C64, h_out: &[C64], h_in: &[C64], mu: f64, phases: &[f64]) -> f64 {
    let mut acc = direct;
    for ((o, i), &p) in h_out.iter().zip(h_in).zip(phases) {
        acc += o * i * C64::from_polar(mu, p);
    }
    acc.norm_sqr()
}

/// Best composite gain over the `K^M` phase grid `θ_m ∈ {2πj/K}`.
pub fn brute_force_icsi(
    direct: C64,
    h_out: &[C64],
    h_in: &[C64],
    mu: f64,
    grid: usize,
) -> Result<f64> {
    let m = h_out.len();
    if h_in.len() != m {
        return Err(Error::invalid("channel vectors differ in length"));
    }
    if m > BRUTE_FORCE_MAX_M || grid > BRUTE_FORCE_MAX_K || grid == 0 {
        return Err(Error::OracleRefused(format!(
            "exhaustive search limited to M <= {BRUTE_FORCE_MAX_M}, 1 <= K <= {BRUTE_FORCE_MAX_K} (got M = {m}, K = {grid})"
        )));
    }
    let step = TAU / grid as f64;
    let mut digits = vec![0usize; m];
    let mut phases = vec![0.0; m];
    let mut best = f64::NEG_INFINITY;
    loop {
        for (p, d) in phases.iter_mut().zip(&digits) {
            *p = *d as f64 * step;
        }
        best = best.max(composite_snr(direct, h_out, h_in, mu, &phases));
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(best);
            }
            digits[pos] += 1;
            if digits[pos] < grid {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Slack allowed between a grid optimum and the continuous one.
pub fn brute_force_resolution_bound(h_out: &[C64], h_in: &[C64], mu: f64, grid: usize) -> f64 {
    let s: f64 = h_out.iter().zip(h_in).map(|(o, i)| (o * i).norm()).sum();
    2.0 * mu * s * (std::f64::consts::PI / grid as f64)
}

/// Grid search over `P₁ ∈ [0, 2P]` (with `P₂ = 2P − P₁`) maximizing the
/// weaker hop SNR. Returns `(best P₁, best min-SNR)`.
pub fn power_split_oracle(
    beta1: f64,
    beta2: f64,
    power: f64,
    noise_power: f64,
    grid: usize,
) -> Result<(f64, f64)> {
    if !(beta1 > 0.0 && beta2 > 0.0) {
        return Err(Error::invalid("hop gains must be positive"));
    }
    if grid < 2 {
        return Err(Error::invalid("power grid needs at least two points"));
    }
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..grid {
        let p1 = 2.0 * power * j as f64 / (grid - 1) as f64;
        let p2 = 2.0 * power - p1;
        let snr = (p1 * beta1).min(p2 * beta2) / noise_power;
        if snr > best.1 {
            best = (p1, snr);
        }
    }
    Ok(best)
}

/// Grid-resolution slack of [`power_split_oracle`].
pub fn power_split_resolution_bound(
    beta1: f64,
    beta2: f64,
    power: f64,
    noise_power: f64,
    grid: usize,
) -> f64 {
    beta1.max(beta2) / noise_power * 2.0 * power / (grid - 1) as f64
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}: measured {:.6e} (tolerance {:.3e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

fn within(name: impl Into<String>, measured: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        measured,
        tolerance,
        passed: measured.is_finite() && measured <= tolerance,
    }
}

fn violations(name: impl Into<String>, count: usize) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        measured: count as f64,
        tolerance: 0.0,
        passed: count == 0,
    }
}

/// Monte Carlo mean of `|μ h_IDᵀ h_SI|²` against `ρ_ID ρ_SI μ² tr(R²)`.
/// Returns `(empirical, analytical)`; both exclude the common `P/σ²`.
pub fn irs_trace_agreement(
    r: &CorrelationMatrix,
    root: &DMatrix<f64>,
    rho_id: f64,
    rho_si: f64,
    mu: f64,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let theta = ReflectionConfig::uniform(r.dim(), mu)?;
    let formula = ergodic_snr_irs(1.0, 1.0, rho_id, rho_si, r, &theta)?;
    let mut acc = 0.0;
    for i in 0..n as u64 {
        let mut rng = realization_rng(seed, i);
        let h_si = sample_vector_channel(root, rho_si, &mut rng);
        let h_id = sample_vector_channel(root, rho_id, &mut rng);
        let phases = vec![0.0; r.dim()];
        acc += composite_snr(C64::new(0.0, 0.0), &h_id, &h_si, mu, &phases);
    }
    Ok((acc / n as f64, formula))
}

/// Monte Carlo mean of `|h_direct + μ h_outᵀ h_in|²` against
/// `ρ_direct + ρ_out ρ_in μ² tr(R²)`.
#[allow(clippy::too_many_arguments)]
pub fn hrn_trace_agreement(
    r: &CorrelationMatrix,
    root: &DMatrix<f64>,
    rho_direct: f64,
    rho_out: f64,
    rho_in: f64,
    mu: f64,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let theta = ReflectionConfig::uniform(r.dim(), mu)?;
    let formula = ergodic_snr_hrn_hop(1.0, 1.0, rho_direct, rho_out, rho_in, r, &theta)?;
    let mut acc = 0.0;
    for i in 0..n as u64 {
        let mut rng = realization_rng(seed, i);
        let direct = sample_scalar_channel(rho_direct, &mut rng);
        let h_in = sample_vector_channel(root, rho_in, &mut rng);
        let h_out = sample_vector_channel(root, rho_out, &mut rng);
        let phases = vec![0.0; r.dim()];
        acc += composite_snr(direct, &h_out, &h_in, mu, &phases);
    }
    Ok((acc / n as f64, formula))
}

/// Closed-form instantaneous phases against the exhaustive grid on random
/// small hops. Counts realizations where the closed form loses by more than
/// the resolution bound.
pub fn brute_force_suite(
    sizes: &[usize],
    grid: usize,
    realizations: usize,
    mu: f64,
    seed: u64,
) -> Result<CheckOutcome> {
    let mut bad = 0;
    for &m in sizes {
        for i in 0..realizations as u64 {
            let mut rng = realization_rng(seed ^ m as u64, i);
            let direct = sample_scalar_channel(1.0, &mut rng);
            let identity = DMatrix::identity(m, m);
            let h_out = sample_vector_channel(&identity, 1.0, &mut rng);
            let h_in = sample_vector_channel(&identity, 1.0, &mut rng);
            let closed = crate::rbd::icsi_phases_cascade(&h_out, &h_in, Some(direct), mu)?;
            let closed_snr = composite_snr(direct, &h_out, &h_in, mu, closed.phases());
            let grid_best = brute_force_icsi(direct, &h_out, &h_in, mu, grid)?;
            if closed_snr
                < grid_best - brute_force_resolution_bound(&h_out, &h_in, mu, grid) - 1e-12
            {
                bad += 1;
            }
        }
    }
    Ok(violations(
        format!("closed-form phases vs {grid}-point grid, M in {sizes:?}"),
        bad,
    ))
}

/// Equal-SNR split against a grid search on random gain pairs.
pub fn power_split_suite(pairs: usize, grid: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = realization_rng(seed, 0);
    let mut bad = 0;
    for _ in 0..pairs {
        let b1 = 10f64.powf(rng.random_range(-12.0..-6.0));
        let b2 = 10f64.powf(rng.random_range(-12.0..-6.0));
        let p = 10f64.powf(rng.random_range(-3.0..1.0));
        let sigma = 2e-14;
        let closed = 2.0 * p * b1 * b2 / ((b1 + b2) * sigma);
        let (_, grid_best) = power_split_oracle(b1, b2, p, sigma, grid)?;
        let bound = power_split_resolution_bound(b1, b2, p, sigma, grid);
        // Closed form is the optimum and the grid gets within its resolution.
        if closed < grid_best * (1.0 - 1e-12) || grid_best < closed - bound {
            bad += 1;
        }
    }
    Ok(violations(
        format!("equal-SNR split vs {grid}-point grid"),
        bad,
    ))
}

/// Random phase configurations never beat `Θ = μI` on the ergodic objective.
pub fn scsi_suite(
    r: &CorrelationMatrix,
    mu: f64,
    trials: usize,
    seed: u64,
) -> Result<CheckOutcome> {
    let best = scsi_optimality_check(r, mu, trials, &mut realization_rng(seed, 0))?;
    let bound = mu * mu * r.trace_of_square();
    // Reported as the excess over the bound.
    Ok(CheckOutcome {
        name: format!(
            "random phases vs mu^2 tr(R^2), M = {}, {trials} trials",
            r.dim()
        ),
        measured: best - bound,
        tolerance: 1e-9,
        passed: best <= bound + 1e-9,
    })
}

/// Relative error check helper for trace agreements.
pub fn relative_check(
    name: impl Into<String>,
    empirical: f64,
    analytical: f64,
    tolerance: f64,
) -> CheckOutcome {
    within(
        name,
        ((empirical - analytical) / analytical).abs(),
        tolerance,
    )
}
