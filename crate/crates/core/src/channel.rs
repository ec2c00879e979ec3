//! Spatially correlated Rayleigh fading at the reflective surface.
//!
//! Vector channels are drawn as `h = √ρ · R^{1/2} · g` with `g ~ CN(0, I)` and
//! `R` the sinc correlation kernel of the unit-cell lattice. Randomness is
//! counter based: realization `i` of a run always comes from the same
//! generator stream, whichever thread evaluates it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{LinkVariances, UcGrid};
use crate::{Error, Result, C64};

/// Normalized sinc, `sin(πx)/(πx)` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
    wavelength: f64,
}

impl CorrelationMatrix {
    /// Wraps an arbitrary symmetric matrix with unit diagonal.
    pub fn from_entries(entries: DMatrix<f64>, wavelength: f64) -> Result<Self> {
        let m = entries.nrows();
        if m == 0 || entries.ncols() != m {
            return Err(Error::invalid(
                "correlation matrix must be square and non-empty",
            ));
        }
        for n in 0..m {
            if (entries[(n, n)] - 1.0).abs() > 1e-12 {
                return Err(Error::invalid("correlation matrix must have unit diagonal"));
            }
            for k in 0..n {
                if entries[(n, k)] != entries[(k, n)] {
                    return Err(Error::invalid("correlation matrix must be symmetric"));
                }
            }
        }
        Ok(Self {
            entries,
            wavelength,
        })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            entries: DMatrix::identity(m, m),
            wavelength: f64::NAN,
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `tr(R²)`, which for symmetric `R` is the sum of squared entries.
    pub fn trace_of_square(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }
}

pub fn build_correlation(grid: &UcGrid, wavelength: f64) -> Result<CorrelationMatrix> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::invalid(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    let pos = grid.positions();
    let m = pos.len();
    let mut entries = DMatrix::identity(m, m);
    for n in 0..m {
        for k in 0..n {
            let r = sinc(2.0 * (pos[n] - pos[k]).norm() / wavelength);
            entries[(n, k)] = r;
            entries[(k, n)] = r;
        }
    }
    Ok(CorrelationMatrix {
        entries,
        wavelength,
    })
}

/// Eigenvalues below `-psd_tolerance(M)` mean the kernel is genuinely indefinite.
pub fn psd_tolerance(m: usize) -> f64 {
    1e-8 * m as f64
}

/// Symmetric PSD square root via eigendecomposition, clamping tiny negative
/// eigenvalues to zero.
pub fn psd_sqrt(r: &CorrelationMatrix) -> Result<DMatrix<f64>> {
    let m = r.dim();
    let tol = psd_tolerance(m);
    let eig = SymmetricEigen::new(r.entries.clone());
    let min = eig.eigenvalues.min();
    if min < -tol {
        return Err(Error::NotPositiveSemidefinite {
            eigenvalue: min,
            tolerance: tol,
        });
    }
    let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, s) in sqrt_vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*s);
    }
    let root = &scaled * v.transpose();
    // Symmetrize away round-off.
    Ok((&root + root.transpose()) * 0.5)
}

/// One circularly-symmetric unit-variance complex Gaussian sample.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    C64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn sample_scalar_channel<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> C64 {
    standard_complex(rng) * variance.sqrt()
}

/// `√ρ · root · g` with `g ~ CN(0, I_M)`.
pub fn sample_vector_channel<R: Rng + ?Sized>(
    root: &DMatrix<f64>,
    variance: f64,
    rng: &mut R,
) -> Vec<C64> {
    let m = root.nrows();
    let mut re = DVector::zeros(m);
    let mut im = DVector::zeros(m);
    for i in 0..m {
        let g = standard_complex(rng);
        re[i] = g.re;
        im[i] = g.im;
    }
    let s = variance.sqrt();
    let cre = root * re;
    let cim = root * im;
    cre.iter()
        .zip(cim.iter())
        .map(|(&a, &b)| C64::new(a * s, b * s))
        .collect()
}

/// One coherence-interval draw of every link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_sr: C64,
    pub h_rd: C64,
    pub h_si: Vec<C64>,
    pub h_ir: Vec<C64>,
    pub h_ri: Vec<C64>,
    pub h_id: Vec<C64>,
}

impl ChannelRealization {
    pub fn dim(&self) -> usize {
        self.h_si.len()
    }

    /// Multiplies each link by the square root of its variance.
    pub fn scaled(&self, v: &LinkVariances) -> Self {
        let scale = |h: &[C64], var: f64| h.iter().map(|x| x * var.sqrt()).collect();
        Self {
            h_sr: self.h_sr * v.sr.sqrt(),
            h_rd: self.h_rd * v.rd.sqrt(),
            h_si: scale(&self.h_si, v.si),
            h_ir: scale(&self.h_ir, v.ir),
            h_ri: scale(&self.h_ri, v.ri),
            h_id: scale(&self.h_id, v.id),
        }
    }

    pub fn is_finite(&self) -> bool {
        let ok = |c: &C64| c.re.is_finite() && c.im.is_finite();
        ok(&self.h_sr)
            && ok(&self.h_rd)
            && [&self.h_si, &self.h_ir, &self.h_ri, &self.h_id]
                .iter()
                .all(|v| v.iter().all(ok))
    }
}

/// Correlation root plus per-link variances for one layout.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    root: DMatrix<f64>,
    variances: LinkVariances,
}

impl ChannelModel {
    pub fn new(correlation: &CorrelationMatrix, variances: LinkVariances) -> Result<Self> {
        Ok(Self {
            root: psd_sqrt(correlation)?,
            variances,
        })
    }

    pub fn from_root(root: DMatrix<f64>, variances: LinkVariances) -> Self {
        Self { root, variances }
    }

    pub fn dim(&self) -> usize {
        self.root.nrows()
    }

    pub fn root(&self) -> &DMatrix<f64> {
        &self.root
    }

    pub fn variances(&self) -> &LinkVariances {
        &self.variances
    }

    /// Draws every link with unit variance, so one draw can be shared by
    /// several layouts through [`ChannelRealization::scaled`].
    pub fn draw_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        // Draw order is part of the reproducibility contract.
        let h_sr = sample_scalar_channel(1.0, rng);
        let h_rd = sample_scalar_channel(1.0, rng);
        let h_si = sample_vector_channel(&self.root, 1.0, rng);
        let h_ir = sample_vector_channel(&self.root, 1.0, rng);
        let h_ri = sample_vector_channel(&self.root, 1.0, rng);
        let h_id = sample_vector_channel(&self.root, 1.0, rng);
        ChannelRealization {
            h_sr,
            h_rd,
            h_si,
            h_ir,
            h_ri,
            h_id,
        }
    }

    pub fn draw_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        self.draw_unit(rng).scaled(&self.variances)
    }
}

/// Generator for realization `index` of a run seeded with `master_seed`.
pub fn realization_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
