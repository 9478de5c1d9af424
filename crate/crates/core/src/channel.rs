//! Random downlink channels `H = Diag(σ_1..σ_K) · H̃`.
//!
//! Entries of `H̃` have independent standard-normal real and imaginary parts,
//! so `E|h̃_ij|² = 2`. The asymptotic formulas in [`crate::analysis`] rely on
//! this per-component unit variance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::rng::{complex_normal, rng_from_seed, seed_derive, Stream};

/// How the per-user path-loss amplitudes σ_k are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum GainProfile {
    /// Every user has amplitude `sigma`.
    Equal { sigma: f64 },
    /// `ln(σ_k²) ~ Normal(mu_ln, sigma_ln²)`, drawn independently per user.
    LogNormal { sigma_ln: f64, mu_ln: f64 },
    /// Fixed amplitudes, one per user.
    Explicit(Vec<f64>),
}

impl GainProfile {
    pub fn equal(sigma: f64) -> Self {
        Self::Equal { sigma }
    }

    /// Log-normal profile with `mu_ln = -sigma_ln²/2`, which gives `E[σ_k²] = 1`.
    pub fn lognormal(sigma_ln: f64) -> Self {
        Self::LogNormal {
            sigma_ln,
            mu_ln: -sigma_ln * sigma_ln / 2.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::Equal { sigma } if !(*sigma > 0.0 && sigma.is_finite()) => {
                Err(invalid(format!("gain {sigma} must be positive and finite")))
            }
            Self::LogNormal { sigma_ln, mu_ln }
                if !(*sigma_ln >= 0.0 && sigma_ln.is_finite() && mu_ln.is_finite()) =>
            {
                Err(invalid(
                    "log-normal parameters must be finite with sigma_ln >= 0",
                ))
            }
            Self::Explicit(g) => match g.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
                Some(bad) => Err(invalid(format!("gain {bad} must be positive and finite"))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// True when every user is guaranteed the same amplitude.
    pub fn is_equal(&self) -> bool {
        matches!(self, Self::Equal { .. })
    }
}

/// Samples the K per-user amplitudes σ_k for one channel realization.
pub fn sample_gains(k: usize, profile: &GainProfile, seed: u64) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(invalid("user count must be at least 1"));
    }
    profile.validate()?;
    match profile {
        GainProfile::Equal { sigma } => Ok(vec![*sigma; k]),
        GainProfile::LogNormal { sigma_ln, mu_ln } => {
            let normal = Normal::new(*mu_ln, *sigma_ln)
                .map_err(|e| invalid(format!("log-normal profile: {e}")))?;
            let mut rng = rng_from_seed(seed);
            Ok((0..k)
                .map(|_| (normal.sample(&mut rng) / 2.0).exp())
                .collect())
        }
        GainProfile::Explicit(g) => {
            if g.len() != k {
                return Err(invalid(format!(
                    "explicit profile has {} gains but K = {k}",
                    g.len()
                )));
            }
            Ok(g.clone())
        }
    }
}

/// A K×M downlink channel together with the amplitudes that scale its rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: DMatrix<Complex64>,
    gains: Vec<f64>,
}

impl ChannelMatrix {
    /// Wraps an explicit matrix. `gains` are informational and must be positive.
    pub fn from_parts(entries: DMatrix<Complex64>, gains: Vec<f64>) -> Result<Self> {
        let (k, m) = entries.shape();
        if k == 0 || m == 0 {
            return Err(invalid("channel must have at least one row and column"));
        }
        if k > m {
            return Err(invalid(format!("K = {k} exceeds M = {m}")));
        }
        if gains.len() != k {
            return Err(invalid("one gain per channel row is required"));
        }
        if gains.iter().any(|g| !(*g > 0.0)) {
            return Err(invalid("gains must be positive"));
        }
        Ok(Self { entries, gains })
    }

    /// Wraps a matrix with unit gains.
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        let k = entries.nrows();
        Self::from_parts(entries, vec![1.0; k])
    }

    pub fn users(&self) -> usize {
        self.entries.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }
}

/// Draws `H = Diag(σ) · H̃` for `K` users and `M` antennas.
pub fn generate_channel(
    k: usize,
    m: usize,
    profile: &GainProfile,
    seed: u64,
) -> Result<ChannelMatrix> {
    if k == 0 {
        return Err(invalid("user count must be at least 1"));
    }
    if k > m {
        return Err(invalid(format!("K = {k} exceeds M = {m}")));
    }
    let gains = sample_gains(k, profile, seed_derive(seed, Stream::Gains, &[]))?;
    let mut rng = rng_from_seed(seed_derive(seed, Stream::Channel, &[]));
    // row-major draw order so a row's entries come from consecutive samples
    let mut entries = DMatrix::zeros(k, m);
    for (row, sigma) in gains.iter().enumerate() {
        for col in 0..m {
            entries[(row, col)] = complex_normal(&mut rng) * *sigma;
        }
    }
    Ok(ChannelMatrix { entries, gains })
}
