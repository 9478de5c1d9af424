//! Closed-form performance predictions.
//!
//! Powers are complex (total) powers: `|x_i|² = 2` per antenna and the
//! receiver noise `n_k` has variance `σ_n²` in each of its real and imaginary
//! parts, i.e. total power `2σ_n²`. Under this convention the finite-size
//! Bussgang SQINR and the large-system formulas below share the same noise
//! term.

use std::f64::consts::{FRAC_2_PI, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{invalid, Error, Result};
use crate::precode::Precoder;
use crate::quantize::{
    bussgang_gain, normalized_precoder, received_quant_noise_diag, BussgangStats,
};
use crate::symbols::SIGMA_S2;

/// Gaussian upper-tail probability `Q(x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Nearest-neighbour QPSK symbol error approximation `min(1, 2Q(√sqinr))`.
pub fn ser_from_sqinr(sqinr: f64) -> Result<f64> {
    if !(sqinr >= 0.0) {
        return Err(invalid(format!("SQINR {sqinr} must be non-negative")));
    }
    Ok((2.0 * q_function(sqinr.sqrt())).min(1.0))
}

/// Effective gain `G = H F P = sqrt(4/π)/σ_s · H A`.
pub fn effective_gain(h: &ChannelMatrix, p: &Precoder) -> Result<DMatrix<Complex64>> {
    check_dims(h, p)?;
    let a = normalized_precoder(p.matrix())?;
    Ok(h.matrix() * a * Complex64::from(bussgang_gain()))
}

fn check_dims(h: &ChannelMatrix, p: &Precoder) -> Result<()> {
    let (m, k) = p.matrix().shape();
    if m != h.antennas() || k != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "precoder is {m}×{k} but channel is {}×{}",
            h.users(),
            h.antennas()
        )));
    }
    Ok(())
}

/// Power budget seen by one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserSqinr {
    pub signal: f64,
    pub interference: f64,
    pub quantization: f64,
    /// Total complex noise power `2σ_n²`.
    pub noise: f64,
    pub sqinr: f64,
    pub ser_prediction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqinrReport {
    pub users: Vec<UserSqinr>,
}

impl SqinrReport {
    pub fn mean_ser(&self) -> f64 {
        self.users.iter().map(|u| u.ser_prediction).sum::<f64>() / self.users.len() as f64
    }
}

/// Per-user SQINR of a one-bit quantized linear precoder at transmit SNR
/// `rho0` and per-component noise variance `sigma_n2`.
pub fn sqinr(h: &ChannelMatrix, p: &Precoder, rho0: f64, sigma_n2: f64) -> Result<SqinrReport> {
    if !(rho0 >= 0.0) || !(sigma_n2 >= 0.0) {
        return Err(invalid("rho0 and sigma_n2 must be non-negative"));
    }
    check_dims(h, p)?;
    let stats = BussgangStats::from_precoder(p.matrix())?;
    let g = h.matrix() * &stats.a * Complex64::from(bussgang_gain());
    let rdd = received_quant_noise_diag(h.matrix(), &stats.rqq);
    let m = h.antennas() as f64;
    let scale = rho0 / m;
    let noise = 2.0 * sigma_n2;
    let users = (0..h.users())
        .map(|k| {
            let row = g.row(k);
            let own = row[k].norm_sqr();
            let cross: f64 = row.iter().map(|z| z.norm_sqr()).sum::<f64>() - own;
            let signal = scale * own * SIGMA_S2;
            let interference = scale * cross.max(0.0) * SIGMA_S2;
            let quantization = scale * rdd[k].max(0.0);
            let denom = interference + quantization + noise;
            let sqinr = if denom > 0.0 {
                signal / denom
            } else if signal == 0.0 {
                return Err(invalid("signal and all impairments are zero"));
            } else {
                f64::INFINITY
            };
            Ok(UserSqinr {
                signal,
                interference,
                quantization,
                noise,
                sqinr,
                ser_prediction: ser_from_sqinr(sqinr)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SqinrReport { users })
}

fn check_asymptotic(m: usize, gains: &[f64]) -> Result<()> {
    if gains.is_empty() {
        return Err(invalid("at least one user gain is required"));
    }
    if gains.iter().any(|g| !(*g > 0.0)) {
        return Err(invalid("gains must be positive"));
    }
    if m < gains.len() {
        return Err(invalid(format!("M = {m} is below K = {}", gains.len())));
    }
    Ok(())
}

fn inverse_power_sum(gains: &[f64]) -> f64 {
    gains.iter().map(|g| 1.0 / (g * g)).sum()
}

/// Large-system predictions for quantized ZF.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticPrediction {
    /// Diagonal value of the symbol cross-covariance `R_s̃s → β I`.
    pub beta: f64,
    /// `(√2/σ_s) β`.
    pub scale_factor: f64,
    pub sqinr_limit: Vec<f64>,
    /// High-SNR symbol error rate per user.
    pub floor: Vec<f64>,
}

/// Returns `(β, (√2/σ_s) β)`.
pub fn asymptotic_scaling(m: usize, gains: &[f64], rho0: f64) -> Result<(f64, f64)> {
    check_asymptotic(m, gains)?;
    if !(rho0 >= 0.0) {
        return Err(invalid("rho0 must be non-negative"));
    }
    let k = gains.len() as f64;
    let m = m as f64;
    let sigma_s = SIGMA_S2.sqrt();
    let harmonic = inverse_power_sum(gains) / k;
    let beta =
        2.0 * sigma_s * rho0.sqrt() / PI.sqrt() * (m / k - 1.0) * (k / m).sqrt() / harmonic.sqrt();
    Ok((beta, std::f64::consts::SQRT_2 / sigma_s * beta))
}

/// Large-system SQINR of quantized ZF for each user.
pub fn asymptotic_sqinr(m: usize, gains: &[f64], rho0: f64, sigma_n2: f64) -> Result<Vec<f64>> {
    check_asymptotic(m, gains)?;
    if !(rho0 >= 0.0) || !(sigma_n2 >= 0.0) {
        return Err(invalid("rho0 and sigma_n2 must be non-negative"));
    }
    let k = gains.len() as f64;
    let m = m as f64;
    let inv_sum = inverse_power_sum(gains);
    let excess = m - k;
    let signal = rho0 * 4.0 * excess * excess / (m * PI * inv_sum);
    gains
        .iter()
        .map(|g| {
            let quant = rho0 * (2.0 / m) * (1.0 - FRAC_2_PI) * excess * g * g;
            let denom = quant + sigma_n2;
            if denom > 0.0 {
                Ok(signal / denom)
            } else if signal == 0.0 {
                Ok(0.0)
            } else {
                Err(invalid("SQINR is unbounded when rho0 = sigma_n2 = 0"))
            }
        })
        .collect()
}

/// High-SNR signal-to-quantization-and-interference ratio per user.
pub fn asymptotic_sqir(m: usize, gains: &[f64]) -> Result<Vec<f64>> {
    check_asymptotic(m, gains)?;
    let k = gains.len() as f64;
    let load = m as f64 / k - 1.0;
    let inv_sum = inverse_power_sum(gains);
    Ok(gains
        .iter()
        .map(|g| FRAC_2_PI * load / ((1.0 - FRAC_2_PI) * (g * g / k) * inv_sum))
        .collect())
}

/// High-SNR symbol error floor of quantized ZF per user.
pub fn error_floor(m: usize, gains: &[f64]) -> Result<Vec<f64>> {
    asymptotic_sqir(m, gains)?
        .into_iter()
        .map(ser_from_sqinr)
        .collect()
}

/// All large-system quantities at once.
pub fn asymptotic_prediction(
    m: usize,
    gains: &[f64],
    rho0: f64,
    sigma_n2: f64,
) -> Result<AsymptoticPrediction> {
    let (beta, scale_factor) = asymptotic_scaling(m, gains, rho0)?;
    Ok(AsymptoticPrediction {
        beta,
        scale_factor,
        sqinr_limit: asymptotic_sqinr(m, gains, rho0, sigma_n2)?,
        floor: error_floor(m, gains)?,
    })
}
