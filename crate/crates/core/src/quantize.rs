//! One-bit quantization and the Bussgang second-order statistics of a
//! quantized linear precoder.
//!
//! For a proper complex Gaussian precoded vector `x_P = P s` the one-bit
//! output decomposes as `x = F x_P + q` with `q` uncorrelated with `x_P`.
//! `F` itself is never formed; everything needed follows from the
//! row-normalized precoder `A = diag(PP^H)^{-1/2} P`:
//!
//! * `F P = sqrt(4/π) / σ_s · A`
//! * `R_xx = (4/π) [asin(Re ρ) + j asin(Im ρ)]` with `ρ = A A^H`
//! * `R_qq = R_xx − (4/π) ρ`
//!
//! These are the constants of the complex-proper arcsine law, consistent with
//! `E|x_i|² = 2` for outputs in {±1 ± j}.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::symbols::{is_qpsk, SIGMA_S2};

/// Slack allowed on `|Re ρ_ij|, |Im ρ_ij| ≤ 1` before clamping.
const CLAMP_SLACK: f64 = 1e-12;
/// Beyond this, a correlation component is reported as a domain error.
const DOMAIN_LIMIT: f64 = 1.0 + 1e-9;

/// The Bussgang gain `sqrt(4/π) / σ_s` that maps `A` to `F P`.
pub fn bussgang_gain() -> f64 {
    (4.0 / PI).sqrt() / SIGMA_S2.sqrt()
}

/// A transmit vector of one-bit DAC outputs, each in {±1 ± j}.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedVector(DVector<Complex64>);

impl QuantizedVector {
    pub fn new(entries: DVector<Complex64>) -> Result<Self> {
        if entries.iter().all(|z| is_qpsk(*z)) {
            Ok(Self(entries))
        } else {
            Err(Error::InvalidArgument(
                "entries must lie in {±1 ± j}".into(),
            ))
        }
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[inline]
fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Hard-limits one complex value; `sign(0) = +1`.
#[inline]
pub fn quantize_scalar(z: Complex64) -> Complex64 {
    Complex64::new(sign(z.re), sign(z.im))
}

/// Applies `sign(Re v) + j·sign(Im v)` entrywise. NaN inputs are rejected.
pub fn quantize_one_bit(v: &DVector<Complex64>) -> Result<QuantizedVector> {
    if let Some(index) = v.iter().position(|z| z.re.is_nan() || z.im.is_nan()) {
        return Err(Error::NonFinite { index });
    }
    Ok(QuantizedVector(v.map(quantize_scalar)))
}

/// `A = diag(PP^H)^{-1/2} P`: every row scaled to unit Euclidean norm.
pub fn normalized_precoder(p: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let mut a = p.clone();
    for (row, mut r) in a.row_iter_mut().enumerate() {
        let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::DegenerateRow { row });
        }
        r /= Complex64::from(norm);
    }
    Ok(a)
}

fn clamped_asin(x: f64) -> Result<f64> {
    if !(x.abs() <= DOMAIN_LIMIT) {
        return Err(Error::NumericalDomain { value: x });
    }
    let c = if x.abs() > 1.0 - CLAMP_SLACK && x.abs() <= 1.0 + CLAMP_SLACK {
        x.signum()
    } else {
        x.clamp(-1.0, 1.0)
    };
    Ok(c.asin())
}

/// Arcsine law for one-bit outputs of a proper complex Gaussian vector with
/// normalized covariance `rho` (unit diagonal).
pub fn rxx_arcsin(rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch("rho must be square".into()));
    }
    let scale = 4.0 / PI;
    let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
    for (dst, src) in out.iter_mut().zip(rho.iter()) {
        *dst = Complex64::new(clamped_asin(src.re)?, clamped_asin(src.im)?) * scale;
    }
    Ok(out)
}

fn rqq_from_parts(rho: &DMatrix<Complex64>, rxx: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    rxx - rho * Complex64::from(4.0 / PI)
}

/// Quantization-noise covariance `R_qq` for precoder `P`.
pub fn quant_noise_cov(p: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    Ok(BussgangStats::from_precoder(p)?.rqq)
}

/// Received quantization-noise covariance `R_dd = H R_qq H^H`.
pub fn received_quant_noise_cov(
    h: &ChannelMatrix,
    rqq: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let m = h.antennas();
    if rqq.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "R_qq is {:?} but the channel has {m} antennas",
            rqq.shape()
        )));
    }
    let hm = h.matrix();
    Ok(hm * rqq * hm.adjoint())
}

/// Diagonal of `H R_qq H^H` without forming the full K×K product.
pub(crate) fn received_quant_noise_diag(
    h: &DMatrix<Complex64>,
    rqq: &DMatrix<Complex64>,
) -> Vec<f64> {
    let rh = rqq * h.adjoint();
    (0..h.nrows())
        .map(|k| {
            h.row(k)
                .iter()
                .zip(rh.column(k).iter())
                .map(|(a, b)| a * b)
                .sum::<Complex64>()
                .re
        })
        .collect()
}

/// Second-order description of a one-bit quantized linear precoder.
#[derive(Debug, Clone)]
pub struct BussgangStats {
    /// Row-normalized precoder `A`.
    pub a: DMatrix<Complex64>,
    /// Normalized input covariance `A A^H`.
    pub rho: DMatrix<Complex64>,
    pub rxx: DMatrix<Complex64>,
    pub rqq: DMatrix<Complex64>,
    pub sigma_s2: f64,
}

impl BussgangStats {
    pub fn from_precoder(p: &DMatrix<Complex64>) -> Result<Self> {
        let a = normalized_precoder(p)?;
        let mut rho = &a * a.adjoint();
        // unit diagonal exactly; off-diagonals already Hermitian up to rounding
        for i in 0..rho.nrows() {
            rho[(i, i)] = Complex64::new(1.0, 0.0);
        }
        let rxx = rxx_arcsin(&rho)?;
        let rqq = rqq_from_parts(&rho, &rxx);
        Ok(Self {
            a,
            rho,
            rxx,
            rqq,
            sigma_s2: SIGMA_S2,
        })
    }

    /// `F P = sqrt(4/π)/σ_s · A`.
    pub fn fp(&self) -> DMatrix<Complex64> {
        &self.a * Complex64::from(bussgang_gain())
    }
}
