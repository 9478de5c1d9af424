//! Linear precoders: zero-forcing, maximal-ratio transmission and the
//! Bussgang-adapted variant `H† D` with its per-symbol selection rule.

use std::cell::OnceCell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::quantize::quantize_scalar;
use crate::symbols::SymbolVector;

/// Smallest accepted ratio between the extreme singular values of a precoder.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecoderFamily {
    Zf,
    Mrt,
    Adapted,
}

/// An M×K linear precoder of full column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    matrix: DMatrix<Complex64>,
    family: PrecoderFamily,
}

impl Precoder {
    pub fn new(matrix: DMatrix<Complex64>, family: PrecoderFamily) -> Result<Self> {
        let (m, k) = matrix.shape();
        if k == 0 || k > m {
            return Err(Error::DimensionMismatch(format!(
                "precoder must be M×K with 1 ≤ K ≤ M, got {m}×{k}"
            )));
        }
        // singular values of P equal those of R in P = QR
        let sv = matrix.clone().qr().r().singular_values();
        let max = sv.max();
        let min = sv.min();
        let ratio = if max > 0.0 { min / max } else { 0.0 };
        if !(ratio > RANK_TOLERANCE) {
            return Err(Error::RankDeficientPrecoder { ratio });
        }
        Ok(Self { matrix, family })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn family(&self) -> PrecoderFamily {
        self.family
    }

    /// The unquantized precoded vector `x_P = P s`.
    pub fn precode(&self, s: &SymbolVector) -> DVector<Complex64> {
        &self.matrix * s.as_vector()
    }
}

/// `H† = H^H (H H^H)^{-1}`, via a Cholesky solve on the Gram matrix.
fn pseudo_inverse(h: &ChannelMatrix) -> Result<DMatrix<Complex64>> {
    let hm = h.matrix();
    let gram = hm * hm.adjoint();
    let chol = gram.cholesky().ok_or(Error::SingularChannel)?;
    // P^H = (H H^H)^{-1} H
    Ok(chol.solve(hm).adjoint())
}

/// Zero-forcing precoder `P = H^H (H H^H)^{-1}`, so that `H P = I_K`.
pub fn zf_precoder(h: &ChannelMatrix) -> Result<Precoder> {
    let p = pseudo_inverse(h)?;
    Precoder::new(p, PrecoderFamily::Zf).map_err(|e| match e {
        Error::RankDeficientPrecoder { .. } => Error::SingularChannel,
        other => other,
    })
}

/// Maximal-ratio transmission: `P = H^H` with unit-norm columns.
pub fn mrt_precoder(h: &ChannelMatrix) -> Result<Precoder> {
    let mut p = h.matrix().adjoint();
    for (k, mut col) in p.column_iter_mut().enumerate() {
        let norm = col.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidArgument(format!("channel row {k} is zero")));
        }
        col /= Complex64::from(norm);
    }
    Precoder::new(p, PrecoderFamily::Mrt)
}

/// Least-squares solution of `T̃ d² ≈ 1_M` with `T̃_ik = |t_ik|²`, `T = H†`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedDiagonal {
    /// The unconstrained least-squares `d_k²`; entries may be non-positive.
    pub d2: Vec<f64>,
    /// `sqrt(max(d_k², 0))`.
    pub d: Vec<f64>,
    /// `‖T̃ d² − 1_M‖₂`.
    pub residual: f64,
    /// Whether every `d_k²` is strictly positive.
    pub feasible: bool,
}

fn squared_magnitudes(t: &DMatrix<Complex64>) -> DMatrix<f64> {
    t.map(|z| z.norm_sqr())
}

fn ls_residual(t_tilde: &DMatrix<f64>, d2: &DVector<f64>) -> f64 {
    (t_tilde * d2).map(|v| v - 1.0).norm()
}

/// Residual `‖T̃ d² − 1_M‖₂` for an arbitrary candidate `d²`.
pub fn adapted_residual(h: &ChannelMatrix, d2: &[f64]) -> Result<f64> {
    if d2.len() != h.users() {
        return Err(Error::DimensionMismatch(
            "one d² entry per user is required".into(),
        ));
    }
    let t_tilde = squared_magnitudes(&pseudo_inverse(h)?);
    Ok(ls_residual(&t_tilde, &DVector::from_column_slice(d2)))
}

/// Solves the normal equations `(T̃ᵀT̃) d² = T̃ᵀ 1_M`.
pub fn adapted_diagonal(h: &ChannelMatrix) -> Result<AdaptedDiagonal> {
    let t = pseudo_inverse(h)?;
    adapted_from_pinv(&t)
}

fn adapted_from_pinv(t: &DMatrix<Complex64>) -> Result<AdaptedDiagonal> {
    let t_tilde = squared_magnitudes(t);
    let normal = t_tilde.transpose() * &t_tilde;
    let rhs = t_tilde.transpose() * DVector::from_element(t_tilde.nrows(), 1.0);
    let d2 = normal
        .cholesky()
        .ok_or(Error::DegenerateGeometry)?
        .solve(&rhs);
    if d2.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateGeometry);
    }
    let residual = ls_residual(&t_tilde, &d2);
    let feasible = d2.iter().all(|v| *v > 0.0);
    Ok(AdaptedDiagonal {
        d: d2.iter().map(|v| v.max(0.0).sqrt()).collect(),
        d2: d2.as_slice().to_vec(),
        residual,
        feasible,
    })
}

/// Number of users whose noiseless decision `Q(H Q(x_P))_k` differs from `s_k`.
pub fn noiseless_errors(h: &ChannelMatrix, x_p: &DVector<Complex64>, s: &SymbolVector) -> usize {
    let x = x_p.map(quantize_scalar);
    let y = h.matrix() * x;
    y.iter()
        .zip(s.iter())
        .filter(|(r, sym)| quantize_scalar(**r) != **sym)
        .count()
}

/// Outcome of the per-symbol selection between ZF and the adapted precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub family: PrecoderFamily,
    /// The unquantized precoded vector for the chosen precoder.
    pub x_p: DVector<Complex64>,
}

/// Per-channel state for the adapted selection rule. The ZF precoder is
/// built eagerly; `D` is solved the first time a symbol vector needs it and
/// then reused for the rest of the channel realization.
#[derive(Debug)]
pub struct AdaptedSelector<'a> {
    channel: &'a ChannelMatrix,
    zf: Precoder,
    adapted: OnceCell<Option<Precoder>>,
}

impl<'a> AdaptedSelector<'a> {
    pub fn new(channel: &'a ChannelMatrix) -> Result<Self> {
        Ok(Self {
            channel,
            zf: zf_precoder(channel)?,
            adapted: OnceCell::new(),
        })
    }

    pub fn zf(&self) -> &Precoder {
        &self.zf
    }

    /// `H† D` when `D` is feasible, `None` when the selector falls back to ZF.
    pub fn adapted(&self) -> Option<&Precoder> {
        self.adapted
            .get_or_init(|| {
                let diag = adapted_from_pinv(self.zf.matrix()).ok()?;
                if !diag.feasible {
                    return None;
                }
                let mut p = self.zf.matrix().clone();
                for (mut col, d) in p.column_iter_mut().zip(diag.d.iter()) {
                    col *= Complex64::from(*d);
                }
                Precoder::new(p, PrecoderFamily::Adapted).ok()
            })
            .as_ref()
    }

    /// Chooses ZF unless it fails noiselessly and `H† D` makes strictly fewer
    /// noiseless errors.
    pub fn select(&self, s: &SymbolVector) -> Selection {
        let zf_xp = self.zf.precode(s);
        let zf_errors = noiseless_errors(self.channel, &zf_xp, s);
        if zf_errors == 0 {
            return Selection {
                family: PrecoderFamily::Zf,
                x_p: zf_xp,
            };
        }
        if let Some(adapted) = self.adapted() {
            let xp = adapted.precode(s);
            if noiseless_errors(self.channel, &xp, s) < zf_errors {
                return Selection {
                    family: PrecoderFamily::Adapted,
                    x_p: xp,
                };
            }
        }
        Selection {
            family: PrecoderFamily::Zf,
            x_p: zf_xp,
        }
    }
}

/// Bussgang-adapted precoding for a single symbol vector: returns the chosen
/// precoder and `x_P = P s`.
pub fn algorithm1_select(
    s: &SymbolVector,
    h: &ChannelMatrix,
) -> Result<(Precoder, DVector<Complex64>)> {
    if s.len() != h.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols for {} users",
            s.len(),
            h.users()
        )));
    }
    let selector = AdaptedSelector::new(h)?;
    let Selection { family, x_p } = selector.select(s);
    let p = match family {
        PrecoderFamily::Adapted => selector
            .adapted()
            .cloned()
            .expect("adapted precoder was selected"),
        _ => selector.zf.clone(),
    };
    Ok((p, x_p))
}
