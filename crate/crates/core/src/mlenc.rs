//! Exhaustive maximum-likelihood encoding over the one-bit transmit alphabet.
//!
//! Candidates are indexed lexicographically: antenna 0 is the most
//! significant base-4 digit and digit `2·re_neg + im_neg` selects from
//! `[1+j, 1−j, −1+j, −1−j]`. The search walks the 2M-bit index in reflected
//! Gray order so each step flips one real or imaginary sign, and the
//! residual `s − Hv` is updated with a single column. Ties resolve to the
//! smallest lexicographic index.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::quantize::QuantizedVector;
use crate::symbols::SymbolVector;

/// Default cap on the antenna count for exhaustive search (4^12 candidates).
pub const DEFAULT_MAX_M: usize = 12;
/// Hard ceiling on the index width.
const MAX_SUPPORTED_M: usize = 31;

#[derive(Debug, Clone, PartialEq)]
pub struct MlResult {
    pub x: QuantizedVector,
    /// `‖s − H x‖²`.
    pub objective: f64,
    pub candidates_evaluated: u64,
}

/// Maps a lexicographic candidate index to its transmit vector.
pub fn candidate(index: u64, m: usize) -> DVector<Complex64> {
    DVector::from_fn(m, |ant, _| {
        let shift = 2 * (m - 1 - ant);
        let digit = (index >> shift) & 0b11;
        let re = if digit & 0b10 != 0 { -1.0 } else { 1.0 };
        let im = if digit & 0b01 != 0 { -1.0 } else { 1.0 };
        Complex64::new(re, im)
    })
}

/// `‖s − H v‖²`.
pub fn ml_objective(s: &SymbolVector, h: &ChannelMatrix, v: &DVector<Complex64>) -> f64 {
    (s.as_vector() - h.matrix() * v).norm_squared()
}

/// Finds `argmin_v ‖s − H v‖²` over all 4^M one-bit transmit vectors.
pub fn ml_encode(s: &SymbolVector, h: &ChannelMatrix, max_m: usize) -> Result<MlResult> {
    let (k, m) = (h.users(), h.antennas());
    if s.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols for {k} users",
            s.len()
        )));
    }
    if m > max_m.min(MAX_SUPPORTED_M) {
        return Err(Error::Capacity {
            m,
            max: max_m.min(MAX_SUPPORTED_M),
        });
    }

    // column-major copy so each antenna's column is contiguous
    let cols: Vec<Complex64> = h.matrix().iter().copied().collect();
    let start = DVector::from_element(m, Complex64::new(1.0, 1.0));
    let mut resid: Vec<Complex64> = (s.as_vector() - h.matrix() * &start)
        .iter()
        .copied()
        .collect();

    let bits = 2 * m as u32;
    let total: u64 = 1u64 << bits;
    let mut gray: u64 = 0;
    let mut best_obj = resid.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut best_idx: u64 = 0;
    let mut evaluated: u64 = 1;

    for step in 1..total {
        let bit = step.trailing_zeros();
        gray ^= 1 << bit;
        let ant = m - 1 - (bit as usize / 2);
        // set bit means the component became negative: v moves by -2, else +2
        let delta = if gray & (1 << bit) != 0 { -2.0 } else { 2.0 };
        let col = &cols[ant * k..(ant + 1) * k];
        // resid = s - H v, so resid -= h_col * Δv
        let mut obj = 0.0;
        if bit % 2 == 1 {
            for (r, hc) in resid.iter_mut().zip(col) {
                *r -= hc * delta;
                obj += r.norm_sqr();
            }
        } else {
            for (r, hc) in resid.iter_mut().zip(col) {
                // Δv = j·delta
                *r -= Complex64::new(-hc.im * delta, hc.re * delta);
                obj += r.norm_sqr();
            }
        }
        evaluated += 1;
        if obj < best_obj || (obj == best_obj && gray < best_idx) {
            best_obj = obj;
            best_idx = gray;
        }
    }

    let x = candidate(best_idx, m);
    let objective = ml_objective(s, h, &x);
    Ok(MlResult {
        x: QuantizedVector::new(x)?,
        objective,
        candidates_evaluated: evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, GainProfile};
    use crate::rng::rng_from_seed;
    use crate::symbols::QPSK;
    use nalgebra::{dmatrix, DMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_instances() {
        let h = ChannelMatrix::from_matrix(dmatrix![c(1.0, 0.0)]).unwrap();
        let s = SymbolVector::new(vec![c(1.0, 1.0)]).unwrap();
        let r = ml_encode(&s, &h, DEFAULT_MAX_M).unwrap();
        assert_eq!(r.x.as_vector()[0], c(1.0, 1.0));
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.candidates_evaluated, 4);
    }

    #[test]
    fn exact_representation() {
        // H = [1, 1] with target 2+2j, scaled by 1/2 so the target is a QPSK symbol
        let h = ChannelMatrix::from_matrix(dmatrix![c(0.5, 0.0), c(0.5, 0.0)]).unwrap();
        let s = SymbolVector::new(vec![c(1.0, 1.0)]).unwrap();
        let r = ml_encode(&s, &h, DEFAULT_MAX_M).unwrap();
        assert_eq!(r.x.as_vector().as_slice(), &[c(1.0, 1.0), c(1.0, 1.0)]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn candidate_indexing_is_lexicographic() {
        assert_eq!(candidate(0, 2).as_slice(), &[QPSK[0], QPSK[0]]);
        assert_eq!(candidate(1, 2).as_slice(), &[QPSK[0], QPSK[1]]);
        assert_eq!(candidate(4, 2).as_slice(), &[QPSK[1], QPSK[0]]);
        assert_eq!(candidate(15, 2).as_slice(), &[QPSK[3], QPSK[3]]);
    }

    #[test]
    fn capacity_limit() {
        let h = generate_channel(1, 13, &GainProfile::equal(1.0), 0).unwrap();
        let s = SymbolVector::new(vec![c(1.0, 1.0)]).unwrap();
        assert_eq!(
            ml_encode(&s, &h, DEFAULT_MAX_M),
            Err(Error::Capacity { m: 13, max: 12 })
        );
    }

    #[test]
    fn visits_every_candidate() {
        let h = generate_channel(2, 5, &GainProfile::equal(1.0), 3).unwrap();
        let s = SymbolVector::new(vec![c(1.0, -1.0), c(-1.0, -1.0)]).unwrap();
        assert_eq!(
            ml_encode(&s, &h, 12).unwrap().candidates_evaluated,
            4u64.pow(5)
        );
    }

    #[test]
    fn ties_resolve_to_smallest_index() {
        // a zero column makes antenna 1 irrelevant: four-way tie on its symbol
        let h =
            ChannelMatrix::from_matrix(DMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(0.0, 0.0)]))
                .unwrap();
        let s = SymbolVector::new(vec![c(-1.0, 1.0)]).unwrap();
        let r = ml_encode(&s, &h, 12).unwrap();
        assert_eq!(r.x.as_vector().as_slice(), &[c(-1.0, 1.0), c(1.0, 1.0)]);
    }

    #[test]
    fn rotation_symmetry() {
        let mut rng = rng_from_seed(5);
        for seed in 0..20 {
            let h = generate_channel(2, 6, &GainProfile::equal(1.0), seed).unwrap();
            let s = SymbolVector::random(2, &mut rng);
            let a = ml_encode(&s, &h, 12).unwrap();
            let b = ml_encode(&s.rotate_j(), &h, 12).unwrap();
            let rotated = a.x.as_vector().map(|z| z * Complex64::i());
            assert_eq!(&rotated, b.x.as_vector());
            assert!((a.objective - b.objective).abs() < 1e-9);
        }
    }
}
