//! Noiseless received constellations under quantized ZF.

use num_complex::Complex64;

use super::channel_seed;
use crate::channel::{generate_channel, GainProfile};
use crate::error::{invalid, Error, Result};
use crate::precode::zf_precoder;
use crate::quantize::quantize_one_bit;
use crate::symbols::SymbolVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint {
    pub m: usize,
    pub user: usize,
    /// Noiseless received value `s̃_k`.
    pub received: Complex64,
    pub intended: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScatterCapture {
    pub points: Vec<ScatterPoint>,
}

impl ScatterCapture {
    pub fn for_antennas(&self, m: usize) -> impl Iterator<Item = &ScatterPoint> {
        self.points.iter().filter(move |p| p.m == m)
    }
}

/// Records `sqrt(ρ₀/M)·H·Q(P s)` for every user, antenna count and channel.
/// Channel `c` at `M` antennas is drawn from the seed tree at `[M, c]`.
pub fn capture_scatter(
    m_list: &[usize],
    s: &SymbolVector,
    channels: usize,
    rho0: f64,
    master_seed: u64,
) -> Result<ScatterCapture> {
    let k = s.len();
    if k == 0 {
        return Err(invalid("symbol vector is empty"));
    }
    if !(rho0 >= 0.0) || !rho0.is_finite() {
        return Err(invalid("rho0 must be finite and non-negative"));
    }
    let profile = GainProfile::equal(1.0);
    let mut points = Vec::with_capacity(m_list.len() * channels * k);
    for &m in m_list {
        let amp = (rho0 / m as f64).sqrt();
        for c in 0..channels {
            let seed = channel_seed(master_seed ^ (m as u64).rotate_left(32), c);
            let h = generate_channel(k, m, &profile, seed)?;
            let x = quantize_one_bit(&zf_precoder(&h)?.precode(s))?;
            let y = h.matrix() * x.as_vector() * Complex64::new(amp, 0.0);
            for (user, (r, sym)) in y.iter().zip(s.iter()).enumerate() {
                if !r.is_finite() {
                    return Err(Error::NonFinite { index: user });
                }
                points.push(ScatterPoint {
                    m,
                    user,
                    received: *r,
                    intended: *sym,
                });
            }
        }
    }
    Ok(ScatterCapture { points })
}
