//! Empirical scaling factor of quantized ZF.

use rayon::prelude::*;

use super::{channel_seed, symbol_seed, with_workers};
use crate::analysis::asymptotic_scaling;
use crate::channel::{generate_channel, GainProfile};
use crate::error::{invalid, Result};
use crate::precode::zf_precoder;
use crate::quantize::quantize_one_bit;
use crate::rng::rng_from_seed;
use crate::symbols::{SymbolVector, SIGMA_S2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingEstimate {
    pub m: usize,
    pub simulated: f64,
    /// Large-system value `(√2/σ_s)·β`.
    pub analytic: f64,
}

impl ScalingEstimate {
    pub fn ratio(&self) -> f64 {
        self.simulated / self.analytic
    }
}

/// Mean over users and symbols of `Re(s̃_k s_k*)/σ_s` for one channel, i.e.
/// the regression gain of `s̃_k` on the unit-power symbol `s_k/σ_s`.
fn channel_gain(
    k: usize,
    m: usize,
    rho0: f64,
    master: u64,
    ch: usize,
    symbols: usize,
) -> Result<f64> {
    let h = generate_channel(k, m, &GainProfile::equal(1.0), channel_seed(master, ch))?;
    let p = zf_precoder(&h)?;
    let amp = (rho0 / m as f64).sqrt();
    let mut acc = 0.0;
    for t in 0..symbols {
        let s = SymbolVector::random(k, &mut rng_from_seed(symbol_seed(master, ch, t)));
        let x = quantize_one_bit(&p.precode(&s))?;
        let y = h.matrix() * x.as_vector();
        acc += y
            .iter()
            .zip(s.iter())
            .map(|(r, sym)| (r * sym.conj()).re)
            .sum::<f64>();
    }
    Ok(acc * amp / (SIGMA_S2.sqrt() * (k * symbols) as f64))
}

/// Simulated and large-system scaling factor for each `M` in the grid.
/// Each grid point uses its own seed subtree; channel means are summed in
/// channel order so the result does not depend on `workers`.
pub fn estimate_scaling(
    k: usize,
    m_grid: &[usize],
    channels: usize,
    symbols_per_channel: usize,
    rho0: f64,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Vec<ScalingEstimate>> {
    if channels == 0 || symbols_per_channel == 0 {
        return Err(invalid("need at least one channel and one symbol"));
    }
    if let Some(m) = m_grid.iter().find(|&&m| m <= k) {
        return Err(invalid(format!(
            "scaling needs M > K, got M = {m}, K = {k}"
        )));
    }
    let gains = vec![1.0; k];
    m_grid
        .iter()
        .map(|&m| {
            let master = master_seed ^ (m as u64).rotate_left(32);
            let per_channel = with_workers(workers, || {
                (0..channels)
                    .into_par_iter()
                    .map(|ch| channel_gain(k, m, rho0, master, ch, symbols_per_channel))
                    .collect::<Result<Vec<f64>>>()
            })??;
            let simulated = per_channel.iter().sum::<f64>() / channels as f64;
            let (_, analytic) = asymptotic_scaling(m, &gains, rho0)?;
            Ok(ScalingEstimate {
                m,
                simulated,
                analytic,
            })
        })
        .collect()
}
