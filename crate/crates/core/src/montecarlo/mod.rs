//! Deterministic Monte Carlo estimation of per-user symbol error rates.
//!
//! Work is split by channel realization. Channel `c` is drawn from
//! `seed_derive(master, Channel, [c])`, its `t`-th symbol vector from
//! `seed_derive(master, Symbols, [c, t])` and the noise at SNR point `i` from
//! `seed_derive(master, Noise, [i, c, t])`. Channels and symbols are shared
//! by every SNR point and every encoder, so curves run with the same master
//! seed are paired. Counts are integers, so the reduction is exact and the
//! result is identical for any worker count.

mod config;
pub mod scaling;
pub mod scatter;

pub use config::{Encoder, ExperimentConfig, SnrPoint};

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{asymptotic_sqinr, ser_from_sqinr, sqinr};
use crate::channel::{generate_channel, ChannelMatrix};
use crate::error::{invalid, Error, Result};
use crate::mlenc::ml_encode;
use crate::precode::{mrt_precoder, zf_precoder, AdaptedSelector, Precoder, PrecoderFamily};
use crate::quantize::{quantize_one_bit, quantize_scalar, QuantizedVector};
use crate::rng::{complex_normal, rng_from_seed, seed_derive, Stream};
use crate::stats::binomial_half_width;
use crate::symbols::SymbolVector;

/// Transmit SNR and per-component receiver noise variance for one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub rho0: f64,
    pub sigma_n2: f64,
}

impl From<SnrPoint> for Link {
    fn from(p: SnrPoint) -> Self {
        Self {
            rho0: p.rho0(),
            sigma_n2: p.sigma_n2(),
        }
    }
}

/// An encoder bound to one channel realization.
#[derive(Debug)]
pub enum PreparedEncoder<'a> {
    Linear(Precoder),
    Adapted(AdaptedSelector<'a>),
    Ml {
        channel: &'a ChannelMatrix,
        max_m: usize,
    },
}

/// A transmit vector and whether the adapted precoder produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub x: QuantizedVector,
    pub adapted: bool,
}

impl<'a> PreparedEncoder<'a> {
    pub fn new(encoder: Encoder, channel: &'a ChannelMatrix, ml_max_m: usize) -> Result<Self> {
        Ok(match encoder {
            Encoder::Zf => Self::Linear(zf_precoder(channel)?),
            Encoder::Mrt => Self::Linear(mrt_precoder(channel)?),
            Encoder::AdaptedAlg1 => Self::Adapted(AdaptedSelector::new(channel)?),
            Encoder::Ml => {
                if channel.antennas() > ml_max_m {
                    return Err(Error::Capacity {
                        m: channel.antennas(),
                        max: ml_max_m,
                    });
                }
                Self::Ml {
                    channel,
                    max_m: ml_max_m,
                }
            }
        })
    }

    pub fn encode(&self, s: &SymbolVector) -> Result<Encoded> {
        match self {
            Self::Linear(p) => Ok(Encoded {
                x: quantize_one_bit(&p.precode(s))?,
                adapted: false,
            }),
            Self::Adapted(sel) => {
                let choice = sel.select(s);
                Ok(Encoded {
                    x: quantize_one_bit(&choice.x_p)?,
                    adapted: choice.family == PrecoderFamily::Adapted,
                })
            }
            Self::Ml { channel, max_m } => Ok(Encoded {
                x: ml_encode(s, channel, *max_m)?.x,
                adapted: false,
            }),
        }
    }
}

/// Adds receiver noise to `sqrt(ρ₀/M)·y` and marks users whose hard decision
/// differs from the intended symbol. `y = H x` before scaling.
fn count_decision_errors(
    y: &DVector<Complex64>,
    s: &SymbolVector,
    m: usize,
    link: Link,
    noise_seed: u64,
    out: &mut [u64],
) {
    let amp = (link.rho0 / m as f64).sqrt();
    if link.sigma_n2 == 0.0 {
        for ((e, r), sym) in out.iter_mut().zip(y.iter()).zip(s.iter()) {
            *e += u64::from(quantize_scalar(r * amp) != *sym);
        }
        return;
    }
    let sd = link.sigma_n2.sqrt();
    let mut rng = rng_from_seed(noise_seed);
    for ((e, r), sym) in out.iter_mut().zip(y.iter()).zip(s.iter()) {
        let received = r * amp + complex_normal(&mut rng) * sd;
        *e += u64::from(quantize_scalar(received) != *sym);
    }
}

/// One transmission: encode `s`, send `sqrt(ρ₀/M) H x + n`, decide by
/// quadrant. Returns `true` for each user whose decision is wrong.
pub fn run_trial(
    channel: &ChannelMatrix,
    encoder: &PreparedEncoder<'_>,
    s: &SymbolVector,
    link: Link,
    noise_seed: u64,
) -> Result<Vec<bool>> {
    if s.len() != channel.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbols for {} users",
            s.len(),
            channel.users()
        )));
    }
    if !(link.rho0 >= 0.0) || !(link.sigma_n2 >= 0.0) {
        return Err(invalid("rho0 and sigma_n2 must be non-negative"));
    }
    let x = encoder.encode(s)?.x;
    let y = channel.matrix() * x.as_vector();
    let mut errors = vec![0u64; s.len()];
    count_decision_errors(&y, s, channel.antennas(), link, noise_seed, &mut errors);
    Ok(errors.into_iter().map(|e| e > 0).collect())
}

/// Counts and predictions at one SNR point.
#[derive(Debug, Clone, PartialEq)]
pub struct SerPoint {
    pub snr: SnrPoint,
    /// Error count per user.
    pub user_errors: Vec<u64>,
    /// Symbols sent to each user.
    pub trials: u64,
    /// Mean finite-size Bussgang prediction (linear precoders only).
    pub finite_prediction: Option<f64>,
    /// Mean large-system prediction (ZF only).
    pub asymptotic_prediction: Option<f64>,
}

impl SerPoint {
    pub fn errors(&self) -> u64 {
        self.user_errors.iter().sum()
    }

    /// Pooled symbol decisions across users.
    pub fn decisions(&self) -> u64 {
        self.trials * self.user_errors.len() as u64
    }

    pub fn ser(&self) -> f64 {
        self.errors() as f64 / self.decisions() as f64
    }

    pub fn half_width(&self) -> f64 {
        binomial_half_width(self.errors(), self.decisions())
    }

    pub fn user_ser(&self, user: usize) -> f64 {
        self.user_errors[user] as f64 / self.trials as f64
    }

    pub fn user_half_width(&self, user: usize) -> f64 {
        binomial_half_width(self.user_errors[user], self.trials)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SerCurve {
    pub k: usize,
    pub m: usize,
    pub encoder: Encoder,
    pub points: Vec<SerPoint>,
    /// Symbol vectors for which the adapted precoder was chosen.
    pub adapted_selections: Option<u64>,
    pub trials: u64,
}

impl SerCurve {
    /// Fraction of symbol vectors sent with the adapted precoder.
    pub fn selection_rate(&self) -> Option<f64> {
        self.adapted_selections
            .map(|n| n as f64 / self.trials as f64)
    }
}

/// Per-point predictions for one channel realization.
#[derive(Debug, Clone)]
struct ChannelPredictions {
    channel: usize,
    finite: Vec<Option<f64>>,
    asymptotic: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
struct Tally {
    errors: Vec<u64>,
    selections: u64,
    predictions: Vec<ChannelPredictions>,
}

impl Tally {
    fn empty(len: usize) -> Self {
        Self {
            errors: vec![0; len],
            selections: 0,
            predictions: Vec::new(),
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.errors.iter_mut().zip(other.errors) {
            *a += b;
        }
        self.selections += other.selections;
        self.predictions.extend(other.predictions);
        self
    }
}

pub(crate) fn channel_seed(master: u64, channel: usize) -> u64 {
    seed_derive(master, Stream::Channel, &[channel as u64])
}

pub(crate) fn symbol_seed(master: u64, channel: usize, symbol: usize) -> u64 {
    seed_derive(master, Stream::Symbols, &[channel as u64, symbol as u64])
}

pub(crate) fn noise_seed(master: u64, point: usize, channel: usize, symbol: usize) -> u64 {
    seed_derive(
        master,
        Stream::Noise,
        &[point as u64, channel as u64, symbol as u64],
    )
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub(crate) fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(invalid("worker count must be positive")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn predictions(
    cfg: &ExperimentConfig,
    index: usize,
    channel: &ChannelMatrix,
    links: &[Link],
) -> Result<ChannelPredictions> {
    let linear = match cfg.encoder {
        Encoder::Zf => Some(zf_precoder(channel)?),
        Encoder::Mrt => Some(mrt_precoder(channel)?),
        _ => None,
    };
    let mut finite = Vec::with_capacity(links.len());
    let mut asym = Vec::with_capacity(links.len());
    for link in links {
        finite.push(match &linear {
            Some(p) => Some(sqinr(channel, p, link.rho0, link.sigma_n2)?.mean_ser()),
            None => None,
        });
        asym.push(if cfg.encoder == Encoder::Zf {
            let per_user = asymptotic_sqinr(cfg.m, channel.gains(), link.rho0, link.sigma_n2)?;
            let sum = per_user
                .into_iter()
                .map(ser_from_sqinr)
                .sum::<Result<f64>>()?;
            Some(sum / cfg.k as f64)
        } else {
            None
        });
    }
    Ok(ChannelPredictions {
        channel: index,
        finite,
        asymptotic: asym,
    })
}

fn simulate_channel(cfg: &ExperimentConfig, links: &[Link], ch: usize) -> Result<Tally> {
    let k = cfg.k;
    let channel = generate_channel(k, cfg.m, &cfg.gains, channel_seed(cfg.master_seed, ch))?;
    let encoder = PreparedEncoder::new(cfg.encoder, &channel, cfg.ml_max_m)?;
    let mut tally = Tally::empty(links.len() * k);
    for t in 0..cfg.symbols_per_channel {
        let s = SymbolVector::random(k, &mut rng_from_seed(symbol_seed(cfg.master_seed, ch, t)));
        let encoded = encoder.encode(&s)?;
        tally.selections += u64::from(encoded.adapted);
        let y = channel.matrix() * encoded.x.as_vector();
        for (i, link) in links.iter().enumerate() {
            let seed = noise_seed(cfg.master_seed, i, ch, t);
            count_decision_errors(
                &y,
                &s,
                cfg.m,
                *link,
                seed,
                &mut tally.errors[i * k..(i + 1) * k],
            );
        }
    }
    if ch < cfg.analytic_channels {
        tally
            .predictions
            .push(predictions(cfg, ch, &channel, links)?);
    }
    Ok(tally)
}

fn mean_prediction(preds: &[ChannelPredictions], point: usize, finite: bool) -> Option<f64> {
    let vals: Option<Vec<f64>> = preds
        .iter()
        .map(|p| {
            if finite {
                p.finite[point]
            } else {
                p.asymptotic[point]
            }
        })
        .collect();
    let vals = vals?;
    if vals.is_empty() {
        return None;
    }
    Some(vals.iter().sum::<f64>() / vals.len() as f64)
}

/// Estimates the per-user SER curve described by `cfg`.
pub fn estimate_ser(cfg: &ExperimentConfig) -> Result<SerCurve> {
    cfg.validate()?;
    let links: Vec<Link> = cfg.snr_points.iter().copied().map(Link::from).collect();
    let len = links.len() * cfg.k;
    let mut tally = with_workers(cfg.workers, || {
        (0..cfg.channels)
            .into_par_iter()
            .map(|ch| simulate_channel(cfg, &links, ch))
            .try_reduce(|| Tally::empty(len), |a, b| Ok(a.merge(b)))
    })??;
    // float sums in channel order so predictions do not depend on scheduling
    tally.predictions.sort_by_key(|p| p.channel);

    let trials = cfg.trials();
    let points = cfg
        .snr_points
        .iter()
        .enumerate()
        .map(|(i, snr)| SerPoint {
            snr: *snr,
            user_errors: tally.errors[i * cfg.k..(i + 1) * cfg.k].to_vec(),
            trials,
            finite_prediction: mean_prediction(&tally.predictions, i, true),
            asymptotic_prediction: mean_prediction(&tally.predictions, i, false),
        })
        .collect();
    Ok(SerCurve {
        k: cfg.k,
        m: cfg.m,
        encoder: cfg.encoder,
        points,
        adapted_selections: (cfg.encoder == Encoder::AdaptedAlg1).then_some(tally.selections),
        trials,
    })
}
