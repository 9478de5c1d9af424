use std::fmt;
use std::str::FromStr;

use crate::channel::GainProfile;
use crate::error::{invalid, Error, Result};
use crate::mlenc::DEFAULT_MAX_M;

/// Which transmit-vector construction a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoder {
    /// Quantized zero-forcing.
    Zf,
    /// Quantized maximal-ratio transmission.
    Mrt,
    /// Per-symbol choice between ZF and the Bussgang-adapted precoder.
    AdaptedAlg1,
    /// Exhaustive maximum-likelihood search.
    Ml,
}

impl fmt::Display for Encoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zf => "zf",
            Self::Mrt => "mrt",
            Self::AdaptedAlg1 => "adapted",
            Self::Ml => "ml",
        })
    }
}

impl FromStr for Encoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zf" => Ok(Self::Zf),
            "mrt" => Ok(Self::Mrt),
            "adapted" | "alg1" | "adapted_alg1" => Ok(Self::AdaptedAlg1),
            "ml" => Ok(Self::Ml),
            other => Err(invalid(format!("unknown encoder '{other}'"))),
        }
    }
}

/// An operating point: transmit SNR `ρ₀` in dB with unit noise variance, or
/// no receiver noise at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrPoint {
    Noiseless,
    Db(f64),
}

impl SnrPoint {
    pub fn rho0(&self) -> f64 {
        match self {
            Self::Noiseless => 1.0,
            Self::Db(db) => 10f64.powf(db / 10.0),
        }
    }

    /// Per-component receiver noise variance.
    pub fn sigma_n2(&self) -> f64 {
        match self {
            Self::Noiseless => 0.0,
            Self::Db(_) => 1.0,
        }
    }
}

impl fmt::Display for SnrPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Noiseless => f.write_str("noiseless"),
            Self::Db(db) => write!(f, "{db}"),
        }
    }
}

/// Everything needed to reproduce one SER curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: usize,
    pub m: usize,
    pub gains: GainProfile,
    pub encoder: Encoder,
    pub snr_points: Vec<SnrPoint>,
    pub channels: usize,
    pub symbols_per_channel: usize,
    pub master_seed: u64,
    /// Thread count; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
    /// Number of leading channel realizations used for the analytic predictions.
    pub analytic_channels: usize,
    pub ml_max_m: usize,
}

impl ExperimentConfig {
    pub fn new(k: usize, m: usize, encoder: Encoder) -> Self {
        Self {
            k,
            m,
            gains: GainProfile::equal(1.0),
            encoder,
            snr_points: vec![SnrPoint::Noiseless],
            channels: 1000,
            symbols_per_channel: 100,
            master_seed: 0,
            workers: None,
            analytic_channels: 100,
            ml_max_m: DEFAULT_MAX_M,
        }
    }

    /// Symbol vectors per SNR point (`channels × symbols_per_channel`).
    pub fn trials(&self) -> u64 {
        self.channels as u64 * self.symbols_per_channel as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m {
            return Err(invalid(format!(
                "need 1 ≤ K ≤ M, got K = {}, M = {}",
                self.k, self.m
            )));
        }
        if self.trials() == 0 {
            return Err(Error::EmptyCurve);
        }
        if self.snr_points.is_empty() {
            return Err(invalid("at least one SNR point is required"));
        }
        if let Some(db) = self.snr_points.iter().find_map(|p| match p {
            SnrPoint::Db(db) if !db.is_finite() => Some(*db),
            _ => None,
        }) {
            return Err(invalid(format!("SNR {db} dB is not finite")));
        }
        if self.workers == Some(0) {
            return Err(invalid("worker count must be positive"));
        }
        if self.encoder == Encoder::Ml && self.m > self.ml_max_m {
            return Err(Error::Capacity {
                m: self.m,
                max: self.ml_max_m,
            });
        }
        Ok(())
    }
}
