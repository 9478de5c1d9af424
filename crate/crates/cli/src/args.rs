use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use onebit_core::{GainProfile, SnrPoint};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "onebit",
    version,
    about = "Simulate one-bit quantized MU-MIMO precoding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulated vs large-system scaling factor of quantized ZF.
    FigScaling(CommonArgs),
    /// Noiseless SER of quantized ZF vs M/K.
    FigFloor(CommonArgs),
    /// SER vs SNR with finite-size and asymptotic predictions.
    FigSerSweep(CommonArgs),
    /// Paired SER of quantized ZF and exhaustive ML encoding.
    FigZfVsMl(CommonArgs),
    /// Noiseless received constellation under quantized ZF.
    FigScatter(CommonArgs),
    /// Paired SER of quantized ZF and the adapted precoder.
    FigAdapted(CommonArgs),
    /// Closed-form predictions without simulation.
    Predict(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FigScaling(_) => "fig-scaling",
            Self::FigFloor(_) => "fig-floor",
            Self::FigSerSweep(_) => "fig-ser-sweep",
            Self::FigZfVsMl(_) => "fig-zf-vs-ml",
            Self::FigScatter(_) => "fig-scatter",
            Self::FigAdapted(_) => "fig-adapted",
            Self::Predict(_) => "predict",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Self::FigScaling(a)
            | Self::FigFloor(a)
            | Self::FigSerSweep(a)
            | Self::FigZfVsMl(a)
            | Self::FigScatter(a)
            | Self::FigAdapted(a)
            | Self::Predict(a) => a,
        }
    }
}

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to per-command defaults.
#[derive(Debug, Clone, Default, Args, Deserialize, Serialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CommonArgs {
    /// User counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Antenna counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Explicit antenna grid for fig-scaling (overrides --ratios).
    #[arg(long, value_delimiter = ',')]
    pub m_grid: Option<Vec<usize>>,
    /// Integer M/K ratios, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<usize>>,
    /// SNR points in dB; `noiseless` removes receiver noise.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub snr_db: Option<Vec<String>>,
    /// equal:SIGMA | lognormal:SIGMA_LN | file:PATH
    #[arg(long)]
    pub gains: Option<String>,
    /// zf | mrt | adapted | ml
    #[arg(long)]
    pub encoder: Option<String>,
    /// Symbol vectors per SNR point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Channel realizations per SNR point.
    #[arg(long)]
    pub channels: Option<usize>,
    /// Transmit SNR (linear) used by fig-scaling and fig-scatter.
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Flat TOML file using the flag names as keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field; } )*
    };
}

impl CommonArgs {
    /// Fills unset flags from the config file named by `--config`.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let file: CommonArgs = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.clone(),
            message: e.message().to_string(),
        })?;
        overlay!(
            self, file, k, m, m_grid, ratios, snr_db, gains, encoder, trials, channels, rho0, seed,
            workers, out_dir
        );
        Ok(self)
    }
}

pub fn parse_snr(token: &str) -> Result<SnrPoint> {
    let t = token.trim();
    if t.eq_ignore_ascii_case("noiseless") || t.eq_ignore_ascii_case("inf") {
        return Ok(SnrPoint::Noiseless);
    }
    let db: f64 = t.parse().map_err(|_| usage(format!("invalid SNR '{t}'")))?;
    if !db.is_finite() {
        return Err(usage(format!("invalid SNR '{t}'")));
    }
    Ok(SnrPoint::Db(db))
}

fn parse_positive(value: &str, what: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| usage(format!("invalid {what} '{value}'")))?;
    if !(v.is_finite() && v >= 0.0) {
        return Err(usage(format!("{what} must be finite and non-negative")));
    }
    Ok(v)
}

fn read_gain_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_positive(t, "gain"))
        .collect()
}

pub fn parse_gains(spec: &str) -> Result<GainProfile> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("gains must look like kind:value, got '{spec}'")))?;
    match kind {
        "equal" => Ok(GainProfile::equal(parse_positive(value, "sigma")?)),
        "lognormal" => Ok(GainProfile::lognormal(parse_positive(value, "sigma_ln")?)),
        "file" => Ok(GainProfile::Explicit(read_gain_file(Path::new(value))?)),
        other => Err(usage(format!("unknown gain profile '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_tokens() {
        assert_eq!(parse_snr("-5").unwrap(), SnrPoint::Db(-5.0));
        assert_eq!(parse_snr("noiseless").unwrap(), SnrPoint::Noiseless);
        assert!(parse_snr("loud").is_err());
    }

    #[test]
    fn gain_specs() {
        assert_eq!(parse_gains("equal:2").unwrap(), GainProfile::equal(2.0));
        assert_eq!(
            parse_gains("lognormal:0.125").unwrap(),
            GainProfile::lognormal(0.125)
        );
        assert!(parse_gains("equal").is_err());
        assert!(parse_gains("pareto:1").is_err());
        assert!(parse_gains("equal:-1").is_err());
    }

    #[test]
    fn config_fills_only_unset_flags() {
        let dir = std::env::temp_dir().join(format!("onebit-args-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(
            &path,
            "k = [7]\nseed = 9\nsnr-db = [\"0\", \"noiseless\"]\n",
        )
        .unwrap();
        let args = CommonArgs {
            seed: Some(1),
            config: Some(path),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(args.seed, Some(1));
        assert_eq!(args.k, Some(vec![7]));
        assert_eq!(args.snr_db.unwrap().len(), 2);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
