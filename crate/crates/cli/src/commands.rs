use std::path::PathBuf;

use onebit_core::analysis::{asymptotic_scaling, asymptotic_sqinr, error_floor, ser_from_sqinr};
use onebit_core::channel::sample_gains;
use onebit_core::montecarlo::scaling::estimate_scaling;
use onebit_core::montecarlo::scatter::capture_scatter;
use onebit_core::{
    estimate_ser, Encoder, ExperimentConfig, GainProfile, SerCurve, SnrPoint, SymbolVector, QPSK,
};
use serde::Serialize;

use crate::args::{parse_gains, parse_snr, Command, CommonArgs};
use crate::error::{usage, Result};
use crate::output::{num, opt, Table};

/// Fully resolved settings, recorded in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub k: Vec<usize>,
    pub m: Vec<usize>,
    pub ratios: Vec<usize>,
    pub snr_db: Vec<String>,
    pub gains: String,
    pub encoder: String,
    pub trials: u64,
    pub channels: usize,
    pub symbols_per_channel: usize,
    pub rho0: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out_dir: PathBuf,
}

struct Defaults {
    k: &'static [usize],
    m: &'static [usize],
    ratios: &'static [usize],
    snr_db: &'static [&'static str],
    trials: u64,
    channels: usize,
}

const SNR_SWEEP: &[&str] = &["-10", "-5", "0", "5", "10", "15", "20"];

fn defaults(cmd: &Command) -> Defaults {
    match cmd {
        Command::FigScaling(_) => Defaults {
            k: &[20],
            m: &[],
            ratios: &[2, 3, 4, 5, 6, 8, 10, 15, 20, 25, 30, 40, 50],
            snr_db: &[],
            trials: 4000,
            channels: 1000,
        },
        Command::FigFloor(_) => Defaults {
            k: &[5, 20],
            m: &[],
            ratios: &[2, 3, 4, 5, 6, 8, 10],
            snr_db: &["noiseless"],
            trials: 100_000,
            channels: 10_000,
        },
        Command::FigSerSweep(_) => Defaults {
            k: &[20],
            m: &[100, 200],
            ratios: &[],
            snr_db: SNR_SWEEP,
            trials: 100_000,
            channels: 10_000,
        },
        Command::FigZfVsMl(_) => Defaults {
            k: &[2],
            m: &[10],
            ratios: &[],
            snr_db: &["0", "5", "10", "15", "20", "25", "30"],
            trials: 10_000,
            channels: 10_000,
        },
        Command::FigScatter(_) => Defaults {
            k: &[4],
            m: &[20, 100, 300],
            ratios: &[],
            snr_db: &[],
            trials: 100,
            channels: 100,
        },
        Command::FigAdapted(_) => Defaults {
            k: &[3, 10],
            m: &[],
            ratios: &[3, 4, 5],
            snr_db: &["0", "5", "10", "15", "20", "25", "30", "noiseless"],
            trials: 20_000,
            channels: 2000,
        },
        Command::Predict(_) => Defaults {
            k: &[20],
            m: &[],
            ratios: &[1, 2, 3, 5, 10, 20],
            snr_db: &["-10", "-5", "0", "5", "10", "15", "20", "noiseless"],
            trials: 0,
            channels: 0,
        },
    }
}

pub fn resolve(cmd: &Command, args: CommonArgs) -> Result<Settings> {
    let d = defaults(cmd);
    let trials = args.trials.unwrap_or(d.trials);
    let channels = args.channels.unwrap_or(d.channels.min(trials as usize));
    let symbols_per_channel = if channels == 0 {
        0
    } else {
        (trials as usize).div_ceil(channels)
    };
    let settings = Settings {
        k: args.k.unwrap_or_else(|| d.k.to_vec()),
        m: args.m_grid.or(args.m).unwrap_or_else(|| d.m.to_vec()),
        ratios: args.ratios.unwrap_or_else(|| d.ratios.to_vec()),
        snr_db: args
            .snr_db
            .unwrap_or_else(|| d.snr_db.iter().map(|s| s.to_string()).collect()),
        gains: args.gains.unwrap_or_else(|| "equal:1".into()),
        encoder: args.encoder.unwrap_or_else(|| "zf".into()),
        trials: (channels * symbols_per_channel) as u64,
        channels,
        symbols_per_channel,
        rho0: args.rho0.unwrap_or(1.0),
        seed: args.seed.unwrap_or(0),
        workers: args.workers,
        out_dir: args.out_dir.unwrap_or_else(|| PathBuf::from(".")),
    };
    if settings.k.is_empty() || settings.k.contains(&0) {
        return Err(usage("--k needs positive user counts"));
    }
    if settings.workers == Some(0) {
        return Err(usage("--workers must be positive"));
    }
    if !(settings.rho0.is_finite() && settings.rho0 >= 0.0) {
        return Err(usage("--rho0 must be finite and non-negative"));
    }
    Ok(settings)
}

impl Settings {
    fn snr_points(&self) -> Result<Vec<SnrPoint>> {
        if self.snr_db.is_empty() {
            return Err(usage("--snr-db needs at least one point"));
        }
        self.snr_db.iter().map(|s| parse_snr(s)).collect()
    }

    fn single_k(&self) -> Result<usize> {
        match self.k.as_slice() {
            [k] => Ok(*k),
            _ => Err(usage("this command takes a single --k")),
        }
    }

    /// Explicit `--m` values, or `ratio × K` for every ratio.
    fn antennas_for(&self, k: usize) -> Vec<usize> {
        if self.m.is_empty() {
            self.ratios.iter().map(|r| r * k).collect()
        } else {
            self.m.clone()
        }
    }

    fn experiment(
        &self,
        k: usize,
        m: usize,
        encoder: Encoder,
        snr: Vec<SnrPoint>,
    ) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(k, m, encoder);
        cfg.gains = parse_gains(&self.gains)?;
        cfg.snr_points = snr;
        cfg.channels = self.channels;
        cfg.symbols_per_channel = self.symbols_per_channel;
        cfg.master_seed = self.seed;
        cfg.workers = self.workers;
        Ok(cfg)
    }
}

fn snr_label(p: &SnrPoint) -> String {
    match p {
        SnrPoint::Noiseless => "noiseless".into(),
        SnrPoint::Db(db) => num(*db),
    }
}

fn check_geometry(k: usize, m: usize) -> Result<()> {
    if m < k {
        return Err(usage(format!("need M ≥ K, got K = {k}, M = {m}")));
    }
    Ok(())
}

fn fig_scaling(s: &Settings) -> Result<Table> {
    let k = s.single_k()?;
    let grid = s.antennas_for(k);
    let est = estimate_scaling(
        k,
        &grid,
        s.channels,
        s.symbols_per_channel,
        s.rho0,
        s.seed,
        s.workers,
    )?;
    let mut t = Table::new(
        "fig_scaling.csv",
        vec!["M_over_K", "simulated", "analytic", "ratio"],
    );
    for e in est {
        t.push(vec![
            num(e.m as f64 / k as f64),
            num(e.simulated),
            num(e.analytic),
            num(e.ratio()),
        ]);
    }
    Ok(t)
}

fn fig_floor(s: &Settings) -> Result<Table> {
    let mut t = Table::new(
        "fig_floor.csv",
        vec![
            "K",
            "M",
            "M_over_K",
            "mc_ser",
            "analytic_floor",
            "errors",
            "trials",
            "warning",
        ],
    );
    for &k in &s.k {
        for m in s.antennas_for(k) {
            check_geometry(k, m)?;
            let curve =
                estimate_ser(&s.experiment(k, m, Encoder::Zf, vec![SnrPoint::Noiseless])?)?;
            let p = &curve.points[0];
            let floor = p.asymptotic_prediction;
            let mut warnings = Vec::new();
            if p.errors() < 10 {
                warnings.push("fewer than 10 errors");
            }
            if floor.is_some_and(|f| f < 1e-5) {
                warnings.push("floor below 1e-5 is not reliably measurable");
            }
            t.push(vec![
                k.to_string(),
                m.to_string(),
                num(m as f64 / k as f64),
                num(p.ser()),
                opt(floor),
                p.errors().to_string(),
                p.decisions().to_string(),
                warnings.join("; "),
            ]);
        }
    }
    Ok(t)
}

fn fig_ser_sweep(s: &Settings) -> Result<Table> {
    let encoder: Encoder = s.encoder.parse()?;
    let snr = s.snr_points()?;
    let mut t = Table::new(
        "fig_ser_sweep.csv",
        vec![
            "K",
            "M",
            "snr_db",
            "errors",
            "trials",
            "mc_ser",
            "ci_half_width",
            "analytic_finite",
            "analytic_asymptotic",
        ],
    );
    for &k in &s.k {
        for m in s.antennas_for(k) {
            check_geometry(k, m)?;
            let curve = estimate_ser(&s.experiment(k, m, encoder, snr.clone())?)?;
            for p in &curve.points {
                t.push(vec![
                    k.to_string(),
                    m.to_string(),
                    snr_label(&p.snr),
                    p.errors().to_string(),
                    p.decisions().to_string(),
                    num(p.ser()),
                    num(p.half_width()),
                    opt(p.finite_prediction),
                    opt(p.asymptotic_prediction),
                ]);
            }
        }
    }
    Ok(t)
}

fn paired(
    s: &Settings,
    k: usize,
    m: usize,
    a: Encoder,
    b: Encoder,
) -> Result<(SerCurve, SerCurve)> {
    check_geometry(k, m)?;
    let snr = s.snr_points()?;
    let mut cfg = s.experiment(k, m, a, snr)?;
    cfg.analytic_channels = 0;
    let first = estimate_ser(&cfg)?;
    cfg.encoder = b;
    Ok((first, estimate_ser(&cfg)?))
}

fn fig_zf_vs_ml(s: &Settings) -> Result<Table> {
    let k = s.single_k()?;
    let m = match s.m.as_slice() {
        [m] => *m,
        _ => return Err(usage("fig-zf-vs-ml takes a single --m")),
    };
    let (zf, ml) = paired(s, k, m, Encoder::Zf, Encoder::Ml)?;
    let mut t = Table::new(
        "fig_zf_vs_ml.csv",
        vec!["snr_db", "ser_zf", "ser_ml", "ci_zf", "ci_ml"],
    );
    for (z, l) in zf.points.iter().zip(&ml.points) {
        t.push(vec![
            snr_label(&z.snr),
            num(z.ser()),
            num(l.ser()),
            num(z.half_width()),
            num(l.half_width()),
        ]);
    }
    Ok(t)
}

fn fig_scatter(s: &Settings) -> Result<Table> {
    if s.single_k()? != QPSK.len() {
        return Err(usage(
            "fig-scatter uses s = [1+j, 1-j, -1+j, -1-j], so --k must be 4",
        ));
    }
    let symbols = SymbolVector::new(QPSK.to_vec())?;
    for &m in &s.m {
        check_geometry(QPSK.len(), m)?;
    }
    let cap = capture_scatter(&s.m, &symbols, s.channels, s.rho0, s.seed)?;
    let mut t = Table::new(
        "fig_scatter.csv",
        vec!["M", "user", "re", "im", "intended_re", "intended_im"],
    );
    for p in cap.points {
        t.push(vec![
            p.m.to_string(),
            p.user.to_string(),
            num(p.received.re),
            num(p.received.im),
            num(p.intended.re),
            num(p.intended.im),
        ]);
    }
    Ok(t)
}

fn fig_adapted(s: &Settings) -> Result<Table> {
    let mut t = Table::new(
        "fig_adapted.csv",
        vec![
            "K",
            "M",
            "snr_db",
            "ser_zf",
            "ser_alg1",
            "alg1_selection_rate",
        ],
    );
    for &k in &s.k {
        for m in s.antennas_for(k) {
            let (zf, alg) = paired(s, k, m, Encoder::Zf, Encoder::AdaptedAlg1)?;
            let rate = alg.selection_rate();
            for (z, a) in zf.points.iter().zip(&alg.points) {
                t.push(vec![
                    k.to_string(),
                    m.to_string(),
                    snr_label(&z.snr),
                    num(z.ser()),
                    num(a.ser()),
                    opt(rate),
                ]);
            }
        }
    }
    Ok(t)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn predict(s: &Settings) -> Result<Table> {
    let profile: GainProfile = parse_gains(&s.gains)?;
    let snr = s.snr_points()?;
    let mut t = Table::new(
        "predict.csv",
        vec![
            "K",
            "M",
            "M_over_K",
            "snr_db",
            "sqinr_asymptotic",
            "ser_asymptotic",
            "error_floor",
            "scale_factor",
        ],
    );
    for &k in &s.k {
        let gains = sample_gains(k, &profile, s.seed)?;
        for m in s.antennas_for(k) {
            check_geometry(k, m)?;
            let floor = mean(&error_floor(m, &gains)?);
            for p in &snr {
                let sqinr = asymptotic_sqinr(m, &gains, p.rho0(), p.sigma_n2())?;
                let ser: Vec<f64> = sqinr
                    .iter()
                    .map(|v| ser_from_sqinr(*v))
                    .collect::<onebit_core::Result<_>>()?;
                let (_, scale) = asymptotic_scaling(m, &gains, p.rho0())?;
                t.push(vec![
                    k.to_string(),
                    m.to_string(),
                    num(m as f64 / k as f64),
                    snr_label(p),
                    num(mean(&sqinr)),
                    num(mean(&ser)),
                    num(floor),
                    num(scale),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn run(cmd: &Command, settings: &Settings) -> Result<Table> {
    match cmd {
        Command::FigScaling(_) => fig_scaling(settings),
        Command::FigFloor(_) => fig_floor(settings),
        Command::FigSerSweep(_) => fig_ser_sweep(settings),
        Command::FigZfVsMl(_) => fig_zf_vs_ml(settings),
        Command::FigScatter(_) => fig_scatter(settings),
        Command::FigAdapted(_) => fig_adapted(settings),
        Command::Predict(_) => predict(settings),
    }
}
