//! Outage estimation, slope fits and transmit-power audits.
//!
//! Trial `i` of a run with seed `s` always draws from the same generator
//! stream, so results do not depend on how trials are split over workers.
//! Sums are accumulated per fixed-size block and then combined in block
//! order, which keeps floating-point totals bit-identical too.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_fading_pair, GaussianNoise, Noiseless};
use crate::error::{invalid, Error, Result};
use crate::protocol::{run_protocol, ProtocolConfig, ProtocolKind, Transcript};

const BLOCK: u64 = 2048;

/// One row of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub protocol: ProtocolKind,
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub r: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub snr_db: f64,
    pub trials: u64,
    pub outages: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub tx_energy_mean: f64,
    pub rx_energy_mean: f64,
    pub seed: u64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Wilson score interval for a binomial proportion at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs a single trial with its own channel draw and noise.
pub fn run_trial(cfg: &ProtocolConfig, seed: u64, trial: u64) -> Result<Transcript> {
    let mut rng = trial_rng(seed, trial);
    let pair = sample_fading_pair(cfg.m, cfg.n, cfg.kind.duplex(), &mut rng)?;
    if cfg.noiseless {
        run_protocol(&pair, cfg, &mut Noiseless)
    } else {
        run_protocol(&pair, cfg, &mut GaussianNoise(&mut rng))
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    outages: u64,
    tx: f64,
    rx: f64,
}

fn run_block(cfg: &ProtocolConfig, seed: u64, lo: u64, hi: u64) -> Result<Tally> {
    let mut t = Tally::default();
    for i in lo..hi {
        let tr = run_trial(cfg, seed, i)?;
        t.outages += u64::from(tr.outage);
        t.tx += tr.tx_energy;
        t.rx += tr.rx_energy;
    }
    Ok(t)
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start workers: {e}")))
}

/// Outage rate of `cfg` over `trials` independent blocks.
pub fn estimate_outage(cfg: &ProtocolConfig, trials: u64, seed: u64, workers: usize) -> Result<SimResult> {
    cfg.validate()?;
    if trials == 0 {
        return invalid("trials must be positive");
    }
    let blocks = trials.div_ceil(BLOCK);
    let tallies: Vec<Tally> = pool(workers)?.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| run_block(cfg, seed, b * BLOCK, ((b + 1) * BLOCK).min(trials)))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut total = Tally::default();
    for t in tallies {
        total.outages += t.outages;
        total.tx += t.tx;
        total.rx += t.rx;
    }
    let (ci_lo, ci_hi) = wilson_interval(total.outages, trials);
    Ok(SimResult {
        protocol: cfg.kind,
        m: cfg.m,
        n: cfg.n,
        k: cfg.k,
        r: cfg.r,
        epsilon: cfg.epsilon,
        delta: cfg.delta,
        snr_db: 10.0 * cfg.snr.log10(),
        trials,
        outages: total.outages,
        rate: total.outages as f64 / trials as f64,
        ci_lo,
        ci_hi,
        tx_energy_mean: total.tx / trials as f64,
        rx_energy_mean: total.rx / trials as f64,
        seed,
    })
}

/// Runs `cfg` at each SNR (dB) with the same seed, so neighbouring points
/// share channel draws.
pub fn sweep(cfg: &ProtocolConfig, snr_db: &[f64], trials: u64, seed: u64, workers: usize) -> Result<Vec<SimResult>> {
    snr_db
        .iter()
        .map(|&db| {
            let mut c = cfg.clone();
            c.snr = db_to_linear(db);
            let mut res = estimate_outage(&c, trials, seed, workers)?;
            res.snr_db = db;
            Ok(res)
        })
        .collect()
}

/// The first `count` transcripts of a run, identical to the trials counted
/// by [`estimate_outage`] with the same seed.
pub fn transcripts(cfg: &ProtocolConfig, count: u64, seed: u64) -> Result<Vec<Transcript>> {
    cfg.validate()?;
    (0..count).map(|i| run_trial(cfg, seed, i)).collect()
}

/// Least-squares line through `(x, y)` points: slope, intercept and the
/// standard error of the slope (zero for two points).
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} point(s), need at least 2")));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all points share one SNR".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let se = if n > 2 {
        let ssr: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok((slope, intercept, se))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// Estimated diversity: minus the slope of log10 rate on log10 snr.
    pub d_hat: f64,
    pub stderr: f64,
    pub slope: f64,
    pub intercept: f64,
    /// (log10 snr, log10 rate) of the points used.
    pub points: Vec<(f64, f64)>,
}

/// Fits log10(rate) against log10(snr). Points with no outages are left
/// out since their logarithm is undefined.
pub fn fit_diversity_slope(results: &[SimResult]) -> Result<SlopeFit> {
    let points: Vec<(f64, f64)> = results
        .iter()
        .filter(|r| r.rate > 0.0)
        .map(|r| (r.snr_db / 10.0, r.rate.log10()))
        .collect();
    let (slope, intercept, stderr) = least_squares(&points)?;
    Ok(SlopeFit { d_hat: -slope, stderr, slope, intercept, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Tx,
    Rx,
}

impl std::str::FromStr for Node {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tx" | "t" | "transmitter" => Ok(Node::Tx),
            "rx" | "r" | "receiver" => Ok(Node::Rx),
            _ => invalid(format!("unknown node `{s}`, expected tx or rx")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub node: Node,
    /// Slope of log10 mean energy against log10 snr.
    pub slope: f64,
    pub intercept: f64,
    pub limit: f64,
    pub pass: bool,
}

/// Checks that a node's mean energy grows no faster than SNR^(1 + margin).
/// A node that never transmits passes trivially.
pub fn power_audit(results: &[SimResult], node: Node, margin: f64) -> Result<AuditReport> {
    let limit = 1.0 + margin;
    let pts: Vec<(f64, f64)> = results
        .iter()
        .map(|r| {
            let e = match node {
                Node::Tx => r.tx_energy_mean,
                Node::Rx => r.rx_energy_mean,
            };
            (r.snr_db / 10.0, e)
        })
        .filter(|p| p.1 > 0.0)
        .map(|(x, e)| (x, e.log10()))
        .collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Ok(AuditReport { node, slope: f64::INFINITY, intercept: f64::NAN, limit, pass: false });
    }
    if pts.len() < 2 {
        if results.len() < 2 {
            return Err(Error::InsufficientData("an audit needs at least two SNR points".into()));
        }
        return Ok(AuditReport { node, slope: 0.0, intercept: 0.0, limit, pass: true });
    }
    let (slope, intercept, _) = least_squares(&pts)?;
    Ok(AuditReport { node, slope, intercept, limit, pass: slope <= limit })
}
