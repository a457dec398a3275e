//! Round-by-round simulation of the training and feedback schemes.
//!
//! Node T transmits data over the forward channel (n x m); node R feeds
//! back over the backward channel (m x n). Every round is logged in a
//! [`Transcript`] with its power exponent and the feedback index sent (`q`)
//! and decoded (`q_hat`).
//!
//! Reverse codewords are distinguished by received power only. The detector
//! averages over `detect_window` symbols, so its noise floor fluctuates by
//! about `1/sqrt(window)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::channel::{
    eigen_profile, gram_eigenvalues, log2_det_identity_plus, map_power_detect, mmse_estimate,
    mmse_estimate_assumed, mutual_info_lower_bound, power_controlled_estimate, received_energy,
    received_power, ChannelEstimate, CMatrix, Duplex, FadingPair, NoiseSource,
};
use crate::dmt::{c_m, g_function, g_iterated, normalize_name, w_k};
use crate::error::{invalid, Error, Result};

/// Default detection window in symbols.
pub const DEFAULT_DETECT_WINDOW: usize = 1024;

/// Linear powers are capped here so that huge exponents stay finite.
const POWER_CAP: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ProtocolKind {
    /// Fixed power, no feedback.
    NoCsit,
    /// One bit of FDD feedback after one round of training.
    Fdd1Bit,
    /// K-level FDD feedback after one round of training.
    FddKLevel,
    /// K rounds of FDD training with one-bit feedback per round.
    FddIterative,
    /// Reciprocal training then power control on the estimate.
    Tdd15,
    /// K rounds of reciprocal training with error checks.
    TddIterative,
    /// Transmitter knows the channel exactly.
    GenieCsit,
    /// Receiver knows the channel and feeds back a power level.
    GenieCsir,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 8] = [
        ProtocolKind::NoCsit,
        ProtocolKind::Fdd1Bit,
        ProtocolKind::FddKLevel,
        ProtocolKind::FddIterative,
        ProtocolKind::Tdd15,
        ProtocolKind::TddIterative,
        ProtocolKind::GenieCsit,
        ProtocolKind::GenieCsir,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::NoCsit => "no-csit",
            ProtocolKind::Fdd1Bit => "fdd-1bit",
            ProtocolKind::FddKLevel => "fdd-klevel",
            ProtocolKind::FddIterative => "fdd-iterative",
            ProtocolKind::Tdd15 => "tdd-1p5",
            ProtocolKind::TddIterative => "tdd-iterative",
            ProtocolKind::GenieCsit => "genie-csit",
            ProtocolKind::GenieCsir => "genie-csir",
        }
    }

    pub fn duplex(self) -> Duplex {
        match self {
            ProtocolKind::NoCsit
            | ProtocolKind::Fdd1Bit
            | ProtocolKind::FddKLevel
            | ProtocolKind::FddIterative => Duplex::Fdd,
            _ => Duplex::Tdd,
        }
    }

    fn uses_levels(self) -> bool {
        matches!(
            self,
            ProtocolKind::FddKLevel
                | ProtocolKind::FddIterative
                | ProtocolKind::TddIterative
                | ProtocolKind::GenieCsir
        )
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl From<ProtocolKind> for String {
    fn from(k: ProtocolKind) -> String {
        k.name().to_string()
    }
}

impl TryFrom<String> for ProtocolKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let kind = match normalize_name(s).as_str() {
            "no-csit" | "nocsit" => ProtocolKind::NoCsit,
            "fdd-1bit" | "fdd-1bit-1p5" => ProtocolKind::Fdd1Bit,
            "fdd-klevel" | "fdd-klevel-1p5" => ProtocolKind::FddKLevel,
            "fdd-iterative" => ProtocolKind::FddIterative,
            "tdd-1p5" | "tdd-15" => ProtocolKind::Tdd15,
            "tdd-iterative" => ProtocolKind::TddIterative,
            "genie-csit" => ProtocolKind::GenieCsit,
            "genie-csir" => ProtocolKind::GenieCsir,
            _ => return Err(Error::UnknownProtocol(s.to_string())),
        };
        Ok(kind)
    }
}

/// Parameters of one protocol run. `snr` is linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub kind: ProtocolKind,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub snr: f64,
    pub noiseless: bool,
    pub detect_window: usize,
}

impl ProtocolConfig {
    pub fn new(kind: ProtocolKind, m: usize, n: usize, k: usize, r: f64, epsilon: f64, delta: f64, snr: f64) -> Self {
        Self { kind, m, n, k, r, epsilon, delta, snr, noiseless: false, detect_window: DEFAULT_DETECT_WINDOW }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.m == 0 || self.n == 0 {
            return bad("antenna counts must be at least 1".into());
        }
        if !(self.snr > 1.0) || !self.snr.is_finite() {
            return bad(format!("snr must be finite and above 1 (0 dB), got {}", self.snr));
        }
        let d = self.m.min(self.n) as f64;
        if !(self.r > 0.0 && self.r < d) {
            return bad(format!("r must lie in (0, {d}), got {}", self.r));
        }
        if self.kind.uses_levels() {
            let min_k = if self.kind == ProtocolKind::GenieCsir { 1 } else { 2 };
            if self.k < min_k {
                return bad(format!("{} needs K >= {min_k}", self.kind));
            }
        }
        if self.detect_window == 0 {
            return bad("detection window must be at least one symbol".into());
        }
        match self.kind {
            ProtocolKind::Fdd1Bit | ProtocolKind::FddKLevel | ProtocolKind::FddIterative | ProtocolKind::TddIterative => {
                let hi = self.r.min(d - self.r);
                if !(self.delta > 0.0 && self.delta < self.epsilon && self.epsilon < hi) {
                    return bad(format!(
                        "need 0 < delta < epsilon < min(r, {d} - r) = {hi}, got delta={} epsilon={}",
                        self.delta, self.epsilon
                    ));
                }
            }
            ProtocolKind::Tdd15 | ProtocolKind::GenieCsit | ProtocolKind::GenieCsir => {
                if !(self.epsilon > 0.0) {
                    return bad(format!("epsilon must be positive, got {}", self.epsilon));
                }
            }
            ProtocolKind::NoCsit => {}
        }
        Ok(())
    }

    fn mn(&self) -> f64 {
        (self.m * self.n) as f64
    }

    fn rate_bits(&self) -> f64 {
        self.r * self.snr.log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

/// One transmission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub direction: Direction,
    /// Exponent of the transmit power; `None` for silence.
    pub power_exponent: Option<f64>,
    /// Index chosen by the receiver (reverse rounds).
    pub q: Option<u32>,
    /// Index decoded by the transmitter (reverse rounds).
    pub q_hat: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub rounds: Vec<RoundRecord>,
    pub data_power_exponent: f64,
    /// Sum of the linear powers T used, over all of its transmissions.
    pub tx_energy: f64,
    /// Sum of the linear powers R used, over all of its transmissions.
    pub rx_energy: f64,
    pub mutual_info: f64,
    pub outage: bool,
}

struct Log<'a> {
    cfg: &'a ProtocolConfig,
    rounds: Vec<RoundRecord>,
    tx: f64,
    rx: f64,
}

impl<'a> Log<'a> {
    fn new(cfg: &'a ProtocolConfig) -> Self {
        Self { cfg, rounds: Vec::new(), tx: 0.0, rx: 0.0 }
    }

    fn power(&self, exponent: Option<f64>) -> f64 {
        match exponent {
            None => 0.0,
            Some(e) => self.cfg.snr.powf(e).min(POWER_CAP),
        }
    }

    /// Logs a transmission and returns its linear power.
    fn send(&mut self, round: u32, direction: Direction, exponent: Option<f64>, q: Option<u32>) -> f64 {
        let p = self.power(exponent);
        match direction {
            Direction::Forward => self.tx += p,
            Direction::Reverse => self.rx += p,
        }
        self.rounds.push(RoundRecord { round, direction, power_exponent: exponent, q, q_hat: None });
        p
    }

    fn set_q_hat(&mut self, q_hat: u32) {
        if let Some(last) = self.rounds.last_mut() {
            last.q_hat = Some(q_hat);
        }
    }

    /// Data round: T trains and sends at snr^exponent; R decodes with a
    /// power-controlled estimate, or with `genie` knowledge if given.
    fn finish(
        mut self,
        round: u32,
        exponent: f64,
        forward: &CMatrix,
        genie: bool,
        noise: &mut dyn NoiseSource,
    ) -> Result<Transcript> {
        let p = self.send(round, Direction::Forward, Some(exponent), None);
        let est = if genie {
            ChannelEstimate::perfect(forward)
        } else {
            power_controlled_estimate(forward, p, noise)?
        };
        let mi = mutual_info_lower_bound(&est, p)?;
        Ok(Transcript {
            rounds: self.rounds,
            data_power_exponent: exponent,
            tx_energy: self.tx,
            rx_energy: self.rx,
            mutual_info: mi,
            outage: mi < self.cfg.rate_bits(),
        })
    }
}

fn check_pair(pair: &FadingPair, cfg: &ProtocolConfig) -> Result<()> {
    cfg.validate()?;
    if pair.forward.shape() != (cfg.n, cfg.m) || pair.backward.shape() != (cfg.m, cfg.n) {
        return invalid(format!(
            "channel is {:?} but the configuration says {} x {}",
            pair.forward.shape(),
            cfg.n,
            cfg.m
        ));
    }
    Ok(())
}

/// log2 det(I + scale * E E^dagger) < x log2(snr): the estimate says the
/// channel cannot carry rate x at that power.
fn below(est: &CMatrix, scale: f64, x: f64, snr: f64) -> bool {
    log2_det_identity_plus(est, scale) < x * snr.log2()
}

fn clamped_weighted_sum(alpha: &[f64], m: usize, n: usize) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(i, a)| crate::oracle::weight(i, m, n) * a.max(0.0))
        .sum()
}

pub fn run_no_csit(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    Log::new(cfg).finish(1, 1.0, &pair.forward, false, noise)
}

/// One round of training, then q = 1 when the estimate is in outage at
/// SNR^(r+eps). q = 1 is sent at SNR^(1 + G(r+eps, 1)) and boosts the data
/// power to the same level; q = 0 is sent at SNR^0.
pub fn run_fdd_1bit(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let re = cfg.r + cfg.epsilon;
    let mut log = Log::new(cfg);
    log.send(1, Direction::Forward, Some(1.0), None);
    let est = mmse_estimate(&pair.forward, snr, noise)?;
    let q = u32::from(below(&est.estimate, snr, re, snr));
    let boost = 1.0 + g_function(re, 1.0, cfg.m, cfg.n)?;
    let fb = if q == 1 { boost } else { 0.0 };
    let p = log.send(2, Direction::Reverse, Some(fb), Some(q));
    let e = received_energy(p, &pair.backward, cfg.detect_window, noise);
    let q_hat = map_power_detect(e, &[Some(0.0), Some(boost)], cfg.delta / cfg.mn(), snr)? as u32;
    log.set_q_hat(q_hat);
    let data = if q_hat == 1 { boost } else { 1.0 };
    log.finish(3, data, &pair.forward, false, noise)
}

/// Feedback and data exponents of the K-level scheme, per level.
pub fn klevel_exponents(cfg: &ProtocolConfig) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (m, n, k) = (cfg.m, cfg.n, cfg.k);
    let re = cfg.r + cfg.epsilon;
    let cm = c_m(cfg.r, m.min(n));
    let p: Vec<f64> = (0..k - 1)
        .map(|u| Ok(cm.min(g_iterated(re, u, m, n)?)))
        .collect::<Result<_>>()?;
    let mut fb = Vec::with_capacity(k);
    let mut data = Vec::with_capacity(k);
    for u in 0..k - 1 {
        fb.push((cm - g_iterated(re, u, m, n)?).max(0.0));
        data.push(1.0 + (p[u] - cfg.delta).max(0.0));
    }
    fb.push(1.0 + g_function(re, 1.0 + p[k - 2], m, n)?);
    let top = g_iterated(re, k - 1, m, n)?.min(g_function(re, 1.0 + cm, m, n)?);
    data.push(1.0 + top);
    Ok((p, fb, data))
}

/// One round of training, then the receiver reports the first level u at
/// which the estimate supports the rate at SNR^(1 + p_u), or K - 1 when
/// even SNR^(1 + p_{K-2}) is not enough.
pub fn run_fdd_klevel(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let re = cfg.r + cfg.epsilon;
    let k = cfg.k;
    let (p, fb, data) = klevel_exponents(cfg)?;
    let mut log = Log::new(cfg);
    log.send(1, Direction::Forward, Some(1.0), None);
    let est = mmse_estimate(&pair.forward, snr, noise)?;
    let q = if below(&est.estimate, snr.powf(1.0 + p[k - 2]), re, snr) {
        k - 1
    } else {
        (0..k - 1)
            .find(|&u| !below(&est.estimate, snr.powf(1.0 + p[u]), re, snr))
            .unwrap_or(k - 2)
    };
    let pw = log.send(2, Direction::Reverse, Some(fb[q]), Some(q as u32));
    // Distinct codeword powers, each mapped to its lowest level.
    let mut order: Vec<(f64, usize)> = fb.iter().copied().zip(0..k).collect();
    order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    order.dedup_by(|a, b| a.0 == b.0);
    let cands: Vec<Option<f64>> = order.iter().map(|&(e, _)| Some(e)).collect();
    let e = received_energy(pw, &pair.backward, cfg.detect_window, noise);
    let idx = map_power_detect(e, &cands, cfg.delta / cfg.mn(), snr)?;
    let q_hat = order[idx].1;
    log.set_q_hat(q_hat as u32);
    log.finish(3, data[q_hat], &pair.forward, false, noise)
}

/// K rounds of forward training with one-bit reverse answers. Round i
/// trains at SNR^(1 + G_{i-1}(r+eps)) while T still believes the channel
/// is bad. A reverse codeword (sent only for "good") tells T to stop
/// boosting; once R has declared "good" it only checks whether T heard it.
pub fn run_fdd_iterative(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let re = cfg.r + cfg.epsilon;
    let (m, n, k) = (cfg.m, cfg.n, cfg.k);
    let offset = cfg.epsilon / cfg.mn();
    let mut log = Log::new(cfg);
    let mut q_prev: Vec<u32> = Vec::with_capacity(k);
    let mut q_hat_prev: Vec<u32> = Vec::with_capacity(k);
    for i in 1..k {
        let level = 1.0 + g_iterated(re, i - 1, m, n)?;
        let tx_exp = if i > 1 && q_hat_prev[i - 2] == 0 { None } else { Some(level) };
        let p = log.send((2 * i - 1) as u32, Direction::Forward, tx_exp, None);
        let q = if q_prev.contains(&0) {
            let e = received_energy(p, &pair.forward, cfg.detect_window, noise);
            u32::from(e < snr.powf(cfg.epsilon))
        } else {
            let assumed = snr.powf(level);
            let est = mmse_estimate_assumed(&pair.forward, p, assumed, noise)?;
            u32::from(below(&est.estimate, assumed, re, snr))
        };
        let fb = if q == 0 { Some(level) } else { None };
        let pf = log.send((2 * i) as u32, Direction::Reverse, fb, Some(q));
        let e = received_energy(pf, &pair.backward, cfg.detect_window, noise);
        let heard = map_power_detect(e, &[None, Some(level)], offset, snr)?;
        let q_hat = if i > 1 && q_hat_prev[i - 2] == 0 { 0 } else { u32::from(heard == 0) };
        log.set_q_hat(q_hat);
        q_prev.push(q);
        q_hat_prev.push(q_hat);
    }
    let stop = q_hat_prev.iter().position(|&v| v == 0).map_or(k, |v| v + 1);
    let data = 1.0 + g_iterated(re, stop - 1, m, n)?;
    log.finish((2 * k - 1) as u32, data, &pair.forward, false, noise)
}

/// Reverse training over the reciprocal channel, then T inverts the
/// weakest row gain of its estimate at power SNR^(1 - eps/mn).
pub fn run_tdd_15(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let mut log = Log::new(cfg);
    log.send(1, Direction::Reverse, Some(1.0), None);
    let est = mmse_estimate(&pair.backward, snr, noise)?;
    let h1 = est.estimate.transpose();
    let min_row = (0..h1.nrows())
        .map(|j| h1.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
        .max(f64::MIN_POSITIVE);
    let exp = 1.0 - cfg.epsilon / cfg.mn() - min_row.ln() / snr.ln();
    log.finish(2, exp, &pair.forward, false, noise)
}

/// Reciprocal training with error detection. T sets its power from the
/// latest estimate; R answers only when the received training shows an
/// error, at a power large enough for T to re-estimate the channel.
pub fn run_tdd_iterative(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let re = cfg.r + cfg.epsilon;
    let (m, n, k) = (cfg.m, cfg.n, cfg.k);
    let mn = cfg.mn();
    let mut log = Log::new(cfg);
    log.send(1, Direction::Reverse, Some(1.0), None);
    let est = mmse_estimate(&pair.backward, snr, noise)?;
    let mut alpha_hat = eigen_profile(&est.estimate, snr)?.alpha;
    let first = 1.0 + clamped_weighted_sum(&alpha_hat, m, n);
    let mut best = first;
    let mut q_hat_prev = 1u32;
    let mut q_prev: Option<u32> = None;
    for u in 2..k {
        let tx_exp = if q_hat_prev == 0 {
            None
        } else {
            Some(1.0 - cfg.delta / mn + clamped_weighted_sum(&alpha_hat, m, n))
        };
        let p = log.send((2 * u - 2) as u32, Direction::Forward, tx_exp, None);
        let q = if q_prev == Some(0) {
            0
        } else {
            let heard_nothing = u > 2 && {
                let e = received_energy(p, &pair.forward, cfg.detect_window, noise);
                e < snr.powf(cfg.epsilon / (2.0 * mn))
            };
            if heard_nothing {
                1
            } else {
                let g = power_controlled_estimate(&pair.forward, p, noise)?;
                u32::from(below(&g.estimate, 1.0, re, snr))
            }
        };
        let fb_exp = if q == 1 { Some(1.0 + w_k(re, u, m, n, cfg.epsilon)?) } else { None };
        let pf = log.send((2 * u - 1) as u32, Direction::Reverse, fb_exp, Some(q));
        let e = received_energy(pf, &pair.backward, cfg.detect_window, noise);
        let q_hat = u32::from(e >= snr.powf(cfg.epsilon / mn));
        log.set_q_hat(q_hat);
        if q_hat == 1 {
            // The answer doubles as training at a known power.
            let est = mmse_estimate(&pair.backward, pf.max(f64::MIN_POSITIVE), noise)?;
            alpha_hat = eigen_profile(&est.estimate, snr)?.alpha;
            best = best.max(1.0 + clamped_weighted_sum(&alpha_hat, m, n));
        }
        q_hat_prev = q_hat;
        q_prev = Some(q);
    }
    log.finish((2 * k - 2) as u32, best, &pair.forward, false, noise)
}

/// T knows H and sets its power to SNR^(1 - eps/mn + sum w_i alpha_i).
pub fn run_genie_csit(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let alpha = eigen_profile(&pair.forward, cfg.snr)?.alpha;
    let exp = 1.0 - cfg.epsilon / cfg.mn() + clamped_weighted_sum(&alpha, cfg.m, cfg.n);
    Log::new(cfg).finish(1, exp, &pair.forward, false, noise)
}

/// R knows H, picks the lowest of the K levels SNR^(1 + G_i(r+eps)) that
/// carries the rate, and signals it by beamforming power
/// SNR^((i+1)/2K) / lambda_max back to T.
pub fn run_genie_csir(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    check_pair(pair, cfg)?;
    let snr = cfg.snr;
    let re = cfg.r + cfg.epsilon;
    let (m, n, k) = (cfg.m, cfg.n, cfg.k);
    let levels: Vec<f64> = (0..k).map(|i| Ok(1.0 + g_iterated(re, i, m, n)?)).collect::<Result<_>>()?;
    let need = cfg.rate_bits();
    let choice = levels
        .iter()
        .position(|&l| {
            let p = snr.powf(l).min(POWER_CAP);
            log2_det_identity_plus(&pair.forward, p / m as f64) >= need
        })
        .unwrap_or(k - 1);
    let lmax = gram_eigenvalues(&pair.forward).last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let step = 1.0 / (2 * k) as f64;
    let alpha_min = -lmax.ln() / snr.ln();
    let mut log = Log::new(cfg);
    let pf = log.send(1, Direction::Reverse, Some(alpha_min + (choice + 1) as f64 * step), Some(choice as u32));
    let e = received_power(pf * lmax, m, cfg.detect_window, noise);
    let cands: Vec<Option<f64>> = (0..k).map(|j| Some((j + 1) as f64 * step)).collect();
    let q_hat = map_power_detect(e, &cands, step / 2.0, snr)?;
    log.set_q_hat(q_hat as u32);
    log.finish(2, levels[q_hat], &pair.forward, true, noise)
}

/// Runs `cfg.kind` on one fading block.
pub fn run_protocol(pair: &FadingPair, cfg: &ProtocolConfig, noise: &mut dyn NoiseSource) -> Result<Transcript> {
    match cfg.kind {
        ProtocolKind::NoCsit => run_no_csit(pair, cfg, noise),
        ProtocolKind::Fdd1Bit => run_fdd_1bit(pair, cfg, noise),
        ProtocolKind::FddKLevel => run_fdd_klevel(pair, cfg, noise),
        ProtocolKind::FddIterative => run_fdd_iterative(pair, cfg, noise),
        ProtocolKind::Tdd15 => run_tdd_15(pair, cfg, noise),
        ProtocolKind::TddIterative => run_tdd_iterative(pair, cfg, noise),
        ProtocolKind::GenieCsit => run_genie_csit(pair, cfg, noise),
        ProtocolKind::GenieCsir => run_genie_csir(pair, cfg, noise),
    }
}
