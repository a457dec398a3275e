//! Rayleigh block fading, training, power detection and rate bounds.
//!
//! All powers are linear and normalised so that the additive noise has unit
//! variance per complex entry. Exponents are taken with respect to `snr`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{invalid, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Duplex {
    /// Forward and reverse channels are independent draws.
    Fdd,
    /// The reverse channel is the transpose of the forward channel.
    Tdd,
}

/// One fading block. `forward` is n x m (receiver x transmitter) and
/// `backward` is m x n.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingPair {
    pub forward: CMatrix,
    pub backward: CMatrix,
    pub mode: Duplex,
}

impl FadingPair {
    /// Builds a pair from a known forward channel. In TDD the backward
    /// channel is its transpose; in FDD `backward` must be supplied.
    pub fn new(forward: CMatrix, backward: Option<CMatrix>, mode: Duplex) -> Result<Self> {
        let backward = match (mode, backward) {
            (Duplex::Tdd, None) => forward.transpose(),
            (Duplex::Tdd, Some(b)) => {
                if b != forward.transpose() {
                    return invalid("TDD backward channel must equal the forward transpose");
                }
                b
            }
            (Duplex::Fdd, Some(b)) => b,
            (Duplex::Fdd, None) => return invalid("FDD pair needs an explicit backward channel"),
        };
        if backward.nrows() != forward.ncols() || backward.ncols() != forward.nrows() {
            return invalid("backward channel dimensions must be m x n");
        }
        Ok(Self { forward, backward, mode })
    }

    /// Scalar pair for single-antenna tests.
    pub fn siso(h_forward: Complex64, h_backward: Complex64, mode: Duplex) -> Self {
        let f = CMatrix::from_element(1, 1, h_forward);
        let b = match mode {
            Duplex::Tdd => f.clone(),
            Duplex::Fdd => CMatrix::from_element(1, 1, h_backward),
        };
        Self { forward: f, backward: b, mode }
    }

    pub fn tx_antennas(&self) -> usize {
        self.forward.ncols()
    }

    pub fn rx_antennas(&self) -> usize {
        self.forward.nrows()
    }
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws a fading pair with i.i.d. CN(0,1) entries.
pub fn sample_fading_pair<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    mode: Duplex,
    rng: &mut R,
) -> Result<FadingPair> {
    if m == 0 || n == 0 {
        return invalid("antenna counts must be at least 1");
    }
    let forward = CMatrix::from_fn(n, m, |_, _| complex_normal(rng));
    let backward = match mode {
        Duplex::Tdd => forward.transpose(),
        Duplex::Fdd => CMatrix::from_fn(m, n, |_, _| complex_normal(rng)),
    };
    Ok(FadingPair { forward, backward, mode })
}

/// Source of receiver noise. Swapping the source lets the same protocol
/// code run noiselessly, with Gaussian noise, or with a scripted sequence.
pub trait NoiseSource {
    /// One CN(0,1) sample.
    fn complex_normal(&mut self) -> Complex64;
    /// Total energy of `entries` independent CN(0,1) samples, i.e. a
    /// Gamma(entries, 1) variate.
    fn energy(&mut self, entries: usize) -> f64;
}

/// Zero noise.
#[derive(Debug, Default, Clone, Copy)]
pub struct Noiseless;

impl NoiseSource for Noiseless {
    fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn energy(&mut self, _entries: usize) -> f64 {
        0.0
    }
}

/// Gaussian noise drawn from a borrowed generator.
pub struct GaussianNoise<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> NoiseSource for GaussianNoise<'_, R> {
    fn complex_normal(&mut self) -> Complex64 {
        complex_normal(self.0)
    }
    fn energy(&mut self, entries: usize) -> f64 {
        if entries == 0 {
            return 0.0;
        }
        Gamma::new(entries as f64, 1.0)
            .expect("shape is positive")
            .sample(self.0)
    }
}

/// Replays a fixed list of complex samples, then zeros. Energy draws are
/// zero. Used to build deterministic transcripts with a chosen error.
#[derive(Debug, Default, Clone)]
pub struct ScriptedNoise {
    queue: VecDeque<Complex64>,
}

impl ScriptedNoise {
    pub fn new(samples: impl IntoIterator<Item = Complex64>) -> Self {
        Self { queue: samples.into_iter().collect() }
    }
}

impl NoiseSource for ScriptedNoise {
    fn complex_normal(&mut self) -> Complex64 {
        self.queue.pop_front().unwrap_or_default()
    }
    fn energy(&mut self, _entries: usize) -> f64 {
        0.0
    }
}

/// Channel estimate plus the statistics the rate bound needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub estimate: CMatrix,
    /// Per-entry error variance of `estimate`.
    pub error_variance: f64,
    pub train_power: f64,
    /// True when `estimate` targets sqrt(P) * H rather than H.
    pub power_controlled: bool,
}

impl ChannelEstimate {
    /// Genie knowledge of the channel.
    pub fn perfect(h: &CMatrix) -> Self {
        Self {
            estimate: h.clone(),
            error_variance: 0.0,
            train_power: f64::INFINITY,
            power_controlled: false,
        }
    }
}

fn observe(channel: &CMatrix, actual_power: f64, noise: &mut dyn NoiseSource) -> CMatrix {
    let a = actual_power.sqrt();
    let mut y = channel.map(|h| h * a);
    for v in y.iter_mut() {
        *v += noise.complex_normal();
    }
    y
}

/// MMSE estimate of H from an orthonormal pilot sent at `train_power`.
pub fn mmse_estimate(
    channel: &CMatrix,
    train_power: f64,
    noise: &mut dyn NoiseSource,
) -> Result<ChannelEstimate> {
    mmse_estimate_assumed(channel, train_power, train_power, noise)
}

/// MMSE estimate when the receiver believes the pilot power is
/// `assumed_power` but it was actually sent at `actual_power` (possibly 0).
pub fn mmse_estimate_assumed(
    channel: &CMatrix,
    actual_power: f64,
    assumed_power: f64,
    noise: &mut dyn NoiseSource,
) -> Result<ChannelEstimate> {
    if !(actual_power >= 0.0) || !(assumed_power >= 0.0) {
        return invalid("training power must be non-negative");
    }
    let y = observe(channel, actual_power, noise);
    let gain = if assumed_power.is_finite() {
        assumed_power.sqrt() / (1.0 + assumed_power)
    } else {
        0.0
    };
    Ok(ChannelEstimate {
        estimate: y.map(|v| v * gain),
        error_variance: 1.0 / (1.0 + assumed_power),
        train_power: assumed_power,
        power_controlled: false,
    })
}

/// Estimate of G = sqrt(P) H when the receiver does not know P; the pilot
/// and data share the same power, so the estimate already includes it.
pub fn power_controlled_estimate(
    channel: &CMatrix,
    train_power: f64,
    noise: &mut dyn NoiseSource,
) -> Result<ChannelEstimate> {
    if !(train_power >= 0.0) {
        return invalid("training power must be non-negative");
    }
    let y = observe(channel, train_power, noise);
    let (gain, var) = if train_power.is_finite() {
        let g = train_power / (1.0 + train_power);
        (g, g)
    } else {
        (1.0, 1.0)
    };
    Ok(ChannelEstimate {
        estimate: y.map(|v| v * gain),
        error_variance: var,
        train_power,
        power_controlled: true,
    })
}

/// Eigenvalues of M M^dagger and their exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenProfile {
    /// Nonzero-dimension eigenvalues, ascending.
    pub lambda: Vec<f64>,
    /// alpha_i = -log(lambda_i) / log(snr), descending (matching `lambda`).
    pub alpha: Vec<f64>,
}

/// Eigenvalues of the min(rows, cols) Gram matrix, ascending.
pub fn gram_eigenvalues(matrix: &CMatrix) -> Vec<f64> {
    let (r, c) = matrix.shape();
    if r == 0 || c == 0 {
        return Vec::new();
    }
    if r == 1 || c == 1 {
        return vec![matrix.iter().map(|v| v.norm_sqr()).sum()];
    }
    let gram = if r <= c {
        matrix * matrix.adjoint()
    } else {
        matrix.adjoint() * matrix
    };
    let mut ev: Vec<f64> = if gram.nrows() == 2 {
        let a = gram[(0, 0)].re;
        let d = gram[(1, 1)].re;
        let b = gram[(0, 1)].norm_sqr();
        let mid = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b).sqrt();
        let hi = mid + disc;
        // Product form keeps the small eigenvalue accurate.
        let det = a * d - b;
        let lo = if hi > 0.0 { det / hi } else { 0.0 };
        vec![lo, hi]
    } else {
        gram.symmetric_eigenvalues().iter().copied().collect()
    };
    for v in ev.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

pub fn eigen_profile(matrix: &CMatrix, snr: f64) -> Result<EigenProfile> {
    if !(snr > 1.0) {
        return invalid("snr must exceed 1 for exponents to be defined");
    }
    let lambda = gram_eigenvalues(matrix);
    let ln = snr.ln();
    let alpha = lambda.iter().map(|&l| -l.ln() / ln).collect();
    Ok(EigenProfile { lambda, alpha })
}

/// log2 det(I + scale * M M^dagger).
pub fn log2_det_identity_plus(matrix: &CMatrix, scale: f64) -> f64 {
    gram_eigenvalues(matrix)
        .iter()
        .map(|&l| (scale * l).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// Achievable rate (bits/use) with mismatched nearest-neighbour decoding
/// on estimate `est`, data sent at `data_power` split over the m inputs.
///
/// A power-controlled estimate is mapped back to the H domain using its own
/// training power before the bound is applied.
pub fn mutual_info_lower_bound(est: &ChannelEstimate, data_power: f64) -> Result<f64> {
    if !(data_power >= 0.0) {
        return invalid("data power must be non-negative");
    }
    let (n, m) = est.estimate.shape();
    if n == 0 || m == 0 {
        return invalid("empty channel estimate");
    }
    if data_power == 0.0 {
        return Ok(0.0);
    }
    let (scale_sq, var) = if est.power_controlled {
        let pt = est.train_power;
        if !(pt > 0.0) {
            return Ok(0.0);
        }
        (1.0 / pt, est.error_variance / pt)
    } else {
        (1.0, est.error_variance)
    };
    let mismatch = 1.0 + data_power * (n * m) as f64 * var;
    let scale = data_power / m as f64 * scale_sq / mismatch;
    let v = log2_det_identity_plus(&est.estimate, scale);
    Ok(if v.is_nan() { 0.0 } else { v })
}

/// Normalised received power measured over a window of `window` symbols on
/// `rows` receive antennas: signal power `signal` plus unit-mean noise.
/// The noiseless value is exactly `signal`.
pub fn received_power(signal: f64, rows: usize, window: usize, noise: &mut dyn NoiseSource) -> f64 {
    let entries = (window.max(1) * rows.max(1)) as f64;
    let w0 = noise.complex_normal();
    let rest = noise.energy(window.max(1) * rows.max(1) - 1);
    if !signal.is_finite() {
        return signal;
    }
    let amp = Complex64::new((signal * entries).sqrt(), 0.0) + w0;
    (amp.norm_sqr() + rest) / entries
}

/// Power received through `channel` when every transmit antenna sends a
/// detection sequence at `transmit_power`: P * ||C||_F^2 plus noise.
pub fn received_energy(
    transmit_power: f64,
    channel: &CMatrix,
    window: usize,
    noise: &mut dyn NoiseSource,
) -> f64 {
    let gain: f64 = channel.iter().map(|v| v.norm_sqr()).sum();
    let signal = if transmit_power == 0.0 { 0.0 } else { transmit_power * gain };
    received_power(signal, channel.nrows(), window, noise)
}

/// Maps a measured power to the index of the candidate codeword.
///
/// `candidates` holds ascending power exponents, `None` meaning silence.
/// The decision is the largest `j` whose threshold is met, where the
/// threshold of candidate `j >= 1` is snr^(max(c_{j-1}, 0) + offset): a
/// margin above the next weaker codeword, with silence counted as 0.
pub fn map_power_detect(
    energy: f64,
    candidates: &[Option<f64>],
    offset: f64,
    snr: f64,
) -> Result<usize> {
    if candidates.is_empty() {
        return invalid("no candidate codewords");
    }
    let mut prev = f64::NEG_INFINITY;
    for c in candidates {
        let e = c.unwrap_or(f64::NEG_INFINITY);
        if e < prev {
            return invalid("candidate exponents must be ascending");
        }
        prev = e;
    }
    let mut best = 0;
    for j in 1..candidates.len() {
        let base = candidates[j - 1].unwrap_or(0.0).max(0.0);
        if energy >= snr.powf(base + offset) {
            best = j;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tdd_pair_is_transposed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = sample_fading_pair(2, 3, Duplex::Tdd, &mut rng).unwrap();
        assert_eq!(p.forward.shape(), (3, 2));
        assert_eq!(p.backward, p.forward.transpose());
        let f = sample_fading_pair(2, 3, Duplex::Fdd, &mut rng).unwrap();
        assert_eq!(f.backward.shape(), (2, 3));
        assert_ne!(f.backward, f.forward.transpose());
    }

    #[test]
    fn zero_antennas_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_fading_pair(0, 1, Duplex::Fdd, &mut rng).is_err());
    }

    #[test]
    fn entry_variance_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut acc = 0.0;
        let n = 20000;
        for _ in 0..n {
            let p = sample_fading_pair(1, 1, Duplex::Fdd, &mut rng).unwrap();
            acc += p.forward[(0, 0)].norm_sqr();
        }
        assert!((acc / n as f64 - 1.0).abs() < 0.03);
    }

    #[test]
    fn noiseless_mmse_shrinks() {
        let h = CMatrix::from_element(1, 1, c(1.0));
        let e = mmse_estimate(&h, 100.0, &mut Noiseless).unwrap();
        assert!((e.estimate[(0, 0)].re - 100.0 / 101.0).abs() < 1e-12);
        assert!((e.error_variance - 1.0 / 101.0).abs() < 1e-15);
        let z = mmse_estimate(&h, 0.0, &mut Noiseless).unwrap();
        assert_eq!(z.estimate[(0, 0)], c(0.0));
    }

    #[test]
    fn eigen_profile_of_diagonal() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = c(1e-2);
        h[(1, 1)] = c(1.0);
        let p = eigen_profile(&h, 1e4).unwrap();
        assert!((p.lambda[0] - 1e-4).abs() < 1e-16);
        assert!((p.lambda[1] - 1.0).abs() < 1e-12);
        assert!((p.alpha[0] - 1.0).abs() < 1e-9);
        assert!(p.alpha[1].abs() < 1e-9);
    }

    #[test]
    fn eigen_profile_matches_general_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(2, 2), (3, 2), (2, 4), (3, 3)] {
            let p = sample_fading_pair(m, n, Duplex::Fdd, &mut rng).unwrap();
            let h = &p.forward;
            let ev = gram_eigenvalues(h);
            assert_eq!(ev.len(), m.min(n));
            let g = h * h.adjoint();
            let tr: f64 = (0..n).map(|i| g[(i, i)].re).sum();
            assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_with_perfect_csi() {
        let h = CMatrix::from_element(1, 1, c(1.0));
        let est = ChannelEstimate::perfect(&h);
        let v = mutual_info_lower_bound(&est, 100.0).unwrap();
        assert!((v - 101f64.log2()).abs() < 1e-12);
        assert_eq!(mutual_info_lower_bound(&est, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rate_with_power_controlled_estimate() {
        let h = CMatrix::from_element(1, 1, c(1.0));
        let p = 100.0;
        let est = power_controlled_estimate(&h, p, &mut Noiseless).unwrap();
        // estimate of sqrt(P) h is P/(1+P) * sqrt(P); error variance P/(1+P).
        let g2 = (p / (1.0 + p)).powi(2) * p;
        let want = (1.0 + g2 / (1.0 + p / (1.0 + p))).log2();
        let v = mutual_info_lower_bound(&est, p).unwrap();
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn received_energy_noiseless() {
        let h = CMatrix::from_element(1, 1, c(1.0));
        assert_eq!(received_energy(1e4, &h, 64, &mut Noiseless), 1e4);
        assert_eq!(received_energy(0.0, &h, 64, &mut Noiseless), 0.0);
    }

    #[test]
    fn received_energy_noise_mean_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h = CMatrix::from_element(1, 1, c(1.0));
        let mut acc = 0.0;
        for _ in 0..2000 {
            acc += received_energy(3.0, &h, 16, &mut GaussianNoise(&mut rng));
        }
        assert!((acc / 2000.0 - 4.0).abs() < 0.05);
    }

    #[test]
    fn detection_thresholds() {
        let snr = 1e4;
        let cands = [None, Some(1.0)];
        assert_eq!(map_power_detect(1e4, &cands, 0.05, snr).unwrap(), 1);
        assert_eq!(map_power_detect(1.0, &cands, 0.05, snr).unwrap(), 0);
        assert_eq!(map_power_detect(0.0, &cands, 0.0, snr).unwrap(), 0);
        let lvls = [Some(0.0), Some(1.0), Some(2.0)];
        assert_eq!(map_power_detect(0.5, &lvls, 0.01, snr).unwrap(), 0);
        assert_eq!(map_power_detect(5.0, &lvls, 0.01, snr).unwrap(), 1);
        assert_eq!(map_power_detect(2e4, &lvls, 0.01, snr).unwrap(), 2);
        assert_eq!(map_power_detect(snr.powf(1.1), &[Some(0.0), Some(1.0)], 0.05, snr).unwrap(), 1);
        assert!(map_power_detect(1.0, &[Some(2.0), Some(1.0)], 0.0, snr).is_err());
    }

    #[test]
    fn scripted_noise_replays() {
        let mut s = ScriptedNoise::new([c(1.0), c(-2.0)]);
        assert_eq!(s.complex_normal(), c(1.0));
        assert_eq!(s.complex_normal(), c(-2.0));
        assert_eq!(s.complex_normal(), c(0.0));
    }
}
