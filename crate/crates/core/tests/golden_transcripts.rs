//! Noiseless transcripts traced by hand. Each case lists the expected power
//! exponent of every transmission (`None` for silence), the q / q_hat pairs,
//! the data exponent and the outage flag. Rate values come from the scalar
//! closed form log2(1 + g^2 P |h|^2 / (1 + g)), g = P / (1 + P), evaluated
//! separately and frozen here.

use dmtlab::channel::{mutual_info_lower_bound, ChannelEstimate, CMatrix, Duplex, FadingPair, Noiseless, ScriptedNoise};
use dmtlab::dmt::{g_function, w_k};
use dmtlab::protocol::{klevel_exponents, run_protocol, Direction, ProtocolConfig, ProtocolKind, Transcript};
use num_complex::Complex64;

const EXP_TOL: f64 = 1e-12;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// SISO run with |h|^2 = snr^-alpha forward. The FDD feedback link has
/// unit gain; TDD uses the same h both ways.
fn trace(kind: ProtocolKind, snr: f64, alpha: f64, k: usize, r: f64, eps: f64, delta: f64) -> Transcript {
    let h = c(snr.powf(-alpha / 2.0));
    let back = if kind.duplex() == Duplex::Tdd { h } else { c(1.0) };
    let pair = FadingPair::siso(h, back, kind.duplex());
    let mut cfg = ProtocolConfig::new(kind, 1, 1, k, r, eps, delta, snr);
    cfg.noiseless = true;
    run_protocol(&pair, &cfg, &mut Noiseless).unwrap()
}

type Row = (Direction, Option<f64>, Option<u32>, Option<u32>);

fn check(t: &Transcript, rows: &[Row], data: f64, outage: bool) {
    assert_eq!(t.rounds.len(), rows.len(), "{t:#?}");
    for (i, (rec, want)) in t.rounds.iter().zip(rows).enumerate() {
        assert_eq!(rec.round as usize, i + 1);
        assert_eq!(rec.direction, want.0, "round {}", i + 1);
        match (rec.power_exponent, want.1) {
            (Some(a), Some(b)) => assert!((a - b).abs() < EXP_TOL, "round {}: exponent {a} vs {b}", i + 1),
            (a, b) => assert_eq!(a, b, "round {}", i + 1),
        }
        assert_eq!(rec.q, want.2, "round {} q", i + 1);
        assert_eq!(rec.q_hat, want.3, "round {} q_hat", i + 1);
    }
    assert!((t.data_power_exponent - data).abs() < EXP_TOL, "data {} vs {data}", t.data_power_exponent);
    assert_eq!(t.outage, outage);
}

fn close(a: f64, b: f64) {
    assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{a} vs {b}");
}

use Direction::{Forward as F, Reverse as R};

#[test]
fn fdd_1bit_good_channel() {
    let t = trace(ProtocolKind::Fdd1Bit, 1e4, 0.0, 2, 0.5, 0.05, 0.01);
    check(&t, &[(F, Some(1.0), None, None), (R, Some(0.0), Some(0), Some(0)), (F, Some(1.0), None, None)], 1.0, false);
    close(t.mutual_info, 12.28778453774138);
}

#[test]
fn fdd_1bit_deep_fade_stays_in_outage() {
    let t = trace(ProtocolKind::Fdd1Bit, 1e4, 2.0, 2, 0.5, 0.05, 0.01);
    check(&t, &[(F, Some(1.0), None, None), (R, Some(1.45), Some(1), Some(1)), (F, Some(1.45), None, None)], 1.45, true);
    close(t.mutual_info, 0.004544220096685304);
}

#[test]
fn fdd_1bit_boost_rescues_moderate_fade() {
    let t = trace(ProtocolKind::Fdd1Bit, 1e4, 0.8, 2, 0.5, 0.05, 0.01);
    check(&t, &[(F, Some(1.0), None, None), (R, Some(1.45), Some(1), Some(1)), (F, Some(1.45), None, None)], 1.45, false);
    close(t.mutual_info, 7.644239261437754);
}

#[test]
fn rate_boundary_is_classified_strictly() {
    // |h|^2 = snr^(r - 1): with exact knowledge the rate is log2(1 + snr^r),
    // just above R; the power-controlled estimate loses a factor of about
    // two and lands below it.
    let snr: f64 = 1e4;
    let r = 0.5;
    let h = CMatrix::from_element(1, 1, c(snr.powf((r - 1.0) / 2.0)));
    let exact = mutual_info_lower_bound(&ChannelEstimate::perfect(&h), snr).unwrap();
    assert!(exact > r * snr.log2());
    let t = trace(ProtocolKind::NoCsit, snr, 1.0 - r, 2, r, 0.1, 0.05);
    assert!(t.outage);
    close(t.mutual_info, 5.672213190087574);
    // The one-bit scheme sees the same channel as bad at r + eps and boosts.
    let t = trace(ProtocolKind::Fdd1Bit, snr, 1.0 - r, 2, r, 0.05, 0.01);
    assert_eq!(t.rounds[1].q, Some(1));
    assert!(!t.outage);
}

#[test]
fn klevel_middle_level() {
    let r = 1.0 / 6.0;
    let t = trace(ProtocolKind::FddKLevel, 1e6, 0.9, 3, r, 0.05, 0.02);
    let data = 1.0 + r - 0.02;
    check(&t, &[(F, Some(1.0), None, None), (R, Some(0.0), Some(1), Some(1)), (F, Some(data), None, None)], data, false);
    close(t.mutual_info, 4.008966884223375);
}

#[test]
fn klevel_top_level() {
    let r = 1.0 / 6.0;
    let t = trace(ProtocolKind::FddKLevel, 1e6, 1.5, 3, r, 0.05, 0.02);
    let top = 1.0 + g_function(r + 0.05, 1.0 + r, 1, 1).unwrap();
    close(top, 1.95);
    check(&t, &[(F, Some(1.0), None, None), (R, Some(top), Some(2), Some(2)), (F, Some(top), None, None)], top, false);
    close(t.mutual_info, 7.97495150980904);
    assert!(t.mutual_info >= (1.0 + 1e6f64.sqrt()).log2() - 2.0);
}

#[test]
fn klevel_levels_approach_snr_7_6_and_snr_2() {
    let mut cfg = ProtocolConfig::new(ProtocolKind::FddKLevel, 1, 1, 3, 1.0 / 6.0, 2e-9, 1e-9, 1e6);
    cfg.noiseless = true;
    let (_, _, data) = klevel_exponents(&cfg).unwrap();
    for (a, b) in data.iter().zip([1.0, 7.0 / 6.0, 2.0]) {
        assert!((a - b).abs() < 1e-8, "{data:?}");
    }
}

#[test]
fn klevel_two_levels_match_one_bit_structure() {
    let one = trace(ProtocolKind::Fdd1Bit, 1e4, 2.0, 2, 0.5, 0.05, 0.01);
    let two = trace(ProtocolKind::FddKLevel, 1e4, 2.0, 2, 0.5, 0.05, 0.01);
    assert_eq!(one.rounds.len(), two.rounds.len());
    for (a, b) in one.rounds.iter().zip(&two.rounds) {
        assert_eq!((a.direction, a.q, a.q_hat), (b.direction, b.q, b.q_hat));
    }
    assert_eq!(one.outage, two.outage);
}

#[test]
fn iterative_good_channel_goes_quiet() {
    let t = trace(ProtocolKind::FddIterative, 1e4, 0.0, 3, 0.5, 0.05, 0.02);
    check(
        &t,
        &[
            (F, Some(1.0), None, None),
            (R, Some(1.0), Some(0), Some(0)),
            (F, None, None, None),
            (R, None, Some(1), Some(0)),
            (F, Some(1.0), None, None),
        ],
        1.0,
        false,
    );
    close(t.mutual_info, 12.28778453774138);
}

#[test]
fn iterative_deep_fade() {
    let t = trace(ProtocolKind::FddIterative, 1e4, 2.0, 3, 0.5, 0.05, 0.02);
    let rows = [
        (F, Some(1.0), None, None),
        (R, None, Some(1), Some(1)),
        (F, Some(1.45), None, None),
        (R, None, Some(1), Some(1)),
        (F, Some(1.9), None, None),
    ];
    check(&t, &rows, 1.9, true);
    close(t.mutual_info, 0.26189612469530527);
}

#[test]
fn iterative_moderate_fade() {
    // Round 3 at snr^1.45 sees 1 + snr^0.25 = 11 < snr^0.55 = 158.5, so the
    // receiver still reports bad and the last level snr^1.9 is used.
    let t = trace(ProtocolKind::FddIterative, 1e4, 1.2, 3, 0.5, 0.05, 0.02);
    let rows = [
        (F, Some(1.0), None, None),
        (R, None, Some(1), Some(1)),
        (F, Some(1.45), None, None),
        (R, None, Some(1), Some(1)),
        (F, Some(1.9), None, None),
    ];
    check(&t, &rows, 1.9, false);
    close(t.mutual_info, 8.305964414103698);
}

/// Exponent of snr^(1 - eps) / (P / (1 + P))^2 at P = snr, plus alpha.
fn inversion(snr: f64, eps: f64, alpha: f64) -> f64 {
    let g = snr / (1.0 + snr);
    1.0 - eps - 2.0 * g.ln() / snr.ln() + alpha
}

#[test]
fn tdd_15_unit_gain() {
    let t = trace(ProtocolKind::Tdd15, 1e4, 0.0, 2, 0.5, 0.04, 0.02);
    let p = inversion(1e4, 0.04, 0.0);
    assert!((p - 0.96).abs() < 1e-4);
    check(&t, &[(R, Some(1.0), None, None), (F, Some(p), None, None)], p, false);
}

#[test]
fn tdd_15_inverts_fade() {
    let t = trace(ProtocolKind::Tdd15, 1e4, 1.0, 2, 0.5, 0.04, 0.02);
    let p = inversion(1e4, 0.04, 1.0);
    check(&t, &[(R, Some(1.0), None, None), (F, Some(p), None, None)], p, false);
}

#[test]
fn tdd_15_identity_2x2() {
    let snr: f64 = 1e4;
    let pair = FadingPair::new(CMatrix::identity(2, 2), None, Duplex::Tdd).unwrap();
    let mut cfg = ProtocolConfig::new(ProtocolKind::Tdd15, 2, 2, 2, 0.5, 0.04, 0.02, snr);
    cfg.noiseless = true;
    let t = run_protocol(&pair, &cfg, &mut Noiseless).unwrap();
    let p = inversion(snr, 0.04 / 4.0, 0.0);
    assert!((t.data_power_exponent - p).abs() < EXP_TOL);
    assert!(!t.outage);
}

#[test]
fn tdd_iterative_two_rounds() {
    let snr = 1e4;
    for alpha in [0.0, 1.5] {
        let t = trace(ProtocolKind::TddIterative, snr, alpha, 2, 0.5, 0.05, 0.02);
        let p = inversion(snr, 0.0, alpha);
        check(&t, &[(R, Some(1.0), None, None), (F, Some(p), None, None)], p, false);
    }
}

#[test]
fn tdd_iterative_three_rounds_noiseless() {
    let snr = 1e4;
    let t = trace(ProtocolKind::TddIterative, snr, 1.5, 3, 0.5, 0.05, 0.02);
    let p = inversion(snr, 0.0, 1.5);
    let rows = [
        (R, Some(1.0), None, None),
        (F, Some(p - 0.02), None, None),
        (R, None, Some(0), Some(0)),
        (F, Some(p), None, None),
    ];
    check(&t, &rows, p, false);
}

#[test]
fn tdd_iterative_error_feedback_power() {
    // A unit noise sample on the reverse pilot makes T badly overestimate
    // the channel and under-power its training; R answers at snr^(1 + W_2).
    let snr: f64 = 1e4;
    let pair = FadingPair::siso(c(snr.powf(-0.75)), c(snr.powf(-0.75)), Duplex::Tdd);
    let cfg = ProtocolConfig::new(ProtocolKind::TddIterative, 1, 1, 3, 0.5, 0.05, 0.02, snr);
    let t = run_protocol(&pair, &cfg, &mut ScriptedNoise::new([c(1.0)])).unwrap();
    let fb = 1.0 + (2.0 - 0.5 - 0.05);
    close(1.0 + w_k(0.55, 2, 1, 1, 0.05).unwrap(), fb);
    assert_eq!(t.rounds[2].direction, Direction::Reverse);
    assert_eq!(t.rounds[2].q, Some(1));
    assert_eq!(t.rounds[2].q_hat, Some(1));
    assert!((t.rounds[2].power_exponent.unwrap() - fb).abs() < EXP_TOL);
    // After re-estimating from the answer T uses the true fade.
    assert!((t.data_power_exponent - 2.5).abs() < 1e-6);
}

#[test]
fn genie_csit_power_tracks_fade() {
    let t = trace(ProtocolKind::GenieCsit, 1e4, 3.0, 2, 0.5, 0.04, 0.02);
    check(&t, &[(F, Some(3.96), None, None)], 3.96, false);
}

#[test]
fn genie_csir_unit_gain_uses_level_zero() {
    let t = trace(ProtocolKind::GenieCsir, 1e4, 0.0, 4, 0.5, 0.05, 0.02);
    assert_eq!(t.rounds[0].q, Some(0));
    assert_eq!(t.rounds[0].q_hat, Some(0));
    assert!((t.data_power_exponent - 1.0).abs() < EXP_TOL);
    assert!(!t.outage);
}
