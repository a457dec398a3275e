//! File formats: results tables, tradeoff curves, fit plots, run
//! configuration files and transcript logs.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::montecarlo::{SimResult, SlopeFit};
use crate::protocol::{ProtocolKind, Transcript};

pub const RESULTS_HEADER: &str =
    "protocol,m,n,K,r,epsilon,delta,snr_db,trials,outages,rate,ci_lo,ci_hi,tx_energy_mean,rx_energy_mean,seed";
pub const RESULTS_COMMENT: &str = "# snr_linear = 10^(snr_db/10)";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Results table as CSV, preceded by a comment line on the SNR convention.
pub fn results_to_csv(results: &[SimResult]) -> Result<String> {
    let mut wtr = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in results {
        wtr.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    if results.is_empty() {
        wtr.write_record(RESULTS_HEADER.split(',')).map_err(|e| Error::Io(e.to_string()))?;
    }
    let body = wtr.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let body = String::from_utf8(body).map_err(|e| Error::Io(e.to_string()))?;
    Ok(format!("{RESULTS_COMMENT}\n{body}"))
}

/// Parses a results table written by [`results_to_csv`]. Lines starting
/// with `#` are ignored; the header must match exactly.
pub fn parse_results_csv(text: &str) -> Result<Vec<SimResult>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let got: Vec<&str> = header.iter().collect();
    let want: Vec<&str> = RESULTS_HEADER.split(',').collect();
    if got != want {
        return Err(parse_err(1, format!("unexpected header `{}`", got.join(","))));
    }
    let mut out = Vec::new();
    for rec in rdr.deserialize::<SimResult>() {
        let r = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        out.push(r);
    }
    Ok(out)
}

pub fn results_to_json(results: &[SimResult]) -> Result<String> {
    serde_json::to_string_pretty(results).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_results_json(text: &str) -> Result<Vec<SimResult>> {
    serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))
}

/// Reads a results file in either format, chosen by its first character.
pub fn parse_results(text: &str) -> Result<Vec<SimResult>> {
    if text.trim_start().starts_with('[') {
        parse_results_json(text)
    } else {
        parse_results_csv(text)
    }
}

/// Curve table with header `r,d`.
pub fn curve_to_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from("r,d\n");
    for (r, d) in points {
        let _ = writeln!(s, "{r},{d}");
    }
    s
}

pub fn parse_curve_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "r,d")) => {}
        _ => return Err(parse_err(1, "expected header `r,d`")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| parse_err(i + 1, "expected two fields"))?;
        let r: f64 = a.parse().map_err(|_| parse_err(i + 1, format!("bad number `{a}`")))?;
        let d: f64 = b.parse().map_err(|_| parse_err(i + 1, format!("bad number `{b}`")))?;
        out.push((r, d));
    }
    Ok(out)
}

/// Plot table of a slope fit: data points and the fitted line.
pub fn fit_to_csv(fit: &SlopeFit) -> String {
    let mut s = String::from("log10_snr,log10_rate,fit\n");
    for &(x, y) in &fit.points {
        let _ = writeln!(s, "{x},{y},{}", fit.intercept + fit.slope * x);
    }
    s
}

/// Settings that may be given in a configuration file. Command-line flags
/// override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub protocol: Option<String>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    #[serde(alias = "K")]
    pub k: Option<usize>,
    pub r: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub snr_db: Option<f64>,
    pub snr_grid_db: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<String>,
    pub format: Option<String>,
    pub noiseless: Option<bool>,
    pub dump_transcripts: Option<u64>,
    pub detect_window: Option<usize>,
}

/// Parses a TOML run configuration, e.g.
///
/// ```text
/// protocol = "fdd-1bit"
/// m = 1
/// snr_grid_db = [15, 20, 25]
/// ```
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        parse_err(line, e.message().to_string())
    })?;
    if let Some(p) = &cfg.protocol {
        p.parse::<ProtocolKind>()?;
    }
    Ok(cfg)
}

pub fn config_to_toml(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Io(e.to_string()))
}

/// One line of a transcript log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptLine {
    pub trial: u64,
    pub protocol: ProtocolKind,
    pub snr_db: f64,
    #[serde(flatten)]
    pub transcript: Transcript,
}

/// Line-delimited JSON, one trial per line.
pub fn transcripts_to_jsonl(lines: &[TranscriptLine]) -> Result<String> {
    let mut s = String::new();
    for l in lines {
        s.push_str(&serde_json::to_string(l).map_err(|e| Error::Io(e.to_string()))?);
        s.push('\n');
    }
    Ok(s)
}

pub fn parse_transcripts_jsonl(text: &str) -> Result<Vec<TranscriptLine>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| parse_err(i + 1, e.to_string())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{Direction, RoundRecord};

    fn sample() -> SimResult {
        SimResult {
            protocol: ProtocolKind::Fdd1Bit,
            m: 1,
            n: 1,
            k: 2,
            r: 0.5,
            epsilon: 0.1,
            delta: 0.05,
            snr_db: 20.0,
            trials: 1000,
            outages: 7,
            rate: 0.007,
            ci_lo: 0.003,
            ci_hi: 0.0144,
            tx_energy_mean: 123.456,
            rx_energy_mean: 0.25,
            seed: 42,
        }
    }

    #[test]
    fn results_roundtrip_is_byte_identical() {
        let text = results_to_csv(&[sample(), sample()]).unwrap();
        assert!(text.starts_with(RESULTS_COMMENT));
        assert_eq!(text.lines().nth(1).unwrap(), RESULTS_HEADER);
        let back = parse_results_csv(&text).unwrap();
        assert_eq!(back, vec![sample(), sample()]);
        assert_eq!(results_to_csv(&back).unwrap(), text);
        let json = results_to_json(&back).unwrap();
        assert_eq!(parse_results(&json).unwrap(), back);
    }

    #[test]
    fn empty_results_keep_header() {
        let text = results_to_csv(&[]).unwrap();
        assert_eq!(parse_results_csv(&text).unwrap(), vec![]);
        assert_eq!(results_to_csv(&[]).unwrap(), text);
    }

    #[test]
    fn bad_results_rejected() {
        assert!(parse_results_csv("a,b\n1,2\n").is_err());
        let mut text = results_to_csv(&[sample()]).unwrap();
        text.push_str("fdd-1bit,1,1,2,zzz\n");
        assert!(parse_results_csv(&text).is_err());
    }

    #[test]
    fn curve_roundtrip() {
        let pts = vec![(0.0, 4.0), (1.0, 1.0), (2.0, 0.0)];
        let s = curve_to_csv(&pts);
        assert_eq!(s, "r,d\n0,4\n1,1\n2,0\n");
        assert_eq!(parse_curve_csv(&s).unwrap(), pts);
    }

    #[test]
    fn config_parses_and_rejects() {
        let c = parse_config("protocol = \"fdd-1bit\"\nm = 2\nsnr_grid_db = [15.0, 20.0]\nK = 3\n").unwrap();
        assert_eq!(c.m, Some(2));
        assert_eq!(c.k, Some(3));
        assert_eq!(c.snr_grid_db, Some(vec![15.0, 20.0]));
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("protocol = \"nope\"").is_err());
        let back = parse_config(&config_to_toml(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn transcripts_roundtrip() {
        let t = Transcript {
            rounds: vec![
                RoundRecord { round: 1, direction: Direction::Forward, power_exponent: Some(1.0), q: None, q_hat: None },
                RoundRecord { round: 2, direction: Direction::Reverse, power_exponent: None, q: Some(1), q_hat: Some(1) },
            ],
            data_power_exponent: 1.5,
            tx_energy: 10.0,
            rx_energy: 0.0,
            mutual_info: 3.0,
            outage: false,
        };
        let lines = vec![TranscriptLine { trial: 0, protocol: ProtocolKind::FddIterative, snr_db: 20.0, transcript: t }];
        let s = transcripts_to_jsonl(&lines).unwrap();
        assert!(s.contains("\"power_exponent\":null"));
        assert!(s.contains("\"direction\":\"reverse\""));
        assert_eq!(parse_transcripts_jsonl(&s).unwrap(), lines);
        assert!(parse_transcripts_jsonl("{\"trial\":").is_err());
    }
}
