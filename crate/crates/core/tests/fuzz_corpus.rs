//! Replays the checked-in fuzz seeds through the parsers on stable Rust.

use std::path::PathBuf;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let text = String::from_utf8_lossy(&std::fs::read(&p).unwrap()).into_owned();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn results_seeds() {
    let mut ok = 0;
    for (p, text) in seeds("results_csv") {
        if let Ok(rows) = dmtlab::io::parse_results_csv(&text) {
            assert_eq!(dmtlab::io::results_to_csv(&rows).unwrap(), text, "{}", p.display());
            ok += 1;
        }
    }
    assert!(ok >= 2);
    for (_, text) in seeds("results_json") {
        let _ = dmtlab::io::parse_results(&text);
    }
}

#[test]
fn config_seeds() {
    let parsed: Vec<bool> = seeds("run_config").iter().map(|(_, t)| dmtlab::io::parse_config(t).is_ok()).collect();
    assert!(parsed.iter().any(|&b| b) && parsed.iter().any(|&b| !b));
}

#[test]
fn transcript_seeds() {
    let mut ok = 0;
    for (p, text) in seeds("transcripts_jsonl") {
        if let Ok(lines) = dmtlab::io::parse_transcripts_jsonl(&text) {
            assert_eq!(dmtlab::io::transcripts_to_jsonl(&lines).unwrap(), text, "{}", p.display());
            ok += 1;
        }
    }
    assert!(ok >= 3);
}

#[test]
fn curve_seeds() {
    for (p, text) in seeds("curve_csv") {
        if let Ok(pts) = dmtlab::io::parse_curve_csv(&text) {
            assert_eq!(dmtlab::io::curve_to_csv(&pts), text, "{}", p.display());
        }
    }
}

#[test]
fn name_seeds() {
    for (_, text) in seeds("protocol_name") {
        let _ = text.parse::<dmtlab::protocol::ProtocolKind>();
        let _ = text.parse::<dmtlab::dmt::CurveKind>();
    }
}
