//! Closed-form diversity-multiplexing tradeoff curves.
//!
//! Everything here is a piecewise-linear function of the multiplexing gain
//! `r` for an `m` x `n` link. `G(r, p)` is the outage tradeoff of a link
//! whose SNR is raised to the power `p`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

const TOL: f64 = 1e-12;

fn check_dims(m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return invalid("antenna counts must be at least 1");
    }
    Ok(m.min(n))
}

/// G(r, p): linear interpolation through (k p, p (m-k)(n-k)), k = 0..min(m,n).
pub fn g_function(r: f64, p: f64, m: usize, n: usize) -> Result<f64> {
    let d = check_dims(m, n)?;
    if !(p > 0.0) || !p.is_finite() {
        return invalid(format!("power exponent p must be positive and finite, got {p}"));
    }
    let max = d as f64 * p;
    if !(r >= -TOL) || r > max * (1.0 + TOL) + TOL {
        return Err(Error::OutOfRange { r, max });
    }
    let r = r.clamp(0.0, max);
    let k = ((r / p).floor() as usize).min(d.saturating_sub(1));
    let x0 = k as f64 * p;
    let y0 = p * ((m - k) * (n - k)) as f64;
    let y1 = p * ((m - k - 1) * (n - k - 1)) as f64;
    Ok(y0 + (y1 - y0) * (r - x0) / p)
}

/// G(r, p) with the right-endpoint convention: zero beyond min(m,n) p.
pub fn g_function_clamped(r: f64, p: f64, m: usize, n: usize) -> Result<f64> {
    let d = check_dims(m, n)?;
    if r > d as f64 * p {
        return Ok(0.0);
    }
    g_function(r, p, m, n)
}

/// G_0 = 0, G_u = G(r, 1 + G_{u-1}).
pub fn g_iterated(r: f64, k: usize, m: usize, n: usize) -> Result<f64> {
    let mut g = 0.0;
    for _ in 0..k {
        g = g_function(r, 1.0 + g, m, n)?;
    }
    Ok(g)
}

/// c_M = ((r - m + 1) / m)^+.
pub fn c_m(r: f64, m: usize) -> f64 {
    ((r - m as f64 + 1.0) / m as f64).max(0.0)
}

/// W_1 = 0, W_2 = mn + G(r, mn), W_k = mn (1 + W_{k-1}) - eps.
pub fn w_k(r: f64, k: usize, m: usize, n: usize, eps: f64) -> Result<f64> {
    if k == 0 {
        return invalid("W_k is defined for k >= 1");
    }
    if k == 1 {
        return Ok(0.0);
    }
    let mn = (m * n) as f64;
    let mut w = mn + g_function(r, mn, m, n)?;
    for _ in 3..=k {
        w = mn * (1.0 + w) - eps;
    }
    Ok(w)
}

pub fn dmt_no_csit(r: f64, m: usize, n: usize) -> Result<f64> {
    g_function(r, 1.0, m, n)
}

pub fn dmt_fdd_1bit(r: f64, m: usize, n: usize) -> Result<f64> {
    g_iterated(r, 2, m, n)
}

/// min{ G(r, 1 + G(r, 1 + c_M)), G_K(r) }.
pub fn dmt_fdd_klevel(r: f64, k: usize, m: usize, n: usize) -> Result<f64> {
    if k < 2 {
        return invalid("K-level feedback needs K >= 2");
    }
    let d = check_dims(m, n)?;
    let inner = g_function(r, 1.0 + c_m(r, d), m, n)?;
    let a = g_function(r, 1.0 + inner, m, n)?;
    Ok(a.min(g_iterated(r, k, m, n)?))
}

/// G_K(r). K = 1 means no feedback round, giving G(r, 1).
pub fn dmt_fdd_iterative(r: f64, k: usize, m: usize, n: usize) -> Result<f64> {
    if k < 1 {
        return invalid("iterative feedback needs K >= 1");
    }
    g_iterated(r, k, m, n)
}

/// mn(2 - r) for r < 1, G(r, 1) for 1 <= r <= min(m, n).
pub fn dmt_tdd_15(r: f64, m: usize, n: usize) -> Result<f64> {
    let d = check_dims(m, n)? as f64;
    if !(r >= 0.0) || r > d {
        return Err(Error::OutOfRange { r, max: d });
    }
    if r < 1.0 {
        Ok((m * n) as f64 * (2.0 - r))
    } else {
        g_function(r, 1.0, m, n)
    }
}

/// mn((mn)^K - 1)/(mn - 1) - (mn)^(K-2)(m + n - 1) r, or K - r when mn = 1.
pub fn dmt_tdd_iterative(r: f64, k: usize, m: usize, n: usize) -> Result<f64> {
    if k < 2 {
        return invalid("iterative TDD needs K >= 2");
    }
    let d = check_dims(m, n)? as f64;
    if !(r >= 0.0) || r > d {
        return Err(Error::OutOfRange { r, max: d });
    }
    let mn = (m * n) as f64;
    if m * n == 1 {
        return Ok(k as f64 - r);
    }
    let k = k as i32;
    Ok(mn * (mn.powi(k) - 1.0) / (mn - 1.0) - mn.powi(k - 2) * (m + n - 1) as f64 * r)
}

/// G_K(r): the tradeoff with K levels of perfect quantised feedback.
pub fn dmt_quantized_perfect(r: f64, k: usize, m: usize, n: usize) -> Result<f64> {
    g_iterated(r, k, m, n)
}

/// The two expressions of the single-round error exponent:
/// `mn p + G(r, 1 + (mn - 1) p)` and `mn(1 + p mn) - (m + n - 1) r`.
pub fn training_outage_exponent(r: f64, p: f64, m: usize, n: usize) -> Result<(f64, f64)> {
    let mn = (m * n) as f64;
    let via_g = mn * p + g_function(r, 1.0 + (mn - 1.0) * p, m, n)?;
    let closed = mn * (1.0 + p * mn) - (m + n - 1) as f64 * r;
    Ok((via_g, closed))
}

/// Feedback bits needed to reach the infinite-resolution tradeoff:
/// log2(K + 3) with K = max{u >= 0 : c_M > G_u(r)}, or 1 bit when
/// r <= min(m, n) - 1.
pub fn bits_about_channel(r: f64, m: usize, n: usize) -> Result<f64> {
    let d = check_dims(m, n)?;
    if !(r >= 0.0) || r >= d as f64 {
        return Err(Error::OutOfRange { r, max: d as f64 });
    }
    let cm = c_m(r, d);
    if cm <= 0.0 {
        return Ok(1.0);
    }
    let mut k = 0usize;
    let mut g = 0.0;
    loop {
        g = g_function(r, 1.0 + g, m, n)?;
        if cm > g + TOL {
            k += 1;
        } else {
            break;
        }
        if k > 1_000_000 {
            return invalid("bit count does not converge");
        }
    }
    Ok(((k + 3) as f64).log2())
}

/// Curves that `curve` can draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    NoCsit,
    Fdd1Bit,
    FddKLevel,
    FddIterative,
    Tdd15,
    TddIterative,
    QuantizedPerfect,
}

impl CurveKind {
    pub const ALL: [CurveKind; 7] = [
        CurveKind::NoCsit,
        CurveKind::Fdd1Bit,
        CurveKind::FddKLevel,
        CurveKind::FddIterative,
        CurveKind::Tdd15,
        CurveKind::TddIterative,
        CurveKind::QuantizedPerfect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::NoCsit => "no-csit",
            CurveKind::Fdd1Bit => "fdd-1bit",
            CurveKind::FddKLevel => "fdd-klevel",
            CurveKind::FddIterative => "fdd-iterative",
            CurveKind::Tdd15 => "tdd-1p5",
            CurveKind::TddIterative => "tdd-iterative",
            CurveKind::QuantizedPerfect => "quantized-perfect",
        }
    }

    /// Tradeoff value at `r`.
    pub fn eval(self, r: f64, m: usize, n: usize, k: usize) -> Result<f64> {
        match self {
            CurveKind::NoCsit => dmt_no_csit(r, m, n),
            CurveKind::Fdd1Bit => dmt_fdd_1bit(r, m, n),
            CurveKind::FddKLevel => dmt_fdd_klevel(r, k, m, n),
            CurveKind::FddIterative => dmt_fdd_iterative(r, k, m, n),
            CurveKind::Tdd15 => dmt_tdd_15(r, m, n),
            CurveKind::TddIterative => dmt_tdd_iterative(r, k, m, n),
            CurveKind::QuantizedPerfect => dmt_quantized_perfect(r, k, m, n),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn normalize_name(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('_', "-")
}

impl FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = normalize_name(s);
        let kind = match k.as_str() {
            "no-csit" | "nocsit" => CurveKind::NoCsit,
            "fdd-1bit" | "fdd-1bit-1p5" => CurveKind::Fdd1Bit,
            "fdd-klevel" | "fdd-klevel-1p5" => CurveKind::FddKLevel,
            "fdd-iterative" => CurveKind::FddIterative,
            "tdd-1p5" | "tdd-15" => CurveKind::Tdd15,
            "tdd-iterative" => CurveKind::TddIterative,
            "quantized-perfect" | "quantizedperfect" => CurveKind::QuantizedPerfect,
            _ => return Err(Error::UnknownProtocol(s.to_string())),
        };
        Ok(kind)
    }
}

fn tidy(x: f64) -> f64 {
    let t = (x * 1e9).round() / 1e9;
    if t == 0.0 {
        0.0
    } else {
        t
    }
}

/// Slope breakpoints of a continuous piecewise-linear function on [lo, hi],
/// located by intersecting the lines on either side of each slope change.
fn find_knots(f: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<Vec<f64>> {
    const N: usize = 4096;
    let h = (hi - lo) / N as f64;
    let xs: Vec<f64> = (0..=N).map(|i| lo + h * i as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let slope = |i: usize| (ys[i + 1] - ys[i]) / h;
    let scale = ys.iter().fold(1.0f64, |a, &y| a.max(y.abs()));
    let tol = 1e-7 * scale / h.max(1e-12) * h;
    let mut knots = Vec::new();
    let mut i = 2;
    while i + 2 < N {
        if (slope(i) - slope(i - 1)).abs() > tol.max(1e-9) {
            // Line left of the change and line right of it.
            let sl = slope(i - 2);
            let mut j = i + 1;
            while j + 1 < N && (slope(j) - slope(j + 1)).abs() > tol.max(1e-9) {
                j += 1;
            }
            let sr = slope(j.min(N - 1));
            let x = if (sl - sr).abs() > 1e-12 {
                let bl = ys[i - 2] - sl * xs[i - 2];
                let br = ys[j] - sr * xs[j];
                (br - bl) / (sl - sr)
            } else {
                xs[i]
            };
            knots.push(tidy(x.clamp(xs[i - 2], xs[j + 1])));
            i = j + 2;
        } else {
            i += 1;
        }
    }
    Ok(knots)
}

/// Points of a tradeoff curve: a regular grid of spacing `r_step` on
/// [0, min(m,n)] merged with the curve's knots. At a jump the left limit is
/// emitted first, then the value at the jump.
pub fn curve_points(kind: CurveKind, m: usize, n: usize, k: usize, r_step: f64) -> Result<Vec<(f64, f64)>> {
    let d = check_dims(m, n)? as f64;
    if !(r_step > 0.0) {
        return invalid("r_step must be positive");
    }
    kind.eval(0.0, m, n, k)?;
    let f = |r: f64| kind.eval(r, m, n, k);
    let mut rs: Vec<f64> = Vec::new();
    let steps = (d / r_step + 1e-9).floor() as usize;
    for i in 0..=steps {
        rs.push(tidy(i as f64 * r_step));
    }
    rs.push(d);
    let mut jumps = Vec::new();
    if kind == CurveKind::Tdd15 && d >= 1.0 {
        jumps.push(1.0);
        if d > 1.0 {
            rs.extend(find_knots(&f, 0.0, 1.0)?);
            rs.extend(find_knots(&f, 1.0, d)?);
        }
    } else {
        rs.extend(find_knots(&f, 0.0, d)?);
    }
    rs.extend(jumps.iter().copied());
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut out = Vec::with_capacity(rs.len() + 1);
    for r in rs {
        if jumps.iter().any(|&j| (j - r).abs() < 1e-12) {
            out.push((r, (m * n) as f64 * (2.0 - r)));
        }
        out.push((r, f(r)?));
    }
    Ok(out)
}
