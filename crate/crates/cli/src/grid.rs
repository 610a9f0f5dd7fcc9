//! `N` ranges and decimal parameter grids.
//!
//! Grid points are generated as decimal strings by exact integer
//! arithmetic and only then parsed at the requested precision, so
//! `-0.9..0.9..0.1` hits `0` exactly and never passes through `f64`.

use sixvertex_core::{parse_float, Float};

/// `"5"` or the inclusive range `"2..16"`.
pub fn parse_n_range(s: &str) -> Result<(usize, usize), String> {
    let num = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid lattice size `{x}` in `{s}`"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = num(s)?;
            (n, n)
        }
    };
    if lo == 0 {
        return Err(format!("lattice sizes start at N = 1, got `{s}`"));
    }
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

/// A plain decimal as `(mantissa, fractional digits)`.
fn fixed_point(s: &str) -> Option<(i128, u32)> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 30 {
        return None;
    }
    let digits: i128 = format!("{int}{frac}").trim_start_matches('0').parse().unwrap_or(0);
    Some((if neg { -digits } else { digits }, frac.len() as u32))
}

fn rescale(m: i128, from: u32, to: u32) -> Option<i128> {
    m.checked_mul(10i128.checked_pow(to - from)?)
}

fn render(m: i128, scale: u32) -> String {
    let sign = if m < 0 { "-" } else { "" };
    let digits = format!("{:0>width$}", m.unsigned_abs(), width = scale as usize + 1);
    let (int, frac) = digits.split_at(digits.len() - scale as usize);
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

const MAX_POINTS: i128 = 1_000_000;

/// The decimal strings of `lo..hi..step`, or the single value `s`.
pub fn grid_strings(s: &str) -> Result<Vec<String>, String> {
    let parts: Vec<&str> = s.split("..").collect();
    match parts.len() {
        1 => return Ok(vec![s.trim().to_string()]),
        3 => {}
        _ => return Err(format!("expected a value or `lo..hi..step`, got `{s}`")),
    }
    let plain = |x: &str| {
        fixed_point(x).ok_or_else(|| format!("grid bounds must be plain decimals, got `{x}` in `{s}`"))
    };
    let (lo, hi, step) = (plain(parts[0])?, plain(parts[1])?, plain(parts[2])?);
    let scale = lo.1.max(hi.1).max(step.1);
    let overflow = || format!("grid `{s}` has too many digits");
    let lo = rescale(lo.0, lo.1, scale).ok_or_else(overflow)?;
    let hi = rescale(hi.0, hi.1, scale).ok_or_else(overflow)?;
    let step = rescale(step.0, step.1, scale).ok_or_else(overflow)?;
    if step <= 0 {
        return Err(format!("grid step must be positive in `{s}`"));
    }
    if hi < lo {
        return Err(format!("grid `{s}` runs backwards"));
    }
    if (hi - lo) % step != 0 {
        return Err(format!("grid step does not divide the interval in `{s}`"));
    }
    let count = (hi - lo) / step + 1;
    if count > MAX_POINTS {
        return Err(format!("grid `{s}` has {count} points (limit {MAX_POINTS})"));
    }
    Ok((0..count).map(|i| render(lo + i * step, scale)).collect())
}

/// Grid points parsed at `bits`.
pub fn parse_grid(s: &str, bits: u32) -> Result<Vec<Float>, String> {
    grid_strings(s)?
        .iter()
        .map(|v| parse_float(v, bits).map_err(|e| e.to_string()))
        .collect()
}
