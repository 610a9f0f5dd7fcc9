use rug::Float;

use crate::{Error, Result};

/// Guard bits `g` in the accuracy contract: results returned at `bits`
/// binary digits are accurate to `2^(-bits + g)`.
pub const GUARD_BITS: u32 = 8;

/// Extra bits carried internally on top of the requested precision.
const WORK_BITS: u32 = 32;

/// Binary precision of all real arithmetic in a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::Domain(format!(
                "precision must be at least {} bits, got {bits}",
                Self::MIN_BITS
            )));
        }
        Ok(Precision { bits })
    }

    pub fn bits(self) -> u32 {
        self.bits
    }

    /// Internal working precision.
    pub fn work(self) -> u32 {
        self.bits + WORK_BITS
    }

    /// Same precision plus `extra` bits.
    pub fn raised(self, extra: u32) -> Precision {
        Precision {
            bits: self.bits + extra,
        }
    }

    /// `2^(-bits + GUARD_BITS)`, the documented accuracy of specfun results.
    pub fn tolerance(self) -> Float {
        Float::with_val(self.bits, 1) >> (self.bits - GUARD_BITS) as i32
    }

    /// `2^(-e)` at this precision.
    pub fn pow2_neg(self, e: u32) -> Float {
        Float::with_val(self.work(), 1) >> e as i32
    }

    pub fn float<T>(self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    /// Number of decimal digits carried by `bits` binary digits.
    pub fn decimal_digits(self) -> usize {
        (self.bits as f64 * std::f64::consts::LOG10_2).floor() as usize
    }
}

/// Parses a decimal string (or `pi`, `pi/3`, `2*pi/5`, `-pi/4`) directly to
/// a float at `bits` precision, with no intermediate `f64`.
pub fn parse_float(s: &str, bits: u32) -> Result<Float> {
    let s = s.trim();
    let err = || Error::Domain(format!("cannot parse number `{s}`"));
    if s.is_empty() {
        return Err(err());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    let value = if body.contains("pi") {
        let (num, den) = match body.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (body, None),
        };
        let coeff = match num.strip_suffix("pi").map(str::trim) {
            Some("") => Float::with_val(bits, 1),
            Some(c) => {
                let c = c.strip_suffix('*').map(str::trim).ok_or_else(err)?;
                plain_decimal(c, bits).ok_or_else(err)?
            }
            None => return Err(err()),
        };
        let mut v = coeff * Float::with_val(bits, rug::float::Constant::Pi);
        if let Some(d) = den {
            v /= plain_decimal(d, bits).ok_or_else(err)?;
        }
        v
    } else {
        plain_decimal(body, bits).ok_or_else(err)?
    };
    Ok(if neg { -value } else { value })
}

fn plain_decimal(s: &str, bits: u32) -> Option<Float> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c)) {
        return None;
    }
    Float::parse(s).ok().map(|v| Float::with_val(bits, v))
}
