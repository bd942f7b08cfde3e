//! Per-period flows that add up to the resource exactly.
//!
//! `y - x` is generally not representable, so R's flow is carried as a
//! rounded part plus the rounding residual (an error-free two-sum). The
//! identity `r + r_residual + d == y` then holds over the reals and is
//! checked in integer arithmetic on the binary expansions.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Flows {
    pub r: f64,
    pub r_residual: f64,
    pub d: f64,
}

impl Flows {
    pub fn split(y: f64, offer: f64) -> Self {
        let (r, r_residual) = two_sum(y, -offer);
        Flows { r, r_residual, d: offer }
    }

    pub fn r_total(&self) -> f64 {
        self.r + self.r_residual
    }

    /// Exact check of `r + r_residual + d == y`.
    pub fn conserves(&self, y: f64) -> bool {
        sums_exactly(&[self.r, self.r_residual, self.d], y)
    }
}

/// Knuth's two-sum: `s + e == a + b` exactly, with `s = fl(a + b)`.
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bv = s - a;
    let av = s - bv;
    (s, (a - av) + (b - bv))
}

fn decompose(x: f64) -> (i64, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    if exp_bits == 0 {
        (sign * frac, -1074)
    } else {
        (sign * (frac | (1i64 << 52)), exp_bits - 1075)
    }
}

/// Whether the exact real sum of `parts` equals `target`.
pub fn sums_exactly(parts: &[f64], target: f64) -> bool {
    if !target.is_finite() || parts.iter().any(|p| !p.is_finite()) {
        return false;
    }
    let terms: Vec<(i64, i32)> =
        parts.iter().chain(std::iter::once(&-target)).filter(|v| **v != 0.0).map(|v| decompose(*v)).collect();
    if terms.is_empty() {
        return true;
    }
    let lo = terms.iter().map(|t| t.1).min().expect("nonempty");
    let hi = terms.iter().map(|t| t.1).max().expect("nonempty");
    if hi - lo <= 70 {
        let total: i128 = terms.iter().map(|&(m, e)| (m as i128) << (e - lo)).sum();
        return total == 0;
    }
    let total: BigRational = terms
        .iter()
        .map(|&(m, e)| BigRational::from_integer(BigInt::from(m) << (e - lo) as usize))
        .fold(BigRational::from_integer(BigInt::from(0)), |acc, v| acc + v);
    total == BigRational::from_integer(BigInt::from(0))
}
