//! Composite Simpson quadrature on uniform samples.

use crate::error::{Error, Result};

/// Integral of uniformly spaced samples with spacing `h`.
///
/// Odd sample counts use the composite 1/3 rule; even counts finish the last
/// four samples with the 3/8 rule.
pub fn simpson(ys: &[f64], h: f64) -> Result<f64> {
    let n = ys.len();
    if n < 3 {
        return Err(Error::InvalidGrid("simpson needs at least 3 samples"));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidGrid("sample spacing must be positive"));
    }
    if n % 2 == 1 {
        return Ok(simpson_odd(ys, h));
    }
    if n == 4 {
        return Ok(three_eighths(ys, h));
    }
    let head = &ys[..n - 3];
    let tail = &ys[n - 4..];
    Ok(simpson_odd(head, h) + three_eighths(tail, h))
}

fn simpson_odd(ys: &[f64], h: f64) -> f64 {
    let n = ys.len();
    let mut s = ys[0] + ys[n - 1];
    for (i, &y) in ys.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    s * h / 3.0
}

fn three_eighths(ys: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (ys[0] + 3.0 * ys[1] + 3.0 * ys[2] + ys[3])
}
