//! Diagnostics over sampled fields and trajectory ensembles: fringes, visibility,
//! momentum plateaus, subspace crossings and numerical marginals.

use alloc::vec::Vec;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::quadrature::simpson;
use crate::states::SuperpositionParams;
use crate::{Coordinate, Point};

/// Fringe reports below this visibility are rejected as [`Error::NoFringes`].
pub const MIN_VISIBILITY: f64 = 0.05;

/// Separation below which two projections count as coincident.
pub const CROSSING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FringeReport {
    pub t: f64,
    /// All interior minima, refined by a parabola through the three nearest samples.
    pub minima: Vec<f64>,
    /// Mean and standard deviation of the spacing between the minima bounding
    /// the central three fringes.
    pub spacing_mean: f64,
    pub spacing_std: f64,
    pub visibility: f64,
}

/// Local minima of `values` with sub-sample parabolic refinement: `(position, value)`.
fn refined_minima(axis: &Axis, values: &[f64]) -> Vec<(f64, f64)> {
    let h = axis.step();
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        if b < a && b <= c {
            let curv = a - 2.0 * b + c;
            let (shift, val) = if curv > 0.0 {
                let s = 0.5 * (a - c) / curv;
                (s, b - 0.25 * (a - c) * s)
            } else {
                (0.0, b)
            };
            out.push((axis.value(i) + shift * h, val));
        }
    }
    out
}

/// Index range `[lo, hi]` of samples between the second minimum on either side
/// of the global maximum (clipped to the slice when fewer minima exist).
fn central_window(axis: &Axis, values: &[f64], minima: &[(f64, f64)]) -> (usize, usize, usize) {
    let peak = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        )
        .0;
    let xp = axis.value(peak);
    let split = minima.partition_point(|m| m.0 < xp);
    let h = axis.step();
    let idx =
        |x: f64| libm::round((x - axis.start) / h).clamp(0.0, (axis.count - 1) as f64) as usize;
    let lo = if split >= 2 {
        idx(minima[split - 2].0)
    } else {
        0
    };
    let hi = if split + 1 < minima.len() {
        idx(minima[split + 1].0)
    } else {
        values.len() - 1
    };
    (lo, hi, split)
}

/// `(ρ_max − ρ_min)/(ρ_max + ρ_min)` over the central three fringes. A slice with
/// no interior minimum has no fringes and visibility 0.
pub fn visibility(axis: &Axis, values: &[f64]) -> Result<f64> {
    check_slice(axis, values)?;
    let minima = refined_minima(axis, values);
    if minima.is_empty() {
        return Ok(0.0);
    }
    let (lo, hi, _) = central_window(axis, values, &minima);
    let window = &values[lo..=hi];
    let max = window
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let (xl, xh) = (axis.value(lo), axis.value(hi));
    let min = minima
        .iter()
        .filter(|m| m.0 >= xl && m.0 <= xh)
        .map(|m| m.1.max(0.0))
        .chain(window.iter().copied().filter(|v| v.is_finite()))
        .fold(f64::INFINITY, f64::min);
    if !(max > 0.0) {
        return Ok(0.0);
    }
    Ok(((max - min) / (max + min)).clamp(0.0, 1.0))
}

fn check_slice(axis: &Axis, values: &[f64]) -> Result<()> {
    if values.len() != axis.count {
        return Err(Error::InvalidGrid("slice length does not match its axis"));
    }
    if values.len() < 3 {
        return Err(Error::InvalidGrid("slice needs at least three samples"));
    }
    Ok(())
}

/// Interference minima, spacing and visibility of a density slice.
///
/// `expected_spacing`, when known, is used to reject slices with fewer than
/// eight samples per fringe.
pub fn detect_fringes(
    axis: &Axis,
    density: &[f64],
    t: f64,
    expected_spacing: Option<f64>,
) -> Result<FringeReport> {
    check_slice(axis, density)?;
    if let Some(s) = expected_spacing {
        let n = s / axis.step();
        if n < 8.0 {
            return Err(Error::GridTooCoarse {
                samples_per_period: n,
                required: 8,
            });
        }
    }
    let v = visibility(axis, density)?;
    if v < MIN_VISIBILITY {
        return Err(Error::NoFringes { visibility: v });
    }
    let minima = refined_minima(axis, density);
    let (_, _, split) = central_window(axis, density, &minima);
    let lo = split.saturating_sub(2);
    let hi = (split + 2).min(minima.len());
    let central: Vec<f64> = minima[lo..hi].iter().map(|m| m.0).collect();
    let gaps: Vec<f64> = central.windows(2).map(|w| w[1] - w[0]).collect();
    let (mean, std) = mean_std(&gaps);
    Ok(FringeReport {
        t,
        minima: minima.iter().map(|m| m.0).collect(),
        spacing_mean: mean,
        spacing_std: std,
        visibility: v,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Least-squares line `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Samples `f` along the line `origin + s·direction` (direction normalised) at the
/// arc lengths of `axis`.
pub fn sample_line<F>(f: F, origin: Point, direction: Point, axis: &Axis) -> Result<Vec<f64>>
where
    F: Fn(Point) -> Result<f64>,
{
    let norm = libm::hypot(direction.x, direction.y);
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidGrid("line direction must be non-zero"));
    }
    let (ux, uy) = (direction.x / norm, direction.y / norm);
    axis.values()
        .into_iter()
        .map(|s| f(Point::new(origin.x + s * ux, origin.y + s * uy)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Plateau {
    pub n: i32,
    /// Velocity at the midpoint between the bounding spikes.
    pub velocity: f64,
    /// `m·velocity`.
    pub momentum: f64,
    /// `2πħn/d`.
    pub expected: f64,
    pub start: f64,
    pub end: f64,
}

impl Plateau {
    /// `|p − ħκ_n| / |ħκ_n|`, or the absolute momentum for `n = 0`.
    pub fn relative_error(&self) -> f64 {
        if self.n == 0 {
            self.momentum.abs()
        } else {
            (self.momentum - self.expected).abs() / self.expected.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PlateauReport {
    pub t: f64,
    pub spikes: Vec<f64>,
    pub plateaus: Vec<Plateau>,
    /// `2πħ/d`.
    pub kappa_unit: f64,
}

impl PlateauReport {
    pub fn get(&self, n: i32) -> Option<&Plateau> {
        self.plateaus.iter().find(|p| p.n == n)
    }
}

fn interpolate(axis: &Axis, values: &[f64], x: f64) -> f64 {
    let h = axis.step();
    let u = (x - axis.start) / h;
    let i = (libm::floor(u) as isize).clamp(0, axis.count as isize - 2) as usize;
    let w = u - i as f64;
    values[i] + w * (values[i + 1] - values[i])
}

/// Segments a superposition velocity slice at its spikes and reads off the
/// plateau momentum of each segment.
///
/// Spikes are the sign-structure extrema of `v`: local minima for `x > 0` and
/// local maxima for `x < 0`. The segment containing `x = 0` is `n = 0`; the
/// others are numbered outward. Non-finite samples (density underflow) are skipped.
pub fn extract_plateaus(
    axis: &Axis,
    velocity: &[f64],
    t: f64,
    sup: &SuperpositionParams,
) -> Result<PlateauReport> {
    check_slice(axis, velocity)?;
    if t < 5.0 * sup.base.tau() {
        log::warn!(
            "plateaus are only defined for t >> tau; t = {t}, tau = {}",
            sup.base.tau()
        );
    }
    let mut spikes = Vec::new();
    for i in 1..velocity.len() - 1 {
        let (a, b, c) = (velocity[i - 1], velocity[i], velocity[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let x = axis.value(i);
        let is_spike = if x > 0.0 {
            b < a && b <= c
        } else if x < 0.0 {
            b > a && b >= c
        } else {
            false
        };
        if is_spike {
            spikes.push(x);
        }
    }
    let split = spikes.partition_point(|&s| s < 0.0);
    let unit = sup.kappa_unit();
    let mut plateaus = Vec::new();
    for w in 0..spikes.len().saturating_sub(1) {
        let (a, b) = (spikes[w], spikes[w + 1]);
        let n = w as i32 + 1 - split as i32;
        let v = interpolate(axis, velocity, 0.5 * (a + b));
        if !v.is_finite() {
            continue;
        }
        plateaus.push(Plateau {
            n,
            velocity: v,
            momentum: sup.base.mass * v,
            expected: sup.quantized_momentum(n),
            start: a,
            end: b,
        });
    }
    Ok(PlateauReport {
        t,
        spikes,
        plateaus,
        kappa_unit: unit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Crossing {
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossingReport {
    pub axis: Coordinate,
    pub pairs: Vec<Crossing>,
}

impl CrossingReport {
    pub fn earliest(&self) -> Option<&Crossing> {
        self.pairs.iter().min_by(|a, b| a.t.total_cmp(&b.t))
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// First time at which the `axis` projections of two trajectories meet.
fn first_crossing(a: &Trajectory, b: &Trajectory, axis: Coordinate) -> Option<f64> {
    let d0 = a.initial.component(axis) - b.initial.component(axis);
    let mut prev: Option<(f64, f64)> = None;
    for s in &a.samples {
        let q = b.position_at(s.t)?;
        let d = s.point.component(axis) - q.component(axis);
        if s.t > 0.0 && (d.abs() < CROSSING_TOLERANCE || d.signum() != d0.signum()) {
            return Some(match prev {
                Some((tp, dp)) if d.signum() != dp.signum() && dp != d => {
                    tp + (s.t - tp) * dp / (dp - d)
                }
                _ => s.t,
            });
        }
        prev = Some((s.t, d));
    }
    None
}

/// Every pair of trajectories whose `axis` projections start apart (by more than
/// [`CROSSING_TOLERANCE`]) and later meet, with the interpolated first meeting time.
pub fn census_crossings(trajectories: &[Trajectory], axis: Coordinate) -> CrossingReport {
    let mut pairs = Vec::new();
    for (i, a) in trajectories.iter().enumerate() {
        for b in &trajectories[i + 1..] {
            let d0 = a.initial.component(axis) - b.initial.component(axis);
            if d0.abs() <= CROSSING_TOLERANCE {
                continue;
            }
            if let Some(t) = first_crossing(a, b, axis) {
                pairs.push(Crossing {
                    i: a.marker,
                    j: b.marker,
                    t,
                });
            }
        }
    }
    CrossingReport { axis, pairs }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Separation {
    pub distance: f64,
    pub i: usize,
    pub j: usize,
    pub t: f64,
}

/// Smallest full-configuration-space distance between any two markers at a
/// shared sample time.
pub fn min_pairwise_separation(trajectories: &[Trajectory]) -> Option<Separation> {
    let mut best: Option<Separation> = None;
    for (i, a) in trajectories.iter().enumerate() {
        for b in &trajectories[i + 1..] {
            for s in &a.samples {
                let Some(q) = b.position_at(s.t) else { break };
                let d = s.point.distance(&q);
                if best.is_none_or(|x| d < x.distance) {
                    best = Some(Separation {
                        distance: d,
                        i: a.marker,
                        j: b.marker,
                        t: s.t,
                    });
                }
            }
        }
    }
    best
}

/// Numerical marginal `∫ρ(x, y) d(traced)` sampled on `kept`.
///
/// `wavenumber` is the interference wavenumber along the traced axis; slices
/// with fewer than eight samples per period are rejected.
pub fn trace_out<F>(
    joint: F,
    over: Coordinate,
    kept: &Axis,
    traced: &Axis,
    wavenumber: Option<f64>,
) -> Result<Vec<f64>>
where
    F: Fn(Point) -> Result<f64>,
{
    if let Some(k) = wavenumber {
        let n = traced.samples_per_period(k);
        if n < 8.0 {
            return Err(Error::GridTooCoarse {
                samples_per_period: n,
                required: 8,
            });
        }
    }
    let inner = traced.values();
    let h = traced.step();
    let mut buf = Vec::with_capacity(inner.len());
    kept.values()
        .into_iter()
        .map(|u| {
            buf.clear();
            for &s in &inner {
                let p = match over {
                    Coordinate::Y => Point::new(u, s),
                    Coordinate::X => Point::new(s, u),
                };
                buf.push(joint(p)?);
            }
            simpson(&buf, h)
        })
        .collect()
}
