//! Uniform axes and sampled scalar fields.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Uniformly spaced axis including both end points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub name: alloc::string::String,
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: &str, start: f64, end: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) {
            return Err(Error::InvalidGrid("axis bounds must be finite"));
        }
        if count < 2 {
            return Err(Error::InvalidGrid("axis needs at least two samples"));
        }
        if end <= start {
            return Err(Error::InvalidGrid("axis end must exceed start"));
        }
        Ok(Axis {
            name: name.into(),
            start,
            end,
            count,
        })
    }

    /// Symmetric axis `[-half, half]`.
    pub fn symmetric(name: &str, half: f64, count: usize) -> Result<Self> {
        Axis::new(name, -half, half, count)
    }

    #[inline]
    pub fn step(&self) -> f64 {
        (self.end - self.start) / (self.count - 1) as f64
    }

    /// Sample `i`; the last sample is exactly `end`.
    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.end
        } else {
            self.start + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    /// Samples per period of a spatial oscillation with wavenumber `k`.
    pub fn samples_per_period(&self, k: f64) -> f64 {
        if k == 0.0 {
            f64::INFINITY
        } else {
            2.0 * core::f64::consts::PI / (k.abs() * self.step())
        }
    }
}

/// What a [`FieldGrid`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FieldKind {
    Density,
    VelocityX,
    VelocityY,
    ReducedDensity,
    ReducedVelocity,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Density => "density",
            FieldKind::VelocityX => "velocity_x",
            FieldKind::VelocityY => "velocity_y",
            FieldKind::ReducedDensity => "reduced_density",
            FieldKind::ReducedVelocity => "reduced_velocity",
        }
    }
}

/// Scalar field sampled on the tensor product of `axes`, stored row-major
/// (last axis fastest). Points where the field is undefined hold NaN.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FieldGrid {
    pub kind: FieldKind,
    pub axes: Vec<Axis>,
    pub values: Vec<f64>,
}

impl FieldGrid {
    /// Samples `f` at every grid node. Axes are typically space (and optionally time).
    pub fn sample<F>(kind: FieldKind, axes: Vec<Axis>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("grid needs at least one axis"));
        }
        let total: usize = axes.iter().map(|a| a.count).product();
        let mut values = Vec::with_capacity(total);
        let mut coords = alloc::vec![0.0; axes.len()];
        for flat in 0..total {
            let mut rem = flat;
            for (slot, axis) in coords.iter_mut().zip(axes.iter()).rev() {
                *slot = axis.value(rem % axis.count);
                rem /= axis.count;
            }
            values.push(f(&coords)?);
        }
        Ok(FieldGrid { kind, axes, values })
    }

    pub fn from_values(kind: FieldKind, axes: Vec<Axis>, values: Vec<f64>) -> Result<Self> {
        let total: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() || total != values.len() {
            return Err(Error::InvalidGrid("value count does not match axes"));
        }
        Ok(FieldGrid { kind, axes, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the flat index `flat`.
    pub fn coordinates(&self, flat: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.axes.len()];
        let mut rem = flat;
        for (slot, axis) in out.iter_mut().zip(self.axes.iter()).rev() {
            *slot = axis.value(rem % axis.count);
            rem /= axis.count;
        }
        out
    }

    pub fn get(&self, index: &[usize]) -> Option<f64> {
        if index.len() != self.axes.len() {
            return None;
        }
        let mut flat = 0;
        for (&i, axis) in index.iter().zip(self.axes.iter()) {
            if i >= axis.count {
                return None;
            }
            flat = flat * axis.count + i;
        }
        Some(self.values[flat])
    }

    /// Largest finite value, if any.
    pub fn max(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_endpoints_exact() {
        let a = Axis::new("x", -1.0, 1.0, 7).unwrap();
        assert_eq!(a.value(0), -1.0);
        assert_eq!(a.value(6), 1.0);
        assert!((a.value(3)).abs() < 1e-15);
        assert_eq!(a.values().len(), 7);
    }

    #[test]
    fn rejects_degenerate_axes() {
        assert!(Axis::new("x", 0.0, 1.0, 1).is_err());
        assert!(Axis::new("x", 1.0, 1.0, 4).is_err());
        assert!(Axis::new("x", 0.0, f64::INFINITY, 4).is_err());
    }

    #[test]
    fn row_major_order() {
        let axes = alloc::vec![
            Axis::new("x", 0.0, 1.0, 2).unwrap(),
            Axis::new("y", 0.0, 2.0, 3).unwrap(),
        ];
        let g = FieldGrid::sample(FieldKind::Density, axes, |c| Ok(10.0 * c[0] + c[1])).unwrap();
        assert_eq!(g.values, [0.0, 1.0, 2.0, 10.0, 11.0, 12.0]);
        assert_eq!(g.get(&[1, 2]), Some(12.0));
        assert_eq!(g.coordinates(4), [1.0, 1.0]);
        assert_eq!(g.max(), Some(12.0));
    }

    #[test]
    fn samples_per_period() {
        let a = Axis::new("x", 0.0, 1.0, 101).unwrap();
        let n = a.samples_per_period(2.0 * core::f64::consts::PI);
        assert!((n - 100.0).abs() < 1e-9);
    }
}
