//! Closed-form Bohmian (quantum-hydrodynamic) dynamics of Gaussian two-slit systems.
//!
//! The crate evaluates wave functions, probability densities and velocity fields for
//! a free Gaussian packet, a coherent two-packet superposition, and three bipartite
//! states (two factorizable, one Bell-type entangled). On top of those fields it
//! integrates marker ensembles and extracts the quantities that characterise
//! interference and its suppression: fringe spacing, visibility, momentum plateaus,
//! subspace crossings and reduced (traced) densities.
//!
//! Every closed-form velocity has an independent numerical counterpart in
//! [`field_oracle`], which differentiates the complex amplitude directly.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(a > b)` is used deliberately so NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod amplitude;
pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod field_oracle;
pub mod grid;
pub mod packets;
pub mod quadrature;
pub mod states;

pub use amplitude::LogAmplitude;
pub use error::{Error, Result};
pub use grid::{Axis, FieldGrid, FieldKind};
pub use packets::{PacketParams, SpreadingState};
pub use states::{BipartiteKind, BipartiteState, QuantumState, StateKind, SuperpositionParams};

/// A point in (at most two-dimensional) configuration space.
///
/// One-dimensional states only read `x`; `y` is carried along as 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub const fn on_line(x: f64) -> Self {
        Point { x, y: 0.0 }
    }

    #[inline]
    pub fn component(&self, axis: Coordinate) -> f64 {
        match axis {
            Coordinate::X => self.x,
            Coordinate::Y => self.y,
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Velocity components `(v_x, v_y)`; `v_y` is 0 for one-dimensional states.
pub type Velocity = Point;

/// Configuration-space coordinate (subsystem) selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Coordinate {
    X,
    Y,
}

impl Coordinate {
    pub fn other(self) -> Coordinate {
        match self {
            Coordinate::X => Coordinate::Y,
            Coordinate::Y => Coordinate::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coordinate::X => "x",
            Coordinate::Y => "y",
        }
    }
}

/// Density below which velocity fields are not evaluated.
pub const DENSITY_FLOOR: f64 = 1e-280;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::NonFinite { what: "time" });
    }
    if t < 0.0 {
        return Err(Error::NegativeTime { t });
    }
    Ok(())
}

pub(crate) fn check_finite(value: f64, what: &'static str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}
