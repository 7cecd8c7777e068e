//! Numerical counterparts of the closed-form fields.
//!
//! Velocities come from finite differences of the complex amplitude's phase,
//! `v_i = (ħ/m) ∂_i arg ψ`, taken as the argument of `ψ(p + h e_i) / ψ(p − h e_i)`
//! so 2π branch jumps never enter. The default stencil also uses the `±2h`
//! ratio for fourth-order accuracy. Continuity residuals combine a time stencil
//! on the density with a spatial stencil on the flux.

use alloc::vec::Vec;

use crate::amplitude::LogAmplitude;
use crate::error::{Error, Result};
use crate::grid::Axis;
use crate::quadrature::simpson;
use crate::states::{BipartiteKind, QuantumState};
use crate::{check_time, Coordinate, Point, Velocity};

/// Minimum samples per interference period accepted by [`continuity_residual`].
pub const MIN_SAMPLES_PER_PERIOD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleConfig {
    /// Relative step: `h = fd_step · max(1, |x_i|)`.
    pub fd_step: f64,
    /// Densities below this are too close to a node for a phase gradient.
    pub density_floor: f64,
    /// Five-point central stencil (fourth order) instead of the two-point one.
    pub fourth_order: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fd_step: 1e-5,
            density_floor: 1e-12,
            fourth_order: true,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fd_step > 1e-9 && self.fd_step < 1e-2) {
            return Err(Error::InvalidParameter {
                name: "fd_step",
                reason: "must lie in (1e-9, 1e-2)",
            });
        }
        if !(self.density_floor > 0.0 && self.density_floor.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "density_floor",
                reason: "must be finite and positive",
            });
        }
        Ok(())
    }
}

/// Velocity from the phase gradient of `psi` at `point`.
///
/// `dim` is 1 (only `x` is differentiated) or 2.
pub fn velocity_from_amplitude<F>(
    psi: F,
    point: Point,
    dim: usize,
    hbar: f64,
    mass: f64,
    cfg: &OracleConfig,
) -> Result<Velocity>
where
    F: Fn(Point) -> Result<LogAmplitude>,
{
    cfg.validate()?;
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "configuration space is one- or two-dimensional",
        });
    }
    let centre = psi(point)?;
    let density = centre.density();
    if !(density > cfg.density_floor) {
        return Err(Error::NodeProximity {
            density,
            floor: cfg.density_floor,
        });
    }
    let mut out = Point::new(0.0, 0.0);
    for axis in [Coordinate::X, Coordinate::Y].into_iter().take(dim) {
        let c = point.component(axis);
        let h = cfg.fd_step * c.abs().max(1.0);
        let shifted = |delta: f64| match axis {
            Coordinate::X => Point::new(point.x + delta, point.y),
            Coordinate::Y => Point::new(point.x, point.y + delta),
        };
        let phase_step = |delta: f64| -> Result<f64> {
            let step = psi(shifted(delta))?.phase_ratio(&psi(shifted(-delta))?);
            if step.abs() >= core::f64::consts::FRAC_PI_2 {
                return Err(Error::PhaseUnwrapFailure { step });
            }
            Ok(step)
        };
        let near = phase_step(h)?;
        let grad = if cfg.fourth_order {
            (8.0 * near - phase_step(2.0 * h)?) / (12.0 * h)
        } else {
            near / (2.0 * h)
        };
        let v = hbar / mass * grad;
        match axis {
            Coordinate::X => out.x = v,
            Coordinate::Y => out.y = v,
        }
    }
    Ok(out)
}

/// [`velocity_from_amplitude`] applied to a state's own amplitude.
pub fn oracle_velocity(
    state: &QuantumState,
    point: Point,
    t: f64,
    cfg: &OracleConfig,
) -> Result<Velocity> {
    check_time(t)?;
    velocity_from_amplitude(
        |p| state.log_amplitude(p, t),
        point,
        state.dim(),
        state.hbar(),
        state.mass(),
        cfg,
    )
}

/// Reduced velocity of the entangled state as `∫ j_x dy / ∫ ρ dy`, with both
/// marginals taken by quadrature over `y_axis`.
pub fn reduced_velocity_by_trace(
    state: &QuantumState,
    x: f64,
    t: f64,
    y_axis: &Axis,
) -> Result<f64> {
    let b = match state {
        QuantumState::Bipartite(b) if b.kind == BipartiteKind::Entangled => b,
        _ => {
            return Err(Error::WrongKind {
                expected: "entangled",
            })
        }
    };
    let mut rho = Vec::with_capacity(y_axis.count);
    let mut flux = Vec::with_capacity(y_axis.count);
    for y in y_axis.values() {
        rho.push(b.joint_density(x, y, t)?);
        flux.push(b.joint_flux(x, y, t)?.x);
    }
    let h = y_axis.step();
    let r = simpson(&rho, h)?;
    if !(r > 0.0) {
        return Err(Error::DensityUnderflow {
            x,
            y: 0.0,
            t,
            ln_density: f64::NEG_INFINITY,
        });
    }
    Ok(simpson(&flux, h)? / r)
}

fn time_derivative(state: &QuantumState, p: Point, t: f64) -> Result<f64> {
    let h = 1e-4 * t.max(1.0);
    let rho = |s: f64| state.density(p, s);
    if t >= 2.0 * h {
        Ok(
            (-rho(t + 2.0 * h)? + 8.0 * rho(t + h)? - 8.0 * rho(t - h)? + rho(t - 2.0 * h)?)
                / (12.0 * h),
        )
    } else {
        Ok(
            (-25.0 * rho(t)? + 48.0 * rho(t + h)? - 36.0 * rho(t + 2.0 * h)?
                + 16.0 * rho(t + 3.0 * h)?
                - 3.0 * rho(t + 4.0 * h)?)
                / (12.0 * h),
        )
    }
}

fn divergence(state: &QuantumState, p: Point, t: f64, h: f64) -> Result<f64> {
    let mut div = 0.0;
    for axis in [Coordinate::X, Coordinate::Y].into_iter().take(state.dim()) {
        let j = |d: f64| -> Result<f64> {
            let q = match axis {
                Coordinate::X => Point::new(p.x + d, p.y),
                Coordinate::Y => Point::new(p.x, p.y + d),
            };
            Ok(state.flux(q, t)?.component(axis))
        };
        div += (-j(2.0 * h)? + 8.0 * j(h)? - 8.0 * j(-h)? + j(-2.0 * h)?) / (12.0 * h);
    }
    Ok(div)
}

/// `max |∂ρ/∂t + ∇·(ρv)| / max |∂ρ/∂t|` over the nodes of `axes`.
///
/// `axes` holds one axis per configuration coordinate. The time derivative
/// uses a five-point stencil with `dt = 1e-4·max(1, t)` (one-sided near `t = 0`);
/// the divergence uses a five-point stencil on a step well below both `σ_t`
/// and the interference period.
pub fn continuity_residual(state: &QuantumState, axes: &[Axis], t: f64) -> Result<f64> {
    check_time(t)?;
    if axes.len() != state.dim() {
        return Err(Error::InvalidGrid(
            "one axis per configuration coordinate required",
        ));
    }
    let k = state.wavenumber(t).unwrap_or(0.0);
    for axis in axes {
        let n = axis.samples_per_period(k);
        if n < MIN_SAMPLES_PER_PERIOD as f64 {
            return Err(Error::GridTooCoarse {
                samples_per_period: n,
                required: MIN_SAMPLES_PER_PERIOD,
            });
        }
    }
    let mut scale = state.width(t);
    if k > 0.0 {
        scale = scale.min(1.0 / k);
    }
    let h = 1e-3 * scale;

    let ys = if axes.len() == 2 {
        axes[1].values()
    } else {
        alloc::vec![0.0]
    };
    let mut max_dt = 0.0f64;
    let mut max_res = 0.0f64;
    for x in axes[0].values() {
        for &y in &ys {
            let p = Point::new(x, y);
            let drho = time_derivative(state, p, t)?;
            let div = divergence(state, p, t, h)?;
            max_dt = max_dt.max(drho.abs());
            max_res = max_res.max((drho + div).abs());
        }
    }
    if max_dt == 0.0 {
        return Ok(max_res);
    }
    Ok(max_res / max_dt)
}
