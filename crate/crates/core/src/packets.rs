//! Free Gaussian wave packet: spreading, amplitude, velocity field and the
//! analytic Bohmian trajectories it generates.

use num_complex::Complex64;

use crate::amplitude::LogAmplitude;
use crate::error::{Error, Result};
use crate::{check_finite, check_time};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Centroid, momentum and width of one Gaussian packet, plus the particle
/// mass and ħ. Defaults to natural units with `σ₀ = 0.5` centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PacketParams {
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl Default for PacketParams {
    fn default() -> Self {
        PacketParams {
            x0: 0.0,
            p0: 0.0,
            sigma0: 0.5,
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

/// Complex spreading `σ̃_t = σ_t·e^{iφ_t}` at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadingState {
    pub sigma_tilde: Complex64,
    pub sigma_t: f64,
    pub phi_t: f64,
    pub t: f64,
    pub tau: f64,
}

/// Time-dependent prefactors of the velocity field and of the velocity along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusivePrefactors {
    /// `∂v/∂x` at fixed time; peaks at `t = τ`.
    pub field_slope: f64,
    /// Rate at which trajectories separate from the centroid; tends to `ħ/2mσ₀²`.
    pub trajectory_rate: f64,
}

impl PacketParams {
    pub fn new(x0: f64, p0: f64, sigma0: f64, mass: f64, hbar: f64) -> Result<Self> {
        let p = PacketParams {
            x0,
            p0,
            sigma0,
            mass,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default parameters with the centroid moved to `x0`.
    pub fn centred_at(x0: f64) -> Self {
        PacketParams {
            x0,
            ..PacketParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite(self.x0, "x0")?;
        check_finite(self.p0, "p0")?;
        for (name, v) in [
            ("sigma0", self.sigma0),
            ("mass", self.mass),
            ("hbar", self.hbar),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        let tau = self.tau();
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "sigma0",
                reason: "timescale 2 m sigma0^2 / hbar is not finite and positive",
            });
        }
        Ok(())
    }

    /// Characteristic timescale `τ = 2mσ₀²/ħ`.
    #[inline]
    pub fn tau(&self) -> f64 {
        2.0 * self.mass * self.sigma0 * self.sigma0 / self.hbar
    }

    #[inline]
    pub fn v0(&self) -> f64 {
        self.p0 / self.mass
    }

    #[inline]
    pub fn e0(&self) -> f64 {
        self.p0 * self.p0 / (2.0 * self.mass)
    }

    /// Classical centroid path `x_t = x₀ + v₀t`.
    #[inline]
    pub fn centroid(&self, t: f64) -> f64 {
        self.x0 + self.v0() * t
    }

    #[inline]
    pub(crate) fn reduced_time(&self, t: f64) -> f64 {
        t / self.tau()
    }

    /// `σ_t²`, without the square root.
    #[inline]
    pub(crate) fn width_sq(&self, t: f64) -> f64 {
        let a = self.reduced_time(t);
        self.sigma0 * self.sigma0 * (1.0 + a * a)
    }

    #[inline]
    pub(crate) fn width(&self, t: f64) -> f64 {
        self.sigma0 * libm::hypot(1.0, self.reduced_time(t))
    }

    /// Slope `ħ²t / 4m²σ₀²σ_t²` of the velocity field at time `t`.
    #[inline]
    pub(crate) fn field_slope(&self, t: f64) -> f64 {
        let (h, m, s) = (self.hbar, self.mass, self.sigma0);
        h * h * t / (4.0 * m * m * s * s * self.width_sq(t))
    }

    pub fn spreading(&self, t: f64) -> Result<SpreadingState> {
        check_time(t)?;
        let a = self.reduced_time(t);
        Ok(SpreadingState {
            sigma_tilde: Complex64::new(self.sigma0, self.sigma0 * a),
            sigma_t: self.width(t),
            phi_t: libm::atan(a),
            t,
            tau: self.tau(),
        })
    }

    /// Log-polar amplitude of the evolved packet.
    pub fn log_amplitude(&self, x: f64, t: f64) -> Result<LogAmplitude> {
        check_time(t)?;
        check_finite(x, "position")?;
        Ok(self.log_amplitude_unchecked(x, t))
    }

    pub(crate) fn log_amplitude_unchecked(&self, x: f64, t: f64) -> LogAmplitude {
        let a = self.reduced_time(t);
        let w2 = self.width_sq(t);
        let u = x - self.centroid(t);
        let q = u * u / (4.0 * w2);
        let ln_modulus = -0.25 * LN_2PI - 0.25 * libm::log(w2) - q;
        let phase = a * q + (self.p0 * u + self.e0() * t) / self.hbar - 0.5 * libm::atan(a);
        LogAmplitude::new(ln_modulus, phase)
    }

    pub fn amplitude(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.log_amplitude(x, t)?.to_complex())
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.log_amplitude(x, t)?.density())
    }

    /// `v(x,t) = v₀ + (ħ²t/4m²σ₀²)(x − x_t)/σ_t²`.
    pub fn velocity(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x, "position")?;
        Ok(self.velocity_unchecked(x, t))
    }

    #[inline]
    pub(crate) fn velocity_unchecked(&self, x: f64, t: f64) -> f64 {
        self.v0() + self.field_slope(t) * (x - self.centroid(t))
    }

    /// Position at time `t` of the trajectory launched from `x_init`.
    pub fn trajectory(&self, x_init: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x_init, "initial position")?;
        Ok(self.centroid(t) + self.width(t) / self.sigma0 * (x_init - self.x0))
    }

    /// Field evaluated along the trajectory from `x_init`.
    pub fn velocity_along_trajectory(&self, x_init: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x_init, "initial position")?;
        Ok(self.v0() + self.diffusive_prefactors_unchecked(t).trajectory_rate * (x_init - self.x0))
    }

    /// Long-time limit `v∞ = v₀ + ħ(x_init − x₀)/2mσ₀²`.
    pub fn asymptotic_velocity(&self, x_init: f64) -> f64 {
        self.v0() + self.hbar * (x_init - self.x0) / (2.0 * self.mass * self.sigma0 * self.sigma0)
    }

    pub fn diffusive_prefactors(&self, t: f64) -> Result<DiffusivePrefactors> {
        check_time(t)?;
        Ok(self.diffusive_prefactors_unchecked(t))
    }

    fn diffusive_prefactors_unchecked(&self, t: f64) -> DiffusivePrefactors {
        let (h, m, s) = (self.hbar, self.mass, self.sigma0);
        DiffusivePrefactors {
            field_slope: self.field_slope(t),
            trajectory_rate: h * h * t / (4.0 * m * m * s * s * s * self.width(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    fn reference() -> PacketParams {
        PacketParams::default()
    }

    #[test]
    fn spreading_identity_at_zero() {
        let s = reference().spreading(0.0).unwrap();
        assert_eq!(s.sigma_t, 0.5);
        assert_eq!(s.phi_t, 0.0);
        assert_eq!(s.tau, 0.5);
    }

    #[test]
    fn spreading_at_tau() {
        let s = reference().spreading(0.5).unwrap();
        assert!((s.sigma_t - 0.5 * SQRT_2).abs() < 1e-15);
        assert!((s.phi_t - FRAC_PI_4).abs() < 1e-15);
        assert!((s.sigma_tilde.norm() - s.sigma_t).abs() < 1e-15);
    }

    #[test]
    fn spreading_asymptote_is_linear() {
        let p = reference();
        for t in [1e3, 1e5] {
            let s = p.spreading(t).unwrap();
            // σ_t → ħt/2mσ₀ = t for the default parameters.
            assert!((s.sigma_t / t - 1.0).abs() < 1.0 / (t * t));
        }
    }

    #[test]
    fn rejects_bad_time_and_params() {
        let p = reference();
        assert!(matches!(
            p.spreading(f64::NAN),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(p.spreading(-1.0), Err(Error::NegativeTime { .. })));
        assert!(PacketParams::new(0.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(PacketParams::new(0.0, 0.0, 0.5, -1.0, 1.0).is_err());
        assert!(PacketParams::new(0.0, 0.0, 0.5, 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn peak_modulus_at_t0() {
        let p = PacketParams::centred_at(1.5);
        let psi = p.amplitude(1.5, 0.0).unwrap();
        let expected = (1.0 / (2.0 * PI * 0.25f64)).powf(0.25);
        assert!((psi.norm() - expected).abs() < 1e-15);
    }

    #[test]
    fn centroid_phase() {
        let p = PacketParams::new(-1.0, 0.7, 0.5, 1.3, 1.0).unwrap();
        for t in [0.0, 0.5, 3.0] {
            let a = p.log_amplitude(p.centroid(t), t).unwrap();
            let s = p.spreading(t).unwrap();
            let expected = p.e0() * t / p.hbar - s.phi_t / 2.0;
            assert!((a.phase - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn velocity_simple_cases() {
        let p = PacketParams::new(2.0, 0.4, 0.5, 2.0, 1.0).unwrap();
        for x in [-3.0, 0.0, 7.0] {
            assert_eq!(p.velocity(x, 0.0).unwrap(), p.v0());
        }
        for t in [0.1, 1.0, 50.0] {
            assert!((p.velocity(p.centroid(t), t).unwrap() - p.v0()).abs() < 1e-15);
        }
    }

    #[test]
    fn trajectory_limits() {
        let p = PacketParams::new(0.3, -0.2, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(p.trajectory(1.7, 0.0).unwrap(), 1.7);
        for t in [0.0, 2.0, 9.0] {
            assert!((p.trajectory(p.x0, t).unwrap() - p.centroid(t)).abs() < 1e-15);
            assert!((p.velocity_along_trajectory(p.x0, t).unwrap() - p.v0()).abs() < 1e-15);
        }
    }

    #[test]
    fn trajectory_slope_approaches_asymptotic_velocity() {
        let p = reference();
        let x_init = p.x0 + 1.0;
        // Least-squares slope of x(t) over t ∈ [50, 100].
        let n = 501;
        let (mut st, mut sx, mut stt, mut stx) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let t = 50.0 + 50.0 * i as f64 / (n - 1) as f64;
            let x = p.trajectory(x_init, t).unwrap();
            st += t;
            sx += x;
            stt += t * t;
            stx += t * x;
        }
        let nf = n as f64;
        let slope = (nf * stx - st * sx) / (nf * stt - st * st);
        let v_inf = p.asymptotic_velocity(x_init);
        assert_eq!(v_inf, 2.0);
        assert!((slope - v_inf).abs() < 1e-4, "slope {slope}");
    }

    #[test]
    fn velocity_along_trajectory_converges() {
        let p = reference();
        for x_init in [-1.0, 0.4, 2.0] {
            let v = p.velocity_along_trajectory(x_init, 1e4).unwrap();
            let v_inf = p.asymptotic_velocity(x_init);
            assert!((v - v_inf).abs() < 1e-8 * v_inf.abs().max(1.0));
        }
    }

    #[test]
    fn velocity_along_trajectory_is_field_on_trajectory() {
        let p = PacketParams::new(0.5, 0.3, 0.7, 1.5, 1.0).unwrap();
        for t in [0.2, 1.0, 6.0] {
            let x_init = -0.8;
            let x = p.trajectory(x_init, t).unwrap();
            let a = p.velocity(x, t).unwrap();
            let b = p.velocity_along_trajectory(x_init, t).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn prefactor_profiles() {
        let p = reference();
        // Field slope peaks at τ on a dense scan.
        let dt = 1e-4;
        let (mut best_t, mut best) = (0.0, f64::MIN);
        for i in 0..=100_000 {
            let t = i as f64 * dt;
            let s = p.diffusive_prefactors(t).unwrap().field_slope;
            if s > best {
                best = s;
                best_t = t;
            }
        }
        assert!((best_t - p.tau()).abs() <= dt);
        // t^-1 decay well past τ.
        let r = p.diffusive_prefactors(20.0).unwrap().field_slope
            / p.diffusive_prefactors(10.0).unwrap().field_slope;
        assert!((r - 0.5).abs() < 0.01);
        // Trajectory rate rises monotonically to ħ/2mσ₀², the spreading velocity per unit σ₀.
        let mut prev = -1.0;
        for i in 0..2000 {
            let r = p
                .diffusive_prefactors(i as f64 * 0.01)
                .unwrap()
                .trajectory_rate;
            assert!(r > prev);
            prev = r;
        }
        let plateau = p.diffusive_prefactors(1e3).unwrap().trajectory_rate;
        assert!((plateau - 2.0).abs() < 1e-6);
        assert!(plateau < 2.0);
        let spreading = p.spreading(1e3).unwrap().sigma_t - p.spreading(1e3 - 1.0).unwrap().sigma_t;
        assert!((plateau * p.sigma0 - spreading).abs() < 1e-6);
    }
}
