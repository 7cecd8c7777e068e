//! Complex amplitudes in log-polar form.
//!
//! Gaussian tails on wide grids fall far below the smallest normal `f64`, so
//! amplitudes are carried as `ln|ψ|` plus a phase and only exponentiated on demand.

use core::ops::Mul;

use num_complex::Complex64;

/// `ψ = exp(ln_modulus) · exp(i·phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAmplitude {
    pub ln_modulus: f64,
    pub phase: f64,
}

impl LogAmplitude {
    pub const ZERO: LogAmplitude = LogAmplitude {
        ln_modulus: f64::NEG_INFINITY,
        phase: 0.0,
    };

    pub const fn new(ln_modulus: f64, phase: f64) -> Self {
        LogAmplitude { ln_modulus, phase }
    }

    /// `ln |ψ|²`.
    #[inline]
    pub fn ln_density(&self) -> f64 {
        2.0 * self.ln_modulus
    }

    #[inline]
    pub fn density(&self) -> f64 {
        libm::exp(self.ln_density())
    }

    pub fn modulus(&self) -> f64 {
        libm::exp(self.ln_modulus)
    }

    pub fn to_complex(&self) -> Complex64 {
        let r = self.modulus();
        Complex64::new(r * libm::cos(self.phase), r * libm::sin(self.phase))
    }

    pub fn scale(self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        LogAmplitude {
            ln_modulus: self.ln_modulus + libm::log(factor),
            phase: self.phase,
        }
    }

    /// Coherent sum of amplitudes, rescaled by the largest modulus before
    /// exponentiating so no term underflows on its own.
    pub fn sum<I>(terms: I) -> LogAmplitude
    where
        I: IntoIterator<Item = LogAmplitude> + Clone,
    {
        let peak = terms
            .clone()
            .into_iter()
            .map(|a| a.ln_modulus)
            .fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return LogAmplitude::ZERO;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for a in terms {
            let w = libm::exp(a.ln_modulus - peak);
            re += w * libm::cos(a.phase);
            im += w * libm::sin(a.phase);
        }
        let r = libm::hypot(re, im);
        if r == 0.0 {
            return LogAmplitude::ZERO;
        }
        LogAmplitude {
            ln_modulus: peak + libm::log(r),
            phase: libm::atan2(im, re),
        }
    }

    /// Phase of `self / other`, wrapped to `(-π, π]`.
    pub fn phase_ratio(&self, other: &LogAmplitude) -> f64 {
        let d = self.phase - other.phase;
        libm::atan2(libm::sin(d), libm::cos(d))
    }
}

impl Mul for LogAmplitude {
    type Output = LogAmplitude;

    fn mul(self, rhs: LogAmplitude) -> LogAmplitude {
        LogAmplitude {
            ln_modulus: self.ln_modulus + rhs.ln_modulus,
            phase: self.phase + rhs.phase,
        }
    }
}
