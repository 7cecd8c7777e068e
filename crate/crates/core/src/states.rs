//! Closed-form wave functions, densities and velocity fields for the two-slit
//! superposition and the bipartite states built from it.
//!
//! Packets sit at `x_A = d/2` and `x_B = −d/2` with no transverse drift. The
//! overlap normalisation is replaced by `1/√2` (the `d/2 ≫ σ₀` regime) unless
//! `exact_norm` is set. Velocities are ratios, so that choice only affects densities.
//!
//! All fields are evaluated from Gaussian factors rescaled by their largest
//! exponent; densities far in the tails are reported as underflow rather than
//! producing `0/0` velocities.

use core::f64::consts::PI;

use crate::amplitude::LogAmplitude;
use crate::error::{Error, Result};
use crate::packets::PacketParams;
use crate::{check_finite, check_time, Point, Velocity, DENSITY_FLOOR};

/// Two-slit superposition `𝒩[𝒢_A + 𝒢_B]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SuperpositionParams {
    /// Shared width, mass and ħ. `x0` and `p0` are ignored; centroids come from `d`.
    pub base: PacketParams,
    /// Slit separation.
    pub d: f64,
    /// Use the exact overlap normalisation instead of `1/√2`.
    pub exact_norm: bool,
}

impl Default for SuperpositionParams {
    fn default() -> Self {
        SuperpositionParams {
            base: PacketParams::default(),
            d: 10.0,
            exact_norm: false,
        }
    }
}

/// Overlap terms of two equal-width Gaussians at `±d/2`, scaled by `exp(-ln_scale)`.
#[derive(Debug, Clone, Copy)]
struct PairTerms {
    ln_scale: f64,
    a: f64,
    b: f64,
    /// Geometric mean of `a` and `b`: the envelope of the interference term.
    cross: f64,
}

impl PairTerms {
    fn new(la: f64, lb: f64) -> Self {
        let ln_scale = la.max(lb);
        PairTerms {
            ln_scale,
            a: libm::exp(la - ln_scale),
            b: libm::exp(lb - ln_scale),
            cross: libm::exp(0.5 * (la + lb) - ln_scale),
        }
    }
}

impl SuperpositionParams {
    pub fn new(base: PacketParams, d: f64) -> Result<Self> {
        let s = SuperpositionParams {
            base,
            d,
            exact_norm: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_exact_norm(mut self, exact: bool) -> Self {
        self.exact_norm = exact;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "slit separation must be finite and positive",
            });
        }
        if self.base.p0 != 0.0 {
            return Err(Error::InvalidParameter {
                name: "p0",
                reason: "superposed packets carry no transverse momentum",
            });
        }
        if self.d < 6.0 * self.base.sigma0 {
            log::warn!(
                "d = {} < 6 sigma0 = {}: packet overlap is no longer negligible",
                self.d,
                6.0 * self.base.sigma0
            );
        }
        Ok(())
    }

    #[inline]
    pub fn x_a(&self) -> f64 {
        0.5 * self.d
    }

    #[inline]
    pub fn x_b(&self) -> f64 {
        -0.5 * self.d
    }

    pub fn packet_a(&self) -> PacketParams {
        PacketParams {
            x0: self.x_a(),
            p0: 0.0,
            ..self.base
        }
    }

    pub fn packet_b(&self) -> PacketParams {
        PacketParams {
            x0: self.x_b(),
            p0: 0.0,
            ..self.base
        }
    }

    /// Overlap `Λ_AB = ⟨𝒢_B|𝒢_A⟩ = e^{−d²/8σ₀²}`; time independent.
    pub fn lambda_ab(&self) -> f64 {
        let s = self.base.sigma0;
        libm::exp(-self.d * self.d / (8.0 * s * s))
    }

    /// Exact normalisation `𝒩 = 1/√(2(1 + Λ_AB))`.
    pub fn norm(&self) -> f64 {
        1.0 / libm::sqrt(2.0 * (1.0 + self.lambda_ab()))
    }

    fn norm_sq(&self) -> f64 {
        if self.exact_norm {
            let n = self.norm();
            n * n
        } else {
            0.5
        }
    }

    /// Interference wavenumber `k_t = ħtd / 4mσ₀²σ_t²`.
    pub fn wavenumber(&self, t: f64) -> f64 {
        let b = &self.base;
        b.hbar * t * self.d / (4.0 * b.mass * b.sigma0 * b.sigma0 * b.width_sq(t))
    }

    /// Fringe spacing `Δx = 2πħt/md`.
    pub fn fringe_spacing(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: "fringe spacing needs t > 0",
            });
        }
        Ok(2.0 * PI * self.base.hbar * t / (self.base.mass * self.d))
    }

    /// Interference minima `x_n = (n + ½)·2πħt/md`.
    pub fn minimum_position(&self, n: i32, t: f64) -> Result<f64> {
        Ok((n as f64 + 0.5) * self.fringe_spacing(t)?)
    }

    /// Plateau momentum `ħκ_n = 2πħn/d`.
    pub fn quantized_momentum(&self, n: i32) -> f64 {
        2.0 * PI * self.base.hbar * n as f64 / self.d
    }

    /// Unit `2πħ/d` of the plateau momenta.
    pub fn kappa_unit(&self) -> f64 {
        self.quantized_momentum(1)
    }

    fn line_terms(&self, x: f64, t: f64) -> PairTerms {
        let w2 = self.base.width_sq(t);
        let ua = x - self.x_a();
        let ub = x - self.x_b();
        PairTerms::new(-ua * ua / (2.0 * w2), -ub * ub / (2.0 * w2))
    }

    /// `ln ρ` and the scaled flux numerator for a line state whose interference
    /// term carries weight `coherence` (1 for the pure superposition, Λ_AB after a trace).
    fn line_fields(&self, x: f64, t: f64, coherence: f64, norm_sq: f64) -> (f64, f64, f64) {
        let b = &self.base;
        let w2 = b.width_sq(t);
        let terms = self.line_terms(x, t);
        let phase = self.wavenumber(t) * x;
        let (s, c) = (libm::sin(phase), libm::cos(phase));
        let env = coherence * terms.cross;
        let sum = terms.a + terms.b + 2.0 * env * c;
        let p = b.field_slope(t);
        let q = b.hbar * self.d / (2.0 * b.mass * w2);
        let numerator = p
            * ((x - self.x_a()) * terms.a + (x - self.x_b()) * terms.b + 2.0 * x * env * c)
            - q * env * s;
        let ln_pref = libm::log(norm_sq) - 0.5 * libm::log(2.0 * PI * w2) + terms.ln_scale;
        let ln_rho = if sum > 0.0 {
            ln_pref + libm::log(sum)
        } else {
            f64::NEG_INFINITY
        };
        (ln_rho, numerator, sum)
    }

    fn line_density(&self, x: f64, t: f64, coherence: f64, norm_sq: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x, "position")?;
        Ok(libm::exp(self.line_fields(x, t, coherence, norm_sq).0))
    }

    fn line_flux(&self, x: f64, t: f64, coherence: f64, norm_sq: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x, "position")?;
        let (ln_rho, numerator, sum) = self.line_fields(x, t, coherence, norm_sq);
        if sum <= 0.0 {
            return Ok(0.0);
        }
        Ok(libm::exp(ln_rho) * numerator / sum)
    }

    fn line_velocity(&self, x: f64, t: f64, coherence: f64, norm_sq: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x, "position")?;
        let (ln_rho, numerator, sum) = self.line_fields(x, t, coherence, norm_sq);
        if ln_rho < libm::log(DENSITY_FLOOR) {
            return Err(Error::DensityUnderflow {
                x,
                y: 0.0,
                t,
                ln_density: ln_rho,
            });
        }
        Ok(numerator / sum)
    }

    /// Three-term density: two Gaussians plus the `cos(k_t x)` interference term.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        self.line_density(x, t, 1.0, self.norm_sq())
    }

    /// Probability flux `ρv`; finite everywhere, including where ρ underflows.
    pub fn flux(&self, x: f64, t: f64) -> Result<f64> {
        self.line_flux(x, t, 1.0, self.norm_sq())
    }

    /// Bohmian velocity field of the superposition. Odd in `x`, zero at `x = 0`
    /// and identically zero at `t = 0`.
    pub fn velocity(&self, x: f64, t: f64) -> Result<f64> {
        self.line_velocity(x, t, 1.0, self.norm_sq())
    }

    /// Short-time form near a slit: `ħ²t(x − x_c)/4m²σ₀⁴`.
    pub fn short_time_velocity(&self, x: f64, t: f64, centre: f64) -> f64 {
        let b = &self.base;
        let s2 = b.sigma0 * b.sigma0;
        b.hbar * b.hbar * t * (x - centre) / (4.0 * b.mass * b.mass * s2 * s2)
    }

    pub fn log_amplitude(&self, x: f64, t: f64) -> Result<LogAmplitude> {
        check_time(t)?;
        check_finite(x, "position")?;
        Ok(self.log_amplitude_unchecked(x, t))
    }

    pub(crate) fn log_amplitude_unchecked(&self, x: f64, t: f64) -> LogAmplitude {
        let sum = LogAmplitude::sum([
            self.packet_a().log_amplitude_unchecked(x, t),
            self.packet_b().log_amplitude_unchecked(x, t),
        ]);
        sum.scale(libm::sqrt(self.norm_sq()))
    }
}

/// Which of the three bipartite states a [`BipartiteState`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum BipartiteKind {
    /// Superposition for X times a single packet for Y.
    FactorizableSG,
    /// Identical superpositions for X and Y.
    FactorizableSS,
    /// Bell-type `𝒩_E[𝒢_A(x)𝒢_B(y) + 𝒢_B(x)𝒢_A(y)]`.
    Entangled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BipartiteState {
    pub kind: BipartiteKind,
    pub sup: SuperpositionParams,
    /// Y-subsystem packet; only used by [`BipartiteKind::FactorizableSG`].
    pub y_packet: PacketParams,
}

impl BipartiteState {
    pub fn factorizable_sg(sup: SuperpositionParams, y_packet: PacketParams) -> Result<Self> {
        sup.validate()?;
        y_packet.validate()?;
        Ok(BipartiteState {
            kind: BipartiteKind::FactorizableSG,
            sup,
            y_packet,
        })
    }

    pub fn factorizable_ss(sup: SuperpositionParams) -> Result<Self> {
        sup.validate()?;
        Ok(BipartiteState {
            kind: BipartiteKind::FactorizableSS,
            sup,
            y_packet: PacketParams {
                x0: 0.0,
                p0: 0.0,
                ..sup.base
            },
        })
    }

    pub fn entangled(sup: SuperpositionParams) -> Result<Self> {
        sup.validate()?;
        Ok(BipartiteState {
            kind: BipartiteKind::Entangled,
            sup,
            y_packet: PacketParams {
                x0: 0.0,
                p0: 0.0,
                ..sup.base
            },
        })
    }

    /// Exact entangled normalisation `𝒩_E = 1/√(2(1 + e^{−d²/4σ₀²}))`.
    pub fn norm_e(&self) -> f64 {
        let l = self.sup.lambda_ab();
        1.0 / libm::sqrt(2.0 * (1.0 + l * l))
    }

    fn norm_e_sq(&self) -> f64 {
        if self.sup.exact_norm {
            let n = self.norm_e();
            n * n
        } else {
            0.5
        }
    }

    pub fn lambda_ab(&self) -> f64 {
        self.sup.lambda_ab()
    }

    fn require_entangled(&self) -> Result<()> {
        if self.kind == BipartiteKind::Entangled {
            Ok(())
        } else {
            Err(Error::WrongKind {
                expected: "entangled",
            })
        }
    }

    /// `(ln ρ, scaled x-flux numerator, scaled y-flux numerator, scaled sum)` of the entangled state.
    fn entangled_fields(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64, f64) {
        let sup = &self.sup;
        let b = &sup.base;
        let w2 = b.width_sq(t);
        let h = 0.5 * sup.d;
        let l1 = -((x - h) * (x - h) + (y + h) * (y + h)) / (2.0 * w2);
        let l2 = -((x + h) * (x + h) + (y - h) * (y - h)) / (2.0 * w2);
        let terms = PairTerms::new(l1, l2);
        let phase = sup.wavenumber(t) * (x - y);
        let (s, c) = (libm::sin(phase), libm::cos(phase));
        let sum = terms.a + terms.b + 2.0 * terms.cross * c;
        let p = b.field_slope(t);
        let q = b.hbar * sup.d / (2.0 * b.mass * w2);
        let nx = p * ((x - h) * terms.a + (x + h) * terms.b + 2.0 * x * terms.cross * c)
            - q * terms.cross * s;
        let ny = p * ((y + h) * terms.a + (y - h) * terms.b + 2.0 * y * terms.cross * c)
            + q * terms.cross * s;
        let ln_pref = libm::log(self.norm_e_sq()) - libm::log(2.0 * PI * w2) + terms.ln_scale;
        let ln_rho = if sum > 0.0 {
            ln_pref + libm::log(sum)
        } else {
            f64::NEG_INFINITY
        };
        (ln_rho, nx, ny, sum)
    }

    fn x_factor(&self) -> &SuperpositionParams {
        &self.sup
    }

    fn y_density(&self, y: f64, t: f64) -> Result<f64> {
        match self.kind {
            BipartiteKind::FactorizableSG => self.y_packet.density(y, t),
            _ => self.sup.density(y, t),
        }
    }

    fn y_velocity(&self, y: f64, t: f64) -> Result<f64> {
        match self.kind {
            BipartiteKind::FactorizableSG => self.y_packet.velocity(y, t),
            _ => self.sup.velocity(y, t),
        }
    }

    fn y_flux(&self, y: f64, t: f64) -> Result<f64> {
        match self.kind {
            BipartiteKind::FactorizableSG => {
                let rho = self.y_packet.density(y, t)?;
                Ok(rho * self.y_packet.velocity(y, t)?)
            }
            _ => self.sup.flux(y, t),
        }
    }

    /// Joint probability density `ρ(x, y, t)`.
    pub fn joint_density(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        check_finite(x, "position")?;
        check_finite(y, "position")?;
        match self.kind {
            BipartiteKind::Entangled => Ok(libm::exp(self.entangled_fields(x, y, t).0)),
            _ => Ok(self.x_factor().density(x, t)? * self.y_density(y, t)?),
        }
    }

    /// Joint flux `(ρv_x, ρv_y)`.
    pub fn joint_flux(&self, x: f64, y: f64, t: f64) -> Result<Velocity> {
        check_time(t)?;
        check_finite(x, "position")?;
        check_finite(y, "position")?;
        match self.kind {
            BipartiteKind::Entangled => {
                let (ln_rho, nx, ny, sum) = self.entangled_fields(x, y, t);
                if sum <= 0.0 {
                    return Ok(Point::new(0.0, 0.0));
                }
                let r = libm::exp(ln_rho) / sum;
                Ok(Point::new(r * nx, r * ny))
            }
            _ => {
                let rx = self.x_factor().density(x, t)?;
                let ry = self.y_density(y, t)?;
                Ok(Point::new(
                    self.x_factor().flux(x, t)? * ry,
                    rx * self.y_flux(y, t)?,
                ))
            }
        }
    }

    /// Joint velocity `(v_x, v_y)`. Factorizable kinds give `v_x(x)` and `v_y(y)`
    /// independent of the partner coordinate.
    pub fn joint_velocity(&self, x: f64, y: f64, t: f64) -> Result<Velocity> {
        check_time(t)?;
        check_finite(x, "position")?;
        check_finite(y, "position")?;
        match self.kind {
            BipartiteKind::Entangled => {
                let (ln_rho, nx, ny, sum) = self.entangled_fields(x, y, t);
                if ln_rho < libm::log(DENSITY_FLOOR) {
                    return Err(Error::DensityUnderflow {
                        x,
                        y,
                        t,
                        ln_density: ln_rho,
                    });
                }
                Ok(Point::new(nx / sum, ny / sum))
            }
            _ => Ok(Point::new(
                self.x_factor().velocity(x, t)?,
                self.y_velocity(y, t)?,
            )),
        }
    }

    pub fn log_amplitude(&self, x: f64, y: f64, t: f64) -> Result<LogAmplitude> {
        check_time(t)?;
        check_finite(x, "position")?;
        check_finite(y, "position")?;
        let sup = &self.sup;
        Ok(match self.kind {
            BipartiteKind::FactorizableSG => {
                sup.log_amplitude_unchecked(x, t) * self.y_packet.log_amplitude_unchecked(y, t)
            }
            BipartiteKind::FactorizableSS => {
                sup.log_amplitude_unchecked(x, t) * sup.log_amplitude_unchecked(y, t)
            }
            BipartiteKind::Entangled => {
                let (a, b) = (sup.packet_a(), sup.packet_b());
                LogAmplitude::sum([
                    a.log_amplitude_unchecked(x, t) * b.log_amplitude_unchecked(y, t),
                    b.log_amplitude_unchecked(x, t) * a.log_amplitude_unchecked(y, t),
                ])
                .scale(libm::sqrt(self.norm_e_sq()))
            }
        })
    }

    /// Reduced density of X after tracing out Y; the interference term carries `Λ_AB`.
    pub fn reduced_density(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        self.sup
            .line_density(x, t, self.lambda_ab(), self.norm_e_sq())
    }

    pub fn reduced_flux(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        self.sup.line_flux(x, t, self.lambda_ab(), self.norm_e_sq())
    }

    /// Reduced velocity including the `Λ_AB`-weighted interference terms.
    pub fn reduced_velocity(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        self.sup
            .line_velocity(x, t, self.lambda_ab(), self.norm_e_sq())
    }

    /// Reduced velocity with the `Λ_AB` terms dropped: an incoherent two-packet mixture.
    pub fn reduced_velocity_simplified(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        self.sup.line_velocity(x, t, 0.0, self.norm_e_sq())
    }

    /// Long-time effective field `ħ²tx / 4m²σ₀²σ_t²` of a single packet at rest at the origin.
    pub fn reduced_velocity_asymptotic(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        check_time(t)?;
        Ok(self.sup.base.field_slope(t) * x)
    }

    /// Single Gaussian `(1/2πσ_t²)^{1/2} e^{−x²/2σ_t²}` that the reduced density
    /// approaches once the packets overlap completely.
    pub fn reduced_density_asymptotic(&self, x: f64, t: f64) -> Result<f64> {
        self.require_entangled()?;
        check_time(t)?;
        let w2 = self.sup.base.width_sq(t);
        Ok(libm::exp(-x * x / (2.0 * w2)) / libm::sqrt(2.0 * PI * w2))
    }
}

/// Tag for the five supported states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StateKind {
    SingleGaussian,
    Superposition,
    FactorizableSG,
    FactorizableSS,
    Entangled,
}

impl StateKind {
    pub const ALL: [StateKind; 5] = [
        StateKind::SingleGaussian,
        StateKind::Superposition,
        StateKind::FactorizableSG,
        StateKind::FactorizableSS,
        StateKind::Entangled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::SingleGaussian => "single-gaussian",
            StateKind::Superposition => "superposition",
            StateKind::FactorizableSG => "factorizable-sg",
            StateKind::FactorizableSS => "factorizable-ss",
            StateKind::Entangled => "entangled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum QuantumState {
    SingleGaussian(PacketParams),
    Superposition(SuperpositionParams),
    Bipartite(BipartiteState),
}

impl QuantumState {
    /// The state with the default (natural-unit) parameters, `d = 10`.
    pub fn preset(kind: StateKind) -> QuantumState {
        let sup = SuperpositionParams::default();
        match kind {
            StateKind::SingleGaussian => QuantumState::SingleGaussian(PacketParams::default()),
            StateKind::Superposition => QuantumState::Superposition(sup),
            StateKind::FactorizableSG => QuantumState::Bipartite(BipartiteState {
                kind: BipartiteKind::FactorizableSG,
                sup,
                y_packet: PacketParams::default(),
            }),
            StateKind::FactorizableSS => QuantumState::Bipartite(BipartiteState {
                kind: BipartiteKind::FactorizableSS,
                sup,
                y_packet: PacketParams::default(),
            }),
            StateKind::Entangled => QuantumState::Bipartite(BipartiteState {
                kind: BipartiteKind::Entangled,
                sup,
                y_packet: PacketParams::default(),
            }),
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            QuantumState::SingleGaussian(_) => StateKind::SingleGaussian,
            QuantumState::Superposition(_) => StateKind::Superposition,
            QuantumState::Bipartite(b) => match b.kind {
                BipartiteKind::FactorizableSG => StateKind::FactorizableSG,
                BipartiteKind::FactorizableSS => StateKind::FactorizableSS,
                BipartiteKind::Entangled => StateKind::Entangled,
            },
        }
    }

    /// Configuration-space dimension (1 or 2).
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Bipartite(_) => 2,
            _ => 1,
        }
    }

    fn base(&self) -> &PacketParams {
        match self {
            QuantumState::SingleGaussian(p) => p,
            QuantumState::Superposition(s) => &s.base,
            QuantumState::Bipartite(b) => &b.sup.base,
        }
    }

    pub fn mass(&self) -> f64 {
        self.base().mass
    }

    pub fn hbar(&self) -> f64 {
        self.base().hbar
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuantumState::SingleGaussian(p) => p.validate(),
            QuantumState::Superposition(s) => s.validate(),
            QuantumState::Bipartite(b) => {
                b.sup.validate()?;
                b.y_packet.validate()
            }
        }
    }

    /// Interference wavenumber `k_t`, or `None` for the single packet.
    pub fn wavenumber(&self, t: f64) -> Option<f64> {
        match self {
            QuantumState::SingleGaussian(_) => None,
            QuantumState::Superposition(s) => Some(s.wavenumber(t)),
            QuantumState::Bipartite(b) => Some(b.sup.wavenumber(t)),
        }
    }

    /// Packet width `σ_t`.
    pub fn width(&self, t: f64) -> f64 {
        self.base().width(t)
    }

    /// Centres of the packets (or packet products) the state starts from.
    pub fn centres(&self) -> alloc::vec::Vec<Point> {
        use alloc::vec;
        match self {
            QuantumState::SingleGaussian(p) => vec![Point::on_line(p.x0)],
            QuantumState::Superposition(s) => {
                vec![Point::on_line(s.x_a()), Point::on_line(s.x_b())]
            }
            QuantumState::Bipartite(b) => {
                let (xa, xb) = (b.sup.x_a(), b.sup.x_b());
                match b.kind {
                    BipartiteKind::FactorizableSG => {
                        let y0 = b.y_packet.x0;
                        vec![Point::new(xa, y0), Point::new(xb, y0)]
                    }
                    BipartiteKind::FactorizableSS => vec![
                        Point::new(xa, xa),
                        Point::new(xa, xb),
                        Point::new(xb, xa),
                        Point::new(xb, xb),
                    ],
                    BipartiteKind::Entangled => vec![Point::new(xa, xb), Point::new(xb, xa)],
                }
            }
        }
    }

    pub fn density(&self, p: Point, t: f64) -> Result<f64> {
        match self {
            QuantumState::SingleGaussian(g) => g.density(p.x, t),
            QuantumState::Superposition(s) => s.density(p.x, t),
            QuantumState::Bipartite(b) => b.joint_density(p.x, p.y, t),
        }
    }

    pub fn velocity(&self, p: Point, t: f64) -> Result<Velocity> {
        match self {
            QuantumState::SingleGaussian(g) => Ok(Point::on_line(g.velocity(p.x, t)?)),
            QuantumState::Superposition(s) => Ok(Point::on_line(s.velocity(p.x, t)?)),
            QuantumState::Bipartite(b) => b.joint_velocity(p.x, p.y, t),
        }
    }

    /// Probability flux `ρv`.
    pub fn flux(&self, p: Point, t: f64) -> Result<Velocity> {
        match self {
            QuantumState::SingleGaussian(g) => {
                Ok(Point::on_line(g.density(p.x, t)? * g.velocity(p.x, t)?))
            }
            QuantumState::Superposition(s) => Ok(Point::on_line(s.flux(p.x, t)?)),
            QuantumState::Bipartite(b) => b.joint_flux(p.x, p.y, t),
        }
    }

    pub fn log_amplitude(&self, p: Point, t: f64) -> Result<LogAmplitude> {
        match self {
            QuantumState::SingleGaussian(g) => g.log_amplitude(p.x, t),
            QuantumState::Superposition(s) => s.log_amplitude(p.x, t),
            QuantumState::Bipartite(b) => b.log_amplitude(p.x, p.y, t),
        }
    }
}
