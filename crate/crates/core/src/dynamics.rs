//! Marker ensembles and trajectory integration through the velocity fields.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::states::{BipartiteKind, BipartiteState, QuantumState};
use crate::{Coordinate, Point, Velocity, DENSITY_FLOOR};

/// A velocity field that trajectories can be integrated through.
pub trait VelocityField {
    /// Number of configuration coordinates (1 or 2).
    fn dim(&self) -> usize;
    fn density(&self, p: Point, t: f64) -> Result<f64>;
    fn velocity(&self, p: Point, t: f64) -> Result<Velocity>;
}

impl VelocityField for QuantumState {
    fn dim(&self) -> usize {
        QuantumState::dim(self)
    }

    fn density(&self, p: Point, t: f64) -> Result<f64> {
        QuantumState::density(self, p, t)
    }

    fn velocity(&self, p: Point, t: f64) -> Result<Velocity> {
        QuantumState::velocity(self, p, t)
    }
}

/// One-dimensional reduced field of the entangled state (partner traced out).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedField(BipartiteState);

impl ReducedField {
    pub fn new(state: BipartiteState) -> Result<Self> {
        if state.kind != BipartiteKind::Entangled {
            return Err(Error::WrongKind {
                expected: "entangled",
            });
        }
        Ok(ReducedField(state))
    }
}

impl VelocityField for ReducedField {
    fn dim(&self) -> usize {
        1
    }

    fn density(&self, p: Point, t: f64) -> Result<f64> {
        self.0.reduced_density(p.x, t)
    }

    fn velocity(&self, p: Point, t: f64) -> Result<Velocity> {
        Ok(Point::on_line(self.0.reduced_velocity(p.x, t)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Layout {
    LineX,
    LineY,
    /// `LineX ∪ LineY`, sharing the centre marker.
    Cross,
    /// `count × count` evenly spaced markers.
    SquareGrid,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnsembleSpec {
    pub layout: Layout,
    /// Markers per arm; odd so the centre is always a marker.
    pub count_per_arm: usize,
    /// Markers span `centre ± half_width` along each arm.
    pub half_width: f64,
    pub centers: Vec<Point>,
}

impl EnsembleSpec {
    pub fn new(
        layout: Layout,
        count_per_arm: usize,
        half_width: f64,
        centers: Vec<Point>,
    ) -> Result<Self> {
        let spec = EnsembleSpec {
            layout,
            count_per_arm,
            half_width,
            centers,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default 21-marker arms of half width 1 around each centre.
    pub fn around(layout: Layout, centers: Vec<Point>) -> Self {
        EnsembleSpec {
            layout,
            count_per_arm: 21,
            half_width: 1.0,
            centers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count_per_arm == 0 || self.count_per_arm.is_multiple_of(2) {
            return Err(Error::InvalidEnsemble("count_per_arm must be odd"));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidEnsemble(
                "half_width must be finite and positive",
            ));
        }
        if self.centers.is_empty() {
            return Err(Error::InvalidEnsemble("at least one centre required"));
        }
        if self.centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidEnsemble("centres must be finite"));
        }
        Ok(())
    }

    fn offset(&self, i: usize) -> f64 {
        if self.count_per_arm == 1 {
            return 0.0;
        }
        let half = (self.count_per_arm / 2) as f64;
        self.half_width * (i as f64 - half) / half
    }

    /// Initial points in marker order: centre by centre, arm by arm.
    pub fn markers(&self) -> Vec<Point> {
        let n = self.count_per_arm;
        let mut out = Vec::new();
        for c in &self.centers {
            match self.layout {
                Layout::LineX => out.extend((0..n).map(|i| Point::new(c.x + self.offset(i), c.y))),
                Layout::LineY => out.extend((0..n).map(|i| Point::new(c.x, c.y + self.offset(i)))),
                Layout::Cross => {
                    out.extend((0..n).map(|i| Point::new(c.x + self.offset(i), c.y)));
                    out.extend(
                        (0..n)
                            .filter(|&i| i != n / 2)
                            .map(|i| Point::new(c.x, c.y + self.offset(i))),
                    );
                }
                Layout::SquareGrid => {
                    for i in 0..n {
                        for j in 0..n {
                            out.push(Point::new(c.x + self.offset(i), c.y + self.offset(j)));
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Method {
    Rk4,
    /// Dormand–Prince 5(4) with error control.
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for RK45.
    pub dt: f64,
    pub dt_min: f64,
    /// RK45 local error tolerance.
    pub tol: f64,
    pub t_end: f64,
    /// Keep every n-th step (the final state is always kept).
    pub record_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            dt: 1e-3,
            dt_min: 1e-7,
            tol: 1e-8,
            t_end: 10.0,
            record_every: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidIntegrator("dt must be finite and positive"));
        }
        if !(self.dt_min > 0.0 && self.dt_min < self.dt) {
            return Err(Error::InvalidIntegrator(
                "dt_min must satisfy 0 < dt_min < dt",
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidIntegrator("tol must be finite and positive"));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidIntegrator(
                "t_end must be finite and non-negative",
            ));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidIntegrator("record_every must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub t: f64,
    pub point: Point,
    pub velocity: Velocity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Status {
    Complete,
    /// The step size fell below `dt_min` near a density node.
    HaltedNodeProximity,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::HaltedNodeProximity => "halted-node-proximity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trajectory {
    pub marker: usize,
    pub initial: Point,
    pub samples: Vec<Sample>,
    pub status: Status,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has at least its initial sample")
    }

    /// Position at `t` by linear interpolation between samples; `None` outside the recorded span.
    pub fn position_at(&self, t: f64) -> Option<Point> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        let i = self.samples.partition_point(|s| s.t <= t);
        if i == 0 {
            return Some(first.point);
        }
        if i == self.samples.len() {
            return Some(last.point);
        }
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        let w = (t - a.t) / (b.t - a.t);
        Some(Point::new(
            a.point.x + w * (b.point.x - a.point.x),
            a.point.y + w * (b.point.y - a.point.y),
        ))
    }
}

/// One coordinate of one trajectory.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Projection {
    pub marker: usize,
    pub axis: Coordinate,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

pub fn project(trajectories: &[Trajectory], axis: Coordinate) -> Vec<Projection> {
    trajectories
        .iter()
        .map(|tr| Projection {
            marker: tr.marker,
            axis,
            times: tr.samples.iter().map(|s| s.t).collect(),
            values: tr.samples.iter().map(|s| s.point.component(axis)).collect(),
        })
        .collect()
}

fn axpy(p: Point, h: f64, v: Velocity) -> Point {
    Point::new(p.x + h * v.x, p.y + h * v.y)
}

fn combine(p: Point, h: f64, ks: &[(f64, Velocity)]) -> Point {
    let (mut dx, mut dy) = (0.0, 0.0);
    for &(c, k) in ks {
        dx += c * k.x;
        dy += c * k.y;
    }
    Point::new(p.x + h * dx, p.y + h * dy)
}

fn rk4_step<F: VelocityField + ?Sized>(
    field: &F,
    p: Point,
    t: f64,
    h: f64,
    k1: Velocity,
) -> Result<Point> {
    let k2 = field.velocity(axpy(p, 0.5 * h, k1), t + 0.5 * h)?;
    let k3 = field.velocity(axpy(p, 0.5 * h, k2), t + 0.5 * h)?;
    let k4 = field.velocity(axpy(p, h, k3), t + h)?;
    Ok(combine(
        p,
        h,
        &[
            (1.0 / 6.0, k1),
            (1.0 / 3.0, k2),
            (1.0 / 3.0, k3),
            (1.0 / 6.0, k4),
        ],
    ))
}

/// Dormand–Prince 5(4): returns the fifth-order point and the scaled error norm.
fn dopri_step<F: VelocityField + ?Sized>(
    field: &F,
    p: Point,
    t: f64,
    h: f64,
    k1: Velocity,
    tol: f64,
) -> Result<(Point, f64)> {
    let k2 = field.velocity(combine(p, h, &[(1.0 / 5.0, k1)]), t + h / 5.0)?;
    let k3 = field.velocity(
        combine(p, h, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
        t + 0.3 * h,
    )?;
    let k4 = field.velocity(
        combine(
            p,
            h,
            &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
        ),
        t + 0.8 * h,
    )?;
    let k5 = field.velocity(
        combine(
            p,
            h,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
        t + 8.0 / 9.0 * h,
    )?;
    let k6 = field.velocity(
        combine(
            p,
            h,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
        t + h,
    )?;
    let y5 = combine(
        p,
        h,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = field.velocity(y5, t + h)?;
    let e = [
        (71.0 / 57600.0, k1),
        (-71.0 / 16695.0, k3),
        (71.0 / 1920.0, k4),
        (-17253.0 / 339200.0, k5),
        (22.0 / 525.0, k6),
        (-1.0 / 40.0, k7),
    ];
    let diff = combine(Point::new(0.0, 0.0), h, &e);
    let err =
        (diff.x.abs() / (tol * (1.0 + y5.x.abs()))).max(diff.y.abs() / (tol * (1.0 + y5.y.abs())));
    Ok((y5, err))
}

fn is_underflow(e: &Error) -> bool {
    matches!(e, Error::DensityUnderflow { .. })
}

struct Recorder {
    samples: Vec<Sample>,
    every: usize,
    steps: usize,
}

impl Recorder {
    fn push(&mut self, s: Sample, force: bool) {
        self.steps += 1;
        if force || self.steps.is_multiple_of(self.every) {
            self.samples.push(s);
        }
    }
}

/// Integrates a single marker from `initial` at `t = 0`.
pub fn integrate_marker<F: VelocityField + ?Sized>(
    field: &F,
    marker: usize,
    initial: Point,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let rho = field.density(initial, 0.0)?;
    if !(rho > DENSITY_FLOOR) {
        return Err(Error::InvalidInitialCondition {
            x: initial.x,
            y: initial.y,
        });
    }
    let v0 = field.velocity(initial, 0.0)?;
    let mut rec = Recorder {
        samples: alloc::vec![Sample {
            t: 0.0,
            point: initial,
            velocity: v0,
        }],
        every: cfg.record_every,
        steps: 0,
    };
    let status = match cfg.method {
        Method::Rk4 => run_rk4(field, initial, v0, cfg, &mut rec)?,
        Method::Rk45 => run_rk45(field, initial, v0, cfg, &mut rec)?,
    };
    Ok(Trajectory {
        marker,
        initial,
        samples: rec.samples,
        status,
    })
}

fn run_rk4<F: VelocityField + ?Sized>(
    field: &F,
    mut p: Point,
    mut v: Velocity,
    cfg: &IntegratorConfig,
    rec: &mut Recorder,
) -> Result<Status> {
    let steps = libm::ceil(cfg.t_end / cfg.dt - 1e-9).max(0.0) as usize;
    let mut t = 0.0;
    for k in 0..steps {
        let t_next = if k + 1 == steps {
            cfg.t_end
        } else {
            (k + 1) as f64 * cfg.dt
        };
        let mut h_try = t_next - t;
        // Substeps only happen when a stage lands too close to a node.
        while t < t_next {
            let h = h_try.min(t_next - t);
            match rk4_step(field, p, t, h, v).and_then(|q| {
                let t_new = if h == t_next - t { t_next } else { t + h };
                field.velocity(q, t_new).map(|w| (q, w, t_new))
            }) {
                Ok((q, w, t_new)) => {
                    p = q;
                    v = w;
                    t = t_new;
                }
                Err(e) if is_underflow(&e) => {
                    h_try = 0.5 * h;
                    if h_try < cfg.dt_min {
                        log::debug!("marker halted near a node at t = {t}");
                        rec.push(
                            Sample {
                                t,
                                point: p,
                                velocity: v,
                            },
                            true,
                        );
                        rec.samples.dedup_by(|a, b| a.t == b.t);
                        return Ok(Status::HaltedNodeProximity);
                    }
                }
                Err(e) => return Err(e),
            }
        }
        rec.push(
            Sample {
                t,
                point: p,
                velocity: v,
            },
            k + 1 == steps,
        );
    }
    Ok(Status::Complete)
}

fn run_rk45<F: VelocityField + ?Sized>(
    field: &F,
    mut p: Point,
    mut v: Velocity,
    cfg: &IntegratorConfig,
    rec: &mut Recorder,
) -> Result<Status> {
    let mut t = 0.0;
    let mut h = cfg.dt;
    while t < cfg.t_end {
        let last = t + h >= cfg.t_end;
        let step = if last { cfg.t_end - t } else { h };
        match dopri_step(field, p, t, step, v, cfg.tol).and_then(|(q, err)| {
            let t_new = if last { cfg.t_end } else { t + step };
            field.velocity(q, t_new).map(|w| (q, w, err, t_new))
        }) {
            Ok((q, w, err, t_new)) if err <= 1.0 => {
                p = q;
                v = w;
                t = t_new;
                rec.push(
                    Sample {
                        t,
                        point: p,
                        velocity: v,
                    },
                    t >= cfg.t_end,
                );
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
                };
                h = step * grow;
            }
            Ok((_, _, err, _)) => {
                h = step * (0.9 * libm::pow(err, -0.25)).clamp(0.1, 0.9);
            }
            Err(e) if is_underflow(&e) => h = 0.5 * step,
            Err(e) => return Err(e),
        }
        if h < cfg.dt_min && t < cfg.t_end {
            log::debug!("adaptive step fell below dt_min at t = {t}");
            if rec.samples.last().map(|s| s.t) != Some(t) {
                rec.samples.push(Sample {
                    t,
                    point: p,
                    velocity: v,
                });
            }
            return Ok(Status::HaltedNodeProximity);
        }
    }
    Ok(Status::Complete)
}

/// Integrates every marker of `spec` in marker order.
pub fn integrate<F: VelocityField + ?Sized>(
    field: &F,
    spec: &EnsembleSpec,
    cfg: &IntegratorConfig,
) -> Result<Vec<Trajectory>> {
    validate_inputs(field, spec, cfg)?;
    spec.markers()
        .into_iter()
        .enumerate()
        .map(|(i, p)| integrate_marker(field, i, p, cfg))
        .collect()
}

/// Checks the ensemble against the field before any integration starts.
pub fn validate_inputs<F: VelocityField + ?Sized>(
    field: &F,
    spec: &EnsembleSpec,
    cfg: &IntegratorConfig,
) -> Result<()> {
    spec.validate()?;
    cfg.validate()?;
    if field.dim() == 1 {
        if matches!(
            spec.layout,
            Layout::LineY | Layout::Cross | Layout::SquareGrid
        ) {
            return Err(Error::InvalidEnsemble(
                "one-dimensional fields need a LineX layout",
            ));
        }
        if spec.centers.iter().any(|c| c.y != 0.0) {
            return Err(Error::InvalidEnsemble(
                "one-dimensional centres must have y = 0",
            ));
        }
    }
    for p in spec.markers() {
        if !(field.density(p, 0.0)? > DENSITY_FLOOR) {
            return Err(Error::InvalidInitialCondition { x: p.x, y: p.y });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packets::PacketParams;
    use crate::states::{StateKind, SuperpositionParams};

    fn single() -> QuantumState {
        QuantumState::SingleGaussian(PacketParams::default())
    }

    fn max_error(cfg: &IntegratorConfig) -> f64 {
        let p = PacketParams::default();
        let spec = EnsembleSpec::around(Layout::LineX, alloc::vec![Point::on_line(0.0)]);
        let trs = integrate(&single(), &spec, cfg).unwrap();
        let mut worst = 0.0f64;
        for tr in &trs {
            for s in &tr.samples {
                let exact = p.trajectory(tr.initial.x, s.t).unwrap();
                worst = worst.max((s.point.x - exact).abs());
            }
        }
        worst
    }

    #[test]
    fn marker_layouts() {
        let c = alloc::vec![Point::new(1.0, 2.0)];
        let line = EnsembleSpec::around(Layout::LineX, c.clone()).markers();
        assert_eq!(line.len(), 21);
        assert_eq!(line[10], Point::new(1.0, 2.0));
        assert_eq!(line[0], Point::new(0.0, 2.0));
        assert_eq!(line[20], Point::new(2.0, 2.0));
        assert_eq!(
            EnsembleSpec::around(Layout::Cross, c.clone())
                .markers()
                .len(),
            41
        );
        assert_eq!(
            EnsembleSpec::around(Layout::SquareGrid, c).markers().len(),
            441
        );
    }

    #[test]
    fn even_count_rejected() {
        let spec = EnsembleSpec {
            count_per_arm: 20,
            ..EnsembleSpec::around(Layout::LineX, alloc::vec![Point::on_line(0.0)])
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn rk4_matches_analytic_and_converges() {
        let cfg = IntegratorConfig {
            t_end: 2.0,
            dt: 0.04,
            ..IntegratorConfig::default()
        };
        let e1 = max_error(&cfg);
        let e2 = max_error(&IntegratorConfig { dt: 0.02, ..cfg });
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn rk45_matches_analytic() {
        let cfg = IntegratorConfig {
            method: Method::Rk45,
            dt: 1e-2,
            t_end: 10.0,
            ..IntegratorConfig::default()
        };
        assert!(max_error(&cfg) < 1e-6);
    }

    #[test]
    fn samples_start_at_initial_and_increase() {
        let cfg = IntegratorConfig {
            t_end: 1.0,
            dt: 0.01,
            record_every: 7,
            ..IntegratorConfig::default()
        };
        let tr = integrate_marker(&single(), 0, Point::on_line(0.3), &cfg).unwrap();
        assert_eq!(tr.samples[0].t, 0.0);
        assert_eq!(tr.samples[0].point, Point::on_line(0.3));
        assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(tr.final_sample().t, 1.0);
        assert_eq!(tr.status, Status::Complete);
    }

    #[test]
    fn zero_density_start_rejected() {
        let s = QuantumState::Superposition(SuperpositionParams::default());
        let r = integrate_marker(&s, 0, Point::on_line(80.0), &IntegratorConfig::default());
        assert!(matches!(r, Err(Error::InvalidInitialCondition { .. })));
    }

    #[test]
    fn one_dimensional_fields_reject_2d_layouts() {
        let spec = EnsembleSpec::around(Layout::Cross, alloc::vec![Point::on_line(5.0)]);
        let s = QuantumState::preset(StateKind::Superposition);
        assert!(integrate(&s, &spec, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn position_interpolation() {
        let cfg = IntegratorConfig {
            t_end: 1.0,
            dt: 0.5,
            dt_min: 1e-3,
            ..IntegratorConfig::default()
        };
        let tr = integrate_marker(&single(), 0, Point::on_line(1.0), &cfg).unwrap();
        let mid = tr.position_at(0.25).unwrap();
        let a = tr.samples[0].point.x;
        let b = tr.samples[1].point.x;
        assert!((mid.x - 0.5 * (a + b)).abs() < 1e-15);
        assert!(tr.position_at(1.5).is_none());
    }

    #[test]
    fn reduced_field_requires_entangled() {
        let b = BipartiteState::factorizable_ss(SuperpositionParams::default()).unwrap();
        assert!(ReducedField::new(b).is_err());
    }
}
