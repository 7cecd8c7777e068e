//! Scenario configuration: defaults, then a flat TOML file, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bohmflow::dynamics::{IntegratorConfig, Method};
use bohmflow::{PacketParams, SuperpositionParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BOHMFLOW_OUT";
const DEFAULT_OUT: &str = "bohmflow-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    S2,
    S3,
    S4,
    S5,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::Fig1,
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::S2,
        Preset::S3,
        Preset::S4,
        Preset::S5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::S2 => "s2",
            Preset::S3 => "s3",
            Preset::S4 => "s4",
            Preset::S5 => "s5",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Preset::Fig1 => "single packet and superposition: (t, x) density and velocity grids, 21-marker trajectories",
            Preset::Fig2 => "velocity-field slope and trajectory separation rate against time",
            Preset::Fig3 => "bipartite densities at snapshots with cross-shaped marker ensembles",
            Preset::Fig4 => "bipartite v_x at snapshots with cross-shaped marker ensembles",
            Preset::Fig5 => "bipartite v_y at snapshots with cross-shaped marker ensembles",
            Preset::Fig6 => "subsystem projections of the cross ensembles and crossing census",
            Preset::S2 => "bipartite densities at snapshots with 21x21 square marker arrays",
            Preset::S3 => "bipartite v_x at snapshots with 21x21 square marker arrays",
            Preset::S4 => "bipartite v_y at snapshots with 21x21 square marker arrays",
            Preset::S5 => "full (t, x, y) trajectory tables of the cross ensembles",
        }
    }

    fn default_snapshots(self) -> Vec<f64> {
        match self {
            Preset::Fig3 | Preset::S2 => vec![0.0, 2.0, 4.0, 10.0],
            Preset::Fig4 | Preset::Fig5 | Preset::S3 | Preset::S4 => vec![2.0, 4.0, 10.0],
            _ => vec![10.0],
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::config("preset", format!("unknown preset `{s}`")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One configuration layer; unset keys fall through to the layer below.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub preset: Option<Preset>,
    pub out: Option<PathBuf>,
    pub x0: Option<f64>,
    pub p0: Option<f64>,
    pub sigma0: Option<f64>,
    pub mass: Option<f64>,
    pub hbar: Option<f64>,
    pub d: Option<f64>,
    pub method: Option<Method>,
    pub dt: Option<f64>,
    pub dt_min: Option<f64>,
    pub tol: Option<f64>,
    pub t_end: Option<f64>,
    pub record_dt: Option<f64>,
    pub markers: Option<usize>,
    pub half_width: Option<f64>,
    pub grid: Option<usize>,
    pub time_samples: Option<usize>,
    pub snapshots: Option<Vec<f64>>,
    pub extent: Option<f64>,
}

macro_rules! overlay {
    ($self:ident, $other:ident; $($f:ident),*) => {
        $( if $other.$f.is_some() { $self.$f = $other.$f; } )*
    };
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|source| CliError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Keys set in `other` replace those in `self`.
    pub fn overlay(mut self, other: ConfigLayer) -> Self {
        overlay!(self, other; preset, out, x0, p0, sigma0, mass, hbar, d, method, dt, dt_min, tol,
            t_end, record_dt, markers, half_width, grid, time_samples, snapshots, extent);
        self
    }
}

/// Fully resolved scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub preset: Preset,
    /// Not part of the config hash: the same scenario may be written anywhere.
    #[serde(skip)]
    pub out: PathBuf,
    pub x0: f64,
    pub p0: f64,
    pub sigma0: f64,
    pub mass: f64,
    pub hbar: f64,
    pub d: f64,
    pub method: Method,
    pub dt: f64,
    pub dt_min: f64,
    pub tol: f64,
    pub t_end: f64,
    pub record_dt: f64,
    pub markers: usize,
    pub half_width: f64,
    pub grid: usize,
    pub time_samples: usize,
    pub snapshots: Vec<f64>,
    /// Half-width of every spatial grid axis.
    pub extent: f64,
}

fn finite(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(field, "must be finite"))
    }
}

fn positive(field: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(field, "must be finite and positive"))
    }
}

impl ScenarioConfig {
    pub fn resolve(layer: ConfigLayer) -> CliResult<Self> {
        let preset = layer.preset.ok_or_else(|| {
            CliError::config(
                "preset",
                "no preset given (name one, or set `preset` in the config file)",
            )
        })?;
        let out = layer
            .out
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let defaults = IntegratorConfig::default();

        let x0 = finite("x0", layer.x0.unwrap_or(0.0))?;
        let p0 = finite("p0", layer.p0.unwrap_or(0.0))?;
        let sigma0 = positive("sigma0", layer.sigma0.unwrap_or(0.5))?;
        let mass = positive("mass", layer.mass.unwrap_or(1.0))?;
        let hbar = positive("hbar", layer.hbar.unwrap_or(1.0))?;
        let d = positive("d", layer.d.unwrap_or(10.0))?;
        let dt = positive("dt", layer.dt.unwrap_or(defaults.dt))?;
        let dt_min = positive("dt_min", layer.dt_min.unwrap_or(defaults.dt_min))?;
        if dt_min >= dt {
            return Err(CliError::config("dt_min", "must be smaller than dt"));
        }
        let tol = positive("tol", layer.tol.unwrap_or(defaults.tol))?;
        let t_end = positive("t_end", layer.t_end.unwrap_or(defaults.t_end))?;
        let record_dt = positive("record_dt", layer.record_dt.unwrap_or(0.05))?;
        if record_dt < dt {
            return Err(CliError::config("record_dt", "must not be smaller than dt"));
        }
        let markers = layer.markers.unwrap_or(21);
        if markers < 3 || markers.is_multiple_of(2) {
            return Err(CliError::config("markers", "must be odd and at least 3"));
        }
        let half_width = positive("half_width", layer.half_width.unwrap_or(1.0))?;
        let grid = layer.grid.unwrap_or(201);
        if !(3..=4001).contains(&grid) {
            return Err(CliError::config("grid", "must lie in 3..=4001"));
        }
        let time_samples = layer.time_samples.unwrap_or(201);
        if !(2..=4001).contains(&time_samples) {
            return Err(CliError::config("time_samples", "must lie in 2..=4001"));
        }

        let snapshots = match layer.snapshots {
            Some(s) => {
                if s.is_empty() {
                    return Err(CliError::config("snapshots", "must not be empty"));
                }
                if s.iter()
                    .any(|&t| !(t.is_finite() && t >= 0.0 && t <= t_end))
                {
                    return Err(CliError::config(
                        "snapshots",
                        "times must lie in [0, t_end]",
                    ));
                }
                if s.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(CliError::config(
                        "snapshots",
                        "times must be strictly ascending",
                    ));
                }
                s
            }
            None => {
                let mut s: Vec<f64> = preset
                    .default_snapshots()
                    .into_iter()
                    .filter(|&t| t < t_end)
                    .collect();
                s.push(t_end);
                s
            }
        };
        let t_last = *snapshots.last().expect("snapshots are non-empty");

        let base = PacketParams::new(0.0, p0, sigma0, mass, hbar)?;
        let sigma_last = base.spreading(t_last.max(t_end))?.sigma_t;
        let extent = match layer.extent {
            Some(e) => positive("extent", e)?,
            None => d / 2.0 + 4.0 * sigma_last,
        };

        let cfg = ScenarioConfig {
            preset,
            out,
            x0,
            p0,
            sigma0,
            mass,
            hbar,
            d,
            method: layer.method.unwrap_or(defaults.method),
            dt,
            dt_min,
            tol,
            t_end,
            record_dt,
            markers,
            half_width,
            grid,
            time_samples,
            snapshots,
            extent,
        };
        cfg.superposition()?;
        cfg.check_resolution()?;
        Ok(cfg)
    }

    /// Packet centred at `x0` (the single Gaussian and the `Y` factor).
    pub fn packet(&self) -> CliResult<PacketParams> {
        Ok(PacketParams::new(
            self.x0,
            self.p0,
            self.sigma0,
            self.mass,
            self.hbar,
        )?)
    }

    pub fn superposition(&self) -> CliResult<SuperpositionParams> {
        let base = PacketParams::new(0.0, self.p0, self.sigma0, self.mass, self.hbar)?;
        SuperpositionParams::new(base, self.d).map_err(|e| match e {
            bohmflow::Error::InvalidParameter { name, reason } => CliError::config(name, reason),
            other => other.into(),
        })
    }

    pub fn integrator(&self) -> IntegratorConfig {
        let every = (self.record_dt / self.dt).round().max(1.0) as usize;
        IntegratorConfig {
            method: self.method,
            dt: self.dt,
            dt_min: self.dt_min,
            tol: self.tol,
            t_end: self.t_end,
            record_every: every,
        }
    }

    /// At least eight grid samples per fringe at the latest snapshot.
    fn check_resolution(&self) -> CliResult<()> {
        let t_last = self
            .snapshots
            .last()
            .copied()
            .unwrap_or(self.t_end)
            .max(self.t_end);
        let k = self.superposition()?.wavenumber(t_last);
        let step = 2.0 * self.extent / (self.grid - 1) as f64;
        let per_period = 2.0 * std::f64::consts::PI / (k * step);
        if per_period < 8.0 {
            let needed =
                (2.0 * self.extent * k * 8.0 / (2.0 * std::f64::consts::PI)).ceil() as usize + 1;
            return Err(CliError::config(
                "grid",
                format!(
                    "{per_period:.2} samples per fringe at t = {t_last}; need 8 (grid >= {needed})"
                ),
            ));
        }
        Ok(())
    }
}
