//! Preset scenarios: which states, fields, ensembles and reports each one emits.

use std::path::Path;

use bohmflow::analysis::{
    census_crossings, detect_fringes, extract_plateaus, min_pairwise_separation, sample_line,
    visibility,
};
use bohmflow::dynamics::{
    integrate_marker, project, validate_inputs, EnsembleSpec, Layout, Trajectory, VelocityField,
};
use bohmflow::{
    Axis, BipartiteState, Coordinate, Error, FieldGrid, FieldKind, Point, QuantumState, StateKind,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Preset, ScenarioConfig};
use crate::error::{CliError, CliResult};
use crate::export;

/// One output file, rendered in memory before anything is written.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub kind: &'static str,
    pub axes: Vec<Axis>,
    pub contents: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub kind: String,
    pub axes: Vec<Axis>,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub preset: String,
    pub config_sha256: String,
    pub config: ScenarioConfig,
    pub artifacts: Vec<ArtifactEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

type Task<'a> = Box<dyn Fn() -> CliResult<Vec<Artifact>> + Send + Sync + 'a>;

/// Runs a resolved scenario and writes its artifacts, manifest last.
pub fn run_scenario(cfg: &ScenarioConfig) -> CliResult<RunManifest> {
    let tasks = tasks(cfg)?;
    let rendered: Vec<Vec<Artifact>> = tasks
        .par_iter()
        .map(|task| task())
        .collect::<CliResult<_>>()?;
    let artifacts: Vec<Artifact> = rendered.into_iter().flatten().collect();

    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let mut entries = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        export::write_file(&cfg.out.join(&a.file), &a.contents)?;
        log::info!("wrote {}", a.file);
        entries.push(ArtifactEntry {
            bytes: a.contents.len(),
            sha256: sha256_hex(a.contents.as_bytes()),
            file: a.file,
            kind: a.kind.to_string(),
            axes: a.axes,
        });
    }
    let config_json = serde_json::to_vec(cfg).expect("config serialises");
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        preset: cfg.preset.name().to_string(),
        config_sha256: sha256_hex(&config_json),
        config: cfg.clone(),
        artifacts: entries,
    };
    let path = cfg.out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    text.push('\n');
    export::write_file(&path, &text)?;
    Ok(manifest)
}

/// Reads a manifest written by [`run_scenario`].
pub fn read_manifest(dir: &Path) -> CliResult<Value> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(&path, std::io::Error::other(e)))
}

fn states_for(cfg: &ScenarioConfig, kinds: &[StateKind]) -> CliResult<Vec<QuantumState>> {
    let sup = cfg.superposition()?;
    let y = cfg.packet()?;
    kinds
        .iter()
        .map(|k| {
            Ok(match k {
                StateKind::SingleGaussian => QuantumState::SingleGaussian(cfg.packet()?),
                StateKind::Superposition => QuantumState::Superposition(sup),
                StateKind::FactorizableSG => {
                    QuantumState::Bipartite(BipartiteState::factorizable_sg(sup, y)?)
                }
                StateKind::FactorizableSS => {
                    QuantumState::Bipartite(BipartiteState::factorizable_ss(sup)?)
                }
                StateKind::Entangled => QuantumState::Bipartite(BipartiteState::entangled(sup)?),
            })
        })
        .collect()
}

const BIPARTITE: [StateKind; 3] = [
    StateKind::FactorizableSG,
    StateKind::FactorizableSS,
    StateKind::Entangled,
];

fn space_axis(cfg: &ScenarioConfig, name: &str) -> CliResult<Axis> {
    Ok(Axis::symmetric(name, cfg.extent, cfg.grid)?)
}

fn time_axis(cfg: &ScenarioConfig) -> CliResult<Axis> {
    Ok(Axis::new("t", 0.0, cfg.t_end, cfg.time_samples)?)
}

/// Field value at a point, with NaN where the velocity is undefined.
fn field_value(state: &QuantumState, kind: FieldKind, p: Point, t: f64) -> bohmflow::Result<f64> {
    let v = match kind {
        FieldKind::Density => return state.density(p, t),
        FieldKind::VelocityX => state.velocity(p, t).map(|v| v.x),
        FieldKind::VelocityY => state.velocity(p, t).map(|v| v.y),
        FieldKind::ReducedDensity | FieldKind::ReducedVelocity => {
            return Err(Error::WrongKind {
                expected: "density or velocity component",
            })
        }
    };
    match v {
        Err(Error::DensityUnderflow { .. }) => Ok(f64::NAN),
        other => other,
    }
}

fn space_grid(
    cfg: &ScenarioConfig,
    state: &QuantumState,
    kind: FieldKind,
    t: f64,
) -> CliResult<Artifact> {
    let mut axes = vec![space_axis(cfg, "x")?];
    if state.dim() == 2 {
        axes.push(space_axis(cfg, "y")?);
    }
    let grid = FieldGrid::sample(kind, axes, |c| {
        let p = Point::new(c[0], c.get(1).copied().unwrap_or(0.0));
        field_value(state, kind, p, t)
    })?;
    let name = state.kind().name();
    Ok(Artifact {
        file: format!("{}_{name}_{}_t{t}.csv", cfg.preset, kind.name()),
        kind: "grid",
        contents: export::grid_text(&grid, &format!("state={name} t={t}")),
        axes: grid.axes,
    })
}

fn time_grid(cfg: &ScenarioConfig, state: &QuantumState, kind: FieldKind) -> CliResult<Artifact> {
    let axes = vec![time_axis(cfg)?, space_axis(cfg, "x")?];
    let grid = FieldGrid::sample(kind, axes, |c| {
        field_value(state, kind, Point::on_line(c[1]), c[0])
    })?;
    let name = state.kind().name();
    Ok(Artifact {
        file: format!("{}_{name}_{}_tx.csv", cfg.preset, kind.name()),
        kind: "grid",
        contents: export::grid_text(&grid, &format!("state={name}")),
        axes: grid.axes,
    })
}

/// Integrates every marker of `spec`, markers in parallel, output in marker order.
pub fn integrate_parallel<F>(
    field: &F,
    spec: &EnsembleSpec,
    cfg: &ScenarioConfig,
) -> CliResult<Vec<Trajectory>>
where
    F: VelocityField + Sync + ?Sized,
{
    let icfg = cfg.integrator();
    validate_inputs(field, spec, &icfg)?;
    let markers = spec.markers();
    let out: bohmflow::Result<Vec<Trajectory>> = markers
        .par_iter()
        .enumerate()
        .map(|(i, p)| integrate_marker(field, i, *p, &icfg))
        .collect();
    Ok(out?)
}

fn ensemble(
    cfg: &ScenarioConfig,
    state: &QuantumState,
    layout: Layout,
) -> CliResult<Vec<Trajectory>> {
    let layout = if state.dim() == 1 {
        Layout::LineX
    } else {
        layout
    };
    let spec = EnsembleSpec::new(layout, cfg.markers, cfg.half_width, state.centres())?;
    integrate_parallel(state, &spec, cfg)
}

fn trajectory_artifact(cfg: &ScenarioConfig, state: &QuantumState, trs: &[Trajectory]) -> Artifact {
    let name = state.kind().name();
    Artifact {
        file: format!("{}_{name}_trajectories.csv", cfg.preset),
        kind: "trajectories",
        axes: Vec::new(),
        contents: export::trajectories_text(trs, state.dim(), &format!("state={name}")),
    }
}

fn json_artifact(cfg: &ScenarioConfig, name: &str, value: &Value) -> Artifact {
    let mut contents = serde_json::to_string_pretty(value).expect("report serialises");
    contents.push('\n');
    Artifact {
        file: format!("{}_{name}.json", cfg.preset),
        kind: "report",
        axes: Vec::new(),
        contents,
    }
}

fn or_error<T: Serialize>(r: bohmflow::Result<T>) -> Value {
    match r {
        Ok(v) => serde_json::to_value(v).expect("report serialises"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn fig1_report(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let sup = cfg.superposition()?;
    let t = cfg.t_end;
    let axis = space_axis(cfg, "x")?;
    let xs = axis.values();
    let rho: Vec<f64> = xs
        .iter()
        .map(|&x| sup.density(x, t))
        .collect::<bohmflow::Result<_>>()?;
    let v: Vec<f64> = xs
        .iter()
        .map(|&x| match sup.velocity(x, t) {
            Err(Error::DensityUnderflow { .. }) => Ok(f64::NAN),
            other => other,
        })
        .collect::<bohmflow::Result<_>>()?;
    let spacing = sup.fringe_spacing(t).ok();
    let report = json!({
        "t": t,
        "expected_spacing": spacing,
        "fringes": or_error(detect_fringes(&axis, &rho, t, spacing)),
        "plateaus": or_error(extract_plateaus(&axis, &v, t, &sup)),
    });
    Ok(json_artifact(cfg, "superposition_report", &report))
}

fn fig2(cfg: &ScenarioConfig) -> CliResult<Vec<Artifact>> {
    let p = cfg.packet()?;
    let axis = time_axis(cfg)?;
    let mut rows = Vec::with_capacity(axis.count);
    for t in axis.values() {
        let f = p.diffusive_prefactors(t)?;
        rows.push(vec![t, f.field_slope, f.trajectory_rate]);
    }
    let peak = rows
        .iter()
        .max_by(|a, b| a[1].total_cmp(&b[1]))
        .map(|r| r[0])
        .unwrap_or(0.0);
    let report = json!({
        "tau": p.tau(),
        "field_slope_peak_time": peak,
        "trajectory_rate_limit": p.hbar / (2.0 * p.mass * p.sigma0 * p.sigma0),
        "trajectory_rate_final": rows.last().map(|r| r[2]),
    });
    Ok(vec![
        Artifact {
            file: format!("{}_prefactors.csv", cfg.preset),
            kind: "table",
            contents: export::table_text(
                &["t", "field_slope", "trajectory_rate"],
                &rows,
                "state=single-gaussian",
            ),
            axes: vec![axis],
        },
        json_artifact(cfg, "prefactors_report", &report),
    ])
}

fn visibility_report(cfg: &ScenarioConfig, states: &[QuantumState]) -> CliResult<Artifact> {
    let axis = space_axis(cfg, "s")?;
    let mut per_state = serde_json::Map::new();
    for state in states {
        let QuantumState::Bipartite(b) = state else {
            continue;
        };
        let mut snaps = Vec::new();
        for &t in &cfg.snapshots {
            let line = |dir: Point| -> bohmflow::Result<f64> {
                let values =
                    sample_line(|p| state.density(p, t), Point::new(0.0, 0.0), dir, &axis)?;
                visibility(&axis, &values)
            };
            let mut entry = json!({
                "t": t,
                "diagonal": or_error(line(Point::new(1.0, 1.0))),
                "anti_diagonal": or_error(line(Point::new(1.0, -1.0))),
            });
            if b.kind == bohmflow::BipartiteKind::Entangled {
                let rho: bohmflow::Result<Vec<f64>> = axis
                    .values()
                    .iter()
                    .map(|&x| b.reduced_density(x, t))
                    .collect();
                entry["reduced"] = or_error(rho.and_then(|r| visibility(&axis, &r)));
            }
            snaps.push(entry);
        }
        per_state.insert(state.kind().name().to_string(), Value::Array(snaps));
    }
    Ok(json_artifact(
        cfg,
        "visibility_report",
        &Value::Object(per_state),
    ))
}

fn census_value(trs: &[Trajectory]) -> Value {
    let axis_entry = |axis: Coordinate| {
        let r = census_crossings(trs, axis);
        json!({
            "count": r.pairs.len(),
            "earliest": r.earliest(),
            "pairs": r.pairs,
        })
    };
    json!({
        "markers": trs.len(),
        "halted": trs.iter().filter(|t| t.status != bohmflow::dynamics::Status::Complete).count(),
        "x": axis_entry(Coordinate::X),
        "y": axis_entry(Coordinate::Y),
        "min_separation": min_pairwise_separation(trs),
    })
}

fn tasks(cfg: &ScenarioConfig) -> CliResult<Vec<Task<'_>>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    match cfg.preset {
        Preset::Fig1 => {
            for state in states_for(cfg, &[StateKind::SingleGaussian, StateKind::Superposition])? {
                for kind in [FieldKind::Density, FieldKind::VelocityX] {
                    tasks.push(Box::new(move || Ok(vec![time_grid(cfg, &state, kind)?])));
                }
                tasks.push(Box::new(move || {
                    let trs = ensemble(cfg, &state, Layout::LineX)?;
                    Ok(vec![trajectory_artifact(cfg, &state, &trs)])
                }));
            }
            tasks.push(Box::new(move || Ok(vec![fig1_report(cfg)?])));
        }
        Preset::Fig2 => tasks.push(Box::new(move || fig2(cfg))),
        Preset::Fig3 | Preset::Fig4 | Preset::Fig5 | Preset::S2 | Preset::S3 | Preset::S4 => {
            let (kind, layout) = match cfg.preset {
                Preset::Fig3 => (FieldKind::Density, Layout::Cross),
                Preset::Fig4 => (FieldKind::VelocityX, Layout::Cross),
                Preset::Fig5 => (FieldKind::VelocityY, Layout::Cross),
                Preset::S2 => (FieldKind::Density, Layout::SquareGrid),
                Preset::S3 => (FieldKind::VelocityX, Layout::SquareGrid),
                _ => (FieldKind::VelocityY, Layout::SquareGrid),
            };
            let states = states_for(cfg, &BIPARTITE)?;
            for &state in &states {
                for &t in &cfg.snapshots {
                    tasks.push(Box::new(move || {
                        Ok(vec![space_grid(cfg, &state, kind, t)?])
                    }));
                }
                tasks.push(Box::new(move || {
                    let trs = ensemble(cfg, &state, layout)?;
                    let name = state.kind().name();
                    Ok(vec![Artifact {
                        file: format!("{}_{name}_markers.csv", cfg.preset),
                        kind: "markers",
                        axes: Vec::new(),
                        contents: export::snapshot_text(
                            &trs,
                            2,
                            &cfg.snapshots,
                            &format!("state={name}"),
                        ),
                    }])
                }));
            }
            if kind == FieldKind::Density {
                tasks.push(Box::new(move || Ok(vec![visibility_report(cfg, &states)?])));
            }
        }
        Preset::Fig6 | Preset::S5 => {
            let full = cfg.preset == Preset::S5;
            for state in states_for(cfg, &BIPARTITE)? {
                tasks.push(Box::new(move || {
                    let trs = ensemble(cfg, &state, Layout::Cross)?;
                    let name = state.kind().name();
                    let mut out = Vec::new();
                    if full {
                        out.push(trajectory_artifact(cfg, &state, &trs));
                    } else {
                        for axis in [Coordinate::X, Coordinate::Y] {
                            out.push(Artifact {
                                file: format!(
                                    "{}_{name}_{}_projection.csv",
                                    cfg.preset,
                                    axis.name()
                                ),
                                kind: "projection",
                                axes: Vec::new(),
                                contents: export::projections_text(
                                    &project(&trs, axis),
                                    &format!("state={name}"),
                                ),
                            });
                        }
                    }
                    out.push(json_artifact(
                        cfg,
                        &format!("{name}_crossings"),
                        &census_value(&trs),
                    ));
                    Ok(out)
                }));
            }
        }
    }
    Ok(tasks)
}
