//! Comma-separated text exports with one `#` metadata header line.
//!
//! Numbers use Rust's shortest round-trip exponent form, so a re-run with the
//! same inputs produces the same bytes. Velocities where the density is below
//! the underflow floor are written as `NaN`.

use std::fmt::Write as _;
use std::path::Path;

use bohmflow::dynamics::{Projection, Trajectory};
use bohmflow::{Axis, FieldGrid};

use crate::error::{CliError, CliResult};

fn push_num(out: &mut String, v: f64) {
    if v.is_nan() {
        out.push_str("NaN");
    } else if v == 0.0 {
        // Drops the sign of negative zero.
        out.push_str("0e0");
    } else {
        let _ = write!(out, "{v:e}");
    }
}

fn axis_meta(a: &Axis) -> String {
    let mut s = format!("{}:", a.name);
    push_num(&mut s, a.start);
    s.push(':');
    push_num(&mut s, a.end);
    let _ = write!(s, ":{}", a.count);
    s
}

/// Grid as text: header, then one row per node in row-major order
/// (`coord_1, …, coord_n, value`).
pub fn grid_text(grid: &FieldGrid, context: &str) -> String {
    let names: Vec<&str> = grid.axes.iter().map(|a| a.name.as_str()).collect();
    let axes: Vec<String> = grid.axes.iter().map(axis_meta).collect();
    let mut out = format!(
        "# field={} {context} axes={} columns={},{}\n",
        grid.kind.name(),
        axes.join(","),
        names.join(","),
        grid.kind.name()
    );
    for (flat, &v) in grid.values.iter().enumerate() {
        for c in grid.coordinates(flat) {
            push_num(&mut out, c);
            out.push(',');
        }
        push_num(&mut out, v);
        out.push('\n');
    }
    out
}

fn columns(dim: usize) -> &'static str {
    if dim == 1 {
        "t,x,v_x,marker,status"
    } else {
        "t,x,y,v_x,v_y,marker,status"
    }
}

fn push_row(
    out: &mut String,
    dim: usize,
    t: f64,
    p: [f64; 2],
    v: [f64; 2],
    marker: usize,
    status: &str,
) {
    push_num(out, t);
    for c in &p[..dim] {
        out.push(',');
        push_num(out, *c);
    }
    for c in &v[..dim] {
        out.push(',');
        push_num(out, *c);
    }
    let _ = writeln!(out, ",{marker},{status}");
}

/// Every recorded sample of every trajectory, marker by marker.
pub fn trajectories_text(trajectories: &[Trajectory], dim: usize, context: &str) -> String {
    let mut out = format!("# trajectories {context} columns={}\n", columns(dim));
    for tr in trajectories {
        for s in &tr.samples {
            push_row(
                &mut out,
                dim,
                s.t,
                [s.point.x, s.point.y],
                [s.velocity.x, s.velocity.y],
                tr.marker,
                tr.status.name(),
            );
        }
    }
    out
}

/// Marker positions at the snapshot times only, snapshot by snapshot.
///
/// A marker halted before a snapshot contributes its last recorded sample
/// to that snapshot instead.
pub fn snapshot_text(
    trajectories: &[Trajectory],
    dim: usize,
    times: &[f64],
    context: &str,
) -> String {
    let mut out = format!("# markers {context} columns={}\n", columns(dim));
    for &t in times {
        for tr in trajectories {
            let i = tr.samples.partition_point(|s| s.t < t);
            let s = tr.samples.get(i).unwrap_or_else(|| tr.final_sample());
            push_row(
                &mut out,
                dim,
                s.t,
                [s.point.x, s.point.y],
                [s.velocity.x, s.velocity.y],
                tr.marker,
                tr.status.name(),
            );
        }
    }
    out
}

/// One coordinate of each trajectory: `t, <axis>, marker`.
pub fn projections_text(projections: &[Projection], context: &str) -> String {
    let axis = projections.first().map(|p| p.axis.name()).unwrap_or("x");
    let mut out = format!("# projection axis={axis} {context} columns=t,{axis},marker\n");
    for p in projections {
        for (t, v) in p.times.iter().zip(&p.values) {
            push_num(&mut out, *t);
            out.push(',');
            push_num(&mut out, *v);
            let _ = writeln!(out, ",{}", p.marker);
        }
    }
    out
}

/// Plain table with the given column names.
pub fn table_text(columns: &[&str], rows: &[Vec<f64>], context: &str) -> String {
    let mut out = format!("# table {context} columns={}\n", columns.join(","));
    for row in rows {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            push_num(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Writes a grid to `path`.
pub fn export_grid(grid: &FieldGrid, context: &str, path: &Path) -> CliResult<()> {
    write_file(path, &grid_text(grid, context))
}

/// Writes full trajectory tables to `path`.
pub fn export_trajectories(
    trajectories: &[Trajectory],
    dim: usize,
    context: &str,
    path: &Path,
) -> CliResult<()> {
    write_file(path, &trajectories_text(trajectories, dim, context))
}

#[cfg(test)]
mod tests {
    use super::*;
    use bohmflow::dynamics::{Sample, Status};
    use bohmflow::{FieldKind, Point};

    #[test]
    fn three_by_three_zeros() {
        let a = Axis::symmetric("x", 1.0, 3).unwrap();
        let b = Axis::symmetric("y", 1.0, 3).unwrap();
        let g = FieldGrid::from_values(FieldKind::Density, vec![a, b], vec![0.0; 9]).unwrap();
        let text = grid_text(&g, "t=0");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[0].starts_with("# field=density"));
        assert!(lines[0].contains("axes=x:-1e0:1e0:3,y:-1e0:1e0:3"));
        assert_eq!(lines[1], "-1e0,-1e0,0e0");
        assert_eq!(lines[2], "-1e0,0e0,0e0");
        assert_eq!(lines[9], "1e0,1e0,0e0");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, -2.5e7, 6.02214076e23] {
            let mut s = String::new();
            push_num(&mut s, v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        let mut s = String::new();
        push_num(&mut s, f64::NAN);
        assert_eq!(s, "NaN");
        let mut s = String::new();
        push_num(&mut s, -0.0);
        assert_eq!(s, "0e0");
    }

    fn tr(marker: usize, pts: &[(f64, f64)]) -> Trajectory {
        Trajectory {
            marker,
            initial: Point::new(pts[0].1, 0.5),
            samples: pts
                .iter()
                .map(|&(t, x)| Sample {
                    t,
                    point: Point::new(x, 0.5),
                    velocity: Point::new(1.0, 0.0),
                })
                .collect(),
            status: Status::Complete,
        }
    }

    #[test]
    fn trajectory_columns() {
        let trs = [
            tr(0, &[(0.0, 1.0), (1.0, 2.0)]),
            tr(1, &[(0.0, 3.0), (1.0, 4.0)]),
        ];
        let one = trajectories_text(&trs, 1, "state=single");
        assert!(one
            .lines()
            .next()
            .unwrap()
            .ends_with("columns=t,x,v_x,marker,status"));
        assert_eq!(one.lines().nth(2).unwrap(), "1e0,2e0,1e0,0,complete");
        let two = trajectories_text(&trs, 2, "state=sg");
        assert_eq!(
            two.lines().nth(3).unwrap(),
            "0e0,3e0,5e-1,1e0,0e0,1,complete"
        );
        assert_eq!(two.lines().count(), 5);
    }

    #[test]
    fn exports_write_the_rendered_text() {
        let dir = tempfile::tempdir().unwrap();
        let a = Axis::symmetric("x", 1.0, 3).unwrap();
        let g = FieldGrid::from_values(FieldKind::VelocityX, vec![a], vec![1.0, f64::NAN, -1.0])
            .unwrap();
        let path = dir.path().join("g.csv");
        export_grid(&g, "t=1", &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            grid_text(&g, "t=1")
        );
        assert!(grid_text(&g, "t=1").contains("\n0e0,NaN\n"));

        let trs = [tr(3, &[(0.0, 1.0)])];
        let path = dir.path().join("t.csv");
        export_trajectories(&trs, 2, "", &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);

        let missing = dir.path().join("no/such/dir/g.csv");
        let err = export_grid(&g, "", &missing).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("no/such/dir"));
    }

    #[test]
    fn snapshots_pick_the_matching_sample() {
        let trs = [tr(0, &[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)])];
        let s = snapshot_text(&trs, 1, &[0.0, 2.0, 5.0], "");
        let rows: Vec<&str> = s.lines().skip(1).collect();
        assert_eq!(
            rows,
            [
                "0e0,1e0,1e0,0,complete",
                "2e0,3e0,1e0,0,complete",
                "2e0,3e0,1e0,0,complete"
            ]
        );
    }
}
