//! CSV and JSON output. Floats are written as `{:.16e}` so files round-trip.

use std::io::Write;

use serde::Serialize;

use crate::beables::FieldSnapshot;
use crate::dynamics::Trajectory;
use crate::mode_space::ModeIndex;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn mode_tag(m: &ModeIndex) -> String {
    let n = m.n();
    format!("{}_{}_{}_{}", n[0], n[1], n[2], m.mu())
}

/// One row per sample: time, real part, imaginary part and modulus of each of
/// `modes`, energy, quantum potential and node distance.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory, modes: &[ModeIndex]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for m in modes {
        header.push(format!("re_{}", mode_tag(m)));
        header.push(format!("im_{}", mode_tag(m)));
        header.push(format!("abs_{}", mode_tag(m)));
    }
    header.extend(["energy", "quantum_potential", "node_distance"].map(String::from));
    w.write_record(&header)?;
    for ((t, cfg), d) in trajectory.times.iter().zip(&trajectory.configs).zip(&trajectory.diagnostics) {
        let mut row = vec![num(*t)];
        for m in modes {
            let q = cfg.get(m).unwrap_or_default();
            row.push(num(q.re));
            row.push(num(q.im));
            row.push(num(q.norm()));
        }
        row.extend([num(d.energy), num(d.quantum_potential), num(d.node_distance)]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per point: position then A, E, B, I components.
pub fn write_snapshot_csv<W: Write>(out: W, snapshot: &FieldSnapshot) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["x", "y", "z"].into_iter().map(String::from).collect::<Vec<_>>();
    for f in ["A", "E", "B", "I"] {
        for c in ["x", "y", "z"] {
            header.push(format!("{f}{c}"));
        }
    }
    w.write_record(&header)?;
    for (x, v) in snapshot.points.iter().zip(&snapshot.values) {
        let row: Vec<String> = [x, &v.a, &v.e, &v.b, &v.i].iter().flat_map(|vec| vec.iter().map(|c| num(*c))).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Plain numeric table with named columns.
pub fn write_table_csv<W: Write>(out: W, columns: &[&str], rows: &[Vec<f64>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns)?;
    for r in rows {
        w.write_record(r.iter().map(|x| num(*x)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: W, value: &T) -> serde_json::Result<()> {
    serde_json::to_writer_pretty(out, value)
}
