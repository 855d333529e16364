//! Trajectory CSV: `particle_id,t,x,y,z[,vx,vy,vz]`.

use std::fmt::Write as _;
use std::path::Path;

use ilscape_core::trajectory::{TrajectorySample, TrajectorySet};
use ilscape_core::Vec3;

use crate::error::{read, write, Context, Error, Result};

const POSITION_HEADER: [&str; 5] = ["particle_id", "t", "x", "y", "z"];
const VELOCITY_HEADER: [&str; 3] = ["vx", "vy", "vz"];

pub fn load_trajectories(path: &Path) -> Result<TrajectorySet> {
    parse_trajectories(&read(path)?, path)
}

pub fn parse_trajectories(text: &str, path: &Path) -> Result<TrajectorySet> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::parse(path, "line 1", e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let has_velocity = if header == POSITION_HEADER {
        false
    } else if header.len() == 8 && header[..5] == POSITION_HEADER && header[5..] == VELOCITY_HEADER {
        true
    } else {
        return Err(Error::parse(
            path,
            "line 1",
            format!("expected header `particle_id,t,x,y,z[,vx,vy,vz]`, got `{}`", header.join(",")),
        ));
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::parse(path, format!("line {line}"), e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |msg: String| Error::parse(path, format!("line {line}"), msg);
        if rec.len() != header.len() {
            return Err(bad(format!("expected {} fields, got {}", header.len(), rec.len())));
        }
        let particle_id: u64 = rec[0].parse().map_err(|_| bad(format!("bad particle id `{}`", &rec[0])))?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| bad(format!("bad number `{}` in column `{}`", &rec[i], header[i])))
        };
        let velocity = if has_velocity {
            Vec3::new(num(5)?, num(6)?, num(7)?)
        } else {
            Vec3::ZERO
        };
        rows.push(TrajectorySample {
            particle_id,
            t: num(1)?,
            position: Vec3::new(num(2)?, num(3)?, num(4)?),
            velocity,
        });
    }
    TrajectorySet::from_samples(rows, has_velocity).context(|| format!("trajectories {}", path.display()))
}

/// Rows sorted by particle, then time. Numbers use the shortest exact form.
pub fn trajectories_string(ts: &TrajectorySet) -> String {
    let mut s = String::from("particle_id,t,x,y,z,vx,vy,vz\n");
    for r in ts.samples() {
        let (p, v) = (r.position, r.velocity);
        let _ = writeln!(s, "{},{},{},{},{},{},{},{}", r.particle_id, r.t, p.x, p.y, p.z, v.x, v.y, v.z);
    }
    s
}

pub fn save_trajectories(path: &Path, ts: &TrajectorySet) -> Result<()> {
    write(path, trajectories_string(ts))
}
