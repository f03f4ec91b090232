//! Particle trajectory files.
//!
//! Comma-separated with a header row `particle_id,time_step,cell,pnd`, one
//! row per particle per time step. `cell` is a vertex id or `OUT`. `pnd` is
//! read from the time-0 rows only; leave it empty everywhere to give every
//! particle `1/n`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path as FsPath;

use crate::domain::{ParticleEnsemble, VertexId};
use crate::error::{Error, Result};

pub const PARTICLE_HEADER: [&str; 4] = ["particle_id", "time_step", "cell", "pnd"];

pub fn load_particles(path: &FsPath) -> Result<ParticleEnsemble> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse = |line: Option<usize>, message: String| Error::Parse {
        file: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| parse(Some(1), e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names.len() < 3 || names[..3] != PARTICLE_HEADER[..3] || names.get(3).is_some_and(|n| *n != "pnd") {
        return Err(parse(
            Some(1),
            format!("expected header `{}`", PARTICLE_HEADER.join(",")),
        ));
    }

    // particle -> (time -> (cell, pnd, line))
    let mut rows: BTreeMap<usize, BTreeMap<usize, (Option<VertexId>, Option<f64>, usize)>> =
        BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize);
            parse(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| record.get(i).unwrap_or("");
        let particle: usize = field(0)
            .parse()
            .map_err(|_| parse(Some(line), format!("bad particle_id `{}`", field(0))))?;
        let time: usize = field(1)
            .parse()
            .map_err(|_| parse(Some(line), format!("bad time_step `{}`", field(1))))?;
        let cell = match field(2) {
            "OUT" => None,
            s => Some(
                s.parse()
                    .map_err(|_| parse(Some(line), format!("bad cell `{s}`")))?,
            ),
        };
        let pnd = match field(3) {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| parse(Some(line), format!("bad pnd `{s}`")))?,
            ),
        };
        if rows
            .entry(particle)
            .or_default()
            .insert(time, (cell, pnd, line))
            .is_some()
        {
            return Err(parse(
                Some(line),
                format!("particle {particle} has two rows for time {time}"),
            ));
        }
    }
    if rows.is_empty() {
        return Err(parse(None, "no particle rows".into()));
    }

    let mut trajectories = Vec::with_capacity(rows.len());
    let mut weights = Vec::with_capacity(rows.len());
    for (expected, (&particle, times)) in rows.iter().enumerate() {
        let (_, &(_, _, first_line)) = times.iter().next().expect("non-empty");
        if particle != expected {
            return Err(parse(
                Some(first_line),
                format!("particle ids must run 0..n without gaps; found {particle}, expected {expected}"),
            ));
        }
        let mut traj = Vec::with_capacity(times.len());
        for (k, (&t, &(cell, pnd, line))) in times.iter().enumerate() {
            if t != k {
                return Err(parse(
                    Some(line),
                    format!("particle {particle} skips from time {} to {t}", k as isize - 1),
                ));
            }
            if t == 0 {
                weights.push(pnd);
            } else if pnd.is_some() {
                return Err(parse(
                    Some(line),
                    "pnd may only be given on time_step 0 rows".into(),
                ));
            }
            traj.push(cell);
        }
        trajectories.push(traj);
    }
    let pnd = if weights.iter().all(Option::is_none) {
        None
    } else if weights.iter().all(Option::is_some) {
        Some(weights.into_iter().map(Option::unwrap).collect())
    } else {
        return Err(parse(
            None,
            "pnd must be given for every particle or for none".into(),
        ));
    };
    ParticleEnsemble::new(trajectories, pnd).map_err(|e| parse(None, e.to_string()))
}

pub fn save_particles(ensemble: &ParticleEnsemble, path: &FsPath) -> Result<()> {
    let mut out = String::new();
    out.push_str(&PARTICLE_HEADER.join(","));
    out.push('\n');
    for p in 0..ensemble.len() {
        for t in 0..=ensemble.horizon() {
            let cell = ensemble
                .position(p, t)
                .map_or_else(|| "OUT".to_string(), |c| c.to_string());
            let pnd = if t == 0 {
                ensemble.pnd()[p].to_string()
            } else {
                String::new()
            };
            out.push_str(&format!("{p},{t},{cell},{pnd}\n"));
        }
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
