use crate::nbody::{Trajectory, TrajectoryMeta};
use crate::tensor::io::{read_matrix, write_matrix};
use crate::tensor::{Operator, Space};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

const STATES_FILE: &str = "states.bin";
const SIDECAR_FILE: &str = "meta.json";

#[derive(Serialize, Deserialize)]
struct Sidecar {
    meta: TrajectoryMeta,
    space: Space,
    times: Vec<f64>,
}

/// Writes `states.bin` (the matrices back to back in the binary matrix layout)
/// and `meta.json` into `dir`, creating it if needed.
pub fn write_checkpoint(traj: &Trajectory, dir: &Path) -> Result<()> {
    let Some(first) = traj.states().first() else {
        return Err(Error::TooFewSamples(0));
    };
    fs::create_dir_all(dir)?;
    let mut out = BufWriter::new(File::create(dir.join(STATES_FILE))?);
    for s in traj.states() {
        write_matrix(&mut out, s.matrix())?;
    }
    out.flush()?;
    let sidecar = Sidecar {
        meta: traj.meta().clone(),
        space: first.space(),
        times: traj.times().to_vec(),
    };
    fs::write(dir.join(SIDECAR_FILE), serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn read_checkpoint(dir: &Path) -> Result<Trajectory> {
    let sidecar: Sidecar = serde_json::from_str(&fs::read_to_string(dir.join(SIDECAR_FILE))?)?;
    let mut input = BufReader::new(File::open(dir.join(STATES_FILE))?);
    let mut traj = Trajectory::new(sidecar.meta);
    for &t in &sidecar.times {
        traj.push(t, Operator::new(sidecar.space, read_matrix(&mut input)?)?);
    }
    Ok(traj)
}
