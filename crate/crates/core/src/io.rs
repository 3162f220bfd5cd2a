//! Run artifacts: trajectory CSV, summary JSON, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::{MetricRecord, TrainResult};
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str = "step,sweep,site,direction,overlap,angle,distance,stalled";

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const FINAL_MPS_FILE: &str = "final_mps.json";
pub const SUMMARY_FILE: &str = "summary.json";

/// Renders records as CSV. Floats are written as the shortest decimal that
/// round-trips (`1.0`, `0.25`, `3.2e-16`), direction as `L`/`R` and the stall
/// flag as `0`/`1`.
pub fn trajectory_csv(records: &[MetricRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:?},{:?},{:?},{}\n",
            r.step,
            r.sweep,
            r.site,
            r.direction.code(),
            r.overlap,
            r.angle,
            r.distance,
            u8::from(r.stalled)
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub termination: String,
    pub sweeps_run: usize,
    pub final_overlap: f64,
    pub final_angle: f64,
    pub wall_clock_seconds: f64,
}

impl Summary {
    pub fn from_result(result: &TrainResult, wall_clock_seconds: f64) -> Self {
        let (final_overlap, final_angle) = match result.trajectory.last() {
            Some(r) => (r.overlap, r.angle),
            None => (result.initial_overlap, result.initial_overlap.clamp(-1.0, 1.0).acos()),
        };
        Self {
            termination: result.termination.as_str().to_string(),
            sweeps_run: result.sweeps_run,
            final_overlap,
            final_angle,
            wall_clock_seconds,
        }
    }
}

/// Paths written by [`write_run`] plus the summary.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub trajectory_csv_path: PathBuf,
    pub final_mps_json_path: PathBuf,
    pub summary_path: PathBuf,
    pub summary: Summary,
}

/// Writes `contents` to a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Argument(format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    file.write_all(contents).map_err(|e| Error::io(&tmp, e))?;
    file.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes the three run artifacts into `dir`, creating it if needed.
pub fn write_run(dir: &Path, result: &TrainResult, wall_clock_seconds: f64) -> Result<RunOutput> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let summary = Summary::from_result(result, wall_clock_seconds);

    let trajectory_csv_path = dir.join(TRAJECTORY_FILE);
    let final_mps_json_path = dir.join(FINAL_MPS_FILE);
    let summary_path = dir.join(SUMMARY_FILE);

    write_atomic(&trajectory_csv_path, trajectory_csv(&result.trajectory).as_bytes())?;
    write_atomic(&final_mps_json_path, result.state.to_json()?.as_bytes())?;
    let mut summary_json = serde_json::to_string_pretty(&summary)?;
    summary_json.push('\n');
    write_atomic(&summary_path, summary_json.as_bytes())?;

    Ok(RunOutput {
        trajectory_csv_path,
        final_mps_json_path,
        summary_path,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::UpdateOutcome;
    use crate::mps::Direction;

    #[test]
    fn csv_layout() {
        let rec = MetricRecord::new(
            3,
            1,
            2,
            Direction::Left,
            UpdateOutcome {
                overlap: 0.5,
                projection_norm: 0.5,
                stalled: true,
                distance: 1.0,
            },
        );
        let csv = trajectory_csv(&[rec]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..5], &["3", "1", "2", "L", "0.5"]);
        assert_eq!(row[5].parse::<f64>().unwrap(), rec.angle);
        assert_eq!(row[6], "1.0");
        assert_eq!(row[7], "1");
    }

    #[test]
    fn csv_floats_round_trip() {
        let outcome = UpdateOutcome {
            overlap: 1.0 - 3.0e-16,
            projection_norm: 1.0,
            stalled: false,
            distance: 3.254629732262919e-16,
        };
        let rec = MetricRecord::new(1, 1, 0, Direction::Right, outcome);
        let csv = trajectory_csv(&[rec]);
        let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[6], "3.254629732262919e-16");
        assert_eq!(row[4].parse::<f64>().unwrap(), rec.overlap);
        assert_eq!(row[5].parse::<f64>().unwrap(), rec.angle);
        assert_eq!(row[6].parse::<f64>().unwrap(), rec.distance);
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
