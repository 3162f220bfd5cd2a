//! Batch front end behind the `sphere-dmrg` binary.
//!
//! Exit status: 0 on success, 2 for invalid flags or configuration, 1 for
//! failures during the run (including an oracle mismatch).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use crate::engine::{train_from, TargetSpec, TrainConfig};
use crate::error::Error;
use crate::io::write_run;
use crate::oracle::cross_check_sweep;

#[derive(Debug, Parser)]
#[command(
    name = "sphere-dmrg",
    version,
    about = "Fit an MPS to a target unit vector by exact single-site DMRG sweeps"
)]
pub struct Args {
    /// Number of sites n.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub sites: u64,

    /// Physical dimension d.
    #[arg(long, value_name = "D", default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub phys_dim: u64,

    /// Bond-dimension cap chi.
    #[arg(long, value_name = "CHI", value_parser = clap::value_parser!(u64).range(1..))]
    pub bond_dim: u64,

    /// Seed for the random initial MPS.
    #[arg(long, value_name = "S")]
    pub seed: u64,

    #[arg(long, value_name = "K", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_sweeps: u64,

    /// Convergence threshold on the overlap change per sweep.
    #[arg(long, value_name = "T", default_value_t = 1e-10, value_parser = positive_f64)]
    pub tol: f64,

    /// Projection norms at or below this leave the state unchanged.
    #[arg(long, value_name = "E", default_value_t = 1e-14, value_parser = positive_f64)]
    pub stall_eps: f64,

    /// named:<name>[:seed], file:<path> or counts:<path>.
    #[arg(long, value_name = "SPEC", value_parser = parse_target)]
    pub target: TargetSpec,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,

    /// Allow writing into a non-empty output directory.
    #[arg(long)]
    pub force: bool,

    /// Compare every update of the first sweep against the dense oracle
    /// before training.
    #[arg(long)]
    pub oracle_check: bool,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn parse_target(s: &str) -> Result<TargetSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Args {
    pub fn config(&self) -> TrainConfig {
        let mut config = TrainConfig::new(
            self.sites as usize,
            self.phys_dim as usize,
            self.bond_dim as usize,
            self.seed,
            self.target.clone(),
        );
        config.max_sweeps = self.max_sweeps as usize;
        config.tol = self.tol;
        config.stall_eps = self.stall_eps;
        config
    }
}

fn usage_error(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "sphere-dmrg: {msg}");
    2
}

fn runtime_error(err: &mut dyn Write, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "sphere-dmrg: {msg}");
    1
}

fn is_non_empty_dir(path: &Path) -> bool {
    std::fs::read_dir(path).is_ok_and(|mut entries| entries.next().is_some())
}

/// Parses `argv` (program name first), runs training and writes artifacts.
/// Returns the process exit status.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(args) => args,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let rendered = e.to_string();
                    let line = rendered
                        .lines()
                        .take_while(|l| !l.trim().is_empty())
                        .map(str::trim)
                        .collect::<Vec<_>>()
                        .join(" ");
                    usage_error(err, line.trim_start_matches("error: "))
                }
            };
        }
    };

    let config = args.config();
    if let Err(e) = config.validate() {
        return usage_error(err, e);
    }
    let target = match config.build_target() {
        Ok(t) => t,
        Err(e) => return usage_error(err, format!("--target: {e}")),
    };
    let initial = match config.initial_state() {
        Ok(m) => m,
        Err(e) => return usage_error(err, e),
    };
    if args.out.exists() && !args.out.is_dir() {
        return usage_error(err, format!("--out: {} is not a directory", args.out.display()));
    }
    if is_non_empty_dir(&args.out) && !args.force {
        return usage_error(
            err,
            format!(
                "--out: {} is not empty (use --force to overwrite)",
                args.out.display()
            ),
        );
    }

    if args.oracle_check {
        match cross_check_sweep(&initial, &target, config.stall_eps) {
            Ok(report) if report.passed() => {
                let _ = writeln!(
                    out,
                    "oracle check passed: {} steps, coeff error {:e}, state error {:e}",
                    report.steps, report.max_coeff_error, report.max_state_error
                );
            }
            Ok(report) => {
                return runtime_error(
                    err,
                    format!(
                        "oracle mismatch: coeff error {:e}, state error {:e}, {} fallbacks",
                        report.max_coeff_error, report.max_state_error, report.fallbacks
                    ),
                );
            }
            Err(e @ Error::Argument(_)) => {
                let _ = writeln!(err, "sphere-dmrg: oracle check skipped: {e}");
            }
            Err(e) => return runtime_error(err, format!("oracle check: {e}")),
        }
    }

    let started = Instant::now();
    let result = match train_from(initial, &target, &config) {
        Ok(r) => r,
        Err(e) => return runtime_error(err, e),
    };
    let elapsed = started.elapsed().as_secs_f64();

    match write_run(&args.out, &result, elapsed) {
        Ok(output) => {
            let _ = writeln!(
                out,
                "{} after {} sweeps, overlap {}",
                output.summary.termination, output.summary.sweeps_run, output.summary.final_overlap
            );
            0
        }
        Err(e) => runtime_error(err, e),
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_command(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("sphere-dmrg").chain(args.iter().copied());
        let code = run_command(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn zero_bond_dim_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("o");
        let (code, _, err) = run(&[
            "--sites", "3", "--bond-dim", "0", "--seed", "1", "--target", "named:ghz", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--bond-dim"), "{err}");
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(!out.exists());
    }

    #[test]
    fn bad_target_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, err) = run(&[
            "--sites", "3", "--bond-dim", "2", "--seed", "1", "--target", "named:ghz",
            "--phys-dim", "3", "--out", dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("--target"), "{err}");
    }

    #[test]
    fn refuses_non_empty_out_without_force() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("keep.txt"), "x").unwrap();
        let base = [
            "--sites", "2", "--bond-dim", "2", "--seed", "1", "--target", "named:ghz", "--out",
            dir.path().to_str().unwrap(),
        ];
        let (code, _, err) = run(&base);
        assert_eq!(code, 2, "{err}");
        let mut forced = base.to_vec();
        forced.push("--force");
        let (code, _, err) = run(&forced);
        assert_eq!(code, 0, "{err}");
    }
}
