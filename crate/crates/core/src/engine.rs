//! Exact single-site DMRG against a dense target.
//!
//! With every site except the center held fixed as an isometry, the states
//! reachable by editing the center tensor form a linear subspace, and the
//! center coordinates are an orthonormal chart for it. Projecting the target
//! into that chart and normalizing gives the closest unit vector of the
//! subspace; the iterate is replaced by it and the free site moves on.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::{random_mps_with_limit, Direction, Mps, DEFAULT_MAX_DENSE_BITS};
use crate::target::{named_state, state_from_counts, DenseState, TargetFile};
use crate::tensor::{contract, Tensor};

/// Isometry defect above which the engine refuses to project.
pub const GAUGE_REFUSAL_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_MAX_SWEEPS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_STALL_EPS: f64 = 1e-14;

/// Coordinates of the target's orthogonal projection onto the current
/// single-site subspace, laid out like the center tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionTensor {
    pub coeffs: Tensor,
    pub norm: f64,
}

/// Contracts the target with every site except the center.
///
/// Sites left of the center are absorbed from the left, sites right of it
/// from the right. Fails with [`Error::Gauge`] if any frozen site is not an
/// isometry, since the coefficients would then not be projection coordinates.
pub fn compute_projection_tensor(state: &Mps, target: &DenseState) -> Result<ProjectionTensor> {
    let (n, d) = (state.n(), state.d());
    if target.n() != n || target.d() != d {
        return Err(Error::Argument(format!(
            "target is {}^{}, state is {d}^{n}",
            target.d(),
            target.n()
        )));
    }
    let (site, defect) = state.gauge_defect();
    if defect > GAUGE_REFUSAL_TOLERANCE {
        return Err(Error::Gauge { site, defect });
    }

    let c = state.center();
    let sites = state.sites();
    let (chi_l, chi_r) = (sites[c].left(), sites[c].right());

    // (chi_l, d^(n-c)) after absorbing sites 0..c
    let left = crate::mps::left_environment(sites, target, c)?;
    let mut rows = left.len() / d;
    let mut acc = left.reshape(vec![rows, d, 1])?;
    for site in sites[c + 1..].iter().rev() {
        // (rows, d, r) x (l, d, r) -> (rows, l)
        let absorbed = contract(&acc, &[1, 2], site.core(), &[1, 2])?;
        let l = site.left();
        if rows == chi_l * d {
            acc = absorbed.reshape(vec![chi_l, d, l])?;
            break;
        }
        rows /= d;
        acc = absorbed.reshape(vec![rows, d, l])?;
    }
    let coeffs = acc.reshape(vec![chi_l, d, chi_r])?;
    let norm = coeffs.frobenius_norm();
    Ok(ProjectionTensor { coeffs, norm })
}

/// Result of one single-site update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpdateOutcome {
    /// `<psi, target>` after the update.
    pub overlap: f64,
    /// Norm of the target's projection onto the subspace.
    pub projection_norm: f64,
    /// The projection was too small to normalize; the state was kept.
    pub stalled: bool,
    /// `|psi - target|`, summed entrywise over the dense vectors.
    pub distance: f64,
}

/// Two-norm of `psi - target` from the dense amplitudes.
///
/// Near convergence this is far more accurate than `sqrt(2 - 2 overlap)`,
/// which cannot resolve distances below about `1.5e-8`.
fn dense_distance(state: &Mps, target: &DenseState) -> Result<f64> {
    let dense = state.to_dense()?;
    Ok(dense
        .amplitudes()
        .iter()
        .zip(target.amplitudes())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Replaces the center tensor with the normalized projection coordinates,
/// which makes the state the unit vector of the current subspace closest to
/// the target. A projection with norm `<= stall_eps` leaves the state as is.
pub fn optimal_update(
    state: &Mps,
    target: &DenseState,
    stall_eps: f64,
) -> Result<(Mps, UpdateOutcome)> {
    let projection = compute_projection_tensor(state, target)?;
    if projection.norm > stall_eps {
        let center = projection.coeffs.scale(1.0 / projection.norm);
        let overlap = center.dot(&projection.coeffs);
        let updated = state.with_center_tensor(center)?;
        let distance = dense_distance(&updated, target)?;
        Ok((
            updated,
            UpdateOutcome {
                overlap,
                projection_norm: projection.norm,
                stalled: false,
                distance,
            },
        ))
    } else {
        let overlap = state.center_tensor().core().dot(&projection.coeffs);
        Ok((
            state.clone(),
            UpdateOutcome {
                overlap,
                projection_norm: projection.norm,
                stalled: true,
                distance: dense_distance(state, target)?,
            },
        ))
    }
}

/// One row of the training trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    /// 1-based global update counter; step `k` produced iterate `psi_k`.
    pub step: usize,
    /// 1-based sweep index.
    pub sweep: usize,
    pub site: usize,
    pub direction: Direction,
    pub overlap: f64,
    /// Angle between `psi_k` and the target in radians, `2 asin(distance / 2)`,
    /// so that `cos(angle) = overlap` for unit vectors.
    pub angle: f64,
    /// Euclidean distance `|psi_k - target|`; equals `sqrt(2 - 2 overlap)`
    /// for unit vectors.
    pub distance: f64,
    pub stalled: bool,
}

impl MetricRecord {
    pub fn new(
        step: usize,
        sweep: usize,
        site: usize,
        direction: Direction,
        outcome: UpdateOutcome,
    ) -> Self {
        let distance = outcome.distance;
        Self {
            step,
            sweep,
            site,
            direction,
            overlap: outcome.overlap,
            angle: 2.0 * (distance / 2.0).clamp(0.0, 1.0).asin(),
            distance,
            stalled: outcome.stalled,
        }
    }
}

/// Where the target vector comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetSpec {
    /// One of the named analytic states, see [`named_state`].
    Named { name: String, seed: Option<u64> },
    /// A target file with a `"kind"` tag.
    File(PathBuf),
    /// A counts file: either a bare `{"0101": 3, ...}` map or a tagged
    /// counts document. Bare maps take `d` from the config.
    Counts(PathBuf),
    /// An in-memory vector.
    State(DenseState),
}

impl TargetSpec {
    pub fn named(name: impl Into<String>) -> Self {
        TargetSpec::Named {
            name: name.into(),
            seed: None,
        }
    }

    pub fn build(&self, n: usize, d: usize) -> Result<DenseState> {
        let state = match self {
            TargetSpec::Named { name, seed } => named_state(name, n, d, *seed)?,
            TargetSpec::File(path) => TargetFile::load(path)?.into_state()?,
            TargetSpec::Counts(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                match serde_json::from_str::<std::collections::BTreeMap<String, u64>>(&text) {
                    Ok(counts) => state_from_counts(&counts, d)?,
                    Err(_) => TargetFile::parse(&text)?.into_state()?,
                }
            }
            TargetSpec::State(state) => state.clone(),
        };
        if state.n() != n || state.d() != d {
            return Err(Error::Input(format!(
                "target has n={}, d={} but the run uses n={n}, d={d}",
                state.n(),
                state.d()
            )));
        }
        Ok(state)
    }
}

/// Parses `named:<name>[:seed]`, `file:<path>` or `counts:<path>`.
///
/// `basis:k` counts as one name, so `named:basis:3:7` is basis state 3 with
/// seed 7.
impl FromStr for TargetSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let bad = || Error::Input(format!("bad target spec {spec:?}"));
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        if rest.is_empty() {
            return Err(bad());
        }
        match kind {
            "file" => Ok(TargetSpec::File(rest.into())),
            "counts" => Ok(TargetSpec::Counts(rest.into())),
            "named" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let (name, seed) = match parts.as_slice() {
                    ["basis", k] => (format!("basis:{k}"), None),
                    ["basis", k, seed] => (format!("basis:{k}"), Some(*seed)),
                    [name] => (name.to_string(), None),
                    [name, seed] => (name.to_string(), Some(*seed)),
                    _ => return Err(bad()),
                };
                let seed = seed
                    .map(|s| s.parse::<u64>().map_err(|_| bad()))
                    .transpose()?;
                Ok(TargetSpec::Named { name, seed })
            }
            _ => Err(bad()),
        }
    }
}

/// Full description of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub n: usize,
    pub d: usize,
    pub chi: usize,
    pub seed: u64,
    pub max_sweeps: usize,
    /// Convergence threshold on the overlap change between the final
    /// records of consecutive sweeps.
    pub tol: f64,
    pub stall_eps: f64,
    pub target: TargetSpec,
    pub max_dense_bits: u32,
}

impl TrainConfig {
    pub fn new(n: usize, d: usize, chi: usize, seed: u64, target: TargetSpec) -> Self {
        Self {
            n,
            d,
            chi,
            seed,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            tol: DEFAULT_TOL,
            stall_eps: DEFAULT_STALL_EPS,
            target,
            max_dense_bits: DEFAULT_MAX_DENSE_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.stall_eps.is_nan() || self.stall_eps <= 0.0 {
            return Err(Error::Argument(format!(
                "stall_eps must be positive, got {}",
                self.stall_eps
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Argument("max_sweeps must be at least 1".into()));
        }
        if self.n == 0 || self.d < 2 || self.chi == 0 {
            return Err(Error::Argument(format!(
                "need n >= 1, d >= 2, chi >= 1 (got n={}, d={}, chi={})",
                self.n, self.d, self.chi
            )));
        }
        crate::mps::check_dense_size(self.n, self.d, self.max_dense_bits)?;
        Ok(())
    }

    pub fn build_target(&self) -> Result<DenseState> {
        self.target.build(self.n, self.d)
    }

    pub fn initial_state(&self) -> Result<Mps> {
        random_mps_with_limit(self.n, self.d, self.chi, self.seed, self.max_dense_bits)
    }
}

/// Records emitted by one full sweep of an `n`-site chain.
pub fn records_per_sweep(n: usize) -> usize {
    2 * n - 1
}

/// Site schedule of one sweep: `0, 1, ..., n-1, n-2, ..., 0`.
pub fn sweep_schedule(n: usize) -> impl Iterator<Item = (usize, Direction)> {
    (0..n)
        .map(|i| (i, Direction::Right))
        .chain((0..n.saturating_sub(1)).rev().map(|i| (i, Direction::Left)))
}

/// Runs one left-to-right then right-to-left sweep starting and ending at
/// center 0. `sweep_index` is 1-based and fixes the step numbers.
pub fn sweep(
    state: &Mps,
    target: &DenseState,
    config: &TrainConfig,
    sweep_index: usize,
) -> Result<(Mps, Vec<MetricRecord>)> {
    if state.center() != 0 {
        return Err(Error::Argument(format!(
            "sweep must start at center 0, found {}",
            state.center()
        )));
    }
    let n = state.n();
    let first_step = sweep_index.saturating_sub(1) * records_per_sweep(n) + 1;
    let mut current = state.clone();
    let mut records = Vec::with_capacity(records_per_sweep(n));
    for (k, (site, direction)) in sweep_schedule(n).enumerate() {
        if current.center() != site {
            let shift = if site > current.center() {
                Direction::Right
            } else {
                Direction::Left
            };
            current.shift_center_in_place(shift)?;
        }
        let (next, outcome) = optimal_update(&current, target, config.stall_eps)?;
        current = next;
        records.push(MetricRecord::new(
            first_step + k,
            sweep_index,
            site,
            direction,
            outcome,
        ));
    }
    Ok((current, records))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Converged,
    SweepLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::SweepLimit => "sweep-limit",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub state: Mps,
    pub trajectory: Vec<MetricRecord>,
    pub termination: Termination,
    pub sweeps_run: usize,
    /// `<psi_0, target>` before any update.
    pub initial_overlap: f64,
}

impl TrainResult {
    pub fn final_overlap(&self) -> f64 {
        self.trajectory.last().map_or(self.initial_overlap, |r| r.overlap)
    }
}

/// Builds the target and a random initial state, then sweeps until the
/// per-sweep overlap change drops below `tol` or `max_sweeps` is reached.
pub fn train(config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let target = config.build_target()?;
    let initial = config.initial_state()?;
    train_from(initial, &target, config)
}

/// [`train`] with an explicit starting state and target.
pub fn train_from(initial: Mps, target: &DenseState, config: &TrainConfig) -> Result<TrainResult> {
    config.validate()?;
    let initial_overlap = initial.overlap_dense(target)?;
    let mut state = initial.move_center_to(0)?;
    let mut trajectory = Vec::with_capacity(config.max_sweeps * records_per_sweep(state.n()));
    let mut previous: Option<f64> = None;
    let mut termination = Termination::SweepLimit;
    let mut sweeps_run = 0;
    for sweep_index in 1..=config.max_sweeps {
        let (next, records) = sweep(&state, target, config, sweep_index)?;
        state = next;
        sweeps_run = sweep_index;
        let last = records.last().expect("a sweep emits records").overlap;
        trajectory.extend(records);
        if previous.is_some_and(|p| (last - p).abs() < config.tol) {
            termination = Termination::Converged;
            break;
        }
        previous = Some(last);
    }
    Ok(TrainResult {
        state,
        trajectory,
        termination,
        sweeps_run,
        initial_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mps::{random_mps, SiteTensor};

    fn config(n: usize, chi: usize, target: TargetSpec) -> TrainConfig {
        TrainConfig::new(n, 2, chi, 1, target)
    }

    #[test]
    fn single_site_projection_is_the_target() {
        let m = random_mps(1, 3, 1, 4).unwrap();
        let target = DenseState::random(1, 3, 5).unwrap();
        let p = compute_projection_tensor(&m, &target).unwrap();
        assert_eq!(p.coeffs.shape(), &[1, 3, 1]);
        assert_eq!(p.coeffs.data(), target.amplitudes());
        assert!((p.norm - 1.0).abs() < 1e-15);

        let (updated, outcome) = optimal_update(&m, &target, 1e-14).unwrap();
        let dense = updated.to_dense().unwrap();
        for (a, b) in dense.amplitudes().iter().zip(target.amplitudes()) {
            assert!((a - b).abs() <= 1e-15);
        }
        assert!((outcome.overlap - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn orthogonal_target_gives_zero_projection() {
        // site 1 frozen to e_0, target e_{01} is unreachable
        let m = Mps::product(&[0, 0], 2).unwrap();
        let target = DenseState::basis(2, 2, 0b01).unwrap();
        let p = compute_projection_tensor(&m, &target).unwrap();
        assert_eq!(p.norm, 0.0);
        assert!(p.coeffs.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn stall_keeps_state_bitwise() {
        let m = Mps::product(&[0, 0], 2).unwrap();
        let target = DenseState::basis(2, 2, 0b01).unwrap();
        let (kept, outcome) = optimal_update(&m, &target, 1e-14).unwrap();
        assert!(outcome.stalled);
        assert_eq!(kept, m);
        assert_eq!(outcome.overlap, 0.0);
    }

    #[test]
    fn refuses_non_isometric_frozen_sites() {
        let s = SiteTensor::from_data(1, 2, 1, vec![2.0, 0.0]).unwrap();
        let m = Mps::new(vec![s.clone(), s], 0).unwrap();
        let target = DenseState::basis(2, 2, 0).unwrap();
        assert!(matches!(
            compute_projection_tensor(&m, &target),
            Err(Error::Gauge { site: 1, .. })
        ));
    }

    #[test]
    fn sweep_schedule_and_counts() {
        let target = DenseState::random(4, 2, 3).unwrap();
        let cfg = config(4, 2, TargetSpec::State(target.clone()));
        let m = random_mps(4, 2, 2, 1).unwrap();
        let (out, records) = sweep(&m, &target, &cfg, 1).unwrap();
        let sites: Vec<usize> = records.iter().map(|r| r.site).collect();
        assert_eq!(sites, vec![0, 1, 2, 3, 2, 1, 0]);
        assert_eq!(out.center(), 0);
        assert!(out.is_canonical());
        assert_eq!(records[0].step, 1);
        let (_, second) = sweep(&out, &target, &cfg, 2).unwrap();
        assert_eq!(second[0].step, 8);
        assert_eq!(second[0].sweep, 2);

        let single = random_mps(1, 2, 1, 1).unwrap();
        let t1 = DenseState::random(1, 2, 1).unwrap();
        let (_, r1) = sweep(&single, &t1, &config(1, 1, TargetSpec::State(t1.clone())), 1).unwrap();
        assert_eq!(r1.len(), 1);
    }

    #[test]
    fn fixed_point_sweep() {
        let m = random_mps(5, 2, 3, 11).unwrap();
        let target = m.to_dense().unwrap();
        let cfg = config(5, 3, TargetSpec::State(target.clone()));
        let (out, records) = sweep(&m, &target, &cfg, 1).unwrap();
        assert!(records.iter().all(|r| (r.overlap - 1.0).abs() <= 1e-10));
        let after = out.to_dense().unwrap();
        for (a, b) in after.amplitudes().iter().zip(target.amplitudes()) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn one_sweep_hits_the_limit() {
        let mut cfg = config(3, 2, TargetSpec::Named {
            name: "random".into(),
            seed: Some(4),
        });
        cfg.max_sweeps = 1;
        let result = train(&cfg).unwrap();
        assert_eq!(result.termination, Termination::SweepLimit);
        assert_eq!(result.trajectory.len(), 5);
    }

    #[test]
    fn records_are_self_consistent() {
        let cfg = config(5, 2, TargetSpec::Named {
            name: "random".into(),
            seed: Some(9),
        });
        let result = train(&cfg).unwrap();
        for r in &result.trajectory {
            assert!((r.distance.powi(2) + 2.0 * r.overlap - 2.0).abs() <= 1e-12);
            assert!(r.overlap.abs() <= 1.0 + 1e-12);
            assert!((r.distance - 2.0 * (r.angle / 2.0).sin()).abs() <= 1e-10);
            assert!((r.angle.cos() - r.overlap).abs() <= 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(3, 2, TargetSpec::named("ghz"));
        cfg.tol = 0.0;
        assert!(train(&cfg).is_err());
        let mut cfg = config(3, 2, TargetSpec::named("ghz"));
        cfg.stall_eps = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = config(3, 2, TargetSpec::named("ghz"));
        cfg.max_sweeps = 0;
        assert!(cfg.validate().is_err());
        let cfg = config(3, 2, TargetSpec::State(DenseState::basis(2, 2, 0).unwrap()));
        assert!(matches!(train(&cfg), Err(Error::Input(_))));
    }

    #[test]
    fn target_spec_parsing() {
        assert_eq!(
            "named:ghz".parse::<TargetSpec>().unwrap(),
            TargetSpec::named("ghz")
        );
        assert_eq!(
            "named:random:12".parse::<TargetSpec>().unwrap(),
            TargetSpec::Named {
                name: "random".into(),
                seed: Some(12)
            }
        );
        assert_eq!(
            "named:basis:3".parse::<TargetSpec>().unwrap(),
            TargetSpec::named("basis:3")
        );
        assert_eq!(
            "named:basis:3:5".parse::<TargetSpec>().unwrap(),
            TargetSpec::Named {
                name: "basis:3".into(),
                seed: Some(5)
            }
        );
        assert_eq!(
            "file:/tmp/t.json".parse::<TargetSpec>().unwrap(),
            TargetSpec::File("/tmp/t.json".into())
        );
        assert_eq!(
            "counts:c.json".parse::<TargetSpec>().unwrap(),
            TargetSpec::Counts("c.json".into())
        );
        for bad in ["ghz", "named:", "named:random:x", "http:foo", "named:a:1:2"] {
            assert!(bad.parse::<TargetSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn rank_deficient_updates_keep_training() {
        // a product target makes the updated center rank one
        let cfg = config(4, 4, TargetSpec::named("basis:0"));
        let result = train(&cfg).unwrap();
        assert!((result.final_overlap() - 1.0).abs() <= 1e-10);
        assert!(result.state.is_canonical());
    }
}
