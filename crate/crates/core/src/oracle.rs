//! Brute-force dense reference for the single-site subspace geometry.
//!
//! Everything is recomputed from explicit basis vectors on every call. Slow
//! on purpose: it only has to be obviously right.

use crate::engine::{compute_projection_tensor, optimal_update, sweep_schedule};
use crate::error::{Error, Result};
use crate::mps::{Direction, Mps};
use crate::target::DenseState;
use crate::tensor::{qr_orthonormalize, Tensor};

/// Largest basis (vectors times amplitudes) the oracle will materialize.
pub const MAX_BASIS_ENTRIES: usize = 1 << 26;

/// Basis vectors are treated as orthonormal when the Gram matrix is this
/// close to the identity.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Dense spanning set of the single-site subspace at the state's center.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    /// Vector `(a, s, b)` sits at flat index `(a * d + s) * chi_right + b`.
    pub vectors: Vec<Vec<f64>>,
    /// Shape of the center tensor the vectors are indexed by.
    pub shape: [usize; 3],
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    /// Largest entry of `|G - I|` for the Gram matrix `G`.
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let g = dot(u, v);
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Each basis vector is the dense state obtained by swapping the center
/// tensor for a unit tensor `e_(a,s,b)`.
pub fn subspace_basis_dense(state: &Mps) -> Result<SubspaceBasis> {
    let center = state.center_tensor();
    let shape = [center.left(), center.phys(), center.right()];
    let dim: usize = shape.iter().product();
    let len = crate::mps::check_dense_size(state.n(), state.d(), crate::mps::DEFAULT_MAX_DENSE_BITS)?;
    if dim.saturating_mul(len) > MAX_BASIS_ENTRIES {
        return Err(Error::Argument(format!(
            "oracle basis of {dim} vectors x {len} amplitudes is too large"
        )));
    }
    let mut vectors = Vec::with_capacity(dim);
    for flat in 0..dim {
        let mut unit = Tensor::zeros(shape.to_vec()).into_data();
        unit[flat] = 1.0;
        let probe = state.with_center_tensor(Tensor::new(shape.to_vec(), unit)?)?;
        vectors.push(probe.to_dense()?.into_amplitudes());
    }
    Ok(SubspaceBasis { vectors, shape })
}

/// Inner products `<v, target>` for every basis vector, in basis order.
pub fn basis_coordinates(target: &DenseState, basis: &SubspaceBasis) -> Result<Vec<f64>> {
    check_len(target, basis)?;
    Ok(basis
        .vectors
        .iter()
        .map(|v| dot(v, target.amplitudes()))
        .collect())
}

fn check_len(target: &DenseState, basis: &SubspaceBasis) -> Result<()> {
    match basis.vectors.first() {
        Some(v) if v.len() != target.amplitudes().len() => Err(Error::Argument(format!(
            "basis vectors have length {}, target has {}",
            v.len(),
            target.amplitudes().len()
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug)]
pub struct DenseProjection {
    pub vector: Vec<f64>,
    pub norm: f64,
    /// The basis failed the orthonormality check and was re-orthonormalized
    /// before projecting.
    pub used_fallback: bool,
}

impl DenseProjection {
    /// The closest unit vector of the subspace, or `None` for a zero
    /// projection.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        (self.norm > 0.0).then(|| self.vector.iter().map(|x| x / self.norm).collect())
    }
}

/// Orthogonal projection `sum_v <v, target> v`.
///
/// A basis that is not orthonormal within [`ORTHONORMAL_TOLERANCE`] is first
/// replaced by the `q` factor of its stacked QR; the result says so.
pub fn project_onto_subspace_dense(
    target: &DenseState,
    basis: &SubspaceBasis,
) -> Result<DenseProjection> {
    check_len(target, basis)?;
    let len = target.amplitudes().len();
    let used_fallback = basis.gram_defect() > ORTHONORMAL_TOLERANCE;
    let vectors = if used_fallback {
        let dim = basis.dim();
        let mut stacked = vec![0.0; len * dim];
        for (j, v) in basis.vectors.iter().enumerate() {
            for (i, &x) in v.iter().enumerate() {
                stacked[i * dim + j] = x;
            }
        }
        let (q, _) = qr_orthonormalize(&Tensor::matrix(len, dim, stacked)?)?;
        let q = q.data();
        (0..dim)
            .map(|j| (0..len).map(|i| q[i * dim + j]).collect())
            .collect()
    } else {
        basis.vectors.clone()
    };

    let mut vector = vec![0.0; len];
    for v in &vectors {
        let c = dot(v, target.amplitudes());
        for (p, x) in vector.iter_mut().zip(v) {
            *p += c * x;
        }
    }
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(DenseProjection {
        vector,
        norm,
        used_fallback,
    })
}

/// Worst discrepancies found by [`cross_check_sweep`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CrossCheckReport {
    pub steps: usize,
    /// Max `|engine coefficient - <basis vector, target>|`.
    pub max_coeff_error: f64,
    /// Max two-norm distance between the engine's updated state and the
    /// normalized dense projection (non-stalled steps only).
    pub max_state_error: f64,
    pub fallbacks: usize,
}

impl CrossCheckReport {
    pub const COEFF_TOLERANCE: f64 = 1e-12;
    pub const STATE_TOLERANCE: f64 = 1e-10;

    pub fn passed(&self) -> bool {
        self.fallbacks == 0
            && self.max_coeff_error <= Self::COEFF_TOLERANCE
            && self.max_state_error <= Self::STATE_TOLERANCE
    }
}

/// Runs one full sweep from `state` (moved to center 0), comparing every
/// engine update with the dense oracle.
pub fn cross_check_sweep(
    state: &Mps,
    target: &DenseState,
    stall_eps: f64,
) -> Result<CrossCheckReport> {
    let mut report = CrossCheckReport::default();
    let mut current = state.move_center_to(0)?;
    for (site, _) in sweep_schedule(current.n()) {
        if current.center() != site {
            let dir = if site > current.center() {
                Direction::Right
            } else {
                Direction::Left
            };
            current = current.shift_center(dir)?;
        }
        let basis = subspace_basis_dense(&current)?;
        let coords = basis_coordinates(target, &basis)?;
        let engine = compute_projection_tensor(&current, target)?;
        for (a, b) in engine.coeffs.data().iter().zip(&coords) {
            report.max_coeff_error = report.max_coeff_error.max((a - b).abs());
        }

        let projection = project_onto_subspace_dense(target, &basis)?;
        if projection.used_fallback {
            report.fallbacks += 1;
        }
        let (next, outcome) = optimal_update(&current, target, stall_eps)?;
        if !outcome.stalled {
            if let Some(expected) = projection.normalized() {
                let got = next.to_dense()?;
                let err = got
                    .amplitudes()
                    .iter()
                    .zip(&expected)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                report.max_state_error = report.max_state_error.max(err);
            }
        }
        current = next;
        report.steps += 1;
    }
    Ok(report)
}
