//! Shared test helpers: an oracle-only training loop and small vector utils.
#![allow(dead_code)]

use sphere_dmrg::engine::{records_per_sweep, sweep_schedule};
use sphere_dmrg::oracle::{basis_coordinates, project_onto_subspace_dense, subspace_basis_dense};
use sphere_dmrg::{DenseState, Direction, Mps, Tensor};

pub fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn move_to(state: &Mps, site: usize) -> Mps {
    let mut s = state.clone();
    while s.center() < site {
        s = s.shift_center(Direction::Right).unwrap();
    }
    while s.center() > site {
        s = s.shift_center(Direction::Left).unwrap();
    }
    s
}

/// Training driven purely by the dense oracle: at every step the new center
/// tensor is the vector of basis coordinates `<v, target>`, normalized.
/// Returns the final overlap and the per-step overlaps.
pub fn oracle_train(
    initial: &Mps,
    target: &DenseState,
    max_sweeps: usize,
    tol: f64,
) -> (f64, Vec<f64>, usize) {
    let mut state = move_to(initial, 0);
    let n = state.n();
    let mut overlaps = Vec::new();
    let mut previous: Option<f64> = None;
    let mut sweeps = 0;
    for _ in 0..max_sweeps {
        sweeps += 1;
        for (site, _) in sweep_schedule(n) {
            state = move_to(&state, site);
            let basis = subspace_basis_dense(&state).unwrap();
            let projection = project_onto_subspace_dense(target, &basis).unwrap();
            assert!(!projection.used_fallback);
            let coords = basis_coordinates(target, &basis).unwrap();
            let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
            let center: Vec<f64> = coords.iter().map(|c| c / norm).collect();
            state = state
                .with_center_tensor(Tensor::new(basis.shape.to_vec(), center).unwrap())
                .unwrap();
            let dense = state.to_dense().unwrap();
            overlaps.push(dense.dot(target));
        }
        let last = *overlaps.last().unwrap();
        assert_eq!(overlaps.len() % records_per_sweep(n), 0);
        if previous.is_some_and(|p: f64| (last - p).abs() < tol) {
            break;
        }
        previous = Some(last);
    }
    (*overlaps.last().unwrap(), overlaps, sweeps)
}
