mod common;

use common::{l2_diff, move_to};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sphere_dmrg::engine::sweep_schedule;
use sphere_dmrg::oracle::{project_onto_subspace_dense, subspace_basis_dense};
use sphere_dmrg::{
    compute_projection_tensor, optimal_update, random_mps, train, DenseState, TargetSpec,
    TrainConfig,
};

fn random_config(n: usize, d: usize, chi: usize, seed: u64) -> TrainConfig {
    let target = DenseState::random(n, d, seed ^ 0x5eed).unwrap();
    let mut cfg = TrainConfig::new(n, d, chi, seed, TargetSpec::State(target));
    cfg.max_sweeps = 20;
    cfg
}

#[test]
fn no_sampled_unit_vector_beats_the_update() {
    let state = random_mps(4, 2, 2, 3).unwrap().move_center_to(1).unwrap();
    let target = DenseState::random(4, 2, 4).unwrap();
    let basis = subspace_basis_dense(&state).unwrap();
    let (_, outcome) = optimal_update(&state, &target, 1e-14).unwrap();
    assert!((outcome.overlap - outcome.projection_norm).abs() <= 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let coords: Vec<f64> = (0..basis.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        let mut candidate = vec![0.0; target.amplitudes().len()];
        for (c, v) in coords.iter().zip(&basis.vectors) {
            for (x, b) in candidate.iter_mut().zip(v) {
                *x += c / norm * b;
            }
        }
        let overlap: f64 = candidate.iter().zip(target.amplitudes()).map(|(a, b)| a * b).sum();
        best = best.max(overlap);
    }
    assert!(best <= outcome.overlap + 1e-12, "{best} > {}", outcome.overlap);
}

#[test]
fn every_iterate_lies_in_the_next_subspace() {
    for seed in 0..5 {
        let n = 5;
        let target = DenseState::random(n, 2, 100 + seed).unwrap();
        let mut state = random_mps(n, 2, 3, seed).unwrap();
        let schedule: Vec<usize> = sweep_schedule(n).map(|(s, _)| s).collect();
        for k in 0..schedule.len() - 1 {
            state = move_to(&state, schedule[k]);
            state = optimal_update(&state, &target, 1e-14).unwrap().0;
            let dense = state.to_dense().unwrap();
            let next = move_to(&state, schedule[k + 1]);
            let basis = subspace_basis_dense(&next).unwrap();
            let p = project_onto_subspace_dense(&dense, &basis).unwrap();
            assert!((p.norm - 1.0).abs() <= 1e-10, "seed {seed} step {k}: {}", p.norm);
        }
    }
}

#[test]
fn projection_tensor_norm_matches_dense_projection() {
    for seed in 0..10 {
        let state = random_mps(5, 3, 4, seed).unwrap().move_center_to(seed as usize % 5).unwrap();
        let target = DenseState::random(5, 3, seed + 7).unwrap();
        let p = compute_projection_tensor(&state, &target).unwrap();
        assert!((p.norm - p.coeffs.frobenius_norm()).abs() <= 1e-14);
        let basis = subspace_basis_dense(&state).unwrap();
        let dense = project_onto_subspace_dense(&target, &basis).unwrap();
        assert!((p.norm - dense.norm).abs() <= 1e-12);
        // Pythagoras
        let residual: f64 = target
            .amplitudes()
            .iter()
            .zip(&dense.vector)
            .map(|(t, q)| (t - q).powi(2))
            .sum();
        assert!((target.norm().powi(2) - dense.norm.powi(2) - residual).abs() <= 1e-10);
    }
}

#[test]
fn train_is_deterministic() {
    let cfg = random_config(6, 2, 3, 17);
    let a = train(&cfg).unwrap();
    let b = train(&cfg).unwrap();
    assert_eq!(a.trajectory, b.trajectory);
    assert_eq!(a.state, b.state);
}

#[test]
fn independent_runs_on_threads_match_sequential_runs() {
    let configs: Vec<TrainConfig> = (0..4).map(|s| random_config(5, 2, 2, s)).collect();
    let sequential: Vec<_> = configs.iter().map(|c| train(c).unwrap().trajectory).collect();
    let threaded: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || train(c).unwrap().trajectory))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, threaded);
}

#[test]
fn uncapped_bonds_reach_the_target_at_the_middle_site() {
    // odd chain: site 1 of 3 has bonds 2 and 2, so the subspace is everything
    let cfg = random_config(3, 2, 2, 5);
    let result = train(&cfg).unwrap();
    assert!((result.trajectory[1].overlap - 1.0).abs() <= 1e-10);
}

#[test]
fn angle_is_arccos_of_overlap_where_well_conditioned() {
    let result = train(&random_config(7, 2, 2, 1)).unwrap();
    for r in &result.trajectory {
        assert!((r.angle.cos() - r.overlap).abs() <= 1e-12);
        if r.angle >= 1e-4 {
            assert!((r.angle - r.overlap.clamp(-1.0, 1.0).acos()).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trajectories_are_monotone_and_on_the_sphere(
        n in 1usize..7,
        d in 2usize..4,
        chi in 1usize..5,
        seed in 0u64..1_000_000,
    ) {
        let cfg = random_config(n, d, chi, seed);
        let target = cfg.build_target().unwrap();
        let result = train(&cfg).unwrap();
        prop_assert!(result.state.is_canonical());
        let dense = result.state.to_dense().unwrap();
        prop_assert!((dense.norm() - 1.0).abs() <= 1e-10);
        prop_assert!((dense.dot(&target) - result.final_overlap()).abs() <= 1e-12);
        // psi_0 is a candidate of the first subspace
        prop_assert!(result.trajectory[0].overlap >= result.initial_overlap - 1e-12);
        for pair in result.trajectory.windows(2) {
            if !pair[0].stalled && !pair[1].stalled {
                prop_assert!(pair[1].overlap >= pair[0].overlap - 1e-12);
            }
        }
        for r in &result.trajectory {
            prop_assert!((r.distance.powi(2) + 2.0 * r.overlap - 2.0).abs() <= 1e-12);
            prop_assert!(r.overlap.abs() <= 1.0 + 1e-12);
            prop_assert!((r.distance - 2.0 * (r.angle / 2.0).sin()).abs() <= 1e-10);
        }
    }

    #[test]
    fn update_matches_normalized_dense_projection(
        n in 2usize..6,
        chi in 1usize..4,
        center in 0usize..6,
        seed in 0u64..1_000_000,
    ) {
        let state = random_mps(n, 2, chi, seed).unwrap().move_center_to(center % n).unwrap();
        let target = DenseState::random(n, 2, seed + 1).unwrap();
        let basis = subspace_basis_dense(&state).unwrap();
        let expected = project_onto_subspace_dense(&target, &basis).unwrap().normalized().unwrap();
        let (next, _) = optimal_update(&state, &target, 1e-14).unwrap();
        prop_assert!(l2_diff(next.to_dense().unwrap().amplitudes(), &expected) <= 1e-10);
        prop_assert!(next.is_canonical());
    }
}
