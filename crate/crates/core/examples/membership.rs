//! The next subspace contains the current iterate but, in general, not the
//! one before it.
//!
//! cargo run -p sphere-dmrg --example membership

use sphere_dmrg::engine::sweep_schedule;
use sphere_dmrg::oracle::{project_onto_subspace_dense, subspace_basis_dense};
use sphere_dmrg::{optimal_update, random_mps, DenseState};

fn main() -> sphere_dmrg::Result<()> {
    let n = 4;
    let target = DenseState::random(n, 2, 1000)?;
    let schedule: Vec<usize> = sweep_schedule(n).map(|(site, _)| site).collect();

    let mut state = random_mps(n, 2, 2, 0)?;
    let mut previous = state.to_dense()?;
    println!(" k  site(H_k+1)  |P psi_k|           |P psi_k-1|");
    for k in 1..schedule.len() {
        state = state.move_center_to(schedule[k - 1])?;
        state = optimal_update(&state, &target, 1e-14)?.0;
        let current = state.to_dense()?;

        let basis = subspace_basis_dense(&state.move_center_to(schedule[k])?)?;
        let inside = project_onto_subspace_dense(&current, &basis)?.norm;
        let before = project_onto_subspace_dense(&previous, &basis)?.norm;
        println!("{k:2}  {:11}  {inside:.15}  {before:.15}", schedule[k]);
        previous = current;
    }
    Ok(())
}
