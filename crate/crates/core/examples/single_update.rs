//! One closest-point step: project the target onto the single-site
//! subspace at the center and normalize. Checked against the dense oracle.
//!
//! cargo run -p sphere-dmrg --example single_update

use sphere_dmrg::oracle::{project_onto_subspace_dense, subspace_basis_dense};
use sphere_dmrg::{compute_projection_tensor, optimal_update, random_mps, DenseState};

fn main() -> sphere_dmrg::Result<()> {
    let psi0 = random_mps(5, 2, 2, 1)?.move_center_to(2)?;
    let target = DenseState::random(5, 2, 2)?;
    println!("<psi_0, target> = {:.12}", psi0.overlap_dense(&target)?);

    let projection = compute_projection_tensor(&psi0, &target)?;
    println!(
        "projection tensor {:?}, norm {:.12}",
        projection.coeffs.shape(),
        projection.norm
    );

    let (psi1, outcome) = optimal_update(&psi0, &target, 1e-14)?;
    println!("<psi_1, target> = {:.12}", outcome.overlap);

    let basis = subspace_basis_dense(&psi0)?;
    let dense = project_onto_subspace_dense(&target, &basis)?;
    let expected = dense.normalized().expect("non-zero projection");
    let err = psi1
        .to_dense()?
        .amplitudes()
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    println!(
        "oracle: subspace dim {}, |P target| = {:.12}, |psi_1 - P target / |P target|| = {err:.1e}",
        basis.dim(),
        dense.norm
    );
    Ok(())
}
