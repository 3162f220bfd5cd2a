//! Random MPS initialization and orthogonality-center moves.
//!
//! cargo run -p sphere-dmrg --example gauge_moves

use sphere_dmrg::{random_mps, Direction};

fn main() -> sphere_dmrg::Result<()> {
    let mut state = random_mps(6, 2, 4, 7)?;
    println!("bond dims {:?}, center {}", state.bond_dims(), state.center());
    let reference = state.to_dense()?;
    println!("dense norm {:.15}", reference.norm());

    for step in 0..8 {
        let dir = if step < 5 { Direction::Right } else { Direction::Left };
        state = state.shift_center(dir)?;
        let dense = state.to_dense()?;
        let change: f64 = dense
            .amplitudes()
            .iter()
            .zip(reference.amplitudes())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let (site, defect) = state.gauge_defect();
        println!(
            "shift {:5} -> center {}  |change| = {change:.1e}  worst isometry defect {defect:.1e} (site {site})",
            dir.as_str(),
            state.center()
        );
    }

    match state.move_center_to(0)?.shift_center(Direction::Left) {
        Err(e) => println!("{e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
