//! Cross-checks every update of a sweep against the brute-force dense
//! oracle for a small grid of problem sizes.
//!
//! cargo run -p sphere-dmrg --example oracle_check

use sphere_dmrg::oracle::cross_check_sweep;
use sphere_dmrg::{random_mps, DenseState};

fn main() -> sphere_dmrg::Result<()> {
    println!(" n d chi  steps  coeff err  state err  ok");
    for n in 2..=6 {
        for d in [2, 3] {
            for chi in [1, 2, 4] {
                let state = random_mps(n, d, chi, 0)?;
                let target = DenseState::random(n, d, 1)?;
                let report = cross_check_sweep(&state, &target, 1e-14)?;
                println!(
                    "{n:2} {d} {chi:3}  {:5}  {:9.1e}  {:9.1e}  {}",
                    report.steps,
                    report.max_coeff_error,
                    report.max_state_error,
                    report.passed()
                );
            }
        }
    }
    Ok(())
}
