//! Full training run with the per-update trajectory, optionally written as
//! the CSV/JSON run artifacts.
//!
//! cargo run -p sphere-dmrg --example training_trajectory [-- OUT_DIR]

use sphere_dmrg::io::write_run;
use sphere_dmrg::{train, TargetSpec, TrainConfig};

fn main() -> sphere_dmrg::Result<()> {
    let target = TargetSpec::Named {
        name: "random".into(),
        seed: Some(3),
    };
    let mut config = TrainConfig::new(8, 2, 4, 1, target);
    config.max_sweeps = 30;
    let result = train(&config)?;

    println!("initial overlap {:.10}", result.initial_overlap);
    println!("step sweep site dir      overlap        angle     distance");
    for r in result.trajectory.iter().filter(|r| r.site == 0 || r.step <= 15) {
        println!(
            "{:4} {:5} {:4}   {} {:.10} {:.6e} {:.6e}{}",
            r.step,
            r.sweep,
            r.site,
            r.direction.code(),
            r.overlap,
            r.angle,
            r.distance,
            if r.stalled { " stalled" } else { "" }
        );
    }
    println!(
        "{} after {} sweeps, final overlap {:.12}",
        result.termination,
        result.sweeps_run,
        result.final_overlap()
    );

    if let Some(dir) = std::env::args().nth(1) {
        let output = write_run(dir.as_ref(), &result, 0.0)?;
        println!("wrote {}", output.trajectory_csv_path.display());
    }
    Ok(())
}
