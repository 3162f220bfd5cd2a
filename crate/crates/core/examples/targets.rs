//! Building target vectors: amplitude-encoded counts, named states, files.
//!
//! cargo run -p sphere-dmrg --example targets

use std::collections::BTreeMap;

use sphere_dmrg::target::TargetFile;
use sphere_dmrg::{named_state, state_from_counts, DenseState};

fn show(label: &str, state: &DenseState) {
    let nonzero: Vec<String> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(i, a)| format!("{i}:{a:.4}"))
        .collect();
    println!("{label:<22} n={} d={} norm={:.15}  {}", state.n(), state.d(), state.norm(), nonzero.join(" "));
}

fn main() -> sphere_dmrg::Result<()> {
    // empirical counts of observed bit strings; site 0 is the leftmost digit
    let counts: BTreeMap<String, u64> = [("000", 6), ("011", 3), ("101", 2), ("110", 1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    show("counts", &state_from_counts(&counts, 2)?);

    for name in ["uniform", "ghz", "w", "basis:5"] {
        show(name, &named_state(name, 3, 2, None)?);
    }
    show("random (seed 4)", &named_state("random", 2, 3, Some(4))?);

    let doc = r#"{"kind": "amplitudes", "n": 1, "d": 2, "amplitudes": [0.6, 0.8]}"#;
    show("amplitudes file", &TargetFile::parse(doc)?.into_state()?);
    let doc = r#"{"kind": "counts", "d": 3, "counts": {"02": 1, "21": 3}}"#;
    show("counts file (d=3)", &TargetFile::parse(doc)?.into_state()?);

    let bad = r#"{"kind": "amplitudes", "n": 1, "d": 2, "amplitudes": [1.0, 1.0]}"#;
    if let Err(e) = TargetFile::parse(bad)?.into_state() {
        println!("rejected: {e}");
    }
    Ok(())
}
