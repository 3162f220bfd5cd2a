//! Target unit vectors: amplitude-encoded empirical counts, named analytic
//! states, seeded random states, and the JSON target file formats.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mps::{check_dense_size, DEFAULT_MAX_DENSE_BITS};

/// Amplitude files whose norm is further than this from 1 are rejected.
pub const FILE_NORM_TOLERANCE: f64 = 1e-6;

/// A dense amplitude vector of length `d^n`, big-endian indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    d: usize,
    amplitudes: Vec<f64>,
}

impl DenseState {
    /// Wraps raw amplitudes without touching their norm.
    pub fn from_raw(n: usize, d: usize, amplitudes: Vec<f64>) -> Result<Self> {
        let len = check_dense_size(n, d, DEFAULT_MAX_DENSE_BITS)?;
        if amplitudes.len() != len {
            return Err(Error::Argument(format!(
                "{d}^{n} = {len} amplitudes expected, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { n, d, amplitudes })
    }

    /// Normalizes amplitudes whose norm is within `tol` of 1, rejects the rest.
    pub fn from_amplitudes(n: usize, d: usize, amplitudes: Vec<f64>, tol: f64) -> Result<Self> {
        let mut state = Self::from_raw(n, d, amplitudes)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::Input(format!(
                "amplitude vector has norm {norm}, not within {tol:e} of 1"
            )));
        }
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    pub fn basis(n: usize, d: usize, index: usize) -> Result<Self> {
        let len = check_dense_size(n, d, DEFAULT_MAX_DENSE_BITS)?;
        if index >= len {
            return Err(Error::Input(format!(
                "basis index {index} out of range for {d}^{n}"
            )));
        }
        let mut amplitudes = vec![0.0; len];
        amplitudes[index] = 1.0;
        Ok(Self { n, d, amplitudes })
    }

    /// Seeded standard-normal vector scaled to unit norm.
    pub fn random(n: usize, d: usize, seed: u64) -> Result<Self> {
        let len = check_dense_size(n, d, DEFAULT_MAX_DENSE_BITS)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self::from_raw(n, d, raw.into_iter().map(|x| x / norm).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &DenseState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Big-endian index of a digit string such as `"0101"`.
    pub fn index_of(digits: &str, d: usize) -> Result<usize> {
        digits.chars().try_fold(0usize, |acc, ch| {
            let digit = ch
                .to_digit(36)
                .map(|v| v as usize)
                .filter(|&v| v < d)
                .ok_or_else(|| {
                    Error::Input(format!("key {digits:?}: digit {ch:?} out of range for d={d}"))
                })?;
            Ok(acc * d + digit)
        })
    }
}

/// Amplitude encoding of empirical counts: `amplitude(x) = sqrt(count(x) / total)`.
///
/// Keys are digit strings of equal length (`0-9` then `a-z`, so `d <= 36`).
/// Strings absent from the map get amplitude zero.
pub fn state_from_counts(counts: &BTreeMap<String, u64>, d: usize) -> Result<DenseState> {
    if !(2..=36).contains(&d) {
        return Err(Error::Input(format!("d = {d} must lie in 2..=36")));
    }
    let Some(first) = counts.keys().next() else {
        return Err(Error::Input("counts map is empty".into()));
    };
    let n = first.chars().count();
    if n == 0 {
        return Err(Error::Input("counts key \"\" is empty".into()));
    }
    let len = check_dense_size(n, d, DEFAULT_MAX_DENSE_BITS)?;
    let mut total: u128 = 0;
    for (key, &count) in counts {
        if key.chars().count() != n {
            return Err(Error::Input(format!(
                "key {key:?} has length {}, expected {n}",
                key.chars().count()
            )));
        }
        if count == 0 {
            return Err(Error::Input(format!("key {key:?} has a zero count")));
        }
        total += count as u128;
    }
    let total = total as f64;
    let mut amplitudes = vec![0.0; len];
    for (key, &count) in counts {
        amplitudes[DenseState::index_of(key, d)?] = (count as f64 / total).sqrt();
    }
    DenseState::from_raw(n, d, amplitudes)
}

/// Named analytic targets: `uniform`, `ghz`, `w`, `basis:<k>`, `random`.
///
/// `ghz` and `w` need `d = 2`; `random` needs a seed.
pub fn named_state(name: &str, n: usize, d: usize, seed: Option<u64>) -> Result<DenseState> {
    if n == 0 || d < 2 {
        return Err(Error::Input(format!("need n >= 1 and d >= 2 (got n={n}, d={d})")));
    }
    let len = check_dense_size(n, d, DEFAULT_MAX_DENSE_BITS)?;
    let require_qubits = || {
        if d == 2 {
            Ok(())
        } else {
            Err(Error::Input(format!("target {name:?} requires d = 2, got {d}")))
        }
    };
    match name {
        "uniform" => DenseState::from_raw(n, d, vec![(len as f64).sqrt().recip(); len]),
        "ghz" => {
            require_qubits()?;
            let mut amplitudes = vec![0.0; len];
            amplitudes[0] = std::f64::consts::FRAC_1_SQRT_2;
            amplitudes[len - 1] = std::f64::consts::FRAC_1_SQRT_2;
            DenseState::from_raw(n, d, amplitudes)
        }
        "w" => {
            require_qubits()?;
            let mut amplitudes = vec![0.0; len];
            let a = (n as f64).sqrt().recip();
            for site in 0..n {
                amplitudes[1 << (n - 1 - site)] = a;
            }
            DenseState::from_raw(n, d, amplitudes)
        }
        "random" => {
            let seed =
                seed.ok_or_else(|| Error::Input("target \"random\" requires a seed".into()))?;
            DenseState::random(n, d, seed)
        }
        _ => {
            if let Some(k) = name.strip_prefix("basis:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Input(format!("bad basis index in {name:?}")))?;
                DenseState::basis(n, d, k)
            } else {
                Err(Error::Input(format!("unknown target name {name:?}")))
            }
        }
    }
}

/// On-disk target description, tagged by `"kind"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TargetFile {
    Counts {
        d: usize,
        counts: BTreeMap<String, u64>,
    },
    Amplitudes {
        n: usize,
        d: usize,
        amplitudes: Vec<f64>,
    },
}

impl TargetFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("target file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn into_state(self) -> Result<DenseState> {
        match self {
            TargetFile::Counts { d, counts } => state_from_counts(&counts, d),
            TargetFile::Amplitudes { n, d, amplitudes } => {
                DenseState::from_amplitudes(n, d, amplitudes, FILE_NORM_TOLERANCE)
            }
        }
    }
}
