//! Open-boundary matrix-product states over real scalars, kept in
//! mixed-canonical gauge around a movable orthogonality center.
//!
//! Dense amplitude vectors use a big-endian index: site 0 is the most
//! significant digit, so basis string `s_0 s_1 ... s_{n-1}` sits at index
//! `sum_j s_j * d^(n-1-j)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::target::DenseState;
use crate::tensor::{
    column_orthonormality_defect, contract, householder_qr, row_orthonormality_defect, Tensor,
};

/// Largest dense problem accepted by default, as a power of two.
pub const DEFAULT_MAX_DENSE_BITS: u32 = 30;

/// Tolerance used by [`Mps::is_canonical`].
pub const GAUGE_TOLERANCE: f64 = 1e-10;

/// Refuses problems whose dense vector would have more than `2^max_bits`
/// amplitudes. Returns `d^n` on success.
pub fn check_dense_size(n: usize, d: usize, max_bits: u32) -> Result<usize> {
    let limit = 1u128 << max_bits.min(127);
    let mut size: u128 = 1;
    for _ in 0..n {
        size = size.saturating_mul(d as u128);
        if size > limit {
            return Err(Error::SizeGuard { n, d, max_bits });
        }
    }
    usize::try_from(size).map_err(|_| Error::SizeGuard { n, d, max_bits })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }

    /// Single-letter code used in trajectory files.
    pub fn code(self) -> char {
        match self {
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }
}

/// One MPS core with axes (left bond, physical, right bond).
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor(Tensor);

impl SiteTensor {
    pub fn new(core: Tensor) -> Result<Self> {
        if core.rank() != 3 {
            return Err(Error::Argument(format!(
                "site tensor needs 3 axes, got shape {:?}",
                core.shape()
            )));
        }
        Ok(Self(core))
    }

    pub fn from_data(left: usize, phys: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(Tensor::new(vec![left, phys, right], data)?)
    }

    pub fn left(&self) -> usize {
        self.0.shape()[0]
    }

    pub fn phys(&self) -> usize {
        self.0.shape()[1]
    }

    pub fn right(&self) -> usize {
        self.0.shape()[2]
    }

    pub fn core(&self) -> &Tensor {
        &self.0
    }

    pub fn into_core(self) -> Tensor {
        self.0
    }

    /// Reshaped to `(left * phys) x right`.
    pub fn as_left_matrix(&self) -> Tensor {
        let (l, d, r) = (self.left(), self.phys(), self.right());
        self.0.clone().reshape(vec![l * d, r]).expect("same size")
    }

    /// Reshaped to `left x (phys * right)`.
    pub fn as_right_matrix(&self) -> Tensor {
        let (l, d, r) = (self.left(), self.phys(), self.right());
        self.0.clone().reshape(vec![l, d * r]).expect("same size")
    }

    /// Max entry of `|A^T A - I|` with `A` the left matrix.
    pub fn left_isometry_defect(&self) -> f64 {
        column_orthonormality_defect(&self.as_left_matrix()).expect("matrix")
    }

    /// Max entry of `|B B^T - I|` with `B` the right matrix.
    pub fn right_isometry_defect(&self) -> f64 {
        row_orthonormality_defect(&self.as_right_matrix()).expect("matrix")
    }
}

/// A chain of site tensors with a designated orthogonality center.
#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    sites: Vec<SiteTensor>,
    center: usize,
}

impl Mps {
    /// Checks bond structure only; gauge conditions are not enforced here
    /// (see [`Mps::gauge_defect`]).
    pub fn new(sites: Vec<SiteTensor>, center: usize) -> Result<Self> {
        let n = sites.len();
        if n == 0 {
            return Err(Error::Argument("an MPS needs at least one site".into()));
        }
        if center >= n {
            return Err(Error::Argument(format!(
                "center {center} out of range for {n} sites"
            )));
        }
        let d = sites[0].phys();
        if sites[0].left() != 1 || sites[n - 1].right() != 1 {
            return Err(Error::Argument("boundary bonds must have dimension 1".into()));
        }
        for (j, site) in sites.iter().enumerate() {
            if site.phys() != d {
                return Err(Error::Argument(format!(
                    "site {j} has physical dimension {}, expected {d}",
                    site.phys()
                )));
            }
            if j + 1 < n && site.right() != sites[j + 1].left() {
                return Err(Error::Argument(format!(
                    "bond {j} mismatch: {} vs {}",
                    site.right(),
                    sites[j + 1].left()
                )));
            }
        }
        Ok(Self { sites, center })
    }

    /// Product state where every site carries basis vector `e_digit`.
    pub fn product(digits: &[usize], d: usize) -> Result<Self> {
        let sites = digits
            .iter()
            .map(|&s| {
                if s >= d {
                    return Err(Error::Argument(format!("digit {s} out of range for d={d}")));
                }
                let mut data = vec![0.0; d];
                data[s] = 1.0;
                SiteTensor::from_data(1, d, 1, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites, 0)
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn d(&self) -> usize {
        self.sites[0].phys()
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn site(&self, j: usize) -> &SiteTensor {
        &self.sites[j]
    }

    pub fn center_tensor(&self) -> &SiteTensor {
        &self.sites[self.center]
    }

    /// Bond dimensions between neighbouring sites, `n - 1` entries.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.n() - 1].iter().map(SiteTensor::right).collect()
    }

    /// Replaces the center core with one of identical shape.
    pub fn with_center_tensor(&self, core: Tensor) -> Result<Self> {
        let old = self.center_tensor();
        if core.shape() != old.core().shape() {
            return Err(Error::Argument(format!(
                "center tensor shape {:?} does not match {:?}",
                core.shape(),
                old.core().shape()
            )));
        }
        let mut out = self.clone();
        out.sites[self.center] = SiteTensor::new(core)?;
        Ok(out)
    }

    /// Largest isometry defect over all sites away from the center, with the
    /// offending site.
    pub fn gauge_defect(&self) -> (usize, f64) {
        let mut worst = (self.center, 0.0);
        for (j, site) in self.sites.iter().enumerate() {
            let defect = match j.cmp(&self.center) {
                std::cmp::Ordering::Less => site.left_isometry_defect(),
                std::cmp::Ordering::Greater => site.right_isometry_defect(),
                std::cmp::Ordering::Equal => continue,
            };
            if defect > worst.1 {
                worst = (j, defect);
            }
        }
        worst
    }

    /// Mixed-canonical gauge and unit norm, both within [`GAUGE_TOLERANCE`].
    pub fn is_canonical(&self) -> bool {
        self.gauge_defect().1 <= GAUGE_TOLERANCE
            && (self.center_tensor().core().frobenius_norm() - 1.0).abs() <= GAUGE_TOLERANCE
    }

    /// Moves the orthogonality center one site, leaving the represented
    /// vector unchanged.
    pub fn shift_center(&self, direction: Direction) -> Result<Self> {
        let mut out = self.clone();
        out.shift_center_in_place(direction)?;
        Ok(out)
    }

    pub(crate) fn shift_center_in_place(&mut self, direction: Direction) -> Result<()> {
        let n = self.n();
        let c = self.center;
        let boundary = Error::Boundary {
            center: c,
            n,
            direction: direction.as_str(),
        };
        match direction {
            Direction::Right => {
                if c + 1 >= n {
                    return Err(boundary);
                }
                let (l, d) = (self.sites[c].left(), self.sites[c].phys());
                let qr = householder_qr(&self.sites[c].as_left_matrix())?;
                let k = qr.q.shape()[1];
                self.sites[c] = SiteTensor::new(qr.q.reshape(vec![l, d, k])?)?;
                // (k x r) . (r, d, r') -> (k, d, r')
                let next = contract(&qr.t, &[1], self.sites[c + 1].core(), &[0])?;
                self.sites[c + 1] = SiteTensor::new(next)?;
                self.center = c + 1;
            }
            Direction::Left => {
                if c == 0 {
                    return Err(boundary);
                }
                let (d, r) = (self.sites[c].phys(), self.sites[c].right());
                let qr = householder_qr(&self.sites[c].as_right_matrix().transpose()?)?;
                // right matrix B = t^T q^T
                let k = qr.q.shape()[1];
                self.sites[c] = SiteTensor::new(qr.q.transpose()?.reshape(vec![k, d, r])?)?;
                // (l', d, l) . (k x l)^T -> (l', d, k)
                let prev = contract(self.sites[c - 1].core(), &[2], &qr.t, &[1])?;
                self.sites[c - 1] = SiteTensor::new(prev)?;
                self.center = c - 1;
            }
        }
        Ok(())
    }

    /// Repeated [`Mps::shift_center`] until the center sits at `target`.
    pub fn move_center_to(&self, target: usize) -> Result<Self> {
        if target >= self.n() {
            return Err(Error::Argument(format!(
                "center {target} out of range for {} sites",
                self.n()
            )));
        }
        let mut out = self.clone();
        while out.center < target {
            out.shift_center_in_place(Direction::Right)?;
        }
        while out.center > target {
            out.shift_center_in_place(Direction::Left)?;
        }
        Ok(out)
    }

    /// Brings an arbitrary chain into canonical form at `center` and
    /// normalizes it.
    pub fn canonicalize(sites: Vec<SiteTensor>, center: usize) -> Result<Self> {
        let n = sites.len();
        let mut mps = Self::new(sites, n - 1)?;
        // right-to-left pass makes every site right-isometric
        while mps.center > 0 {
            mps.shift_center_in_place(Direction::Left)?;
        }
        let mut mps = mps.move_center_to(center)?;
        let norm = mps.center_tensor().core().frobenius_norm();
        if norm == 0.0 {
            return Err(Error::Argument("cannot normalize the zero vector".into()));
        }
        let c = mps.center;
        mps.sites[c] = SiteTensor::new(mps.sites[c].core().scale(1.0 / norm))?;
        Ok(mps)
    }

    /// Dense amplitude vector, refusing anything above the default size guard.
    pub fn to_dense(&self) -> Result<DenseState> {
        self.to_dense_with_limit(DEFAULT_MAX_DENSE_BITS)
    }

    pub fn to_dense_with_limit(&self, max_bits: u32) -> Result<DenseState> {
        let (n, d) = (self.n(), self.d());
        check_dense_size(n, d, max_bits)?;
        // acc has shape (d^j, bond_j)
        let mut acc = self.sites[0].core().clone().reshape(vec![d, self.sites[0].right()])?;
        for site in &self.sites[1..] {
            let rows = acc.shape()[0] * d;
            let next = contract(&acc, &[1], site.core(), &[0])?;
            acc = next.reshape(vec![rows, site.right()])?;
        }
        DenseState::from_raw(n, d, acc.into_data())
    }

    /// Real inner product `<self, target>`, contracting the target against
    /// the sites one at a time. Needs no gauge condition.
    pub fn overlap_dense(&self, target: &DenseState) -> Result<f64> {
        if target.n() != self.n() || target.d() != self.d() {
            return Err(Error::Argument(format!(
                "target is {}^{}, state is {}^{}",
                target.d(),
                target.n(),
                self.d(),
                self.n()
            )));
        }
        let env = left_environment(&self.sites, target, self.n())?;
        Ok(env.scalar_value())
    }
}

/// Contracts the target with the first `upto` sites from the left.
///
/// The result has shape `(bond, d^(n - upto))`, where `bond` is the right
/// bond of site `upto - 1` (or 1 when `upto == 0`).
pub(crate) fn left_environment(
    sites: &[SiteTensor],
    target: &DenseState,
    upto: usize,
) -> Result<Tensor> {
    let total = target.amplitudes().len();
    let d = target.d();
    let mut env = Tensor::new(vec![1, total], target.amplitudes().to_vec())?;
    let mut rest = total;
    for site in &sites[..upto] {
        rest /= d;
        let l = site.left();
        let env3 = env.reshape(vec![l, d, rest])?;
        // (l, d, r) x (l, d, rest) -> (r, rest)
        env = contract(site.core(), &[0, 1], &env3, &[0, 1])?;
    }
    Ok(env)
}

/// Draws a random MPS with i.i.d. standard-normal entries, then gauges it to
/// center 0 and normalizes. The bond between sites `i` and `i + 1` is
/// `min(chi, d^(i+1), d^(n-1-i))`.
///
/// Entries come from a ChaCha8 stream seeded with `seed`, filled site by
/// site in row-major order.
pub fn random_mps(n: usize, d: usize, chi: usize, seed: u64) -> Result<Mps> {
    random_mps_with_limit(n, d, chi, seed, DEFAULT_MAX_DENSE_BITS)
}

pub fn random_mps_with_limit(
    n: usize,
    d: usize,
    chi: usize,
    seed: u64,
    max_bits: u32,
) -> Result<Mps> {
    if n == 0 || d < 2 || chi == 0 {
        return Err(Error::Argument(format!(
            "random_mps needs n >= 1, d >= 2, chi >= 1 (got n={n}, d={d}, chi={chi})"
        )));
    }
    check_dense_size(n, d, max_bits)?;
    let bonds = capped_bond_dims(n, d, chi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites = Vec::with_capacity(n);
    for j in 0..n {
        let l = if j == 0 { 1 } else { bonds[j - 1] };
        let r = if j + 1 == n { 1 } else { bonds[j] };
        let data = (0..l * d * r).map(|_| StandardNormal.sample(&mut rng)).collect();
        sites.push(SiteTensor::from_data(l, d, r, data)?);
    }
    Mps::canonicalize(sites, 0)
}

/// `min(chi, d^(i+1), d^(n-1-i))` for each of the `n - 1` bonds.
pub fn capped_bond_dims(n: usize, d: usize, chi: usize) -> Vec<usize> {
    let pow_capped = |e: usize| -> usize {
        let mut v = 1usize;
        for _ in 0..e {
            v = v.saturating_mul(d);
            if v >= chi {
                return chi;
            }
        }
        v
    };
    (0..n.saturating_sub(1))
        .map(|i| chi.min(pow_capped(i + 1)).min(pow_capped(n - 1 - i)))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct SiteJson {
    shape: [usize; 3],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MpsJson {
    n: usize,
    d: usize,
    center: usize,
    tensors: Vec<SiteJson>,
}

impl Mps {
    /// JSON document `{"n", "d", "center", "tensors": [{"shape", "data"}]}`.
    /// Floats are written in shortest round-trip form.
    pub fn to_json(&self) -> Result<String> {
        let doc = MpsJson {
            n: self.n(),
            d: self.d(),
            center: self.center,
            tensors: self
                .sites
                .iter()
                .map(|s| SiteJson {
                    shape: [s.left(), s.phys(), s.right()],
                    data: s.core().data().to_vec(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MpsJson = serde_json::from_str(text)?;
        if doc.tensors.len() != doc.n {
            return Err(Error::Input(format!(
                "n = {} but {} tensors given",
                doc.n,
                doc.tensors.len()
            )));
        }
        let sites = doc
            .tensors
            .into_iter()
            .map(|t| SiteTensor::from_data(t.shape[0], t.shape[1], t.shape[2], t.data))
            .collect::<Result<Vec<_>>>()?;
        let mps = Self::new(sites, doc.center)?;
        if mps.d() != doc.d {
            return Err(Error::Input(format!(
                "d = {} but tensors have physical dimension {}",
                doc.d,
                mps.d()
            )));
        }
        Ok(mps)
    }
}
