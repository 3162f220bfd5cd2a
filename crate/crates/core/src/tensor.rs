//! Dense real tensors stored row-major (last axis fastest).
//!
//! Only two numerical primitives live here: pairwise axis contraction and a
//! sign-fixed Householder QR. Everything else in the crate is built on them.

use crate::error::{Error, Result};

/// Diagonal entries of the triangular factor below this are treated as zero
/// by [`qr_orthonormalize`].
pub const RANK_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::Argument(format!(
                "axis lengths must be positive, got {shape:?}"
            )));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(Error::Argument(format!(
                "shape {shape:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            shape: Vec::new(),
            data: vec![value],
        }
    }

    pub fn vector(data: Vec<f64>) -> Result<Self> {
        Self::new(vec![data.len()], data)
    }

    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(vec![rows, cols], data)
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(vec![n, n]);
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Value of a rank-0 tensor (or the first entry of any tensor).
    pub fn scalar_value(&self) -> f64 {
        self.data[0]
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    fn offset(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.shape.len(), "index rank mismatch");
        index
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &s)| {
                assert!(i < s, "index {i} out of range for axis of length {s}");
                acc * s + i
            })
    }

    /// Same data, new shape. The total size must not change.
    pub fn reshape(self, shape: Vec<usize>) -> Result<Self> {
        Self::new(shape, self.data)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Entrywise inner product of two tensors with equal size.
    pub fn dot(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Reorders axes so that output axis `k` is input axis `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let rank = self.rank();
        let mut seen = vec![false; rank];
        if perm.len() != rank
            || perm.iter().any(|&p| p >= rank || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Argument(format!(
                "{perm:?} is not a permutation of {rank} axes"
            )));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }

        let mut strides = vec![1usize; rank];
        for k in (0..rank.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.shape[k + 1];
        }
        let new_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let new_strides: Vec<usize> = perm.iter().map(|&p| strides[p]).collect();

        let mut data = Vec::with_capacity(self.data.len());
        let mut index = vec![0usize; rank];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            // odometer increment over the output index
            for k in (0..rank).rev() {
                index[k] += 1;
                src += new_strides[k];
                if index[k] < new_shape[k] {
                    break;
                }
                src -= new_strides[k] * new_shape[k];
                index[k] = 0;
            }
        }
        Ok(Self {
            shape: new_shape,
            data,
        })
    }

    /// Matrix transpose of a rank-2 tensor.
    pub fn transpose(&self) -> Result<Self> {
        if self.rank() != 2 {
            return Err(Error::Argument(format!(
                "transpose needs a matrix, got shape {:?}",
                self.shape
            )));
        }
        self.permute(&[1, 0])
    }

    pub fn matmul(&self, other: &Tensor) -> Result<Self> {
        if self.rank() != 2 || other.rank() != 2 {
            return Err(Error::ContractShape {
                a: self.shape.clone(),
                b: other.shape.clone(),
                reason: "matmul needs two matrices".into(),
            });
        }
        contract(self, &[1], other, &[0])
    }
}

/// Sums over paired axes of `a` and `b`.
///
/// The result carries the free axes of `a` in order followed by the free axes
/// of `b` in order. Contracting every axis yields a rank-0 tensor.
pub fn contract(a: &Tensor, axes_a: &[usize], b: &Tensor, axes_b: &[usize]) -> Result<Tensor> {
    let fail = |reason: String| Error::ContractShape {
        a: a.shape.clone(),
        b: b.shape.clone(),
        reason,
    };
    if axes_a.len() != axes_b.len() {
        return Err(fail(format!(
            "{} axes paired with {} axes",
            axes_a.len(),
            axes_b.len()
        )));
    }
    check_axes(axes_a, a.rank()).map_err(|r| fail(format!("left operand: {r}")))?;
    check_axes(axes_b, b.rank()).map_err(|r| fail(format!("right operand: {r}")))?;
    for (&i, &j) in axes_a.iter().zip(axes_b) {
        if a.shape[i] != b.shape[j] {
            return Err(fail(format!(
                "axis {i} (length {}) paired with axis {j} (length {})",
                a.shape[i], b.shape[j]
            )));
        }
    }

    let free_a: Vec<usize> = (0..a.rank()).filter(|k| !axes_a.contains(k)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|k| !axes_b.contains(k)).collect();

    let perm_a: Vec<usize> = free_a.iter().chain(axes_a).copied().collect();
    let perm_b: Vec<usize> = axes_b.iter().chain(&free_b).copied().collect();
    let a_mat = a.permute(&perm_a)?;
    let b_mat = b.permute(&perm_b)?;

    let rows: usize = free_a.iter().map(|&k| a.shape[k]).product();
    let inner: usize = axes_a.iter().map(|&k| a.shape[k]).product();
    let cols: usize = free_b.iter().map(|&k| b.shape[k]).product();

    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        let a_row = &a_mat.data[i * inner..(i + 1) * inner];
        let out_row = &mut out[i * cols..(i + 1) * cols];
        for (p, &a_ip) in a_row.iter().enumerate() {
            if a_ip == 0.0 {
                continue;
            }
            let b_row = &b_mat.data[p * cols..(p + 1) * cols];
            for (o, &b_pj) in out_row.iter_mut().zip(b_row) {
                *o += a_ip * b_pj;
            }
        }
    }

    let shape: Vec<usize> = free_a
        .iter()
        .map(|&k| a.shape[k])
        .chain(free_b.iter().map(|&k| b.shape[k]))
        .collect();
    Ok(Tensor { shape, data: out })
}

fn check_axes(axes: &[usize], rank: usize) -> std::result::Result<(), String> {
    for (k, &ax) in axes.iter().enumerate() {
        if ax >= rank {
            return Err(format!("axis {ax} out of range for rank {rank}"));
        }
        if axes[..k].contains(&ax) {
            return Err(format!("axis {ax} listed twice"));
        }
    }
    Ok(())
}

/// Thin QR factorization `m = q * t` of a tall matrix.
///
/// `q` has orthonormal columns and `t` is upper triangular with a
/// non-negative diagonal. Fails if any diagonal entry of `t` falls below
/// [`RANK_TOLERANCE`].
pub fn qr_orthonormalize(m: &Tensor) -> Result<(Tensor, Tensor)> {
    let (rows, cols) = matrix_dims(m)?;
    if rows < cols {
        return Err(Error::Argument(format!(
            "qr_orthonormalize needs rows >= cols, got {rows}x{cols}"
        )));
    }
    let qr = householder_qr(m)?;
    if let Some(column) = qr.raw_diagonal.iter().position(|d| d.abs() < RANK_TOLERANCE) {
        return Err(Error::RankDeficient { column });
    }
    Ok((qr.q, qr.t))
}

/// Output of [`householder_qr`].
#[derive(Clone, Debug)]
pub struct QrParts {
    /// `rows x k` with orthonormal columns, `k = min(rows, cols)`.
    pub q: Tensor,
    /// `k x cols`, upper trapezoidal, non-negative diagonal.
    pub t: Tensor,
    /// Diagonal of the triangular factor before the sign fix.
    pub raw_diagonal: Vec<f64>,
}

/// Householder QR for any matrix shape, tolerating rank deficiency.
///
/// Columns of `q` stay exactly orthonormal even when the corresponding
/// diagonal entry of `t` vanishes, which is what gauge moves need.
pub fn householder_qr(m: &Tensor) -> Result<QrParts> {
    let (rows, cols) = matrix_dims(m)?;
    let k = rows.min(cols);
    let mut a = m.data.clone();
    let mut reflectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(k);
    let mut raw_diagonal = Vec::with_capacity(k);

    for j in 0..k {
        let norm = (j..rows).map(|i| a[i * cols + j].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(None);
            raw_diagonal.push(0.0);
            continue;
        }
        let x0 = a[j * cols + j];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[i * cols + j]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        if vv == 0.0 {
            reflectors.push(None);
            raw_diagonal.push(x0);
            continue;
        }
        // a <- (I - 2 v v^T / v^T v) a on the trailing block
        for c in j..cols {
            let proj: f64 = v
                .iter()
                .enumerate()
                .map(|(p, vp)| vp * a[(j + p) * cols + c])
                .sum();
            let f = 2.0 * proj / vv;
            for (p, vp) in v.iter().enumerate() {
                a[(j + p) * cols + c] -= f * vp;
            }
        }
        a[j * cols + j] = alpha;
        for i in j + 1..rows {
            a[i * cols + j] = 0.0;
        }
        raw_diagonal.push(alpha);
        reflectors.push(Some(v));
    }

    let mut t = vec![0.0; k * cols];
    for i in 0..k {
        for c in i..cols {
            t[i * cols + c] = a[i * cols + c];
        }
    }

    // q = H_0 H_1 ... H_{k-1} [e_0 .. e_{k-1}]
    let mut q = vec![0.0; rows * k];
    for i in 0..k {
        q[i * k + i] = 1.0;
    }
    for j in (0..k).rev() {
        let Some(v) = &reflectors[j] else { continue };
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for c in 0..k {
            let proj: f64 = v
                .iter()
                .enumerate()
                .map(|(p, vp)| vp * q[(j + p) * k + c])
                .sum();
            let f = 2.0 * proj / vv;
            for (p, vp) in v.iter().enumerate() {
                q[(j + p) * k + c] -= f * vp;
            }
        }
    }

    for j in 0..k {
        if t[j * cols + j] < 0.0 {
            for c in j..cols {
                t[j * cols + c] = -t[j * cols + c];
            }
            for i in 0..rows {
                q[i * k + j] = -q[i * k + j];
            }
        }
    }

    Ok(QrParts {
        q: Tensor {
            shape: vec![rows, k],
            data: q,
        },
        t: Tensor {
            shape: vec![k, cols],
            data: t,
        },
        raw_diagonal,
    })
}

fn matrix_dims(m: &Tensor) -> Result<(usize, usize)> {
    match *m.shape() {
        [r, c] => Ok((r, c)),
        _ => Err(Error::Argument(format!(
            "expected a matrix, got shape {:?}",
            m.shape()
        ))),
    }
}

/// Largest entry of `|q^T q - I|` for a `rows x cols` matrix.
pub fn column_orthonormality_defect(q: &Tensor) -> Result<f64> {
    let gram = contract(q, &[0], q, &[0])?;
    Ok(gram.max_abs_diff(&Tensor::identity(gram.shape()[0])))
}

/// Largest entry of `|q q^T - I|` for a `rows x cols` matrix.
pub fn row_orthonormality_defect(q: &Tensor) -> Result<f64> {
    let gram = contract(q, &[1], q, &[1])?;
    Ok(gram.max_abs_diff(&Tensor::identity(gram.shape()[0])))
}
