//! Dense forward operators `A: R^n -> R^m` with cached spectral data.
//!
//! Matrix-vector products go through nalgebra's `gemv`. The operator norm and
//! the singular system are computed lazily, once, and shared between threads.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{check_len, Result, SoarError};

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 10_000;
/// Singular values below `SVD_CUTOFF * sigma_1` are dropped from the system.
pub const SVD_CUTOFF: f64 = 1e-14;
const BINARY_MAGIC: &[u8; 8] = b"SOARMAT1";

/// Singular system `A u_j = sigma_j v_j`, sorted by decreasing `sigma_j`.
///
/// `right_vectors` holds the `u_j` (columns, in the domain `R^n`) and
/// `left_vectors` the `v_j` (columns, in the range `R^m`).
#[derive(Debug, Clone)]
pub struct SvdSystem {
    pub singular_values: Vec<f64>,
    pub left_vectors: DMatrix<f64>,
    pub right_vectors: DMatrix<f64>,
    /// Number of singular values removed by the relative cutoff.
    pub truncated: usize,
}

impl SvdSystem {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Eigenvalues `sigma_j^2` of `A^T A` on the retained modes.
    pub fn lambdas(&self) -> Vec<f64> {
        self.singular_values.iter().map(|s| s * s).collect()
    }
}

#[derive(Debug)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    norm: OnceLock<f64>,
    svd: OnceLock<SvdSystem>,
}

impl Clone for DenseOperator {
    fn clone(&self) -> Self {
        Self {
            matrix: self.matrix.clone(),
            norm: self.norm.clone(),
            svd: self.svd.clone(),
        }
    }
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(SoarError::Domain("operator must have positive dimensions".into()));
        }
        for j in 0..matrix.ncols() {
            for i in 0..matrix.nrows() {
                if !matrix[(i, j)].is_finite() {
                    return Err(SoarError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self {
            matrix,
            norm: OnceLock::new(),
            svd: OnceLock::new(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Self::new(DMatrix::from_row_slice(rows, cols, data))
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `A^T y`
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.apply_adjoint_into(y, &mut out);
        Ok(out)
    }

    /// Unchecked `out = A x`; lengths are the caller's responsibility.
    pub(crate) fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let xv = DVectorView::from_slice(x, x.len());
        let mut ov = nalgebra::DVectorViewMut::from_slice(out, self.rows());
        ov.gemv(1.0, &self.matrix, &xv, 0.0);
    }

    pub(crate) fn apply_adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        let yv = DVectorView::from_slice(y, y.len());
        let mut ov = nalgebra::DVectorViewMut::from_slice(out, self.cols());
        ov.gemv_tr(1.0, &self.matrix, &yv, 0.0);
    }

    /// `A^T (y - A x)` together with the residual `y - A x`.
    pub(crate) fn residual_and_gradient(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut res = vec![0.0; self.rows()];
        self.apply_into(x, &mut res);
        for (r, yi) in res.iter_mut().zip(y) {
            *r = yi - *r;
        }
        let mut grad = vec![0.0; self.cols()];
        self.apply_adjoint_into(&res, &mut grad);
        (res, grad)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|v| *v == 0.0)
    }

    /// Spectral norm `||A||`. Taken from the singular system when it has
    /// already been computed, otherwise from power iteration on `A^T A`.
    pub fn operator_norm(&self) -> f64 {
        *self.norm.get_or_init(|| match self.svd.get() {
            Some(svd) => svd.singular_values.first().copied().unwrap_or(0.0),
            None => self.power_iteration(),
        })
    }

    fn power_iteration(&self) -> f64 {
        let n = self.cols();
        // Deterministic start with no special alignment.
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7548776662).fract()).collect();
        let nv = crate::vecops::norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut av = vec![0.0; self.rows()];
        let mut w = vec![0.0; n];
        let mut lambda = 0.0;
        for _ in 0..POWER_MAX_ITER {
            self.apply_into(&v, &mut av);
            self.apply_adjoint_into(&av, &mut w);
            let next = crate::vecops::dot(&v, &w);
            let nw = crate::vecops::norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / nw;
            }
            let done = (next - lambda).abs() <= POWER_TOL * next.abs();
            lambda = next;
            if done {
                break;
            }
        }
        lambda.max(0.0).sqrt()
    }

    /// Thin singular system, computed once.
    pub fn svd(&self) -> Result<&SvdSystem> {
        if let Some(s) = self.svd.get() {
            return Ok(s);
        }
        let sys = compute_svd(&self.matrix)?;
        Ok(self.svd.get_or_init(|| sys))
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "{} {}", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|j| format!("{:e}", self.matrix[(i, j)])).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the text format: a header line `m n`, then `m` rows of `n` values.
    pub fn read_text(path: &Path) -> Result<Self> {
        let reader = BufReader::new(std::fs::File::open(path)?);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| SoarError::Parse("empty matrix file".into()))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| SoarError::Parse(format!("header: {e}"))))
            .collect::<Result<_>>()?;
        if dims.len() != 2 {
            return Err(SoarError::Parse("header must be `rows cols`".into()));
        }
        let (m, n) = (dims[0], dims[1]);
        let mut data = Vec::with_capacity(m * n);
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            for tok in line.split_whitespace() {
                let v: f64 = tok
                    .parse()
                    .map_err(|e| SoarError::Parse(format!("line {}: {e}", lineno + 2)))?;
                data.push(v);
            }
        }
        check_len(m * n, data.len())?;
        Self::from_row_major(m, n, &data)
    }

    /// Binary format: magic, `u64` rows, `u64` cols, row-major little-endian `f64`.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(BINARY_MAGIC)?;
        out.write_all(&(self.rows() as u64).to_le_bytes())?;
        out.write_all(&(self.cols() as u64).to_le_bytes())?;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.write_all(&self.matrix[(i, j)].to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 24 || &bytes[..8] != BINARY_MAGIC {
            return Err(SoarError::Parse("not a binary matrix file".into()));
        }
        let word = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap()) as usize;
        let (m, n) = (word(8), word(16));
        check_len(24 + 8 * m * n, bytes.len())?;
        let data: Vec<f64> = bytes[24..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_row_major(m, n, &data)
    }
}

fn compute_svd(matrix: &DMatrix<f64>) -> Result<SvdSystem> {
    let svd = matrix
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| SoarError::Decomposition("SVD did not converge".into()))?;
    let u = svd.u.as_ref().expect("requested U");
    let vt = svd.v_t.as_ref().expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    let keep: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| top > 0.0 && svd.singular_values[i] > SVD_CUTOFF * top)
        .collect();
    let truncated = order.len() - keep.len();
    let mut left = DMatrix::zeros(matrix.nrows(), keep.len());
    let mut right = DMatrix::zeros(matrix.ncols(), keep.len());
    let mut sigma = Vec::with_capacity(keep.len());
    for (c, &i) in keep.iter().enumerate() {
        sigma.push(svd.singular_values[i]);
        left.set_column(c, &u.column(i));
        right.set_column(c, &vt.row(i).transpose());
    }
    Ok(SvdSystem {
        singular_values: sigma,
        left_vectors: left,
        right_vectors: right,
        truncated,
    })
}
