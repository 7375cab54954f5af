//! Dense and sparse kernels used by the solver.
//!
//! Only what the solver needs is here: a row-major dense matrix for the
//! `m × p` factor (with `m ≤ 50`, `p` up to tens of thousands), a CSR
//! symmetric matrix for cost matrices, and power iteration for the leading
//! singular triple of the factor and the spectral norm of a cost matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Iteration cap for every power iteration in this module.
pub const POWER_MAX_ITERS: usize = 2000;
/// Relative change of the eigenvalue estimate that counts as converged.
pub const POWER_REL_TOL: f64 = 1e-12;
/// Iteration at which a slowly converging start vector gets nudged.
const STALL_CHECK_ITER: usize = 50;
const PERTURBATION: f64 = 1e-6;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("DenseMat::from_row_major"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn same_shape(&self, other: &DenseMat) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        dot(&self.data, &self.data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.frobenius_norm_sq())
    }

    /// `⟨self, other⟩ = trace(selfᵀ other)`.
    pub fn frobenius_dot(&self, other: &DenseMat) -> f64 {
        debug_assert!(self.same_shape(other));
        dot(&self.data, &other.data)
    }

    /// Squared Euclidean norm of every column.
    pub fn column_norms_sq(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, &v) in out.iter_mut().zip(self.row(i)) {
                *acc += v * v;
            }
        }
        out
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &DenseMat) {
        debug_assert!(self.same_shape(other));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    /// `‖self − other‖_F²`.
    pub fn dist_sq(&self, other: &DenseMat) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Gram matrix `self · selfᵀ` (rows × rows, row-major).
    pub fn gram(&self) -> Vec<f64> {
        let m = self.rows;
        let mut g = vec![0.0; m * m];
        for a in 0..m {
            let ra = self.row(a);
            for b in a..m {
                let v = dot(ra, self.row(b));
                g[a * m + b] = v;
                g[b * m + a] = v;
            }
        }
        g
    }

    /// `self · x` for `x` of length `cols`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ · u` for `u` of length `rows`.
    pub fn tr_mul_vec(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &ui) in u.iter().enumerate() {
            if ui != 0.0 {
                for (o, &v) in out.iter_mut().zip(self.row(i)) {
                    *o += ui * v;
                }
            }
        }
        out
    }

    /// Rank-one matrix `a bᵀ` scaled by `alpha`.
    pub fn outer(alpha: f64, a: &[f64], b: &[f64]) -> Self {
        let mut out = Self::zeros(a.len(), b.len());
        for (i, &ai) in a.iter().enumerate() {
            let s = alpha * ai;
            for (o, &bj) in out.row_mut(i).iter_mut().zip(b) {
                *o = s * bj;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Symmetric matrix in compressed sparse row form storing both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let entries = d.iter().enumerate().map(|(i, &v)| (i, i, v));
        Self::from_sym_triplets(d.len(), entries).expect("diagonal indices are in range")
    }

    /// Builds a symmetric matrix from triplets where each off-diagonal
    /// triplet `(i, j, v)` stands for both `(i, j)` and `(j, i)`.
    /// Repeated positions are summed; entries that sum to zero are dropped.
    pub fn from_sym_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut full = Vec::new();
        for (i, j, v) in triplets {
            for idx in [i, j] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx, dim });
                }
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("SparseSymMatrix::from_sym_triplets"));
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Ok(Self::assemble(dim, full))
    }

    /// Builds from a dense row-major array; the array must be exactly
    /// symmetric.
    pub fn from_dense(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let entries = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j)));
        Self::from_sym_triplets(dim, entries.map(|(i, j)| (i, j, data[i * dim + j])))
    }

    fn assemble(dim: usize, mut full: Vec<(usize, usize, f64)>) -> Self {
        full.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(full.len());
        let mut values: Vec<f64> = Vec::with_capacity(full.len());
        let mut rows = Vec::with_capacity(full.len());
        let mut k = 0;
        while k < full.len() {
            let (i, j, mut v) = full[k];
            k += 1;
            while k < full.len() && full[k].0 == i && full[k].1 == j {
                v += full[k].2;
                k += 1;
            }
            if v != 0.0 {
                rows.push(i);
                col_idx.push(j);
                values.push(v);
            }
        }
        for &i in &rows {
            row_ptr[i + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries (both triangles).
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries `(i, j, v)` in row order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Entries with `i ≤ j`.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.iter().filter(|&(i, j, _)| i <= j)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim * self.dim];
        for (i, j, v) in self.iter() {
            out[i * self.dim + j] = v;
        }
        out
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zeros(self.dim);
        }
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= alpha;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(dot(&self.values, &self.values))
    }

    /// Checks the structural invariants: sorted, duplicate-free rows and a
    /// symmetric pattern with equal values.
    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for (&j, &v) in cols.iter().zip(vals) {
                if self.get(j, i) != v {
                    return false;
                }
            }
        }
        true
    }

    /// `y = C x` without dimension checks beyond debug assertions.
    #[inline]
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                acc += v * x[j];
            }
            *yi = acc;
        }
    }
}

/// `C x`.
pub fn symm_matvec(c: &SparseSymMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: x.len(),
        });
    }
    let mut y = vec![0.0; c.dim()];
    c.mul_vec_into(x, &mut y);
    Ok(y)
}

/// `V C`, computed one row of `V` at a time (`C` is symmetric).
pub fn dense_times_sparse(v: &DenseMat, c: &SparseSymMatrix) -> Result<DenseMat> {
    if v.cols() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: v.cols(),
        });
    }
    let mut out = DenseMat::zeros(v.rows(), v.cols());
    for i in 0..v.rows() {
        c.mul_vec_into(v.row(i), out.row_mut(i));
    }
    Ok(out)
}

/// Leading singular value with its left and right singular vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriple {
    pub sigma: f64,
    /// Unit vector of length `m`.
    pub left: Vec<f64>,
    /// Unit vector of length `p`.
    pub right: Vec<f64>,
    /// False when the iteration cap was reached first.
    pub converged: bool,
}

/// Leading singular triple of `V` by power iteration on the `m × m` Gram
/// matrix `V Vᵀ`, started from the normalized all-ones vector.
///
/// The right vector is `Vᵀu / σ` with `σ = ‖Vᵀu‖`, so `Vᵀu = σ p` holds to
/// rounding regardless of how far the iteration got.
pub fn leading_singular_triple(v: &DenseMat) -> Result<SingularTriple> {
    let gram = v.gram();
    leading_singular_triple_with_gram(v, &gram)
}

pub(crate) fn leading_singular_triple_with_gram(
    v: &DenseMat,
    gram: &[f64],
) -> Result<SingularTriple> {
    let m = v.rows();
    let trace: f64 = (0..m).map(|i| gram[i * m + i]).sum();
    if m == 0 || v.cols() == 0 || trace == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (_, left, converged) = power_iteration(m, trace, |x, y| dense_sym_mul(gram, m, x, y));
    let mut right = v.tr_mul_vec(&left);
    let sigma = norm(&right);
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(Error::ZeroMatrix);
    }
    for r in &mut right {
        *r /= sigma;
    }
    Ok(SingularTriple {
        sigma,
        left,
        right,
        converged,
    })
}

/// Second singular value of `V`, by power iteration on the Gram matrix
/// deflated with the leading left vector.
pub fn second_singular_value(v: &DenseMat, leading: &SingularTriple) -> f64 {
    let m = v.rows();
    if m < 2 {
        return 0.0;
    }
    let mut gram = v.gram();
    let lambda = leading.sigma * leading.sigma;
    let u = &leading.left;
    for a in 0..m {
        for b in 0..m {
            gram[a * m + b] -= lambda * u[a] * u[b];
        }
    }
    let scale = lambda.max(f64::MIN_POSITIVE);
    let (mu, _, _) = power_iteration(m, scale, |x, y| dense_sym_mul(&gram, m, x, y));
    libm::sqrt(mu.max(0.0))
}

/// `max_j |λ_j(C)|`.
///
/// Iterates `x ← Cx/‖Cx‖` and tracks `‖Cx‖`, which converges to the largest
/// eigenvalue magnitude even when `±λ` are both dominant. Runs from the
/// all-ones vector and again from a fixed pseudo-random vector and returns
/// the larger estimate, so an all-ones start that sits in a non-dominant
/// eigenspace (e.g. the null vector of a graph Laplacian) cannot hide the
/// answer.
pub fn spectral_norm(c: &SparseSymMatrix) -> f64 {
    let n = c.dim();
    if n == 0 || c.nnz() == 0 {
        return 0.0;
    }
    let scale = c.frobenius_norm();
    let ones = vec![1.0; n];
    let first = norm_iteration(c, ones, scale);
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let scrambled: Vec<f64> = (0..n)
        .map(|_| {
            state = splitmix64(&mut state);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let second = norm_iteration(c, scrambled, scale);
    first.max(second)
}

fn norm_iteration(c: &SparseSymMatrix, start: Vec<f64>, scale: f64) -> f64 {
    let n = c.dim();
    let mut x = start;
    normalize(&mut x);
    let mut y = vec![0.0; n];
    let mut prev = 0.0;
    let mut perturbed_at = 0usize;
    let mut mu = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        c.mul_vec_into(&x, &mut y);
        mu = norm(&y);
        if mu <= 1e-14 * scale {
            // x landed in the null space; nudge along the next basis vector.
            if perturbed_at >= n {
                return 0.0;
            }
            x[perturbed_at] += PERTURBATION;
            perturbed_at += 1;
            normalize(&mut x);
            continue;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / mu;
        }
        if (mu - prev).abs() <= POWER_REL_TOL * mu {
            break;
        }
        prev = mu;
    }
    mu
}

/// Power iteration for a symmetric positive semidefinite operator.
/// Returns (Rayleigh quotient, unit vector, converged).
fn power_iteration(
    n: usize,
    scale: f64,
    apply: impl Fn(&[f64], &mut [f64]),
) -> (f64, Vec<f64>, bool) {
    let mut u = vec![1.0 / libm::sqrt(n as f64); n];
    let mut w = vec![0.0; n];
    let mut prev = f64::NAN;
    let mut next_basis = 0usize;
    let mut nudged = false;
    let mut lambda = 0.0;
    for it in 0..POWER_MAX_ITERS {
        apply(&u, &mut w);
        lambda = dot(&u, &w);
        let nw = norm(&w);
        if nw <= 1e-14 * scale {
            if next_basis >= n {
                return (0.0, u, true);
            }
            u[next_basis] += PERTURBATION;
            next_basis += 1;
            normalize(&mut u);
            prev = f64::NAN;
            continue;
        }
        let residual_sq: f64 = u
            .iter()
            .zip(&w)
            .map(|(ui, wi)| (wi - lambda * ui) * (wi - lambda * ui))
            .sum();
        for (ui, wi) in u.iter_mut().zip(&w) {
            *ui = wi / nw;
        }
        if (lambda - prev).abs() <= POWER_REL_TOL * lambda.abs() {
            return (lambda, u, true);
        }
        if it == STALL_CHECK_ITER && !nudged && libm::sqrt(residual_sq) > 1e-6 * lambda.abs() {
            u[0] += PERTURBATION;
            normalize(&mut u);
            nudged = true;
        }
        prev = lambda;
    }
    (lambda, u, false)
}

fn dense_sym_mul(a: &[f64], n: usize, x: &[f64], y: &mut [f64]) {
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = dot(&a[i * n..(i + 1) * n], x);
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Eigenvalues of a small dense symmetric matrix (row-major `n × n`) by
/// cyclic Jacobi rotations, in ascending order.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut a = a.to_vec();
    let scale: f64 = a.iter().map(|v| v * v).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off <= 1e-30 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Singular values in descending order, by one-sided Jacobi rotations of
/// the rows. Small singular values keep their accuracy relative to the
/// largest, which squaring into a Gram matrix would lose.
pub fn singular_values(v: &DenseMat) -> Vec<f64> {
    let m = v.rows();
    let mut a = v.clone();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..m {
            for j in i + 1..m {
                let alpha = dot(a.row(i), a.row(i));
                let beta = dot(a.row(j), a.row(j));
                let gamma = dot(a.row(i), a.row(j));
                if gamma == 0.0 || gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 { 1.0 } else { -1.0 }
                    / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                let cols = a.cols();
                for k in 0..cols {
                    let x = a.get(i, k);
                    let y = a.get(j, k);
                    a.set(i, k, c * x - s * y);
                    a.set(j, k, s * x + c * y);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..m).map(|i| norm(a.row(i))).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Sum of singular values.
pub fn nuclear_norm(v: &DenseMat) -> f64 {
    singular_values(v).into_iter().sum()
}

/// Dot product with four accumulators so the loop vectorizes.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..n {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

pub(crate) fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        for v in a {
            *v /= n;
        }
    }
}
