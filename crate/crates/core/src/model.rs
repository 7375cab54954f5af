//! Objectives over the factor `V` and the reformulations that produce them.
//!
//! Every supported problem is a maximization over sign vectors whose value
//! is reported as `offset − f(xxᵀ)`, where `f` is either linear,
//! `f(X) = ⟨C, X⟩`, or a product of linear forms, `f(X) = ∏ ⟨C_i, X⟩`. The
//! solver minimizes `f̃(V) = f(VᵀV)` over unit-column `V`.
//!
//! UBQP (`max zᵀAz`, `z ∈ {0,1}ⁿ`) and product instances carry an extra
//! homogenization coordinate at index 0; a sign vector is normalized so that
//! coordinate is `+1` before it is mapped back to the original variables.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dense_times_sparse, spectral_norm, DenseMat, SparseSymMatrix};

/// `f(X) = ⟨C, X⟩` or `f(X) = ∏ᵢ ⟨Cᵢ, X⟩`.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Linear { c: SparseSymMatrix },
    Product { factors: Vec<SparseSymMatrix> },
}

/// Lipschitz estimate for `∇f̃` over the unit-column set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzInfo {
    pub l_tilde: f64,
    /// True when `l_tilde` is the exact constant rather than an upper estimate.
    pub exact: bool,
}

impl Objective {
    pub fn linear(c: SparseSymMatrix) -> Self {
        Objective::Linear { c }
    }

    pub fn product(factors: Vec<SparseSymMatrix>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::TooFewFactors(factors.len()));
        }
        let p = factors[0].dim();
        if let Some(bad) = factors.iter().find(|c| c.dim() != p) {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: bad.dim(),
            });
        }
        Ok(Objective::Product { factors })
    }

    /// Side length `p` of `X`.
    pub fn dim(&self) -> usize {
        match self {
            Objective::Linear { c } => c.dim(),
            Objective::Product { factors } => factors[0].dim(),
        }
    }

    fn check(&self, v: &DenseMat) -> Result<()> {
        if v.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.cols(),
            });
        }
        Ok(())
    }

    /// `f̃(V) = f(VᵀV)`.
    pub fn value(&self, v: &DenseMat) -> Result<f64> {
        self.check(v)?;
        Ok(match self {
            Objective::Linear { c } => trace_form(v, c),
            Objective::Product { factors } => factors.iter().map(|c| trace_form(v, c)).product(),
        })
    }

    /// `∇f̃(V) = 2 V ∇f(VᵀV)`.
    pub fn gradient(&self, v: &DenseMat) -> Result<DenseMat> {
        self.value_and_gradient(v).map(|(_, g)| g)
    }

    pub fn value_and_gradient(&self, v: &DenseMat) -> Result<(f64, DenseMat)> {
        self.check(v)?;
        match self {
            Objective::Linear { c } => {
                let mut vc = dense_times_sparse(v, c)?;
                let value = v.frobenius_dot(&vc);
                vc.scale(2.0);
                Ok((value, vc))
            }
            Objective::Product { factors } => {
                let products: Vec<DenseMat> = factors
                    .iter()
                    .map(|c| dense_times_sparse(v, c))
                    .collect::<Result<_>>()?;
                let forms: Vec<f64> = products.iter().map(|vc| v.frobenius_dot(vc)).collect();
                let weights = leave_one_out_products(&forms);
                let mut grad = DenseMat::zeros(v.rows(), v.cols());
                for (vc, w) in products.iter().zip(&weights) {
                    grad.axpy(2.0 * w, vc);
                }
                Ok((forms.iter().product(), grad))
            }
        }
    }

    /// `f(xxᵀ)`.
    pub fn value_at_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(match self {
            Objective::Linear { c } => quadratic_form(c, x),
            Objective::Product { factors } => {
                factors.iter().map(|c| quadratic_form(c, x)).product()
            }
        })
    }

    /// `2‖C‖` for linear objectives; `6p(‖C₁‖‖C₂‖_F + ‖C₁‖_F‖C₂‖)` for
    /// two-factor products.
    pub fn lipschitz(&self) -> Result<LipschitzInfo> {
        match self {
            Objective::Linear { c } => Ok(LipschitzInfo {
                l_tilde: 2.0 * spectral_norm(c),
                exact: true,
            }),
            Objective::Product { factors } if factors.len() == 2 => {
                let (c1, c2) = (&factors[0], &factors[1]);
                let p = c1.dim() as f64;
                let l = 6.0
                    * p
                    * (spectral_norm(c1) * c2.frobenius_norm()
                        + c1.frobenius_norm() * spectral_norm(c2));
                Ok(LipschitzInfo {
                    l_tilde: l,
                    exact: false,
                })
            }
            Objective::Product { factors } => Err(Error::UnsupportedFactorCount(factors.len())),
        }
    }

    /// Scale used in the inner stopping rule: `‖C‖_F`, or `maxᵢ ‖Cᵢ‖_F`.
    pub fn eta(&self) -> f64 {
        match self {
            Objective::Linear { c } => c.frobenius_norm(),
            Objective::Product { factors } => factors
                .iter()
                .map(SparseSymMatrix::frobenius_norm)
                .fold(0.0, f64::max),
        }
    }

    /// A Lipschitz constant of `f` on `{X ⪰ 0, diag(X) = e}`: `‖C‖_F` for
    /// linear objectives and `q p^{q−1} ∏ ‖Cᵢ‖_F` for products (using
    /// `‖X‖_F ≤ p`). Not claimed to be tight.
    pub fn alpha_f(&self) -> f64 {
        match self {
            Objective::Linear { c } => c.frobenius_norm(),
            Objective::Product { factors } => {
                let q = factors.len() as f64;
                let p = self.dim() as f64;
                let prod: f64 = factors
                    .iter()
                    .map(SparseSymMatrix::frobenius_norm)
                    .product();
                q * libm::pow(p, q - 1.0) * prod
            }
        }
    }
}

/// `⟨C, VᵀV⟩ = trace(V C Vᵀ)`, one row of `V` at a time.
fn trace_form(v: &DenseMat, c: &SparseSymMatrix) -> f64 {
    let mut buf = vec![0.0; c.dim()];
    let mut total = 0.0;
    for i in 0..v.rows() {
        let row = v.row(i);
        c.mul_vec_into(row, &mut buf);
        total += crate::linalg::dot(row, &buf);
    }
    total
}

fn quadratic_form(c: &SparseSymMatrix, x: &[f64]) -> f64 {
    c.iter().map(|(i, j, v)| v * x[i] * x[j]).sum()
}

/// `wᵢ = ∏_{j≠i} sⱼ` without dividing (a factor may be zero).
fn leave_one_out_products(s: &[f64]) -> Vec<f64> {
    let q = s.len();
    let mut out = vec![1.0; q];
    let mut prefix = 1.0;
    for i in 0..q {
        out[i] = prefix;
        prefix *= s[i];
    }
    let mut suffix = 1.0;
    for i in (0..q).rev() {
        out[i] *= suffix;
        suffix *= s[i];
    }
    out
}

/// Weighted graph as an edge list, 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeList {
    /// Symmetric weight matrix with duplicate edges summed.
    pub fn weight_matrix(&self) -> Result<SparseSymMatrix> {
        if let Some(&(i, _, _)) = self.edges.iter().find(|(i, j, _)| i == j) {
            return Err(Error::NonzeroDiagonal { index: i });
        }
        SparseSymMatrix::from_sym_triplets(self.n, self.edges.iter().copied())
    }

    pub fn from_weight_matrix(w: &SparseSymMatrix) -> Self {
        Self {
            n: w.dim(),
            edges: w.iter().filter(|&(i, j, _)| i < j).collect(),
        }
    }
}

/// One factor `xᵢᵀQᵢxᵢ + cᵢᵀxᵢ + aᵢ` of a product objective.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductFactor {
    pub q: SparseSymMatrix,
    pub c: Vec<f64>,
    pub a: f64,
}

/// Raw problem data, kept for serialization and direct evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// Max-cut with symmetric, zero-diagonal weights.
    MaxCut { weights: SparseSymMatrix },
    /// `max zᵀAz` over `z ∈ {0,1}ⁿ`.
    Ubqp { a: SparseSymMatrix },
    /// `max −∏ᵢ (xᵢᵀQᵢxᵢ + cᵢᵀxᵢ + aᵢ)` over `xᵢ ∈ {−1,1}ⁿ`.
    Product { factors: Vec<ProductFactor> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    MaxCut,
    Ubqp,
    Product,
}

/// A problem together with its objective `f`. The reported value of a sign
/// vector `x` is `objective_offset − f(xxᵀ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub problem: Problem,
    pub known_best: Option<f64>,
    pub objective_offset: f64,
    pub n_binary: usize,
    objective: Objective,
}

impl Instance {
    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn kind(&self) -> ProblemKind {
        match self.problem {
            Problem::MaxCut { .. } => ProblemKind::MaxCut,
            Problem::Ubqp { .. } => ProblemKind::Ubqp,
            Problem::Product { .. } => ProblemKind::Product,
        }
    }

    /// Whether index 0 is a homogenization coordinate.
    pub fn is_homogenized(&self) -> bool {
        !matches!(self.problem, Problem::MaxCut { .. })
    }

    /// Side length `p` of the lifted matrix.
    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_known_best(mut self, best: Option<f64>) -> Self {
        self.known_best = best;
        self
    }

    /// Objective of the original problem at a sign vector `x ∈ {−1,1}^p`.
    pub fn objective_at_binary(&self, x: &[f64]) -> Result<f64> {
        if let Some(index) = x.iter().position(|v| v.abs() != 1.0) {
            return Err(Error::NotBinary { index });
        }
        self.objective_at_point(x)
    }

    /// `offset − f(xxᵀ)` at an arbitrary real vector, after the
    /// homogenization sign normalization. For sign vectors this is the
    /// original objective.
    pub fn objective_at_point(&self, x: &[f64]) -> Result<f64> {
        let fx = if self.is_homogenized() && x.first().is_some_and(|&x0| x0 < 0.0) {
            let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
            self.objective.value_at_point(&flipped)?
        } else {
            self.objective.value_at_point(x)?
        };
        Ok(self.objective_offset - fx)
    }

    /// For UBQP: the 0/1 vector `z` encoded by a sign vector.
    pub fn ubqp_assignment(&self, x: &[f64]) -> Option<Vec<u8>> {
        if !matches!(self.problem, Problem::Ubqp { .. }) || x.is_empty() {
            return None;
        }
        let s = if x[0] < 0.0 { -1.0 } else { 1.0 };
        Some(x[1..].iter().map(|&v| u8::from(s * v > 0.0)).collect())
    }
}

/// `max zᵀAz, z ∈ {0,1}ⁿ` as `min ⟨C, X⟩` with `p = n + 1` and
/// `C = −¼ [[0, (Ae)ᵀ], [Ae, A]]`; the offset is `¼ eᵀAe`.
pub fn build_ubqp(a: &SparseSymMatrix) -> Result<Instance> {
    let n = a.dim();
    let mut row_sums = vec![0.0; n];
    for (i, _, v) in a.iter() {
        row_sums[i] += v;
    }
    let total: f64 = row_sums.iter().sum();
    let border = row_sums
        .iter()
        .enumerate()
        .map(|(j, &s)| (0, j + 1, -0.25 * s));
    let inner = a
        .upper_triplets()
        .map(|(i, j, v)| (i + 1, j + 1, -0.25 * v));
    let c = SparseSymMatrix::from_sym_triplets(n + 1, border.chain(inner))?;
    Ok(Instance {
        name: String::new(),
        problem: Problem::Ubqp { a: a.clone() },
        known_best: None,
        objective_offset: 0.25 * total,
        n_binary: n,
        objective: Objective::linear(c),
    })
}

/// Max-cut as `min ⟨C, X⟩` with `C = (W − diag(We))/4`.
pub fn build_maxcut(w: &SparseSymMatrix) -> Result<Instance> {
    let n = w.dim();
    if let Some(index) = (0..n).find(|&i| w.get(i, i) != 0.0) {
        return Err(Error::NonzeroDiagonal { index });
    }
    let mut degree = vec![0.0; n];
    for (i, _, v) in w.iter() {
        degree[i] += v;
    }
    let off = w.upper_triplets().map(|(i, j, v)| (i, j, 0.25 * v));
    let diag = degree.iter().enumerate().map(|(i, &d)| (i, i, -0.25 * d));
    let c = SparseSymMatrix::from_sym_triplets(n, off.chain(diag))?;
    Ok(Instance {
        name: String::new(),
        problem: Problem::MaxCut { weights: w.clone() },
        known_best: None,
        objective_offset: 0.0,
        n_binary: n,
        objective: Objective::linear(c),
    })
}

/// Product of `q ≥ 2` quadratics over `p = nq + 1`: factor `i` becomes
/// `Cᵢ = [[aᵢ, bᵢᵀ], [bᵢ, Bᵢ]]` with `cᵢ/2` placed in block `i` of `bᵢ`
/// and `Qᵢ` in diagonal block `i` of `Bᵢ`.
pub fn build_product(factors: Vec<ProductFactor>) -> Result<Instance> {
    let q = factors.len();
    if q < 2 {
        return Err(Error::TooFewFactors(q));
    }
    let n = factors[0].q.dim();
    for f in &factors {
        if f.q.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.q.dim(),
            });
        }
        if f.c.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.c.len(),
            });
        }
    }
    let p = n * q + 1;
    let mut mats = Vec::with_capacity(q);
    for (i, f) in factors.iter().enumerate() {
        let base = 1 + n * i;
        let corner = core::iter::once((0, 0, f.a));
        let border =
            f.c.iter()
                .enumerate()
                .map(|(k, &ck)| (0, base + k, 0.5 * ck));
        let block =
            f.q.upper_triplets()
                .map(|(r, s, v)| (base + r, base + s, v));
        mats.push(SparseSymMatrix::from_sym_triplets(
            p,
            corner.chain(border).chain(block),
        )?);
    }
    Ok(Instance {
        name: String::new(),
        problem: Problem::Product { factors },
        known_best: None,
        objective_offset: 0.0,
        n_binary: n * q,
        objective: Objective::product(mats)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::NormalRng;

    fn sym(n: usize, data: &[f64]) -> SparseSymMatrix {
        SparseSymMatrix::from_dense(n, data).unwrap()
    }

    fn lin_c(inst: &Instance) -> &SparseSymMatrix {
        match inst.objective() {
            Objective::Linear { c } => c,
            _ => panic!("expected linear objective"),
        }
    }

    #[test]
    fn ubqp_one_variable() {
        let inst = build_ubqp(&sym(1, &[2.0])).unwrap();
        assert_eq!(lin_c(&inst).to_dense(), vec![0.0, -0.5, -0.5, -0.5]);
        assert_eq!(inst.objective_offset, 0.5);
        assert_eq!(inst.n_binary, 1);
        assert_eq!(inst.objective_at_binary(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(inst.objective_at_binary(&[-1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(inst.objective_at_binary(&[1.0, -1.0]).unwrap(), 0.0);
    }

    #[test]
    fn ubqp_zero_and_offdiagonal() {
        let zero = build_ubqp(&SparseSymMatrix::zeros(2)).unwrap();
        assert_eq!(lin_c(&zero).nnz(), 0);
        assert_eq!(zero.objective_offset, 0.0);

        let inst = build_ubqp(&sym(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let q = -0.25;
        assert_eq!(
            lin_c(&inst).to_dense(),
            vec![0.0, q, q, q, 0.0, q, q, q, 0.0]
        );
        assert_eq!(inst.objective_offset, 0.5);
    }

    #[test]
    fn maxcut_single_edge() {
        let inst = build_maxcut(&sym(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(lin_c(&inst).to_dense(), vec![-0.25, 0.25, 0.25, -0.25]);
        assert_eq!(inst.objective_at_binary(&[1.0, -1.0]).unwrap(), 1.0);
        assert_eq!(inst.objective_at_binary(&[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn maxcut_zero_and_triangle() {
        let zero = build_maxcut(&SparseSymMatrix::zeros(3)).unwrap();
        assert_eq!(zero.objective_at_binary(&[1.0, -1.0, 1.0]).unwrap(), 0.0);

        let tri = build_maxcut(&sym(3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0])).unwrap();
        let expected: Vec<f64> = (0..3)
            .flat_map(|i| (0..3).map(move |j| if i == j { -0.5 } else { 0.25 }))
            .collect();
        assert_eq!(lin_c(&tri).to_dense(), expected);
        let mut best = f64::MIN;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3)
                .map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            best = best.max(tri.objective_at_binary(&x).unwrap());
        }
        assert_eq!(best, 2.0);
    }

    #[test]
    fn maxcut_rejects_diagonal() {
        assert_eq!(
            build_maxcut(&SparseSymMatrix::diagonal(&[0.0, 1.0])).unwrap_err(),
            Error::NonzeroDiagonal { index: 1 }
        );
    }

    #[test]
    fn product_block_placement() {
        let f1 = ProductFactor {
            q: sym(1, &[1.0]),
            c: vec![0.0],
            a: 0.0,
        };
        let f2 = ProductFactor {
            q: sym(1, &[0.0]),
            c: vec![2.0],
            a: 0.0,
        };
        let inst = build_product(vec![f1, f2]).unwrap();
        let Objective::Product { factors } = inst.objective() else {
            panic!()
        };
        assert_eq!(inst.dim(), 3);
        assert_eq!(inst.n_binary, 2);
        assert_eq!(factors[0].get(1, 1), 1.0);
        assert_eq!(factors[0].nnz(), 1);
        assert_eq!(factors[1].get(0, 2), 1.0);
        assert_eq!(factors[1].get(2, 0), 1.0);
        assert_eq!(factors[1].nnz(), 2);
    }

    #[test]
    fn product_constant_and_zero() {
        let constant = |a| ProductFactor {
            q: SparseSymMatrix::zeros(1),
            c: vec![0.0],
            a,
        };
        let inst = build_product(vec![constant(1.0), constant(1.0)]).unwrap();
        let v = DenseMat::from_fn(2, 3, |i, _| if i == 0 { 1.0 } else { 0.0 });
        assert_eq!(inst.objective().value(&v).unwrap(), 1.0);
        let zero = build_product(vec![constant(0.0), constant(0.0)]).unwrap();
        assert_eq!(zero.objective().value(&v).unwrap(), 0.0);
        assert_eq!(zero.objective_at_binary(&[1.0, -1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn product_errors() {
        let f = |n: usize| ProductFactor {
            q: SparseSymMatrix::zeros(n),
            c: vec![0.0; n],
            a: 0.0,
        };
        assert_eq!(
            build_product(vec![f(2)]).unwrap_err(),
            Error::TooFewFactors(1)
        );
        assert!(matches!(
            build_product(vec![f(2), f(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn f_value_examples() {
        let v = DenseMat::from_fn(2, 4, |i, j| if (i + j) % 2 == 0 { 1.0 } else { 0.0 });
        let id = Objective::linear(SparseSymMatrix::identity(4));
        assert_eq!(id.value(&v).unwrap(), 4.0);

        let c = sym(2, &[-0.25, 0.25, 0.25, -0.25]);
        let v = DenseMat::from_row_major(1, 2, vec![1.0, -1.0]).unwrap();
        assert_eq!(Objective::linear(c).value(&v).unwrap(), -1.0);

        let zero_factor = Objective::product(vec![
            SparseSymMatrix::identity(2),
            SparseSymMatrix::zeros(2),
        ])
        .unwrap();
        assert_eq!(zero_factor.value(&v).unwrap(), 0.0);
        assert!(zero_factor.value(&DenseMat::zeros(1, 3)).is_err());
    }

    #[test]
    fn gradient_closed_forms() {
        let v = DenseMat::from_fn(3, 4, |i, j| (i * 4 + j) as f64 * 0.1 - 0.5);
        let id = Objective::linear(SparseSymMatrix::identity(4));
        let mut twice = v.clone();
        twice.scale(2.0);
        assert_eq!(id.gradient(&v).unwrap(), twice);
        assert_eq!(
            id.gradient(&DenseMat::zeros(3, 4)).unwrap(),
            DenseMat::zeros(3, 4)
        );
    }

    #[test]
    fn product_gradient_weights_factors() {
        // V = [1, 0]: X = e₁e₁ᵀ, ⟨C₁,X⟩ = 3, ⟨C₂,X⟩ = 5
        let c1 = sym(2, &[3.0, 1.0, 1.0, 0.0]);
        let c2 = sym(2, &[5.0, -1.0, -1.0, 2.0]);
        let obj = Objective::product(vec![c1.clone(), c2.clone()]).unwrap();
        let v = DenseMat::from_row_major(1, 2, vec![1.0, 0.0]).unwrap();
        let (value, grad) = obj.value_and_gradient(&v).unwrap();
        assert_eq!(value, 15.0);
        // 2V(5C₁ + 3C₂) = 2·[15+15, 5−3] = [60, 4]
        assert_eq!(grad.as_slice(), &[60.0, 4.0]);
    }

    #[test]
    fn lipschitz_examples() {
        let l = Objective::linear(SparseSymMatrix::identity(4))
            .lipschitz()
            .unwrap();
        assert!((l.l_tilde - 2.0).abs() < 1e-12 && l.exact);
        let l = Objective::linear(sym(2, &[0.0, 1.0, 1.0, 0.0]))
            .lipschitz()
            .unwrap();
        assert!((l.l_tilde - 2.0).abs() < 1e-12);
        let prod = Objective::product(vec![SparseSymMatrix::identity(3); 2]).unwrap();
        let l = prod.lipschitz().unwrap();
        assert!((l.l_tilde - 36.0 * libm::sqrt(3.0)).abs() < 1e-9);
        assert!(!l.exact);
        let three = Objective::product(vec![SparseSymMatrix::identity(3); 3]).unwrap();
        assert_eq!(
            three.lipschitz().unwrap_err(),
            Error::UnsupportedFactorCount(3)
        );
    }

    #[test]
    fn objective_at_binary_rejects_non_signs() {
        let inst = build_ubqp(&sym(1, &[2.0])).unwrap();
        assert_eq!(
            inst.objective_at_binary(&[1.0, 0.5]).unwrap_err(),
            Error::NotBinary { index: 1 }
        );
    }

    #[test]
    fn ubqp_homogenization_matches_direct_evaluation() {
        let mut rng = NormalRng::seed_from_u64(3);
        for n in 1..=8 {
            let mut dense = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = (rng.uniform() * 10.0 - 5.0).round();
                    dense[i * n + j] = v;
                    dense[j * n + i] = v;
                }
            }
            let inst = build_ubqp(&sym(n, &dense)).unwrap();
            for mask in 0..(1u32 << n) {
                let z: Vec<f64> = (0..n).map(|k| f64::from(mask >> k & 1)).collect();
                let direct: f64 = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| z[i] * dense[i * n + j] * z[j])
                    .sum();
                let mut x = vec![1.0];
                x.extend(z.iter().map(|&zk| 2.0 * zk - 1.0));
                assert!((inst.objective_at_binary(&x).unwrap() - direct).abs() <= 1e-9);
                assert_eq!(
                    inst.ubqp_assignment(&x).unwrap(),
                    z.iter().map(|&v| v as u8).collect::<Vec<_>>()
                );
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                assert_eq!(
                    inst.objective_at_binary(&neg).unwrap(),
                    inst.objective_at_binary(&x).unwrap()
                );
            }
        }
    }

    #[test]
    fn edge_list_roundtrip() {
        let el = EdgeList {
            n: 3,
            edges: vec![(0, 1, 1.0), (1, 2, 2.0), (1, 0, 0.5)],
        };
        let w = el.weight_matrix().unwrap();
        assert_eq!(w.get(0, 1), 1.5);
        let back = EdgeList::from_weight_matrix(&w);
        assert_eq!(back.edges, vec![(0, 1, 1.5), (1, 2, 2.0)]);
        let looped = EdgeList {
            n: 2,
            edges: vec![(1, 1, 1.0)],
        };
        assert_eq!(
            looped.weight_matrix().unwrap_err(),
            Error::NonzeroDiagonal { index: 1 }
        );
    }
}
