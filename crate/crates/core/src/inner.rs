//! Inner solver for a fixed penalty weight `ρ`:
//!
//! ```text
//! min f̃(V) + ρ(‖V‖_F² − ‖V‖²)  over V with unit-norm columns
//! ```
//!
//! Each step linearizes the concave part `−‖V‖²` at the current iterate
//! (subgradient `Γ = −2V p₁p₁ᵀ`), majorizes `f̃` around an extrapolated
//! point `U`, and minimizes the result in closed form: a per-column
//! normalization of `L·U − ρΓ − ∇f̃(U)`.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::{leading_singular_triple, nuclear_norm, DenseMat, SingularTriple};
use crate::model::Objective;

/// Columns within this distance of unit norm count as on the manifold.
pub const UNIT_COLUMN_TOL: f64 = 1e-12;
/// Maximum number of doublings tried by [`search_l`].
pub const MAX_DOUBLINGS: usize = 60;

/// An `m × p` matrix whose columns all have unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMatrix(DenseMat);

impl FactorMatrix {
    /// Wraps `v`, checking every column norm.
    pub fn new(v: DenseMat) -> Result<Self> {
        if !on_manifold(&v) {
            return Err(Error::InvalidConfig("factor columns must have unit norm"));
        }
        Ok(Self(v))
    }

    /// Divides each column by its norm; an exactly zero column becomes `e₁`.
    pub fn normalized(mut v: DenseMat) -> Self {
        let norms: Vec<f64> = v.column_norms_sq().into_iter().map(libm::sqrt).collect();
        let p = v.cols();
        let data = v.as_mut_slice();
        for (idx, x) in data.iter_mut().enumerate() {
            let (i, j) = (idx / p, idx % p);
            *x = if norms[j] == 0.0 {
                if i == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                *x / norms[j]
            };
        }
        Self(v)
    }

    /// `u eᵀ` for a unit vector `u`.
    pub fn rank_one(u: &[f64], p: usize) -> Result<Self> {
        Self::new(DenseMat::from_fn(u.len(), p, |i, _| u[i]))
    }

    pub fn as_mat(&self) -> &DenseMat {
        &self.0
    }

    pub fn into_inner(self) -> DenseMat {
        self.0
    }
}

impl Deref for FactorMatrix {
    type Target = DenseMat;

    fn deref(&self) -> &DenseMat {
        &self.0
    }
}

fn on_manifold(v: &DenseMat) -> bool {
    v.column_norms_sq()
        .into_iter()
        .all(|n2| (libm::sqrt(n2) - 1.0).abs() <= UNIT_COLUMN_TOL)
}

/// The linearization `Γ = −2V p₁p₁ᵀ` together with the singular triple it
/// was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Subgradient {
    pub gamma: DenseMat,
    pub triple: SingularTriple,
}

impl Subgradient {
    /// `(−ψ)*(−Γ) = ¼‖Γ‖_*²`. `Γ` is rank one, so the nuclear norm is the
    /// Frobenius norm.
    pub fn conjugate(&self) -> f64 {
        0.25 * self.gamma.frobenius_norm_sq()
    }
}

pub fn choose_gamma(v: &DenseMat) -> Result<Subgradient> {
    let triple = leading_singular_triple(v)?;
    let vp = v.mul_vec(&triple.right);
    Ok(Subgradient {
        gamma: DenseMat::outer(-2.0, &vp, &triple.right),
        triple,
    })
}

/// Closed-form minimizer over unit-column `V` of
/// `⟨∇f̃(U), V⟩ + (L/2)‖V − U‖² + ρ‖V‖_F² + ρ⟨Γ, V⟩`.
pub fn mm_step(
    u: &DenseMat,
    gamma: &DenseMat,
    grad_u: &DenseMat,
    l: f64,
    rho: f64,
) -> FactorMatrix {
    debug_assert!(u.same_shape(gamma) && u.same_shape(grad_u));
    let denom = l + 2.0 * rho;
    let mut g = DenseMat::zeros(u.rows(), u.cols());
    for (((gi, ui), ci), di) in g
        .as_mut_slice()
        .iter_mut()
        .zip(u.as_slice())
        .zip(gamma.as_slice())
        .zip(grad_u.as_slice())
    {
        *gi = (l * ui - rho * ci - di) / denom;
    }
    FactorMatrix::normalized(g)
}

/// Nesterov's `t` recurrence; `β = (t − 1)/t_next`, uncapped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub t: f64,
}

impl Default for Extrapolation {
    fn default() -> Self {
        Self { t: 1.0 }
    }
}

impl Extrapolation {
    pub fn next_beta(&mut self) -> f64 {
        let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * self.t * self.t));
        let beta = (self.t - 1.0) / t_next;
        self.t = t_next;
        beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMode {
    #[default]
    Nesterov,
    Zero,
}

/// Relative slack in the descent-lemma test so that exact-arithmetic
/// equality is not rejected by rounding.
const DESCENT_SLACK: f64 = 1e-12;

fn descent_holds(f_next: f64, f_u: f64, lin: f64, l: f64, dist_sq: f64) -> bool {
    let rhs = f_u + lin + 0.5 * l * dist_sq;
    f_next <= rhs + DESCENT_SLACK * (1.0 + f_u.abs())
}

/// Smallest `L ∈ {L_init·2^j}` for which the MM step from `U` satisfies the
/// descent lemma. Returns `(L, V_next, f̃(V_next), ∇f̃(V_next))`.
fn search_l_with(
    obj: &Objective,
    u: &DenseMat,
    f_u: f64,
    grad_u: &DenseMat,
    rho: f64,
    gamma: &DenseMat,
    l_init: f64,
) -> Result<(f64, FactorMatrix, f64, DenseMat)> {
    let mut l = l_init;
    for _ in 0..=MAX_DOUBLINGS {
        let v = mm_step(u, gamma, grad_u, l, rho);
        let (f_next, grad_next) = obj.value_and_gradient(&v)?;
        let mut diff = v.as_mat().clone();
        diff.axpy(-1.0, u);
        let lin = grad_u.frobenius_dot(&diff);
        if descent_holds(f_next, f_u, lin, l, diff.frobenius_norm_sq()) {
            return Ok((l, v, f_next, grad_next));
        }
        l *= 2.0;
    }
    Err(Error::LineSearchExhausted(MAX_DOUBLINGS))
}

/// Descent-lemma search for the majorization constant at `U`.
pub fn search_l(
    obj: &Objective,
    u: &DenseMat,
    rho: f64,
    gamma: &DenseMat,
    l_init: f64,
) -> Result<(f64, FactorMatrix)> {
    if !(l_init > 0.0) {
        return Err(Error::InvalidConfig("initial L must be positive"));
    }
    let (f_u, grad_u) = obj.value_and_gradient(u)?;
    search_l_with(obj, u, f_u, &grad_u, rho, gamma, l_init).map(|(l, v, _, _)| (l, v))
}

/// `‖∇f̃(V⁺) − ∇f̃(U) − L(V⁺ − U) + ρ(Γ⁺ − Γ)‖_F`.
#[allow(clippy::too_many_arguments)]
pub fn inner_residual(
    v_next: &DenseMat,
    u: &DenseMat,
    gamma_next: &DenseMat,
    gamma: &DenseMat,
    grad_next: &DenseMat,
    grad_u: &DenseMat,
    l: f64,
    rho: f64,
) -> f64 {
    let mut acc = 0.0;
    for k in 0..v_next.as_slice().len() {
        let r = grad_next.as_slice()[k]
            - grad_u.as_slice()[k]
            - l * (v_next.as_slice()[k] - u.as_slice()[k])
            + rho * (gamma_next.as_slice()[k] - gamma.as_slice()[k]);
        acc += r * r;
    }
    libm::sqrt(acc)
}

/// `(−ψ)*(Γ) = ¼‖Γ‖_*²` for any `Γ`.
pub fn conjugate_neg_psi(gamma: &DenseMat) -> f64 {
    if gamma.rows() == 0 {
        return 0.0;
    }
    let nuc = nuclear_norm(gamma);
    0.25 * nuc * nuc
}

/// Potential `f̃(V) + ρ‖V‖_F² + ρ⟨Γ,V⟩ + ρ(−ψ)*(−Γ) + (γL̲/2)‖V − U‖²`,
/// or `+∞` when `V` is off the manifold. `prox_weight` is `γL̲/2`.
pub fn potential_theta(
    obj: &Objective,
    v: &DenseMat,
    gamma: &DenseMat,
    u: &DenseMat,
    rho: f64,
    prox_weight: f64,
) -> Result<f64> {
    if !on_manifold(v) {
        return Ok(f64::INFINITY);
    }
    let f = obj.value(v)?;
    let p = v.cols() as f64;
    Ok(theta_terms(
        f,
        p,
        gamma.frobenius_dot(v),
        conjugate_neg_psi(gamma),
        rho,
        prox_weight * v.dist_sq(u),
    ))
}

fn theta_terms(f: f64, p: f64, gamma_dot_v: f64, conj: f64, rho: f64, prox: f64) -> f64 {
    f + rho * p + rho * gamma_dot_v + rho * conj + prox
}

/// How the majorization constant `L` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepPolicy {
    /// Constant `L`; `l_tilde` is the exact Lipschitz constant of `∇f̃`
    /// when known (it sets the weight of the proximal term in the potential).
    Fixed { l: f64, l_tilde: Option<f64> },
    /// Descent-lemma search started from the last accepted value (halved
    /// at each outer iteration) and never above `cap`.
    Search { cap: f64, last: Option<f64> },
}

impl StepPolicy {
    /// `2.001‖C‖` for linear objectives (1 when `C = 0`); a warm-started
    /// search capped at the Lipschitz estimate for products.
    pub fn for_objective(obj: &Objective) -> Result<Self> {
        let lip = obj.lipschitz()?;
        Ok(match obj {
            Objective::Linear { .. } => {
                let l = if lip.l_tilde > 0.0 {
                    1.0005 * lip.l_tilde
                } else {
                    1.0
                };
                StepPolicy::Fixed {
                    l,
                    l_tilde: Some(lip.l_tilde),
                }
            }
            Objective::Product { .. } => StepPolicy::Search {
                cap: if lip.l_tilde > 0.0 { lip.l_tilde } else { 1.0 },
                last: None,
            },
        })
    }

    fn begin_outer(&mut self) {
        if let StepPolicy::Search { last: Some(l), .. } = self {
            *l *= 0.5;
        }
    }

    fn initial(&self) -> f64 {
        match *self {
            StepPolicy::Fixed { l, .. } => l,
            StepPolicy::Search { cap, last } => last.map_or(cap, |l| l.min(cap)),
        }
    }

    /// `γL̲/2` with `γ = (L̲ − L̃)/(4L̲)`; zero without an exact `L̃`.
    pub fn prox_weight(&self) -> f64 {
        match *self {
            StepPolicy::Fixed {
                l,
                l_tilde: Some(lt),
            } => ((l - lt) / 8.0).max(0.0),
            _ => 0.0,
        }
    }
}

/// Loop controls of the inner solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    pub beta_mode: BetaMode,
    pub tau0: f64,
    pub tau_min: f64,
    pub tau_decay: f64,
    /// Iteration cap while the incoming rank-one gap exceeds `far_gap`.
    pub k_max_far: usize,
    pub k_max_near: usize,
    pub far_gap: f64,
    pub record_trace: bool,
}

impl Default for InnerConfig {
    fn default() -> Self {
        Self {
            beta_mode: BetaMode::Nesterov,
            tau0: 0.005,
            tau_min: 1e-5,
            tau_decay: 0.995,
            k_max_far: 3,
            k_max_near: 3000,
            far_gap: 1.0,
            record_trace: false,
        }
    }
}

/// Per-iteration record. The first point describes the start (its
/// residual is 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerTracePoint {
    pub k: usize,
    pub f_tilde: f64,
    pub spec_norm_sq: f64,
    pub merit: f64,
    pub residual: f64,
    pub theta: f64,
    pub l: f64,
}

#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub v: FactorMatrix,
    /// Subgradient at `v`; its triple gives `‖v‖`.
    pub subgradient: Subgradient,
    pub f_tilde: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Set when `stop` requested an early return.
    pub interrupted: bool,
    pub trace: Vec<InnerTracePoint>,
}

/// Rank-one gap `p − σ₁²`, clamped at zero.
pub fn gap_from_sigma(p: usize, sigma: f64) -> f64 {
    (p as f64 - sigma * sigma).max(0.0)
}

/// Runs the extrapolated MM iteration from `v_start` at weight `rho`.
/// `stop` is polled between iterations.
pub fn solve_inner(
    obj: &Objective,
    v_start: FactorMatrix,
    rho: f64,
    policy: &mut StepPolicy,
    cfg: &InnerConfig,
    stop: &mut dyn FnMut() -> bool,
) -> Result<InnerOutcome> {
    if !(rho > 0.0) {
        return Err(Error::InvalidConfig("rho must be positive"));
    }
    let p = v_start.cols();
    let eta_scale = obj.eta().max(1.0);
    let prox_weight = policy.prox_weight();
    policy.begin_outer();

    let mut sub = choose_gamma(&v_start)?;
    let k_max = if gap_from_sigma(p, sub.triple.sigma) > cfg.far_gap {
        cfg.k_max_far
    } else {
        cfg.k_max_near
    };
    let (mut f_curr, mut grad_curr) = obj.value_and_gradient(&v_start)?;
    let mut v_prev = v_start.clone();
    let mut v_curr = v_start;
    let mut extrap = Extrapolation::default();
    let mut tau = cfg.tau0;
    let l_start = policy.initial();
    let mut trace = Vec::new();
    if cfg.record_trace {
        let s2 = sub.triple.sigma * sub.triple.sigma;
        trace.push(InnerTracePoint {
            k: 0,
            f_tilde: f_curr,
            spec_norm_sq: s2,
            merit: f_curr - rho * s2,
            residual: 0.0,
            theta: f_curr + rho * p as f64 - rho * s2,
            l: l_start,
        });
    }

    let mut k = 0;
    let mut residual = f64::INFINITY;
    let mut interrupted = false;
    loop {
        if stop() {
            interrupted = true;
            break;
        }
        let beta = match cfg.beta_mode {
            BetaMode::Nesterov => extrap.next_beta(),
            BetaMode::Zero => 0.0,
        };
        let extrapolated;
        let (u, f_u, grad_u) = if beta == 0.0 {
            (v_curr.as_mat(), f_curr, &grad_curr)
        } else {
            let mut w = v_curr.as_mat().clone();
            w.scale(1.0 + beta);
            w.axpy(-beta, &v_prev);
            let (fw, gw) = obj.value_and_gradient(&w)?;
            extrapolated = (w, fw, gw);
            (&extrapolated.0, extrapolated.1, &extrapolated.2)
        };

        let (l, v_next, f_next, grad_next) = match *policy {
            StepPolicy::Fixed { l, .. } => {
                let v = mm_step(u, &sub.gamma, grad_u, l, rho);
                let (f, g) = obj.value_and_gradient(&v)?;
                (l, v, f, g)
            }
            StepPolicy::Search { .. } => {
                search_l_with(obj, u, f_u, grad_u, rho, &sub.gamma, policy.initial())?
            }
        };
        if let StepPolicy::Search { last, .. } = policy {
            *last = Some(l);
        }
        if !grad_next.is_finite() || !f_next.is_finite() {
            return Err(Error::NonFinite("inner iteration"));
        }

        let sub_next = choose_gamma(&v_next)?;
        residual = inner_residual(
            &v_next,
            u,
            &sub_next.gamma,
            &sub.gamma,
            &grad_next,
            grad_u,
            l,
            rho,
        );

        if cfg.record_trace {
            let s2 = sub_next.triple.sigma * sub_next.triple.sigma;
            let prox = prox_weight * v_next.dist_sq(&v_curr);
            trace.push(InnerTracePoint {
                k: k + 1,
                f_tilde: f_next,
                spec_norm_sq: s2,
                merit: f_next - rho * s2,
                residual,
                theta: theta_terms(
                    f_next,
                    p as f64,
                    sub.gamma.frobenius_dot(&v_next),
                    sub.conjugate(),
                    rho,
                    prox,
                ),
                l,
            });
        }

        v_prev = core::mem::replace(&mut v_curr, v_next);
        sub = sub_next;
        f_curr = f_next;
        grad_curr = grad_next;
        k += 1;
        if residual <= tau * eta_scale || k >= k_max {
            break;
        }
        tau = (tau * cfg.tau_decay).max(cfg.tau_min);
    }

    Ok(InnerOutcome {
        v: v_curr,
        subgradient: sub,
        f_tilde: f_curr,
        iterations: k,
        residual,
        interrupted,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SparseSymMatrix;
    use crate::model::build_maxcut;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DenseMat {
        DenseMat::from_row_major(rows, cols, data.to_vec()).unwrap()
    }

    fn close(a: &DenseMat, b: &DenseMat, tol: f64) -> bool {
        a.same_shape(b) && a.dist_sq(b).sqrt() <= tol
    }

    #[test]
    fn normalized_handles_zero_column() {
        let v = FactorMatrix::normalized(mat(2, 2, &[3.0, 0.0, 4.0, 0.0]));
        assert_eq!(v.as_slice(), &[0.6, 1.0, 0.8, 0.0]);
        assert!(FactorMatrix::new(mat(2, 1, &[1.0, 1.0])).is_err());
    }

    #[test]
    fn gamma_rank_one_collapses() {
        let s = 0.5f64.sqrt();
        let v = FactorMatrix::rank_one(&[s, s], 3).unwrap();
        let sub = choose_gamma(&v).unwrap();
        let mut expected = v.as_mat().clone();
        expected.scale(-2.0);
        assert!(close(&sub.gamma, &expected, 1e-12));
        assert!((sub.gamma.frobenius_dot(&v) + 2.0 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_tie_case() {
        let v = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let sub = choose_gamma(&v).unwrap();
        assert!((sub.gamma.frobenius_norm() - 2.0).abs() < 1e-9);
        assert!((sub.gamma.frobenius_dot(&v) + 2.0).abs() < 1e-9);
    }

    #[test]
    fn mm_step_fixed_points() {
        let s = 0.5f64.sqrt();
        let u = FactorMatrix::rank_one(&[s, -s], 3).unwrap();
        let mut gamma = u.as_mat().clone();
        gamma.scale(-2.0);
        let zero = DenseMat::zeros(2, 3);
        let v = mm_step(&u, &gamma, &zero, 5.0, 1.0);
        assert!(close(&v, &u, 1e-15));
        // L < 2ρ: the corrected closed form still reproduces U
        let v = mm_step(&u, &gamma, &zero, 1.0, 3.0);
        assert!(close(&v, &u, 1e-15));

        let one = mat(1, 1, &[1.0]);
        let v = mm_step(&one, &mat(1, 1, &[-2.0]), &mat(1, 1, &[0.0]), 3.0, 1.0);
        assert_eq!(v.as_slice(), &[1.0]);
    }

    #[test]
    fn mm_step_zero_column_fallback() {
        // G column 0 is L·u − grad = 0
        let u = mat(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let grad = mat(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let v = mm_step(&u, &DenseMat::zeros(2, 2), &grad, 2.0, 1.0);
        assert_eq!(v.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn nesterov_sequence() {
        let mut e = Extrapolation::default();
        assert_eq!(e.next_beta(), 0.0);
        assert!((e.t - 1.618_033_988_749_895).abs() < 1e-12);
        let b = e.next_beta();
        assert!((e.t - 0.5 * (1.0 + 11.472_135_954_999_58f64.sqrt())).abs() < 1e-12);
        assert!((b - 0.618_033_988_749_895 / e.t).abs() < 1e-12);
        assert!((e.t - 2.193_527).abs() < 1e-6);
        let mut prev = b;
        for _ in 0..1000 {
            let b = e.next_beta();
            assert!(b > prev && b < 1.0);
            prev = b;
        }
    }

    #[test]
    fn residual_fixed_point_is_zero() {
        let a = mat(1, 2, &[1.0, 2.0]);
        assert_eq!(inner_residual(&a, &a, &a, &a, &a, &a, 3.0, 0.5), 0.0);
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(conjugate_neg_psi(&DenseMat::zeros(2, 2)), 0.0);
        let r1 = DenseMat::outer(2.0, &[1.0, 0.0], &[0.0, 1.0]);
        assert!((conjugate_neg_psi(&r1) - 1.0).abs() < 1e-12);
        let s = 0.5f64.sqrt();
        let v = FactorMatrix::rank_one(&[s, s], 4).unwrap();
        let mut g = v.as_mat().clone();
        g.scale(-2.0);
        assert!((conjugate_neg_psi(&g) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn theta_examples() {
        let s = 0.5f64.sqrt();
        let v = FactorMatrix::rank_one(&[s, s], 3).unwrap();
        let mut g = v.as_mat().clone();
        g.scale(-2.0);
        let zero = Objective::linear(SparseSymMatrix::zeros(3));
        let th = potential_theta(&zero, &v, &g, &v, 0.7, 1.0).unwrap();
        assert!(th.abs() < 1e-12);
        let off = mat(2, 3, &[1.0; 6]);
        assert_eq!(
            potential_theta(&zero, &off, &g, &v, 0.7, 1.0).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn search_accepts_immediately_for_exact_lipschitz() {
        let c = SparseSymMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let obj = Objective::linear(c);
        let u = FactorMatrix::normalized(mat(2, 2, &[0.3, -0.8, 0.5, 0.1]));
        let sub = choose_gamma(&u).unwrap();
        let (l, _) = search_l(&obj, &u, 0.1, &sub.gamma, 2.0).unwrap();
        assert_eq!(l, 2.0);
        let flat = Objective::linear(SparseSymMatrix::zeros(2));
        let (l, _) = search_l(&flat, &u, 0.1, &sub.gamma, 0.25).unwrap();
        assert_eq!(l, 0.25);
    }

    #[test]
    fn stationary_rank_one_start() {
        let s = 0.5f64.sqrt();
        let v = FactorMatrix::rank_one(&[s, s], 3).unwrap();
        let obj = Objective::linear(SparseSymMatrix::zeros(3));
        let mut policy = StepPolicy::for_objective(&obj).unwrap();
        let out = solve_inner(
            &obj,
            v.clone(),
            1.0,
            &mut policy,
            &InnerConfig::default(),
            &mut || false,
        )
        .unwrap();
        assert!(out.iterations <= 2);
        assert!(gap_from_sigma(3, out.subgradient.triple.sigma) < 1e-12);
    }

    #[test]
    fn two_node_maxcut_converges_to_cut() {
        let w = SparseSymMatrix::from_dense(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let inst = build_maxcut(&w).unwrap();
        let obj = inst.objective();
        let mut v = FactorMatrix::normalized(mat(2, 2, &[0.9, 0.2, 0.1, 0.7]));
        let mut policy = StepPolicy::for_objective(obj).unwrap();
        let cfg = InnerConfig::default();
        for _ in 0..50 {
            v = solve_inner(obj, v, 0.05, &mut policy, &cfg, &mut || false)
                .unwrap()
                .v;
        }
        let cross = crate::linalg::dot(&[v.get(0, 0), v.get(1, 0)], &[v.get(0, 1), v.get(1, 1)]);
        assert!((cross + 1.0).abs() < 1e-6, "cross {cross}");
        assert!((obj.value(&v).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn merit_and_theta_monotone_without_extrapolation() {
        let w = SparseSymMatrix::from_sym_triplets(
            5,
            [
                (0, 1, 1.0),
                (1, 2, 2.0),
                (2, 3, 1.0),
                (3, 4, 3.0),
                (0, 4, 1.0),
                (1, 3, 1.0),
            ],
        )
        .unwrap();
        let inst = build_maxcut(&w).unwrap();
        let obj = inst.objective();
        let mut rng = crate::rng::NormalRng::seed_from_u64(5);
        let v0 = FactorMatrix::normalized(DenseMat::from_fn(3, 5, |_, _| rng.normal()));
        let mut policy = StepPolicy::for_objective(obj).unwrap();
        let cfg = InnerConfig {
            beta_mode: BetaMode::Zero,
            k_max_far: 200,
            k_max_near: 200,
            record_trace: true,
            tau0: 0.0,
            tau_min: 0.0,
            ..InnerConfig::default()
        };
        let out = solve_inner(obj, v0, 0.3, &mut policy, &cfg, &mut || false).unwrap();
        for pair in out.trace.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            assert!(
                b.merit <= a.merit + 1e-8 * (1.0 + a.merit.abs()),
                "{a:?} {b:?}"
            );
            assert!(
                b.theta <= a.theta + 1e-8 * (1.0 + a.theta.abs()),
                "{a:?} {b:?}"
            );
        }
    }
}
