//! Ground truth for small instances and runtime certificate checks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::inner::{choose_gamma, InnerTracePoint};
use crate::linalg::{singular_values, DenseMat};
use crate::model::{Instance, Objective};

/// Largest number of free binary variables [`brute_force`] will enumerate.
pub const MAX_ENUMERATION_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub opt_value: f64,
    /// Sign vector over the lifted coordinates (index 0 fixed to `+1` for
    /// homogenized instances).
    pub argmax: Vec<i8>,
    pub evaluations: u64,
}

fn tie_tol(v: f64) -> f64 {
    1e-9 * (1.0 + v.abs())
}

/// Exhaustive maximization over all sign vectors. Among (near-)ties the
/// lexicographically smallest vector wins, with `−1 < +1`.
pub fn brute_force(inst: &Instance) -> Result<BruteForceResult> {
    let p = inst.dim();
    let first_free = usize::from(inst.is_homogenized());
    let free = p - first_free;
    if free > MAX_ENUMERATION_VARS {
        return Err(Error::TooLargeForEnumeration(free));
    }
    let mut x = vec![-1.0; p];
    if first_free == 1 {
        x[0] = 1.0;
    }
    let exact = |x: &[f64]| inst.objective_at_binary(x);

    let mut best_x = x.clone();
    let mut best = exact(&x)?;
    let total = 1u64 << free;

    let consider =
        |x: &[f64], screened: f64, best: &mut f64, best_x: &mut Vec<f64>| -> Result<()> {
            if screened < *best - 10.0 * tie_tol(*best) {
                return Ok(());
            }
            let value = exact(x)?;
            let better = value > *best + tie_tol(*best);
            let tied = !better && (value - *best).abs() <= tie_tol(*best);
            if better || (tied && lex_less(x, best_x)) {
                if better {
                    *best = value;
                }
                best_x.copy_from_slice(x);
            }
            Ok(())
        };

    match inst.objective() {
        Objective::Linear { c } => {
            // Gray-code walk keeping y = Cx and q = xᵀCx up to date.
            let mut y = vec![0.0; p];
            c.mul_vec_into(&x, &mut y);
            let mut q = crate::linalg::dot(&x, &y);
            for step in 1..total {
                let j = first_free + step.trailing_zeros() as usize;
                let xj = x[j];
                q += -4.0 * xj * y[j] + 4.0 * c.get(j, j);
                let (cols, vals) = c.row(j);
                for (&k, &v) in cols.iter().zip(vals) {
                    y[k] -= 2.0 * xj * v;
                }
                x[j] = -xj;
                consider(&x, inst.objective_offset - q, &mut best, &mut best_x)?;
            }
        }
        Objective::Product { .. } => {
            for step in 1..total {
                let j = first_free + step.trailing_zeros() as usize;
                x[j] = -x[j];
                consider(&x, f64::INFINITY, &mut best, &mut best_x)?;
            }
        }
    }

    Ok(BruteForceResult {
        opt_value: best,
        argmax: best_x
            .iter()
            .map(|&v| if v > 0.0 { 1 } else { -1 })
            .collect(),
        evaluations: total,
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Central-difference check of `∇f̃`: `max |fd − grad| / (1 + |grad|)`.
pub fn fd_gradient_check(obj: &Objective, v: &DenseMat, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(
            "finite-difference step must be positive",
        ));
    }
    let grad = obj.gradient(v)?;
    let mut probe = v.clone();
    let mut worst: f64 = 0.0;
    for k in 0..v.as_slice().len() {
        let orig = probe.as_slice()[k];
        probe.as_mut_slice()[k] = orig + step;
        let up = obj.value(&probe)?;
        probe.as_mut_slice()[k] = orig - step;
        let down = obj.value(&probe)?;
        probe.as_mut_slice()[k] = orig;
        let fd = (up - down) / (2.0 * step);
        let g = grad.as_slice()[k];
        worst = worst.max((fd - g).abs() / (1.0 + g.abs()));
    }
    Ok(worst)
}

/// Measured quantities of the subgradient certificate at one `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCheck {
    /// `|⟨Γ,V⟩ + 2‖V‖²| / max(1, 2‖V‖²)`.
    pub inner_product_err: f64,
    /// `|ψ(V) − (−ψ)*(−Γ) − ⟨Γ,V⟩| / max(1, 2‖V‖²)` with `ψ(V) = −‖V‖²`.
    pub fenchel_young_err: f64,
    /// `σ₂(Γ)/σ₁(Γ)`.
    pub rank_ratio: f64,
    pub passed: bool,
}

pub const GAMMA_REL_TOL: f64 = 1e-9;
pub const GAMMA_RANK_TOL: f64 = 1e-8;

/// Checks `Γ` from [`choose_gamma`] against singular values computed
/// independently by Jacobi rotations.
pub fn check_gamma(v: &DenseMat) -> Result<GammaCheck> {
    let sub = choose_gamma(v)?;
    let sv = singular_values(v);
    let spec_sq = sv[0] * sv[0];
    let gamma_sv = singular_values(&sub.gamma);
    let nuclear: f64 = gamma_sv.iter().sum();
    let scale = (2.0 * spec_sq).max(1.0);
    let ip = sub.gamma.frobenius_dot(v);
    let inner_product_err = (ip + 2.0 * spec_sq).abs() / scale;
    let fenchel_young_err = (-spec_sq - 0.25 * nuclear * nuclear - ip).abs() / scale;
    let rank_ratio = if gamma_sv[0] > 0.0 {
        gamma_sv.get(1).copied().unwrap_or(0.0) / gamma_sv[0]
    } else {
        0.0
    };
    Ok(GammaCheck {
        inner_product_err,
        fenchel_young_err,
        rank_ratio,
        passed: inner_product_err <= GAMMA_REL_TOL
            && fenchel_young_err <= GAMMA_REL_TOL
            && rank_ratio <= GAMMA_RANK_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentQuantity {
    Merit,
    Potential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentViolation {
    /// Index into the trace of the point that increased.
    pub index: usize,
    pub quantity: DescentQuantity,
    pub increase: f64,
}

pub const DESCENT_REL_TOL: f64 = 1e-8;

/// Both monotonicity chains of a trace, allowing `1e-8·(1 + |value|)` per
/// step. Returns every violation (empty means pass).
pub fn check_descent(trace: &[InnerTracePoint]) -> Vec<DescentViolation> {
    let mut out = Vec::new();
    for (idx, pair) in trace.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        for (quantity, before, after) in [
            (DescentQuantity::Merit, a.merit, b.merit),
            (DescentQuantity::Potential, a.theta, b.theta),
        ] {
            if after > before + DESCENT_REL_TOL * (1.0 + before.abs()) {
                out.push(DescentViolation {
                    index: idx + 1,
                    quantity,
                    increase: after - before,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::FactorMatrix;
    use crate::linalg::SparseSymMatrix;
    use crate::model::{build_maxcut, build_ubqp};
    use crate::rng::NormalRng;

    #[test]
    fn triangle_and_single_variable() {
        let tri =
            SparseSymMatrix::from_sym_triplets(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let r = brute_force(&build_maxcut(&tri).unwrap()).unwrap();
        assert_eq!(r.opt_value, 2.0);
        assert_eq!(r.evaluations, 8);
        assert_eq!(r.argmax, vec![-1, -1, 1]);

        let one = build_ubqp(&SparseSymMatrix::diagonal(&[2.0])).unwrap();
        let r = brute_force(&one).unwrap();
        assert_eq!(r.opt_value, 2.0);
        assert_eq!(r.argmax, vec![1, 1]);
    }

    #[test]
    fn zero_objective_prefers_all_minus() {
        let r = brute_force(&build_maxcut(&SparseSymMatrix::zeros(4)).unwrap()).unwrap();
        assert_eq!(r.opt_value, 0.0);
        assert_eq!(r.argmax, vec![-1; 4]);
        let r = brute_force(&build_ubqp(&SparseSymMatrix::zeros(3)).unwrap()).unwrap();
        assert_eq!(r.argmax, vec![1, -1, -1, -1]);
    }

    #[test]
    fn enumeration_guard() {
        let big = build_maxcut(&SparseSymMatrix::zeros(25)).unwrap();
        assert_eq!(
            brute_force(&big).unwrap_err(),
            Error::TooLargeForEnumeration(25)
        );
    }

    #[test]
    fn gray_code_matches_plain_enumeration() {
        let mut rng = NormalRng::seed_from_u64(8);
        for n in 1..=9 {
            let dense: Vec<f64> = {
                let mut d = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let v = (rng.uniform() * 10.0 - 5.0).round();
                        d[i * n + j] = v;
                        d[j * n + i] = v;
                    }
                }
                d
            };
            let inst = build_ubqp(&SparseSymMatrix::from_dense(n, &dense).unwrap()).unwrap();
            let mut best = f64::MIN;
            for mask in 0..(1u32 << n) {
                let z: Vec<f64> = (0..n).map(|k| f64::from(mask >> k & 1)).collect();
                let v: f64 = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| z[i] * dense[i * n + j] * z[j])
                    .sum();
                best = best.max(v);
            }
            assert_eq!(brute_force(&inst).unwrap().opt_value, best);
        }
    }

    #[test]
    fn gradcheck_identity_exact() {
        let obj = Objective::linear(SparseSymMatrix::identity(4));
        let v = DenseMat::from_fn(3, 4, |i, j| (i as f64) - 0.3 * j as f64);
        assert!(fd_gradient_check(&obj, &v, 1e-6).unwrap() <= 1e-9);
    }

    #[test]
    fn gamma_certificates() {
        let s = 0.5f64.sqrt();
        let r1 = FactorMatrix::rank_one(&[s, s], 5).unwrap();
        assert!(check_gamma(&r1).unwrap().passed);
        let id = DenseMat::from_fn(2, 2, |i, j| f64::from(u8::from(i == j)));
        assert!(check_gamma(&id).unwrap().passed);
        let mut rng = NormalRng::seed_from_u64(4);
        let v = FactorMatrix::normalized(DenseMat::from_fn(5, 20, |_, _| rng.normal()));
        let c = check_gamma(&v).unwrap();
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn descent_negative_control() {
        let pt = |merit: f64, theta: f64| InnerTracePoint {
            k: 0,
            f_tilde: 0.0,
            spec_norm_sq: 0.0,
            merit,
            residual: 0.0,
            theta,
            l: 1.0,
        };
        assert!(check_descent(&[pt(1.0, 1.0)]).is_empty());
        let trace = [pt(3.0, 3.0), pt(2.0, 2.0), pt(2.5, 1.0), pt(1.0, 0.5)];
        let v = check_descent(&trace);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 2);
        assert_eq!(v[0].quantity, DescentQuantity::Merit);
    }
}
