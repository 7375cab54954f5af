//! Outer penalty loop, rank-one extraction, rounding and the reported
//! metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
pub use crate::inner::BetaMode;
use crate::inner::{
    gap_from_sigma, solve_inner, FactorMatrix, InnerConfig, InnerTracePoint, StepPolicy,
};
use crate::linalg::{leading_singular_triple, second_singular_value, DenseMat, SingularTriple};
use crate::model::Instance;
use crate::rng::NormalRng;

/// Default seed for the initial factor.
pub const DEFAULT_SEED: u64 = 0;
/// `σ₂/σ₁` at or above this value flags the extraction as tied.
pub const TIE_RATIO: f64 = 1.0 - 1e-6;

/// Source of elapsed wall time for the time limit.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; time limits never fire.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyConfig {
    pub rho0: f64,
    pub sigma: f64,
    pub eps: f64,
    pub rho_max: f64,
    pub l_max: usize,
    /// Rows of `V`; `None` picks [`default_m`].
    pub m: Option<usize>,
    pub seed: u64,
    pub beta_mode: BetaMode,
    pub time_limit: Option<f64>,
    /// Start index of the bound trace.
    pub l_star: usize,
    /// Rank parameter of the bound trace; `None` uses `m`.
    pub r_star: Option<f64>,
    /// Keep the per-iteration trace of every inner solve.
    pub record_inner_traces: bool,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            rho0: 0.001,
            sigma: 1.005,
            eps: 1e-8,
            rho_max: 1e6,
            l_max: 10_000,
            m: None,
            seed: DEFAULT_SEED,
            beta_mode: BetaMode::Nesterov,
            time_limit: None,
            l_star: 0,
            r_star: None,
            record_inner_traces: false,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidConfig("rho0 must be positive"));
        }
        if !(self.sigma > 1.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig("sigma must exceed 1"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidConfig("eps must lie in (0, 1)"));
        }
        if !(self.rho_max >= self.rho0) {
            return Err(Error::InvalidConfig("rho_max must be at least rho0"));
        }
        if self.l_max == 0 {
            return Err(Error::InvalidConfig("l_max must be positive"));
        }
        if self.m.is_some_and(|m| m < 2) {
            return Err(Error::InvalidConfig("m must be at least 2"));
        }
        if self.time_limit.is_some_and(|t| !(t >= 0.0)) {
            return Err(Error::InvalidConfig("time limit must be nonnegative"));
        }
        if self.r_star.is_some_and(|r| !(r > 0.0)) {
            return Err(Error::InvalidConfig("r_star must be positive"));
        }
        Ok(())
    }

    pub fn rows_for(&self, p: usize) -> usize {
        self.m.unwrap_or_else(|| default_m(p))
    }
}

/// `max(min(50, round(p/2)), 2)`, rounding halves away from zero.
pub fn default_m(p: usize) -> usize {
    p.div_ceil(2).clamp(2, 50)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitReason {
    Converged,
    IterationLimit,
    TimeLimit,
}

/// Trace of one inner solve.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerRun {
    pub rho: f64,
    pub points: Vec<InnerTracePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Rank-one extraction `σ₁p₁` of the final factor.
    pub x: Vec<f64>,
    pub x_binary: Vec<i8>,
    /// Objective at the rounded sign vector.
    pub obj: f64,
    /// `offset − f(xxᵀ)` at the unrounded extraction.
    pub obj_extracted: f64,
    /// `f̃` at the final factor.
    pub f_final: f64,
    /// `100·(obj − best)/|best|`; absent without a nonzero known best.
    pub gap_percent: Option<f64>,
    pub infeas_inf: f64,
    pub infeas_two: f64,
    pub rank_one_gap: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub rho_final: f64,
    /// `ρ_j` for `j = 0..=l_f`.
    pub rho_trace: Vec<f64>,
    /// `‖V^j‖²` for `j = 0..=l_f`.
    pub specnorm_trace: Vec<f64>,
    pub bound_trace_term: f64,
    /// `σ₂/σ₁` of the final factor.
    pub tie_ratio: f64,
    pub tied: bool,
    pub m: usize,
    pub seed: u64,
    pub beta_mode: BetaMode,
    pub wall_time: f64,
    pub exit_reason: ExitReason,
    pub exited_normally: bool,
    /// Empty unless traces were requested.
    pub inner_runs: Vec<InnerRun>,
}

/// Standard-normal `m × p` matrix from `seed` (row-major draw order) with
/// columns normalized.
pub fn init_v0(m: usize, p: usize, seed: u64) -> FactorMatrix {
    let mut rng = NormalRng::seed_from_u64(seed);
    FactorMatrix::normalized(DenseMat::from_fn(m, p, |_, _| rng.normal()))
}

/// `‖V‖_F² − ‖V‖² = p − σ₁²` on the manifold, clamped at zero.
pub fn rank_one_gap(v: &FactorMatrix) -> Result<f64> {
    let t = leading_singular_triple(v)?;
    Ok(gap_from_sigma(v.cols(), t.sigma))
}

/// `x = σ₁p₁`, flipped so that `x₀ ≥ 0` when `homogenized`.
pub fn extract_rank_one(v: &FactorMatrix, homogenized: bool) -> Result<Vec<f64>> {
    let t = leading_singular_triple(v)?;
    Ok(extract_from_triple(&t, homogenized))
}

fn extract_from_triple(t: &SingularTriple, homogenized: bool) -> Vec<f64> {
    let s = if homogenized && t.right.first().is_some_and(|&r| r < 0.0) {
        -t.sigma
    } else {
        t.sigma
    };
    t.right.iter().map(|r| s * r).collect()
}

/// `(max_j ||x_j| − 1|, ‖x∘x − e‖₂)`.
pub fn infeasibility(x: &[f64]) -> (f64, f64) {
    let inf = x.iter().map(|v| (v.abs() - 1.0).abs()).fold(0.0, f64::max);
    let two = libm::sqrt(x.iter().map(|v| (v * v - 1.0) * (v * v - 1.0)).sum());
    (inf, two)
}

/// Componentwise sign with `sign(0) = +1`; for homogenized instances the
/// vector is first multiplied by `sign(x₀)`.
pub fn round_binary(x: &[f64], homogenized: bool) -> Vec<i8> {
    let flip = homogenized && x.first().is_some_and(|&v| v < 0.0);
    x.iter()
        .map(|&v| {
            let v = if flip { -v } else { v };
            if v >= 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// `ρ_{l_f}s_{l_f} − ρ_{l*}p/r* + Σ_{j=l*}^{l_f−1}(ρ_j − ρ_{j+1})s_{j+1} + α_f ε`
/// where `s_j = ‖V^j‖²` and `l_f` is the last trace index.
pub fn bound_trace(
    rho_trace: &[f64],
    specnorm_trace: &[f64],
    p: usize,
    l_star: usize,
    r_star: f64,
    alpha_f: f64,
    eps: f64,
) -> Result<f64> {
    if rho_trace.len() != specnorm_trace.len() || rho_trace.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: rho_trace.len(),
            found: specnorm_trace.len(),
        });
    }
    let lf = rho_trace.len() - 1;
    if l_star > lf {
        return Err(Error::IndexOutOfRange {
            index: l_star,
            dim: lf + 1,
        });
    }
    let sum: f64 = (l_star..lf)
        .map(|j| (rho_trace[j] - rho_trace[j + 1]) * specnorm_trace[j + 1])
        .sum();
    Ok(
        rho_trace[lf] * specnorm_trace[lf] - rho_trace[l_star] * p as f64 / r_star
            + sum
            + alpha_f * eps,
    )
}

/// Runs the penalty loop on `inst` and scores the rounded result.
pub fn solve(inst: &Instance, cfg: &PenaltyConfig, clock: &dyn Clock) -> Result<SolveReport> {
    cfg.validate()?;
    let obj = inst.objective();
    let p = inst.dim();
    if p < 2 {
        return Err(Error::InvalidConfig(
            "problem needs at least two lifted coordinates",
        ));
    }
    let m = cfg.rows_for(p);
    let homogenized = inst.is_homogenized();
    let start = clock.elapsed_secs();
    let out_of_time = || {
        cfg.time_limit
            .is_some_and(|limit| clock.elapsed_secs() - start >= limit)
    };

    let inner_cfg = InnerConfig {
        beta_mode: cfg.beta_mode,
        record_trace: cfg.record_inner_traces,
        ..InnerConfig::default()
    };
    let mut policy = StepPolicy::for_objective(obj)?;
    let mut v = init_v0(m, p, cfg.seed);
    let first = leading_singular_triple(&v)?;
    let mut rho = cfg.rho0;
    let mut rho_trace = vec![rho];
    let mut specnorm_trace = vec![first.sigma * first.sigma];
    let mut triple = first;
    let mut f_final = obj.value(&v)?;
    let mut inner_iters = 0;
    let mut exit_reason = ExitReason::IterationLimit;
    let mut gap = gap_from_sigma(p, triple.sigma);
    let mut inner_runs = Vec::new();

    for _ in 0..cfg.l_max {
        let mut stop = || out_of_time();
        let outcome = solve_inner(obj, v, rho, &mut policy, &inner_cfg, &mut stop)?;
        inner_iters += outcome.iterations;
        if cfg.record_inner_traces {
            inner_runs.push(InnerRun {
                rho,
                points: outcome.trace,
            });
        }
        v = outcome.v;
        f_final = outcome.f_tilde;
        triple = outcome.subgradient.triple;
        gap = gap_from_sigma(p, triple.sigma);
        specnorm_trace.push(triple.sigma * triple.sigma);
        rho = (cfg.sigma * rho).min(cfg.rho_max);
        rho_trace.push(rho);
        if gap <= cfg.eps {
            exit_reason = ExitReason::Converged;
            break;
        }
        if outcome.interrupted || out_of_time() {
            exit_reason = ExitReason::TimeLimit;
            break;
        }
    }

    let x = extract_from_triple(&triple, homogenized);
    let x_binary = round_binary(&x, homogenized);
    let signs: Vec<f64> = x_binary.iter().map(|&s| f64::from(s)).collect();
    let value = inst.objective_at_binary(&signs)?;
    let obj_extracted = inst.objective_at_point(&x)?;
    let (infeas_inf, infeas_two) = infeasibility(&x);
    let sigma2 = second_singular_value(&v, &triple);
    let tie_ratio = if triple.sigma > 0.0 {
        sigma2 / triple.sigma
    } else {
        0.0
    };
    let r_star = cfg.r_star.unwrap_or(m as f64);
    let l_star = cfg.l_star.min(rho_trace.len() - 1);
    let bound_trace_term = bound_trace(
        &rho_trace,
        &specnorm_trace,
        p,
        l_star,
        r_star,
        obj.alpha_f(),
        cfg.eps,
    )?;
    let gap_percent = inst
        .known_best
        .filter(|&b| b != 0.0)
        .map(|b| 100.0 * (value - b) / b.abs());

    Ok(SolveReport {
        x,
        x_binary,
        obj: value,
        obj_extracted,
        f_final,
        gap_percent,
        infeas_inf,
        infeas_two,
        rank_one_gap: gap,
        outer_iters: rho_trace.len() - 1,
        inner_iters,
        rho_final: rho_trace[rho_trace.len() - 2],
        rho_trace,
        specnorm_trace,
        bound_trace_term,
        tie_ratio,
        tied: tie_ratio >= TIE_RATIO,
        m,
        seed: cfg.seed,
        beta_mode: cfg.beta_mode,
        wall_time: clock.elapsed_secs() - start,
        exit_reason,
        exited_normally: exit_reason == ExitReason::Converged,
        inner_runs,
    })
}
