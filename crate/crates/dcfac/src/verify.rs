//! Self-check suites run by `dcfac verify`.

use std::time::Instant;

use dcfac_core::generators::gen_product_random;
use dcfac_core::inner::FactorMatrix;
use dcfac_core::model::{build_maxcut, build_ubqp};
use dcfac_core::oracle::{
    brute_force, check_descent, check_gamma, fd_gradient_check, DescentViolation, GammaCheck,
};
use dcfac_core::rng::NormalRng;
use dcfac_core::{solve, BetaMode, DenseMat, Instance, NoClock, PenaltyConfig, SparseSymMatrix};

/// Largest `n` drawn by the tiny-exact suite.
pub const TINY_MAX_N: usize = 12;
/// Largest `n` drawn by the descent suite.
pub const DESCENT_MAX_N: usize = 50;
pub const FD_STEP: f64 = 1e-6;

fn draw_range(rng: &mut NormalRng, lo: usize, hi: usize) -> usize {
    lo + ((rng.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
}

/// UBQP with entries of `A` uniform on `[−5, 5]`.
pub fn random_ubqp(n: usize, rng: &mut NormalRng) -> Instance {
    let mut dense = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = rng.uniform() * 10.0 - 5.0;
            dense[i * n + j] = v;
            dense[j * n + i] = v;
        }
    }
    let a = SparseSymMatrix::from_dense(n, &dense).expect("symmetric by construction");
    build_ubqp(&a).expect("valid ubqp")
}

/// Max-cut on a random graph with edge probability 0.3 and weights in
/// `{−1, 1}`.
pub fn random_maxcut(n: usize, rng: &mut NormalRng) -> Instance {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.uniform() < 0.3 {
                edges.push((i, j, if rng.uniform() < 0.5 { -1.0 } else { 1.0 }));
            }
        }
    }
    let w = SparseSymMatrix::from_sym_triplets(n, edges).expect("indices in range");
    build_maxcut(&w).expect("zero diagonal")
}

/// Random point on the unit-column manifold.
pub fn random_factor(m: usize, p: usize, rng: &mut NormalRng) -> FactorMatrix {
    FactorMatrix::normalized(DenseMat::from_fn(m, p, |_, _| rng.normal()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TinyExactCase {
    pub n: usize,
    pub obj: f64,
    pub obj_extracted: f64,
    pub opt: f64,
    pub exact: bool,
    pub feasible: bool,
    pub exited_normally: bool,
    pub infeas_inf: f64,
    pub infeas_two: f64,
    pub time_s: f64,
}

pub fn tiny_exact(
    trials: usize,
    seed: u64,
    cfg: &PenaltyConfig,
) -> dcfac_core::Result<Vec<TinyExactCase>> {
    let mut rng = NormalRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let n = draw_range(&mut rng, 2, TINY_MAX_N);
        let inst = random_ubqp(n, &mut rng);
        let t0 = Instant::now();
        let rep = solve(&inst, cfg, &NoClock)?;
        let time_s = t0.elapsed().as_secs_f64();
        let opt = brute_force(&inst)?.opt_value;
        let signs: Vec<f64> = rep.x_binary.iter().map(|&s| f64::from(s)).collect();
        let feasible = inst
            .ubqp_assignment(&signs)
            .is_some_and(|z| z.len() == n && z.iter().all(|&b| b <= 1));
        out.push(TinyExactCase {
            n,
            obj: rep.obj,
            obj_extracted: rep.obj_extracted,
            opt,
            exact: (rep.obj - opt).abs() <= 1e-9 * (1.0 + opt.abs()),
            feasible,
            exited_normally: rep.exited_normally,
            infeas_inf: rep.infeas_inf,
            infeas_two: rep.infeas_two,
            time_s,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct DescentSummary {
    pub instances: usize,
    pub inner_runs: usize,
    pub trace_points: usize,
    pub abnormal_exits: usize,
    /// Largest `‖x∘x − e‖₂` over normal exits.
    pub max_infeas_two: f64,
    /// `(instance index, violation)`.
    pub violations: Vec<(usize, DescentViolation)>,
}

/// Solves random UBQP and max-cut instances (alternating, `n ≤ 50`) without
/// extrapolation and checks every inner trace for descent.
pub fn descent_suite(trials: usize, seed: u64) -> dcfac_core::Result<DescentSummary> {
    let mut rng = NormalRng::seed_from_u64(seed);
    let cfg = PenaltyConfig {
        beta_mode: BetaMode::Zero,
        record_inner_traces: true,
        ..PenaltyConfig::default()
    };
    let mut summary = DescentSummary::default();
    for t in 0..trials {
        let n = draw_range(&mut rng, 2, DESCENT_MAX_N);
        let inst = if t % 2 == 0 {
            random_ubqp(n, &mut rng)
        } else {
            random_maxcut(n, &mut rng)
        };
        let rep = solve(&inst, &cfg, &NoClock)?;
        summary.instances += 1;
        if rep.exited_normally {
            summary.max_infeas_two = summary.max_infeas_two.max(rep.infeas_two);
        } else {
            summary.abnormal_exits += 1;
        }
        for run in &rep.inner_runs {
            summary.inner_runs += 1;
            summary.trace_points += run.points.len();
            summary
                .violations
                .extend(check_descent(&run.points).into_iter().map(|v| (t, v)));
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Default)]
pub struct GammaSummary {
    pub checks: usize,
    pub failures: usize,
    pub worst_inner_product: f64,
    pub worst_fenchel_young: f64,
    pub worst_rank_ratio: f64,
}

/// `check_gamma` at random points with `m ≤ 10`, `p ≤ 40`.
pub fn gamma_suite(count: usize, seed: u64) -> dcfac_core::Result<GammaSummary> {
    let mut rng = NormalRng::seed_from_u64(seed);
    let mut s = GammaSummary::default();
    for _ in 0..count {
        let m = draw_range(&mut rng, 2, 10);
        let p = draw_range(&mut rng, 2, 40);
        let v = random_factor(m, p, &mut rng);
        let c: GammaCheck = check_gamma(&v)?;
        s.checks += 1;
        s.failures += usize::from(!c.passed);
        s.worst_inner_product = s.worst_inner_product.max(c.inner_product_err);
        s.worst_fenchel_young = s.worst_fenchel_young.max(c.fenchel_young_err);
        s.worst_rank_ratio = s.worst_rank_ratio.max(c.rank_ratio);
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GradcheckSummary {
    pub points: usize,
    pub linear_max: f64,
    pub product_max: f64,
}

/// Central-difference gradient errors at `points` random factors for a
/// linear objective (`p = 10`) and a two-factor product (`p = 11`), `m = 4`.
pub fn gradcheck(points: usize, seed: u64) -> dcfac_core::Result<GradcheckSummary> {
    let mut rng = NormalRng::seed_from_u64(seed);
    let linear = random_ubqp(9, &mut rng);
    let product = gen_product_random(5, seed)?;
    let mut s = GradcheckSummary {
        points,
        ..Default::default()
    };
    for _ in 0..points {
        let v = random_factor(4, linear.dim(), &mut rng);
        s.linear_max = s
            .linear_max
            .max(fd_gradient_check(linear.objective(), &v, FD_STEP)?);
        let v = random_factor(4, product.dim(), &mut rng);
        s.product_max = s
            .product_max
            .max(fd_gradient_check(product.objective(), &v, FD_STEP)?);
    }
    Ok(s)
}
