//! Structured solve reports (JSON) and their human-readable rendering.

use std::fmt::Write as _;

use dcfac_core::driver::{ExitReason, InnerRun};
use dcfac_core::{BetaMode, Instance, PenaltyConfig, SolveReport};
use serde::{Deserialize, Serialize};

use crate::formats::Kind;

pub const REPORT_SCHEMA: &str = "dcfac-report";
pub const REPORT_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BetaArg {
    Nesterov,
    Zero,
}

impl From<BetaArg> for BetaMode {
    fn from(b: BetaArg) -> Self {
        match b {
            BetaArg::Nesterov => BetaMode::Nesterov,
            BetaArg::Zero => BetaMode::Zero,
        }
    }
}

impl From<BetaMode> for BetaArg {
    fn from(b: BetaMode) -> Self {
        match b {
            BetaMode::Nesterov => BetaArg::Nesterov,
            BetaMode::Zero => BetaArg::Zero,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub name: String,
    pub kind: Kind,
    pub n: usize,
    pub p: usize,
    pub known_best: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigInfo {
    pub rho0: f64,
    pub sigma: f64,
    pub eps: f64,
    pub rho_max: f64,
    pub l_max: usize,
    pub m: usize,
    pub seed: u64,
    pub beta_mode: BetaArg,
    pub time_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitInfo {
    Converged,
    IterationLimit,
    TimeLimit,
}

impl From<ExitReason> for ExitInfo {
    fn from(e: ExitReason) -> Self {
        match e {
            ExitReason::Converged => ExitInfo::Converged,
            ExitReason::IterationLimit => ExitInfo::IterationLimit,
            ExitReason::TimeLimit => ExitInfo::TimeLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultInfo {
    pub obj: f64,
    pub obj_extracted: f64,
    pub f_final: f64,
    pub gap_percent: Option<f64>,
    pub infeas_inf: f64,
    pub infeas_two: f64,
    pub rank_one_gap: f64,
    pub outer_iters: usize,
    pub inner_iters: usize,
    pub rho_final: f64,
    pub bound_trace_term: f64,
    /// The bound is only established without extrapolation.
    pub bound_trace_rigorous: bool,
    pub tie_ratio: f64,
    pub tied: bool,
    pub exit_reason: ExitInfo,
    pub exited_normally: bool,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionInfo {
    pub x_binary: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePointInfo {
    pub k: usize,
    pub f_tilde: f64,
    pub spec_norm_sq: f64,
    pub merit: f64,
    pub residual: f64,
    pub theta: f64,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerRunInfo {
    pub rho: f64,
    pub points: Vec<TracePointInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceInfo {
    pub rho: Vec<f64>,
    pub specnorm: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Vec<InnerRunInfo>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema: String,
    pub version: u64,
    pub instance: InstanceInfo,
    pub config: ConfigInfo,
    pub result: ResultInfo,
    pub solution: SolutionInfo,
    pub traces: TraceInfo,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ReportOptions {
    pub emit_x: bool,
    pub emit_trace: bool,
    pub timing: bool,
}

fn inner_info(run: &InnerRun) -> InnerRunInfo {
    InnerRunInfo {
        rho: run.rho,
        points: run
            .points
            .iter()
            .map(|p| TracePointInfo {
                k: p.k,
                f_tilde: p.f_tilde,
                spec_norm_sq: p.spec_norm_sq,
                merit: p.merit,
                residual: p.residual,
                theta: p.theta,
                l: p.l,
            })
            .collect(),
    }
}

impl ReportDoc {
    pub fn new(
        inst: &Instance,
        cfg: &PenaltyConfig,
        rep: &SolveReport,
        opts: ReportOptions,
    ) -> Self {
        let signs: Vec<f64> = rep.x_binary.iter().map(|&s| f64::from(s)).collect();
        Self {
            schema: REPORT_SCHEMA.into(),
            version: REPORT_VERSION,
            instance: InstanceInfo {
                name: inst.name.clone(),
                kind: inst.kind().into(),
                n: inst.n_binary,
                p: inst.dim(),
                known_best: inst.known_best,
            },
            config: ConfigInfo {
                rho0: cfg.rho0,
                sigma: cfg.sigma,
                eps: cfg.eps,
                rho_max: cfg.rho_max,
                l_max: cfg.l_max,
                m: rep.m,
                seed: rep.seed,
                beta_mode: rep.beta_mode.into(),
                time_limit: cfg.time_limit,
            },
            result: ResultInfo {
                obj: rep.obj,
                obj_extracted: rep.obj_extracted,
                f_final: rep.f_final,
                gap_percent: rep.gap_percent,
                infeas_inf: rep.infeas_inf,
                infeas_two: rep.infeas_two,
                rank_one_gap: rep.rank_one_gap,
                outer_iters: rep.outer_iters,
                inner_iters: rep.inner_iters,
                rho_final: rep.rho_final,
                bound_trace_term: rep.bound_trace_term,
                bound_trace_rigorous: rep.beta_mode == BetaMode::Zero,
                tie_ratio: rep.tie_ratio,
                tied: rep.tied,
                exit_reason: rep.exit_reason.into(),
                exited_normally: rep.exited_normally,
                wall_time_s: opts.timing.then_some(rep.wall_time),
            },
            solution: SolutionInfo {
                x_binary: rep.x_binary.clone(),
                z: inst.ubqp_assignment(&signs),
                x: opts.emit_x.then(|| rep.x.clone()),
            },
            traces: TraceInfo {
                rho: rep.rho_trace.clone(),
                specnorm: rep.specnorm_trace.clone(),
                inner: opts
                    .emit_trace
                    .then(|| rep.inner_runs.iter().map(inner_info).collect()),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Short human-readable summary.
    pub fn to_pretty(&self) -> String {
        let r = &self.result;
        let i = &self.instance;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<14}{} ({}, n = {})",
            "instance",
            i.name,
            i.kind.as_str(),
            i.n
        );
        let _ = writeln!(out, "{:<14}{}", "objective", r.obj);
        if let Some(best) = i.known_best {
            match r.gap_percent {
                Some(g) => {
                    let _ = writeln!(out, "{:<14}{} (gap {:.3}%)", "best known", best, g);
                }
                None => {
                    let _ = writeln!(out, "{:<14}{}", "best known", best);
                }
            }
        }
        let _ = writeln!(
            out,
            "{:<14}{:.3e} (max), {:.3e} (2-norm)",
            "infeasibility", r.infeas_inf, r.infeas_two
        );
        let _ = writeln!(
            out,
            "{:<14}{} outer, {} inner",
            "iterations", r.outer_iters, r.inner_iters
        );
        let _ = writeln!(out, "{:<14}{:?}", "exit", r.exit_reason);
        if let Some(t) = r.wall_time_s {
            let _ = writeln!(out, "{:<14}{:.3} s", "time", t);
        }
        if r.tied {
            let _ = writeln!(
                out,
                "{:<14}leading singular value is not simple (ratio {:.6})",
                "warning", r.tie_ratio
            );
        }
        out
    }
}
